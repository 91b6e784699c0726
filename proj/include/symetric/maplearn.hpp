#pragma once

#include "symetric/core.hpp"
#include "symetric/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace symetric {

inline constexpr std::size_t kMaxPolynomialFeatures = 1'000'000;
/// Polynomial terms with a smaller (standardized) weight are left out of the Jacobian.
inline constexpr double kJacobianPruneThreshold = 1e-3;

// Polynomial expansion --------------------------------------------------------

/// Number of monomials of total degree 1..order in `dim` variables,
/// C(dim + order, order) - 1. Throws ExpansionTooLarge past kMaxPolynomialFeatures.
std::size_t polynomial_feature_count(int dim, int order);

/// All monomials of total degree 1..order, graded, and within a degree in
/// lexicographic order of the sorted variable indices: for two variables and
/// order 2 that is z₁, z₂, z₁², z₁z₂, z₂².
class PolynomialBasis {
 public:
  PolynomialBasis(int dim, int order);

  int input_dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return exponents_.size(); }
  /// exponents()[j][d] is the power of variable d in monomial j.
  const std::vector<std::vector<int>>& exponents() const noexcept { return exponents_; }

  Vector features(const Vector& z) const;
  /// Row-wise expansion of an N × dim matrix into N × size().
  Matrix features(const Matrix& rows) const;
  /// size() × dim matrix of ∂φⱼ/∂z_d.
  Matrix feature_jacobian(const Vector& z) const;

 private:
  int dim_;
  int order_;
  std::vector<std::vector<int>> exponents_;
  // Monomial j (degree ≥ 2) is monomial parent_[j] times variable factor_[j].
  std::vector<std::ptrdiff_t> parent_;
  std::vector<int> factor_;
};

Vector polynomial_features(const Vector& v, int order);

// Lasso -----------------------------------------------------------------------

struct LassoOptions {
  std::vector<double> alphas{1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  int folds = 2;
  int max_iter = 1000;
  /// Sweeps stop once the largest coefficient change falls below this.
  double tol = 1e-6;
};

struct LassoResult {
  /// outputs × features, in the units of the caller's X and Y.
  Matrix coef;
  Vector intercept;
  std::vector<double> alpha;
  std::vector<std::size_t> excluded_columns;
};

/// Per-output Lasso, (1/2N)‖y - Xw - b‖² + α‖w‖₁, on internally standardized
/// columns. α is picked per output by contiguous K-fold cross-validation over
/// `groups` (one label per row, e.g. trajectory index; rows are their own
/// group when empty), then refit on all rows.
LassoResult lasso_fit(const Matrix& x, const Matrix& y, const LassoOptions& options = {},
                      std::span<const std::size_t> groups = {});

struct CoordinateDescentResult {
  Vector coef;
  int sweeps = 0;
  bool converged = false;
  /// Objective after every sweep when requested.
  std::vector<double> objective;
};

/// Cyclic coordinate descent with soft-thresholding for one α on centered
/// data, via the Gram matrix gram = XᵀX/N and xty = Xᵀy/N.
CoordinateDescentResult lasso_coordinate_descent(const Matrix& gram, const Vector& xty, double yty, double alpha,
                                                 int max_iter, double tol, const Vector* warm_start = nullptr,
                                                 bool record_objective = false);

// Learned maps ----------------------------------------------------------------

enum class MapForm { Polynomial, Mlp };

/// Per-column affine standardization; zero-variance columns keep scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& rows);
  static Standardizer identity(Eigen::Index dim);
  Vector apply(const Vector& v) const;
  Matrix apply_rows(const Matrix& rows) const;
};

struct PolynomialMap {
  Standardizer input;
  Standardizer output;
  int order = 1;
  /// outputs × features over monomials of the standardized input, in
  /// standardized-output units.
  Matrix coef;
  Vector intercept;
  double prune_threshold = kJacobianPruneThreshold;
};

struct MlpLayer {
  Matrix weight;
  Vector bias;
};

/// tanh on every layer except the last, which is affine.
struct MlpMap {
  Standardizer input;
  Standardizer output;
  std::vector<MlpLayer> layers;
};

/// F: latent → ground truth with an analytic Jacobian. Immutable once built.
class LearnedMap {
 public:
  explicit LearnedMap(PolynomialMap map);
  explicit LearnedMap(MlpMap map);

  MapForm form() const noexcept;
  int input_dim() const noexcept;
  int output_dim() const noexcept;

  Vector evaluate(const Vector& latent) const;
  /// Row-wise evaluation; row i equals evaluate(rows.row(i)) exactly.
  Matrix evaluate_rows(const Matrix& rows) const;
  /// output_dim × input_dim.
  Matrix jacobian(const Vector& latent) const;

  const PolynomialMap* polynomial() const noexcept { return std::get_if<PolynomialMap>(&impl_); }
  const MlpMap* mlp() const noexcept { return std::get_if<MlpMap>(&impl_); }
  const PolynomialBasis* basis() const noexcept { return basis_.has_value() ? &*basis_ : nullptr; }

 private:
  void check_input(Eigen::Index size) const;

  std::variant<PolynomialMap, MlpMap> impl_;
  std::optional<PolynomialBasis> basis_;
};

Matrix jacobian(const LearnedMap& map, const Vector& point);

/// Directory with a `manifest` and little-endian binary64 payloads.
void save_map(const LearnedMap& map, const std::filesystem::path& dir);
LearnedMap load_map(const std::filesystem::path& dir);

// Fitting ---------------------------------------------------------------------

struct ProgressiveOptions {
  int kappa = 5;
  /// Expansion stops at the first order whose fit explains more than this.
  double r2_threshold = 0.9;
  LassoOptions lasso;
  double prune_threshold = kJacobianPruneThreshold;
};

struct ProgressiveFit {
  LearnedMap map;
  int order = 1;
  /// R² of `map` on the rows it was fit on.
  double r2 = 0.0;
  std::vector<double> r2_by_order;
};

/// Polynomial-Lasso fit of a single order.
ProgressiveFit fit_polynomial(const Matrix& latent_rows, const Matrix& truth_rows, int order,
                              const ProgressiveOptions& options = {}, std::span<const std::size_t> groups = {});

/// Raises the expansion order from 1 to kappa, stopping at the first order
/// with R² above the threshold; otherwise returns the best order seen.
ProgressiveFit progressive_polynomial_fit(const Matrix& latent_rows, const Matrix& truth_rows,
                                          const ProgressiveOptions& options = {},
                                          std::span<const std::size_t> groups = {});
ProgressiveFit progressive_polynomial_fit(const LatentTrajectorySet& set, const ProgressiveOptions& options = {});

struct MlpConfig {
  int hidden_layers = 4;
  int hidden_units = 4;
  double learning_rate = 1.5e-3;
  /// Weight of the L1 penalty on weight matrices (biases are not penalized).
  double l1 = 0.01;
  int steps = 10'000;
  int batch_size = 64;
  /// Required datapoints per trainable parameter.
  double data_ratio = 1000.0;
  bool allow_insufficient_data = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
};

std::size_t mlp_parameter_count(int input_dim, int output_dim, const MlpConfig& config);

/// Adam on MSE + l1·Σ|W| over shuffled mini-batches of standardized data.
LearnedMap mlp_fit(const Matrix& latent_rows, const Matrix& truth_rows, const MlpConfig& config = {});
LearnedMap mlp_fit(const LatentTrajectorySet& set, const MlpConfig& config = {});

/// Trajectory index of every stacked row: rows [k·steps, (k+1)·steps) → k.
std::vector<std::size_t> trajectory_groups(std::size_t trajectories, std::size_t steps);

}  // namespace symetric
