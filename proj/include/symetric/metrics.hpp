#pragma once

#include "symetric/core.hpp"
#include "symetric/ingest.hpp"
#include "symetric/maplearn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace symetric {

inline constexpr double kDefaultR2Threshold = 0.9;
inline constexpr double kDefaultSymThreshold = 0.05;
inline constexpr double kDefaultVptThreshold = 0.025;

/// 1 - SSres/SStot pooled over every entry, with SStot taken about the
/// per-column mean. Throws UndefinedVariance when SStot is zero.
double r_squared(const Matrix& predicted, const Matrix& truth);

enum class SymAggregation { Mean, Max };
/// ClosedForm: c = 1/mean(max|ÂÂᵀ|). Minimizing: the c that minimizes the
/// trajectory's summed squared deviation, Σtr(B)/Σ‖B‖²_F.
enum class SymConstant { ClosedForm, Minimizing };

struct SymConfig {
  int samples = 20;
  int trajectories_per_sample = 5;
  int points_per_trajectory = 10;
  double alpha = kDefaultR2Threshold;
  double epsilon = kDefaultSymThreshold;
  std::uint64_t seed = 0;
  SymAggregation aggregation = SymAggregation::Mean;
  SymConstant constant = SymConstant::ClosedForm;

  void validate() const;
};

/// Sym of one sample of trajectories.
struct SymSample {
  double sym = 0.0;
  /// One normalization constant per trajectory.
  std::vector<double> c;
  /// Trajectory indices drawn for this sample (empty for explicit points).
  std::vector<std::size_t> trajectories;
  /// Some trajectory had max|ÂÂᵀ| < 1e-12 at every point; its c was set to 1.
  bool degenerate = false;
};

struct SymResult {
  double sym = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<SymSample> samples;
  bool degenerate = false;
};

/// ÂÂᵀ with Â = J A Jᵀ.
Matrix sym_product(const Matrix& jacobian, const Matrix& a_latent);

/// Sym over explicit latent points, grouped by trajectory (each inner vector
/// shares one constant c). `a_latent` is the latent structure matrix.
SymSample sym_at_points(const LearnedMap& map, const std::vector<std::vector<Vector>>& points,
                        const Matrix& a_latent, SymConstant constant = SymConstant::ClosedForm);

/// A_m of a 2m-wide latent restricted to the `kept` dimensions.
Matrix latent_structure(std::size_t latent_dim, std::span<const std::size_t> kept);

/// Resampled Sym of `map` over the latent trajectories of `set`. Samples run
/// in parallel; results do not depend on `threads`.
SymResult sym_score(const LearnedMap& map, const LatentTrajectorySet& set, const Matrix& a_latent,
                    const SymConfig& config = {}, int threads = 1);
/// Same, with A_m of the set's (even) latent width.
SymResult sym_score(const LearnedMap& map, const LatentTrajectorySet& set, const SymConfig& config = {},
                    int threads = 1);

/// 1 iff r2 > alpha and sym < epsilon.
int symetric(double r2, double sym, double alpha = kDefaultR2Threshold, double epsilon = kDefaultSymThreshold);

/// Mean over frames (rows) of ‖x_t - x̂_t‖²/‖x_t‖². A zero-norm truth frame
/// throws UndefinedVariance.
double normalized_mse(const Matrix& truth, const Matrix& predicted);
/// Frames 0..T.
double reconstruction_mse(const Matrix& truth, const Matrix& predicted, std::size_t horizon);
/// Frames T+1..2T.
double extrapolation_mse(const Matrix& truth, const Matrix& predicted, std::size_t horizon);

/// Per-frame normalized error; a zero-norm frame gives 0 when matched exactly
/// and +inf otherwise.
std::vector<double> framewise_error(const Matrix& truth, const Matrix& predicted);
/// First frame whose normalized error exceeds lambda, or the sequence length.
std::size_t vpt(const Matrix& truth, const Matrix& predicted, double lambda = kDefaultVptThreshold);
double vpt_average(std::size_t forward, std::size_t backward);

}  // namespace symetric
