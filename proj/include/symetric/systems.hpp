#pragma once

#include "symetric/core.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace symetric {

using Rng = std::mt19937_64;

/// Seeds a generator from (seed, stream) so that parallel work items get
/// independent, reproducible streams.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

enum class SystemKind { MassSpring, Pendulum, DoublePendulum, NBody, LennardJones };

struct MassSpringParams {
  double k = 2.0;
  double m = 1.0;
};

struct PendulumParams {
  double m = 1.0;
  double l = 1.0;
  double g = 1.0;
};

struct DoublePendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 1.0;
};

/// Bodies move in the plane; q = (x₁, y₁, x₂, y₂, ...).
struct NBodyParams {
  double g = 1.0;
  std::vector<double> masses{1.0, 1.0};
};

/// Reduced units, open boundaries, planar particles.
struct LennardJonesParams {
  double epsilon = 1.0;
  double sigma = 1.0;
  std::vector<double> masses{1.0, 1.0, 1.0, 1.0};
  double fill_fraction = 0.05;
};

using SystemParams =
    std::variant<MassSpringParams, PendulumParams, DoublePendulumParams, NBodyParams, LennardJonesParams>;

struct EnergyGradient {
  Vector dq;
  Vector dp;
};

double mass_spring_energy(const MassSpringParams& params, const PhaseState& state);
double pendulum_energy(const PendulumParams& params, const PhaseState& state);
double double_pendulum_energy(const DoublePendulumParams& params, const PhaseState& state);
double n_body_energy(const NBodyParams& params, const PhaseState& state);
double lennard_jones_energy(const LennardJonesParams& params, const PhaseState& state);

EnergyGradient mass_spring_gradient(const MassSpringParams& params, const PhaseState& state);
EnergyGradient pendulum_gradient(const PendulumParams& params, const PhaseState& state);
EnergyGradient double_pendulum_gradient(const DoublePendulumParams& params, const PhaseState& state);
EnergyGradient n_body_gradient(const NBodyParams& params, const PhaseState& state);
EnergyGradient lennard_jones_gradient(const LennardJonesParams& params, const PhaseState& state);

/// An energy function with its analytic gradient. Parameters are validated on
/// construction and immutable afterwards.
class HamiltonianSystem {
 public:
  explicit HamiltonianSystem(SystemParams params);

  SystemKind kind() const noexcept;
  const SystemParams& params() const noexcept { return params_; }
  /// Number of generalized coordinates n.
  int dof() const noexcept { return dof_; }
  /// Phase-space dimension 2n.
  int dim() const noexcept { return 2 * dof_; }
  /// H = T(p) + V(q); everything except the double pendulum.
  bool separable() const noexcept;

  double energy(const PhaseState& state) const;
  EnergyGradient gradient(const PhaseState& state) const;

 private:
  void check_dim(const PhaseState& state) const;

  SystemParams params_;
  int dof_;
};

/// Two-population zero-sum game; the column player's payoff is -A.
class ReplicatorGame {
 public:
  explicit ReplicatorGame(Matrix payoff);

  const Matrix& payoff() const noexcept { return payoff_; }
  Matrix column_payoff() const { return -payoff_; }
  int row_strategies() const noexcept { return static_cast<int>(payoff_.rows()); }
  int column_strategies() const noexcept { return static_cast<int>(payoff_.cols()); }

  static ReplicatorGame matching_pennies();
  static ReplicatorGame rock_paper_scissors();

 private:
  Matrix payoff_;
};

inline constexpr double kSimplexTolerance = 1e-9;

/// ẋᵢ = xᵢ[(Ay)ᵢ - xᵀAy], ẏⱼ = yⱼ[(xᵀB)ⱼ - xᵀBy] with B = -A.
std::pair<Vector, Vector> replicator_field(const ReplicatorGame& game, const Vector& x, const Vector& y);

enum class DatasetKind {
  MassSpring,
  Pendulum,
  DoublePendulum,
  TwoBody,
  MatchingPennies,
  RockPaperScissors,
  LennardJones4,
  LennardJones16,
};

enum class Variant { Fixed, Colored };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view name);
std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view name);

bool is_replicator(DatasetKind kind) noexcept;

struct SamplerConfig {
  std::uint64_t seed = 0;
  Variant variant = Variant::Fixed;
  DatasetKind dataset = DatasetKind::MassSpring;
};

/// Physical parameters for one trajectory. Throws for the game datasets.
HamiltonianSystem sample_system(const SamplerConfig& config);
HamiltonianSystem sample_system(DatasetKind dataset, Variant variant, Rng& rng);

ReplicatorGame game_for(DatasetKind dataset);

PhaseState sample_initial_state(const HamiltonianSystem& system, Rng& rng);
/// Uniform on the product of strategy simplexes, stored as (q, p) = (x, y).
PhaseState sample_initial_state(const ReplicatorGame& game, Rng& rng);

/// Uniform sample from the planar annulus r ∈ [inner, outer].
std::pair<double, double> sample_annulus(double inner, double outer, Rng& rng);

}  // namespace symetric
