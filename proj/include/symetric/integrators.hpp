#pragma once

#include "symetric/core.hpp"
#include "symetric/systems.hpp"

#include <string_view>

namespace symetric {

enum class Scheme { Leapfrog, RK4, ImprovedEuler };
enum class Direction { Forward, Backward };

inline constexpr double kDefaultPhysicsDt = 0.125;
inline constexpr double kDefaultReplicatorDt = 0.1;
/// Any state component beyond this magnitude aborts a rollout.
inline constexpr double kDivergenceBound = 1e12;

struct IntegratorSpec {
  Scheme scheme = Scheme::Leapfrog;
  double dt = kDefaultPhysicsDt;
  int steps = 60;
  Direction direction = Direction::Forward;
  /// Internal steps per recorded step; the integrator advances by dt/substeps.
  int substeps = 1;
};

std::string_view to_string(Scheme scheme);

/// Fixed-step rollout of a Hamiltonian system. Leapfrog is kick-drift-kick and
/// only accepted for separable systems. Backward runs the scheme with -dt.
Trajectory rollout(const HamiltonianSystem& system, const PhaseState& initial, const IntegratorSpec& spec);

/// Rollout of replicator dynamics on (x, y) = (q, p); states are projected
/// back onto the simplexes after every step.
Trajectory rollout(const ReplicatorGame& game, const PhaseState& initial, const IntegratorSpec& spec);

}  // namespace symetric
