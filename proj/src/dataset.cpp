#include "symetric/dataset.hpp"

#include "symetric/errors.hpp"
#include "symetric/parallel.hpp"

#include <string>

namespace symetric {

double default_dt(DatasetKind dataset) { return is_replicator(dataset) ? kDefaultReplicatorDt : kDefaultPhysicsDt; }

Scheme default_scheme(DatasetKind dataset) {
  if (is_replicator(dataset)) return Scheme::ImprovedEuler;
  if (dataset == DatasetKind::DoublePendulum) return Scheme::RK4;
  return Scheme::Leapfrog;
}

int default_substeps(DatasetKind dataset) {
  return dataset == DatasetKind::LennardJones4 || dataset == DatasetKind::LennardJones16 ? 25 : 1;
}

int dataset_dim(DatasetKind dataset) {
  switch (dataset) {
    case DatasetKind::MassSpring:
    case DatasetKind::Pendulum: return 2;
    case DatasetKind::DoublePendulum:
    case DatasetKind::MatchingPennies: return 4;
    case DatasetKind::RockPaperScissors: return 6;
    case DatasetKind::TwoBody: return 8;
    case DatasetKind::LennardJones4: return 16;
    case DatasetKind::LennardJones16: return 64;
  }
  return 0;
}

IntegratorSpec integrator_for(const DatasetSpec& spec) {
  IntegratorSpec integrator;
  integrator.scheme = spec.scheme.value_or(default_scheme(spec.dataset));
  integrator.dt = spec.dt.value_or(default_dt(spec.dataset));
  integrator.steps = spec.steps;
  integrator.direction = spec.direction;
  integrator.substeps = spec.substeps.value_or(default_substeps(spec.dataset));
  return integrator;
}

Trajectory generate_trajectory(const DatasetSpec& spec, std::size_t index) {
  Rng rng = make_rng(spec.seed, index);
  const IntegratorSpec integrator = integrator_for(spec);
  if (is_replicator(spec.dataset)) {
    const ReplicatorGame game = game_for(spec.dataset);
    return rollout(game, sample_initial_state(game, rng), integrator);
  }
  const HamiltonianSystem system = sample_system(spec.dataset, spec.variant, rng);
  return rollout(system, sample_initial_state(system, rng), integrator);
}

LatentTrajectorySet generate_dataset(const DatasetSpec& spec, int threads) {
  if (spec.trajectories < 1) throw Error(ErrorKind::InvalidParameter, "need at least one trajectory");
  if (spec.steps < 1) throw Error(ErrorKind::InvalidParameter, "need at least one step");

  const auto dim = static_cast<std::size_t>(dataset_dim(spec.dataset));
  const auto steps = static_cast<std::size_t>(spec.steps) + 1;
  std::vector<double> truth(spec.trajectories * steps * dim);

  parallel_for(spec.trajectories, threads, [&](std::size_t k) {
    const Trajectory trajectory = generate_trajectory(spec, k);
    double* out = truth.data() + k * steps * dim;
    for (const auto& state : trajectory.states()) {
      const Vector s = state.flat();
      std::copy(s.data(), s.data() + s.size(), out);
      out += dim;
    }
  });
  return LatentTrajectorySet(spec.trajectories, steps, 0, dim, integrator_for(spec).dt, {}, std::move(truth));
}

}  // namespace symetric
