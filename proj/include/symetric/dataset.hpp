#pragma once

#include "symetric/ingest.hpp"
#include "symetric/integrators.hpp"
#include "symetric/systems.hpp"

#include <cstdint>
#include <optional>

namespace symetric {

/// Ground-truth trajectory generation for the built-in datasets. Unset
/// optionals pick the per-dataset defaults below.
struct DatasetSpec {
  DatasetKind dataset = DatasetKind::MassSpring;
  Variant variant = Variant::Fixed;
  std::size_t trajectories = 100;
  int steps = 60;
  std::optional<double> dt;
  std::optional<Scheme> scheme;
  std::optional<int> substeps;
  Direction direction = Direction::Forward;
  std::uint64_t seed = 0;
};

double default_dt(DatasetKind dataset);
/// Leapfrog for separable systems, RK4 for the double pendulum, improved
/// Euler for the games.
Scheme default_scheme(DatasetKind dataset);
/// 25 for the Lennard-Jones presets, 1 otherwise.
int default_substeps(DatasetKind dataset);
/// Phase-space dimension 2n of a dataset.
int dataset_dim(DatasetKind dataset);

IntegratorSpec integrator_for(const DatasetSpec& spec);

/// Trajectory `index` of the dataset; depends only on (spec, index).
Trajectory generate_trajectory(const DatasetSpec& spec, std::size_t index);

/// All trajectories as a truth-only set (latent width 0).
LatentTrajectorySet generate_dataset(const DatasetSpec& spec, int threads = 1);

}  // namespace symetric
