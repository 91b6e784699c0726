#include "symetric/dataset.hpp"
#include "symetric/errors.hpp"
#include "test_util.hpp"

using namespace symetric;

TEST_CASE("generated dataset shapes") {
  DatasetSpec spec;
  spec.trajectories = 100;
  spec.steps = 60;
  spec.seed = 7;
  const auto set = generate_dataset(spec);
  CHECK(set.trajectories() == 100);
  CHECK(set.steps() == 61);
  CHECK(set.truth_dim() == 2);
  CHECK(set.latent_dim() == 0);
  CHECK(set.dt() == 0.125);

  for (auto [kind, dim] : {std::pair{DatasetKind::Pendulum, 2}, {DatasetKind::DoublePendulum, 4},
                           {DatasetKind::TwoBody, 8}, {DatasetKind::MatchingPennies, 4},
                           {DatasetKind::RockPaperScissors, 6}, {DatasetKind::LennardJones4, 16},
                           {DatasetKind::LennardJones16, 64}}) {
    DatasetSpec s;
    s.dataset = kind;
    s.trajectories = 2;
    s.steps = 5;
    CAPTURE(to_string(kind));
    CHECK(generate_dataset(s).truth_dim() == static_cast<std::size_t>(dim));
    CHECK(dataset_dim(kind) == dim);
  }
}

TEST_CASE("defaults per dataset") {
  CHECK(default_scheme(DatasetKind::MassSpring) == Scheme::Leapfrog);
  CHECK(default_scheme(DatasetKind::DoublePendulum) == Scheme::RK4);
  CHECK(default_scheme(DatasetKind::MatchingPennies) == Scheme::ImprovedEuler);
  CHECK(default_dt(DatasetKind::RockPaperScissors) == 0.1);
  CHECK(default_substeps(DatasetKind::LennardJones16) == 25);
}

TEST_CASE("generation is deterministic and independent of thread count") {
  DatasetSpec spec;
  spec.dataset = DatasetKind::TwoBody;
  spec.variant = Variant::Colored;
  spec.trajectories = 12;
  spec.steps = 20;
  spec.seed = 3;
  const auto one = generate_dataset(spec, 1);
  CHECK(one == generate_dataset(spec, 4));
  CHECK(one == generate_dataset(spec, 8));
  spec.seed = 4;
  CHECK_FALSE(one == generate_dataset(spec, 1));
}

TEST_CASE("trajectory k matches the stacked dataset row block") {
  DatasetSpec spec;
  spec.dataset = DatasetKind::Pendulum;
  spec.trajectories = 3;
  spec.steps = 4;
  const auto set = generate_dataset(spec);
  const Trajectory t = generate_trajectory(spec, 2);
  CHECK(t.states()[4].flat() == Vector(set.truth(2).row(4).transpose()));
}

TEST_CASE("invalid dataset specs") {
  DatasetSpec spec;
  spec.trajectories = 0;
  CHECK_THROWS_AS(generate_dataset(spec), Error);
  spec.trajectories = 1;
  spec.steps = 0;
  CHECK_THROWS_AS(generate_dataset(spec), Error);
}
