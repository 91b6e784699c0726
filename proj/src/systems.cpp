#include "symetric/systems.hpp"

#include "symetric/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace symetric {

namespace {

constexpr double kMinSeparation = 1e-9;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidParameter, std::string(name) + " must be positive and finite");
  }
}

void require_dof(const PhaseState& state, Eigen::Index dof, const char* system) {
  if (state.dof() != dof) {
    throw Error(ErrorKind::InvalidDimension, std::string(system) + " expects " + std::to_string(2 * dof) +
                                                 "-dimensional states, got " + std::to_string(state.dim()));
  }
}

// Planar particles: coordinates (x, y) of particle i live at q[2i], q[2i+1].
Eigen::Vector2d position(const Vector& q, Eigen::Index i) { return {q[2 * i], q[2 * i + 1]}; }

double kinetic_energy(const std::vector<double>& masses, const Vector& p) {
  double t = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    t += (p[2 * j] * p[2 * j] + p[2 * j + 1] * p[2 * j + 1]) / (2.0 * masses[i]);
  }
  return t;
}

Vector kinetic_gradient(const std::vector<double>& masses, const Vector& p) {
  Vector dp(p.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    dp[2 * j] = p[2 * j] / masses[i];
    dp[2 * j + 1] = p[2 * j + 1] / masses[i];
  }
  return dp;
}

double separation(const Vector& q, Eigen::Index i, Eigen::Index j) {
  const double r = (position(q, i) - position(q, j)).norm();
  if (r < kMinSeparation) {
    throw Error(ErrorKind::Singularity,
                "particles " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
  return r;
}

void validate(const MassSpringParams& p) {
  require_positive(p.k, "spring constant k");
  require_positive(p.m, "mass m");
}
void validate(const PendulumParams& p) {
  require_positive(p.m, "mass m");
  require_positive(p.l, "length l");
  require_positive(p.g, "gravity g");
}
void validate(const DoublePendulumParams& p) {
  require_positive(p.m1, "mass m1");
  require_positive(p.m2, "mass m2");
  require_positive(p.l1, "length l1");
  require_positive(p.l2, "length l2");
  require_positive(p.g, "gravity g");
}
void validate(const NBodyParams& p) {
  require_positive(p.g, "gravity g");
  if (p.masses.size() < 2) throw Error(ErrorKind::InvalidParameter, "n-body needs at least two bodies");
  for (double m : p.masses) require_positive(m, "body mass");
}
void validate(const LennardJonesParams& p) {
  require_positive(p.epsilon, "epsilon");
  require_positive(p.sigma, "sigma");
  require_positive(p.fill_fraction, "fill fraction");
  if (p.masses.size() < 2) throw Error(ErrorKind::InvalidParameter, "lennard-jones needs at least two particles");
  for (double m : p.masses) require_positive(m, "particle mass");
}

int dof_of(const SystemParams& params) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MassSpringParams> || std::is_same_v<T, PendulumParams>) {
          return 1;
        } else if constexpr (std::is_same_v<T, DoublePendulumParams>) {
          return 2;
        } else {
          return 2 * static_cast<int>(p.masses.size());
        }
      },
      params);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// Energies ------------------------------------------------------------------

double mass_spring_energy(const MassSpringParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 1, "mass-spring");
  const double q = state.q()[0];
  const double p = state.p()[0];
  return params.k * q * q / 2.0 + p * p / (2.0 * params.m);
}

double pendulum_energy(const PendulumParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 1, "pendulum");
  const double q = state.q()[0];
  const double p = state.p()[0];
  return params.m * params.l * params.g * (1.0 - std::cos(q)) + p * p / (2.0 * params.l * params.m);
}

double double_pendulum_energy(const DoublePendulumParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 2, "double pendulum");
  const auto& [m1, m2, l1, l2, g] = params;
  const double q1 = state.q()[0], q2 = state.q()[1];
  const double p1 = state.p()[0], p2 = state.p()[1];
  const double delta = q1 - q2;
  const double s = std::sin(delta);
  const double num = m2 * l2 * l2 * p1 * p1 + (m1 + m2) * l1 * l1 * p2 * p2 -
                     2.0 * m2 * l1 * l2 * p1 * p2 * std::cos(delta);
  const double den = 2.0 * m2 * l1 * l1 * l2 * l2 * (m1 + m2 * s * s);
  return num / den - (m1 + m2) * g * l1 * std::cos(q1) - m2 * g * l2 * std::cos(q2);
}

double n_body_energy(const NBodyParams& params, const PhaseState& state) {
  validate(params);
  const auto bodies = static_cast<Eigen::Index>(params.masses.size());
  require_dof(state, 2 * bodies, "n-body");
  double v = 0.0;
  for (Eigen::Index i = 0; i < bodies; ++i) {
    for (Eigen::Index j = i + 1; j < bodies; ++j) {
      v -= params.g * params.masses[i] * params.masses[j] / separation(state.q(), i, j);
    }
  }
  return v + kinetic_energy(params.masses, state.p());
}

double lennard_jones_energy(const LennardJonesParams& params, const PhaseState& state) {
  validate(params);
  const auto particles = static_cast<Eigen::Index>(params.masses.size());
  require_dof(state, 2 * particles, "lennard-jones");
  double v = 0.0;
  for (Eigen::Index i = 0; i < particles; ++i) {
    for (Eigen::Index j = i + 1; j < particles; ++j) {
      const double sr6 = std::pow(params.sigma / separation(state.q(), i, j), 6);
      v += 4.0 * params.epsilon * (sr6 * sr6 - sr6);
    }
  }
  return v + kinetic_energy(params.masses, state.p());
}

// Gradients -----------------------------------------------------------------

EnergyGradient mass_spring_gradient(const MassSpringParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 1, "mass-spring");
  return {params.k * state.q(), state.p() / params.m};
}

EnergyGradient pendulum_gradient(const PendulumParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 1, "pendulum");
  Vector dq(1), dp(1);
  dq[0] = params.m * params.l * params.g * std::sin(state.q()[0]);
  dp[0] = state.p()[0] / (params.l * params.m);
  return {dq, dp};
}

EnergyGradient double_pendulum_gradient(const DoublePendulumParams& params, const PhaseState& state) {
  validate(params);
  require_dof(state, 2, "double pendulum");
  const auto& [m1, m2, l1, l2, g] = params;
  const double q1 = state.q()[0], q2 = state.q()[1];
  const double p1 = state.p()[0], p2 = state.p()[1];
  const double delta = q1 - q2;
  const double s = std::sin(delta);
  const double c = std::cos(delta);

  const double num = m2 * l2 * l2 * p1 * p1 + (m1 + m2) * l1 * l1 * p2 * p2 - 2.0 * m2 * l1 * l2 * p1 * p2 * c;
  const double scale = 2.0 * m2 * l1 * l1 * l2 * l2;
  const double den = scale * (m1 + m2 * s * s);

  const double dnum_ddelta = 2.0 * m2 * l1 * l2 * p1 * p2 * s;
  const double dden_ddelta = scale * m2 * 2.0 * s * c;
  const double dkin_ddelta = dnum_ddelta / den - num * dden_ddelta / (den * den);

  Vector dq(2), dp(2);
  dq[0] = dkin_ddelta + (m1 + m2) * g * l1 * std::sin(q1);
  dq[1] = -dkin_ddelta + m2 * g * l2 * std::sin(q2);
  dp[0] = (2.0 * m2 * l2 * l2 * p1 - 2.0 * m2 * l1 * l2 * p2 * c) / den;
  dp[1] = (2.0 * (m1 + m2) * l1 * l1 * p2 - 2.0 * m2 * l1 * l2 * p1 * c) / den;
  return {dq, dp};
}

EnergyGradient n_body_gradient(const NBodyParams& params, const PhaseState& state) {
  validate(params);
  const auto bodies = static_cast<Eigen::Index>(params.masses.size());
  require_dof(state, 2 * bodies, "n-body");
  Vector dq = Vector::Zero(state.dof());
  for (Eigen::Index i = 0; i < bodies; ++i) {
    for (Eigen::Index j = i + 1; j < bodies; ++j) {
      const double r = separation(state.q(), i, j);
      const Eigen::Vector2d d = position(state.q(), i) - position(state.q(), j);
      const Eigen::Vector2d f = params.g * params.masses[i] * params.masses[j] / (r * r * r) * d;
      dq.segment<2>(2 * i) += f;
      dq.segment<2>(2 * j) -= f;
    }
  }
  return {dq, kinetic_gradient(params.masses, state.p())};
}

EnergyGradient lennard_jones_gradient(const LennardJonesParams& params, const PhaseState& state) {
  validate(params);
  const auto particles = static_cast<Eigen::Index>(params.masses.size());
  require_dof(state, 2 * particles, "lennard-jones");
  Vector dq = Vector::Zero(state.dof());
  for (Eigen::Index i = 0; i < particles; ++i) {
    for (Eigen::Index j = i + 1; j < particles; ++j) {
      const double r = separation(state.q(), i, j);
      const double sr6 = std::pow(params.sigma / r, 6);
      // dV/dr = 4ε(-12 σ¹²/r¹³ + 6 σ⁶/r⁷)
      const double dv_dr = 4.0 * params.epsilon * (-12.0 * sr6 * sr6 + 6.0 * sr6) / r;
      const Eigen::Vector2d d = position(state.q(), i) - position(state.q(), j);
      const Eigen::Vector2d f = dv_dr / r * d;
      dq.segment<2>(2 * i) += f;
      dq.segment<2>(2 * j) -= f;
    }
  }
  return {dq, kinetic_gradient(params.masses, state.p())};
}

// HamiltonianSystem ---------------------------------------------------------

HamiltonianSystem::HamiltonianSystem(SystemParams params) : params_(std::move(params)), dof_(dof_of(params_)) {
  std::visit([](const auto& p) { validate(p); }, params_);
}

SystemKind HamiltonianSystem::kind() const noexcept {
  return static_cast<SystemKind>(params_.index());
}

bool HamiltonianSystem::separable() const noexcept { return kind() != SystemKind::DoublePendulum; }

void HamiltonianSystem::check_dim(const PhaseState& state) const {
  if (state.dof() != dof_) {
    throw Error(ErrorKind::InvalidDimension, "state dimension " + std::to_string(state.dim()) +
                                                 " does not match system dimension " + std::to_string(dim()));
  }
}

double HamiltonianSystem::energy(const PhaseState& state) const {
  check_dim(state);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MassSpringParams>) return mass_spring_energy(p, state);
        else if constexpr (std::is_same_v<T, PendulumParams>) return pendulum_energy(p, state);
        else if constexpr (std::is_same_v<T, DoublePendulumParams>) return double_pendulum_energy(p, state);
        else if constexpr (std::is_same_v<T, NBodyParams>) return n_body_energy(p, state);
        else return lennard_jones_energy(p, state);
      },
      params_);
}

EnergyGradient HamiltonianSystem::gradient(const PhaseState& state) const {
  check_dim(state);
  return std::visit(
      [&](const auto& p) -> EnergyGradient {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MassSpringParams>) return mass_spring_gradient(p, state);
        else if constexpr (std::is_same_v<T, PendulumParams>) return pendulum_gradient(p, state);
        else if constexpr (std::is_same_v<T, DoublePendulumParams>) return double_pendulum_gradient(p, state);
        else if constexpr (std::is_same_v<T, NBodyParams>) return n_body_gradient(p, state);
        else return lennard_jones_gradient(p, state);
      },
      params_);
}

// Replicator dynamics -------------------------------------------------------

ReplicatorGame::ReplicatorGame(Matrix payoff) : payoff_(std::move(payoff)) {
  if (payoff_.rows() < 2 || payoff_.cols() < 2) {
    throw Error(ErrorKind::InvalidDimension, "payoff matrix needs at least two strategies per player");
  }
  if (!payoff_.allFinite()) throw Error(ErrorKind::InvalidParameter, "payoff matrix has non-finite entries");
}

ReplicatorGame ReplicatorGame::matching_pennies() {
  Matrix a(2, 2);
  a << 1, -1,
      -1, 1;
  return ReplicatorGame(a);
}

ReplicatorGame ReplicatorGame::rock_paper_scissors() {
  Matrix a(3, 3);
  a << 0, -1, 1,
       1, 0, -1,
      -1, 1, 0;
  return ReplicatorGame(a);
}

namespace {

void require_simplex(const Vector& v, Eigen::Index size, const char* name) {
  if (v.size() != size) {
    throw Error(ErrorKind::InvalidDimension, std::string(name) + " has wrong number of strategies");
  }
  if (v.minCoeff() < -kSimplexTolerance || std::abs(v.sum() - 1.0) > kSimplexTolerance) {
    throw Error(ErrorKind::Domain, std::string(name) + " is not on the probability simplex");
  }
}

}  // namespace

std::pair<Vector, Vector> replicator_field(const ReplicatorGame& game, const Vector& x, const Vector& y) {
  require_simplex(x, game.payoff().rows(), "x");
  require_simplex(y, game.payoff().cols(), "y");
  const Matrix& a = game.payoff();
  const Matrix b = game.column_payoff();

  const Vector ay = a * y;
  const double xay = x.dot(ay);
  const Eigen::RowVectorXd xb = x.transpose() * b;
  const double xby = xb.dot(y);

  Vector dx = x.cwiseProduct((ay.array() - xay).matrix());
  Vector dy = y.cwiseProduct((xb.transpose().array() - xby).matrix());
  return {dx, dy};
}

// Dataset naming ------------------------------------------------------------

namespace {

struct DatasetName {
  DatasetKind kind;
  std::string_view name;
};

constexpr std::array<DatasetName, 8> kDatasetNames{{
    {DatasetKind::MassSpring, "mass-spring"},
    {DatasetKind::Pendulum, "pendulum"},
    {DatasetKind::DoublePendulum, "double-pendulum"},
    {DatasetKind::TwoBody, "two-body"},
    {DatasetKind::MatchingPennies, "matching-pennies"},
    {DatasetKind::RockPaperScissors, "rock-paper-scissors"},
    {DatasetKind::LennardJones4, "lj-4"},
    {DatasetKind::LennardJones16, "lj-16"},
}};

}  // namespace

std::string_view to_string(DatasetKind kind) {
  for (const auto& entry : kDatasetNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  for (const auto& entry : kDatasetNames) {
    if (entry.name == name) return entry.kind;
  }
  std::string known;
  for (const auto& entry : kDatasetNames) known += (known.empty() ? "" : ", ") + std::string(entry.name);
  throw Error(ErrorKind::InvalidParameter, "unknown dataset '" + std::string(name) + "' (known: " + known + ")");
}

std::string_view to_string(Variant variant) { return variant == Variant::Fixed ? "fixed" : "colored"; }

Variant parse_variant(std::string_view name) {
  if (name == "fixed") return Variant::Fixed;
  if (name == "colored" || name == "coloured" || name == "+c") return Variant::Colored;
  throw Error(ErrorKind::InvalidParameter, "unknown variant '" + std::string(name) + "' (fixed or colored)");
}

bool is_replicator(DatasetKind kind) noexcept {
  return kind == DatasetKind::MatchingPennies || kind == DatasetKind::RockPaperScissors;
}

// Sampling ------------------------------------------------------------------

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

LennardJonesParams lj_preset(int particles, double fill_fraction) {
  LennardJonesParams p;
  p.masses.assign(static_cast<std::size_t>(particles), 1.0);
  p.fill_fraction = fill_fraction;
  return p;
}

}  // namespace

HamiltonianSystem sample_system(DatasetKind dataset, Variant variant, Rng& rng) {
  const bool colored = variant == Variant::Colored;
  switch (dataset) {
    case DatasetKind::MassSpring: {
      MassSpringParams p;
      p.k = 2.0;
      p.m = colored ? uniform(rng, 0.2, 1.0) : 1.0;
      return HamiltonianSystem(p);
    }
    case DatasetKind::Pendulum: {
      PendulumParams p;
      if (colored) {
        p.m = uniform(rng, 0.5, 1.5);
        p.g = uniform(rng, 3.0, 4.0);
        p.l = uniform(rng, 0.5, 1.0);
      }
      return HamiltonianSystem(p);
    }
    case DatasetKind::DoublePendulum: {
      DoublePendulumParams p;
      if (colored) {
        p.m1 = uniform(rng, 0.4, 0.6);
        p.m2 = uniform(rng, 0.4, 0.6);
        p.g = uniform(rng, 2.5, 4.0);
        p.l1 = uniform(rng, 0.75, 1.0);
        p.l2 = uniform(rng, 0.75, 1.0);
      }
      return HamiltonianSystem(p);
    }
    case DatasetKind::TwoBody: {
      NBodyParams p;
      if (colored) {
        p.masses[0] = uniform(rng, 0.5, 1.5);
        p.masses[1] = uniform(rng, 0.5, 1.5);
      }
      return HamiltonianSystem(p);
    }
    case DatasetKind::LennardJones4:
      return HamiltonianSystem(lj_preset(4, 0.05));
    case DatasetKind::LennardJones16:
      return HamiltonianSystem(lj_preset(16, 0.3));
    case DatasetKind::MatchingPennies:
    case DatasetKind::RockPaperScissors:
      break;
  }
  throw Error(ErrorKind::InvalidParameter,
              std::string(to_string(dataset)) + " is a game, not a Hamiltonian system; use game_for()");
}

HamiltonianSystem sample_system(const SamplerConfig& config) {
  Rng rng = make_rng(config.seed);
  return sample_system(config.dataset, config.variant, rng);
}

ReplicatorGame game_for(DatasetKind dataset) {
  if (dataset == DatasetKind::MatchingPennies) return ReplicatorGame::matching_pennies();
  if (dataset == DatasetKind::RockPaperScissors) return ReplicatorGame::rock_paper_scissors();
  throw Error(ErrorKind::InvalidParameter, std::string(to_string(dataset)) + " is not a game dataset");
}

std::pair<double, double> sample_annulus(double inner, double outer, Rng& rng) {
  std::uniform_real_distribution<double> coord(-outer, outer);
  while (true) {
    const double a = coord(rng);
    const double b = coord(rng);
    const double r = std::hypot(a, b);
    if (r >= inner && r <= outer) return {a, b};
  }
}

namespace {

PhaseState two_body_initial_state(const NBodyParams& params, Rng& rng) {
  const double m1 = params.masses[0];
  const double m2 = params.masses[1];
  const double total = m1 + m2;
  const double r = uniform(rng, 0.5, 1.5);
  const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double speed_scale = uniform(rng, 0.9, 1.1);
  const double sense = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;

  const Eigen::Vector2d radial(std::cos(angle), std::sin(angle));
  const Eigen::Vector2d tangential(-radial.y(), radial.x());

  // Relative circular speed sqrt(gM/r), carried by the reduced mass.
  const double reduced = m1 * m2 / total;
  const double relative_momentum = reduced * std::sqrt(params.g * total / r) * speed_scale * sense;

  Vector q(4), p(4);
  q.segment<2>(0) = -(m2 / total) * r * radial;
  q.segment<2>(2) = (m1 / total) * r * radial;
  p.segment<2>(0) = -relative_momentum * tangential;
  p.segment<2>(2) = relative_momentum * tangential;
  return PhaseState(q, p);
}

PhaseState lennard_jones_initial_state(const LennardJonesParams& params, Rng& rng) {
  const auto particles = static_cast<Eigen::Index>(params.masses.size());
  const auto side = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(particles))));
  // Fill fraction = P·π(σ/2)² / L².
  const double box = std::sqrt(static_cast<double>(particles) * std::numbers::pi * params.sigma * params.sigma /
                               (4.0 * params.fill_fraction));
  const double spacing = box / static_cast<double>(side);
  const double jitter = 0.1 * spacing;

  Vector q(2 * particles), p(2 * particles);
  for (Eigen::Index i = 0; i < particles; ++i) {
    q[2 * i] = (static_cast<double>(i % side) + 0.5) * spacing - box / 2.0 + uniform(rng, -jitter, jitter);
    q[2 * i + 1] = (static_cast<double>(i / side) + 0.5) * spacing - box / 2.0 + uniform(rng, -jitter, jitter);
  }
  std::normal_distribution<double> thermal(0.0, 0.5);
  for (Eigen::Index i = 0; i < 2 * particles; ++i) p[i] = thermal(rng);
  Eigen::Vector2d total = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < particles; ++i) total += p.segment<2>(2 * i);
  for (Eigen::Index i = 0; i < particles; ++i) p.segment<2>(2 * i) -= total / static_cast<double>(particles);
  return PhaseState(q, p);
}

}  // namespace

PhaseState sample_initial_state(const HamiltonianSystem& system, Rng& rng) {
  switch (system.kind()) {
    case SystemKind::MassSpring: {
      const auto& params = std::get<MassSpringParams>(system.params());
      auto [q, p] = sample_annulus(0.1, 1.0, rng);
      p *= std::sqrt(params.k * params.m);
      return PhaseState(Vector::Constant(1, q), Vector::Constant(1, p));
    }
    case SystemKind::Pendulum: {
      auto [q, p] = sample_annulus(1.3, 2.3, rng);
      return PhaseState(Vector::Constant(1, q), Vector::Constant(1, p));
    }
    case SystemKind::DoublePendulum: {
      Vector q(2), p(2);
      for (int i = 0; i < 2; ++i) std::tie(q[i], p[i]) = sample_annulus(1.3, 2.3, rng);
      return PhaseState(q, p);
    }
    case SystemKind::NBody: {
      const auto& params = std::get<NBodyParams>(system.params());
      if (params.masses.size() != 2) {
        throw Error(ErrorKind::InvalidParameter, "initial-state sampling is only defined for two bodies");
      }
      return two_body_initial_state(params, rng);
    }
    case SystemKind::LennardJones:
      return lennard_jones_initial_state(std::get<LennardJonesParams>(system.params()), rng);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown system kind");
}

namespace {

Vector sample_simplex(Eigen::Index size, Rng& rng) {
  // Normalized exponentials are uniform on the simplex.
  std::exponential_distribution<double> expo(1.0);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = expo(rng);
  return v / v.sum();
}

}  // namespace

PhaseState sample_initial_state(const ReplicatorGame& game, Rng& rng) {
  if (game.row_strategies() != game.column_strategies()) {
    throw Error(ErrorKind::InvalidDimension, "replicator states are stored as (q, p) = (x, y); needs a square game");
  }
  Vector x = sample_simplex(game.row_strategies(), rng);
  Vector y = sample_simplex(game.column_strategies(), rng);
  return PhaseState(x, y);
}

}  // namespace symetric
