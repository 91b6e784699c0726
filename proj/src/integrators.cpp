#include "symetric/integrators.hpp"

#include "symetric/errors.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace symetric {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Leapfrog: return "leapfrog";
    case Scheme::RK4: return "rk4";
    case Scheme::ImprovedEuler: return "improved-euler";
  }
  return "unknown";
}

namespace {

using Field = std::function<Vector(const Vector&)>;

void validate(const IntegratorSpec& spec) {
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (spec.steps < 1) throw Error(ErrorKind::InvalidParameter, "rollout needs at least one step");
  if (spec.substeps < 1) throw Error(ErrorKind::InvalidParameter, "substeps must be at least one");
}

double signed_step(const IntegratorSpec& spec) {
  const double h = spec.dt / spec.substeps;
  return spec.direction == Direction::Forward ? h : -h;
}

void check_bounded(const Vector& s, int step) {
  if (!s.allFinite() || s.cwiseAbs().maxCoeff() > kDivergenceBound) {
    throw Error(ErrorKind::Divergence, "state diverged at step " + std::to_string(step));
  }
}

Vector rk4_step(const Field& f, const Vector& s, double h) {
  const Vector k1 = f(s);
  const Vector k2 = f(s + 0.5 * h * k1);
  const Vector k3 = f(s + 0.5 * h * k2);
  const Vector k4 = f(s + h * k3);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector improved_euler_step(const Field& f, const Vector& s, double h) {
  const Vector k1 = f(s);
  const Vector k2 = f(s + h * k1);
  return s + 0.5 * h * (k1 + k2);
}

template <typename Step, typename Project>
Trajectory integrate(const PhaseState& initial, const IntegratorSpec& spec, Step step, Project project) {
  validate(spec);
  const double h = signed_step(spec);
  std::vector<PhaseState> states;
  states.reserve(static_cast<std::size_t>(spec.steps) + 1);
  states.push_back(initial);
  Vector s = initial.flat();
  for (int i = 1; i <= spec.steps; ++i) {
    for (int sub = 0; sub < spec.substeps; ++sub) {
      s = project(step(s, h));
      check_bounded(s, i);
    }
    states.push_back(PhaseState::from_flat(s));
  }
  return Trajectory(spec.dt, std::move(states));
}

}  // namespace

Trajectory rollout(const HamiltonianSystem& system, const PhaseState& initial, const IntegratorSpec& spec) {
  if (initial.dof() != system.dof()) {
    throw Error(ErrorKind::InvalidDimension, "initial state does not match system dimension");
  }
  const auto n = initial.dof();
  const auto identity = [](Vector s) { return s; };

  if (spec.scheme == Scheme::Leapfrog) {
    if (!system.separable()) {
      throw Error(ErrorKind::UnsupportedScheme, "leapfrog requires a separable Hamiltonian");
    }
    // Separable: ∂H/∂q depends on q only, ∂H/∂p on p only.
    const auto kdk = [&](const Vector& s, double h) {
      Vector q = s.head(n);
      Vector p = s.tail(n);
      p -= 0.5 * h * system.gradient(PhaseState(q, p)).dq;
      q += h * system.gradient(PhaseState(q, p)).dp;
      p -= 0.5 * h * system.gradient(PhaseState(q, p)).dq;
      Vector out(2 * n);
      out << q, p;
      return out;
    };
    return integrate(initial, spec, kdk, identity);
  }

  const Field field = [&](const Vector& s) { return hamiltonian_vector_field(system, PhaseState::from_flat(s)).flat(); };
  if (spec.scheme == Scheme::RK4) {
    return integrate(initial, spec, [&](const Vector& s, double h) { return rk4_step(field, s, h); }, identity);
  }
  return integrate(initial, spec, [&](const Vector& s, double h) { return improved_euler_step(field, s, h); },
                   identity);
}

Trajectory rollout(const ReplicatorGame& game, const PhaseState& initial, const IntegratorSpec& spec) {
  if (spec.scheme == Scheme::Leapfrog) {
    throw Error(ErrorKind::UnsupportedScheme, "replicator dynamics use improved-euler or rk4, not leapfrog");
  }
  if (game.row_strategies() != game.column_strategies() || initial.dof() != game.row_strategies()) {
    throw Error(ErrorKind::InvalidDimension, "replicator state does not match the game");
  }
  const auto n = initial.dof();

  // Intermediate stages may leave the simplex slightly; the field itself is
  // polynomial so it is evaluated without the simplex check there.
  const Matrix& a = game.payoff();
  const Matrix b = game.column_payoff();
  const Field field = [&](const Vector& s) {
    const Vector x = s.head(n);
    const Vector y = s.tail(n);
    const Vector ay = a * y;
    const Vector xb = b.transpose() * x;
    Vector out(2 * n);
    out << x.cwiseProduct((ay.array() - x.dot(ay)).matrix()), y.cwiseProduct((xb.array() - xb.dot(y)).matrix());
    return out;
  };
  const auto project = [n](Vector s) {
    Vector x = s.head(n).cwiseMax(0.0);
    Vector y = s.tail(n).cwiseMax(0.0);
    if (x.sum() <= 0.0 || y.sum() <= 0.0) throw Error(ErrorKind::Divergence, "replicator state left the simplex");
    s.head(n) = x / x.sum();
    s.tail(n) = y / y.sum();
    return s;
  };

  // Validates the starting point against the simplex contract.
  (void)replicator_field(game, initial.q(), initial.p());

  if (spec.scheme == Scheme::RK4) {
    return integrate(initial, spec, [&](const Vector& s, double h) { return rk4_step(field, s, h); }, project);
  }
  return integrate(initial, spec, [&](const Vector& s, double h) { return improved_euler_step(field, s, h); },
                   project);
}

}  // namespace symetric
