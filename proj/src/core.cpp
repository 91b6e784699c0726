#include "symetric/core.hpp"

#include "symetric/errors.hpp"
#include "symetric/systems.hpp"

#include <string>

namespace symetric {

PhaseState::PhaseState(Vector q, Vector p) : q_(std::move(q)), p_(std::move(p)) {
  if (q_.size() != p_.size() || q_.size() < 1) {
    throw Error(ErrorKind::InvalidDimension,
                "phase state needs |q| = |p| >= 1, got " + std::to_string(q_.size()) + " and " +
                    std::to_string(p_.size()));
  }
  if (!q_.allFinite() || !p_.allFinite()) {
    throw Error(ErrorKind::Numeric, "phase state has non-finite entries");
  }
}

PhaseState PhaseState::from_flat(const Vector& s) {
  if (s.size() % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "flat phase state must have even length");
  }
  const auto n = s.size() / 2;
  return PhaseState(s.head(n), s.tail(n));
}

Vector PhaseState::flat() const {
  Vector s(dim());
  s << q_, p_;
  return s;
}

Trajectory::Trajectory(double dt, std::vector<PhaseState> states) : dt_(dt), states_(std::move(states)) {
  if (!(dt_ > 0.0)) throw Error(ErrorKind::InvalidParameter, "trajectory dt must be positive");
  if (states_.size() < 2) throw Error(ErrorKind::InvalidParameter, "trajectory needs at least 2 states");
  for (const auto& s : states_) {
    if (s.dof() != states_.front().dof()) {
      throw Error(ErrorKind::InvalidDimension, "trajectory states differ in dimension");
    }
  }
}

CanonicalMatrix::CanonicalMatrix(int k) : k_(k) {
  if (k < 1) throw Error(ErrorKind::InvalidDimension, "canonical matrix needs k >= 1");
}

Matrix CanonicalMatrix::dense() const {
  Matrix a = Matrix::Zero(2 * k_, 2 * k_);
  a.topRightCorner(k_, k_).setIdentity();
  a.bottomLeftCorner(k_, k_) = -Matrix::Identity(k_, k_);
  return a;
}

CanonicalMatrix canonical_block_matrix(int k) { return CanonicalMatrix(k); }

PhaseState hamiltonian_vector_field(const HamiltonianSystem& system, const PhaseState& state) {
  const EnergyGradient grad = system.gradient(state);
  if (!grad.dq.allFinite() || !grad.dp.allFinite()) {
    throw Error(ErrorKind::Numeric, "non-finite energy gradient");
  }
  return PhaseState(grad.dp, -grad.dq);
}

double symplecticity_defect(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0) {
    throw Error(ErrorKind::InvalidDimension, "symplecticity defect needs a square matrix of even size");
  }
  const Matrix a = canonical_block_matrix(static_cast<int>(m.rows() / 2)).dense();
  return (m.transpose() * a * m - a).cwiseAbs().maxCoeff();
}

}  // namespace symetric
