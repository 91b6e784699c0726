#pragma once

#include <Eigen/Dense>

#include <vector>

namespace symetric {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class HamiltonianSystem;

/// A point (q, p) in phase space. Also used for tangent vectors (q̇, ṗ).
class PhaseState {
 public:
  PhaseState(Vector q, Vector p);

  /// Splits a flat (q, p) vector of even length.
  static PhaseState from_flat(const Vector& s);

  const Vector& q() const noexcept { return q_; }
  const Vector& p() const noexcept { return p_; }
  Eigen::Index dof() const noexcept { return q_.size(); }
  Eigen::Index dim() const noexcept { return 2 * q_.size(); }

  /// Concatenation (q, p).
  Vector flat() const;

 private:
  Vector q_;
  Vector p_;
};

/// Time-ordered states sampled every `dt`.
class Trajectory {
 public:
  Trajectory(double dt, std::vector<PhaseState> states);

  double dt() const noexcept { return dt_; }
  const std::vector<PhaseState>& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  const PhaseState& operator[](std::size_t i) const { return states_[i]; }
  const PhaseState& front() const { return states_.front(); }
  const PhaseState& back() const { return states_.back(); }

 private:
  double dt_;
  std::vector<PhaseState> states_;
};

/// The 2k×2k matrix [[0, I], [-I, 0]].
class CanonicalMatrix {
 public:
  explicit CanonicalMatrix(int k);

  int half_dim() const noexcept { return k_; }
  int dim() const noexcept { return 2 * k_; }
  Matrix dense() const;

 private:
  int k_;
};

CanonicalMatrix canonical_block_matrix(int k);

/// (∂H/∂p, -∂H/∂q) at `state`.
PhaseState hamiltonian_vector_field(const HamiltonianSystem& system, const PhaseState& state);

/// max_ij |MᵀAM - A|_ij; zero iff M is symplectic.
double symplecticity_defect(const Matrix& m);

}  // namespace symetric
