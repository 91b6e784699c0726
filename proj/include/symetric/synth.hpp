#pragma once

#include "symetric/core.hpp"
#include "symetric/ingest.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace symetric {

enum class TransformKind {
  Identity,
  UniformScale,
  ActionAngle,
  RandomLinearSymplectic,
  /// Identity padded to embed_dim.
  HighDimEmbed,
  NonSymplecticDistort,
  PureNoise,
};

std::string_view to_string(TransformKind kind);
std::optional<TransformKind> parse_transform(std::string_view name);

inline constexpr double kSignalKl = 1.0;
inline constexpr double kPaddingKl = 1e-4;

/// A synthetic latent space built pointwise from ground truth.
struct SyntheticTransform {
  TransformKind kind = TransformKind::Identity;
  /// Latent = scale · truth.
  double scale = 2.0;
  /// Total latent width after padding; 0 keeps the transform's own width.
  /// Any kind can be embedded; HighDimEmbed with 0 uses 32.
  std::size_t embed_dim = 0;
  /// Momentum power for NonSymplecticDistort.
  double exponent = 3.0;
  /// Standard deviation of PureNoise latents and of padded noise dimensions.
  double noise_level = 1.0;
  double padding_noise = 1e-2;
  std::uint64_t seed = 0;
  /// Oscillator constants of the action-angle map.
  double spring_k = 2.0;
  double spring_m = 1.0;
};

/// Latent set with KL surrogates: kSignalKl for transformed dims, kPaddingKl
/// for padding. Padding keeps the (q_i, p_i) pairing: signal pair i sits at
/// slots (a_i, a_i + m) of the 2m-wide latent, a_i drawn from the seed.
LatentTrajectorySet apply_transform(const SyntheticTransform& transform, const LatentTrajectorySet& truth);

/// Action-angle coordinates (Q, P) of the oscillator H = kq²/2 + p²/2m:
/// Q = atan2(q√(mω), p/√(mω)), P = (p² + (mωq)²)/(2mω), ω = √(k/m).
Eigen::Vector2d action_angle(double q, double p, double k, double m);
/// ∂(Q, P)/∂(q, p).
Eigen::Matrix2d action_angle_jacobian(double q, double p, double k, double m);

/// e^M by scaling and squaring with a Taylor series (tolerance 1e-14).
Matrix matrix_exponential(const Matrix& m);
/// exp(A·W) for symmetric W; symplectic for any such W.
Matrix symplectic_from_generator(const Matrix& w);
/// exp(A·W) with a seeded random symmetric W, 2n × 2n.
Matrix random_linear_symplectic(int n, std::uint64_t seed);
/// M⁻¹ = -A Mᵀ A for symplectic M.
Matrix symplectic_inverse(const Matrix& m);

}  // namespace symetric
