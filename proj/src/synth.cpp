#include "symetric/synth.hpp"

#include "symetric/errors.hpp"
#include "symetric/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace symetric {

namespace {

constexpr std::size_t kDefaultEmbedDim = 32;

// Pointwise base transform of one flat state s = (q, p).
Vector transform_point(const SyntheticTransform& t, const Vector& s, const Matrix* linear) {
  const Eigen::Index n = s.size() / 2;
  switch (t.kind) {
    case TransformKind::Identity:
    case TransformKind::HighDimEmbed:
    case TransformKind::PureNoise:
      return s;
    case TransformKind::UniformScale:
      return t.scale * s;
    case TransformKind::ActionAngle: {
      Vector out(s.size());
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d qp = action_angle(s[i], s[n + i], t.spring_k, t.spring_m);
        out[i] = qp[0];
        out[n + i] = qp[1];
      }
      return out;
    }
    case TransformKind::RandomLinearSymplectic:
      return *linear * s;
    case TransformKind::NonSymplecticDistort: {
      Vector out = s;
      for (Eigen::Index i = n; i < s.size(); ++i) {
        out[i] = std::copysign(std::pow(std::abs(s[i]), t.exponent), s[i]);
      }
      return out;
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::UniformScale: return "scale";
    case TransformKind::ActionAngle: return "action-angle";
    case TransformKind::RandomLinearSymplectic: return "linear-symplectic";
    case TransformKind::HighDimEmbed: return "embed";
    case TransformKind::NonSymplecticDistort: return "distort";
    case TransformKind::PureNoise: return "noise";
  }
  return "?";
}

std::optional<TransformKind> parse_transform(std::string_view name) {
  for (auto kind : {TransformKind::Identity, TransformKind::UniformScale, TransformKind::ActionAngle,
                    TransformKind::RandomLinearSymplectic, TransformKind::HighDimEmbed,
                    TransformKind::NonSymplecticDistort, TransformKind::PureNoise}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

Eigen::Vector2d action_angle(double q, double p, double k, double m) {
  if (!(k > 0.0) || !(m > 0.0)) throw Error(ErrorKind::InvalidParameter, "action-angle needs k > 0 and m > 0");
  const double mw = std::sqrt(k * m);
  const double root = std::sqrt(mw);
  return {std::atan2(q * root, p / root), (p * p + mw * mw * q * q) / (2.0 * mw)};
}

Eigen::Matrix2d action_angle_jacobian(double q, double p, double k, double m) {
  if (!(k > 0.0) || !(m > 0.0)) throw Error(ErrorKind::InvalidParameter, "action-angle needs k > 0 and m > 0");
  const double mw = std::sqrt(k * m);
  const double root = std::sqrt(mw);
  const double u = q * root;
  const double v = p / root;
  const double r2 = u * u + v * v;
  if (!(r2 > 0.0)) throw Error(ErrorKind::Singularity, "action-angle map is singular at the origin");
  Eigen::Matrix2d j;
  j << v * root / r2, -u / (root * r2), mw * q, p / mw;
  return j;
}

Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidDimension, "matrix exponential needs a square matrix");
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m / std::ldexp(1.0, squarings);

  Matrix sum = Matrix::Identity(m.rows(), m.cols());
  Matrix term = sum;
  for (int i = 1; i < 64; ++i) {
    term = term * scaled / static_cast<double>(i);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-14 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Matrix symplectic_from_generator(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() < 2 || w.rows() % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "generator must be square with even size");
  }
  const Matrix sym = 0.5 * (w + w.transpose());
  return matrix_exponential(CanonicalMatrix(static_cast<int>(w.rows() / 2)).dense() * sym);
}

Matrix random_linear_symplectic(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "random_linear_symplectic needs n >= 1");
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, 0.5);
  Matrix w(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i; j < 2 * n; ++j) w(i, j) = w(j, i) = normal(rng);
  }
  return symplectic_from_generator(w);
}

Matrix symplectic_inverse(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2 || m.rows() % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "symplectic inverse needs a square matrix of even size");
  }
  const Matrix a = CanonicalMatrix(static_cast<int>(m.rows() / 2)).dense();
  return -a * m.transpose() * a;
}

LatentTrajectorySet apply_transform(const SyntheticTransform& t, const LatentTrajectorySet& truth) {
  const std::size_t dim = truth.truth_dim();
  const std::size_t n = dim / 2;
  if (t.kind == TransformKind::UniformScale && !(t.scale != 0.0 && std::isfinite(t.scale))) {
    throw Error(ErrorKind::InvalidParameter, "scale factor must be finite and nonzero");
  }
  if (t.kind == TransformKind::NonSymplecticDistort && !(t.exponent > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "distortion exponent must be positive");
  }
  if (t.kind == TransformKind::PureNoise && !(t.noise_level > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "noise level must be positive");
  }

  std::size_t width = t.embed_dim;
  if (width == 0 && t.kind == TransformKind::HighDimEmbed) width = kDefaultEmbedDim;
  if (width == 0) width = dim;
  if (width < dim || width % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "embedding width must be even and at least the truth width " +
                                                 std::to_string(dim));
  }
  const std::size_t half = width / 2;

  std::optional<Matrix> linear;
  if (t.kind == TransformKind::RandomLinearSymplectic) linear = random_linear_symplectic(static_cast<int>(n), t.seed);

  // Stream 0: layout and constants, stream 1: noise.
  Rng layout_rng = make_rng(t.seed, 0);
  std::vector<std::size_t> slots(half);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  if (width > dim) std::shuffle(slots.begin(), slots.end(), layout_rng);
  // slot_of[i] is the latent position of signal coordinate i (q_i or p_i).
  std::vector<std::size_t> slot_of(dim);
  for (std::size_t i = 0; i < n; ++i) {
    slot_of[i] = slots[i];
    slot_of[n + i] = slots[i] + half;
  }
  std::vector<bool> is_signal(width, false);
  for (std::size_t s : slot_of) is_signal[s] = true;
  // Padding alternates constant and noise dimensions in position order.
  std::vector<double> constant(width, 0.0);
  std::vector<bool> is_noise(width, false);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  bool next_noise = false;
  for (std::size_t d = 0; d < width; ++d) {
    if (is_signal[d]) continue;
    is_noise[d] = next_noise;
    if (!next_noise) constant[d] = uniform(layout_rng);
    next_noise = !next_noise;
  }

  Rng noise_rng = make_rng(t.seed, 1);
  std::normal_distribution<double> signal_noise(0.0, t.noise_level);
  std::normal_distribution<double> pad_noise(0.0, t.padding_noise);

  const std::size_t rows = truth.trajectories() * truth.steps();
  std::vector<double> latent(rows * width);
  const auto& data = truth.truth_data();
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector s = Eigen::Map<const Vector>(data.data() + r * dim, static_cast<Eigen::Index>(dim));
    Vector z = transform_point(t, s, linear ? &*linear : nullptr);
    if (t.kind == TransformKind::PureNoise) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = signal_noise(noise_rng);
    }
    double* out = latent.data() + r * width;
    for (std::size_t d = 0; d < width; ++d) {
      if (is_noise[d]) out[d] = pad_noise(noise_rng);
      else if (!is_signal[d]) out[d] = constant[d];
    }
    for (std::size_t i = 0; i < dim; ++i) out[slot_of[i]] = z[static_cast<Eigen::Index>(i)];
  }

  std::vector<double> kl(width, kPaddingKl);
  for (std::size_t s : slot_of) kl[s] = kSignalKl;
  return truth.with_latent(width, std::move(latent), std::move(kl));
}

}  // namespace symetric
