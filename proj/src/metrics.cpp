#include "symetric/metrics.hpp"

#include "symetric/errors.hpp"
#include "symetric/parallel.hpp"
#include "symetric/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace symetric {

namespace {

constexpr double kDegenerateProduct = 1e-12;

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::InvalidDimension, std::string(what) + ": shapes differ");
  }
}

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> draw_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

double r_squared(const Matrix& predicted, const Matrix& truth) {
  check_same_shape(predicted, truth, "r_squared");
  if (truth.rows() < 2) throw Error(ErrorKind::InvalidDimension, "r_squared needs at least two samples");
  const double ss_res = (predicted - truth).squaredNorm();
  const double ss_tot = (truth.rowwise() - truth.colwise().mean()).squaredNorm();
  if (!(ss_tot > 0.0)) throw Error(ErrorKind::UndefinedVariance, "r_squared: ground truth has zero variance");
  return 1.0 - ss_res / ss_tot;
}

void SymConfig::validate() const {
  if (samples < 1 || trajectories_per_sample < 1 || points_per_trajectory < 1) {
    throw Error(ErrorKind::InvalidParameter, "Sym sampling counts must be at least 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidParameter, "alpha must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");
}

Matrix sym_product(const Matrix& jacobian, const Matrix& a_latent) {
  if (jacobian.cols() != a_latent.rows() || a_latent.rows() != a_latent.cols()) {
    throw Error(ErrorKind::InvalidDimension, "Jacobian and latent structure matrix do not match");
  }
  const Matrix a_hat = jacobian * a_latent * jacobian.transpose();
  return a_hat * a_hat.transpose();
}

Matrix latent_structure(std::size_t latent_dim, std::span<const std::size_t> kept) {
  if (latent_dim < 2 || latent_dim % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "latent width must be even and at least 2");
  }
  const Matrix full = CanonicalMatrix(static_cast<int>(latent_dim / 2)).dense();
  const auto k = static_cast<Eigen::Index>(kept.size());
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (kept[static_cast<std::size_t>(i)] >= latent_dim || kept[static_cast<std::size_t>(j)] >= latent_dim) {
        throw Error(ErrorKind::InvalidDimension, "kept dimension out of range");
      }
      a(i, j) = full(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)]),
                     static_cast<Eigen::Index>(kept[static_cast<std::size_t>(j)]));
    }
  }
  return a;
}

SymSample sym_at_points(const LearnedMap& map, const std::vector<std::vector<Vector>>& points, const Matrix& a_latent,
                        SymConstant constant) {
  const Eigen::Index out = map.output_dim();
  const Matrix identity = Matrix::Identity(out, out);
  SymSample sample;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& trajectory : points) {
    if (trajectory.empty()) throw Error(ErrorKind::InvalidParameter, "Sym needs at least one point per trajectory");
    std::vector<Matrix> products;
    products.reserve(trajectory.size());
    double max_sum = 0.0, trace_sum = 0.0, frob_sum = 0.0;
    for (const auto& point : trajectory) {
      Matrix b = sym_product(map.jacobian(point), a_latent);
      if (!b.allFinite()) throw Error(ErrorKind::Numeric, "non-finite Jacobian product");
      max_sum += b.cwiseAbs().maxCoeff();
      trace_sum += b.trace();
      frob_sum += b.squaredNorm();
      products.push_back(std::move(b));
    }
    const double mean_max = max_sum / static_cast<double>(trajectory.size());
    double c = 1.0;
    if (mean_max < kDegenerateProduct) {
      sample.degenerate = true;
    } else if (constant == SymConstant::ClosedForm) {
      c = 1.0 / mean_max;
    } else {
      c = trace_sum / frob_sum;
    }
    sample.c.push_back(c);
    for (const auto& b : products) {
      total += (c * b - identity).squaredNorm() / static_cast<double>(b.size());
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::InvalidParameter, "Sym needs at least one point");
  sample.sym = total / static_cast<double>(count);
  return sample;
}

SymResult sym_score(const LearnedMap& map, const LatentTrajectorySet& set, const Matrix& a_latent,
                    const SymConfig& config, int threads) {
  config.validate();
  if (static_cast<std::size_t>(map.input_dim()) != set.latent_dim() || a_latent.rows() != map.input_dim()) {
    throw Error(ErrorKind::InvalidDimension, "map input, latent width and structure matrix disagree");
  }
  SymResult result;
  result.samples.resize(static_cast<std::size_t>(config.samples));
  parallel_for(result.samples.size(), threads, [&](std::size_t s) {
    Rng rng = make_rng(config.seed, s);
    const auto chosen =
        draw_distinct(set.trajectories(), static_cast<std::size_t>(config.trajectories_per_sample), rng);
    std::vector<std::vector<Vector>> points;
    for (std::size_t k : chosen) {
      const ConstRowMap latent = set.latent(k);
      std::vector<Vector> picked;
      for (std::size_t t : draw_distinct(set.steps(), static_cast<std::size_t>(config.points_per_trajectory), rng)) {
        picked.push_back(latent.row(static_cast<Eigen::Index>(t)).transpose());
      }
      points.push_back(std::move(picked));
    }
    SymSample sample = sym_at_points(map, points, a_latent, config.constant);
    sample.trajectories = chosen;
    result.samples[s] = std::move(sample);
  });

  double sum = 0.0;
  result.min = std::numeric_limits<double>::infinity();
  result.max = -std::numeric_limits<double>::infinity();
  for (const auto& sample : result.samples) {
    sum += sample.sym;
    result.min = std::min(result.min, sample.sym);
    result.max = std::max(result.max, sample.sym);
    result.degenerate = result.degenerate || sample.degenerate;
  }
  result.sym = config.aggregation == SymAggregation::Mean ? sum / static_cast<double>(result.samples.size()) : result.max;
  return result;
}

SymResult sym_score(const LearnedMap& map, const LatentTrajectorySet& set, const SymConfig& config, int threads) {
  std::vector<std::size_t> all(set.latent_dim());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return sym_score(map, set, latent_structure(set.latent_dim(), all), config, threads);
}

int symetric(double r2, double sym, double alpha, double epsilon) { return r2 > alpha && sym < epsilon ? 1 : 0; }

std::vector<double> framewise_error(const Matrix& truth, const Matrix& predicted) {
  check_same_shape(truth, predicted, "framewise error");
  std::vector<double> error(static_cast<std::size_t>(truth.rows()));
  for (Eigen::Index t = 0; t < truth.rows(); ++t) {
    const double norm = truth.row(t).squaredNorm();
    const double diff = (truth.row(t) - predicted.row(t)).squaredNorm();
    if (norm > 0.0) {
      error[static_cast<std::size_t>(t)] = diff / norm;
    } else {
      error[static_cast<std::size_t>(t)] = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return error;
}

double normalized_mse(const Matrix& truth, const Matrix& predicted) {
  check_same_shape(truth, predicted, "normalized_mse");
  if (truth.rows() < 1) throw Error(ErrorKind::InvalidDimension, "normalized_mse needs at least one frame");
  double sum = 0.0;
  for (Eigen::Index t = 0; t < truth.rows(); ++t) {
    const double norm = truth.row(t).squaredNorm();
    if (!(norm > 0.0)) {
      throw Error(ErrorKind::UndefinedVariance, "normalized_mse: ground-truth frame " + std::to_string(t) + " is zero");
    }
    sum += (truth.row(t) - predicted.row(t)).squaredNorm() / norm;
  }
  return sum / static_cast<double>(truth.rows());
}

double reconstruction_mse(const Matrix& truth, const Matrix& predicted, std::size_t horizon) {
  check_same_shape(truth, predicted, "reconstruction_mse");
  const auto frames = static_cast<Eigen::Index>(horizon) + 1;
  if (truth.rows() < frames) throw Error(ErrorKind::InvalidDimension, "sequence shorter than the reconstruction window");
  return normalized_mse(truth.topRows(frames), predicted.topRows(frames));
}

double extrapolation_mse(const Matrix& truth, const Matrix& predicted, std::size_t horizon) {
  check_same_shape(truth, predicted, "extrapolation_mse");
  const auto t = static_cast<Eigen::Index>(horizon);
  if (t < 1 || truth.rows() < 2 * t + 1) {
    throw Error(ErrorKind::InvalidDimension, "sequence shorter than the extrapolation window");
  }
  return normalized_mse(truth.middleRows(t + 1, t), predicted.middleRows(t + 1, t));
}

std::size_t vpt(const Matrix& truth, const Matrix& predicted, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidParameter, "VPT threshold must be positive");
  const auto error = framewise_error(truth, predicted);
  for (std::size_t t = 0; t < error.size(); ++t) {
    if (error[t] > lambda) return t;
  }
  return error.size();
}

double vpt_average(std::size_t forward, std::size_t backward) {
  return 0.5 * (static_cast<double>(forward) + static_cast<double>(backward));
}

}  // namespace symetric
