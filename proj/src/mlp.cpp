#include "symetric/errors.hpp"
#include "symetric/log.hpp"
#include "symetric/maplearn.hpp"
#include "symetric/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace symetric {

namespace {

struct AdamSlot {
  Matrix m;
  Matrix v;
};

void adam_step(Matrix& param, const Matrix& grad, AdamSlot& slot, const MlpConfig& config, int t) {
  slot.m = config.beta1 * slot.m + (1.0 - config.beta1) * grad;
  slot.v = config.beta2 * slot.v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  param.array() -= config.learning_rate * (slot.m.array() / c1) / ((slot.v.array() / c2).sqrt() + config.adam_epsilon);
}

std::vector<int> layer_widths(int input_dim, int output_dim, const MlpConfig& config) {
  std::vector<int> widths{input_dim};
  for (int l = 0; l < config.hidden_layers; ++l) widths.push_back(config.hidden_units);
  widths.push_back(output_dim);
  return widths;
}

}  // namespace

std::size_t mlp_parameter_count(int input_dim, int output_dim, const MlpConfig& config) {
  if (input_dim < 1 || output_dim < 1) throw Error(ErrorKind::InvalidDimension, "MLP needs input and output dimensions");
  if (config.hidden_layers < 0 || config.hidden_units < 1) {
    throw Error(ErrorKind::InvalidParameter, "MLP needs hidden_layers >= 0 and hidden_units >= 1");
  }
  const auto widths = layer_widths(input_dim, output_dim, config);
  std::size_t count = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    count += static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l - 1] + 1);
  }
  return count;
}

LearnedMap mlp_fit(const Matrix& latent_rows, const Matrix& truth_rows, const MlpConfig& config) {
  if (latent_rows.rows() != truth_rows.rows()) throw Error(ErrorKind::InvalidDimension, "latent and truth row counts differ");
  if (latent_rows.rows() < 1) throw Error(ErrorKind::InvalidDimension, "MLP fit needs data");
  if (config.steps < 1 || config.batch_size < 1 || !(config.learning_rate > 0.0) || config.l1 < 0.0 ||
      config.data_ratio < 0.0) {
    throw Error(ErrorKind::InvalidParameter, "invalid MLP training configuration");
  }
  const auto in = static_cast<int>(latent_rows.cols());
  const auto out = static_cast<int>(truth_rows.cols());
  const std::size_t params = mlp_parameter_count(in, out, config);
  const auto available = static_cast<std::size_t>(latent_rows.rows());
  const auto required = static_cast<std::size_t>(std::ceil(config.data_ratio * static_cast<double>(params)));
  if (available < required) {
    const std::string detail = std::to_string(available) + " datapoints available, " + std::to_string(required) +
                               " required (" + format_double(config.data_ratio) + " x " + std::to_string(params) +
                               " parameters)";
    if (!config.allow_insufficient_data) throw Error(ErrorKind::DataRequirement, "MLP data requirement not met: " + detail);
    log::warn("MLP data requirement overridden: {}", detail);
  }

  MlpMap net;
  net.input = Standardizer::fit(latent_rows);
  net.output = Standardizer::fit(truth_rows);
  const Matrix x = net.input.apply_rows(latent_rows).transpose();
  const Matrix y = net.output.apply_rows(truth_rows).transpose();

  Rng rng = make_rng(config.seed, 0);
  const auto widths = layer_widths(in, out, config);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l - 1]));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    MlpLayer layer{Matrix(widths[l], widths[l - 1]), Vector::Zero(widths[l])};
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = uniform(rng);
    }
    net.layers.push_back(std::move(layer));
  }
  const std::size_t depth = net.layers.size();
  std::vector<AdamSlot> w_slots, b_slots;
  for (const auto& layer : net.layers) {
    w_slots.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()), Matrix::Zero(layer.weight.rows(), layer.weight.cols())});
    b_slots.push_back({Matrix::Zero(layer.bias.size(), 1), Matrix::Zero(layer.bias.size(), 1)});
  }

  const Eigen::Index n = x.cols();
  const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::size_t cursor = order.size();

  std::vector<Matrix> act(depth + 1);
  Matrix xb(in, batch), yb(out, batch);
  for (int step = 1; step <= config.steps; ++step) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const Eigen::Index row = order[cursor++];
      xb.col(b) = x.col(row);
      yb.col(b) = y.col(row);
    }

    act[0] = xb;
    for (std::size_t l = 0; l < depth; ++l) {
      Matrix a = (net.layers[l].weight * act[l]).colwise() + net.layers[l].bias;
      act[l + 1] = l + 1 < depth ? Matrix(a.array().tanh()) : a;
    }

    Matrix delta = 2.0 * (act[depth] - yb) / static_cast<double>(batch * out);
    for (std::size_t l = depth; l-- > 0;) {
      Matrix grad_w = delta * act[l].transpose();
      grad_w.array() += config.l1 * net.layers[l].weight.array().sign();
      const Matrix grad_b = delta.rowwise().sum();
      if (l > 0) {
        delta = (net.layers[l].weight.transpose() * delta).cwiseProduct(Matrix(1.0 - act[l].array().square()));
      }
      adam_step(net.layers[l].weight, grad_w, w_slots[l], config, step);
      Matrix bias = net.layers[l].bias;
      adam_step(bias, grad_b, b_slots[l], config, step);
      net.layers[l].bias = bias.col(0);
    }
  }
  for (const auto& layer : net.layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) throw Error(ErrorKind::Numeric, "MLP training diverged");
  }
  return LearnedMap(std::move(net));
}

LearnedMap mlp_fit(const LatentTrajectorySet& set, const MlpConfig& config) {
  return mlp_fit(set.stacked_latent(0, set.trajectories()), set.stacked_truth(0, set.trajectories()), config);
}

}  // namespace symetric
