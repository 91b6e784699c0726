#include "symetric/errors.hpp"
#include "symetric/maplearn.hpp"
#include "symetric/metrics.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace symetric {

namespace {

constexpr std::string_view kMapMagic = "HMAP1";

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMatrix>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

Vector vector_from(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

Matrix matrix_from(const double* data, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RowMatrix>(data, rows, cols);
}

void check_standardizer(const Standardizer& s, Eigen::Index dim, const char* what) {
  if (s.mean.size() != dim || s.scale.size() != dim) {
    throw Error(ErrorKind::InvalidDimension, std::string(what) + " standardizer has wrong dimension");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(s.scale[i] > 0.0) || !std::isfinite(s.scale[i]) || !std::isfinite(s.mean[i])) {
      throw Error(ErrorKind::InvalidParameter, std::string(what) + " standardizer scales must be positive and finite");
    }
  }
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& rows) {
  if (rows.rows() < 1) throw Error(ErrorKind::InvalidDimension, "cannot standardize an empty matrix");
  Standardizer s;
  s.mean = rows.colwise().mean();
  s.scale.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double sd = std::sqrt((rows.col(j).array() - s.mean[j]).square().mean());
    s.scale[j] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

Standardizer Standardizer::identity(Eigen::Index dim) { return {Vector::Zero(dim), Vector::Ones(dim)}; }

Vector Standardizer::apply(const Vector& v) const { return (v - mean).cwiseQuotient(scale); }

Matrix Standardizer::apply_rows(const Matrix& rows) const {
  return (rows.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

LearnedMap::LearnedMap(PolynomialMap map) {
  const Eigen::Index in = map.input.mean.size();
  const Eigen::Index out = map.output.mean.size();
  if (in < 1 || out < 1) throw Error(ErrorKind::InvalidDimension, "polynomial map needs input and output dimensions");
  check_standardizer(map.input, in, "input");
  check_standardizer(map.output, out, "output");
  basis_.emplace(static_cast<int>(in), map.order);
  if (map.coef.rows() != out || map.coef.cols() != static_cast<Eigen::Index>(basis_->size()) ||
      map.intercept.size() != out) {
    throw Error(ErrorKind::InvalidDimension, "polynomial coefficients do not match the basis");
  }
  if (!map.coef.allFinite() || !map.intercept.allFinite()) {
    throw Error(ErrorKind::Numeric, "polynomial coefficients are not finite");
  }
  impl_ = std::move(map);
}

LearnedMap::LearnedMap(MlpMap map) {
  if (map.layers.empty()) throw Error(ErrorKind::InvalidDimension, "MLP needs at least one layer");
  const Eigen::Index in = map.input.mean.size();
  check_standardizer(map.input, in, "input");
  Eigen::Index width = in;
  for (const auto& layer : map.layers) {
    if (layer.weight.cols() != width || layer.bias.size() != layer.weight.rows() || layer.weight.rows() < 1) {
      throw Error(ErrorKind::InvalidDimension, "MLP layer shapes are inconsistent");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) throw Error(ErrorKind::Numeric, "MLP weights are not finite");
    width = layer.weight.rows();
  }
  check_standardizer(map.output, width, "output");
  impl_ = std::move(map);
}

MapForm LearnedMap::form() const noexcept {
  return std::holds_alternative<PolynomialMap>(impl_) ? MapForm::Polynomial : MapForm::Mlp;
}

int LearnedMap::input_dim() const noexcept {
  return static_cast<int>(std::visit([](const auto& m) { return m.input.mean.size(); }, impl_));
}

int LearnedMap::output_dim() const noexcept {
  return static_cast<int>(std::visit([](const auto& m) { return m.output.mean.size(); }, impl_));
}

void LearnedMap::check_input(Eigen::Index size) const {
  if (size != input_dim()) {
    throw Error(ErrorKind::InvalidDimension, "map expects " + std::to_string(input_dim()) + " inputs, got " +
                                                 std::to_string(size));
  }
}

Vector LearnedMap::evaluate(const Vector& latent) const {
  check_input(latent.size());
  if (const auto* poly = polynomial()) {
    const Vector phi = basis_->features(poly->input.apply(latent));
    const Vector standardized = poly->coef * phi + poly->intercept;
    return poly->output.mean + poly->output.scale.cwiseProduct(standardized);
  }
  const auto& net = *mlp();
  Vector h = net.input.apply(latent);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Vector a = net.layers[l].weight * h + net.layers[l].bias;
    h = l + 1 < net.layers.size() ? Vector(a.array().tanh()) : a;
  }
  return net.output.mean + net.output.scale.cwiseProduct(h);
}

Matrix LearnedMap::evaluate_rows(const Matrix& rows) const {
  check_input(rows.cols());
  Matrix out(rows.rows(), output_dim());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = evaluate(rows.row(i).transpose()).transpose();
  return out;
}

Matrix LearnedMap::jacobian(const Vector& latent) const {
  check_input(latent.size());
  if (const auto* poly = polynomial()) {
    const Matrix dphi = basis_->feature_jacobian(poly->input.apply(latent));
    const Matrix kept = (poly->coef.array().abs() >= poly->prune_threshold).select(poly->coef, 0.0);
    Matrix j = kept * dphi;
    j = poly->output.scale.asDiagonal() * j;
    return j * poly->input.scale.cwiseInverse().asDiagonal();
  }
  const auto& net = *mlp();
  Vector h = net.input.apply(latent);
  Matrix j = net.input.scale.cwiseInverse().asDiagonal();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Vector a = net.layers[l].weight * h + net.layers[l].bias;
    j = net.layers[l].weight * j;
    if (l + 1 < net.layers.size()) {
      h = a.array().tanh();
      j = (1.0 - h.array().square()).matrix().asDiagonal() * j;
    }
  }
  return net.output.scale.asDiagonal() * j;
}

Matrix jacobian(const LearnedMap& map, const Vector& point) { return map.jacobian(point); }

void save_map(const LearnedMap& map, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.set("magic", std::string(kMapMagic));
  manifest.set("form", map.form() == MapForm::Polynomial ? "polynomial" : "mlp");
  manifest.set("input_dim", std::to_string(map.input_dim()));
  manifest.set("output_dim", std::to_string(map.output_dim()));

  auto save_standardizers = [&](const auto& m) {
    binary::write_f64(dir / "input_mean.f64", to_vector(m.input.mean));
    binary::write_f64(dir / "input_scale.f64", to_vector(m.input.scale));
    binary::write_f64(dir / "output_mean.f64", to_vector(m.output.mean));
    binary::write_f64(dir / "output_scale.f64", to_vector(m.output.scale));
  };

  if (const auto* poly = map.polynomial()) {
    manifest.set("order", std::to_string(poly->order));
    manifest.set("prune_threshold", format_double(poly->prune_threshold));
    save_standardizers(*poly);
    binary::write_f64(dir / "coef.f64", to_row_major(poly->coef));
    binary::write_f64(dir / "intercept.f64", to_vector(poly->intercept));
  } else {
    const auto& net = *map.mlp();
    std::ostringstream widths;
    widths << net.layers.front().weight.cols();
    std::vector<double> weights, biases;
    for (const auto& layer : net.layers) {
      widths << ',' << layer.weight.rows();
      const auto w = to_row_major(layer.weight);
      weights.insert(weights.end(), w.begin(), w.end());
      biases.insert(biases.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    }
    manifest.set("widths", widths.str());
    save_standardizers(net);
    binary::write_f64(dir / "weights.f64", weights);
    binary::write_f64(dir / "biases.f64", biases);
  }
  manifest.write(dir / "manifest");
}

LearnedMap load_map(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest";
  const Manifest manifest = Manifest::read(manifest_path);
  if (!manifest.has("magic") || manifest.get("magic") != kMapMagic) {
    throw FormatError(manifest_path.string(), 0, "not a learned-map manifest (magic " + std::string(kMapMagic) + ")");
  }
  const auto in = manifest.get_size("input_dim");
  const auto out = manifest.get_size("output_dim");
  auto load_standardizers = [&](auto& m) {
    m.input.mean = vector_from(binary::read_f64(dir / "input_mean.f64", in));
    m.input.scale = vector_from(binary::read_f64(dir / "input_scale.f64", in));
    m.output.mean = vector_from(binary::read_f64(dir / "output_mean.f64", out));
    m.output.scale = vector_from(binary::read_f64(dir / "output_scale.f64", out));
  };

  const std::string& form = manifest.get("form");
  if (form == "polynomial") {
    PolynomialMap poly;
    poly.order = static_cast<int>(manifest.get_size("order"));
    poly.prune_threshold = manifest.get_double("prune_threshold");
    load_standardizers(poly);
    const std::size_t features = polynomial_feature_count(static_cast<int>(in), poly.order);
    const auto coef = binary::read_f64(dir / "coef.f64", out * features);
    poly.coef = matrix_from(coef.data(), static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(features));
    poly.intercept = vector_from(binary::read_f64(dir / "intercept.f64", out));
    return LearnedMap(std::move(poly));
  }
  if (form == "mlp") {
    std::vector<std::size_t> widths;
    std::istringstream list(manifest.get("widths"));
    std::string item;
    while (std::getline(list, item, ',')) {
      try {
        widths.push_back(std::stoul(item));
      } catch (const std::exception&) {
        throw FormatError(manifest_path.string(), 0, "bad widths entry '" + item + "'");
      }
    }
    if (widths.size() < 2 || widths.front() != in || widths.back() != out) {
      throw FormatError(manifest_path.string(), 0, "widths inconsistent with input_dim/output_dim");
    }
    std::size_t weight_count = 0, bias_count = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) {
      weight_count += widths[l] * widths[l - 1];
      bias_count += widths[l];
    }
    MlpMap net;
    load_standardizers(net);
    const auto weights = binary::read_f64(dir / "weights.f64", weight_count);
    const auto biases = binary::read_f64(dir / "biases.f64", bias_count);
    std::size_t wo = 0, bo = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) {
      const auto rows = static_cast<Eigen::Index>(widths[l]);
      const auto cols = static_cast<Eigen::Index>(widths[l - 1]);
      net.layers.push_back({matrix_from(weights.data() + wo, rows, cols),
                            Eigen::Map<const Vector>(biases.data() + bo, rows)});
      wo += widths[l] * widths[l - 1];
      bo += widths[l];
    }
    return LearnedMap(std::move(net));
  }
  throw FormatError(manifest_path.string(), 0, "unknown map form '" + form + "'");
}

std::vector<std::size_t> trajectory_groups(std::size_t trajectories, std::size_t steps) {
  std::vector<std::size_t> groups(trajectories * steps);
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i] = i / steps;
  return groups;
}

ProgressiveFit fit_polynomial(const Matrix& latent_rows, const Matrix& truth_rows, int order,
                              const ProgressiveOptions& options, std::span<const std::size_t> groups) {
  if (latent_rows.rows() != truth_rows.rows()) throw Error(ErrorKind::InvalidDimension, "latent and truth row counts differ");
  PolynomialMap poly;
  poly.order = order;
  poly.prune_threshold = options.prune_threshold;
  poly.input = Standardizer::fit(latent_rows);
  poly.output = Standardizer::fit(truth_rows);
  const PolynomialBasis basis(static_cast<int>(latent_rows.cols()), order);
  const Matrix phi = basis.features(poly.input.apply_rows(latent_rows));
  const LassoResult lasso = lasso_fit(phi, poly.output.apply_rows(truth_rows), options.lasso, groups);
  poly.coef = lasso.coef;
  poly.intercept = lasso.intercept;
  LearnedMap map(std::move(poly));
  const double r2 = r_squared(map.evaluate_rows(latent_rows), truth_rows);
  return {std::move(map), order, r2, {r2}};
}

ProgressiveFit progressive_polynomial_fit(const Matrix& latent_rows, const Matrix& truth_rows,
                                          const ProgressiveOptions& options, std::span<const std::size_t> groups) {
  if (options.kappa < 1) throw Error(ErrorKind::InvalidParameter, "kappa must be at least 1");
  std::optional<ProgressiveFit> best;
  std::vector<double> history;
  for (int order = 1; order <= options.kappa; ++order) {
    ProgressiveFit fit = fit_polynomial(latent_rows, truth_rows, order, options, groups);
    history.push_back(fit.r2);
    const bool done = fit.r2 > options.r2_threshold;
    if (!best || fit.r2 > best->r2) best = std::move(fit);
    if (done) break;
  }
  best->r2_by_order = std::move(history);
  return std::move(*best);
}

ProgressiveFit progressive_polynomial_fit(const LatentTrajectorySet& set, const ProgressiveOptions& options) {
  const auto groups = trajectory_groups(set.trajectories(), set.steps());
  return progressive_polynomial_fit(set.stacked_latent(0, set.trajectories()), set.stacked_truth(0, set.trajectories()),
                                    options, groups);
}

}  // namespace symetric
