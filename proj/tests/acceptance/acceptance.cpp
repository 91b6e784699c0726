#include "commands.hpp"
#include "symetric/dataset.hpp"
#include "symetric/errors.hpp"
#include "symetric/evaluate.hpp"
#include "symetric/integrators.hpp"
#include "symetric/maplearn.hpp"
#include "symetric/metrics.hpp"
#include "symetric/synth.hpp"
#include "symetric/systems.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace symetric;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

class Scratch {
 public:
  explicit Scratch(const std::string& name)
      : path(fs::temp_directory_path() / ("symetric_acceptance_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path path;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

LatentTrajectorySet mass_spring_truth(std::uint64_t seed) {
  DatasetSpec spec;
  spec.dataset = DatasetKind::MassSpring;
  spec.trajectories = 100;
  spec.steps = 60;
  spec.dt = 0.125;
  spec.seed = seed;
  return generate_dataset(spec, 4);
}

EvaluateOptions pr_options(std::uint64_t seed) {
  EvaluateOptions options;
  options.method = Method::PR;
  options.pr.kappa = 5;
  options.sym.alpha = 0.9;
  options.sym.epsilon = 0.05;
  options.sym.seed = seed;
  options.threads = 4;
  return options;
}

Outcome positive_discrimination() {
  const auto start = std::chrono::steady_clock::now();
  const LatentTrajectorySet truth = mass_spring_truth(11);
  const TransformKind kinds[] = {TransformKind::Identity, TransformKind::UniformScale, TransformKind::ActionAngle,
                                 TransformKind::RandomLinearSymplectic};
  Outcome outcome;
  std::string failed;
  for (const bool embed : {false, true}) {
    for (const TransformKind kind : kinds) {
      SyntheticTransform transform;
      transform.kind = kind;
      transform.seed = 11;
      if (embed) transform.embed_dim = 32;
      const EvaluationReport report = evaluate(apply_transform(transform, truth), pr_options(11));
      const std::string name = std::string(to_string(kind)) + (embed ? "+embed32" : "");
      outcome.detail += name + "(R2=" + fmt(report.r2) + ", Sym=" + fmt(report.sym) + ", SyMetric=" +
                        std::to_string(report.symetric) + ") ";
      if (report.symetric != 1) {
        outcome.pass = false;
        failed += " " + name;
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.detail += "runtime " + fmt(seconds) + " s";
  if (seconds >= 300.0) outcome.pass = false;
  if (!failed.empty()) outcome.detail += "; SyMetric != 1 for" + failed;
  return outcome;
}

Outcome negative_discrimination() {
  const auto start = std::chrono::steady_clock::now();
  const LatentTrajectorySet truth = mass_spring_truth(13);
  Outcome outcome;

  SyntheticTransform distort;
  distort.kind = TransformKind::NonSymplecticDistort;
  distort.exponent = 3.0;
  distort.seed = 13;
  const EvaluationReport d = evaluate(apply_transform(distort, truth), pr_options(13));
  outcome.pass = d.r2 > 0.9 && d.sym > 0.05 && d.symetric == 0;
  outcome.detail = "distort(R2=" + fmt(d.r2) + ", Sym=" + fmt(d.sym) + ", SyMetric=" + std::to_string(d.symetric) + ") ";

  SyntheticTransform noise;
  noise.kind = TransformKind::PureNoise;
  noise.seed = 13;
  const EvaluationReport n = evaluate(apply_transform(noise, truth), pr_options(13));
  outcome.pass = outcome.pass && n.r2 < 0.1 && n.symetric == 0;
  outcome.detail += "noise(R2=" + fmt(n.r2) + ", SyMetric=" + std::to_string(n.symetric) + ") ";

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.detail += "runtime " + fmt(seconds) + " s";
  if (seconds >= 120.0) outcome.pass = false;
  return outcome;
}

LearnedMap linear_map(const Matrix& m) {
  PolynomialMap map;
  map.input = Standardizer::identity(m.cols());
  map.output = Standardizer::identity(m.rows());
  map.order = 1;
  map.coef = m;
  map.intercept = Vector::Zero(m.rows());
  return LearnedMap(std::move(map));
}

Outcome exact_map_sym_floor() {
  Rng rng = make_rng(17);
  std::normal_distribution<double> normal;
  std::vector<std::vector<Vector>> points(5);
  for (auto& trajectory : points) {
    for (int i = 0; i < 10; ++i) trajectory.push_back(Vector::NullaryExpr(2, [&] { return normal(rng); }));
  }
  const Matrix a = canonical_block_matrix(1).dense();
  const SymSample identity = sym_at_points(linear_map(Matrix::Identity(2, 2)), points, a);
  const SymSample scale = sym_at_points(linear_map(2.0 * Matrix::Identity(2, 2)), points, a);

  Outcome outcome;
  double c_identity = 0.0, c_scale = 0.0;
  for (double c : identity.c) c_identity = std::max(c_identity, std::abs(c - 1.0));
  for (double c : scale.c) c_scale = std::max(c_scale, std::abs(c - 1.0 / 16.0));
  outcome.pass = identity.sym < 1e-6 && scale.sym < 1e-6 && c_identity < 1e-9 && c_scale < 1e-9;
  outcome.detail = "identity Sym=" + fmt(identity.sym) + " max|c-1|=" + fmt(c_identity) + "; scale Sym=" +
                   fmt(scale.sym) + " max|c-1/16|=" + fmt(c_scale);
  return outcome;
}

Outcome energy_conservation() {
  Outcome outcome;
  IntegratorSpec spec;
  spec.scheme = Scheme::Leapfrog;
  spec.dt = 0.125;
  spec.steps = 1000;
  for (const DatasetKind kind : {DatasetKind::MassSpring, DatasetKind::Pendulum, DatasetKind::TwoBody}) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      Rng rng = make_rng(19, i);
      const HamiltonianSystem system = sample_system(kind, Variant::Fixed, rng);
      const Trajectory trajectory = rollout(system, sample_initial_state(system, rng), spec);
      const double e0 = system.energy(trajectory.front());
      for (const auto& state : trajectory.states()) {
        worst = std::max(worst, std::abs(system.energy(state) - e0) / std::abs(e0));
      }
    }
    outcome.detail += std::string(to_string(kind)) + " drift " + fmt(worst) + " ";
    if (!(worst < 1e-3)) outcome.pass = false;
  }
  return outcome;
}

Outcome reversibility() {
  Outcome outcome;
  IntegratorSpec spec;
  spec.scheme = Scheme::Leapfrog;
  spec.dt = 0.125;
  spec.steps = 1000;
  for (const DatasetKind kind : {DatasetKind::MassSpring, DatasetKind::Pendulum, DatasetKind::TwoBody}) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng = make_rng(23, i);
      const HamiltonianSystem system = sample_system(kind, Variant::Fixed, rng);
      const PhaseState initial = sample_initial_state(system, rng);
      IntegratorSpec forward = spec;
      const Trajectory there = rollout(system, initial, forward);
      IntegratorSpec backward = spec;
      backward.direction = Direction::Backward;
      const Trajectory back = rollout(system, there.back(), backward);
      worst = std::max(worst, (back.back().flat() - initial.flat()).cwiseAbs().maxCoeff());
    }
    outcome.detail += std::string(to_string(kind)) + " " + fmt(worst) + " ";
    if (!(worst < 1e-9)) outcome.pass = false;
  }
  return outcome;
}

Outcome closed_form_oracle() {
  const HamiltonianSystem system(MassSpringParams{1.0, 1.0});
  IntegratorSpec spec;
  spec.scheme = Scheme::Leapfrog;
  spec.dt = std::numbers::pi / 25.0;
  spec.steps = 50;
  const Trajectory trajectory = rollout(system, PhaseState(Vector::Ones(1), Vector::Zero(1)), spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    worst = std::max(worst, std::abs(trajectory[i].q()(0) - std::cos(static_cast<double>(i) * spec.dt)));
  }
  return {worst < 1e-3, "max |q - cos t| = " + fmt(worst) + " over one period"};
}

Outcome lasso_oracle() {
  Outcome outcome;
  double worst = 0.0;
  for (std::uint64_t p = 0; p < 5; ++p) {
    Rng rng = make_rng(29, p);
    std::normal_distribution<double> normal;
    const Matrix x = Matrix::NullaryExpr(50, 8, [&] { return normal(rng); });
    const Vector w = Vector::NullaryExpr(8, [&] { return normal(rng); });
    Matrix y(50, 1);
    y.col(0) = (x * w).array() + 0.5 + 0.1 * Vector::NullaryExpr(50, [&] { return normal(rng); }).array();

    Matrix design(50, 9);
    design << x, Vector::Ones(50);
    const Vector exact = design.colPivHouseholderQr().solve(y.col(0));

    LassoOptions options;
    options.alphas = {0.0};
    options.max_iter = 100000;
    options.tol = 1e-14;
    const LassoResult fit = lasso_fit(x, y, options);
    const double err = std::max((fit.coef.row(0).transpose() - exact.head(8)).cwiseAbs().maxCoeff(),
                                std::abs(fit.intercept(0) - exact(8)));
    worst = std::max(worst, err);
  }
  outcome.pass = worst < 1e-6;
  outcome.detail = "max |w - w_ls| = " + fmt(worst);

  Rng rng = make_rng(29, 99);
  std::normal_distribution<double> normal;
  const Matrix x = Matrix::NullaryExpr(50, 8, [&] { return normal(rng); });
  const Matrix y = Matrix::NullaryExpr(50, 1, [&] { return normal(rng) + 3.0; });
  LassoOptions shrink;
  shrink.alphas = {1e6};
  const LassoResult fit = lasso_fit(x, y, shrink);
  const double coef = fit.coef.cwiseAbs().maxCoeff();
  const double intercept = std::abs(fit.intercept(0) - y.col(0).mean());
  outcome.pass = outcome.pass && coef == 0.0 && intercept < 1e-12;
  outcome.detail += "; full shrinkage max|w| = " + fmt(coef) + ", |b - mean y| = " + fmt(intercept);
  return outcome;
}

Matrix central_difference(const LearnedMap& map, const Vector& z, double h) {
  Matrix j(map.output_dim(), map.input_dim());
  for (Eigen::Index d = 0; d < z.size(); ++d) {
    Vector plus = z, minus = z;
    plus(d) += h;
    minus(d) -= h;
    j.col(d) = (map.evaluate(plus) - map.evaluate(minus)) / (2.0 * h);
  }
  return j;
}

double worst_relative(const LearnedMap& map, const LearnedMap& reference, Rng& rng) {
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector z = Vector::NullaryExpr(map.input_dim(), [&] { return normal(rng); });
    const Matrix analytic = map.jacobian(z);
    const Matrix numeric = central_difference(reference, z, 1e-5);
    worst = std::max(worst, (analytic - numeric).norm() / std::max(analytic.norm(), 1e-12));
  }
  return worst;
}

Outcome jacobian_oracles() {
  Rng rng = make_rng(31);
  std::normal_distribution<double> normal;

  const Matrix latent = Matrix::NullaryExpr(400, 4, [&] { return normal(rng); });
  Matrix truth(400, 4);
  for (Eigen::Index i = 0; i < 400; ++i) {
    const auto z = latent.row(i);
    truth.row(i) << z(0) + 0.5 * z(1) * z(2), z(1) - 0.2 * z(3) * z(3) * z(0), std::sin(z(2)), z(3) * z(0);
  }
  ProgressiveOptions options;
  options.lasso.alphas = {1e-4};
  options.prune_threshold = 0.0;
  const ProgressiveFit fit = fit_polynomial(latent, truth, 3, options);
  const double poly = worst_relative(fit.map, fit.map, rng);

  // Default fit: its Jacobian belongs to the polynomial without the pruned terms.
  options.prune_threshold = kJacobianPruneThreshold;
  const ProgressiveFit pruned = fit_polynomial(latent, truth, 3, options);
  PolynomialMap kept = *pruned.map.polynomial();
  kept.coef = (kept.coef.array().abs() >= kept.prune_threshold).select(kept.coef, 0.0);
  kept.prune_threshold = 0.0;
  const double pruned_error = worst_relative(pruned.map, LearnedMap(std::move(kept)), rng);

  MlpMap mlp;
  mlp.input = Standardizer{Vector::Constant(4, 0.3), Vector::Constant(4, 1.7)};
  mlp.output = Standardizer{Vector::Constant(4, -0.2), Vector::Constant(4, 0.8)};
  const Eigen::Index width = 4;
  for (int layer = 0; layer < 5; ++layer) {
    mlp.layers.push_back({Matrix::NullaryExpr(4, width, [&] { return normal(rng); }),
                          Vector::NullaryExpr(4, [&] { return normal(rng); })});
  }
  const LearnedMap net_map(std::move(mlp));
  const double net = worst_relative(net_map, net_map, rng);

  return {poly < 1e-6 && pruned_error < 1e-6 && net < 1e-5,
          "polynomial " + fmt(poly) + ", pruned polynomial " + fmt(pruned_error) + ", MLP " + fmt(net)};
}

Outcome replicator_invariants() {
  Outcome outcome;
  IntegratorSpec spec;
  spec.scheme = Scheme::ImprovedEuler;
  spec.dt = kDefaultReplicatorDt;
  spec.steps = 1000;
  double worst = 0.0;
  for (const DatasetKind kind : {DatasetKind::MatchingPennies, DatasetKind::RockPaperScissors}) {
    const ReplicatorGame game = game_for(kind);
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng = make_rng(37, i);
      const Trajectory trajectory = rollout(game, sample_initial_state(game, rng), spec);
      for (const auto& state : trajectory.states()) {
        for (const Vector* part : {&state.q(), &state.p()}) {
          worst = std::max(worst, std::abs(part->sum() - 1.0));
          worst = std::max(worst, std::max(-part->minCoeff(), part->maxCoeff() - 1.0));
        }
      }
    }
  }
  const ReplicatorGame pennies = ReplicatorGame::matching_pennies();
  const Vector uniform = Vector::Constant(2, 0.5);
  const auto [dx, dy] = replicator_field(pennies, uniform, uniform);
  const double field = std::sqrt(dx.squaredNorm() + dy.squaredNorm());
  outcome.pass = worst < 1e-6 && field < 1e-12;
  outcome.detail = "simplex deviation " + fmt(worst) + ", field at uniform " + fmt(field);
  return outcome;
}

Outcome vpt_criterion() {
  Outcome outcome;
  Rng rng = make_rng(41);
  std::normal_distribution<double> normal;
  const Matrix truth = Matrix::NullaryExpr(100, 4, [&] { return normal(rng) + 2.0; });
  Matrix drift = truth;
  for (Eigen::Index t = 0; t < drift.rows(); ++t) drift.row(t) *= 1.0 + 0.003 * static_cast<double>(t);

  bool monotone = true;
  std::size_t previous = 0;
  for (double lambda = 0.005; lambda <= 0.2; lambda += 0.005) {
    const std::size_t v = vpt(truth, drift, lambda);
    monotone = monotone && v >= previous;
    previous = v;
  }
  const bool full = vpt(truth, truth) == static_cast<std::size_t>(truth.rows());

  // Normalized error 0.01 up to frame 6, 0.03 from frame 7 on.
  Matrix ones = Matrix::Ones(12, 1);
  Matrix crossing = ones;
  for (Eigen::Index t = 0; t < 12; ++t) crossing(t, 0) = 1.0 + std::sqrt(t < 7 ? 0.01 : 0.03);
  const std::size_t index = vpt(ones, crossing, 0.02);

  // Error 0.02 on frames 3-4 and 0.03 from frame 5: only λ = 0.025 gives 5.
  Matrix staged = ones;
  for (Eigen::Index t = 0; t < 12; ++t) staged(t, 0) = 1.0 + std::sqrt(t < 3 ? 0.0 : (t < 5 ? 0.02 : 0.03));
  const std::size_t by_default = vpt(ones, staged);

  outcome.pass = monotone && full && index == 7 && by_default == 5 && kDefaultVptThreshold == 0.025;
  outcome.detail = std::string("monotone ") + (monotone ? "yes" : "no") + ", identical " + (full ? "full" : "short") +
                   ", crossing index " + std::to_string(index) + " (expected 7), default-lambda index " +
                   std::to_string(by_default) + " (expected 5)";
  return outcome;
}

Outcome container() {
  Scratch scratch("container");
  Outcome outcome;
  int exact = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = make_rng(43, i);
    std::uniform_int_distribution<std::size_t> small(1, 6);
    std::normal_distribution<double> normal(0.0, 1e3);
    const std::size_t k = small(rng), t = small(rng) + 1, m = small(rng) - 1, n = small(rng);
    const bool has_kl = m > 0 && (i % 2 == 0);
    auto draw = [&](std::size_t count) {
      std::vector<double> v(count);
      for (auto& x : v) x = normal(rng) * std::pow(10.0, static_cast<double>(rng() % 20) - 10.0);
      return v;
    };
    std::optional<std::vector<double>> kl;
    if (has_kl) kl = draw(2 * m);
    const LatentTrajectorySet set(k, t, 2 * m, 2 * n, 0.1 + 0.01 * static_cast<double>(i), draw(k * t * 2 * m),
                                  draw(k * t * 2 * n), kl);
    const fs::path dir = scratch.path / ("set" + std::to_string(i));
    save_container(set, dir);
    const LatentTrajectorySet back = load_container(dir);
    const bool bits =
        back == set &&
        std::memcmp(back.latent_data().data(), set.latent_data().data(), set.latent_data().size() * 8) == 0 &&
        std::memcmp(back.truth_data().data(), set.truth_data().data(), set.truth_data().size() * 8) == 0;
    if (bits) ++exact;
  }
  outcome.pass = exact == 20;
  outcome.detail = std::to_string(exact) + "/20 bit-exact round trips";

  const LatentTrajectorySet set(2, 3, 2, 2, 0.1, std::vector<double>(12, 1.5), std::vector<double>(12, 2.5));
  const fs::path dir = scratch.path / "corrupt";
  save_container(set, dir);
  const double nan = std::nan("");
  {
    std::fstream f(dir / "truth.f64", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.write(reinterpret_cast<const char*>(&nan), 8);
  }
  std::uint64_t offset = 0;
  bool rejected = false;
  try {
    (void)load_container(dir);
  } catch (const FormatError& e) {
    rejected = true;
    offset = e.offset();
  }
  fs::resize_file(dir / "truth.f64", 60);
  std::uint64_t truncated_offset = 0;
  bool truncated = false;
  try {
    (void)load_container(dir);
  } catch (const FormatError& e) {
    truncated = true;
    truncated_offset = e.offset();
  }
  outcome.pass = outcome.pass && rejected && offset == 40 && truncated && truncated_offset == 60;
  outcome.detail += "; NaN payload " + std::string(rejected ? "rejected at byte " + std::to_string(offset) : "accepted") +
                    "; truncated payload " +
                    (truncated ? "rejected at byte " + std::to_string(truncated_offset) : "accepted");
  return outcome;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "symetric");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  Scratch scratch("determinism");
  Outcome outcome;
  std::vector<std::string> reports;
  std::vector<std::string> containers;
  const fs::path truth = scratch.path / "truth";
  const fs::path latent = scratch.path / "latent";
  const fs::path report = scratch.path / "report.txt";
  for (const int threads : {1, 4, 8}) {
    const std::string t = std::to_string(threads);
    fs::remove_all(truth);
    fs::remove_all(latent);
    fs::remove(report);
    const int a = run_cli({"generate", "--dataset", "pendulum", "--k", "60", "--steps", "40", "--seed", "5",
                           "--threads", t, "--out", truth.string()});
    const int b = run_cli({"synth", "--in", truth.string(), "--transform", "linear-symplectic", "--embed-dim", "8",
                           "--seed", "5", "--threads", t, "--out", latent.string()});
    const int c = run_cli({"evaluate", "--in", latent.string(), "--seed", "5", "--threads", t, "--out",
                           report.string()});
    if (a != 0 || b != 0 || c != 0) {
      return {false, "command failed at " + t + " threads"};
    }
    reports.push_back(slurp(report));
    containers.push_back(slurp(latent / "latent.f64") + slurp(truth / "truth.f64"));
  }
  const bool same_reports = reports[0] == reports[1] && reports[0] == reports[2] && !reports[0].empty();
  const bool same_data = containers[0] == containers[1] && containers[0] == containers[2];
  outcome.pass = same_reports && same_data;
  outcome.detail = std::string("reports ") + (same_reports ? "identical" : "differ") + ", payloads " +
                   (same_data ? "identical" : "differ") + " across 1/4/8 threads (" +
                   std::to_string(reports[0].size()) + " bytes)";
  return outcome;
}

struct Criterion {
  const char* id;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"positive_discrimination", positive_discrimination},
      {"negative_discrimination", negative_discrimination},
      {"exact_map_sym_floor", exact_map_sym_floor},
      {"energy_conservation", energy_conservation},
      {"reversibility", reversibility},
      {"closed_form_oracle", closed_form_oracle},
      {"lasso_oracle", lasso_oracle},
      {"jacobian_oracles", jacobian_oracles},
      {"replicator_invariants", replicator_invariants},
      {"vpt", vpt_criterion},
      {"container", container},
      {"determinism", determinism},
  };

  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
  }

  int failures = 0;
  bool matched = false;
  for (const auto& criterion : criteria) {
    if (!only.empty() && only != criterion.id) continue;
    matched = true;
    Outcome outcome;
    try {
      outcome = criterion.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << criterion.id << ": " << outcome.detail << std::endl;
    if (!outcome.pass) ++failures;
  }
  if (!matched) {
    std::cerr << "unknown criterion: " << only << "\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
