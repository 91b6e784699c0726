#include "symetric/evaluate.hpp"

#include "symetric/errors.hpp"
#include "symetric/log.hpp"

#include <cmath>
#include <string>

namespace symetric {

std::string_view to_string(Method method) { return method == Method::PR ? "pr" : "mlp"; }

std::optional<Method> parse_method(std::string_view name) {
  if (name == "pr") return Method::PR;
  if (name == "mlp") return Method::MLP;
  return std::nullopt;
}

EvaluationReport evaluate(const LatentTrajectorySet& set, const EvaluateOptions& options) {
  options.sym.validate();
  if (set.latent_dim() == 0) throw Error(ErrorKind::InvalidDimension, "set has no latent trajectories to evaluate");
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "holdout fraction must lie in (0, 1)");
  }

  EvaluationReport report;
  report.method = std::string(to_string(options.method));
  report.alpha = options.sym.alpha;
  report.epsilon = options.sym.epsilon;
  report.samples = options.sym.samples;
  report.trajectories_per_sample = options.sym.trajectories_per_sample;
  report.points_per_trajectory = options.sym.points_per_trajectory;
  report.aggregation = options.sym.aggregation == SymAggregation::Mean ? "mean" : "max";
  report.constant = options.sym.constant == SymConstant::ClosedForm ? "closed-form" : "minimizing";
  report.sym_seed = options.sym.seed;
  report.latent_dim = set.latent_dim();
  report.truth_dim = set.truth_dim();

  const FilterResult filtered = filter_informative_dims(set, options.kl_threshold);
  report.kept_dims = filtered.kept;
  report.variance_fallback = filtered.used_variance_fallback;
  if (filtered.used_variance_fallback) report.diagnostics.push_back("no KL statistics; filtered by latent variance");
  const LatentTrajectorySet& data = filtered.set;

  const std::size_t k = data.trajectories();
  const auto heldout = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.holdout_fraction * static_cast<double>(k))));
  if (heldout + 2 > k) {
    throw Error(ErrorKind::InvalidParameter, "need at least 2 fitting trajectories plus a held-out one, got " +
                                                 std::to_string(k) + " trajectories");
  }
  const std::size_t train = k - heldout;
  report.trajectories = k;
  report.train_trajectories = train;
  report.heldout_trajectories = heldout;

  const Matrix train_latent = data.stacked_latent(0, train);
  const Matrix train_truth = data.stacked_truth(0, train);
  std::optional<LearnedMap> map;
  if (options.method == Method::PR) {
    const auto groups = trajectory_groups(train, data.steps());
    ProgressiveFit fit = progressive_polynomial_fit(train_latent, train_truth, options.pr, groups);
    report.order = fit.order;
    report.r2_by_order = fit.r2_by_order;
    report.r2_train = fit.r2;
    map.emplace(std::move(fit.map));
  } else {
    map.emplace(mlp_fit(train_latent, train_truth, options.mlp));
    report.r2_train = r_squared(map->evaluate_rows(train_latent), train_truth);
  }
  report.r2 = r_squared(map->evaluate_rows(data.stacked_latent(train, heldout)), data.stacked_truth(train, heldout));
  log::info("evaluate: {} fit, held-out R2 {}", report.method, report.r2);

  const SymResult sym = sym_score(*map, data, latent_structure(set.latent_dim(), filtered.kept), options.sym,
                                  options.threads);
  report.sym = sym.sym;
  report.sym_min = sym.min;
  report.sym_max = sym.max;
  report.sym_degenerate = sym.degenerate;
  for (const auto& sample : sym.samples) {
    report.sym_samples.push_back(sample.sym);
    report.c_values.insert(report.c_values.end(), sample.c.begin(), sample.c.end());
  }
  if (sym.degenerate) {
    report.diagnostics.push_back("degenerate map: max|AA^T| < 1e-12 on a sampled trajectory, c set to 1");
  }

  report.symetric = symetric(report.r2, report.sym, options.sym.alpha, options.sym.epsilon);
  if (filtered.kept.size() < set.truth_dim()) {
    report.symetric = 0;
    report.diagnostics.push_back("filtered latent has " + std::to_string(filtered.kept.size()) +
                                 " dims, fewer than the " + std::to_string(set.truth_dim()) +
                                 " ground-truth dims; SyMetric set to 0");
  }
  return report;
}

}  // namespace symetric
