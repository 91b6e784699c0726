#pragma once

#include "symetric/ingest.hpp"
#include "symetric/maplearn.hpp"
#include "symetric/metrics.hpp"
#include "symetric/report.hpp"

#include <optional>
#include <string_view>

namespace symetric {

enum class Method { PR, MLP };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

struct EvaluateOptions {
  Method method = Method::PR;
  double kl_threshold = kDefaultKlThreshold;
  /// Trailing share of trajectories kept out of the fit and used for R².
  double holdout_fraction = 0.2;
  ProgressiveOptions pr;
  MlpConfig mlp;
  SymConfig sym;
  int threads = 1;
};

/// Filter informative dims, fit F on the leading trajectories, R² on the
/// held-out ones, then Sym and SyMetric.
EvaluationReport evaluate(const LatentTrajectorySet& set, const EvaluateOptions& options = {});

}  // namespace symetric
