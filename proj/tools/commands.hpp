#pragma once

#include "symetric/dataset.hpp"
#include "symetric/evaluate.hpp"
#include "symetric/ingest.hpp"
#include "symetric/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace symetric::cli {

/// Everything a run depends on. Serialized into every report, except the
/// thread count and the output path, which do not affect results.
struct RunConfig {
  std::string subcommand;
  std::string dataset = "mass-spring";
  std::string variant = "fixed";
  std::size_t k = 100;
  int steps = 60;
  std::optional<double> dt;
  std::uint64_t seed = 0;
  std::string method = "pr";
  int kappa = 5;
  double alpha = 0.9;
  double epsilon = 0.05;
  double lambda = 0.025;
  double kl_threshold = kDefaultKlThreshold;
  std::string transform = "identity";
  std::size_t embed_dim = 0;
  double scale = 2.0;
  double exponent = 3.0;
  double noise = 1.0;
  bool allow_insufficient_data = false;
  int threads = 1;
  std::string in;
  std::string pred;
  std::string in_backward;
  std::string pred_backward;
  std::string out;
};

ReportEntries config_entries(const RunConfig& config);

DatasetSpec dataset_spec(const RunConfig& config);
EvaluateOptions evaluate_options(const RunConfig& config);

/// Each command writes to config.out when it is set and returns its result.
LatentTrajectorySet cmd_generate(const RunConfig& config);
LatentTrajectorySet cmd_synth(const RunConfig& config);
EvaluationReport cmd_evaluate(const RunConfig& config);
ReportEntries cmd_vpt(const RunConfig& config);
/// Reads the report at config.in; writes CSV to config.out and returns the summary.
std::string cmd_report(const RunConfig& config);

/// Full command line; returns the process exit code (0 ok, 1 invalid input,
/// 2 numeric failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symetric::cli
