#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symetric {

inline constexpr std::string_view kReportSchema = "symetric-report/1";

struct EvaluationReport {
  std::string method;
  /// R² on the held-out trajectories and on the fitted ones.
  double r2 = 0.0;
  double r2_train = 0.0;
  /// Polynomial order reached (0 for the MLP).
  int order = 0;
  std::vector<double> r2_by_order;

  double sym = 0.0;
  double sym_min = 0.0;
  double sym_max = 0.0;
  std::vector<double> sym_samples;
  /// Normalization constants, sample-major, one per sampled trajectory.
  std::vector<double> c_values;
  bool sym_degenerate = false;

  int symetric = 0;
  double alpha = 0.0;
  double epsilon = 0.0;

  std::size_t trajectories = 0;
  std::size_t train_trajectories = 0;
  std::size_t heldout_trajectories = 0;
  std::size_t latent_dim = 0;
  std::size_t truth_dim = 0;
  std::vector<std::size_t> kept_dims;
  bool variance_fallback = false;

  int samples = 0;
  int trajectories_per_sample = 0;
  int points_per_trajectory = 0;
  std::string aggregation;
  std::string constant;
  unsigned long long sym_seed = 0;

  std::optional<double> vpt_forward;
  std::optional<double> vpt_backward;
  std::optional<double> vpt_mean;
  std::optional<double> mse_reconstruction;
  std::optional<double> mse_extrapolation;

  std::vector<std::string> diagnostics;
  /// Run configuration echo, written under "config.".
  std::vector<std::pair<std::string, std::string>> config;
};

using ReportEntries = std::vector<std::pair<std::string, std::string>>;

ReportEntries report_entries(const EvaluationReport& report);

/// "key = value" lines under a schema header; arrays inline as [a, b].
std::string render_text(const ReportEntries& entries);
std::string render_text(const EvaluationReport& report);
ReportEntries parse_text(std::string_view text);

/// Two-column key,value CSV.
std::string render_csv(const ReportEntries& entries);
/// Short human-readable summary.
std::string render_summary(const ReportEntries& entries);

}  // namespace symetric
