#include "symetric/report.hpp"

#include "symetric/errors.hpp"
#include "symetric/ingest.hpp"

#include <sstream>

namespace symetric {

namespace {

template <typename T, typename Fmt>
std::string inline_array(const std::vector<T>& values, Fmt fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out + "]";
}

std::string doubles(const std::vector<double>& v) { return inline_array(v, format_double); }

std::string sizes(const std::vector<std::size_t>& v) {
  return inline_array(v, [](std::size_t x) { return std::to_string(x); });
}

const std::string* find(const ReportEntries& entries, std::string_view key) {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ReportEntries report_entries(const EvaluationReport& r) {
  ReportEntries e;
  auto add = [&](std::string key, std::string value) { e.emplace_back(std::move(key), std::move(value)); };
  add("method", r.method);
  add("r2", format_double(r.r2));
  add("r2_train", format_double(r.r2_train));
  add("order", std::to_string(r.order));
  add("r2_by_order", doubles(r.r2_by_order));
  add("sym", format_double(r.sym));
  add("sym_min", format_double(r.sym_min));
  add("sym_max", format_double(r.sym_max));
  add("sym_samples", doubles(r.sym_samples));
  add("c_values", doubles(r.c_values));
  add("sym_degenerate", r.sym_degenerate ? "1" : "0");
  add("symetric", std::to_string(r.symetric));
  add("alpha", format_double(r.alpha));
  add("epsilon", format_double(r.epsilon));
  add("trajectories", std::to_string(r.trajectories));
  add("train_trajectories", std::to_string(r.train_trajectories));
  add("heldout_trajectories", std::to_string(r.heldout_trajectories));
  add("latent_dim", std::to_string(r.latent_dim));
  add("truth_dim", std::to_string(r.truth_dim));
  add("kept_dims", sizes(r.kept_dims));
  add("variance_fallback", r.variance_fallback ? "1" : "0");
  add("sampling.samples", std::to_string(r.samples));
  add("sampling.trajectories_per_sample", std::to_string(r.trajectories_per_sample));
  add("sampling.points_per_trajectory", std::to_string(r.points_per_trajectory));
  add("sampling.aggregation", r.aggregation);
  add("sampling.constant", r.constant);
  add("sampling.seed", std::to_string(r.sym_seed));
  if (r.vpt_forward) add("vpt_forward", format_double(*r.vpt_forward));
  if (r.vpt_backward) add("vpt_backward", format_double(*r.vpt_backward));
  if (r.vpt_mean) add("vpt_mean", format_double(*r.vpt_mean));
  if (r.mse_reconstruction) add("mse_reconstruction", format_double(*r.mse_reconstruction));
  if (r.mse_extrapolation) add("mse_extrapolation", format_double(*r.mse_extrapolation));
  for (std::size_t i = 0; i < r.diagnostics.size(); ++i) add("diagnostic." + std::to_string(i), r.diagnostics[i]);
  for (const auto& [k, v] : r.config) add("config." + k, v);
  return e;
}

std::string render_text(const ReportEntries& entries) {
  std::string out = "# ";
  out += kReportSchema;
  out += '\n';
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

std::string render_text(const EvaluationReport& report) { return render_text(report_entries(report)); }

ReportEntries parse_text(std::string_view text) {
  ReportEntries entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::uint64_t offset = 0;
  bool header = false;
  while (std::getline(in, line)) {
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (!header) {
      if (line != "# " + std::string(kReportSchema)) {
        throw FormatError("report", 0, "expected header '# " + std::string(kReportSchema) + "'");
      }
      header = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos || eq == 0) throw FormatError("report", line_offset, "expected 'key = value'");
    entries.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  if (!header) throw FormatError("report", 0, "empty report");
  return entries;
}

std::string render_csv(const ReportEntries& entries) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : entries) out += csv_field(k) + "," + csv_field(v) + "\n";
  return out;
}

std::string render_summary(const ReportEntries& entries) {
  auto get = [&](std::string_view key) {
    const std::string* v = find(entries, key);
    return v ? *v : std::string("n/a");
  };
  std::ostringstream out;
  out << "method      " << get("method") << "  (order " << get("order") << ")\n";
  out << "R2          " << get("r2") << "  (alpha " << get("alpha") << ")\n";
  out << "Sym         " << get("sym") << "  (epsilon " << get("epsilon") << ", range " << get("sym_min") << " .. "
      << get("sym_max") << ")\n";
  out << "SyMetric    " << get("symetric") << "\n";
  out << "latent dims " << get("kept_dims") << " of " << get("latent_dim") << ", truth " << get("truth_dim") << "\n";
  if (find(entries, "vpt_mean")) out << "VPT         " << get("vpt_mean") << "\n";
  for (const auto& [k, v] : entries) {
    if (k.rfind("diagnostic.", 0) == 0) out << "note        " << v << "\n";
  }
  return out.str();
}

}  // namespace symetric
