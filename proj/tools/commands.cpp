#include "commands.hpp"

#include "symetric/errors.hpp"
#include "symetric/metrics.hpp"
#include "symetric/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace symetric::cli {

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot write " + path);
  file << text;
  if (!file) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::InvalidParameter, std::string("missing required ") + flag);
}

struct VptSummary {
  double forward = 0.0;
  std::optional<double> backward;
  std::optional<double> mse_reconstruction;
  std::optional<double> mse_extrapolation;
};

void check_pair(const LatentTrajectorySet& truth, const LatentTrajectorySet& pred) {
  if (truth.trajectories() != pred.trajectories() || truth.steps() != pred.steps() ||
      truth.truth_dim() != pred.truth_dim()) {
    throw Error(ErrorKind::InvalidDimension, "prediction container shape differs from the ground truth");
  }
}

double mean_vpt(const LatentTrajectorySet& truth, const LatentTrajectorySet& pred, double lambda) {
  check_pair(truth, pred);
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.trajectories(); ++k) {
    sum += static_cast<double>(vpt(truth.truth(k), pred.truth(k), lambda));
  }
  return sum / static_cast<double>(truth.trajectories());
}

VptSummary vpt_summary(const RunConfig& config) {
  require(config.in, "--in");
  require(config.pred, "--pred");
  const LatentTrajectorySet truth = load_container(config.in);
  const LatentTrajectorySet pred = load_container(config.pred);
  VptSummary s;
  s.forward = mean_vpt(truth, pred, config.lambda);
  if (!config.in_backward.empty() || !config.pred_backward.empty()) {
    require(config.in_backward, "--in-backward");
    require(config.pred_backward, "--pred-backward");
    s.backward = mean_vpt(load_container(config.in_backward), load_container(config.pred_backward), config.lambda);
  }
  const auto horizon = static_cast<std::size_t>(config.steps);
  const std::size_t frames = truth.steps();
  if (horizon + 1 <= frames) {
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.trajectories(); ++k) sum += reconstruction_mse(truth.truth(k), pred.truth(k), horizon);
    s.mse_reconstruction = sum / static_cast<double>(truth.trajectories());
  }
  if (horizon >= 1 && 2 * horizon + 1 <= frames) {
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.trajectories(); ++k) sum += extrapolation_mse(truth.truth(k), pred.truth(k), horizon);
    s.mse_extrapolation = sum / static_cast<double>(truth.trajectories());
  }
  return s;
}

std::string describe(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::DataRequirement: return "data requirement";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::InvalidDimension: return "invalid dimension";
    default: return e.is_numeric() ? "numeric failure" : "error";
  }
}

}  // namespace

ReportEntries config_entries(const RunConfig& c) {
  return {
      {"subcommand", c.subcommand},
      {"dataset", c.dataset},
      {"variant", c.variant},
      {"k", std::to_string(c.k)},
      {"steps", std::to_string(c.steps)},
      {"dt", c.dt ? format_double(*c.dt) : "default"},
      {"seed", std::to_string(c.seed)},
      {"method", c.method},
      {"kappa", std::to_string(c.kappa)},
      {"alpha", format_double(c.alpha)},
      {"epsilon", format_double(c.epsilon)},
      {"lambda", format_double(c.lambda)},
      {"kl_threshold", format_double(c.kl_threshold)},
      {"transform", c.transform},
      {"embed_dim", std::to_string(c.embed_dim)},
      {"scale", format_double(c.scale)},
      {"exponent", format_double(c.exponent)},
      {"noise", format_double(c.noise)},
      {"allow_insufficient_data", c.allow_insufficient_data ? "1" : "0"},
      {"in", c.in},
      {"pred", c.pred},
      {"in_backward", c.in_backward},
      {"pred_backward", c.pred_backward},
  };
}

DatasetSpec dataset_spec(const RunConfig& config) {
  DatasetSpec spec;
  std::string name = config.dataset;
  spec.variant = parse_variant(config.variant);
  if (name.size() > 2 && name.ends_with("+c")) {
    name.resize(name.size() - 2);
    spec.variant = Variant::Colored;
  }
  if (name == "n-body" || name == "nbody") name = "two-body";
  spec.dataset = parse_dataset_kind(name);
  if (config.k < 1) throw Error(ErrorKind::InvalidParameter, "--k must be at least 1");
  if (config.steps < 1) throw Error(ErrorKind::InvalidParameter, "--steps must be at least 1");
  if (config.dt && !(*config.dt > 0.0)) throw Error(ErrorKind::InvalidParameter, "--dt must be positive");
  spec.trajectories = config.k;
  spec.steps = config.steps;
  spec.dt = config.dt;
  spec.seed = config.seed;
  return spec;
}

EvaluateOptions evaluate_options(const RunConfig& config) {
  EvaluateOptions options;
  const auto method = parse_method(config.method);
  if (!method) throw Error(ErrorKind::InvalidParameter, "unknown method '" + config.method + "' (pr or mlp)");
  options.method = *method;
  options.kl_threshold = config.kl_threshold;
  options.pr.kappa = config.kappa;
  options.pr.r2_threshold = config.alpha;
  options.mlp.seed = config.seed;
  options.mlp.allow_insufficient_data = config.allow_insufficient_data;
  options.sym.alpha = config.alpha;
  options.sym.epsilon = config.epsilon;
  options.sym.seed = config.seed;
  options.threads = config.threads;
  return options;
}

LatentTrajectorySet cmd_generate(const RunConfig& config) {
  LatentTrajectorySet set = generate_dataset(dataset_spec(config), config.threads);
  if (!config.out.empty()) save_container(set, config.out);
  return set;
}

LatentTrajectorySet cmd_synth(const RunConfig& config) {
  const auto kind = parse_transform(config.transform);
  if (!kind) {
    throw Error(ErrorKind::InvalidParameter, "unknown transform '" + config.transform +
                                                 "' (identity, scale, action-angle, linear-symplectic, embed, "
                                                 "distort, noise)");
  }
  const LatentTrajectorySet truth =
      config.in.empty() ? generate_dataset(dataset_spec(config), config.threads) : load_container(config.in);
  SyntheticTransform transform;
  transform.kind = *kind;
  transform.embed_dim = config.embed_dim;
  transform.scale = config.scale;
  transform.exponent = config.exponent;
  transform.noise_level = config.noise;
  transform.seed = config.seed;
  LatentTrajectorySet set = apply_transform(transform, truth);
  if (!config.out.empty()) save_container(set, config.out);
  return set;
}

EvaluationReport cmd_evaluate(const RunConfig& config) {
  require(config.in, "--in");
  EvaluationReport report = evaluate(load_container(config.in), evaluate_options(config));
  if (!config.pred.empty()) {
    const VptSummary s = vpt_summary(config);
    report.vpt_forward = s.forward;
    report.vpt_backward = s.backward;
    report.vpt_mean = s.backward ? 0.5 * (s.forward + *s.backward) : s.forward;
    report.mse_reconstruction = s.mse_reconstruction;
    report.mse_extrapolation = s.mse_extrapolation;
  }
  report.config = config_entries(config);
  if (!config.out.empty()) write_file(config.out, render_text(report));
  return report;
}

ReportEntries cmd_vpt(const RunConfig& config) {
  const VptSummary s = vpt_summary(config);
  ReportEntries entries;
  entries.emplace_back("lambda", format_double(config.lambda));
  entries.emplace_back("vpt_forward", format_double(s.forward));
  if (s.backward) {
    entries.emplace_back("vpt_backward", format_double(*s.backward));
    entries.emplace_back("vpt_mean", format_double(0.5 * (s.forward + *s.backward)));
  } else {
    entries.emplace_back("vpt_mean", format_double(s.forward));
  }
  if (s.mse_reconstruction) entries.emplace_back("mse_reconstruction", format_double(*s.mse_reconstruction));
  if (s.mse_extrapolation) entries.emplace_back("mse_extrapolation", format_double(*s.mse_extrapolation));
  for (const auto& [k, v] : config_entries(config)) entries.emplace_back("config." + k, v);
  if (!config.out.empty()) write_file(config.out, render_text(entries));
  return entries;
}

std::string cmd_report(const RunConfig& config) {
  require(config.in, "--in");
  const ReportEntries entries = parse_text(read_file(config.in));
  if (!config.out.empty()) write_file(config.out, render_csv(entries));
  return render_summary(entries);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Hamiltonian trajectory generation and latent-dynamics evaluation"};
  app.require_subcommand(1);

  auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", config.dataset,
                    "mass-spring, pendulum, double-pendulum, two-body, matching-pennies, rock-paper-scissors, lj-4, "
                    "lj-16 (optional +c suffix)");
    sub->add_option("--variant", config.variant, "fixed or colored");
    sub->add_option("--k", config.k, "number of trajectories");
    sub->add_option("--steps", config.steps, "steps per trajectory (T)");
    sub->add_option("--dt", config.dt, "time step (per-dataset default)");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", config.out, "output path");
  };

  auto* generate = app.add_subcommand("generate", "write ground-truth trajectories as an HTRJ1 container");
  add_dataset(generate);
  add_common(generate);

  auto* synth = app.add_subcommand("synth", "build a synthetic latent container from ground truth");
  add_dataset(synth);
  add_common(synth);
  synth->add_option("--in", config.in, "ground-truth container (generated from --dataset when omitted)");
  synth->add_option("--transform", config.transform,
                    "identity, scale, action-angle, linear-symplectic, embed, distort, noise");
  synth->add_option("--embed-dim", config.embed_dim, "pad the latent to this width");
  synth->add_option("--scale", config.scale, "factor for the scale transform");
  synth->add_option("--exponent", config.exponent, "momentum power for distort");
  synth->add_option("--noise", config.noise, "noise standard deviation");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "fit F and compute R2, Sym and SyMetric");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--in", config.in, "latent container")->required();
  evaluate_cmd->add_option("--method", config.method, "pr or mlp");
  evaluate_cmd->add_option("--kappa", config.kappa, "highest polynomial order");
  evaluate_cmd->add_option("--alpha", config.alpha, "R2 threshold");
  evaluate_cmd->add_option("--epsilon", config.epsilon, "Sym threshold");
  evaluate_cmd->add_option("--lambda", config.lambda, "VPT threshold");
  evaluate_cmd->add_option("--kl-threshold", config.kl_threshold, "informative-dimension threshold");
  evaluate_cmd->add_flag("--allow-insufficient-data", config.allow_insufficient_data,
                         "train the MLP below the data-ratio requirement");
  evaluate_cmd->add_option("--steps", config.steps, "reconstruction horizon T for the MSE windows");
  evaluate_cmd->add_option("--pred", config.pred, "predicted trajectories (forward) for VPT and MSE");
  evaluate_cmd->add_option("--in-backward", config.in_backward, "ground truth of the backward rollout");
  evaluate_cmd->add_option("--pred-backward", config.pred_backward, "predicted backward rollout");

  auto* vpt_cmd = app.add_subcommand("vpt", "valid prediction time and normalized MSE");
  add_common(vpt_cmd);
  vpt_cmd->add_option("--in", config.in, "ground-truth container")->required();
  vpt_cmd->add_option("--pred", config.pred, "predicted container")->required();
  vpt_cmd->add_option("--in-backward", config.in_backward, "ground truth of the backward rollout");
  vpt_cmd->add_option("--pred-backward", config.pred_backward, "predicted backward rollout");
  vpt_cmd->add_option("--lambda", config.lambda, "VPT threshold");
  vpt_cmd->add_option("--steps", config.steps, "reconstruction horizon T for the MSE windows");

  auto* report_cmd = app.add_subcommand("report", "render a report as CSV plus a text summary");
  report_cmd->add_option("--in", config.in, "report file")->required();
  report_cmd->add_option("--out", config.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      config.subcommand = "generate";
      const auto set = cmd_generate(config);
      out << "wrote " << set.trajectories() << " x " << set.steps() << " x " << set.truth_dim() << " to "
          << (config.out.empty() ? "(nowhere, no --out)" : config.out) << "\n";
    } else if (synth->parsed()) {
      config.subcommand = "synth";
      const auto set = cmd_synth(config);
      out << "wrote latent " << set.latent_dim() << " / truth " << set.truth_dim() << " to "
          << (config.out.empty() ? "(nowhere, no --out)" : config.out) << "\n";
    } else if (evaluate_cmd->parsed()) {
      config.subcommand = "evaluate";
      out << render_summary(report_entries(cmd_evaluate(config)));
    } else if (vpt_cmd->parsed()) {
      config.subcommand = "vpt";
      out << render_text(cmd_vpt(config));
    } else if (report_cmd->parsed()) {
      config.subcommand = "report";
      out << cmd_report(config);
    }
  } catch (const Error& e) {
    err << "error (" << describe(e) << "): " << e.what() << "\n";
    return e.is_numeric() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace symetric::cli
