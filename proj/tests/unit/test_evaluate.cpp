#include "symetric/dataset.hpp"
#include "symetric/errors.hpp"
#include "symetric/evaluate.hpp"
#include "symetric/synth.hpp"
#include "test_util.hpp"

using namespace symetric;

namespace {

LatentTrajectorySet spring_truth() {
  DatasetSpec spec;
  spec.trajectories = 100;
  spec.seed = 2;
  return generate_dataset(spec);
}

EvaluationReport run(TransformKind kind, std::size_t embed = 0) {
  SyntheticTransform t;
  t.kind = kind;
  t.embed_dim = embed;
  t.seed = 1;
  return evaluate(apply_transform(t, spring_truth()));
}

}  // namespace

TEST_CASE("evaluate: exact ground-truth copy") {
  const EvaluationReport r = run(TransformKind::Identity);
  CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.sym < 1e-6);
  CHECK(r.symetric == 1);
  CHECK(r.order == 1);
  CHECK(r.train_trajectories == 80);
  CHECK(r.heldout_trajectories == 20);
  CHECK(r.sym_samples.size() == 20);
  CHECK(r.c_values.size() == 100);
}

TEST_CASE("evaluate: embedded latents are filtered back to the signal") {
  const EvaluationReport r = run(TransformKind::RandomLinearSymplectic, 32);
  CHECK(r.kept_dims.size() == 2);
  CHECK(r.symetric == 1);
}

TEST_CASE("evaluate: momentum cubing is informative but not symplectic") {
  const EvaluationReport r = run(TransformKind::NonSymplecticDistort);
  CHECK(r.r2 > 0.9);
  CHECK(r.sym > 0.05);
  CHECK(r.symetric == 0);
}

TEST_CASE("evaluate: noise carries no information") {
  const EvaluationReport r = run(TransformKind::PureNoise);
  CHECK(r.r2 < 0.1);
  CHECK(r.symetric == 0);
}

TEST_CASE("evaluate: too few informative dims forces SyMetric to 0") {
  const auto truth = spring_truth();
  SyntheticTransform t;
  const auto base = apply_transform(t, truth);
  const auto one_dim = base.with_latent(2, base.latent_data(), std::vector<double>{1.0, 1e-4});
  const EvaluationReport r = evaluate(one_dim);
  CHECK(r.kept_dims == std::vector<std::size_t>{0});
  CHECK(r.symetric == 0);
  CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("evaluate: MLP data requirement") {
  EvaluateOptions options;
  options.method = Method::MLP;
  try {
    evaluate(apply_transform({}, spring_truth()), options);
    FAIL("expected data requirement");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DataRequirement);
  }
}

TEST_CASE("evaluate: invalid inputs") {
  CHECK_THROWS_AS(evaluate(spring_truth()), Error);
  EvaluateOptions options;
  options.sym.epsilon = 0.0;
  CHECK_THROWS_AS(evaluate(apply_transform({}, spring_truth()), options), Error);
}

TEST_CASE("report text round trip") {
  EvaluationReport r = run(TransformKind::UniformScale);
  r.config = {{"seed", "1"}};
  r.vpt_forward = 12.0;
  const std::string text = render_text(r);
  CHECK(text.rfind("# symetric-report/1\n", 0) == 0);
  const ReportEntries entries = parse_text(text);
  CHECK(entries == report_entries(r));
  CHECK(render_text(entries) == text);
  const std::string csv = render_csv(entries);
  CHECK(csv.rfind("key,value\n", 0) == 0);
  CHECK(csv.find("\"[") != std::string::npos);
  CHECK(render_summary(entries).find("SyMetric    1") != std::string::npos);
  CHECK_THROWS_AS(parse_text("no header\n"), FormatError);
}
