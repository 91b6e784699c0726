#include "symetric/errors.hpp"
#include "symetric/ingest.hpp"
#include "test_util.hpp"

#include <fstream>
#include <random>

using namespace symetric;

namespace {

LatentTrajectorySet random_set(std::size_t k, std::size_t t, std::size_t m, std::size_t n, bool kl, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> latent(k * (t + 1) * 2 * m), truth(k * (t + 1) * 2 * n);
  for (auto& v : latent) v = normal(rng);
  for (auto& v : truth) v = normal(rng);
  std::optional<std::vector<double>> stats;
  if (kl) {
    stats.emplace(2 * m);
    for (auto& v : *stats) v = std::abs(normal(rng));
  }
  return LatentTrajectorySet(k, t + 1, 2 * m, 2 * n, 0.125, latent, truth, stats);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("LatentTrajectorySet validation") {
  CHECK_THROWS_AS(LatentTrajectorySet(1, 2, 2, 2, 0.1, std::vector<double>(3), std::vector<double>(4)), Error);
  CHECK_THROWS_AS(LatentTrajectorySet(1, 2, 2, 3, 0.1, std::vector<double>(4), std::vector<double>(6)), Error);
  CHECK_THROWS_AS(LatentTrajectorySet(1, 2, 2, 2, 0.0, std::vector<double>(4), std::vector<double>(4)), Error);
  CHECK_THROWS_AS(
      LatentTrajectorySet(1, 2, 2, 2, 0.1, std::vector<double>(4), std::vector<double>(4), std::vector<double>(3)),
      Error);
  const LatentTrajectorySet ok(1, 2, 2, 2, 0.1, {1, 2, 3, 4}, {5, 6, 7, 8});
  CHECK(ok.latent(0)(1, 0) == 3);
  CHECK(ok.truth(0)(1, 1) == 8);
}

TEST_CASE("container round trip is bit exact") {
  testutil::TempDir dir("roundtrip");
  Rng rng = make_rng(12);
  for (int i = 0; i < 20; ++i) {
    const std::size_t k = 1 + i % 4, t = 1 + i % 5, m = 1 + i % 3, n = 1 + (i / 3) % 3;
    const auto set = random_set(k, t, m, n, i % 2 == 0, rng);
    const auto path = dir.path / std::to_string(i);
    save_container(set, path);
    const auto loaded = load_container(path);
    CHECK(loaded == set);
    const auto again = dir.path / (std::to_string(i) + "b");
    save_container(loaded, again);
    CHECK(slurp(path / "latent.f64") == slurp(again / "latent.f64"));
    CHECK(slurp(path / "truth.f64") == slurp(again / "truth.f64"));
    CHECK(slurp(path / "manifest") == slurp(again / "manifest"));
  }
}

TEST_CASE("container layout") {
  testutil::TempDir dir("layout");
  const LatentTrajectorySet set(1, 2, 2, 2, 0.125, {1, 2, 3, 4}, {-1, 0.5, 0, 2});
  save_container(set, dir.path);
  CHECK(slurp(dir.path / "manifest") == "magic=HTRJ1\nK=1\nT=1\nm=1\nn=1\ndt=0.125\nhas_kl=0\n");
  const std::string latent = slurp(dir.path / "latent.f64");
  REQUIRE(latent.size() == 32);
  // 1.0 = 0x3FF0000000000000, little-endian.
  CHECK(static_cast<unsigned char>(latent[6]) == 0xF0);
  CHECK(static_cast<unsigned char>(latent[7]) == 0x3F);
  CHECK_FALSE(std::filesystem::exists(dir.path / "kl.f64"));
  CHECK_FALSE(load_container(dir.path).kl_per_dim().has_value());
}

TEST_CASE("container errors carry byte offsets") {
  testutil::TempDir dir("errors");
  Rng rng = make_rng(13);
  const auto set = random_set(2, 3, 3, 1, true, rng);

  SUBCASE("payload size mismatch") {
    save_container(set, dir.path);
    std::filesystem::resize_file(dir.path / "latent.f64", 100);
    try {
      load_container(dir.path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 100);
      CHECK(std::string(e.what()).find("@ byte 100") != std::string::npos);
    }
  }
  SUBCASE("manifest declaring the wrong width") {
    save_container(set, dir.path);
    std::string manifest = slurp(dir.path / "manifest");
    manifest.replace(manifest.find("m=3"), 3, "m=2");
    std::ofstream(dir.path / "manifest", std::ios::binary) << manifest;
    CHECK_THROWS_AS(load_container(dir.path), FormatError);
  }
  SUBCASE("corrupted value") {
    save_container(set, dir.path);
    std::fstream f(dir.path / "truth.f64", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(5 * 8 + 6);
    const char nan_bytes[2] = {static_cast<char>(0xF8), static_cast<char>(0x7F)};
    f.write(nan_bytes, 2);
    f.close();
    try {
      load_container(dir.path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 40);
    }
  }
  SUBCASE("magic mismatch") {
    save_container(set, dir.path);
    std::string manifest = slurp(dir.path / "manifest");
    manifest.replace(0, 11, "magic=HTRJ2");
    std::ofstream(dir.path / "manifest", std::ios::binary) << manifest;
    try {
      load_container(dir.path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 0);
    }
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(load_container(dir.path / "nope"), Error); }
}

TEST_CASE("filter_informative_dims") {
  const LatentTrajectorySet set(1, 3, 4, 2, 0.1, {1, 5, 0, 2, 2, 5, 0, 4, 3, 5, 0, 6}, {0, 1, 1, 0, 2, 1},
                                std::vector<double>{1.0, 0.001, 0.5, 0.02});
  const FilterResult r = filter_informative_dims(set);
  CHECK(r.kept == std::vector<std::size_t>{0, 2, 3});
  CHECK(r.set.latent_dim() == 3);
  CHECK(r.set.latent(0)(2, 2) == 6);
  CHECK_FALSE(r.used_variance_fallback);

  SUBCASE("idempotent") {
    const FilterResult again = filter_informative_dims(r.set);
    CHECK(again.set == r.set);
  }
  SUBCASE("variance fallback drops constant dims") {
    const auto no_kl = set.with_latent(4, set.latent_data(), std::nullopt);
    const FilterResult v = filter_informative_dims(no_kl);
    CHECK(v.used_variance_fallback);
    CHECK(v.kept == std::vector<std::size_t>{0, 3});
    CHECK(filter_informative_dims(v.set).set == v.set);
  }
  SUBCASE("nothing informative") {
    const auto dead = set.with_latent(4, set.latent_data(), std::vector<double>{0, 0, 0, 0});
    try {
      filter_informative_dims(dead);
      FAIL("expected degenerate latent");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateLatent);
    }
  }
}
