#include "symetric/ingest.hpp"

#include "symetric/errors.hpp"
#include "symetric/log.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace symetric {

LatentTrajectorySet::LatentTrajectorySet(std::size_t trajectories, std::size_t steps, std::size_t latent_dim,
                                         std::size_t truth_dim, double dt, std::vector<double> latent,
                                         std::vector<double> truth, std::optional<std::vector<double>> kl_per_dim)
    : trajectories_(trajectories),
      steps_(steps),
      latent_dim_(latent_dim),
      truth_dim_(truth_dim),
      dt_(dt),
      latent_(std::move(latent)),
      truth_(std::move(truth)),
      kl_(std::move(kl_per_dim)) {
  if (trajectories_ < 1) throw Error(ErrorKind::InvalidDimension, "set needs at least one trajectory");
  if (steps_ < 2) throw Error(ErrorKind::InvalidDimension, "trajectories need at least two steps");
  if (truth_dim_ < 2 || truth_dim_ % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "truth dimension must be even and positive");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (latent_.size() != trajectories_ * steps_ * latent_dim_) {
    throw Error(ErrorKind::InvalidDimension, "latent payload size does not match K × (T+1) × 2m");
  }
  if (truth_.size() != trajectories_ * steps_ * truth_dim_) {
    throw Error(ErrorKind::InvalidDimension, "truth payload size does not match K × (T+1) × 2n");
  }
  if (kl_ && kl_->size() != latent_dim_) {
    throw Error(ErrorKind::InvalidDimension, "KL statistics must have one entry per latent dimension");
  }
}

ConstRowMap LatentTrajectorySet::latent(std::size_t trajectory) const {
  const auto rows = static_cast<Eigen::Index>(steps_);
  return ConstRowMap(latent_.data() + trajectory * steps_ * latent_dim_, rows,
                     static_cast<Eigen::Index>(latent_dim_));
}

ConstRowMap LatentTrajectorySet::truth(std::size_t trajectory) const {
  const auto rows = static_cast<Eigen::Index>(steps_);
  return ConstRowMap(truth_.data() + trajectory * steps_ * truth_dim_, rows, static_cast<Eigen::Index>(truth_dim_));
}

Matrix LatentTrajectorySet::stacked_latent(std::size_t first, std::size_t count) const {
  const auto rows = static_cast<Eigen::Index>(count * steps_);
  return ConstRowMap(latent_.data() + first * steps_ * latent_dim_, rows, static_cast<Eigen::Index>(latent_dim_));
}

Matrix LatentTrajectorySet::stacked_truth(std::size_t first, std::size_t count) const {
  const auto rows = static_cast<Eigen::Index>(count * steps_);
  return ConstRowMap(truth_.data() + first * steps_ * truth_dim_, rows, static_cast<Eigen::Index>(truth_dim_));
}

LatentTrajectorySet LatentTrajectorySet::with_latent(std::size_t latent_dim, std::vector<double> latent,
                                                     std::optional<std::vector<double>> kl_per_dim) const {
  return LatentTrajectorySet(trajectories_, steps_, latent_dim, truth_dim_, dt_, std::move(latent), truth_,
                             std::move(kl_per_dim));
}

FilterResult filter_informative_dims(const LatentTrajectorySet& set, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidParameter, "filter threshold must be positive");
  const std::size_t dims = set.latent_dim();
  std::vector<double> score(dims);
  const bool fallback = !set.kl_per_dim().has_value();
  if (fallback) {
    const Matrix all = set.stacked_latent(0, set.trajectories());
    for (std::size_t d = 0; d < dims; ++d) {
      const auto col = all.col(static_cast<Eigen::Index>(d));
      const double mean = col.mean();
      score[d] = (col.array() - mean).square().mean();
    }
  } else {
    score = *set.kl_per_dim();
  }

  std::vector<std::size_t> kept;
  for (std::size_t d = 0; d < dims; ++d) {
    if (score[d] >= threshold) kept.push_back(d);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::DegenerateLatent, "every latent dimension is below the informativeness threshold");
  }
  if (kept.size() == dims) return {set, kept, fallback};

  std::vector<double> latent;
  latent.reserve(set.trajectories() * set.steps() * kept.size());
  const auto& src = set.latent_data();
  for (std::size_t row = 0; row < set.trajectories() * set.steps(); ++row) {
    for (std::size_t d : kept) latent.push_back(src[row * dims + d]);
  }
  std::optional<std::vector<double>> kl;
  if (!fallback) {
    kl.emplace();
    for (std::size_t d : kept) kl->push_back((*set.kl_per_dim())[d]);
  }
  log::debug("kept {} of {} latent dimensions", kept.size(), dims);

  return {set.with_latent(kept.size(), std::move(latent), std::move(kl)), kept, fallback};
}

// Binary payloads -------------------------------------------------------------

namespace binary {

void write_f64(const std::filesystem::path& file, const std::vector<double>& values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + file.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + file.string());
}

std::vector<double> read_f64(const std::filesystem::path& file, std::size_t count) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "payload file missing or unreadable");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::uint64_t expected = static_cast<std::uint64_t>(count) * 8;
  if (bytes.size() < expected) {
    throw FormatError(file.string(), bytes.size(),
                      "truncated payload: expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw FormatError(file.string(), expected,
                      "payload longer than declared: expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size()));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(values[i])) throw FormatError(file.string(), i * 8, "non-finite value in payload");
  }
  return values;
}

}  // namespace binary

// Manifest ------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorKind::Numeric, "cannot format double");
  return std::string(buf, end);
}

void Manifest::set(std::string key, std::string value) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  entries_.push_back({std::move(key), std::move(value), 0});
}

bool Manifest::has(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return true;
  }
  return false;
}

const Manifest::Entry& Manifest::entry(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return e;
  }
  std::uint64_t end = 0;
  if (!entries_.empty()) end = entries_.back().offset + entries_.back().key.size() + entries_.back().value.size() + 2;
  throw FormatError(file_, end, "missing manifest key '" + std::string(key) + "'");
}

const std::string& Manifest::get(std::string_view key) const { return entry(key).value; }

std::size_t Manifest::get_size(std::string_view key) const {
  const Entry& e = entry(key);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), value);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw FormatError(file_, e.offset + e.key.size() + 1, "'" + e.key + "' is not a non-negative integer");
  }
  return value;
}

double Manifest::get_double(std::string_view key) const {
  const Entry& e = entry(key);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), value);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw FormatError(file_, e.offset + e.key.size() + 1, "'" + e.key + "' is not a number");
  }
  return value;
}

void Manifest::write(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + file.string() + " for writing");
  for (const auto& e : entries_) out << e.key << '=' << e.value << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + file.string());
}

Manifest Manifest::read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file.string(), 0, "manifest missing or unreadable");
  Manifest m;
  m.file_ = file.string();
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw FormatError(m.file_, line_offset, "expected key=value");
    m.entries_.push_back({line.substr(0, eq), line.substr(eq + 1), line_offset});
  }
  return m;
}

// Container -----------------------------------------------------------------

void save_container(const LatentTrajectorySet& set, const std::filesystem::path& dir) {
  if (set.latent_dim() % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "containers store an even latent width 2m");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.set("magic", std::string(kContainerMagic));
  manifest.set("K", std::to_string(set.trajectories()));
  manifest.set("T", std::to_string(set.steps() - 1));
  manifest.set("m", std::to_string(set.latent_dim() / 2));
  manifest.set("n", std::to_string(set.truth_dim() / 2));
  manifest.set("dt", format_double(set.dt()));
  manifest.set("has_kl", set.kl_per_dim() ? "1" : "0");
  manifest.write(dir / "manifest");

  if (set.latent_dim() > 0) binary::write_f64(dir / "latent.f64", set.latent_data());
  binary::write_f64(dir / "truth.f64", set.truth_data());
  if (set.kl_per_dim()) binary::write_f64(dir / "kl.f64", *set.kl_per_dim());
}

LatentTrajectorySet load_container(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest";
  const Manifest manifest = Manifest::read(manifest_path);
  if (manifest.get("magic") != kContainerMagic) {
    throw FormatError(manifest_path.string(), 0,
                      "magic mismatch: expected " + std::string(kContainerMagic) + ", found '" +
                          manifest.get("magic") + "'");
  }
  const std::size_t k = manifest.get_size("K");
  const std::size_t t = manifest.get_size("T");
  const std::size_t m = manifest.get_size("m");
  const std::size_t n = manifest.get_size("n");
  const double dt = manifest.get_double("dt");
  const std::string& has_kl = manifest.get("has_kl");
  if (k < 1 || t < 1 || n < 1) {
    throw FormatError(manifest_path.string(), 0, "dimension inconsistency: need K >= 1, T >= 1, n >= 1");
  }
  if (!(dt > 0.0)) throw FormatError(manifest_path.string(), 0, "dt must be positive");
  if (has_kl != "0" && has_kl != "1") throw FormatError(manifest_path.string(), 0, "has_kl must be 0 or 1");
  if (has_kl == "1" && m == 0) {
    throw FormatError(manifest_path.string(), 0, "dimension inconsistency: KL statistics without a latent block");
  }

  const std::size_t rows = k * (t + 1);
  std::vector<double> latent;
  if (m > 0) latent = binary::read_f64(dir / "latent.f64", rows * 2 * m);
  std::vector<double> truth = binary::read_f64(dir / "truth.f64", rows * 2 * n);
  std::optional<std::vector<double>> kl;
  if (has_kl == "1") kl = binary::read_f64(dir / "kl.f64", 2 * m);
  return LatentTrajectorySet(k, t + 1, 2 * m, 2 * n, dt, std::move(latent), std::move(truth), std::move(kl));
}

}  // namespace symetric
