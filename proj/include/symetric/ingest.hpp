#pragma once

#include "symetric/core.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symetric {

inline constexpr std::string_view kContainerMagic = "HTRJ1";
inline constexpr double kDefaultKlThreshold = 0.01;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

/// K paired trajectories of T+1 steps: model latents S (2m wide) and ground
/// truth s (2n wide), row-major [trajectory][step][dimension]. A latent width
/// of zero marks a truth-only set. Filtered sets may have an odd latent width;
/// containers only store even ones.
class LatentTrajectorySet {
 public:
  LatentTrajectorySet(std::size_t trajectories, std::size_t steps, std::size_t latent_dim, std::size_t truth_dim,
                      double dt, std::vector<double> latent, std::vector<double> truth,
                      std::optional<std::vector<double>> kl_per_dim = std::nullopt);

  std::size_t trajectories() const noexcept { return trajectories_; }
  /// Steps per trajectory, T+1.
  std::size_t steps() const noexcept { return steps_; }
  std::size_t latent_dim() const noexcept { return latent_dim_; }
  std::size_t truth_dim() const noexcept { return truth_dim_; }
  double dt() const noexcept { return dt_; }

  const std::vector<double>& latent_data() const noexcept { return latent_; }
  const std::vector<double>& truth_data() const noexcept { return truth_; }
  const std::optional<std::vector<double>>& kl_per_dim() const noexcept { return kl_; }

  /// (T+1) × dim views of one trajectory.
  ConstRowMap latent(std::size_t trajectory) const;
  ConstRowMap truth(std::size_t trajectory) const;

  /// Rows of trajectories [first, first+count) stacked into one matrix.
  Matrix stacked_latent(std::size_t first, std::size_t count) const;
  Matrix stacked_truth(std::size_t first, std::size_t count) const;

  /// Same truth, new latent block.
  LatentTrajectorySet with_latent(std::size_t latent_dim, std::vector<double> latent,
                                  std::optional<std::vector<double>> kl_per_dim) const;

  friend bool operator==(const LatentTrajectorySet&, const LatentTrajectorySet&) = default;

 private:
  std::size_t trajectories_;
  std::size_t steps_;
  std::size_t latent_dim_;
  std::size_t truth_dim_;
  double dt_;
  std::vector<double> latent_;
  std::vector<double> truth_;
  std::optional<std::vector<double>> kl_;
};

struct FilterResult {
  LatentTrajectorySet set;
  std::vector<std::size_t> kept;
  /// True when per-dimension variance stood in for missing KL statistics.
  bool used_variance_fallback = false;
};

/// Drops latent dimensions whose KL (or, without KL, empirical variance) is
/// below `threshold`.
FilterResult filter_informative_dims(const LatentTrajectorySet& set, double threshold = kDefaultKlThreshold);

/// Directory layout: `manifest` (text) plus latent.f64, truth.f64 and
/// optionally kl.f64, little-endian binary64, row-major.
void save_container(const LatentTrajectorySet& set, const std::filesystem::path& dir);
LatentTrajectorySet load_container(const std::filesystem::path& dir);

// Shared by the container and learned-map formats.
namespace binary {

void write_f64(const std::filesystem::path& file, const std::vector<double>& values);
/// Reads exactly `count` values; size mismatch and non-finite values raise
/// FormatError with the offending byte offset.
std::vector<double> read_f64(const std::filesystem::path& file, std::size_t count);

}  // namespace binary

/// Ordered key-value text file.
class Manifest {
 public:
  void set(std::string key, std::string value);
  const std::string& get(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool has(std::string_view key) const;

  void write(const std::filesystem::path& file) const;
  static Manifest read(const std::filesystem::path& file);

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::uint64_t offset = 0;
  };
  const Entry& entry(std::string_view key) const;

  std::vector<Entry> entries_;
  std::string file_;
};

/// Round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace symetric
