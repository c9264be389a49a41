#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace crosstwin::sim {

struct Sample {
  long origin = 0;
  double value = 0.0;
};

/// Per-joint delivered samples ordered by origin slot.
class ReceiveBuffer {
 public:
  ReceiveBuffer() = default;
  explicit ReceiveBuffer(std::size_t joints) : joints_(joints) {}

  std::size_t joint_count() const { return joints_.size(); }
  /// Inserts by origin so late packets land in order; a duplicate origin replaces the value.
  void insert(std::size_t joint, long origin, double value);
  /// Drops samples older than `oldest_kept`, always retaining the newest one.
  void prune(long oldest_kept);
  const std::vector<Sample>& samples(std::size_t joint) const;
  std::size_t size() const;
  void clear();

 private:
  std::vector<std::vector<Sample>> joints_;
};

struct Reconstruction {
  double value = 0.0;
  bool cold_start = false;  // no sample in the window; value is the fallback
};

/// Angle at `query` from samples with origin >= query - window + 1: linear
/// interpolation when bracketed, two-point extrapolation past the newest
/// sample, hold when only one sample is available.
Reconstruction reconstruct(const std::vector<Sample>& samples, long query, std::size_t window, double fallback);

}  // namespace crosstwin::sim
