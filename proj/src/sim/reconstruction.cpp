#include "crosstwin/sim/reconstruction.hpp"

#include <algorithm>

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

void ReceiveBuffer::insert(std::size_t joint, long origin, double value) {
  if (joint >= joints_.size()) throw RangeError("receive buffer joint out of range");
  auto& list = joints_[joint];
  auto it = std::lower_bound(list.begin(), list.end(), origin,
                             [](const Sample& s, long o) { return s.origin < o; });
  if (it != list.end() && it->origin == origin) {
    it->value = value;
  } else {
    list.insert(it, Sample{origin, value});
  }
}

void ReceiveBuffer::prune(long oldest_kept) {
  for (auto& list : joints_) {
    auto it = std::lower_bound(list.begin(), list.end(), oldest_kept,
                               [](const Sample& s, long o) { return s.origin < o; });
    if (it == list.end() && !list.empty()) --it;
    list.erase(list.begin(), it);
  }
}

const std::vector<Sample>& ReceiveBuffer::samples(std::size_t joint) const {
  if (joint >= joints_.size()) throw RangeError("receive buffer joint out of range");
  return joints_[joint];
}

std::size_t ReceiveBuffer::size() const {
  std::size_t n = 0;
  for (const auto& list : joints_) n += list.size();
  return n;
}

void ReceiveBuffer::clear() {
  for (auto& list : joints_) list.clear();
}

Reconstruction reconstruct(const std::vector<Sample>& samples, long query, std::size_t window, double fallback) {
  const long lo = query - static_cast<long>(window) + 1;
  auto first = std::lower_bound(samples.begin(), samples.end(), lo,
                                [](const Sample& s, long o) { return s.origin < o; });
  const auto n = samples.end() - first;
  if (n == 0) return {fallback, true};
  if (n == 1) return {first->value, false};

  auto upper = std::upper_bound(first, samples.end(), query,
                                [](long q, const Sample& s) { return q < s.origin; });
  const Sample* a;
  const Sample* b;
  if (upper == samples.end()) {
    // At or past the newest sample: extend the line through the last two.
    b = &*(samples.end() - 1);
    a = &*(samples.end() - 2);
    const double slope = (b->value - a->value) / static_cast<double>(b->origin - a->origin);
    if (b->origin == query) return {b->value, false};
    return {b->value + slope * static_cast<double>(query - b->origin), false};
  } else if (upper == first) {
    // Before the oldest windowed sample: only later points available.
    return {first->value, false};
  } else {
    a = &*(upper - 1);
    b = &*upper;
    if (a->origin == query) return {a->value, false};
  }
  const double slope = (b->value - a->value) / static_cast<double>(b->origin - a->origin);
  return {a->value + slope * static_cast<double>(query - a->origin), false};
}

}  // namespace crosstwin::sim
