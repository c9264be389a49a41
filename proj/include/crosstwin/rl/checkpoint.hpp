#pragma once

#include <cstdint>
#include <string>

#include "crosstwin/rl/policy.hpp"
#include "crosstwin/rl/trainer.hpp"

namespace crosstwin::rl {

struct Checkpoint {
  std::uint64_t config_hash = 0;
  TwoBranchPolicy policy;
  ValueHead reward_head;
  ValueHead cost_head;
};

/// Text serialization; values are hex floats so a round trip is exact.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
/// Throws ValidityError on malformed input.
Checkpoint parse_checkpoint(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace crosstwin::rl
