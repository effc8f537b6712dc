#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wfbh/backhaul.hpp"

namespace wfbh {

// Base-3 packing of the per-AP effective states sent back to the UE.
// Digit k (weight 3^k) carries state(k) - 1.
struct FeedbackWord {
  std::uint64_t word = 0;
  unsigned bit_length = 0;

  friend bool operator==(const FeedbackWord&, const FeedbackWord&) = default;
};

// 3^40 is the largest power of three below 2^64.
inline constexpr std::size_t kMaxFeedbackAps = 40;

// Smallest b with 2^b >= 3^K, i.e. ceil(K log2 3).
unsigned feedback_bit_length(std::size_t num_aps);

FeedbackWord encode_feedback(std::span<const NodeState> effective_states);
std::vector<NodeState> decode_feedback(std::uint64_t word, std::size_t num_aps);

}  // namespace wfbh
