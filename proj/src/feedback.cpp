#include "wfbh/feedback.hpp"

#include <string>

#include "wfbh/errors.hpp"

namespace wfbh {

namespace {

void check_width(std::size_t num_aps) {
  if (num_aps < 1 || num_aps > kMaxFeedbackAps) {
    throw InvalidParameter("feedback supports 1.." + std::to_string(kMaxFeedbackAps) + " APs, got " +
                           std::to_string(num_aps));
  }
}

std::uint64_t pow3(std::size_t n) {
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < n; ++i) p *= 3;
  return p;
}

}  // namespace

unsigned feedback_bit_length(std::size_t num_aps) {
  check_width(num_aps);
  const std::uint64_t words = pow3(num_aps);
  unsigned bits = 0;
  // 3^K is odd, so the loop stops strictly above it: no overflow for K <= 40.
  while (bits < 64 && (std::uint64_t{1} << bits) < words) ++bits;
  return bits;
}

FeedbackWord encode_feedback(std::span<const NodeState> effective_states) {
  check_width(effective_states.size());
  FeedbackWord out;
  std::uint64_t weight = 1;
  for (const NodeState s : effective_states) {
    const int value = to_int(s);
    if (value < 1 || value > 3) throw InvalidParameter("state outside {1,2,3}: " + std::to_string(value));
    out.word += static_cast<std::uint64_t>(value - 1) * weight;
    weight *= 3;
  }
  out.bit_length = feedback_bit_length(effective_states.size());
  return out;
}

std::vector<NodeState> decode_feedback(std::uint64_t word, std::size_t num_aps) {
  check_width(num_aps);
  if (word >= pow3(num_aps)) throw InvalidParameter("feedback word out of range for AP count");
  std::vector<NodeState> out(num_aps);
  for (auto& s : out) {
    s = static_cast<NodeState>(word % 3 + 1);
    word /= 3;
  }
  return out;
}

}  // namespace wfbh
