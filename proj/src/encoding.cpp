#include "occulstm/encoding.hpp"

#include <cmath>

namespace occulstm {

int clamp_count(int people) {
  if (people < 0) throw Error("people count must be >= 0");
  return people < kNumClasses - 1 ? people : kNumClasses - 1;
}

Vec one_hot_encode(int label) {
  if (label < 0 || label >= kNumClasses)
    throw Error("label out of range: " + std::to_string(label));
  Vec bits(kNumClasses, 0.0);
  bits[static_cast<std::size_t>(label)] = 1.0;
  return bits;
}

int decode_argmax(const Vec& probs) {
  if (probs.size() != kNumClasses)
    throw DimensionMismatch("expected " + std::to_string(kNumClasses) +
                            " probabilities, got " + std::to_string(probs.size()));
  int best = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    if (!std::isfinite(probs[static_cast<std::size_t>(k)]))
      throw NonFiniteInput("non-finite probability at index " + std::to_string(k));
    if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(best)])
      best = k;
  }
  return best;
}

}  // namespace occulstm
