#pragma once

#include "occulstm/errors.hpp"
#include "occulstm/matrix.hpp"

namespace occulstm {

// Occupancy counts above 15 fold into one top category, giving 16 classes.
constexpr int kNumClasses = 16;

struct NonFiniteInput : Error {
  using Error::Error;
};

// min(people, 15); people must be >= 0
int clamp_count(int people);

// 16-element vector with a single 1 at the zero-based label index
Vec one_hot_encode(int label);

// Zero-based index of the maximum; ties break to the lowest index.
int decode_argmax(const Vec& probs);

}  // namespace occulstm
