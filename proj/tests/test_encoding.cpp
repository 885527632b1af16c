#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>

#include "occulstm/encoding.hpp"

using namespace occulstm;

TEST_CASE("counts cap at 15") {
  CHECK(clamp_count(0) == 0);
  CHECK(clamp_count(13) == 13);
  CHECK(clamp_count(15) == 15);
  CHECK(clamp_count(23) == 15);
  CHECK_THROWS_AS(clamp_count(-1), Error);
}

TEST_CASE("clamp is idempotent and monotone") {
  int prev = -1;
  for (int n = 0; n <= 100; ++n) {
    int c = clamp_count(n);
    CHECK(clamp_count(c) == c);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("one-hot sets exactly the label bit") {
  auto v0 = one_hot_encode(0);
  CHECK(v0[0] == 1.0);
  auto v15 = one_hot_encode(15);
  CHECK(v15[15] == 1.0);
  for (int k = 0; k < kNumClasses; ++k) {
    auto v = one_hot_encode(k);
    REQUIRE(v.size() == 16);
    double sum = 0.0;
    for (double b : v) {
      CHECK((b == 0.0 || b == 1.0));
      sum += b;
    }
    CHECK(sum == 1.0);
    CHECK(v[static_cast<std::size_t>(k)] == 1.0);
  }
  CHECK_THROWS_AS(one_hot_encode(16), Error);
  CHECK_THROWS_AS(one_hot_encode(-1), Error);
}

TEST_CASE("argmax decode picks the largest probability") {
  // published 16-way output example; the peak sits at zero-based index 12
  Vec probs{3.1594791e-02, 1.1173296e-03, 1.9875835e-01, 1.2148099e-01,
            1.7412059e-01, 9.9778280e-04, 7.6386752e-04, 3.7641544e-02,
            1.0577185e-03, 4.6020711e-04, 8.2410325e-04, 7.5649790e-04,
            4.2702064e-01, 2.0497683e-03, 9.2915818e-04, 4.2664449e-04};
  CHECK(decode_argmax(probs) == 12);
}

TEST_CASE("ties break to the lowest index") {
  Vec uniform(16, 1.0 / 16.0);
  CHECK(decode_argmax(uniform) == 0);
  Vec two_peaks(16, 0.0);
  two_peaks[4] = 0.5;
  two_peaks[9] = 0.5;
  CHECK(decode_argmax(two_peaks) == 4);
}

TEST_CASE("decode inverts encode for every class") {
  for (int k = 0; k < kNumClasses; ++k) CHECK(decode_argmax(one_hot_encode(k)) == k);
}

TEST_CASE("non-finite probabilities are rejected") {
  Vec probs(16, 1.0 / 16.0);
  probs[7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(decode_argmax(probs), NonFiniteInput);
  probs[7] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(decode_argmax(probs), NonFiniteInput);
  CHECK_THROWS_AS(decode_argmax(Vec(5, 0.1)), DimensionMismatch);
}
