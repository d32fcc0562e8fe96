#include <algorithm>
#include <cmath>
#include <vector>

#include "aps/random.hpp"
#include "doctest.h"

using aps::RandomSource;

TEST_CASE("equal seeds reproduce the draw sequence bitwise") {
  RandomSource a(42, 3);
  RandomSource b(42, 3);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams decorrelate") {
  RandomSource a(42, 0);
  RandomSource b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("substreams are deterministic functions of the index") {
  RandomSource root(7, 0);
  RandomSource s1 = root.substream(5);
  RandomSource s2 = RandomSource(7, 0).substream(5);
  for (int i = 0; i < 100; ++i) CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("next_below stays in range and covers the range") {
  RandomSource rs(11, 0);
  std::vector<int> seen(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto v = rs.next_below(10);
    REQUIRE(v < 10);
    ++seen[static_cast<std::size_t>(v)];
  }
  CHECK(*std::min_element(seen.begin(), seen.end()) > 800);
}

TEST_CASE("uniform doubles pass a Kolmogorov-Smirnov test at 0.001") {
  RandomSource rs(2024, 0);
  const std::size_t n = 10000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = rs.next_double();
  std::sort(draws.begin(), draws.end());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d_stat = std::max({d_stat, draws[i] - lo, hi - draws[i]});
  }
  // critical value c(0.001)/sqrt(n) with c = 1.94947
  CHECK(d_stat < 1.94947 / std::sqrt(static_cast<double>(n)));
}
