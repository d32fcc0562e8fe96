#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace test_helpers {

/// Pearson chi-square statistic against expected shares.
inline double chi_square(const std::vector<std::uint64_t>& observed,
                         const std::vector<double>& expected_share) {
  std::uint64_t n = 0;
  for (auto c : observed) n += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = expected_share[i] * static_cast<double>(n);
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// 0.99 quantiles of the chi-square law for small degrees of freedom.
inline constexpr double kChi2_99_df1 = 6.6348966010;
inline constexpr double kChi2_99_df2 = 9.2103403720;
inline constexpr double kChi2_99_df9 = 21.6659943334;

inline double mean(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return v / static_cast<double>(xs.size() - 1);
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::fabs(p[i] - q[i]);
  return 0.5 * tv;
}

}  // namespace test_helpers
