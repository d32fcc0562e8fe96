#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aps {

struct ModeEstimate {
  double value = 0.0;
  double support_share = 0.0;  // frequency share (discrete) or argmax-bin mass
  std::string method;
  bool low_contrast = false;  // set when the histogram is too flat to trust
};

/// Sample mode of discrete decision codes: frequency argmax, ties toward the
/// smaller code.
inline ModeEstimate estimate_mode_discrete(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("estimate_mode_discrete: empty sample");
  std::map<double, std::uint64_t> counts;
  for (double s : samples) ++counts[s];
  double best = counts.begin()->first;
  std::uint64_t best_count = counts.begin()->second;
  for (const auto& [code, count] : counts) {
    if (count > best_count) {
      best = code;
      best_count = count;
    }
  }
  return {best, static_cast<double>(best_count) / static_cast<double>(samples.size()),
          "discrete-frequency", false};
}

/// Histogram mode of 1-D continuous samples. Bin width follows
/// Freedman-Diaconis when bins == 0; ties go to the leftmost bin. The
/// low_contrast flag fires when the top bin holds less than twice the mean
/// bin mass.
inline ModeEstimate estimate_mode_continuous(const std::vector<double>& samples,
                                             std::size_t bins = 0) {
  if (samples.empty()) throw std::invalid_argument("estimate_mode_continuous: empty sample");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (hi <= lo) return {lo, 1.0, "histogram", false};

  if (bins == 0) {
    const double q1 = sorted[sorted.size() / 4];
    const double q3 = sorted[(3 * sorted.size()) / 4];
    const double iqr = q3 - q1;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width))
                       : static_cast<std::size_t>(std::sqrt(static_cast<double>(sorted.size())));
    bins = std::clamp<std::size_t>(bins, 1, 100000);
  }

  std::vector<std::uint64_t> counts(bins, 0);
  for (double s : sorted) {
    auto b = static_cast<std::size_t>((s - lo) / (hi - lo) * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < bins; ++b)
    if (counts[b] > counts[best]) best = b;

  const double share = static_cast<double>(counts[best]) / static_cast<double>(sorted.size());
  const double mean_share = 1.0 / static_cast<double>(bins);
  const double mid = lo + (static_cast<double>(best) + 0.5) * (hi - lo) / static_cast<double>(bins);
  return {mid, share, "histogram-fd", share < 2.0 * mean_share};
}

}  // namespace aps
