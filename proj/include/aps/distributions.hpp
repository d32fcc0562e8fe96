#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "aps/random.hpp"

namespace aps {

struct Uniform {
  double a, b;
};
struct Beta {
  double alpha, beta;
};
struct Gamma {
  double shape, rate;
};
struct Normal {
  double mean, sd;
};
struct Binomial {
  int n;
  double p;
};
struct Bernoulli {
  double p;
};
struct StudentT {
  double location, scale, dof;
};

using Distribution =
    std::variant<Uniform, Beta, Gamma, Normal, Binomial, Bernoulli, StudentT>;

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("distribution parameter: ") + what);
}

}  // namespace detail

inline double sample_uniform(double a, double b, RandomSource& rs) {
  detail::require(a <= b, "uniform needs a <= b");
  return a + (b - a) * rs.next_double();
}

inline double sample_normal(double mean, double sd, RandomSource& rs) {
  detail::require(sd > 0.0, "normal needs sd > 0");
  // Box-Muller; the second coordinate is discarded so the draw count per
  // call is fixed, which keeps substream replay simple.
  const double u1 = rs.next_double();
  const double u2 = rs.next_double();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
}

inline double sample_gamma(double shape, double rate, RandomSource& rs) {
  detail::require(shape > 0.0 && rate > 0.0, "gamma needs shape, rate > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back.
    double u = rs.next_double();
    while (u <= 0.0) u = rs.next_double();
    return sample_gamma(shape + 1.0, rate, rs) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(0.0, 1.0, rs);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rs.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

inline double sample_beta(double alpha, double beta, RandomSource& rs) {
  detail::require(alpha > 0.0 && beta > 0.0, "beta needs alpha, beta > 0");
  for (;;) {
    const double x = sample_gamma(alpha, 1.0, rs);
    const double y = sample_gamma(beta, 1.0, rs);
    if (x + y > 0.0) return x / (x + y);
  }
}

inline int sample_bernoulli(double p, RandomSource& rs) {
  detail::require(p >= 0.0 && p <= 1.0, "bernoulli needs p in [0,1]");
  return rs.next_double() < p ? 1 : 0;
}

inline int sample_binomial(int n, double p, RandomSource& rs) {
  detail::require(n >= 0, "binomial needs n >= 0");
  detail::require(p >= 0.0 && p <= 1.0, "binomial needs p in [0,1]");
  int successes = 0;
  for (int i = 0; i < n; ++i) successes += sample_bernoulli(p, rs);
  return successes;
}

inline double sample_student_t(double location, double scale, double dof, RandomSource& rs) {
  detail::require(scale > 0.0 && dof > 0.0, "student-t needs scale, dof > 0");
  const double z = sample_normal(0.0, 1.0, rs);
  const double chi2 = 2.0 * sample_gamma(0.5 * dof, 1.0, rs);
  return location + scale * z / std::sqrt(chi2 / dof);
}

/// Draws from a named parametric law. Integer-valued laws return their value
/// as a double.
inline double sample(const Distribution& dist, RandomSource& rs) {
  return std::visit(
      [&rs](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) return sample_uniform(d.a, d.b, rs);
        if constexpr (std::is_same_v<T, Beta>) return sample_beta(d.alpha, d.beta, rs);
        if constexpr (std::is_same_v<T, Gamma>) return sample_gamma(d.shape, d.rate, rs);
        if constexpr (std::is_same_v<T, Normal>) return sample_normal(d.mean, d.sd, rs);
        if constexpr (std::is_same_v<T, Binomial>)
          return static_cast<double>(sample_binomial(d.n, d.p, rs));
        if constexpr (std::is_same_v<T, Bernoulli>)
          return static_cast<double>(sample_bernoulli(d.p, rs));
        if constexpr (std::is_same_v<T, StudentT>)
          return sample_student_t(d.location, d.scale, d.dof, rs);
      },
      dist);
}

/// Beta law with the requested mean and variance.
/// alpha = m (m(1-m)/v - 1), beta = (1-m) (m(1-m)/v - 1).
inline Beta beta_from_mean_variance(double mean, double variance) {
  detail::require(mean > 0.0 && mean < 1.0, "moment-matched beta needs 0 < mean < 1");
  detail::require(variance > 0.0 && variance < mean * (1.0 - mean),
                  "moment-matched beta needs 0 < variance < mean (1 - mean)");
  const double concentration = mean * (1.0 - mean) / variance - 1.0;
  return Beta{mean * concentration, (1.0 - mean) * concentration};
}

inline double mean_of(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) return 0.5 * (d.a + d.b);
        if constexpr (std::is_same_v<T, Beta>) return d.alpha / (d.alpha + d.beta);
        if constexpr (std::is_same_v<T, Gamma>) return d.shape / d.rate;
        if constexpr (std::is_same_v<T, Normal>) return d.mean;
        if constexpr (std::is_same_v<T, Binomial>) return d.n * d.p;
        if constexpr (std::is_same_v<T, Bernoulli>) return d.p;
        if constexpr (std::is_same_v<T, StudentT>) return d.location;
      },
      dist);
}

}  // namespace aps
