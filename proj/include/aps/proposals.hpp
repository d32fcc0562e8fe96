#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "aps/distributions.hpp"
#include "aps/game.hpp"
#include "aps/random.hpp"

namespace aps {

/// Symmetric proposal kernels for the MH chains.
///
/// Discrete ordinal spaces use the circular-neighbor walk: the states form a
/// ring and the kernel proposes the left or right neighbor with probability
/// 1/2 each, which is exactly symmetric. Continuous boxes use a per-coordinate
/// student-t random walk centered at the current point; candidates that land
/// outside the box are turned into a stay, which preserves detailed balance
/// for the target restricted to the box.
class ProposalKernel {
 public:
  static ProposalKernel circular_neighbor() {
    ProposalKernel k;
    k.kind_ = Kind::Circular;
    return k;
  }

  /// scale_fraction is the step scale per coordinate as a fraction of the box
  /// width; dof controls tail weight.
  static ProposalKernel student_t_walk(double scale_fraction = 0.1, double dof = 5.0) {
    if (!(scale_fraction > 0.0) || !(dof > 0.0))
      throw std::invalid_argument("student-t kernel needs positive scale and dof");
    ProposalKernel k;
    k.kind_ = Kind::StudentT;
    k.scale_fraction_ = scale_fraction;
    k.dof_ = dof;
    return k;
  }

  bool is_circular() const { return kind_ == Kind::Circular; }
  double scale_fraction() const { return scale_fraction_; }
  double dof() const { return dof_; }

  /// Proposes a neighbor index in a discrete space. nullopt is a stay-marker:
  /// the chain remains at the current state and counts a rejected move.
  std::optional<std::size_t> propose_index(const DecisionSpace& space, std::size_t current,
                                           RandomSource& rs) const {
    if (!space.is_discrete())
      throw std::invalid_argument("propose_index needs a discrete space");
    if (kind_ != Kind::Circular)
      throw std::invalid_argument("discrete proposals need the circular-neighbor kernel");
    const std::size_t n = space.size();
    if (current >= n) throw std::domain_error("proposal: current state outside space");
    const bool go_right = rs.next_double() < 0.5;
    if (n == 1) return std::nullopt;
    if (go_right) return (current + 1) % n;
    return (current + n - 1) % n;
  }

  /// Proposes a point in a box space; nullopt when the t-step exits the box.
  std::optional<std::vector<double>> propose_point(const DecisionSpace& space,
                                                   const std::vector<double>& current,
                                                   RandomSource& rs) const {
    if (space.is_discrete())
      throw std::invalid_argument("propose_point needs a box space");
    if (kind_ != Kind::StudentT)
      throw std::invalid_argument("continuous proposals need the student-t kernel");
    const auto& box = space.as_box();
    if (current.size() != box.lower.size())
      throw std::domain_error("proposal: current point has wrong dimension");
    std::vector<double> candidate(current.size());
    bool inside = true;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (current[i] < box.lower[i] || current[i] > box.upper[i])
        throw std::domain_error("proposal: current point outside box");
      const double width = box.upper[i] - box.lower[i];
      candidate[i] = current[i] + sample_student_t(0.0, scale_fraction_ * width, dof_, rs);
      inside = inside && candidate[i] >= box.lower[i] && candidate[i] <= box.upper[i];
    }
    if (!inside) return std::nullopt;
    return candidate;
  }

 private:
  enum class Kind { Circular, StudentT };
  Kind kind_ = Kind::Circular;
  double scale_fraction_ = 0.1;
  double dof_ = 5.0;
};

}  // namespace aps
