#pragma once

// Closed parameter loops and their discretization.

#include <string>
#include <vector>

#include "hannay/types.hpp"

namespace hannay {

/// Closed curve gamma : [0, 1] -> P with gamma(0) = gamma(1).
///
/// Discretizations always sample the underlying curve at s = k/K in its own
/// orientation; reversal and repetition are recorded as flags, so a reversed
/// loop reuses exactly the same nodes and segments.
class ParamLoop {
 public:
  enum class Kind { constant, circle, polyline };

  static ParamLoop constant(ParamPoint base);
  /// center + radius (cos(phase + 2 pi s) e_a + sin(phase + 2 pi s) e_b).
  static ParamLoop circle(ParamPoint center, double radius, std::size_t axis_a,
                          std::size_t axis_b, double start_phase = 0.0);
  /// Closed polygon v_0 -> v_1 -> ... -> v_0, each edge taking an equal share of s.
  static ParamLoop polyline(std::vector<ParamPoint> vertices);

  ParamLoop reversed() const;
  /// The same curve traversed `times` times in succession.
  ParamLoop repeated(int times) const;

  Kind kind() const noexcept { return kind_; }
  int orientation() const noexcept { return orientation_; }
  int traversals() const noexcept { return traversals_; }
  std::size_t dim() const noexcept { return base_.size(); }

  /// Oriented evaluation gamma(s), s in [0, 1], including repetitions.
  ParamPoint at(double s) const;

  /// Nodes gamma_base(k/K), k = 0..K, of one traversal of the underlying
  /// curve; the last node is the first one, bitwise.
  std::vector<ParamPoint> base_nodes(std::size_t K) const;

  std::string describe() const;

 private:
  ParamPoint underlying(double s) const;  // s in [0, 1), base orientation

  Kind kind_ = Kind::constant;
  ParamPoint base_;  // constant point or circle center
  double radius_ = 0.0;
  std::size_t axis_a_ = 0, axis_b_ = 1;
  double start_phase_ = 0.0;
  std::vector<ParamPoint> vertices_;
  int orientation_ = +1;
  int traversals_ = 1;
};

}  // namespace hannay
