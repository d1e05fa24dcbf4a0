#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string>

#include <Eigen/Dense>

namespace hannay {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to (-pi, pi].
double wrap_angle(double angle) noexcept;

/// Reduces an angle to [0, 2pi).
double wrap_positive(double angle) noexcept;

/// A point x of the parameter manifold P, stored by its coordinates in R^m.
class ParamPoint {
 public:
  ParamPoint() = default;
  explicit ParamPoint(RealVector coords);
  ParamPoint(std::initializer_list<double> coords);

  const RealVector& coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_(static_cast<Eigen::Index>(i)); }

  ParamPoint shifted(std::size_t axis, double delta) const;
  ParamPoint operator+(const RealVector& v) const { return ParamPoint(RealVector(coords_ + v)); }
  RealVector operator-(const ParamPoint& other) const { return coords_ - other.coords_; }

  friend bool operator==(const ParamPoint& a, const ParamPoint& b) {
    return a.coords_.size() == b.coords_.size() && (a.coords_.array() == b.coords_.array()).all();
  }

  std::string to_string() const;

 private:
  RealVector coords_;
};

/// Chord midpoint of two parameter points, symmetric in its arguments.
ParamPoint midpoint(const ParamPoint& a, const ParamPoint& b);

/// Canonical coordinates (q, p) of a one-degree-of-freedom phase space.
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

/// Reproducible summation. Terms are rounded onto a 2^-64 grid and added as
/// 128-bit integers, so the result does not depend on summation order and
/// negating every term negates the sum bit for bit.
class ExactSum {
 public:
  void add(double value);
  double value() const noexcept;

 private:
  __extension__ typedef __int128 wide_int;
  wide_int acc_ = 0;
};

}  // namespace hannay
