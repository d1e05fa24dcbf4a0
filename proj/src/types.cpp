#include "hannay/types.hpp"

#include <cstdio>

#include "hannay/errors.hpp"

namespace hannay {

double wrap_angle(double angle) noexcept {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

double wrap_positive(double angle) noexcept {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

ParamPoint::ParamPoint(RealVector coords) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) fail(ErrorKind::domain, "parameter point has non-finite coordinates");
}

ParamPoint::ParamPoint(std::initializer_list<double> coords)
    : ParamPoint(RealVector(Eigen::Map<const RealVector>(coords.begin(),
                                                          static_cast<Eigen::Index>(coords.size())))) {}

ParamPoint ParamPoint::shifted(std::size_t axis, double delta) const {
  RealVector c = coords_;
  c(static_cast<Eigen::Index>(axis)) += delta;
  return ParamPoint(std::move(c));
}

std::string ParamPoint::to_string() const {
  std::string out = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < coords_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", coords_(i));
    if (i) out += ", ";
    out += buf;
  }
  return out + ")";
}

ParamPoint midpoint(const ParamPoint& a, const ParamPoint& b) {
  return ParamPoint(RealVector(0.5 * (a.coords() + b.coords())));
}

namespace {
constexpr double kScale = 18446744073709551616.0;  // 2^64
constexpr double kLimit = 4611686018427387904.0;   // 2^62
}  // namespace

void ExactSum::add(double value) {
  if (!std::isfinite(value) || std::fabs(value) >= kLimit) {
    fail(ErrorKind::domain, "term outside the exact-summation range");
  }
  // value * 2^64 is exact; only the rounding to an integer loses bits.
  const double scaled = std::nearbyint(value * kScale);
  acc_ += static_cast<wide_int>(scaled);
}

double ExactSum::value() const noexcept { return static_cast<double>(acc_) / kScale; }

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::singular_point: return "singular-point";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::shape: return "shape";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::input: return "input";
    case ErrorKind::degenerate_chain: return "degenerate-chain";
    case ErrorKind::not_a_loop: return "not-a-loop";
    case ErrorKind::level_set: return "level-set";
    case ErrorKind::resource: return "resource";
    case ErrorKind::stencil: return "stencil";
    case ErrorKind::step_too_large: return "step-too-large";
    case ErrorKind::overlap_domain: return "overlap-domain";
    case ErrorKind::oracle_domain: return "oracle-domain";
  }
  return "unknown";
}

}  // namespace hannay
