#include "hannay/loop.hpp"

#include <cmath>
#include <cstdio>

#include "hannay/errors.hpp"

namespace hannay {

ParamLoop ParamLoop::constant(ParamPoint base) {
  ParamLoop l;
  l.kind_ = Kind::constant;
  l.base_ = std::move(base);
  return l;
}

ParamLoop ParamLoop::circle(ParamPoint center, double radius, std::size_t axis_a,
                            std::size_t axis_b, double start_phase) {
  if (axis_a >= center.size() || axis_b >= center.size() || axis_a == axis_b) {
    fail(ErrorKind::configuration, "circle plane axes must be two distinct parameter axes");
  }
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    fail(ErrorKind::configuration, "circle radius must be finite and non-negative");
  }
  ParamLoop l;
  l.kind_ = Kind::circle;
  l.base_ = std::move(center);
  l.radius_ = radius;
  l.axis_a_ = axis_a;
  l.axis_b_ = axis_b;
  l.start_phase_ = start_phase;
  return l;
}

ParamLoop ParamLoop::polyline(std::vector<ParamPoint> vertices) {
  if (vertices.size() < 2) fail(ErrorKind::configuration, "polyline needs at least 2 vertices");
  for (const auto& v : vertices) {
    if (v.size() != vertices.front().size()) {
      fail(ErrorKind::configuration, "polyline vertices differ in dimension");
    }
  }
  ParamLoop l;
  l.kind_ = Kind::polyline;
  l.base_ = vertices.front();
  l.vertices_ = std::move(vertices);
  return l;
}

ParamLoop ParamLoop::reversed() const {
  ParamLoop l = *this;
  l.orientation_ = -orientation_;
  return l;
}

ParamLoop ParamLoop::repeated(int times) const {
  if (times < 1) fail(ErrorKind::configuration, "a loop is traversed at least once");
  ParamLoop l = *this;
  l.traversals_ = traversals_ * times;
  return l;
}

ParamPoint ParamLoop::underlying(double s) const {
  switch (kind_) {
    case Kind::constant:
      return base_;
    case Kind::circle: {
      const double a = start_phase_ + kTwoPi * s;
      RealVector c = base_.coords();
      c(static_cast<Eigen::Index>(axis_a_)) += radius_ * std::cos(a);
      c(static_cast<Eigen::Index>(axis_b_)) += radius_ * std::sin(a);
      return ParamPoint(std::move(c));
    }
    case Kind::polyline: {
      const std::size_t V = vertices_.size();
      const double u = s * static_cast<double>(V);
      auto e = static_cast<std::size_t>(std::floor(u));
      if (e >= V) e = V - 1;
      const double frac = u - static_cast<double>(e);
      const auto& a = vertices_[e];
      const auto& b = vertices_[(e + 1) % V];
      if (frac == 0.0) return a;
      return ParamPoint(RealVector(a.coords() + frac * (b.coords() - a.coords())));
    }
  }
  return base_;
}

ParamPoint ParamLoop::at(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::domain, "loop parameter must lie in [0, 1]");
  double u = s * traversals_;
  u -= std::floor(u);
  if (orientation_ < 0 && u > 0.0) u = 1.0 - u;
  return underlying(u);
}

std::vector<ParamPoint> ParamLoop::base_nodes(std::size_t K) const {
  if (K < 1) fail(ErrorKind::domain, "need at least one segment");
  std::vector<ParamPoint> nodes;
  nodes.reserve(K + 1);
  for (std::size_t k = 0; k < K; ++k) {
    nodes.push_back(underlying(static_cast<double>(k) / static_cast<double>(K)));
  }
  nodes.push_back(nodes.front());
  return nodes;
}

std::string ParamLoop::describe() const {
  std::string s;
  switch (kind_) {
    case Kind::constant: s = "constant at " + base_.to_string(); break;
    case Kind::circle: {
      char buf[128];
      std::snprintf(buf, sizeof buf, "circle radius %.6g in plane (%zu, %zu) about ", radius_,
                    axis_a_, axis_b_);
      s = buf + base_.to_string();
      break;
    }
    case Kind::polyline: s = "polyline with " + std::to_string(vertices_.size()) + " vertices"; break;
  }
  if (orientation_ < 0) s += ", reversed";
  if (traversals_ > 1) s += ", traversed " + std::to_string(traversals_) + " times";
  return s;
}

}  // namespace hannay
