#include "simpl/geometry.hpp"

#include <algorithm>
#include <limits>

namespace simpl {

std::array<Vec2, 4> OrientedRect::corners() const {
  const Vec2 u = axis * half_length;
  const Vec2 v = Vec2{-axis.y, axis.x} * half_width;
  return {center + u + v, center - u + v, center - u - v, center + u - v};
}

Box2 OrientedRect::bounds() const {
  Box2 box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec2& c : corners()) {
    box.min_x = std::min(box.min_x, c.x);
    box.min_y = std::min(box.min_y, c.y);
    box.max_x = std::max(box.max_x, c.x);
    box.max_y = std::max(box.max_y, c.y);
  }
  return box;
}

OrientedRect OrientedRect::inflated(double margin) const {
  OrientedRect out = *this;
  out.half_length += margin;
  out.half_width += margin;
  return out;
}

namespace {

// Half-width of the rectangle's projection onto a unit direction.
double projected_radius(const OrientedRect& r, Vec2 dir) {
  const Vec2 perp{-r.axis.y, r.axis.x};
  return r.half_length * std::abs(dot(r.axis, dir)) + r.half_width * std::abs(dot(perp, dir));
}

}  // namespace

bool intersects(const OrientedRect& a, const OrientedRect& b) {
  const Vec2 delta = b.center - a.center;
  const std::array<Vec2, 4> axes{a.axis, Vec2{-a.axis.y, a.axis.x}, b.axis,
                                 Vec2{-b.axis.y, b.axis.x}};
  for (const Vec2& dir : axes) {
    const double separation = std::abs(dot(delta, dir));
    if (separation > projected_radius(a, dir) + projected_radius(b, dir)) {
      return false;
    }
  }
  return true;
}

bool contains(const Box2& outer, const OrientedRect& rect) {
  for (const Vec2& c : rect.corners()) {
    if (c.x < outer.min_x || c.x > outer.max_x || c.y < outer.min_y || c.y > outer.max_y) {
      return false;
    }
  }
  return true;
}

}  // namespace simpl
