#pragma once

// Orientation and in-sphere predicates: a floating-point evaluation guarded by
// a static error bound, with exact rational fallback inside the uncertainty band.

#include "alphaforge/geometry.hpp"

namespace alphaforge::predicates {

/// Sign of det[b-a, c-a, d-a]: +1 when d lies on the side of (b-a)x(c-a).
int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// For a tetrahedron (a,b,c,d) with orient3d(a,b,c,d) > 0: +1 if e lies strictly
/// inside its circumsphere, -1 if strictly outside, 0 if on it.
int insphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e);

/// True iff a, b, c are exactly collinear (including coincident points).
bool collinear(const Point3& a, const Point3& b, const Point3& c);

}  // namespace alphaforge::predicates
