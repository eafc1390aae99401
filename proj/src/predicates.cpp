#include "predicates.hpp"

#include <gmpxx.h>

#include <cmath>

namespace alphaforge::predicates {

namespace {

// Looser than the tightest published constants; anything inside the band is
// re-evaluated exactly, so looseness only costs time.
constexpr double kOrientBound = 4e-15;
constexpr double kInsphereBound = 1e-14;

struct QVec {
  mpq_class x, y, z;
};

QVec exact(const Point3& p) { return {mpq_class(p.x), mpq_class(p.y), mpq_class(p.z)}; }

QVec sub(const QVec& a, const QVec& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

mpq_class det3(const QVec& u, const QVec& v, const QVec& w) {
  return u.x * (v.y * w.z - v.z * w.y) + u.y * (v.z * w.x - v.x * w.z) +
         u.z * (v.x * w.y - v.y * w.x);
}

int sign_of(const mpq_class& q) {
  const int s = sgn(q);
  return s > 0 ? 1 : (s < 0 ? -1 : 0);
}

double det3(const Vec3& u, const Vec3& v, const Vec3& w, double& permanent) {
  const double t1 = v.y * w.z, t2 = v.z * w.y;
  const double t3 = v.z * w.x, t4 = v.x * w.z;
  const double t5 = v.x * w.y, t6 = v.y * w.x;
  permanent = std::abs(u.x) * (std::abs(t1) + std::abs(t2)) +
              std::abs(u.y) * (std::abs(t3) + std::abs(t4)) +
              std::abs(u.z) * (std::abs(t5) + std::abs(t6));
  return u.x * (t1 - t2) + u.y * (t3 - t4) + u.z * (t5 - t6);
}

int orient_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const QVec qa = exact(a);
  return sign_of(det3(sub(exact(b), qa), sub(exact(c), qa), sub(exact(d), qa)));
}

int insphere_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
                   const Point3& e) {
  const QVec qe = exact(e);
  const QVec ra = sub(exact(a), qe), rb = sub(exact(b), qe), rc = sub(exact(c), qe),
             rd = sub(exact(d), qe);
  auto lift = [](const QVec& r) -> mpq_class { return r.x * r.x + r.y * r.y + r.z * r.z; };
  const mpq_class det = -lift(ra) * det3(rb, rc, rd) + lift(rb) * det3(ra, rc, rd) -
                        lift(rc) * det3(ra, rb, rd) + lift(rd) * det3(ra, rb, rc);
  return -sign_of(det);
}

}  // namespace

int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  double permanent = 0.0;
  const double det = det3(b - a, c - a, d - a, permanent);
  const double bound = kOrientBound * permanent;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return orient_exact(a, b, c, d);
}

int insphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
             const Point3& e) {
  const Vec3 ra = a - e, rb = b - e, rc = c - e, rd = d - e;
  const double la = squared_norm(ra), lb = squared_norm(rb), lc = squared_norm(rc),
               ld = squared_norm(rd);
  double pa = 0, pb = 0, pc = 0, pd = 0;
  const double da = det3(rb, rc, rd, pa);
  const double db = det3(ra, rc, rd, pb);
  const double dc = det3(ra, rb, rd, pc);
  const double dd = det3(ra, rb, rc, pd);
  // Rows ordered a,b,c,d with the lifted column last; for a positively oriented
  // tetrahedron the determinant is negative exactly when e is inside.
  const double det = -la * da + lb * db - lc * dc + ld * dd;
  const double permanent = la * pa + lb * pb + lc * pc + ld * pd;
  const double bound = kInsphereBound * permanent;
  if (det > bound) return -1;
  if (det < -bound) return 1;
  return insphere_exact(a, b, c, d, e);
}

bool collinear(const Point3& a, const Point3& b, const Point3& c) {
  const QVec qa = exact(a);
  const QVec u = sub(exact(b), qa), v = sub(exact(c), qa);
  return sgn(u.y * v.z - u.z * v.y) == 0 && sgn(u.z * v.x - u.x * v.z) == 0 &&
         sgn(u.x * v.y - u.y * v.x) == 0;
}

}  // namespace alphaforge::predicates
