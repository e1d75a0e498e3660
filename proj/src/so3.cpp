#include "thermolie/so3.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace thermolie {

double norm_inf(const Mat3& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    best = std::max(best, std::fabs(m(i, 0)) + std::fabs(m(i, 1)) + std::fabs(m(i, 2)));
  return best;
}

bool is_finite(const Mat3& m) {
  return std::all_of(m.a.begin(), m.a.end(), [](double v) { return std::isfinite(v); });
}

double determinant(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Vec3 solve(const Mat3& m, const Vec3& b) {
  double a[3][4];
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) a[i][j] = m(i, j);
    a[i][3] = b[i];
  }
  const double scale = norm_inf(m);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw SingularLinearSolve("3x3 solve: zero or non-finite matrix");

  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) <= 1e-14 * scale) throw SingularLinearSolve("3x3 solve: singular matrix");
    if (piv != col)
      for (int j = 0; j < 4; ++j) std::swap(a[col][j], a[piv][j]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
    }
  }
  Vec3 x;
  for (int i = 2; i >= 0; --i) {
    double s = a[i][3];
    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

Mat3 inverse(const Mat3& m) {
  const Vec3 c0 = solve(m, {1, 0, 0});
  const Vec3 c1 = solve(m, {0, 1, 0});
  const Vec3 c2 = solve(m, {0, 0, 1});
  return Mat3::from_rows(c0, c1, c2).transpose();
}

// ---------------------------------------------------------------------------

double Rotation::orthogonality_defect(const Mat3& m) {
  return norm_inf(m.transpose() * m - Mat3::identity());
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!is_finite(m)) throw NotARotation("rotation matrix has non-finite entries");
  const double defect = orthogonality_defect(m);
  const double det = determinant(m);
  if (defect > kRotationTolerance || std::fabs(det - 1.0) > kRotationTolerance) {
    std::ostringstream os;
    os << "not a rotation: ||R^T R - I||_inf = " << defect << ", det = " << det;
    throw NotARotation(os.str());
  }
}

Rotation Rotation::repaired(const Mat3& m) {
  Vec3 r0 = m.row(0);
  Vec3 r1 = m.row(1);
  Vec3 r2 = m.row(2);
  const double n0 = norm(r0);
  if (!(n0 > 0.0)) throw NotARotation("cannot repair: zero first row");
  r0 = r0 / n0;
  r1 = r1 - dot(r0, r1) * r0;
  const double n1 = norm(r1);
  if (!(n1 > 0.0)) throw NotARotation("cannot repair: rows are dependent");
  r1 = r1 / n1;
  r2 = r2 - dot(r0, r2) * r0 - dot(r1, r2) * r1;
  const double n2 = norm(r2);
  if (!(n2 > 0.0)) throw NotARotation("cannot repair: rows are dependent");
  r2 = r2 / n2;
  return Rotation(Mat3::from_rows(r0, r1, r2));
}

Rotation Rotation::inverse() const { return Rotation(m_.transpose(), Unchecked{}); }

Rotation operator*(const Rotation& a, const Rotation& b) { return Rotation(a.m_ * b.m_); }

// ---------------------------------------------------------------------------

Vec3 vee(const Mat3& m, double tol) {
  const double defect = norm_inf(m + m.transpose());
  if (!(defect <= tol)) throw NotSkew(defect);
  // Antisymmetric part; reproduces hat(v) entries exactly.
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

Rotation cay(const Vec3& xi) {
  const Mat3 half = 0.5 * hat(xi);
  const Mat3 lhs = Mat3::identity() - half;
  const Mat3 rhs = Mat3::identity() + half;
  Mat3 out;
  for (std::size_t j = 0; j < 3; ++j) {
    const Vec3 c = solve(lhs, rhs.col(j));
    out(0, j) = c.x;
    out(1, j) = c.y;
    out(2, j) = c.z;
  }
  return Rotation(out);
}

Vec3 dcay_inv(const Vec3& xi, const Vec3& delta) {
  const Mat3 half = 0.5 * hat(xi);
  const Mat3 sandwich = (Mat3::identity() - half) * hat(delta) * (Mat3::identity() + half);
  // Skew in exact arithmetic; allow roundoff relative to the magnitude.
  const double tol = kSkewTolerance * std::max(1.0, norm_inf(sandwich));
  return vee(sandwich, tol);
}

Mat3 dcay_inv_matrix(const Vec3& xi) {
  const Vec3 c0 = dcay_inv(xi, {1, 0, 0});
  const Vec3 c1 = dcay_inv(xi, {0, 1, 0});
  const Vec3 c2 = dcay_inv(xi, {0, 0, 1});
  return Mat3::from_rows(c0, c1, c2).transpose();
}

Vec3 dcay(const Vec3& xi, const Vec3& delta) {
  try {
    return solve(dcay_inv_matrix(xi), delta);
  } catch (const SingularLinearSolve&) {
    std::ostringstream os;
    os << "dcay: singular dcay_inv matrix at xi = (" << xi.x << ", " << xi.y << ", " << xi.z << ")";
    throw SingularLinearSolve(os.str());
  }
}

Vec3 dcay_inv_star(const Vec3& xi, const Vec3& mu) { return dcay_inv(-xi, mu); }

Vec3 dcay_inv_star_transpose(const Vec3& xi, const Vec3& mu) {
  return dcay_inv_matrix(xi).transpose() * mu;
}

}  // namespace thermolie
