#pragma once

// Exact kernel for SO(3) / so(3): hat/vee, adjoint and coadjoint actions,
// the Cayley group-difference map and its right-trivialized tangents.
//
// Algebra elements and their duals are both stored as Vec3. The pairing
// between so(3)* and so(3) is the Euclidean dot product, which is what the
// isometric hat map induces (<hat(v), hat(w)> = 1/2 tr(hat(v)^T hat(w)) = v.w).

#include <array>
#include <cmath>
#include <cstddef>

#include "thermolie/errors.hpp"

namespace thermolie {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec3& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> a{};

  static constexpr Mat3 zero() { return {}; }
  static constexpr Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static constexpr Mat3 diagonal(const Vec3& d) {
    Mat3 m;
    m(0, 0) = d.x;
    m(1, 1) = d.y;
    m(2, 2) = d.z;
    return m;
  }
  static constexpr Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 m;
    for (std::size_t j = 0; j < 3; ++j) {
      m(0, j) = r0[j];
      m(1, j) = r1[j];
      m(2, j) = r2[j];
    }
    return m;
  }

  constexpr double operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }

  constexpr Vec3 row(std::size_t i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
  constexpr Vec3 col(std::size_t j) const { return {a[j], a[3 + j], a[6 + j]}; }

  constexpr Mat3 transpose() const {
    Mat3 t;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Mat3 operator+(const Mat3& l, const Mat3& r) {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = l.a[i] + r.a[i];
  return m;
}
constexpr Mat3 operator-(const Mat3& l, const Mat3& r) {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = l.a[i] - r.a[i];
  return m;
}
constexpr Mat3 operator*(double s, const Mat3& r) {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = s * r.a[i];
  return m;
}
constexpr Mat3 operator*(const Mat3& l, const Mat3& r) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m(i, j) = l(i, 0) * r(0, j) + l(i, 1) * r(1, j) + l(i, 2) * r(2, j);
  return m;
}
constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

/// Outer product a b^T.
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

/// Induced infinity norm (max absolute row sum).
double norm_inf(const Mat3& m);
bool is_finite(const Mat3& m);
double determinant(const Mat3& m);

/// Solves m x = b by Gaussian elimination with partial pivoting.
/// Throws SingularLinearSolve when a pivot vanishes relative to the scale of m.
Vec3 solve(const Mat3& m, const Vec3& b);
/// Inverse via three solves; throws SingularLinearSolve.
Mat3 inverse(const Mat3& m);

// ---------------------------------------------------------------------------
// Rotations

inline constexpr double kRotationTolerance = 1e-9;

/// Element of SO(3). Construction validates ||m^T m - I||_inf and det(m)
/// against kRotationTolerance; drift is never repaired silently.
class Rotation {
 public:
  Rotation() : m_(Mat3::identity()) {}

  /// Throws NotARotation when m fails the orthogonality or determinant test.
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  /// Gram-Schmidt on the rows of m, then validation. Explicit opt-in only.
  static Rotation repaired(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const;

  /// ||m^T m - I||_inf.
  static double orthogonality_defect(const Mat3& m);
  double orthogonality_defect() const { return orthogonality_defect(m_); }

  friend Rotation operator*(const Rotation& a, const Rotation& b);
  friend Vec3 operator*(const Rotation& r, const Vec3& v) { return r.m_ * v; }

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;
};

// ---------------------------------------------------------------------------
// so(3) operations

/// Skew matrix of v, hat(v) w = v x w.
constexpr Mat3 hat(const Vec3& v) {
  return Mat3::from_rows({0.0, -v.z, v.y}, {v.z, 0.0, -v.x}, {-v.y, v.x, 0.0});
}

inline constexpr double kSkewTolerance = 1e-9;

/// Inverse of hat. Throws NotSkew when ||m + m^T||_inf exceeds tol.
Vec3 vee(const Mat3& m, double tol = kSkewTolerance);

/// ad_xi eta = xi x eta.
constexpr Vec3 ad(const Vec3& xi, const Vec3& eta) { return cross(xi, eta); }

/// ad*_xi mu = mu x xi, the unique v with v.eta = mu.(xi x eta) for all eta.
constexpr Vec3 coad(const Vec3& xi, const Vec3& mu) { return cross(mu, xi); }

/// Ad_R xi = R xi; hat(R xi) = R hat(xi) R^T.
inline Vec3 ad_rotation(const Rotation& r, const Vec3& xi) { return r * xi; }

/// Cayley map (I - hat(xi)/2)^{-1} (I + hat(xi)/2).
Rotation cay(const Vec3& xi);

/// Inverse right-trivialized tangent of cay: vee((I - hat(xi)/2) hat(delta) (I + hat(xi)/2)).
Vec3 dcay_inv(const Vec3& xi, const Vec3& delta);

/// Matrix D of delta -> dcay_inv(xi, delta), assembled column by column.
Mat3 dcay_inv_matrix(const Vec3& xi);

/// Right-trivialized tangent of cay, the inverse of dcay_inv(xi, .).
/// Throws SingularLinearSolve if D(xi) is singular.
Vec3 dcay(const Vec3& xi, const Vec3& delta);

/// Dual (dcay^{-1}_xi)^* mu, computed as dcay_inv(-xi, mu).
Vec3 dcay_inv_star(const Vec3& xi, const Vec3& mu);

/// Same dual, computed as D(xi)^T mu. Kept as an independent route.
Vec3 dcay_inv_star_transpose(const Vec3& xi, const Vec3& mu);

// ---------------------------------------------------------------------------
// Group difference maps

/// A local diffeomorphism tau: g -> G with tau(0) = e and tau(-xi) = tau(xi)^{-1},
/// together with its right-trivialized tangents.
class GroupDifferenceMap {
 public:
  virtual ~GroupDifferenceMap() = default;
  virtual Rotation tau(const Vec3& xi) const = 0;
  virtual Vec3 dtau(const Vec3& xi, const Vec3& delta) const = 0;
  virtual Vec3 dtau_inv(const Vec3& xi, const Vec3& delta) const = 0;
  virtual Vec3 dtau_inv_star(const Vec3& xi, const Vec3& mu) const = 0;
};

class CayleyMap final : public GroupDifferenceMap {
 public:
  Rotation tau(const Vec3& xi) const override { return cay(xi); }
  Vec3 dtau(const Vec3& xi, const Vec3& delta) const override { return dcay(xi, delta); }
  Vec3 dtau_inv(const Vec3& xi, const Vec3& delta) const override { return dcay_inv(xi, delta); }
  Vec3 dtau_inv_star(const Vec3& xi, const Vec3& mu) const override {
    return dcay_inv_star(xi, mu);
  }
};

}  // namespace thermolie
