#pragma once

// su(2) in the basis tau_a = -(i/2) sigma_a, so that [tau_a, tau_b] = eps_abc tau_c.
// Lie-algebra elements are stored by their three real coefficients; group
// elements (and the real span of {I, i sigma_a}, which contains both SU(2)
// and its tangent vectors) are stored as w I + i v.sigma.

#include <array>
#include <cmath>
#include <complex>

namespace gaugelab {

using Vec3 = std::array<double, 3>;
using Complex = std::complex<double>;
using Spinor = std::array<Complex, 2>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Zero-based Levi-Civita symbol.
constexpr int epsilon(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((i + 1) % 3 == j) ? 1 : -1;
}

// One-based Levi-Civita symbol; indices outside {1,2,3} throw InputError.
int levi_civita(int a, int b, int c);

struct Su2 {
  Vec3 c{0.0, 0.0, 0.0};

  Su2& operator+=(const Su2& o) {
    for (int a = 0; a < 3; ++a) c[a] += o.c[a];
    return *this;
  }
  Su2& operator-=(const Su2& o) {
    for (int a = 0; a < 3; ++a) c[a] -= o.c[a];
    return *this;
  }
  double operator[](int a) const { return c[a]; }
  double& operator[](int a) { return c[a]; }
};

inline Su2 operator+(Su2 a, const Su2& b) { return a += b; }
inline Su2 operator-(Su2 a, const Su2& b) { return a -= b; }
inline Su2 operator*(double s, const Su2& a) { return {s * a.c}; }
inline double norm(const Su2& x) { return norm(x.c); }
inline double norm_squared(const Su2& x) { return dot(x.c, x.c); }

// [x, y] in coefficients: the cross product of the coefficient vectors.
inline Su2 commutator(const Su2& x, const Su2& y) { return {cross(x.c, y.c)}; }

// Dense complex 2x2 matrix, row-major.
struct Mat2 {
  std::array<Complex, 4> m{};

  Complex& operator()(int r, int c) { return m[2 * r + c]; }
  const Complex& operator()(int r, int c) const { return m[2 * r + c]; }
  static Mat2 identity() { return {{Complex(1), Complex(0), Complex(0), Complex(1)}}; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 adjoint(const Mat2& a);
double frobenius_norm(const Mat2& a);

Mat2 to_matrix(const Su2& x);

// Element w I + i v.sigma of the real quaternion algebra. Unit elements are SU(2).
struct GroupElement {
  double w = 1.0;
  Vec3 v{0.0, 0.0, 0.0};

  static GroupElement identity() { return {}; }
  double det() const { return w * w + dot(v, v); }
};

GroupElement operator*(const GroupElement& a, const GroupElement& b);
inline GroupElement operator+(const GroupElement& a, const GroupElement& b) { return {a.w + b.w, a.v + b.v}; }
inline GroupElement operator-(const GroupElement& a, const GroupElement& b) { return {a.w - b.w, a.v - b.v}; }
inline GroupElement operator*(double s, const GroupElement& a) { return {s * a.w, s * a.v}; }
inline GroupElement adjoint(const GroupElement& g) { return {g.w, -1.0 * g.v}; }

// Embedding of the Lie algebra: sum_a c^a tau_a = -(i/2) c.sigma.
inline GroupElement embed(const Su2& x) { return {0.0, -0.5 * x.c}; }

// Projection onto the traceless anti-Hermitian part, returned as coefficients.
inline Su2 traceless_antihermitian_part(const GroupElement& g) { return {-2.0 * g.v}; }

Mat2 to_matrix(const GroupElement& g);
Spinor act(const GroupElement& g, const Spinor& psi);
Spinor act(const Su2& x, const Spinor& psi);

// g X g^{-1} for unit g.
Su2 conjugate(const GroupElement& g, const Su2& x);

// exp(sum_a c^a tau_a) by the closed Rodrigues form.
GroupElement exponential(const Su2& x);

// Unit g = exp(x) with |x| <= 2 pi; inverse of exponential on that range.
Su2 logarithm(const GroupElement& g);

// g^t along the one-parameter subgroup through g.
GroupElement power(const GroupElement& g, double t);

// Rescales to unit determinant; removes drift from repeated products.
GroupElement reunitarize(const GroupElement& g);

// ||U^dagger U - I||_F + |det U - 1| evaluated on the dense matrix.
double unitarity_residual(const GroupElement& g);

enum class ContractionSign {
  AsPrinted,  // eps_bcd eps_cim eps_djn x^m x^n = -x^b eps_ijn x^n
  Corrected,  // ... = +x^b eps_ijn x^n
};

// max_{b,i,j} |eps_bcd eps_cim eps_djn x^m x^n -/+ x^b eps_ijn x^n| by the full index sum.
double contraction_identity_residual(const Vec3& x, ContractionSign sign);

// Residual of the identity in the form used for the hedgehog commutator term.
inline double contraction_identity_check(const Vec3& x) {
  return contraction_identity_residual(x, ContractionSign::AsPrinted);
}

}  // namespace gaugelab
