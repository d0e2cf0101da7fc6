#include "gaugelab/su2.hpp"

#include <algorithm>

#include "gaugelab/errors.hpp"

namespace gaugelab {

int levi_civita(int a, int b, int c) {
  for (int idx : {a, b, c}) {
    if (idx < 1 || idx > 3) throw InputError("levi_civita: index out of range {1,2,3}: " + std::to_string(idx));
  }
  return epsilon(a - 1, b - 1, c - 1);
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] + b.m[k];
  return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int k = 0; k < 4; ++k) r.m[k] = a.m[k] - b.m[k];
  return r;
}

Mat2 adjoint(const Mat2& a) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = std::conj(a(j, i));
  return r;
}

double frobenius_norm(const Mat2& a) {
  double s = 0.0;
  for (const auto& z : a.m) s += std::norm(z);
  return std::sqrt(s);
}

Mat2 to_matrix(const Su2& x) { return to_matrix(embed(x)); }

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  const Vec3 axb = cross(a.v, b.v);
  return {a.w * b.w - dot(a.v, b.v),
          {a.w * b.v[0] + b.w * a.v[0] - axb[0], a.w * b.v[1] + b.w * a.v[1] - axb[1],
           a.w * b.v[2] + b.w * a.v[2] - axb[2]}};
}

Mat2 to_matrix(const GroupElement& g) {
  const Complex i(0.0, 1.0);
  Mat2 r;
  r(0, 0) = g.w + i * g.v[2];
  r(0, 1) = i * g.v[0] + g.v[1];
  r(1, 0) = i * g.v[0] - g.v[1];
  r(1, 1) = g.w - i * g.v[2];
  return r;
}

Spinor act(const GroupElement& g, const Spinor& psi) {
  const Complex i(0.0, 1.0);
  const Complex m00 = g.w + i * g.v[2];
  const Complex m01 = i * g.v[0] + g.v[1];
  const Complex m10 = i * g.v[0] - g.v[1];
  const Complex m11 = g.w - i * g.v[2];
  return {m00 * psi[0] + m01 * psi[1], m10 * psi[0] + m11 * psi[1]};
}

Spinor act(const Su2& x, const Spinor& psi) { return act(embed(x), psi); }

Su2 conjugate(const GroupElement& g, const Su2& x) {
  return traceless_antihermitian_part(g * embed(x) * adjoint(g));
}

GroupElement exponential(const Su2& x) {
  const double theta = norm(x);
  const double half = 0.5 * theta;
  // sin(half)/half; the series keeps full relative accuracy as theta -> 0.
  double sinc;
  if (theta < 1e-6) {
    const double h2 = half * half;
    sinc = 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
  } else {
    sinc = std::sin(half) / half;
  }
  // exp(-(i/2) c.sigma) = cos(|c|/2) I - i sinc * (c/2).sigma
  return {std::cos(half), -0.5 * sinc * x.c};
}

Su2 logarithm(const GroupElement& g) {
  const double s = norm(g.v);
  const double half = std::atan2(s, g.w);
  const double factor = (s < 1e-300) ? 1.0 / g.w : half / s;
  return {-2.0 * factor * g.v};
}

GroupElement power(const GroupElement& g, double t) { return exponential(t * logarithm(g)); }

GroupElement reunitarize(const GroupElement& g) {
  const double n = std::sqrt(g.det());
  return (1.0 / n) * g;
}

double unitarity_residual(const GroupElement& g) {
  const Mat2 u = to_matrix(g);
  const Mat2 d = adjoint(u) * u - Mat2::identity();
  const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  return frobenius_norm(d) + std::abs(det - Complex(1.0));
}

double contraction_identity_residual(const Vec3& x, ContractionSign sign) {
  const double s = (sign == ContractionSign::AsPrinted) ? 1.0 : -1.0;
  double worst = 0.0;
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double lhs = 0.0;
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            for (int m = 0; m < 3; ++m)
              for (int n = 0; n < 3; ++n)
                lhs += epsilon(b, c, d) * epsilon(c, i, m) * epsilon(d, j, n) * x[m] * x[n];
        double rhs = 0.0;
        for (int n = 0; n < 3; ++n) rhs += epsilon(i, j, n) * x[n];
        worst = std::max(worst, std::abs(lhs + s * x[b] * rhs));
      }
  return worst;
}

}  // namespace gaugelab
