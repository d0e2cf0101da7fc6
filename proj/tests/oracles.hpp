#pragma once

// Test-only reference computations. Nothing here calls into the library's
// algebra; these are the independent routes the unit tests compare against.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using CMat = std::array<std::array<C, 2>, 2>;

inline CMat zero() { return {{{C(0), C(0)}, {C(0), C(0)}}}; }
inline CMat eye() { return {{{C(1), C(0)}, {C(0), C(1)}}}; }

inline CMat mul(const CMat& a, const CMat& b) {
  CMat r = zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}
inline CMat add(const CMat& a, const CMat& b, C s = 1.0) {
  CMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + s * b[i][j];
  return r;
}
inline CMat dagger(const CMat& a) {
  CMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = std::conj(a[j][i]);
  return r;
}
inline double fro(const CMat& a) {
  double s = 0;
  for (auto& row : a)
    for (auto& z : row) s += std::norm(z);
  return std::sqrt(s);
}

inline CMat pauli(int a) {
  const C i(0, 1);
  if (a == 0) return {{{C(0), C(1)}, {C(1), C(0)}}};
  if (a == 1) return {{{C(0), -i}, {i, C(0)}}};
  return {{{C(1), C(0)}, {C(0), C(-1)}}};
}

// tau_a = -(i/2) sigma_a
inline CMat tau(int a) {
  CMat t = pauli(a);
  for (auto& row : t)
    for (auto& z : row) z *= C(0, -0.5);
  return t;
}

inline CMat from_coeffs(const std::array<double, 3>& c) {
  CMat m = zero();
  for (int a = 0; a < 3; ++a) m = add(m, tau(a), c[a]);
  return m;
}

// c^a = -2 Re Tr(tau_a M) for M in su(2).
inline std::array<double, 3> to_coeffs(const CMat& m) {
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const CMat p = mul(tau(a), m);
    c[a] = -2.0 * (p[0][0] + p[1][1]).real();
  }
  return c;
}

// Scaling-and-squaring with a 20-term Taylor series.
inline CMat expm(const CMat& a) {
  int squarings = 0;
  double n = fro(a);
  while (n > 0.25) {
    n *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  CMat x = add(zero(), a, scale);
  CMat term = eye(), sum = eye();
  for (int k = 1; k <= 20; ++k) {
    term = mul(term, x);
    for (auto& row : term)
      for (auto& z : row) z /= double(k);
    sum = add(sum, term);
  }
  for (int s = 0; s < squarings; ++s) sum = mul(sum, sum);
  return sum;
}

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  auto simple = [&](double l, double r, double fl, double fm, double fr) { return (r - l) / 6.0 * (fl + 4 * fm + fr); };
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double l, double r, double fl, double fm, double fr, double whole, double eps, int d) -> double {
    const double m = 0.5 * (l + r);
    const double lm = 0.5 * (l + m), rm = 0.5 * (m + r);
    const double flm = f(lm), frm = f(rm);
    const double left = simple(l, m, fl, flm, fm), right = simple(m, r, fm, frm, fr);
    if (d <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15.0;
    return rec(l, m, fl, flm, fm, left, eps / 2, d - 1) + rec(m, r, fm, frm, fr, right, eps / 2, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, simple(a, b, fa, fm, fb), tol, depth);
}

// Least-squares slope of log v against log r.
inline double loglog_slope(const std::vector<double>& r, const std::vector<double>& v) {
  std::vector<double> lr, lv;
  for (std::size_t k = 0; k < r.size(); ++k) {
    lr.push_back(std::log(r[k]));
    lv.push_back(std::log(v[k]));
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < r.size(); ++k) mx += lr[k], my += lv[k];
  mx /= double(r.size());
  my /= double(r.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    sxy += (lr[k] - mx) * (lv[k] - my);
    sxx += (lr[k] - mx) * (lr[k] - mx);
  }
  return sxy / sxx;
}

inline double smoothstep(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  return 10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t;
}

// ||(1 - chi_R) q||_{L^3} for a radial q, by 1D Simpson on r in [R, infinity)
// after the substitution r = R / u.
inline double radial_tail(const std::function<double(double)>& q, double R) {
  auto integrand = [&](double u) {
    if (u <= 0) return 0.0;
    const double r = R / u;
    const double v = (1.0 - smoothstep((2 * R - r) / R)) * q(r);
    return v * v * v * 4 * M_PI * r * r * R / (u * u);
  };
  return std::cbrt(simpson(integrand, 0.0, 0.5, 1e-14) + simpson(integrand, 0.5, 1.0, 1e-14));
}

}  // namespace oracle
