#include "gaugelab/curvature.hpp"

#include <algorithm>
#include <random>

#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"

namespace gaugelab {

CurvatureTensor operator-(const CurvatureTensor& a, const CurvatureTensor& b) {
  CurvatureTensor r;
  r.x = a.x;
  for (int s = 0; s < 3; ++s) r.upper[s] = a.upper[s] - b.upper[s];
  return r;
}

std::array<ConnectionValue, 3> connection_gradient(const ConnectionField& field, const Vec3& x, double h,
                                                   Stencil stencil) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be > 0");
  std::array<ConnectionValue, 3> grad;
  for (int k = 0; k < 3; ++k) {
    auto at = [&](double t) {
      Vec3 y = x;
      y[k] += t;
      return field(y);
    };
    const ConnectionValue p1 = at(h), m1 = at(-h);
    if (stencil == Stencil::Central2) {
      for (int i = 0; i < 3; ++i) grad[k][i] = (0.5 / h) * (p1[i] - m1[i]);
    } else {
      const ConnectionValue p2 = at(2 * h), m2 = at(-2 * h);
      for (int i = 0; i < 3; ++i)
        grad[k][i] = (1.0 / (12.0 * h)) * (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]);
    }
  }
  return grad;
}

double gradient_norm(const ConnectionField& field, const Vec3& x, double h, Stencil stencil) {
  const auto grad = connection_gradient(field, x, h, stencil);
  double s = 0.0;
  for (const auto& gk : grad)
    for (const auto& gki : gk) s += norm_squared(gki);
  return std::sqrt(s);
}

CurvatureTensor commutator_part(const ConnectionValue& a, const Vec3& x) {
  CurvatureTensor F;
  F.x = x;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) F.upper[CurvatureTensor::slot(i, j)] = commutator(a[i], a[j]);
  return F;
}

CurvatureTensor curvature_numeric(const ConnectionField& field, const Vec3& x, double h, Stencil stencil) {
  const auto grad = connection_gradient(field, x, h, stencil);
  CurvatureTensor F = commutator_part(field(x), x);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) F.upper[CurvatureTensor::slot(i, j)] += grad[i][j] - grad[j][i];
  return F;
}

HedgehogCurvatureTerms hedgehog_curvature_terms(const RadialProfile& profile, const Vec3& x,
                                                HedgehogFormula formula) {
  const double r = norm(x);
  const double f = profile.f(r);
  const double fp = r > 0.0 ? profile.df(r) : 0.0;
  const double sign = formula == HedgehogFormula::AsPrinted ? -1.0 : 1.0;
  HedgehogCurvatureTerms t;
  t.radial_derivative.x = t.linear.x = t.commutator.x = x;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const int s = CurvatureTensor::slot(i, j);
      double eps_ij_x = 0.0;
      for (int n = 0; n < 3; ++n) eps_ij_x += epsilon(i, j, n) * x[n];
      for (int b = 0; b < 3; ++b) {
        double radial = 0.0;
        if (r > 0.0) {
          double ebj = 0.0, ebi = 0.0;
          for (int k = 0; k < 3; ++k) {
            ebj += epsilon(b, j, k) * x[k];
            ebi += epsilon(b, i, k) * x[k];
          }
          radial = fp * (x[i] / r * ebj - x[j] / r * ebi);
        }
        t.radial_derivative.upper[s][b] = radial;
        t.linear.upper[s][b] = -2.0 * f * epsilon(b, i, j);
        t.commutator.upper[s][b] = sign * f * f * x[b] * eps_ij_x;
      }
    }
  return t;
}

CurvatureTensor curvature_analytic_hedgehog(const RadialProfile& profile, const Vec3& x, HedgehogFormula formula) {
  const auto t = hedgehog_curvature_terms(profile, x, formula);
  CurvatureTensor F;
  F.x = x;
  for (int s = 0; s < 3; ++s)
    F.upper[s] = t.radial_derivative.upper[s] + t.linear.upper[s] + t.commutator.upper[s];
  return F;
}

const std::vector<Vec3>& sphere_directions() {
  static const std::vector<Vec3> dirs = [] {
    std::vector<Vec3> d;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          Vec3 v{double(a), double(b), double(c)};
          d.push_back((1.0 / norm(v)) * v);
        }
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
      d.push_back((1.0 / norm(v)) * v);
    }
    return d;
  }();
  return dirs;
}

PowerLawFit fit_power_law(std::span<const double> radii, std::span<const double> values) {
  if (radii.size() != values.size() || radii.size() < 2) throw InputError("fit_power_law: need >= 2 matched samples");
  const std::size_t n = radii.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(values[k] > 0.0) || !std::isfinite(values[k]))
      throw DegenerateFitError("fit_power_law: non-positive sample at r = " + std::to_string(radii[k]));
    lx[k] = std::log(radii[k]);
    ly[k] = std::log(values[k]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) throw InputError("fit_power_law: radii must not all coincide");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = ly[k] - (fit.intercept + fit.slope * lx[k]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / double(n));
  fit.radii.assign(radii.begin(), radii.end());
  fit.values.assign(values.begin(), values.end());
  return fit;
}

const char* to_string(DecayQuantity q) {
  switch (q) {
    case DecayQuantity::A: return "A";
    case DecayQuantity::F: return "F";
    case DecayQuantity::GradA: return "gradA";
    case DecayQuantity::AwedgeA: return "AwedgeA";
  }
  return "?";
}

double decay_quantity_norm(const ConnectionField& field, DecayQuantity quantity, const Vec3& x) {
  // relative step keeps fourth-order roundoff below 1e-12 at large r
  const double h = 1e-3 * std::max(1.0, norm(x));
  switch (quantity) {
    case DecayQuantity::A: return norm(field(x));
    case DecayQuantity::F: return norm(curvature_numeric(field, x, h, Stencil::Central4));
    case DecayQuantity::GradA: return gradient_norm(field, x, h, Stencil::Central4);
    case DecayQuantity::AwedgeA: return norm(commutator_part(field(x), x));
  }
  return 0.0;
}

PowerLawFit decay_exponent_fit(const ConnectionField& field, DecayQuantity quantity, double r_min, double r_max,
                               int samples) {
  if (!(r_min >= 1.0)) throw InputError("decay_exponent_fit: r_min must be >= 1");
  if (!(r_max > 2.0 * r_min)) throw InputError("decay_exponent_fit: r_max must exceed 2 r_min");
  if (samples < 8) throw InputError("decay_exponent_fit: need at least 8 samples");
  std::vector<double> radii(samples), maxima(samples);
  const auto& dirs = sphere_directions();
  parallel_for(samples, [&](std::ptrdiff_t k) {
    const double r = r_min * std::pow(r_max / r_min, double(k) / double(samples - 1));
    double m = 0.0;
    for (const auto& d : dirs) m = std::max(m, decay_quantity_norm(field, quantity, r * d));
    radii[k] = r;
    maxima[k] = m;
  });
  if (std::all_of(maxima.begin(), maxima.end(), [](double v) { return v == 0.0; }))
    throw DegenerateFitError(std::string("decay_exponent_fit: ") + to_string(quantity) +
                             " vanishes identically on the sampled range");
  return fit_power_law(radii, maxima);
}

}  // namespace gaugelab
