#include "gaugelab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <mutex>

#include "gaugelab/curvature.hpp"
#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"

namespace gaugelab {

namespace {

constexpr int radial_pieces = 4;
constexpr int angular_probes = 5;

struct AngularRule {
  std::vector<double> cos_theta, weight;
};

const AngularRule& gauss_legendre(int n) {
  static std::mutex guard;
  static std::map<int, AngularRule> cache;
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  AngularRule rule;
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.cos_theta.push_back(z);
    rule.weight.push_back(w);
    if (z != 0.0) {
      rule.cos_theta.push_back(-z);
      rule.weight.push_back(w);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

struct RadialPlan {
  double a, b;
  bool logarithmic;
};

RadialPlan plan_for(const Domain& d) {
  switch (d.kind) {
    case Domain::Kind::Ball: return {0.0, d.outer, false};
    case Domain::Kind::Shell: return {d.inner, d.outer, false};
    case Domain::Kind::Exterior: return {d.inner, d.outer, true};
  }
  return {0, 0, false};
}

// Radial integral of r^2 * sphere-integral, split into fixed pieces that are
// integrated independently and summed pairwise.
QuadratureResult radial_pass(const std::function<double(const Vec3&)>& f, const RadialPlan& plan, int polar,
                             const QuadratureOptions& opts) {
  auto shell_density = [&](double r) {
    return r * r * integrate_sphere([&](const Vec3& w) { return f(r * w); }, polar);
  };
  std::vector<double> values(radial_pieces), errors(radial_pieces);
  parallel_for(radial_pieces, [&](std::ptrdiff_t k) {
    QuadratureResult piece;
    if (plan.logarithmic) {
      const double ta = std::log(plan.a), tb = std::log(plan.b);
      const double step = (tb - ta) / radial_pieces;
      piece = integrate_radial(
          [&](double t) {
            const double r = std::exp(t);
            return shell_density(r) * r;
          },
          ta + double(k) * step, ta + double(k + 1) * step, opts);
    } else {
      const double step = (plan.b - plan.a) / radial_pieces;
      piece = integrate_radial(shell_density, plan.a + double(k) * step, plan.a + double(k + 1) * step, opts);
    }
    values[std::size_t(k)] = piece.value;
    errors[std::size_t(k)] = piece.error;
  });
  return {pairwise_sum(std::span<const double>(values)), pairwise_sum(std::span<const double>(errors)), 0.0};
}

// Power law fitted to the shell density near r_cut, integrated to infinity.
QuadratureResult power_law_tail(const std::function<double(const Vec3&)>& f, double r_cut, int polar) {
  std::vector<double> radii, density;
  for (int k = 3; k >= 0; --k) {
    const double r = r_cut / std::pow(2.0, k);
    radii.push_back(r);
    density.push_back(std::abs(r * r * integrate_sphere([&](const Vec3& w) { return f(r * w); }, polar)));
  }
  int zeros = 0;
  for (double v : density) zeros += v == 0.0;
  if (zeros == int(density.size())) return {};
  if (zeros > 0) throw AccuracyError("exterior tail: integrand vanishes on part of the fitting window", 0.0, 0.0);

  auto integrate_fit = [&](std::size_t first) {
    const auto fit = fit_power_law(std::span<const double>(radii).subspan(first),
                                   std::span<const double>(density).subspan(first));
    if (!(fit.slope < -1.05))
      throw AccuracyError("exterior tail: fitted decay r^" + std::to_string(fit.slope) + " is not integrable", 0.0,
                          std::numeric_limits<double>::infinity());
    return -std::exp(fit.intercept) * std::pow(r_cut, fit.slope + 1.0) / (fit.slope + 1.0);
  };
  const double wide = integrate_fit(0), narrow = integrate_fit(1);
  return {narrow, std::abs(narrow - wide), narrow};
}

}  // namespace

Domain Domain::ball(double R) {
  if (!(R > 0.0)) throw InputError("ball: radius must be > 0");
  return {Kind::Ball, 0.0, R};
}

Domain Domain::shell(double R1, double R2) {
  if (!(R1 >= 0.0 && R2 > R1)) throw InputError("shell: need 0 <= R1 < R2");
  return {Kind::Shell, R1, R2};
}

Domain Domain::exterior(double R, double r_cut) {
  if (!(R > 0.0)) throw InputError("exterior: radius must be > 0");
  if (r_cut == 0.0) r_cut = 64.0 * R;
  if (!(r_cut > R)) throw InputError("exterior: r_cut must exceed R");
  return {Kind::Exterior, R, r_cut};
}

QuadratureResult integrate_radial(const std::function<double(double)>& g, double a, double b,
                                  const QuadratureOptions& opts) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0, l1 = 0.0;
  // Boost only knows a relative tolerance; fold the absolute one into it using
  // a single-panel estimate of the L1 norm.
  double tol = opts.rel_tol;
  if (opts.abs_tol > 0.0) {
    double rough_error = 0.0, rough_l1 = 0.0;
    GK::integrate(g, a, b, 0, opts.rel_tol, &rough_error, &rough_l1);
    if (rough_l1 > 0.0) tol = std::max(tol, opts.abs_tol / rough_l1);
  }
  const double value = GK::integrate(g, a, b, opts.max_depth, tol, &error, &l1);
  if (!std::isfinite(value)) throw AccuracyError("radial quadrature: non-finite integrand", value, error);
  if (error > std::max(1e3 * opts.rel_tol * l1, opts.abs_tol))
    throw AccuracyError("radial quadrature: refinement budget exhausted", value, error);
  return {value, error, 0.0};
}

double integrate_sphere(const std::function<double(const Vec3&)>& u, int polar) {
  if (polar < 1) throw InputError("integrate_sphere: polar order must be >= 1");
  const AngularRule& rule = gauss_legendre(polar);
  const int azimuthal = 2 * polar;
  const double dphi = 2.0 * M_PI / azimuthal;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.cos_theta.size(); ++i) {
    const double z = rule.cos_theta[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ring = 0.0;
    for (int k = 0; k < azimuthal; ++k) {
      const double phi = (k + 0.5) * dphi;
      ring += u({s * std::cos(phi), s * std::sin(phi), z});
    }
    total += rule.weight[i] * ring * dphi;
  }
  return total;
}

QuadratureResult integrate_3d(const std::function<double(const Vec3&)>& f, const Domain& domain,
                              const QuadratureOptions& opts) {
  const RadialPlan plan = plan_for(domain);
  // Pick the angular order on a few probe radii: orders N and 2N must agree
  // on every probe shell before the radial pass is run at order N.
  int polar = opts.polar;
  double angular = 0.0;
  for (int doubling = 0;; ++doubling) {
    angular = 0.0;
    double scale = 0.0;
    for (int k = 0; k < angular_probes; ++k) {
      const double t = (k + 0.5) / angular_probes;
      const double r = plan.logarithmic ? plan.a * std::pow(plan.b / plan.a, t) : plan.a + t * (plan.b - plan.a);
      auto on_shell = [&](const Vec3& w) { return f(r * w); };
      // weight by the radial measure so the absolute tolerance refers to the 3D integral
      const double weight = plan.logarithmic ? r * r * r * std::log(plan.b / plan.a) : r * r * (plan.b - plan.a);
      const double coarse = weight * integrate_sphere(on_shell, polar);
      const double fine = weight * integrate_sphere(on_shell, 2 * polar);
      angular = std::max(angular, std::abs(fine - coarse));
      scale = std::max(scale, std::abs(fine));
    }
    if (angular <= std::max(1e2 * opts.rel_tol * scale, opts.abs_tol)) {
      angular = scale > 0.0 ? angular / scale : 0.0;
      break;
    }
    if (doubling == opts.max_doublings)
      throw AccuracyError("angular quadrature: orders " + std::to_string(polar) + " and " +
                              std::to_string(2 * polar) + " disagree",
                          0.0, angular);
    polar *= 2;
  }
  const QuadratureResult pass = radial_pass(f, plan, polar, opts);
  QuadratureResult out{pass.value, pass.error + angular * std::abs(pass.value), 0.0};
  if (domain.kind == Domain::Kind::Exterior) {
    const QuadratureResult tail = power_law_tail(f, domain.outer, 2 * polar);
    out.value += tail.value;
    out.error += tail.error;
    out.tail = tail.value;
  }
  return out;
}

QuadratureResult lp_norm(const std::function<double(const Vec3&)>& f, double p, const Domain& domain,
                         const QuadratureOptions& opts) {
  if (!(p >= 1.0)) throw InputError("lp_norm: p must be >= 1");
  const auto integral = integrate_3d([&](const Vec3& x) { return std::pow(std::abs(f(x)), p); }, domain, opts);
  if (integral.value <= 0.0) return {0.0, std::pow(integral.error, 1.0 / p), 0.0};
  const double value = std::pow(integral.value, 1.0 / p);
  const double error = value / (p * integral.value) * integral.error;
  const double truncated = std::max(0.0, integral.value - integral.tail);
  return {value, error, value - std::pow(truncated, 1.0 / p)};
}

double CutoffFunction::radial(double r) const {
  const double t = std::clamp((2.0 * R - r) / R, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

const char* to_string(TailTerm t) {
  switch (t) {
    case TailTerm::I: return "I";
    case TailTerm::II: return "II";
    case TailTerm::III: return "III";
  }
  return "?";
}

std::vector<TailPoint> tail_norm_scan(const ConnectionField& field, TailTerm term, const std::vector<double>& R_list,
                                      const QuadratureOptions& opts) {
  if (R_list.size() < 4) throw InputError("tail_norm_scan: need at least 4 radii");
  for (std::size_t k = 0; k < R_list.size(); ++k) {
    if (!(R_list[k] > 0.0)) throw InputError("tail_norm_scan: radii must be positive");
    if (k > 0 && !(R_list[k] > R_list[k - 1])) throw InputError("tail_norm_scan: radii must be increasing");
  }
  auto quantity = [&](const Vec3& x) {
    switch (term) {
      case TailTerm::I: return norm(field(x));
      case TailTerm::II: return decay_quantity_norm(field, DecayQuantity::GradA, x);
      case TailTerm::III: {
        const double a = norm(field(x));
        return a * a;
      }
    }
    return 0.0;
  };
  std::vector<TailPoint> out(R_list.size());
  parallel_for(std::ptrdiff_t(R_list.size()), [&](std::ptrdiff_t k) {
    const double R = R_list[std::size_t(k)];
    const CutoffFunction chi{R};
    auto cubed = [&](const Vec3& x) {
      const double q = (1.0 - chi(x)) * quantity(x);
      return q * q * q;
    };
    const auto inner = integrate_3d(cubed, Domain::shell(R, 2 * R), opts);
    const auto outer = integrate_3d(cubed, Domain::exterior(2 * R, 64 * R), opts);
    const double total = inner.value + outer.value;
    TailPoint pt{R, 0.0, 0.0, 0.0};
    if (total > 0.0) {
      pt.value = std::cbrt(total);
      pt.error = pt.value / (3.0 * total) * (inner.error + outer.error);
      pt.tail = pt.value - std::cbrt(std::max(0.0, total - outer.tail));
    }
    out[std::size_t(k)] = pt;
  });
  return out;
}

std::array<Spinor, 3> spinor_gradient(const SpinorField& psi, const Vec3& x, double h) {
  if (psi.gradient) return psi.gradient(x);
  std::array<Spinor, 3> out{};
  for (int j = 0; j < 3; ++j) {
    auto at = [&](double t) {
      Vec3 y = x;
      y[j] += t;
      return psi.value(y);
    };
    const Spinor m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
    for (int s = 0; s < 2; ++s) out[j][s] = (m2[s] - 8.0 * m1[s] + 8.0 * p1[s] - p2[s]) / (12.0 * h);
  }
  return out;
}

std::array<Spinor, 3> covariant_gradient(const SpinorField& psi, const ConnectionField& field, const Vec3& x) {
  auto grad = spinor_gradient(psi, x);
  const Spinor value = psi.value(x);
  const ConnectionValue a = field(x);
  for (int j = 0; j < 3; ++j) {
    const Spinor ap = act(a[j], value);
    grad[j][0] += ap[0];
    grad[j][1] += ap[1];
  }
  return grad;
}

EnergyNorm energy_norm(const SpinorField& psi, const ConnectionField& field, const Domain& domain,
                       const QuadratureOptions& opts) {
  if (domain.kind == Domain::Kind::Exterior) throw InputError("energy_norm: psi must be supported in a ball or shell");
  const auto l2 = integrate_3d([&](const Vec3& x) { return norm_squared(psi.value(x)); }, domain, opts);
  const auto grad = integrate_3d(
      [&](const Vec3& x) {
        const auto d = covariant_gradient(psi, field, x);
        return norm_squared(d[0]) + norm_squared(d[1]) + norm_squared(d[2]);
      },
      domain, opts);
  return {l2.value, grad.value, l2.error + grad.error};
}

}  // namespace gaugelab
