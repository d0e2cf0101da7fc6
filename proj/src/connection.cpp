#include "gaugelab/connection.hpp"

#include <random>

#include "gaugelab/errors.hpp"

namespace gaugelab {

RadialProfile RadialProfile::smoothed(double kappa, double r0) {
  const double c = kappa * r0 * r0 * r0;
  RadialProfile p;
  p.name = "smoothed";
  p.kappa = kappa;
  p.smoothing = c;
  p.K = [=](double r) { return 1.0 - kappa * r * r / (r * r * r + c); };
  p.dK = [=](double r) {
    const double d = r * r * r + c;
    return -kappa * (2.0 * r * d - 3.0 * r * r * r * r) / (d * d);
  };
  p.f = [=](double r) { return kappa / (r * r * r + c); };
  p.df = [=](double r) {
    const double d = r * r * r + c;
    return -3.0 * kappa * r * r / (d * d);
  };
  if (kappa != 0.0 && c <= 0.0) throw InputError("smoothed profile: kappa * r0^3 must be positive");
  return p;
}

RadialProfile RadialProfile::fast_decay(double kappa, double extra_decay, double r0) {
  if (!(extra_decay > 0.0)) throw InputError("fast_decay_family: extra_decay must be > 0");
  const double c = kappa * r0 * r0 * r0;
  if (kappa != 0.0 && c <= 0.0) throw InputError("fast_decay_family: kappa * r0^3 must be positive");
  const double e = extra_decay;
  RadialProfile p;
  p.name = "fast_decay";
  p.kappa = kappa;
  p.smoothing = c;
  p.f = [=](double r) { return kappa / (r * r * r + c) * std::pow(1.0 + r, -e); };
  p.df = [=](double r) {
    const double d = r * r * r + c;
    const double damp = std::pow(1.0 + r, -e);
    return kappa * (-3.0 * r * r / (d * d) * damp - e * damp / ((1.0 + r) * d));
  };
  p.K = [f = p.f](double r) { return 1.0 - r * r * f(r); };
  p.dK = [f = p.f, df = p.df](double r) { return -(2.0 * r * f(r) + r * r * df(r)); };
  return p;
}

RadialProfile RadialProfile::pure_tail(double kappa, double domain_min) {
  if (!(domain_min > 0.0)) throw InputError("pure_tail: domain_min must be > 0");
  RadialProfile p;
  p.name = "pure_tail";
  p.kappa = kappa;
  p.domain_min = domain_min;
  p.K = [=](double r) { return 1.0 - kappa / r; };
  p.dK = [=](double r) { return kappa / (r * r); };
  p.f = [=](double r) { return kappa / (r * r * r); };
  p.df = [=](double r) { return -3.0 * kappa / (r * r * r * r); };
  return p;
}

RadialProfile RadialProfile::trivial() {
  RadialProfile p;
  p.name = "trivial";
  p.K = [](double) { return 1.0; };
  p.dK = [](double) { return 0.0; };
  p.f = [](double) { return 0.0; };
  p.df = [](double) { return 0.0; };
  return p;
}

RadialProfile RadialProfile::from_k(std::string name, std::function<double(double)> K,
                                    std::function<double(double)> dK) {
  if (std::abs(K(0.0) - 1.0) > 1e-12) throw InputError("profile " + name + ": K(0) != 1, field would be singular");
  if (std::abs(dK(0.0)) > 1e-8) throw InputError("profile " + name + ": K'(0) != 0, field would be singular");
  static constexpr double r_floor = 1e-4;
  RadialProfile p;
  p.name = std::move(name);
  p.K = K;
  p.dK = dK;
  p.f = [K](double r) {
    r = std::max(r, r_floor);
    return (1.0 - K(r)) / (r * r);
  };
  p.df = [K, dK](double r) {
    r = std::max(r, r_floor);
    return -dK(r) / (r * r) - 2.0 * (1.0 - K(r)) / (r * r * r);
  };
  p.kappa = 0.0;
  return p;
}

ConnectionField flat_connection() {
  return ConnectionField("flat", [](const Vec3&) { return ConnectionValue{}; });
}

ConnectionField hedgehog(const RadialProfile& profile) {
  if (profile.domain_min == 0.0) {
    if (std::abs(profile.K(0.0) - 1.0) > 1e-12 || !std::isfinite(profile.f(0.0)))
      throw InputError("hedgehog: profile " + profile.name + " violates K(0) = 1");
  }
  const double rmin = profile.domain_min;
  auto f = profile.f;
  ConnectionField::Parameters params{{"kappa", profile.kappa}};
  if (profile.smoothing > 0.0) params.emplace_back("smoothing", profile.smoothing);
  return ConnectionField(
      "hedgehog_" + profile.name,
      [f, rmin](const Vec3& x) {
        const double r = norm(x);
        if (r < rmin) throw InputError("hedgehog: tail-only profile evaluated inside its domain");
        const double fr = f(r);
        ConnectionValue a;
        for (int i = 0; i < 3; ++i)
          for (int s = 0; s < 3; ++s) {
            double sum = 0.0;
            for (int j = 0; j < 3; ++j) sum += epsilon(s, i, j) * x[j];
            a[i][s] = fr * sum;
          }
        return a;
      },
      std::move(params));
}

ConnectionField fast_decay_family(double kappa, double extra_decay) {
  const auto profile = RadialProfile::fast_decay(kappa, extra_decay);
  const auto base = hedgehog(profile);
  return ConnectionField("fast_decay", [base](const Vec3& x) { return base(x); },
                         {{"kappa", kappa}, {"extra_decay", extra_decay}});
}

ConnectionField gauge_transform(const ConnectionField& field, GaugeFunction gauge) {
  auto params = field.parameters();
  return ConnectionField(
      field.name() + "_gauged",
      [field, gauge = std::move(gauge)](const Vec3& x) {
        const GaugeSample s = gauge(x);
        if (std::abs(s.g.det() - 1.0) > 1e-10) throw InputError("gauge_transform: gauge sample is not unitary");
        const GroupElement ginv = adjoint(s.g);
        const ConnectionValue a = field(x);
        ConnectionValue out;
        for (int i = 0; i < 3; ++i)
          out[i] = conjugate(s.g, a[i]) - traceless_antihermitian_part(s.dg[i] * ginv);
        return out;
      },
      std::move(params));
}

GaugeFunction axial_gauge(ScalarField theta, const Vec3& axis) {
  const double n = norm(axis);
  if (n == 0.0) throw InputError("axial_gauge: zero axis");
  const Su2 unit{(1.0 / n) * axis};
  return [theta = std::move(theta), unit](const Vec3& x) {
    const double t = theta.value(x);
    const Vec3 grad = theta.gradient(x);
    GaugeSample s;
    s.g = exponential(t * unit);
    const GroupElement generator_g = embed(unit) * s.g;
    for (int i = 0; i < 3; ++i) s.dg[i] = grad[i] * generator_g;
    return s;
  };
}

GaugeFunction random_smooth_gauge(std::uint64_t seed, double amplitude, double wavenumber) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  auto random_unit = [&] {
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    return (1.0 / norm(v)) * v;
  };
  std::array<GaugeFunction, 3> factors;
  for (auto& factor : factors) {
    const Vec3 axis = random_unit();
    const Vec3 k = wavenumber * random_unit();
    const double phi = phase(rng);
    ScalarField theta{[=](const Vec3& x) { return amplitude * std::sin(dot(k, x) + phi); },
                      [=](const Vec3& x) { return (amplitude * std::cos(dot(k, x) + phi)) * k; }};
    factor = axial_gauge(std::move(theta), axis);
  }
  return [factors](const Vec3& x) {
    const GaugeSample a = factors[0](x), b = factors[1](x), c = factors[2](x);
    GaugeSample s;
    s.g = a.g * b.g * c.g;
    for (int i = 0; i < 3; ++i) s.dg[i] = a.dg[i] * b.g * c.g + a.g * b.dg[i] * c.g + a.g * b.g * c.dg[i];
    return s;
  };
}

GaugeFunction finite_difference_gauge(std::function<GroupElement(const Vec3&)> g, double h) {
  if (!(h > 0.0)) throw InputError("finite_difference_gauge: h must be > 0");
  return [g = std::move(g), h](const Vec3& x) {
    GaugeSample s;
    s.g = g(x);
    for (int i = 0; i < 3; ++i) {
      auto shifted = [&](double t) {
        Vec3 y = x;
        y[i] += t;
        return g(y);
      };
      s.dg[i] = (1.0 / (12.0 * h)) *
                (shifted(-2 * h) - 8.0 * shifted(-h) + 8.0 * shifted(h) - shifted(2 * h));
    }
    return s;
  };
}

}  // namespace gaugelab
