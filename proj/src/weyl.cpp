#include "gaugelab/weyl.hpp"

#include <random>

#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"

namespace gaugelab {

namespace {

Spinor scaled(const Spinor& s, double a) { return {a * s[0], a * s[1]}; }
Spinor plus(const Spinor& a, const Spinor& b) { return {a[0] + b[0], a[1] + b[1]}; }
double real_inner(const Spinor& a, const Spinor& b) { return (std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]).real(); }

double integrate_s(const std::function<double(double)>& g) {
  QuadratureOptions opts;
  opts.rel_tol = 1e-13;
  return integrate_radial(g, -1.0, 1.0, opts).value;
}

double shell_l2(const WeylPacket& p, const std::function<double(const Vec3&)>& density, const QuadratureOptions& opts) {
  return std::sqrt(std::max(0.0, integrate_3d(density, p.support(), opts).value));
}

}  // namespace

BumpProfile BumpProfile::standard() {
  BumpProfile b;
  b.phi = [](double s) {
    const double q = 1.0 - s * s;
    return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
  };
  b.dphi = [phi = b.phi](double s) {
    const double q = 1.0 - s * s;
    return q > 0.0 ? phi(s) * (-2.0 * s / (q * q)) : 0.0;
  };
  b.ddphi = [phi = b.phi](double s) {
    const double q = 1.0 - s * s;
    return q > 0.0 ? phi(s) * (6.0 * s * s * s * s - 2.0) / (q * q * q * q) : 0.0;
  };
  b.I0 = integrate_s([&](double s) { return b.phi(s) * b.phi(s); });
  b.I2 = integrate_s([&](double s) { return s * s * b.phi(s) * b.phi(s); });
  b.J0 = integrate_s([&](double s) { return b.dphi(s) * b.dphi(s); });
  return b;
}

double WeylPacket::radial(double r) const { return c_R * bump.phi((r - R) / w); }
double WeylPacket::radial_d1(double r) const { return c_R / w * bump.dphi((r - R) / w); }
double WeylPacket::radial_d2(double r) const { return c_R / (w * w) * bump.ddphi((r - R) / w); }
double WeylPacket::radial_laplacian(double r) const { return radial_d2(r) + 2.0 / r * radial_d1(r); }

double WeylPacket::leading_order_ratio() const { return c_R * std::sqrt(4.0 * M_PI * R * R * w * bump.I0); }

SpinorField WeylPacket::as_field() const {
  const WeylPacket p = *this;
  return {[p](const Vec3& x) { return scaled(p.v, p.radial(norm(x))); },
          [p](const Vec3& x) {
            const double r = norm(x);
            const double d = r > 0.0 ? p.radial_d1(r) / r : 0.0;
            std::array<Spinor, 3> g;
            for (int j = 0; j < 3; ++j) g[j] = scaled(p.v, d * x[j]);
            return g;
          }};
}

WeylPacket build_packet(const BumpProfile& bump, double R, double w, const Spinor& v) {
  if (!(w > 0.0 && w < R / 2.0)) throw InputError("build_packet: need 0 < w < R/2");
  if (std::abs(norm_squared(v) - 1.0) > 1e-12) throw InputError("build_packet: v must be a unit vector");
  WeylPacket p;
  p.bump = bump;
  p.R = R;
  p.w = w;
  p.v = v;
  // r = R + w s: integral of Phi^2 4 pi r^2 dr = c_R^2 4 pi w integral phi(s)^2 (R + w s)^2 ds
  const double mass = 4.0 * M_PI * w * integrate_s([&](double s) {
                        const double r = R + w * s;
                        return bump.phi(s) * bump.phi(s) * r * r;
                      });
  p.c_R = 1.0 / std::sqrt(mass);
  return p;
}

Spinor LaplacianTerms::total() const { return plus(plus(lap, cross), plus(div, asq)); }

LaplacianTerms laplacian_terms_at(const WeylPacket& packet, const ConnectionField& field, const Vec3& x) {
  const double r = norm(x);
  const ConnectionValue a = field(x);
  const auto grad = connection_gradient(field, x, 1e-3 * std::max(1.0, r), Stencil::Central4);
  LaplacianTerms t;
  const double phi = packet.radial(r);
  t.lap = scaled(packet.v, packet.radial_laplacian(r));
  Su2 a_dot_xhat, divergence;
  for (int j = 0; j < 3; ++j) {
    a_dot_xhat += (x[j] / r) * a[j];
    divergence += grad[j][j];
  }
  t.cross = scaled(act(a_dot_xhat, packet.v), 2.0 * packet.radial_d1(r));
  t.div = scaled(act(divergence, packet.v), phi);
  Spinor asq{};
  for (int j = 0; j < 3; ++j) asq = plus(asq, act(a[j], act(a[j], packet.v)));
  t.asq = scaled(asq, phi);
  return t;
}

TermNorms laplacian_term_norms(const WeylPacket& packet, const ConnectionField& field, const QuadratureOptions& opts) {
  TermNorms n;
  n.lap = shell_l2(packet, [&](const Vec3& x) { return norm_squared(laplacian_terms_at(packet, field, x).lap); }, opts);
  // Terms that vanish identically are pure roundoff; resolve them only down
  // to 1e-14 of the lap term.
  QuadratureOptions small = opts;
  small.abs_tol = std::max(opts.abs_tol, 1e-28 * n.lap * n.lap);
  n.cross =
      shell_l2(packet, [&](const Vec3& x) { return norm_squared(laplacian_terms_at(packet, field, x).cross); }, small);
  n.div = shell_l2(packet, [&](const Vec3& x) { return norm_squared(laplacian_terms_at(packet, field, x).div); }, small);
  n.asq = shell_l2(packet, [&](const Vec3& x) { return norm_squared(laplacian_terms_at(packet, field, x).asq); }, small);
  n.total =
      shell_l2(packet, [&](const Vec3& x) { return norm_squared(laplacian_terms_at(packet, field, x).total()); }, opts);
  return n;
}

RayleighCheck rayleigh_identity(const WeylPacket& packet, const ConnectionField& field,
                                const QuadratureOptions& opts) {
  RayleighCheck c;
  // Delta_A = -(d + A)^2
  c.quadratic_form = -integrate_3d(
                          [&](const Vec3& x) {
                            const Spinor psi = scaled(packet.v, packet.radial(norm(x)));
                            return real_inner(psi, laplacian_terms_at(packet, field, x).total());
                          },
                          packet.support(), opts)
                          .value;
  c.energy = energy_norm(packet.as_field(), field, packet.support(), opts).covariant_grad;
  return c;
}

double packet_overlap(const WeylPacket& packet, const SpinorField& g, const QuadratureOptions& opts) {
  const SpinorField psi = packet.as_field();
  const double re = integrate_3d([&](const Vec3& x) { return real_inner(psi.value(x), g.value(x)); },
                                 packet.support(), opts)
                        .value;
  const double im = integrate_3d(
                        [&](const Vec3& x) {
                          const Spinor a = psi.value(x), b = g.value(x);
                          return (std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]).imag();
                        },
                        packet.support(), opts)
                        .value;
  return std::hypot(re, im);
}

WeylScan weyl_scaling_scan(const BumpProfile& bump, const ConnectionField& field, const std::vector<double>& R_list,
                           const std::function<double(double)>& width_rule, const Spinor& v,
                           const QuadratureOptions& opts) {
  if (R_list.size() < 2) throw InputError("weyl_scaling_scan: need at least 2 radii");
  for (std::size_t k = 1; k < R_list.size(); ++k)
    if (!(R_list[k] > R_list[k - 1])) throw InputError("weyl_scaling_scan: radii must be increasing");
  WeylScan scan;
  scan.rows.resize(R_list.size());
  parallel_for(std::ptrdiff_t(R_list.size()), [&](std::ptrdiff_t k) {
    const double R = R_list[std::size_t(k)];
    const WeylPacket p = build_packet(bump, R, width_rule(R), v);
    WeylRow row;
    row.R = R;
    row.w = p.w;
    row.c_R = p.c_R;
    row.normalization =
        shell_l2(p, [&](const Vec3& x) { return norm_squared(scaled(p.v, p.radial(norm(x)))); }, opts);
    row.norms = laplacian_term_norms(p, field, opts);
    scan.rows[std::size_t(k)] = row;
  });
  std::vector<double> radii, totals;
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& row : scan.rows) {
    radii.push_back(row.R);
    totals.push_back(row.norms.total);
    floor = std::min(floor, row.norms.total);
  }
  if (!(floor > 0.0)) throw AccuracyError("weyl_scaling_scan: total underflowed the quadrature floor", floor, 0.0);
  scan.fit = fit_power_law(radii, totals);
  return scan;
}

KatoResult kato_deficit(const ConnectionField& field, const SpinorField& psi, const std::vector<Vec3>& points) {
  KatoResult out;
  constexpr double roundoff = 64.0 * std::numeric_limits<double>::epsilon();
  for (const Vec3& x : points) {
    const Spinor value = psi.value(x);
    const double mag2 = norm_squared(value);
    if (!(mag2 > 0.0)) continue;
    ++out.evaluated;
    const auto grad = spinor_gradient(psi, x);
    const auto cov = covariant_gradient(psi, field, x);
    // grad|psi| = Re<psi, grad psi> / |psi|
    double grad_abs2 = 0.0, cov2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double d = real_inner(value, grad[j]);
      grad_abs2 += d * d / mag2;
      cov2 += norm_squared(cov[j]);
    }
    double deficit = grad_abs2 - cov2;
    if (deficit <= roundoff * (grad_abs2 + cov2)) deficit = 0.0;
    if (deficit == 0.0) continue;
    const double a = norm(field(x));
    const double weight = (decay_quantity_norm(field, DecayQuantity::F, x) + a * a) * mag2;
    const double C = weight > 0.0 ? deficit / weight : std::numeric_limits<double>::infinity();
    if (C > out.min_C) {
      out.min_C = C;
      out.worst_point = x;
    }
  }
  if (out.evaluated == 0) throw InputError("kato_deficit: psi vanishes at every sample point");
  return out;
}

SpinorField random_smooth_spinor(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-scale / 2, scale / 2), width(scale / 8, 3 * scale / 8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  struct Lump {
    Vec3 c;
    double sigma;
    Spinor u;
  };
  std::vector<Lump> lumps(3);
  for (auto& l : lumps) {
    l.c = {centre(rng), centre(rng), centre(rng)};
    l.sigma = width(rng);
    l.u = {Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))};
  }
  return {[lumps](const Vec3& x) {
            Spinor s{};
            for (const auto& l : lumps) {
              const Vec3 d = x - l.c;
              s = plus(s, scaled(l.u, std::exp(-dot(d, d) / (2 * l.sigma * l.sigma))));
            }
            return s;
          },
          [lumps](const Vec3& x) {
            std::array<Spinor, 3> g{};
            for (const auto& l : lumps) {
              const Vec3 d = x - l.c;
              const double e = std::exp(-dot(d, d) / (2 * l.sigma * l.sigma));
              for (int j = 0; j < 3; ++j) g[j] = plus(g[j], scaled(l.u, -d[j] / (l.sigma * l.sigma) * e));
            }
            return g;
          }};
}

std::vector<Vec3> sample_points(std::uint64_t seed, int count, double radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Vec3> out;
  out.reserve(std::size_t(std::max(count, 0)));
  while (int(out.size()) < count) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    if (norm(x) <= radius) out.push_back(x);
  }
  return out;
}

}  // namespace gaugelab
