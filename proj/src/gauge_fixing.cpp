#include "gaugelab/gauge_fixing.hpp"

#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"

namespace gaugelab {

namespace {

struct Site {
  int idx[3];
};

Site site_of(const LatticeSpec& spec, std::size_t s) {
  const int n = spec.n;
  return {{int(s / (std::size_t(n) * n)), int(s / n % n), int(s % n)}};
}

std::size_t stride(const LatticeSpec& spec, int dir) {
  const std::size_t n = std::size_t(spec.n);
  return dir == 0 ? n * n : dir == 1 ? n : 1;
}

// sweep over one colour of the checkerboard
void relax(LinkField& links, LatticeGauge& g, int colour, double omega) {
  const auto& spec = links.spec;
  const int n = spec.n;
  std::vector<std::size_t> sites;
  sites.reserve(spec.sites() / 2 + 1);
  for (std::size_t s = 0; s < spec.sites(); ++s) {
    const Site x = site_of(spec, s);
    if ((x.idx[0] + x.idx[1] + x.idx[2]) % 2 == colour) sites.push_back(s);
  }
  parallel_for(std::ptrdiff_t(sites.size()), [&](std::ptrdiff_t t) {
    const std::size_t s = sites[std::size_t(t)];
    const Site x = site_of(spec, s);
    GroupElement W{0.0, {0.0, 0.0, 0.0}};
    for (int d = 0; d < 3; ++d) {
      if (x.idx[d] + 1 < n) W = W + links.U[d][s];
      if (x.idx[d] > 0) W = W + adjoint(links.U[d][s - stride(spec, d)]);
    }
    const double det = W.det();
    if (!(det > 1e-300)) return;
    GroupElement r = (1.0 / std::sqrt(det)) * adjoint(W);
    if (omega != 1.0) r = reunitarize(power(r, omega));
    for (int d = 0; d < 3; ++d) {
      links.U[d][s] = reunitarize(r * links.U[d][s]);
      if (x.idx[d] > 0) {
        auto& back = links.U[d][s - stride(spec, d)];
        back = reunitarize(back * adjoint(r));
      }
    }
    g[s] = reunitarize(r * g[s]);
  });
}

}  // namespace

Su2 lattice_potential(const LinkField& links, int dir, std::size_t site) {
  return (1.0 / links.spec.h()) * traceless_antihermitian_part(links.U[dir][site]);
}

double coulomb_residual(const LinkField& links) {
  const auto& spec = links.spec;
  const int n = spec.n;
  const double h = spec.h();
  const double sum = deterministic_reduce<double>(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const Site x = site_of(spec, std::size_t(s));
    for (int d = 0; d < 3; ++d)
      if (x.idx[d] == 0 || x.idx[d] == n - 1) return 0.0;
    Su2 div;
    for (int d = 0; d < 3; ++d)
      div += lattice_potential(links, d, std::size_t(s)) - lattice_potential(links, d, std::size_t(s) - stride(spec, d));
    return norm_squared((1.0 / h) * div);
  });
  return std::sqrt(h * h * h * sum);
}

double gauge_functional(const LinkField& links) {
  const auto& spec = links.spec;
  const double h = spec.h();
  const double sum = deterministic_reduce<double>(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const Site x = site_of(spec, std::size_t(s));
    double e = 0.0;
    for (int d = 0; d < 3; ++d)
      if (x.idx[d] + 1 < spec.n) e += 2.0 - 2.0 * links.U[d][std::size_t(s)].w;
    return e;
  });
  return 4.0 * h * sum;
}

double lattice_connection_norm(const LinkField& links) {
  const auto& spec = links.spec;
  const double h = spec.h();
  const double sum = deterministic_reduce<double>(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const Site x = site_of(spec, std::size_t(s));
    double e = 0.0;
    for (int d = 0; d < 3; ++d)
      if (x.idx[d] + 1 < spec.n) e += norm_squared(lattice_potential(links, d, std::size_t(s)));
    return e;
  });
  return std::sqrt(h * h * h * sum);
}

double max_unitarity_residual(const LatticeGauge& g) {
  double worst = 0.0;
  for (const auto& e : g) worst = std::max(worst, unitarity_residual(e));
  return worst;
}

LatticeGauge sample_gauge(const LatticeSpec& spec, const std::function<GroupElement(const Vec3&)>& g) {
  LatticeGauge out(spec.sites());
  parallel_for(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const Site x = site_of(spec, std::size_t(s));
    out[std::size_t(s)] = g(spec.position(x.idx[0], x.idx[1], x.idx[2]));
  });
  return out;
}

GaugeFixResult fix_coulomb(const LinkField& links, double tol, int max_sweeps, const GaugeFixOptions& opts) {
  if (!(tol > 0.0)) throw InputError("fix_coulomb needs tol > 0");
  if (max_sweeps < 0) throw InputError("fix_coulomb needs max_sweeps >= 0");
  if (!(opts.omega >= 1.0 && opts.omega < 2.0)) throw InputError("overrelaxation parameter must lie in [1, 2)");
  GaugeFixResult result{LatticeGauge(links.spec.sites()), links, {}, {}};
  result.residual_history.push_back(coulomb_residual(links));
  result.functional_history.push_back(gauge_functional(links));
  for (int sweep = 0; result.residual_history.back() > tol; ++sweep) {
    if (sweep == max_sweeps)
      throw ConvergenceError("fix_coulomb: residual above tol after max_sweeps", result.residual_history);
    relax(result.fixed, result.g, 0, opts.omega);
    relax(result.fixed, result.g, 1, opts.omega);
    result.residual_history.push_back(coulomb_residual(result.fixed));
    result.functional_history.push_back(gauge_functional(result.fixed));
  }
  return result;
}

}  // namespace gaugelab
