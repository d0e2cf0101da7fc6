#pragma once

#include <functional>
#include <vector>

#include "gaugelab/lattice.hpp"

namespace gaugelab {

// A_j(x) = traceless anti-Hermitian part of U_j(x), divided by h.
Su2 lattice_potential(const LinkField& links, int dir, std::size_t site);

// h^3-weighted L^2 norm of sum_j [A_j(x) - A_j(x - e_j)] / h over interior sites.
double coulomb_residual(const LinkField& links);

// h^3 sum over links inside the box of (4/h^2)(2 - Re Tr U); tends to ||A||^2.
double gauge_functional(const LinkField& links);

// (h^3 sum |A_j(x)|^2)^(1/2) over links inside the box.
double lattice_connection_norm(const LinkField& links);

double max_unitarity_residual(const LatticeGauge& g);

LatticeGauge sample_gauge(const LatticeSpec& spec, const std::function<GroupElement(const Vec3&)>& g);

struct GaugeFixOptions {
  double omega = 1.7;  // overrelaxation, 1 <= omega < 2
};

struct GaugeFixResult {
  LatticeGauge g;
  LinkField fixed;
  std::vector<double> residual_history;    // entry 0 is the input
  std::vector<double> functional_history;  // same indexing
};

// Red-black relaxation sweeps; each site moves to g = W^dagger / sqrt(det W) with
// W = sum_j [U_j(x) + U_j(x - e_j)^dagger], raised to the power omega. Stops as
// soon as coulomb_residual <= tol. Throws ConvergenceError carrying the
// residual history after max_sweeps.
GaugeFixResult fix_coulomb(const LinkField& links, double tol, int max_sweeps, const GaugeFixOptions& opts = {});

}  // namespace gaugelab
