#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gaugelab/curvature.hpp"
#include "gaugelab/quadrature.hpp"

namespace gaugelab {

// Smooth bump supported in [-1, 1] with phi(0) = 1.
struct BumpProfile {
  std::function<double(double)> phi, dphi, ddphi;
  double I0 = 0.0;  // integral of phi^2
  double I2 = 0.0;  // integral of s^2 phi^2
  double J0 = 0.0;  // integral of phi'^2

  // phi(s) = exp(1 - 1/(1 - s^2)).
  static BumpProfile standard();
};

// psi_R = Phi_R(r) v with Phi_R(r) = c_R phi((r - R)/w).
struct WeylPacket {
  BumpProfile bump;
  double R = 0.0;
  double w = 0.0;
  double c_R = 0.0;
  Spinor v{};

  double radial(double r) const;
  double radial_d1(double r) const;
  double radial_d2(double r) const;
  // Phi'' + (2/r) Phi'
  double radial_laplacian(double r) const;
  Domain support() const { return Domain::shell(R - w, R + w); }
  SpinorField as_field() const;
  // c_R (4 pi R^2 w I0)^(1/2); tends to 1 as R/w grows
  double leading_order_ratio() const;
};

// c_R from exact radial quadrature of the normalization integral.
WeylPacket build_packet(const BumpProfile& bump, double R, double w, const Spinor& v = {Complex(1), Complex(0)});

// Pointwise terms of (d + A)^2 psi for psi = Phi v, written as the expansion
// Laplacian(Phi) v + 2 A.grad(Phi) v + Phi (div A + A^2) v.
struct LaplacianTerms {
  Spinor lap{}, cross{}, div{}, asq{};
  Spinor total() const;
};
LaplacianTerms laplacian_terms_at(const WeylPacket& packet, const ConnectionField& field, const Vec3& x);

struct TermNorms {
  double lap = 0.0, cross = 0.0, div = 0.0, asq = 0.0, total = 0.0;
};

// L^2 norms of each term and of their actual sum over the packet's shell.
TermNorms laplacian_term_norms(const WeylPacket& packet, const ConnectionField& field,
                               const QuadratureOptions& opts = {});

struct RayleighCheck {
  double quadratic_form = 0.0;  // <Delta_A psi, psi>
  double energy = 0.0;          // ||d_A psi||^2
};
RayleighCheck rayleigh_identity(const WeylPacket& packet, const ConnectionField& field,
                                const QuadratureOptions& opts = {});

// |<psi_R, g>| over the packet's shell.
double packet_overlap(const WeylPacket& packet, const SpinorField& g, const QuadratureOptions& opts = {});

struct WeylRow {
  double R = 0.0, w = 0.0, c_R = 0.0;
  double normalization = 0.0;  // ||psi_R||_{L^2}
  TermNorms norms;
};

struct WeylScan {
  std::vector<WeylRow> rows;
  PowerLawFit fit;  // log(total) against log(R)
};

WeylScan weyl_scaling_scan(const BumpProfile& bump, const ConnectionField& field, const std::vector<double>& R_list,
                           const std::function<double(double)>& width_rule,
                           const Spinor& v = {Complex(1), Complex(0)}, const QuadratureOptions& opts = {});

struct KatoResult {
  double min_C = 0.0;
  Vec3 worst_point{};
  int evaluated = 0;  // sample points where psi != 0
};

// Smallest C with |grad|psi||^2 <= |d_A psi|^2 + C (|F| + |A|^2) |psi|^2 at
// every sample point. Differences within a few ulps of the larger side count as 0.
KatoResult kato_deficit(const ConnectionField& field, const SpinorField& psi, const std::vector<Vec3>& points);

// Sum of three Gaussians with random complex spinor weights, centres and widths.
SpinorField random_smooth_spinor(std::uint64_t seed, double scale = 5.0);

// Uniform samples in the ball of the given radius.
std::vector<Vec3> sample_points(std::uint64_t seed, int count, double radius);

}  // namespace gaugelab
