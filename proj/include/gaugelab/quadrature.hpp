#pragma once

#include <functional>
#include <vector>

#include "gaugelab/connection.hpp"

namespace gaugelab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  double tail = 0.0;   // analytic correction beyond r_cut (exterior domains only)
};

struct Domain {
  enum class Kind { Ball, Shell, Exterior };
  Kind kind = Kind::Ball;
  double inner = 0.0;
  double outer = 0.0;  // r_cut for exterior domains

  static Domain ball(double R);
  static Domain shell(double R1, double R2);
  // Truncated at r_cut (default 64 R); the rest is a power-law tail fitted near r_cut.
  static Domain exterior(double R, double r_cut = 0.0);
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  unsigned max_depth = 10;
  int polar = 16;  // Gauss-Legendre nodes in cos(theta); azimuth uses twice as many
  int max_doublings = 3;
};

// Integral of g over [a, b] by adaptive Gauss-Kronrod (15 points).
QuadratureResult integrate_radial(const std::function<double(double)>& g, double a, double b,
                                  const QuadratureOptions& opts = {});

// Integral over the unit sphere of u(omega) with a product rule of the given polar order.
double integrate_sphere(const std::function<double(const Vec3&)>& u, int polar);

// Integral of f over the domain; radial adaptive quadrature times a product
// angular rule that is doubled until two successive orders agree.
QuadratureResult integrate_3d(const std::function<double(const Vec3&)>& f, const Domain& domain,
                              const QuadratureOptions& opts = {});

// (integral of f^p)^(1/p) for non-negative f.
QuadratureResult lp_norm(const std::function<double(const Vec3&)>& f, double p, const Domain& domain,
                         const QuadratureOptions& opts = {});

// chi_R(x) = s((2R - |x|)/R) with s(t) = 6t^5 - 15t^4 + 10t^3 clamped to [0,1].
struct CutoffFunction {
  double R = 1.0;
  double operator()(const Vec3& x) const { return radial(norm(x)); }
  double radial(double r) const;
};

enum class TailTerm { I, II, III };  // |A|, |grad A|, |A|^2, each measured in L^3
const char* to_string(TailTerm t);

struct TailPoint {
  double R = 0.0;
  double value = 0.0;
  double error = 0.0;
  double tail = 0.0;
};

// ||(1 - chi_R) q||_{L^3} for each R.
std::vector<TailPoint> tail_norm_scan(const ConnectionField& field, TailTerm term, const std::vector<double>& R_list,
                                      const QuadratureOptions& opts = {});

// C^2-valued field psi with its partial derivatives.
struct SpinorField {
  std::function<Spinor(const Vec3&)> value;
  std::function<std::array<Spinor, 3>(const Vec3&)> gradient;  // may be empty: fourth-order differences
};

std::array<Spinor, 3> spinor_gradient(const SpinorField& psi, const Vec3& x, double h = 1e-4);

// d_j psi + A_j psi for j = 1..3.
std::array<Spinor, 3> covariant_gradient(const SpinorField& psi, const ConnectionField& field, const Vec3& x);

inline double norm_squared(const Spinor& s) { return std::norm(s[0]) + std::norm(s[1]); }

struct EnergyNorm {
  double l2 = 0.0;              // ||psi||^2
  double covariant_grad = 0.0;  // ||d_A psi||^2
  double error = 0.0;
};

// Both parts of the H^1_A norm. Only ball and shell domains are accepted.
EnergyNorm energy_norm(const SpinorField& psi, const ConnectionField& field, const Domain& domain,
                       const QuadratureOptions& opts = {});

}  // namespace gaugelab
