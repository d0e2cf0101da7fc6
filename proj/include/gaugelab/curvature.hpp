#pragma once

#include <span>
#include <vector>

#include "gaugelab/connection.hpp"

namespace gaugelab {

// F_ij for i < j, stored as (F_12, F_13, F_23).
struct CurvatureTensor {
  Vec3 x{};
  std::array<Su2, 3> upper{};

  static constexpr int slot(int i, int j) { return i + j - 1; }  // (0,1)->0 (0,2)->1 (1,2)->2
  Su2 component(int i, int j) const {
    if (i == j) return {};
    return i < j ? upper[slot(i, j)] : -1.0 * upper[slot(j, i)];
  }
};

inline double norm(const CurvatureTensor& F) {
  return std::sqrt(norm_squared(F.upper[0]) + norm_squared(F.upper[1]) + norm_squared(F.upper[2]));
}
CurvatureTensor operator-(const CurvatureTensor& a, const CurvatureTensor& b);

enum class Stencil { Central2, Central4 };

// d_k A_i at x by central differences: result[k][i].
std::array<ConnectionValue, 3> connection_gradient(const ConnectionField& field, const Vec3& x, double h,
                                                   Stencil stencil = Stencil::Central2);

// sqrt(sum_{k,i,a} (d_k A_i^a)^2).
double gradient_norm(const ConnectionField& field, const Vec3& x, double h, Stencil stencil = Stencil::Central2);

// [A_i, A_j] only.
CurvatureTensor commutator_part(const ConnectionValue& a, const Vec3& x = {});

// F_ij = d_i A_j - d_j A_i + [A_i, A_j] with finite-difference derivatives.
CurvatureTensor curvature_numeric(const ConnectionField& field, const Vec3& x, double h,
                                  Stencil stencil = Stencil::Central2);

// The Levi-Civita contraction used for the commutator term of the hedgehog
// closed form is printed with the wrong sign; AsPrinted reproduces it,
// Corrected uses +f^2 x^b eps_ijn x^n, which is what [A_i, A_j] actually gives.
enum class HedgehogFormula { Corrected, AsPrinted };

struct HedgehogCurvatureTerms {
  CurvatureTensor radial_derivative;  // f'(r)(x^_i eps_bjk x^k - x^_j eps_bik x^k)
  CurvatureTensor linear;             // -2 f(r) eps_bij
  CurvatureTensor commutator;         // -/+ f(r)^2 x^b eps_ijn x^n
};

HedgehogCurvatureTerms hedgehog_curvature_terms(const RadialProfile& profile, const Vec3& x,
                                                HedgehogFormula formula = HedgehogFormula::Corrected);

CurvatureTensor curvature_analytic_hedgehog(const RadialProfile& profile, const Vec3& x,
                                            HedgehogFormula formula = HedgehogFormula::Corrected);

// 26 cube directions (faces, edges, corners) followed by 50 fixed pseudorandom ones.
const std::vector<Vec3>& sphere_directions();

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double residual = 0.0;   // RMS residual in log space
  std::vector<double> radii;
  std::vector<double> values;
  bool power_law() const { return residual <= 0.1; }
};

// Ordinary least squares of log(value) on log(r). Throws DegenerateFitError
// when any value is zero or non-finite.
PowerLawFit fit_power_law(std::span<const double> radii, std::span<const double> values);

enum class DecayQuantity { A, F, GradA, AwedgeA };
const char* to_string(DecayQuantity q);

// Pointwise norm of the chosen quantity at x.
double decay_quantity_norm(const ConnectionField& field, DecayQuantity quantity, const Vec3& x);

// Fits log(max over sphere of |q|) against log(r) on log-spaced radii.
PowerLawFit decay_exponent_fit(const ConnectionField& field, DecayQuantity quantity, double r_min, double r_max,
                               int samples);

}  // namespace gaugelab
