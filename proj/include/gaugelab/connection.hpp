#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gaugelab/su2.hpp"

namespace gaugelab {

// Components (A_1, A_2, A_3) of an su(2)-valued one-form at a point.
using ConnectionValue = std::array<Su2, 3>;

inline double norm(const ConnectionValue& a) {
  return std::sqrt(norm_squared(a[0]) + norm_squared(a[1]) + norm_squared(a[2]));
}

// Radial profile K(r) of the hedgehog ansatz together with
// f(r) = (1 - K(r)) / r^2 and f'(r), which is what the field actually uses.
struct RadialProfile {
  std::string name;
  double kappa = 0.0;
  double smoothing = 0.0;   // c in 1 - K = kappa r^2 / (r^3 + c)
  double domain_min = 0.0;  // > 0 for tail-only models that are singular at the origin
  std::function<double(double)> K;
  std::function<double(double)> dK;
  std::function<double(double)> f;
  std::function<double(double)> df;

  // 1 - K = kappa r^2 / (r^3 + kappa r0^3): K(0) = 1, K'(0) = 0, exact 1/r tail.
  static RadialProfile smoothed(double kappa, double r0 = 1.0);
  // 1 - K = kappa r^2 / (r^3 + kappa r0^3) * (1 + r)^-extra_decay.
  static RadialProfile fast_decay(double kappa, double extra_decay, double r0 = 1.0);
  // K = 1 - kappa / r, valid only for r >= domain_min.
  static RadialProfile pure_tail(double kappa, double domain_min = 1.0);
  // K == 1, the zero connection.
  static RadialProfile trivial();
  // Arbitrary K with f derived from it; must be regular at the origin.
  static RadialProfile from_k(std::string name, std::function<double(double)> K, std::function<double(double)> dK);
};

// Immutable smooth map x -> (A_1, A_2, A_3).
class ConnectionField {
 public:
  using Eval = std::function<ConnectionValue(const Vec3&)>;
  using Parameters = std::vector<std::pair<std::string, double>>;

  ConnectionField(std::string name, Eval eval, Parameters parameters = {})
      : name_(std::move(name)), eval_(std::move(eval)), parameters_(std::move(parameters)) {}

  ConnectionValue operator()(const Vec3& x) const { return eval_(x); }
  const std::string& name() const { return name_; }
  const Parameters& parameters() const { return parameters_; }

 private:
  std::string name_;
  Eval eval_;
  Parameters parameters_;
};

ConnectionField flat_connection();

// A_i^a = f(r) eps_{aij} x^j.
ConnectionField hedgehog(const RadialProfile& profile);

// Hedgehog with the smoothed critical profile damped by (1 + r)^-extra_decay.
ConnectionField fast_decay_family(double kappa, double extra_decay);

// Gauge function sample: g(x) and its partial derivatives d_i g(x).
struct GaugeSample {
  GroupElement g;
  std::array<GroupElement, 3> dg;
};
using GaugeFunction = std::function<GaugeSample(const Vec3&)>;

// A~_i = g A_i g^-1 - (d_i g) g^-1, so that d_{A~}(g psi) = g d_A psi.
ConnectionField gauge_transform(const ConnectionField& field, GaugeFunction gauge);

// Scalar function with analytic gradient.
struct ScalarField {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
};

// g(x) = exp(theta(x) n) for a fixed unit axis n.
GaugeFunction axial_gauge(ScalarField theta, const Vec3& axis);

// Product of three axial rotations about random axes with smooth, bounded,
// seeded random angle functions; derivatives are exact.
GaugeFunction random_smooth_gauge(std::uint64_t seed, double amplitude = 1.0, double wavenumber = 0.3);

// Derivatives of g by fourth-order central differences with step h.
GaugeFunction finite_difference_gauge(std::function<GroupElement(const Vec3&)> g, double h = 1e-3);

}  // namespace gaugelab
