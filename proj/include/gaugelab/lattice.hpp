#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gaugelab/curvature.hpp"
#include "gaugelab/quadrature.hpp"

namespace gaugelab {

// n points per axis on [-L, L], spacing h = 2L/(n-1). Every site carries a
// C^2 degree of freedom; the field is taken to vanish one spacing outside.
struct LatticeSpec {
  double L = 1.0;
  int n = 8;

  static LatticeSpec make(double L, int n);
  // Box [-L, L] with L = (n-1) h / 2 for a prescribed spacing.
  static LatticeSpec with_spacing(double h, int n);

  double h() const { return 2.0 * L / (n - 1); }
  std::size_t sites() const { return std::size_t(n) * std::size_t(n) * std::size_t(n); }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * std::size_t(n) + std::size_t(j)) * std::size_t(n) + std::size_t(k);
  }
  Vec3 position(int i, int j, int k) const { return {-L + i * h(), -L + j * h(), -L + k * h()}; }
  bool operator==(const LatticeSpec& o) const { return L == o.L && n == o.n; }
};

struct GridField {
  LatticeSpec spec;
  std::vector<Spinor> psi;

  explicit GridField(const LatticeSpec& s) : spec(s), psi(s.sites()) {}
  Spinor& at(int i, int j, int k) { return psi[spec.index(i, j, k)]; }
  const Spinor& at(int i, int j, int k) const { return psi[spec.index(i, j, k)]; }
};

// h^3 sum conj(a) b
Complex inner(const GridField& a, const GridField& b);
// h^3 sum |psi|^2
double norm_squared(const GridField& a);

GridField sample(const LatticeSpec& spec, const SpinorField& psi);

// U_j(x) on the edge x -> x + h e_j. Edges leaving the box are stored but
// only ever multiply the zero extension.
struct LinkField {
  LatticeSpec spec;
  std::array<std::vector<GroupElement>, 3> U;

  explicit LinkField(const LatticeSpec& s);
  GroupElement& at(int dir, int i, int j, int k) { return U[dir][spec.index(i, j, k)]; }
  const GroupElement& at(int dir, int i, int j, int k) const { return U[dir][spec.index(i, j, k)]; }
};

// U_j(x) = exp(h A_j(x + h/2 e_j)).
LinkField make_links(const ConnectionField& field, const LatticeSpec& spec);

// Independent Haar-like random link per edge, exp of a Gaussian algebra element.
LinkField random_links(const LatticeSpec& spec, std::uint64_t seed, double amplitude = 1.0);

// max deviation from unitarity over all links
double max_unitarity_residual(const LinkField& links);

// (Delta_A psi)(x) = -sum_j [U_j(x) psi(x+e_j) - 2 psi(x) + U_j(x-e_j)^-1 psi(x-e_j)] / h^2
GridField apply_operator(const LinkField& links, const GridField& psi);

// max over random pairs of |<D phi, psi> - <phi, D psi>| / (|phi| |psi|)
double hermiticity_residual(const LinkField& links, int trials, std::uint64_t seed = 7);

struct Eigenpair {
  double value = 0.0;
  double residual = 0.0;  // ||D psi - lambda psi|| / ||psi||
};

struct EigenOptions {
  std::uint64_t seed = 0x5eedULL;
  int block = 0;         // 0: k + 3
  int max_basis = 64;    // stored Krylov vectors per restart cycle
  int degree = 16;       // Chebyshev filter degree after the first cycle
};

// k smallest eigenvalues by block Lanczos with full reorthogonalization, run on a
// Chebyshev filter of the operator, with explicit restarts from the operator's own
// Ritz vectors. Residuals are recomputed explicitly. max_iter bounds the block steps.
// Eigenvectors are returned through vectors when it is non-null, normalized in the h^3 norm.
std::vector<Eigenpair> lowest_eigenvalues(const LinkField& links, int k, double tol, int max_iter,
                                          const EigenOptions& opts = {}, std::vector<GridField>* vectors = nullptr);

// Closed form for flat links: sum_j (2 - 2 cos(pi m_j / (n+1))) / h^2.
double flat_eigenvalue(const LatticeSpec& spec, int m1, int m2, int m3);

// <D psi, psi> / <psi, psi>
double rayleigh_quotient(const LinkField& links, const GridField& psi);

// h^3 sum over every edge touching the box of |U psi(x+e) - psi(x)|^2 / h^2.
double covariant_gradient_energy(const LinkField& links, const GridField& psi);

using LatticeGauge = std::vector<GroupElement>;

LatticeGauge random_lattice_gauge(const LatticeSpec& spec, std::uint64_t seed, double amplitude = 1.0);
// U'_j(x) = g(x) U_j(x) g(x+e_j)^-1; g is the identity outside the box.
LinkField gauge_transform(const LinkField& links, const LatticeGauge& g);
GridField gauge_transform(const LatticeGauge& g, const GridField& psi);

// Plaquette field strength: traceless anti-Hermitian part of
// U_i(x) U_j(x+e_i) U_i(x+e_j)^-1 U_j(x)^-1, divided by h^2. Needs x + e_i + e_j inside the box.
CurvatureTensor plaquette_curvature(const LinkField& links, int i, int j, int k);

// Raw little-endian float64 dump (site-major, then component, then re/im)
// plus a JSON sidecar at path + ".json".
void write_field_dump(const GridField& psi, const std::filesystem::path& path, const std::string& name);

}  // namespace gaugelab
