#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gaugelab/errors.hpp"
#include "gaugelab/gauge_fixing.hpp"

using namespace gaugelab;

namespace {

LatticeGauge smooth_gauge(const LatticeSpec& spec, std::uint64_t seed) {
  const auto gs = random_smooth_gauge(seed, 1.0, 0.5);
  return sample_gauge(spec, [&](const Vec3& x) { return gs(x).g; });
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

double max_curvature_change(const LinkField& a, const LinkField& b) {
  double worst = 0.0;
  const int n = a.spec.n;
  for (int i = 0; i + 1 < n; i += 3)
    for (int j = 0; j + 1 < n; j += 2)
      for (int k = 0; k + 1 < n; ++k)
        worst = std::max(worst, std::abs(norm(plaquette_curvature(a, i, j, k)) - norm(plaquette_curvature(b, i, j, k))));
  return worst;
}

}  // namespace

TEST_CASE("lattice potential and functional") {
  const auto spec = LatticeSpec::make(4.0, 17);
  const LinkField flat(spec);
  CHECK(coulomb_residual(flat) == 0.0);
  CHECK(gauge_functional(flat) == 0.0);
  CHECK(lattice_connection_norm(flat) == 0.0);

  const auto links = make_links(hedgehog(RadialProfile::smoothed(1.0)), spec);
  // midpoint links: A_j(x) reproduces the field at the link centre to O(h^2)
  const std::size_t s = spec.index(10, 7, 12);
  Vec3 mid = spec.position(10, 7, 12);
  mid[1] += 0.5 * spec.h();
  const Su2 exact = hedgehog(RadialProfile::smoothed(1.0))(mid)[1];
  CHECK(norm(lattice_potential(links, 1, s) - exact) < 1e-2 * norm(exact));
  // (4/h^2)(2 - Re Tr U) h^3 agrees with |A|^2 h^3 to O(h^2 |A|^2)
  CHECK(gauge_functional(links) ==
        doctest::Approx(lattice_connection_norm(links) * lattice_connection_norm(links)).epsilon(1e-2));
}

TEST_CASE("Coulomb residual") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  SUBCASE("hedgehog is divergence free up to O(h^2)") {
    const double coarse = coulomb_residual(make_links(A, LatticeSpec::make(4.0, 17)));
    const double fine = coulomb_residual(make_links(A, LatticeSpec::make(4.0, 33)));
    CHECK(coarse < 0.05);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("a random gauge breaks the Coulomb condition") {
    const auto spec = LatticeSpec::make(4.0, 17);
    const auto links = make_links(A, spec);
    const auto moved = gauge_transform(links, smooth_gauge(spec, 3));
    CHECK(coulomb_residual(moved) > 100 * coulomb_residual(links));
  }
}

TEST_CASE("flat field is accepted at sweep 0") {
  const auto r = fix_coulomb(LinkField(LatticeSpec::make(2.0, 9)), 1e-10, 10);
  CHECK(r.residual_history.size() == 1u);
  for (const auto& g : r.g) CHECK((g.w == 1.0 && g.v == Vec3{0, 0, 0}));
}

TEST_CASE("pure-gauge round trip") {
  const auto spec = LatticeSpec::make(4.0, 17);
  const auto links = gauge_transform(LinkField(spec), smooth_gauge(spec, 3));
  REQUIRE(coulomb_residual(links) > 1.0);
  const auto r = fix_coulomb(links, 1e-6, 1000);
  CHECK(r.residual_history.back() <= 1e-6);
  CHECK(non_increasing(r.functional_history));
  CHECK(r.functional_history.back() < 1e-10);
  CHECK(lattice_connection_norm(r.fixed) < 1e-5);
  CHECK(max_curvature_change(links, r.fixed) < 1e-8);
  CHECK(max_unitarity_residual(r.g) < 1e-12);
  // the residual settles into descent after a short transient
  const std::size_t tail = r.residual_history.size() / 2;
  for (std::size_t i = tail + 1; i < r.residual_history.size(); ++i)
    CHECK(r.residual_history[i] < r.residual_history[tail]);
}

TEST_CASE("randomized hedgehog") {
  const auto spec = LatticeSpec::make(4.0, 17);
  const auto original = make_links(hedgehog(RadialProfile::smoothed(1.0)), spec);
  const auto links = gauge_transform(original, smooth_gauge(spec, 5));
  const auto r = fix_coulomb(links, 1e-6, 1000);
  CHECK(r.residual_history.back() <= 1e-6);
  CHECK(non_increasing(r.functional_history));
  CHECK(max_curvature_change(original, r.fixed) < 1e-8);
  CHECK(lattice_connection_norm(r.fixed) <= lattice_connection_norm(links));
  CHECK(max_unitarity_residual(r.g) < 1e-12);

  // the returned transform reproduces the fixed links
  const auto again = gauge_transform(links, r.g);
  double worst = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t s = 0; s < spec.sites(); ++s) {
      const auto diff = again.U[d][s] - r.fixed.U[d][s];
      worst = std::max(worst, std::abs(diff.w) + norm(diff.v));
    }
  CHECK(worst < 1e-10);

  const auto r2 = fix_coulomb(links, 1e-6, 1000);
  CHECK(r2.residual_history == r.residual_history);
}

TEST_CASE("overrelaxation speeds up convergence") {
  const auto spec = LatticeSpec::make(4.0, 13);
  const auto links = gauge_transform(LinkField(spec), smooth_gauge(spec, 8));
  const auto plain = fix_coulomb(links, 1e-6, 4000, {1.0});
  const auto over = fix_coulomb(links, 1e-6, 4000, {1.7});
  CHECK(over.residual_history.size() < plain.residual_history.size());
  CHECK(non_increasing(plain.functional_history));
}

TEST_CASE("errors") {
  const auto spec = LatticeSpec::make(4.0, 13);
  const auto links = gauge_transform(LinkField(spec), smooth_gauge(spec, 8));
  CHECK_THROWS_AS(fix_coulomb(links, 0.0, 10), InputError);
  CHECK_THROWS_AS(fix_coulomb(links, 1e-6, 10, {2.0}), InputError);
  try {
    fix_coulomb(links, 1e-12, 3);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.best().size() == 4u);
  }
}
