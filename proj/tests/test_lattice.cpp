#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "gaugelab/errors.hpp"
#include "gaugelab/lattice.hpp"
#include "gaugelab/weyl.hpp"

using namespace gaugelab;

namespace {

GridField random_field(const LatticeSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  GridField f(spec);
  for (auto& s : f.psi) s = {Complex(g(rng), g(rng)), Complex(g(rng), g(rng))};
  return f;
}

GridField sine_mode(const LatticeSpec& spec, int m1, int m2, int m3, const Spinor& v) {
  GridField f(spec);
  const double w = M_PI / (spec.n + 1);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        const double s = std::sin(w * m1 * (i + 1)) * std::sin(w * m2 * (j + 1)) * std::sin(w * m3 * (k + 1));
        f.at(i, j, k) = {s * v[0], s * v[1]};
      }
  return f;
}

double distance(const GridField& a, const GridField& b) {
  GridField d(a.spec);
  for (std::size_t s = 0; s < d.psi.size(); ++s) d.psi[s] = {a.psi[s][0] - b.psi[s][0], a.psi[s][1] - b.psi[s][1]};
  return std::sqrt(norm_squared(d));
}

// closed-form flat spectrum with the twofold spin multiplicity, ascending
std::vector<double> flat_spectrum(const LatticeSpec& spec, int count) {
  std::vector<double> all;
  const int top = std::min(spec.n, 6);
  for (int a = 1; a <= top; ++a)
    for (int b = 1; b <= top; ++b)
      for (int c = 1; c <= top; ++c) all.insert(all.end(), 2, flat_eigenvalue(spec, a, b, c));
  std::sort(all.begin(), all.end());
  all.resize(std::size_t(count));
  return all;
}

const BumpProfile& bump() {
  static const BumpProfile b = BumpProfile::standard();
  return b;
}

}  // namespace

TEST_CASE("lattice spec") {
  const auto s = LatticeSpec::make(2.0, 9);
  CHECK(s.h() == 0.5);
  CHECK(s.sites() == 729u);
  CHECK(s.position(0, 4, 8) == Vec3{-2.0, 0.0, 2.0});
  CHECK(s.index(1, 0, 0) == 81u);
  CHECK(LatticeSpec::with_spacing(0.25, 17).L == 2.0);
  CHECK_THROWS_AS(LatticeSpec::make(1.0, 7), InputError);
  CHECK_THROWS_AS(LatticeSpec::make(0.0, 9), InputError);
}

TEST_CASE("link construction") {
  const auto spec = LatticeSpec::make(3.0, 13);
  const auto flat = make_links(flat_connection(), spec);
  for (const auto& u : flat.U)
    for (const auto& g : u) CHECK((g.w == 1.0 && g.v == Vec3{0, 0, 0}));
  CHECK(max_unitarity_residual(make_links(hedgehog(RadialProfile::smoothed(1.0)), spec)) < 1e-12);
  CHECK(max_unitarity_residual(random_links(spec, 5)) < 1e-12);

  // midpoint rule: U_1 at the origin is exp(h A_1(h/2, 0, 0))
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto links = make_links(A, spec);
  const auto expected = exponential(spec.h() * A({0.5 * spec.h(), 0.0, 0.0})[0]);
  const auto got = links.at(0, 6, 6, 6);
  CHECK(got.w == doctest::Approx(expected.w).epsilon(1e-15));
  for (int a = 0; a < 3; ++a) CHECK(got.v[a] == doctest::Approx(expected.v[a]).epsilon(1e-15));
}

TEST_CASE("flat sine modes are eigenvectors") {
  const auto spec = LatticeSpec::make(1.5, 12);
  const LinkField flat(spec);
  for (auto [a, b, c] : {std::tuple{1, 1, 1}, {1, 2, 3}, {4, 1, 7}}) {
    const auto psi = sine_mode(spec, a, b, c, {Complex(0.6, 0.1), Complex(-0.2, 0.7)});
    const double lambda = flat_eigenvalue(spec, a, b, c);
    GridField target(spec);
    for (std::size_t s = 0; s < psi.psi.size(); ++s) target.psi[s] = {lambda * psi.psi[s][0], lambda * psi.psi[s][1]};
    CHECK(distance(apply_operator(flat, psi), target) <= 1e-12 * lambda * std::sqrt(norm_squared(psi)));
    CHECK(rayleigh_quotient(flat, psi) == doctest::Approx(lambda).epsilon(1e-13));
  }
  CHECK_THROWS_AS(flat_eigenvalue(spec, 0, 1, 1), InputError);
  CHECK_THROWS_AS(apply_operator(flat, GridField(LatticeSpec::make(1.5, 13))), InputError);
}

TEST_CASE("hermiticity") {
  const auto spec = LatticeSpec::make(4.0, 14);
  CHECK(hermiticity_residual(LinkField(spec), 4) < 1e-12);
  CHECK(hermiticity_residual(make_links(hedgehog(RadialProfile::smoothed(1.0)), spec), 4) < 1e-12);
  for (std::uint64_t seed : {1u, 2u, 3u}) CHECK(hermiticity_residual(random_links(spec, seed, 2.0), 4) < 1e-12);
  CHECK_THROWS_AS(hermiticity_residual(LinkField(spec), 0), InputError);
}

TEST_CASE("gauge covariance of the operator") {
  const auto spec = LatticeSpec::make(2.0, 10);
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const auto links = random_links(spec, seed);
    const auto g = random_lattice_gauge(spec, seed + 100);
    const auto psi = random_field(spec, seed + 200);
    const auto lhs = apply_operator(gauge_transform(links, g), gauge_transform(g, psi));
    const auto rhs = gauge_transform(g, apply_operator(links, psi));
    CHECK(distance(lhs, rhs) <= 1e-10 * std::sqrt(norm_squared(rhs)));
    CHECK(rayleigh_quotient(gauge_transform(links, g), gauge_transform(g, psi)) ==
          doctest::Approx(rayleigh_quotient(links, psi)).epsilon(1e-12));
  }
}

TEST_CASE("Rayleigh quotient equals the forward-difference energy") {
  const auto spec = LatticeSpec::make(3.0, 11);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto links = seed == 1 ? make_links(hedgehog(RadialProfile::smoothed(1.0)), spec) : random_links(spec, seed);
    const auto psi = random_field(spec, seed + 50);
    const double q = rayleigh_quotient(links, psi);
    CHECK(q >= -1e-12);
    CHECK(q == doctest::Approx(covariant_gradient_energy(links, psi) / norm_squared(psi)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(rayleigh_quotient(LinkField(spec), GridField(spec)), InputError);
}

TEST_CASE("plaquette curvature") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  SUBCASE("flat links give zero") {
    const auto spec = LatticeSpec::make(2.0, 9);
    CHECK(norm(plaquette_curvature(LinkField(spec), 3, 4, 5)) == 0.0);
    CHECK_THROWS_AS(plaquette_curvature(LinkField(spec), 8, 0, 0), InputError);
  }
  // the plaquette lives at its corner, so compare the gauge-invariant component norms
  SUBCASE("second order against the continuum at the plaquette centre") {
    std::vector<double> errors;
    for (int n : {25, 49}) {
      const auto spec = LatticeSpec::make(3.0, n);
      const auto links = make_links(A, spec);
      const int i = (n - 1) * 2 / 3, j = (n - 1) / 2, k = (n - 1) / 4;
      const auto F = plaquette_curvature(links, i, j, k);
      double err = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          Vec3 centre = spec.position(i, j, k);
          centre[a] += 0.5 * spec.h();
          centre[b] += 0.5 * spec.h();
          const auto exact = curvature_numeric(A, centre, 1e-3, Stencil::Central4);
          err = std::max(err, std::abs(norm(F.component(a, b)) - norm(exact.component(a, b))));
        }
      errors.push_back(err);
    }
    CHECK(errors[0] < 1e-2);
    CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.15));
  }
  SUBCASE("pointwise norm is gauge invariant") {
    const auto spec = LatticeSpec::make(3.0, 12);
    const auto links = make_links(A, spec);
    const auto moved = gauge_transform(links, random_lattice_gauge(spec, 9));
    for (auto [i, j, k] : {std::tuple{1, 2, 3}, {5, 5, 5}, {10, 0, 7}})
      CHECK(norm(plaquette_curvature(moved, i, j, k)) ==
            doctest::Approx(norm(plaquette_curvature(links, i, j, k))).epsilon(1e-12));
  }
}

TEST_CASE("discrete operator converges to the continuum expansion") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto packet = build_packet(bump(), 4.0, 1.6);
  const Vec3 x{3.6, 0.0, 1.2};
  const Spinor exact = laplacian_terms_at(packet, A, x).total();
  std::vector<double> errors;
  for (double h : {0.2, 0.1}) {
    const auto spec = LatticeSpec::make(6.0, int(std::lround(12.0 / h)) + 1);
    const auto out = apply_operator(make_links(A, spec), sample(spec, packet.as_field()));
    const int i = int(std::lround((x[0] + 6.0) / h)), j = int(std::lround((x[1] + 6.0) / h)),
              k = int(std::lround((x[2] + 6.0) / h));
    REQUIRE(spec.position(i, j, k)[0] == doctest::Approx(x[0]));
    const Spinor& d = out.at(i, j, k);
    // Delta_A = -(d + A)^2
    errors.push_back(std::sqrt(std::norm(d[0] + exact[0]) + std::norm(d[1] + exact[1])));
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("lattice Weyl packet tracks the continuum term norms") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto packet = build_packet(bump(), 4.0, 1.6);
  const double continuum = laplacian_term_norms(packet, A).total;
  const auto spec = LatticeSpec::with_spacing(packet.w / 16.0, 121);
  REQUIRE(spec.L > packet.R + packet.w);
  const auto psi = sample(spec, packet.as_field());
  const double lattice = std::sqrt(norm_squared(apply_operator(make_links(A, spec), psi)));
  CHECK(lattice == doctest::Approx(continuum).epsilon(0.1));
  CHECK(norm_squared(psi) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Rayleigh quotients of packets decrease in a large box") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto spec = LatticeSpec::make(32.0, 129);
  const auto links = make_links(A, spec);
  std::vector<double> q;
  for (double R : {spec.L / 4, spec.L / 3, 0.4 * spec.L})
    q.push_back(rayleigh_quotient(links, sample(spec, build_packet(bump(), R, std::sqrt(R)).as_field())));
  CHECK(q[0] > q[1]);
  CHECK(q[1] > q[2]);
  CHECK(q[2] > 0.0);
}

TEST_CASE("lowest eigenvalues") {
  SUBCASE("flat links match the closed form with multiplicity") {
    const auto spec = LatticeSpec::make(M_PI / 2, 12);
    const auto ev = lowest_eigenvalues(LinkField(spec), 6, 1e-9, 400);
    const auto exact = flat_spectrum(spec, 6);
    REQUIRE(ev.size() == 6u);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      CHECK(ev[i].value == doctest::Approx(exact[i]).epsilon(1e-10));
      CHECK(ev[i].residual <= 1e-9 * ev[i].value + 1e-9);
    }
  }
  SUBCASE("spectrum is gauge invariant and nonnegative") {
    const auto spec = LatticeSpec::make(2.0, 9);
    const auto links = random_links(spec, 21);
    const double tol = 1e-9;
    const auto a = lowest_eigenvalues(links, 4, tol, 400);
    const auto b = lowest_eigenvalues(gauge_transform(links, random_lattice_gauge(spec, 22)), 4, tol, 400);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].value >= -tol);
      CHECK(b[i].value == doctest::Approx(a[i].value).epsilon(10 * tol));
    }
    // Kramers pairs: every SU(2) link operator has even multiplicities
    CHECK(a[1].value == doctest::Approx(a[0].value).epsilon(1e-8));
    CHECK(a[3].value == doctest::Approx(a[2].value).epsilon(1e-8));
  }
  SUBCASE("seeded runs are reproducible") {
    const auto spec = LatticeSpec::make(2.0, 8);
    const auto links = random_links(spec, 4);
    const auto a = lowest_eigenvalues(links, 2, 1e-9, 400);
    const auto b = lowest_eigenvalues(links, 2, 1e-9, 400);
    CHECK(a[0].value == b[0].value);
    CHECK(a[1].residual == b[1].residual);
  }
  SUBCASE("input and convergence errors") {
    const auto spec = LatticeSpec::make(1.0, 8);
    const LinkField flat(spec);
    CHECK_THROWS_AS(lowest_eigenvalues(flat, 0, 1e-8, 10), InputError);
    CHECK_THROWS_AS(lowest_eigenvalues(flat, 513, 1e-8, 10), InputError);
    CHECK_THROWS_AS(lowest_eigenvalues(flat, 1, 0.0, 10), InputError);
    try {
      lowest_eigenvalues(random_links(spec, 2), 3, 1e-14, 1);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.best().size() == 3u);
      CHECK(std::is_sorted(e.best().begin(), e.best().end()));
    }
  }
}

TEST_CASE("hedgehog lowest eigenvalue falls as the box grows") {
  std::vector<double> lambda;
  for (double L : {8.0, 16.0, 32.0}) {
    const auto spec = LatticeSpec::with_spacing(2.0, int(L) + 1);
    lambda.push_back(lowest_eigenvalues(make_links(hedgehog(RadialProfile::smoothed(1.0)), spec), 1, 1e-8, 400)[0].value);
  }
  CHECK(lambda[0] > lambda[1]);
  CHECK(lambda[1] > lambda[2]);
  CHECK(lambda[2] > 0.0);
}

TEST_CASE("free spectrum gets denser near zero as the box grows") {
  const double threshold = 1.2;
  std::vector<int> counts;
  for (double L : {2.0, 3.0, 4.0}) {
    const auto spec = LatticeSpec::with_spacing(0.5, int(4 * L) + 1);
    const auto ev = lowest_eigenvalues(LinkField(spec), 20, 1e-9, 400);
    counts.push_back(int(std::count_if(ev.begin(), ev.end(), [&](const Eigenpair& e) { return e.value < threshold; })));
  }
  CHECK(counts[0] < counts[1]);
  CHECK(counts[1] < counts[2]);
}

TEST_CASE("field dump") {
  const auto spec = LatticeSpec::make(1.0, 8);
  const auto psi = random_field(spec, 3);
  const auto dir = std::filesystem::temp_directory_path() / "gaugelab_dump_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "psi.bin";
  write_field_dump(psi, path, "psi");
  CHECK(std::filesystem::file_size(path) == spec.sites() * 4 * sizeof(double));
  std::ifstream bin(path, std::ios::binary);
  double first[4];
  bin.read(reinterpret_cast<char*>(first), sizeof(first));
  CHECK(first[0] == psi.psi[0][0].real());
  CHECK(first[3] == psi.psi[0][1].imag());
  std::ifstream side(path.string() + ".json");
  const auto meta = nlohmann::json::parse(side);
  CHECK(meta["name"] == "psi");
  CHECK(meta["dims"][2] == 8);
  CHECK(meta["spacing"].get<double>() == spec.h());
  std::filesystem::remove_all(dir);
}
