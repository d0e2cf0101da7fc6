#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gaugelab/errors.hpp"
#include "gaugelab/weyl.hpp"
#include "oracles.hpp"

using namespace gaugelab;

namespace {

const BumpProfile& bump() {
  static const BumpProfile b = BumpProfile::standard();
  return b;
}

double packet_mass(const WeylPacket& p) {
  return integrate_3d([&](const Vec3& x) { return norm_squared(p.as_field().value(x)); }, p.support()).value;
}

}  // namespace

TEST_CASE("bump profile") {
  const auto& b = bump();
  CHECK(b.phi(0.0) == 1.0);
  CHECK(b.phi(1.0) == 0.0);
  CHECK(b.phi(-1.2) == 0.0);
  CHECK(b.dphi(1.0) == 0.0);
  CHECK(b.ddphi(-1.0) == 0.0);
  const double I0 = oracle::simpson([&](double s) { return b.phi(s) * b.phi(s); }, -1, 1, 1e-15);
  CHECK(b.I0 == doctest::Approx(I0).epsilon(1e-11));
  CHECK(b.I0 > 0.0);
  for (double s : {-0.7, -0.2, 0.1, 0.55, 0.9}) {
    const double h = 1e-5;
    CHECK(b.dphi(s) == doctest::Approx((b.phi(s + h) - b.phi(s - h)) / (2 * h)).epsilon(1e-7));
    CHECK(b.ddphi(s) == doctest::Approx((b.dphi(s + h) - b.dphi(s - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("packet normalization") {
  for (auto [R, w] : {std::pair{16.0, 4.0}, {100.0, 10.0}, {1024.0, 32.0}, {50.0, 24.0}}) {
    const auto p = build_packet(bump(), R, w);
    CHECK(packet_mass(p) == doctest::Approx(1.0).epsilon(1e-10));
    // c_R (4 pi R^2 w I0)^(1/2) = (1 + (w/R)^2 I2/I0)^(-1/2) exactly
    const double exact = 1.0 / std::sqrt(1.0 + (w / R) * (w / R) * bump().I2 / bump().I0);
    CHECK(p.leading_order_ratio() == doctest::Approx(exact).epsilon(1e-12));
    CHECK(std::abs(p.leading_order_ratio() - 1.0) <= (w / R) * (w / R));
  }
  CHECK_THROWS_AS(build_packet(bump(), 10.0, 5.0), InputError);
  CHECK_THROWS_AS(build_packet(bump(), 10.0, 0.0), InputError);
  CHECK_THROWS_AS(build_packet(bump(), 10.0, 2.0, {Complex(1), Complex(1)}), InputError);
}

TEST_CASE("gradient norm scales like 1/w") {
  std::vector<double> scaled;
  for (auto [R, w] : {std::pair{100.0, 10.0}, {400.0, 20.0}, {1600.0, 40.0}}) {
    const auto p = build_packet(bump(), R, w);
    const auto e = energy_norm(p.as_field(), flat_connection(), p.support());
    scaled.push_back(w * std::sqrt(e.covariant_grad));
  }
  // w ||grad Phi|| -> sqrt(J0 / I0)
  for (double s : scaled) CHECK(s == doctest::Approx(std::sqrt(bump().J0 / bump().I0)).epsilon(0.02));
}

TEST_CASE("term norms for the flat field") {
  const auto p = build_packet(bump(), 64.0, 8.0);
  const auto n = laplacian_term_norms(p, flat_connection());
  CHECK(n.cross == 0.0);
  CHECK(n.div == 0.0);
  CHECK(n.asq == 0.0);
  CHECK(n.total == doctest::Approx(n.lap).epsilon(1e-14));
}

TEST_CASE("term norms for the hedgehog") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto p64 = build_packet(bump(), 64.0, 8.0);
  const auto n64 = laplacian_term_norms(p64, A);
  CHECK(n64.cross <= 1e-10);
  CHECK(n64.div <= 1e-10);
  CHECK(n64.asq > 0.0);

  // sum_j A_j^2 v = -|A|^2/4 v, so asq ~ |A(R)|^2 / 4 = 1/(2 R^4)
  CHECK(n64.asq == doctest::Approx(0.5 / std::pow(64.0, 4)).epsilon(0.05));

  // two-point scaling consistency: lap ~ 1/w^2, asq ~ R^-4
  const double w32 = std::sqrt(32.0);
  const auto n32 = laplacian_term_norms(build_packet(bump(), 32.0, w32), A);
  CHECK(n64.lap == doctest::Approx(n32.lap * (w32 * w32) / 64.0).epsilon(0.2));
  CHECK(n64.asq == doctest::Approx(n32.asq / 16.0).epsilon(0.2));

  // v-independence
  const auto q = build_packet(bump(), 64.0, 8.0, {Complex(0, 0.6), Complex(0.8, 0)});
  const auto nq = laplacian_term_norms(q, A);
  CHECK(nq.total == doctest::Approx(n64.total).epsilon(1e-9));
}

TEST_CASE("doubling w reduces the lap term about fourfold") {
  const auto a = laplacian_term_norms(build_packet(bump(), 400.0, 10.0), flat_connection());
  const auto b = laplacian_term_norms(build_packet(bump(), 400.0, 20.0), flat_connection());
  CHECK(a.lap / b.lap == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Rayleigh quotient identity") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  for (double R : {16.0, 64.0, 256.0}) {
    const auto p = build_packet(bump(), R, std::sqrt(R));
    const auto c = rayleigh_identity(p, A);
    CHECK(c.quadratic_form == doctest::Approx(c.energy).epsilon(1e-8));
  }
  const auto p = build_packet(bump(), 64.0, 8.0);
  const auto e = energy_norm(p.as_field(), A, p.support());
  CHECK(e.covariant_grad < 1.0);
  const auto e2 = energy_norm(build_packet(bump(), 256.0, 16.0).as_field(), A, Domain::shell(240, 272));
  CHECK(e2.covariant_grad < e.covariant_grad);
}

TEST_CASE("Weyl scaling scan") {
  const std::vector<double> R_list{16, 32, 64, 128, 256, 512, 1024};
  const auto sqrt_rule = [](double R) { return std::sqrt(R); };

  SUBCASE("hedgehog with w = sqrt(R)") {
    const auto scan = weyl_scaling_scan(bump(), hedgehog(RadialProfile::smoothed(1.0)), R_list, sqrt_rule);
    CHECK(scan.fit.slope <= -0.9);
    CHECK(scan.fit.slope == doctest::Approx(-1.0).epsilon(0.05));
    for (const auto& row : scan.rows) {
      CHECK(row.normalization == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(row.norms.lap >= 0.99 * row.norms.total);
      CHECK(std::abs(row.c_R * std::sqrt(4 * M_PI * row.R * row.R * row.w * bump().I0) - 1.0) <=
            (row.w / row.R) * (row.w / row.R));
    }
  }

  SUBCASE("flat control has the same slope") {
    const auto flat = weyl_scaling_scan(bump(), flat_connection(), R_list, sqrt_rule);
    CHECK(flat.fit.slope == doctest::Approx(-1.0).epsilon(0.05));
  }

  SUBCASE("constant width leaves the lap term flat") {
    const auto scan = weyl_scaling_scan(bump(), flat_connection(), {64, 128, 256, 512}, [](double) { return 8.0; });
    CHECK(std::abs(scan.fit.slope) < 0.05);
  }

  SUBCASE("weak nullity: overlap with a fixed compact g decays") {
    // g = exp(-r^2/32) phi(r/48) v, smooth with support in the ball of radius 48
    const SpinorField g{[](const Vec3& x) {
                          const double r = norm(x);
                          return Spinor{Complex(std::exp(-r * r / 32.0) * bump().phi(r / 48.0)), Complex(0)};
                        },
                        {}};
    std::vector<double> overlaps;
    for (double R : {8.0, 16.0, 32.0, 64.0}) overlaps.push_back(packet_overlap(build_packet(bump(), R, std::sqrt(R)), g));
    CHECK(overlaps[0] > 0.0);
    for (std::size_t k = 1; k < overlaps.size(); ++k) CHECK(overlaps[k] < overlaps[k - 1]);
    CHECK(overlaps.back() == 0.0);
  }

  CHECK_THROWS_AS(weyl_scaling_scan(bump(), flat_connection(), {16}, sqrt_rule), InputError);
  CHECK_THROWS_AS(weyl_scaling_scan(bump(), flat_connection(), {16, 8}, sqrt_rule), InputError);
  CHECK_THROWS_AS(weyl_scaling_scan(bump(), flat_connection(), {4, 8}, [](double R) { return R; }), InputError);
}

TEST_CASE("Kato deficit") {
  const auto A = hedgehog(RadialProfile::smoothed(1.0));
  const auto points = sample_points(11, 400, 10.0);

  SUBCASE("flat field, any psi") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      CHECK(kato_deficit(flat_connection(), random_smooth_spinor(seed), points).min_C == 0.0);
  }
  SUBCASE("hedgehog, radial packet") {
    const auto p = build_packet(bump(), 6.0, 2.5);
    const auto shell_points = sample_points(12, 400, 8.5);
    const auto k = kato_deficit(A, p.as_field(), shell_points);
    CHECK(k.min_C == 0.0);
    CHECK(k.evaluated > 100);
  }
  SUBCASE("hedgehog, 20 random non-radial psi") {
    std::vector<double> first, second;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
      const auto psi = random_smooth_spinor(seed);
      first.push_back(kato_deficit(A, psi, points).min_C);
      second.push_back(kato_deficit(A, psi, points).min_C);
    }
    CHECK(first == second);
    for (double c : first) CHECK(std::isfinite(c));
  }
  SUBCASE("degenerate input") {
    const SpinorField zero{[](const Vec3&) { return Spinor{}; }, {}};
    CHECK_THROWS_AS(kato_deficit(A, zero, points), InputError);
  }
}
