#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/hankel.hpp>

#include "pwedge/locality.hpp"

using namespace pwedge;
using namespace pwedge::locality;

namespace {

const double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

cplx plane(const Vec2& x, const Vec2& a) { return std::exp(-I * (x[0] * a[0] + x[1] * a[1])); }

SingularityDescriptor circle(double k, double m, Arrow arrow) {
  return {[k](const CVec2& z) { return k * k - z[0] * z[0] - z[1] * z[1]; }, m, arrow};
}

}  // namespace

TEST_CASE("separable double pole gives the product of one-dimensional residues") {
  const Vec2 a{0.3, -0.2};
  auto c = separable_double_pole(a);
  auto spec = make_crossing(c.sing[0], c.sing[1], a, 1.0);
  CHECK(spec.s1 == 1);
  CHECK(spec.s2 == 1);
  CHECK(spec.delta == doctest::Approx(1.0).epsilon(1e-8));
  const Vec2 x{3.0, 5.0};
  // Each factor closes below its pole: -2 pi i residue over 2 pi, squared.
  auto e = estimate_crossing(spec, x);
  CHECK_FALSE(e.vanishes);
  CHECK(std::abs(e.value + plane(x, a)) < 1e-8);
}

TEST_CASE("crossing estimate vanishes outside the Heaviside quadrant") {
  const Vec2 a{0.3, -0.2};
  auto c = separable_double_pole(a);
  auto spec = make_crossing(c.sing[0], c.sing[1], a, 1.0);
  CHECK(estimate_crossing(spec, {-3.0, 5.0}).value == cplx(0.0));
  CHECK(estimate_crossing(spec, {3.0, -5.0}).value == cplx(0.0));
  CHECK_THROWS_AS(estimate_crossing(spec, {0.0, 5.0}), std::domain_error);
}

TEST_CASE("non-positive integer orders do not contribute") {
  auto c = separable_double_pole({0.0, 0.0});
  for (double m : {0.0, -1.0, -2.0}) {
    c.sing[0].m = m;
    auto e = estimate_crossing(make_crossing(c.sing[0], c.sing[1], {0.0, 0.0}, 1.0), {2.0, 3.0});
    CHECK(e.vanishes);
    CHECK(e.value == cplx(0.0));
  }
  auto s = make_sos(circle(1.0, -1.0, Arrow::Right), {-1.0, 0.0}, 1.0);
  CHECK(estimate_sos(s, {5.0, 0.0}).vanishes);
}

TEST_CASE("crossing orientation does not depend on the order of the pair") {
  auto c = separable_double_pole({0.1, 0.2});
  auto p = make_crossing(c.sing[0], c.sing[1], c.alpha, 1.0);
  auto q = make_crossing(c.sing[1], c.sing[0], c.alpha, 1.0);
  CHECK(q.delta > 0);
  const Vec2 x{4.0, 7.0};
  CHECK(std::abs(estimate_crossing(p, x).value - estimate_crossing(q, x).value) < 1e-10);
}

TEST_CASE("compute_xi on exact curves") {
  SUBCASE("circle") {
    for (double k : {0.5, 1.0, 2.0}) {
      const Vec2 a{-k * std::cos(0.4), -k * std::sin(0.4)};
      CHECK(compute_xi(circle(k, 1.0, Arrow::Right).g, a) == doctest::Approx(1.0 / (4 * k * k)).epsilon(1e-6));
    }
  }
  SUBCASE("line") {
    Holomorphic g = [](const CVec2& z) { return 2.0 * z[0] - z[1] + 0.5; };
    CHECK(std::abs(compute_xi(g, {0.0, 0.5})) < 1e-8);
  }
  SUBCASE("Lambda - 3 zeta^2 with a cubic term") {
    // grad = (1, 0): Lambda = d1, zeta = -d2.
    Holomorphic g = [](const CVec2& z) {
      cplx d1 = z[0] - 0.2, d2 = z[1] - 0.1;
      return d1 - 3.0 * d2 * d2 + 0.7 * d2 * d2 * d2;
    };
    CHECK(compute_xi(g, {0.2, 0.1}) == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("degenerate geometry") {
    Holomorphic cone = [](const CVec2& z) { return z[0] * z[0] - z[1] * z[1]; };
    CHECK_THROWS_AS(compute_xi(cone, {0.0, 0.0}), DegenerateGeometry);
    CHECK_THROWS_AS(compute_xi(circle(1.0, 1.0, Arrow::Right).g, {0.5, 0.0}), DegenerateGeometry);
  }
}

TEST_CASE("sign factor follows the arrow and the gradient") {
  auto d = circle(1.0, 1.0, Arrow::Right);
  CHECK(sign_factor(d, {-1.0, 0.0}) == 1);   // gradient (2, 0)
  CHECK(sign_factor(d, {1.0, 0.0}) == -1);   // gradient (-2, 0)
  CHECK(sign_factor(d, {0.0, -1.0}) == 1);   // dg/da1 = 0, gradient (0, 2)
  d.arrow = Arrow::Left;
  CHECK(sign_factor(d, {-1.0, 0.0}) == -1);
}

TEST_CASE("saddle estimate reproduces the free-space Green's function") {
  // F = 1/(k^2 - |a|^2) inverts to -(i/4) H0(k r); the saddle facing x is at -k x/|x|.
  const double k = 1.3;
  for (double th : {0.3, 1.9, -2.5}) {
    for (double kr : {50.0, 200.0}) {
      const double r = kr / k;
      const Vec2 x{r * std::cos(th), r * std::sin(th)}, a{-k * std::cos(th), -k * std::sin(th)};
      auto d = circle(k, 1.0, std::cos(th) > 0 ? Arrow::Right : Arrow::Left);
      auto s = make_sos(d, a, 1.0);
      CHECK(s.s == 1);
      cplx green = -0.25 * I * boost::math::cyl_hankel_1(0, kr);
      CHECK(rel(estimate_sos(s, x).value, green) < 1.0 / kr);
    }
  }
}

TEST_CASE("saddle estimate against the brute-force local integral") {
  const double k = 1.0, th = 0.7, kr = 200.0;
  const Vec2 a{-std::cos(th), -std::sin(th)}, x{kr * std::cos(th), kr * std::sin(th)};
  auto d = circle(k, 1.0, Arrow::Right);
  auto est = estimate_sos(make_sos(d, a, 1.0), x).value;
  auto loc = brute_force_local([](const CVec2& z) { return 1.0 / (1.0 - z[0] * z[0] - z[1] * z[1]); }, a, x,
                               arrow_vector({d}, a));
  CHECK(loc.taper_ok);
  CHECK(rel(est, loc.value) < 0.02);
}

TEST_CASE("estimates are linear in the amplitude") {
  auto c = model_library()[0];
  auto p = make_crossing(c.sing[0], c.sing[1], c.alpha, 1.0);
  auto q = p;
  q.A = cplx(2.0, -3.0);
  const Vec2 x = {50 * c.direction[0], 50 * c.direction[1]};
  CHECK(std::abs(estimate_crossing(q, x).value - q.A * estimate_crossing(p, x).value) < 1e-12);
  auto s = make_sos(circle(1.0, 0.5, Arrow::Right), {-1.0, 0.0}, 1.0);
  auto t = s;
  t.A = cplx(-1.0, 0.5);
  CHECK(std::abs(estimate_sos(t, {30.0, 0.0}).value - t.A * estimate_sos(s, {30.0, 0.0}).value) < 1e-12);
}

TEST_CASE("flipping the sign factor conjugates the estimate up to the plane wave") {
  const Vec2 x{40.0, 10.0};
  for (double m : {0.5, 1.0, 1.5}) {
    auto s = make_sos(circle(1.0, m, Arrow::Right), {-1.0, 0.0}, cplx(0.3, 0.8));
    auto f = s;
    f.s = -s.s;
    f.A = std::conj(s.A);
    const cplx u = estimate_sos(s, x).value / plane(x, s.alpha);
    const cplx v = estimate_sos(f, x).value / plane(x, f.alpha);
    CHECK(std::abs(v - std::conj(u)) < 1e-12 * std::abs(u));
  }
  auto c = separable_double_pole({0.1, 0.1});
  c.sing[0].m = c.sing[1].m = 0.5;
  auto p = make_crossing(c.sing[0], c.sing[1], c.alpha, cplx(1.0, 2.0));
  auto f = p;
  f.s1 = f.s2 = -1;
  f.A = std::conj(p.A);
  const cplx u = estimate_crossing(p, {3.0, 4.0}).value / plane({3.0, 4.0}, p.alpha);
  const cplx v = estimate_crossing(f, {-3.0, -4.0}).value / plane({-3.0, -4.0}, p.alpha);
  CHECK(std::abs(v - std::conj(u)) < 1e-12 * std::abs(u));
}

TEST_CASE("estimates are homogeneous in the distance") {
  for (double m : {0.5, 1.0, 1.5, 2.5}) {
    auto s = make_sos(circle(1.0, m, Arrow::Right), {-1.0, 0.0}, 1.0);
    const double r0 = 10.0, r1 = 1000.0;
    const double slope = std::log(std::abs(estimate_sos(s, {r1, 0.0}).value) /
                                  std::abs(estimate_sos(s, {r0, 0.0}).value)) /
                         std::log(r1 / r0);
    CHECK(slope == doctest::Approx(m - 1.5).epsilon(1e-10));
    auto c = separable_double_pole({0.0, 0.0});
    c.sing[0].m = c.sing[1].m = m;
    auto p = make_crossing(c.sing[0], c.sing[1], c.alpha, 1.0);
    const double cs = std::log(std::abs(estimate_crossing(p, {r1, 2 * r1}).value) /
                               std::abs(estimate_crossing(p, {r0, 2 * r0}).value)) /
                      std::log(r1 / r0);
    CHECK(cs == doctest::Approx(2 * m - 2).epsilon(1e-10));
  }
}

TEST_CASE("arrow vector points into both arrow half-planes") {
  auto c = model_library()[2];
  auto nu = arrow_vector(c.sing, c.alpha);
  auto spec = make_crossing(c.sing[0], c.sing[1], c.alpha, 1.0);
  const double d1 = nu[0] * spec.grad1[0] + nu[1] * spec.grad1[1];
  const double d2 = nu[0] * spec.grad2[0] + nu[1] * spec.grad2[1];
  CHECK(d1 * spec.s1 > 0);
  CHECK(d2 * spec.s2 > 0);
  CHECK(std::hypot(nu[0], nu[1]) == doctest::Approx(1.0));
}

TEST_CASE("model library against the brute-force oracle") {
  auto lib = model_library();
  REQUIRE(lib.size() >= 6);
  int sos = 0;
  for (auto& c : lib) {
    sos += c.sos;
    CAPTURE(c.name);
    auto far = compare_model(c, 200.0);
    auto near = compare_model(c, 50.0);
    CHECK(far.rel_error < 0.05);
    CHECK(far.rel_error < near.rel_error);
  }
  CHECK(sos >= 2);
  CHECK(int(lib.size()) - sos >= 2);
}

TEST_CASE("invalid oracle input") {
  auto c = separable_double_pole({0.0, 0.0});
  CHECK_THROWS_AS(brute_force_local(c.F, c.alpha, {0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
  LocalOptions o;
  o.flat = 1.0;
  CHECK_THROWS_AS(brute_force_local(c.F, c.alpha, {1.0, 1.0}, {1.0, 0.0}, o), std::invalid_argument);
}
