#include "pwedge/locality.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parallel.hpp"

namespace pwedge::locality {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

bool nonpositive_integer(double m) { return m <= 0.0 && m == std::floor(m); }

CVec2 at(const Vec2& a) { return {cplx(a[0]), cplx(a[1])}; }

cplx phase_at(const Vec2& x, const Vec2& alpha) { return std::exp(-I * (x[0] * alpha[0] + x[1] * alpha[1])); }

}  // namespace

Vec2 gradient(const Holomorphic& g, const Vec2& a) {
  const double h = 1e-4 * (1.0 + norm2(a));
  Vec2 out{};
  for (int k = 0; k < 2; ++k) {
    auto shifted = [&](double t) {
      Vec2 p = a;
      p[k] += t;
      return g(at(p)).real();
    };
    out[k] = (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h);
  }
  return out;
}

int sign_factor(const SingularityDescriptor& d, const Vec2& a) {
  Vec2 gr = gradient(d.g, a);
  const double n = norm2(gr);
  if (!(n > 0.0)) throw DegenerateGeometry("sign_factor: vanishing gradient, the singularity is not regular");
  const double lead = std::abs(gr[0]) > 1e-12 * n ? gr[0] : gr[1];
  return (d.arrow == Arrow::Right ? 1 : -1) * (lead > 0 ? 1 : -1);
}

CrossingSpec make_crossing(const SingularityDescriptor& d1, const SingularityDescriptor& d2, const Vec2& a, cplx A) {
  Vec2 g1 = gradient(d1.g, a), g2 = gradient(d2.g, a);
  double delta = g1[0] * g2[1] - g2[0] * g1[1];
  if (std::abs(delta) < 1e-10 * norm2(g1) * norm2(g2))
    throw DegenerateGeometry("make_crossing: the traces meet tangentially");
  if (delta < 0) return make_crossing(d2, d1, a, A);
  CrossingSpec c;
  c.s1 = sign_factor(d1, a);
  c.s2 = sign_factor(d2, a);
  c.delta = delta;
  c.A = A;
  c.m1 = d1.m;
  c.m2 = d2.m;
  c.alpha = a;
  c.grad1 = g1;
  c.grad2 = g2;
  return c;
}

SosSpec make_sos(const SingularityDescriptor& d, const Vec2& a, cplx A) {
  SosSpec c;
  c.s = sign_factor(d, a);
  c.xi = compute_xi(d.g, a);
  c.A = A;
  c.m = d.m;
  c.alpha = a;
  c.grad = gradient(d.g, a);
  return c;
}

Estimate estimate_crossing(const CrossingSpec& c, const Vec2& x) {
  Estimate e;
  if (nonpositive_integer(c.m1) || nonpositive_integer(c.m2)) {
    e.vanishes = true;
    return e;
  }
  const double a1 = c.grad1[0], b1 = c.grad1[1], a2 = c.grad2[0], b2 = c.grad2[1];
  const double u1 = x[0] * b2 - x[1] * a2, u2 = -x[0] * b1 + x[1] * a1;
  const double tol = 1e-13 * norm2(x) * (norm2(c.grad1) + norm2(c.grad2));
  if (std::abs(u1) <= tol || std::abs(u2) <= tol)
    throw std::domain_error("estimate_crossing: observation point on a Heaviside boundary line");
  if (c.s1 * u1 < 0 || c.s2 * u2 < 0) return e;
  e.value = c.A * phase_at(x, c.alpha) * std::exp(-I * (0.5 * pi) * (c.s1 * c.m1 + c.s2 * c.m2)) /
            (std::tgamma(c.m1) * std::tgamma(c.m2) * std::pow(c.delta, c.m1 + c.m2 - 1.0)) *
            std::pow(std::abs(u1), c.m1 - 1.0) * std::pow(std::abs(u2), c.m2 - 1.0);
  return e;
}

Estimate estimate_sos(const SosSpec& c, const Vec2& x) {
  Estimate e;
  if (nonpositive_integer(c.m)) {
    e.vanishes = true;
    return e;
  }
  const double sx = c.s * c.xi;
  if (sx == 0.0) throw std::domain_error("estimate_sos: s xi = 0, the trace is flat at the saddle");
  const double n2 = c.grad[0] * c.grad[0] + c.grad[1] * c.grad[1];
  const double r = norm2(x);
  cplx branch = sx > 0 ? std::exp(-I * (0.25 * pi)) / std::sqrt(sx) : std::exp(I * (0.25 * pi)) / std::sqrt(-sx);
  e.value = c.A * phase_at(x, c.alpha) * std::sqrt(pi) * std::exp(-I * (c.s * c.m * 0.5 * pi)) /
            (2.0 * pi * n2 * std::tgamma(c.m)) * std::pow(r / std::sqrt(n2), c.m - 1.5) * branch;
  return e;
}

double compute_xi(const Holomorphic& g, const Vec2& a) {
  Vec2 gr = gradient(g, a);
  const double n2 = gr[0] * gr[0] + gr[1] * gr[1];
  if (!(n2 > 0.0)) throw DegenerateGeometry("compute_xi: vanishing gradient");
  const double g0 = g(at(a)).real();
  if (std::abs(g0) > 1e-8 * std::sqrt(n2) * (1.0 + norm2(a)))
    throw DegenerateGeometry("compute_xi: the point is not on the real trace");
  // Along the tangent: alpha = a + zeta (b, -a) / n2, where Lambda = 0.
  auto along = [&](double zeta) {
    Vec2 p{a[0] + zeta * gr[1] / n2, a[1] - zeta * gr[0] / n2};
    return g(at(p)).real();
  };
  const double d0 = 0.05 * std::max(1.0, norm2(a));
  double est[3], resid = 0.0;
  for (int level = 0; level < 3; ++level) {
    const double h = d0 * std::sqrt(n2) / (1 << level);
    double num = 0.0, den = 0.0, gg = 0.0;
    double z[4] = {-2 * h, -h, h, 2 * h}, v[4];
    for (int i = 0; i < 4; ++i) {
      v[i] = along(z[i]) - g0;
      num += v[i] * z[i] * z[i];
      den += std::pow(z[i], 4);
      gg += v[i] * v[i];
    }
    est[level] = -num / den;
    double rr = 0.0;
    for (int i = 0; i < 4; ++i) rr += std::pow(v[i] + est[level] * z[i] * z[i], 2);
    // Relative to the curvature term, with a floor at the scale of the linear term.
    if (level == 2) resid = std::sqrt(rr) / (std::sqrt(gg) + 1e-6 * h);
  }
  if (resid > 0.05) throw DegenerateGeometry("compute_xi: the trace is not locally quadratic at this point");
  // Errors in h^2 and h^4.
  double r1[2] = {(4 * est[1] - est[0]) / 3, (4 * est[2] - est[1]) / 3};
  return (16 * r1[1] - r1[0]) / 15;
}

Vec2 arrow_vector(const std::vector<SingularityDescriptor>& ds, const Vec2& a) {
  if (ds.size() == 1) {
    Vec2 gr = gradient(ds[0].g, a);
    const double n = norm2(gr), s = sign_factor(ds[0], a);
    return {s * gr[0] / n, s * gr[1] / n};
  }
  if (ds.size() != 2) throw std::invalid_argument("arrow_vector: one or two singularities");
  Vec2 n1 = gradient(ds[0].g, a), n2 = gradient(ds[1].g, a);
  const double l1 = norm2(n1), l2 = norm2(n2);
  for (auto& v : n1) v /= l1;
  for (auto& v : n2) v /= l2;
  const double s1 = sign_factor(ds[0], a), s2 = sign_factor(ds[1], a);
  const double det = n1[0] * n2[1] - n1[1] * n2[0];
  if (std::abs(det) < 1e-10) throw DegenerateGeometry("arrow_vector: tangential crossing");
  Vec2 nu{(s1 * n2[1] - s2 * n1[1]) / det, (n1[0] * s2 - n2[0] * s1) / det};
  const double l = norm2(nu);
  return {nu[0] / l, nu[1] / l};
}

namespace {

// 1 on |t| <= flat, 0 beyond radius, C-infinity in between.
double window(double t, double radius, double flat) {
  t = std::abs(t);
  if (t >= radius) return 0.0;
  if (t <= flat) return 1.0;
  const double u = (radius - t) / (radius - flat);
  const double f = std::exp(-1.0 / u), h = std::exp(-1.0 / (1.0 - u));
  return f / (f + h);
}

}  // namespace

LocalResult brute_force_local(const Holomorphic& F, const Vec2& a, const Vec2& x, const Vec2& nu,
                              const LocalOptions& o) {
  const double r = norm2(x);
  if (!(r > 0.0)) throw std::invalid_argument("brute_force_local: |x| must be positive");
  if (!(o.radius > 0.0) || !(o.flat >= 0.0 && o.flat < 1.0) || !(o.check_radius > 0.0 && o.check_radius < 1.0))
    throw std::invalid_argument("brute_force_local: bad window");
  const double eps = o.shift / r;
  const auto& rule = contours::gauss_rule(o.panel_order);
  const double hp = std::min(o.radius / 8.0, 1.5 * std::min(1.0, o.shift) / r);
  const int panels = static_cast<int>(std::ceil(2.0 * o.radius / hp));
  std::vector<double> t, w;
  for (int p = 0; p < panels; ++p) {
    const double lo = -o.radius + 2.0 * o.radius * p / panels, hi = -o.radius + 2.0 * o.radius * (p + 1) / panels;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      t.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.x[i]);
      w.push_back(0.5 * (hi - lo) * rule.w[i]);
    }
  }
  const std::size_t n = t.size();
  const double rb = o.check_radius * o.radius;
  std::vector<cplx> z1(n), z2(n), e1(n), e2(n);
  std::vector<double> wa1(n), wa2(n), wb1(n), wb2(n);
  for (std::size_t i = 0; i < n; ++i) {
    z1[i] = cplx(a[0] + t[i], eps * nu[0]);
    z2[i] = cplx(a[1] + t[i], eps * nu[1]);
    e1[i] = w[i] * std::exp(-I * x[0] * z1[i]);
    e2[i] = w[i] * std::exp(-I * x[1] * z2[i]);
    wa1[i] = wa2[i] = window(t[i], o.radius, o.flat * o.radius);
    wb1[i] = wb2[i] = window(t[i], rb, o.flat * rb);
  }
  std::vector<cplx> sa(n), sb(n);
  detail::parallel_for(n, o.threads, [&](std::size_t i) {
    if (wa1[i] == 0.0) return;
    cplx accA = 0.0, accB = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (wa2[j] == 0.0) continue;
      const cplx v = F({z1[i], z2[j]}) * e2[j];
      accA += wa2[j] * v;
      accB += wb2[j] * v;
    }
    sa[i] = wa1[i] * e1[i] * accA;
    sb[i] = wb1[i] * e1[i] * accB;
  });
  cplx A = 0.0, B = 0.0;
  for (std::size_t i = 0; i < n; ++i) A += sa[i], B += sb[i];
  LocalResult res;
  res.value = A / (4.0 * pi * pi);
  res.taper_change = std::abs(A) > 0.0 ? std::abs(A - B) / std::abs(A) : std::abs(B);
  res.taper_ok = res.taper_change < o.taper_tol;
  res.nodes = n * n;
  return res;
}

namespace {

Vec2 unit(double th) { return {std::cos(th), std::sin(th)}; }

// Direction in the middle of the sector where both Heaviside factors are 1.
Vec2 crossing_direction(const ModelCase& c) {
  CrossingSpec s = make_crossing(c.sing[0], c.sing[1], c.alpha, c.A);
  // u . (b2, -a2) = s1, u . (-b1, a1) = s2
  const double p0 = s.grad2[1], p1 = -s.grad2[0], q0 = -s.grad1[1], q1 = s.grad1[0];
  const double det = p0 * q1 - p1 * q0;
  Vec2 u{(s.s1 * q1 - s.s2 * p1) / det, (p0 * s.s2 - q0 * s.s1) / det};
  const double l = norm2(u);
  return {u[0] / l, u[1] / l};
}

ModelCase crossing_model(const std::string& name, double m, Arrow a1, Arrow a2) {
  const Vec2 c{0.3, -0.2};
  ModelCase mc;
  mc.name = name;
  mc.alpha = c;
  auto d = [c](const CVec2& z) { return std::array<cplx, 2>{z[0] - c[0], z[1] - c[1]}; };
  Holomorphic g1 = [d](const CVec2& z) { auto e = d(z); return e[0] + 0.3 * e[1]; };
  Holomorphic g2 = [d](const CVec2& z) { auto e = d(z); return -0.4 * e[0] + e[1]; };
  mc.sing = {{g1, m, a1}, {g2, m, a2}};
  mc.A = 0.5;
  mc.F = [d, g1, g2, m](const CVec2& z) {
    auto e = d(z);
    return 1.0 / (2.0 + 0.5 * e[0] * e[0] + 0.3 * e[1]) * std::pow(g1(z), -m) * std::pow(g2(z), -m);
  };
  mc.direction = crossing_direction(mc);
  return mc;
}

ModelCase sos_model(const std::string& name, double m, double stretch, double theta) {
  ModelCase mc;
  mc.name = name;
  mc.sos = true;
  mc.direction = unit(theta);
  // g = 1 - a1^2 - stretch a2^2; the saddle is where grad g is along +direction.
  const double c = std::cos(theta), s = std::sin(theta);
  const double lam = 1.0 / std::sqrt(c * c / 4.0 + s * s / (4.0 * stretch));
  mc.alpha = {-lam * c / 2.0, -lam * s / (2.0 * stretch)};
  Holomorphic g = [stretch](const CVec2& z) { return 1.0 - z[0] * z[0] - stretch * z[1] * z[1]; };
  mc.sing = {{g, m, c > 0 ? Arrow::Right : Arrow::Left}};
  const Vec2 a = mc.alpha;
  mc.A = 1.0 / (2.0 + 0.2 * a[0]);
  mc.F = [g, m](const CVec2& z) { return 1.0 / (2.0 + 0.2 * z[0]) * std::pow(g(z), -m); };
  return mc;
}

}  // namespace

ModelCase separable_double_pole(const Vec2& a) {
  ModelCase mc;
  mc.name = "separable double pole";
  mc.alpha = a;
  Holomorphic g1 = [a](const CVec2& z) { return z[0] - a[0]; };
  Holomorphic g2 = [a](const CVec2& z) { return z[1] - a[1]; };
  mc.sing = {{g1, 1.0, Arrow::Right}, {g2, 1.0, Arrow::Right}};
  mc.A = 1.0;
  mc.F = [g1, g2](const CVec2& z) { return 1.0 / (g1(z) * g2(z)); };
  mc.direction = {std::sqrt(0.5), std::sqrt(0.5)};
  return mc;
}

std::vector<ModelCase> model_library() {
  return {
      crossing_model("crossing m=1", 1.0, Arrow::Right, Arrow::Right),
      crossing_model("crossing m=1/2", 0.5, Arrow::Right, Arrow::Left),
      crossing_model("crossing m=3/2", 1.5, Arrow::Left, Arrow::Right),
      sos_model("sos circle m=1", 1.0, 1.0, 0.7),
      sos_model("sos circle m=1/2", 0.5, 1.0, 0.7),
      sos_model("sos ellipse m=3/2", 1.5, 2.0, 2.0),
      sos_model("sos ellipse m=1", 1.0, 2.0, -1.0),
  };
}

ModelComparison compare_model(const ModelCase& c, double scaled_radius, const LocalOptions& o) {
  const double r = scaled_radius / c.scale;
  Vec2 x{r * c.direction[0], r * c.direction[1]};
  ModelComparison out;
  if (c.sos) {
    out.estimate = estimate_sos(make_sos(c.sing[0], c.alpha, c.A), x).value;
  } else {
    out.estimate = estimate_crossing(make_crossing(c.sing[0], c.sing[1], c.alpha, c.A), x).value;
  }
  out.local = brute_force_local(c.F, c.alpha, x, arrow_vector(c.sing, c.alpha), o);
  out.oracle = out.local.value;
  out.rel_error = std::abs(out.estimate - out.oracle) / std::abs(out.oracle);
  return out;
}

}  // namespace pwedge::locality
