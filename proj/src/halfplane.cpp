#include "pwedge/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "parallel.hpp"

namespace pwedge::halfplane {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

void check_point(const Point& x) {
  if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw std::invalid_argument("halfplane: non-finite point");
}

}  // namespace

InterfaceConfig make_interface(double k1, double k2, double b) {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !std::isfinite(k1) || !std::isfinite(k2))
    throw std::invalid_argument("halfplane: wavenumbers must be positive and finite");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("halfplane: source height b must be >= 0");
  return {k1, k2, b};
}

cplx hankel0(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("hankel0: argument must be positive and finite");
  if (x < 12.0) {
    const double q = 0.25 * x * x;
    double term = 1.0, j0 = 1.0, harmonic = 0.0, ysum = 0.0;
    for (int m = 1; m < 200; ++m) {
      term *= -q / (double(m) * m);
      harmonic += 1.0 / m;
      j0 += term;
      ysum -= harmonic * term;
      if (std::abs(term) * (1.0 + harmonic) < 1e-17 * std::max(1.0, std::abs(j0))) break;
    }
    const double y0 = (2.0 / pi) * ((std::log(0.5 * x) + std::numbers::egamma) * j0 + ysum);
    return {j0, y0};
  }
  // sqrt(2 / (pi x)) e^{i(x - pi/4)} sum_k a_k (i/x)^k, a_k = a_{k-1} (-(2k-1)^2) / (8k)
  cplx sum = 1.0, t = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double f = -double((2 * k - 1) * (2 * k - 1)) / (8.0 * k * x);
    const double mag = last * std::abs(f);
    if (mag > last) break;
    t *= f * I;
    sum += t;
    last = mag;
    if (mag < 1e-17) break;
  }
  return std::sqrt(2.0 / (pi * x)) * std::exp(I * (x - 0.25 * pi)) * sum;
}

cplx vertical_sqrt(double k, cplx a) {
  // sqrt(a - k) with arg in (-3pi/2, pi/2) and sqrt(a + k) with arg in (-pi/2, 3pi/2).
  const cplx e = std::polar(1.0, 0.25 * pi);
  cplx up = std::sqrt((a - k) * I) * std::conj(e);
  cplx down = std::sqrt((a + k) * (-I)) * e;
  return I * up * down;
}

cplx incident(const Point& x, const InterfaceConfig& cfg) {
  check_point(x);
  double d = std::hypot(x[0], x[1] - cfg.b);
  if (d == 0.0) throw std::domain_error("incident: evaluation at the source");
  return -0.25 * I * hankel0(cfg.k1 * d);
}

namespace {

struct Detour {
  double centre, radius;
  bool below;
};

// Integrates f along the real axis on [-A, A], passing below +k_j and above -k_j.
template <class F>
QuadResult integrate_indented(F&& f, const InterfaceConfig& cfg, double decay, double rate, const QuadOptions& o) {
  if (!(decay > 0.0))
    throw std::domain_error("halfplane: the point lies on the interface with b = 0, the integral does not converge");
  const double kmax = std::max(cfg.k1, cfg.k2);
  // Past A the integrand is below e^-40 of its size on the wavenumber discs.
  const double A = std::max(std::hypot(kmax, 40.0 / decay), kmax * (1.0 + 3.0 * o.indent));
  if (A > 1e5 * kmax) throw std::domain_error("halfplane: point too close to the interface for the spectral integral");

  std::vector<Detour> det;
  const double r1 = o.indent * cfg.k1, r2 = o.indent * cfg.k2;
  for (bool below : {false, true}) {
    const double s = below ? 1.0 : -1.0;
    if (std::abs(cfg.k1 - cfg.k2) < 2.5 * std::max(r1, r2)) {
      det.push_back({s * 0.5 * (cfg.k1 + cfg.k2), 0.5 * std::abs(cfg.k1 - cfg.k2) + std::max(r1, r2), below});
    } else {
      det.push_back({s * cfg.k1, r1, below});
      det.push_back({s * cfg.k2, r2, below});
    }
  }
  std::sort(det.begin(), det.end(), [](const Detour& a, const Detour& b) { return a.centre < b.centre; });

  QuadResult r;
  r.value = 0.0;
  auto add = [&](auto&& g, double lo, double hi) {
    double err = 0.0, l1 = 0.0;
    cplx v = GK::integrate(g, lo, hi, o.max_depth, o.tol, &err, &l1);
    r.value += v;
    r.error += err;
    r.l1 += l1;
  };
  // Pieces short enough that each holds a few oscillations at most.
  const double h = std::min(0.25 * kmax, 2.0 * pi / std::max(rate, 1e-12));
  auto real_segment = [&](double lo, double hi) {
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
    for (int i = 0; i < n; ++i) add(f, lo + (hi - lo) * i / n, lo + (hi - lo) * (i + 1) / n);
  };
  double from = -A;
  for (const Detour& d : det) {
    real_segment(from, d.centre - d.radius);
    // Semicircle from centre - radius to centre + radius through centre -+ i radius.
    auto arc = [&](double th) {
      const cplx e = std::polar(1.0, th);
      return f(d.centre + d.radius * e) * (I * d.radius * e);
    };
    if (d.below) {
      add(arc, pi, 2.0 * pi);
    } else {
      add([&](double th) { return -arc(th); }, 0.0, pi);
    }
    from = d.centre + d.radius;
  }
  real_segment(from, A);
  r.converged = r.error <= o.tol * std::max(r.l1, 1e-300);
  return r;
}

}  // namespace

QuadResult scattered_integral(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o) {
  check_point(x);
  if (x[1] < 0.0) throw std::domain_error("exact_scattered: the reflected field lives in x2 >= 0");
  QuadResult r;
  if (cfg.k1 == cfg.k2) {
    r.value = 0.0;
    r.converged = true;
    return r;
  }
  const double h = x[1] + cfg.b;
  auto f = [&](cplx a) {
    cplx g1 = vertical_sqrt(cfg.k1, a), g2 = vertical_sqrt(cfg.k2, a);
    return (g1 - g2) / (g1 + g2) * std::exp(I * (-a * x[0] + g1 * h)) / g1;
  };
  r = integrate_indented(f, cfg, h, std::abs(x[0]) + h, o);
  r.value *= -I / (4.0 * pi);
  return r;
}

QuadResult transmitted_integral(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o) {
  check_point(x);
  if (x[1] > 0.0) throw std::domain_error("exact_transmitted: the transmitted field lives in x2 <= 0");
  auto f = [&](cplx a) {
    cplx g1 = vertical_sqrt(cfg.k1, a), g2 = vertical_sqrt(cfg.k2, a);
    return 2.0 / (g1 + g2) * std::exp(I * (-a * x[0] - g2 * x[1] + g1 * cfg.b));
  };
  const double d = cfg.b - x[1];
  QuadResult r = integrate_indented(f, cfg, d, std::abs(x[0]) + d, o);
  r.value *= -I / (4.0 * pi);
  return r;
}

namespace {

cplx checked(const QuadResult& r, const char* what) {
  if (!r.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: quadrature did not converge, error estimate %.3e (integral of |f| %.3e)", what,
                  r.error, r.l1);
    throw QuadratureError(buf, r);
  }
  return r.value;
}

}  // namespace

cplx exact_scattered(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o) {
  return checked(scattered_integral(x, cfg, o), "exact_scattered");
}

cplx exact_transmitted(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o) {
  return checked(transmitted_integral(x, cfg, o), "exact_transmitted");
}

const char* lateral_wave_name(LateralWave w) {
  switch (w) {
    case LateralWave::PhiL1: return "phi_L1";
    case LateralWave::PhiL2: return "phi_L2";
    case LateralWave::PsiL1: return "psi_L1";
    case LateralWave::PsiL2: return "psi_L2";
  }
  return "?";
}

double polar_angle(const Point& x) { return std::atan2(x[1], x[0]); }

namespace {

// Reflection coefficient at real spectral variable a, both roots on the physical sheet.
cplx reflection(const InterfaceConfig& cfg, double a) {
  cplx g1 = vertical_sqrt(cfg.k1, a), g2 = vertical_sqrt(cfg.k2, a);
  return (g1 - g2) / (g1 + g2);
}

// Leading steepest-descent term of the transmitted integral about the saddle of
// -a x1 - g2(a) x2 + g1(a) b.
cplx transmitted_saddle(const Point& x, const InterfaceConfig& cfg) {
  const double k1 = cfg.k1, k2 = cfg.k2, b = cfg.b;
  const double r = std::hypot(x[0], x[1]);
  cplx a = -k2 * x[0] / r;
  cplx g1, g2, d2;
  for (int it = 0; it < 100; ++it) {
    g1 = vertical_sqrt(k1, a);
    g2 = vertical_sqrt(k2, a);
    cplx d1 = -x[0] + a * x[1] / g2 - a * b / g1;
    d2 = x[1] * k2 * k2 / (g2 * g2 * g2) - b * k1 * k1 / (g1 * g1 * g1);
    cplx step = d1 / d2;
    a -= step;
    if (std::abs(step) < 1e-14 * k2) break;
    if (it == 99 || !finite(a)) throw SingularityError("asympt_cylindrical: no saddle found for the transmitted phase");
  }
  g1 = vertical_sqrt(k1, a);
  g2 = vertical_sqrt(k2, a);
  d2 = x[1] * k2 * k2 / (g2 * g2 * g2) - b * k1 * k1 / (g1 * g1 * g1);
  cplx phase = -a * x[0] - g2 * x[1] + g1 * b;
  return -I / (4.0 * pi) * (2.0 / (g1 + g2)) * std::exp(I * phase) * std::sqrt(2.0 * pi / (-I * d2));
}

}  // namespace

cplx asympt_cylindrical(const Point& x, const InterfaceConfig& cfg, Wave which, CylForm form) {
  check_point(x);
  const double r = std::hypot(x[0], x[1]);
  if (which == Wave::Reflected) {
    if (!(x[1] > 0.0)) throw std::domain_error("asympt_cylindrical: reflected wave requested outside 0 < theta < pi");
    if (cfg.k1 == cfg.k2) return 0.0;
    if (form == CylForm::Saddle) {
      // Centred on the image source (0, -b).
      const double rr = std::hypot(x[0], x[1] + cfg.b);
      return -0.25 * I * reflection(cfg, cfg.k1 * x[0] / rr) * hankel0(cfg.k1 * rr);
    }
    const double th = polar_angle(x);
    return -0.25 * I * reflection(cfg, cfg.k1 * std::cos(th)) * std::exp(I * cfg.k1 * std::sin(th) * cfg.b) *
           hankel0(cfg.k1 * r);
  }
  if (!(x[1] < 0.0)) throw std::domain_error("asympt_cylindrical: transmitted wave requested outside -pi < theta < 0");
  if (form == CylForm::Saddle) return transmitted_saddle(x, cfg);
  const double th = polar_angle(x);
  const double c = std::cos(th);
  const cplx g1 = vertical_sqrt(cfg.k1, cfg.k2 * c);
  const double g2 = cfg.k2 * std::abs(std::sin(th));
  return -0.5 * I * g2 / (g1 + g2) * std::exp(I * g1 * cfg.b) * hankel0(cfg.k2 * r);
}

std::optional<Sector> lateral_sector(const InterfaceConfig& cfg, LateralWave w) {
  switch (w) {
    case LateralWave::PhiL1:
    case LateralWave::PhiL2: {
      if (!(cfg.k1 > cfg.k2)) return std::nullopt;
      const double c = std::acos(cfg.k2 / cfg.k1);
      return w == LateralWave::PhiL1 ? Sector{0.0, c} : Sector{pi - c, pi};
    }
    case LateralWave::PsiL1:
    case LateralWave::PsiL2: {
      if (!(cfg.k2 > cfg.k1)) return std::nullopt;
      const double c = std::acos(cfg.k1 / cfg.k2);
      return w == LateralWave::PsiL1 ? Sector{-c, 0.0} : Sector{-pi, -pi + c};
    }
  }
  return std::nullopt;
}

std::vector<double> transition_angles(const InterfaceConfig& cfg, Wave which) {
  std::vector<double> out;
  if (which == Wave::Reflected) {
    if (auto s = lateral_sector(cfg, LateralWave::PhiL1)) out.push_back(s->hi);
    if (auto s = lateral_sector(cfg, LateralWave::PhiL2)) out.push_back(s->lo);
  } else {
    if (auto s = lateral_sector(cfg, LateralWave::PsiL1)) out.push_back(s->lo);
    if (auto s = lateral_sector(cfg, LateralWave::PsiL2)) out.push_back(s->hi);
  }
  return out;
}

std::optional<std::string> transition_warning(const Point& x, const InterfaceConfig& cfg) {
  check_point(x);
  const double th = polar_angle(x);
  for (double t : transition_angles(cfg, x[1] >= 0.0 ? Wave::Reflected : Wave::Transmitted))
    if (std::abs(th - t) < exclusion_band) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "theta = %.4f is within %.2f rad of the transition line %.4f; the cylindrical/lateral split is "
                    "not valid there",
                    th, exclusion_band, t);
      return std::string(buf);
    }
  return std::nullopt;
}

cplx asympt_lateral(const Point& x, const InterfaceConfig& cfg, LateralWave w) {
  check_point(x);
  auto s = lateral_sector(cfg, w);
  const double th = polar_angle(x);
  if (!s || !(th > s->lo && th < s->hi)) return 0.0;
  const double r = std::hypot(x[0], x[1]), c = std::cos(th), sn = std::sin(th);
  const cplx e34 = std::polar(1.0, 0.75 * pi);
  switch (w) {
    case LateralWave::PhiL1:
    case LateralWave::PhiL2: {
      const double k1 = cfg.k1, k2 = cfg.k2, d = std::sqrt(k1 * k1 - k2 * k2);
      const double sg = w == LateralWave::PhiL1 ? 1.0 : -1.0;
      return 1.0 / (2.0 * std::sqrt(pi)) * std::sqrt(2.0 * k2) / std::sqrt(d) * e34 * std::exp(I * d * cfg.b) *
             std::exp(I * r * (sg * k2 * c + d * sn)) / std::pow(std::abs(d * r * c - sg * k2 * r * sn), 1.5);
    }
    case LateralWave::PsiL1:
    case LateralWave::PsiL2: {
      const double k1 = cfg.k1, k2 = cfg.k2, d = std::sqrt(k2 * k2 - k1 * k1);
      const double sg = w == LateralWave::PsiL1 ? 1.0 : -1.0;
      return 1.0 / (2.0 * std::sqrt(pi)) * std::sqrt(2.0 * k1) * e34 / std::sqrt(d) *
             std::exp(I * r * (sg * k1 * c - d * sn)) / std::pow(std::abs(sg * d * r * c + k1 * r * sn), 1.5);
    }
  }
  return 0.0;
}

cplx psi_lateral_height_factor(const InterfaceConfig& cfg) {
  if (!(cfg.k2 > cfg.k1)) throw std::domain_error("psi_lateral_height_factor: needs k2 > k1");
  return 1.0 - I * cfg.b * std::sqrt(cfg.k2 * cfg.k2 - cfg.k1 * cfg.k1);
}

QuadResult exact_lateral(const Point& x, const InterfaceConfig& cfg, LateralWave w, const QuadOptions& o) {
  check_point(x);
  auto s = lateral_sector(cfg, w);
  if (!s) throw std::domain_error(std::string(lateral_wave_name(w)) + ": inactive for this wavenumber ordering");
  const double th = polar_angle(x);
  if (!(th > s->lo && th < s->hi))
    throw std::domain_error(std::string(lateral_wave_name(w)) + ": point outside the support sector");
  // The second wave of each pair is the mirror image x1 -> -x1 of the first.
  const bool mirror = w == LateralWave::PhiL2 || w == LateralWave::PsiL2;
  const double x1 = mirror ? -x[0] : x[0], x2 = x[1];
  const bool phi = w == LateralWave::PhiL1 || w == LateralWave::PhiL2;
  const double kb = phi ? cfg.k2 : cfg.k1;

  // Along the downward cut a = -kb - i t, the jump of the integrand across the cut.
  auto jump = [&](double t) {
    const cplx a(-kb, -t);
    const cplx g = contours::branch_sqrt(kb * kb - a * a);  // limit from the side Re a < -kb
    if (phi) {
      const cplx g1 = vertical_sqrt(cfg.k1, a);
      const cplx e = std::exp(I * (-a * x1 + g1 * (x2 + cfg.b))) / g1;
      return ((g1 - g) / (g1 + g) - (g1 + g) / (g1 - g)) * e;
    }
    const cplx g2 = vertical_sqrt(cfg.k2, a);
    const cplx e = std::exp(I * (-a * x1 - g2 * x2));
    return 2.0 * (std::exp(I * g * cfg.b) / (g + g2) - std::exp(-I * g * cfg.b) / (g2 - g)) * e;
  };
  // t = u^2 removes the square-root onset.
  auto f = [&](double u) { return jump(u * u) * (2.0 * u); };
  const double scale = std::abs(x1) + std::abs(x2) + cfg.b + 1.0 / kb;
  double lo = 0.0, hi = 1.0 / std::sqrt(scale);
  QuadResult r;
  r.value = 0.0;
  for (int piece = 0; piece < 200; ++piece) {
    double err = 0.0, l1 = 0.0;
    cplx v = GK::integrate(f, lo, hi, o.max_depth, o.tol, &err, &l1);
    r.value += v;
    r.error += err;
    r.l1 += l1;
    if (!finite(r.value)) break;
    if (l1 < 1e-17 * r.l1 && piece > 2) break;
    lo = hi;
    hi *= 1.5;
  }
  r.value *= -I / (4.0 * pi) * (-I);
  r.converged = finite(r.value) && r.error <= o.tol * std::max(r.l1, 1e-300);
  return r;
}

cplx asympt_total(const Point& x, const InterfaceConfig& cfg, CylForm form) {
  check_point(x);
  if (x[1] > 0.0)
    return asympt_cylindrical(x, cfg, Wave::Reflected, form) + asympt_lateral(x, cfg, LateralWave::PhiL1) +
           asympt_lateral(x, cfg, LateralWave::PhiL2);
  if (x[1] < 0.0)
    return asympt_cylindrical(x, cfg, Wave::Transmitted, form) + asympt_lateral(x, cfg, LateralWave::PsiL1) +
           asympt_lateral(x, cfg, LateralWave::PsiL2);
  throw std::domain_error("asympt_total: the interface x2 = 0 belongs to neither far field");
}

Heatmap heatmap(const InterfaceConfig& cfg, const HeatmapGrid& g, CylForm form, int threads) {
  if (g.n1 < 1 || g.n2 < 1 || !(g.x1_max > g.x1_min) || !(g.x2_max > g.x2_min))
    throw std::invalid_argument("heatmap: empty grid");
  Heatmap h;
  h.cfg = cfg;
  h.grid = g;
  for (int i = 0; i < g.n1; ++i) h.x1.push_back(g.x1_min + (g.x1_max - g.x1_min) * (i + 0.5) / g.n1);
  for (int j = 0; j < g.n2; ++j) h.x2.push_back(g.x2_min + (g.x2_max - g.x2_min) * (j + 0.5) / g.n2);
  h.value.assign(h.x1.size() * h.x2.size(), cplx(std::nan(""), std::nan("")));
  detail::parallel_for(h.x2.size(), threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < h.x1.size(); ++i) {
      Point p{h.x1[i], h.x2[j]};
      if (p[1] != 0.0 && std::hypot(p[0], p[1]) > 0.0) h.value[j * h.x1.size() + i] = asympt_total(p, cfg, form);
    }
  });
  return h;
}

void write_heatmap_csv(std::ostream& os, const Heatmap& h) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# k1=%.17g k2=%.17g b=%.17g x1=[%.17g,%.17g] x2=[%.17g,%.17g] n1=%d n2=%d\n",
                h.cfg.k1, h.cfg.k2, h.cfg.b, h.grid.x1_min, h.grid.x1_max, h.grid.x2_min, h.grid.x2_max, h.grid.n1,
                h.grid.n2);
  os << buf << "x1,x2,re,im,abs\n";
  for (std::size_t j = 0; j < h.x2.size(); ++j)
    for (std::size_t i = 0; i < h.x1.size(); ++i) {
      const cplx v = h.value[j * h.x1.size() + i];
      std::snprintf(buf, sizeof buf, "%.10e,%.10e,%.10e,%.10e,%.10e\n", h.x1[i], h.x2[j], v.real(), v.imag(),
                    std::abs(v));
      os << buf;
    }
}

}  // namespace pwedge::halfplane
