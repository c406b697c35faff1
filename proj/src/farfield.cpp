#include "pwedge/farfield.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pwedge::farfield {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double wrap(double a) {
  a = std::fmod(a, 2.0 * pi);
  return a < 0.0 ? a + 2.0 * pi : a;
}

double angle_between(double a, double b) {
  double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, 2.0 * pi - d);
}

Point dir(double th) { return {std::cos(th), std::sin(th)}; }

cplx dot(const cvec2& a, const Point& x) { return a[0] * x[0] + a[1] * x[1]; }

cplx root(cplx z) { return contours::branch_sqrt(z); }

WaveComponent plane(std::string id, Kind kind, cplx amp, cvec2 alpha, Region region, std::vector<HalfPlane> hp) {
  WaveComponent w;
  w.id = std::move(id);
  w.kind = kind;
  w.amplitude = amp;
  w.phase_vector = alpha;
  w.decay_order = 0.0;
  w.support = {region, std::move(hp)};
  return w;
}

// Real directions of the Heaviside lines, from the real parts of the constants.
HalfPlane hp(cplx c1, cplx c2) { return {c1.real(), c2.real()}; }

}  // namespace

Region region_of(const Point& x) { return x[0] > 0.0 && x[1] > 0.0 ? Region::Interior : Region::Exterior; }

bool Support::contains(const Point& x) const {
  if (region_of(x) != region) return false;
  for (const auto& h : halfplanes)
    if (!(h.c1 * x[0] + h.c2 * x[1] > 0.0)) return false;
  return true;
}

std::vector<double> Support::edges() const {
  std::vector<double> cand;
  for (const auto& h : halfplanes) {
    const double a = std::atan2(h.c2, h.c1);
    cand.push_back(wrap(a + 0.5 * pi));
    cand.push_back(wrap(a - 0.5 * pi));
  }
  std::vector<double> out;
  const double eps = 1e-9;
  for (double c : cand) {
    if (angle_between(c, 0.0) < 1e-12 || angle_between(c, 0.5 * pi) < 1e-12) continue;
    if (contains(dir(c - eps)) != contains(dir(c + eps))) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), out.end());
  return out;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Incident: return "Incident";
    case Kind::GOTransmitted: return "GO_Transmitted";
    case Kind::GOReflected: return "GO_Reflected";
    case Kind::GOShadow: return "GO_Shadow";
    case Kind::Cylindrical: return "Cylindrical";
    case Kind::Lateral: return "Lateral";
  }
  return "?";
}

double WaveComponent::validity_margin(const Point& x) const {
  const double th = std::atan2(x[1], x[0]);
  double m = std::numeric_limits<double>::infinity();
  for (double e : support.edges()) m = std::min(m, angle_between(th, e));
  return m;
}

cplx evaluate(const WaveComponent& w, const Point& x) {
  if (!w.support.contains(x)) return 0.0;
  cplx v = w.amplitude * std::exp(-I * dot(w.phase_vector, x));
  if (w.kind == Kind::Cylindrical) return v / std::sqrt(w.radial_k * std::hypot(x[0], x[1]));
  if (w.kind == Kind::Lateral) {
    cplx u = dot(w.front, x);
    if (u.real() < 0.0) u = -u;
    return v * std::pow(u, -1.5);
  }
  return v;
}

std::vector<WaveComponent> go_simple(const WedgeConfig& cfg, double amplitude) {
  if (cfg.wcase != WedgeCase::Simple) throw std::invalid_argument("go_simple: the configuration is not the simple case");
  const cplx a1 = cfg.a1, a2 = cfg.a2, k2 = cfg.k2;
  const cplx z1 = k2 * k2 - a2 * a2, z2 = k2 * k2 - a1 * a1;
  const cplx s1 = root(z1), s2 = root(z2);
  std::vector<WaveComponent> out;
  out.push_back(plane("phi_in", Kind::Incident, amplitude, {a1, a2}, Region::Exterior, {}));
  if (z1.real() >= 0.0)
    out.push_back(plane("psi_T1", Kind::GOTransmitted, amplitude * 2.0 * a1 / (a1 - s1), {-s1, a2}, Region::Interior,
                        {{1.0, 0.0}, hp(a2, s1)}));
  if (z2.real() >= 0.0)
    out.push_back(plane("psi_T2", Kind::GOTransmitted, amplitude * 2.0 * a2 / (a2 - s2), {a1, -s2}, Region::Interior,
                        {hp(s2, a1), {0.0, 1.0}}));
  out.push_back(plane("phi_R1", Kind::GOReflected, amplitude * (a1 + s1) / (a1 - s1), {-a1, a2}, Region::Exterior,
                      {hp(-a2, -a1), {-1.0, 0.0}}));
  out.push_back(plane("phi_R2", Kind::GOReflected, amplitude * (a2 + s2) / (a2 - s2), {a1, -a2}, Region::Exterior,
                      {hp(-a2, -a1), {0.0, -1.0}}));
  return out;
}

std::vector<WaveComponent> go_complicated(const WedgeConfig& cfg, double amplitude) {
  if (cfg.wcase != WedgeCase::Complicated)
    throw std::invalid_argument("go_complicated: the configuration is not the complicated case");
  const cplx a1 = cfg.a1, a2 = cfg.a2, k1 = cfg.k1, k2 = cfg.k2;
  const cplx zs = k2 * k2 - a2 * a2, zt = k1 * k1 - zs;
  const cplx s = root(zs), t = root(zt);
  std::vector<WaveComponent> out;
  out.push_back(plane("phi_in", Kind::Incident, amplitude, {a1, a2}, Region::Exterior, {}));
  out.push_back(plane("phi_PR", Kind::GOReflected, amplitude * (a1 + s) / (a1 - s), {-a1, a2}, Region::Exterior,
                      {hp(-a2, -a1), {-1.0, 0.0}}));
  out.push_back(plane("phi_SH", Kind::GOShadow, -amplitude, {a1, a2}, Region::Exterior, {hp(a2, -a1), {0.0, -1.0}}));
  if (zs.real() > 0.0) {
    const cplx T = 2.0 * a1 / (a1 - s);
    out.push_back(plane("psi_PT", Kind::GOTransmitted, amplitude * T, {-s, a2}, Region::Interior, {}));
    out.push_back(plane("psi_SR", Kind::GOReflected, amplitude * (a2 - t) / (a2 + t) * T, {-s, -a2}, Region::Interior,
                        {hp(a2, -s), {0.0, 1.0}}));
    if (zt.real() > 0.0)
      out.push_back(plane("phi_ST", Kind::GOTransmitted, amplitude * 4.0 * a1 * a2 / ((a1 - s) * (a2 + t)), {-s, t},
                          Region::Exterior, {hp(t, s), {0.0, -1.0}}));
  }
  return out;
}

std::vector<WaveComponent> go_components(const WedgeConfig& cfg, double amplitude) {
  return cfg.wcase == WedgeCase::Simple ? go_simple(cfg, amplitude) : go_complicated(cfg, amplitude);
}

const char* role_name(Role r) {
  static const char* names[] = {"T1", "T2", "R1", "R2", "C1", "C2", "L1", "L2", "PT", "SR", "PR", "ST", "SH"};
  return names[static_cast<int>(r)];
}

std::vector<ContributingPoint> contributing_points(const WedgeConfig& cfg, double theta) {
  static const std::pair<const char*, Role> roles[] = {{"psi_T1", Role::T1}, {"psi_T2", Role::T2}, {"phi_R1", Role::R1},
                                                       {"phi_R2", Role::R2}, {"psi_PT", Role::PT}, {"psi_SR", Role::SR},
                                                       {"phi_PR", Role::PR}, {"phi_ST", Role::ST}, {"phi_SH", Role::SH}};
  std::vector<ContributingPoint> out;
  for (const auto& w : go_components(cfg))
    for (const auto& [id, role] : roles)
      if (w.id == id) out.push_back({role, w.phase_vector, true});
  out.push_back({Role::C1, {-cfg.k1 * std::cos(theta), -cfg.k1 * std::sin(theta)}, false});
  out.push_back({Role::C2, {-cfg.k2 * std::cos(theta), -cfg.k2 * std::sin(theta)}, false});
  LateralTable empty;
  for (auto l : {spectral::Lateral::PsiL1, spectral::Lateral::PsiL2, spectral::Lateral::PhiL1, spectral::Lateral::PhiL2}) {
    if (!spectral::lateral_active(l, cfg)) continue;
    empty.rows.push_back({spectral::lateral_name(l), l, {}, 1.0});
  }
  for (const auto& w : lateral_components(empty, cfg))
    out.push_back({w.id.back() == '1' ? Role::L1 : Role::L2, w.phase_vector, true});
  return out;
}

const char* convention_name(CylConvention c) { return c == CylConvention::Displayed ? "displayed" : "outgoing"; }

std::optional<CylConvention> parse_convention(const std::string& s) {
  if (s == "displayed") return CylConvention::Displayed;
  if (s == "outgoing") return CylConvention::Outgoing;
  return std::nullopt;
}

const char* lateral_norm_name(LateralNorm n) { return n == LateralNorm::Displayed ? "displayed" : "crossing"; }

std::vector<double> go_discontinuities(const WedgeConfig& cfg) {
  std::vector<double> out;
  for (const auto& w : go_components(cfg))
    for (double e : w.support.edges()) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), out.end());
  return out;
}

namespace {

double band_distance(double theta, const std::vector<double>& lines) {
  double m = std::numeric_limits<double>::infinity();
  for (double e : lines) m = std::min(m, angle_between(theta, e));
  return m;
}

// The spectral function at the saddle; where the complex point lies outside the continuation
// domains (upper-upper half-planes) its real part is used.
cplx at_saddle(const cvec2& a, bool phi, const spectral::SpectralTrace& t, cvec2& used) {
  used = a;
  if (spectral::classify(a, t.cfg) == spectral::Region::Invalid) used = {cplx(a[0].real()), cplx(a[1].real())};
  return phi ? spectral::eval_phi(used, t) : spectral::eval_psi_pp(used, t);
}

struct CylData {
  cplx D;
  cvec2 saddle, alpha;
  cplx k;
};

CylData cylindrical(const spectral::SpectralTrace& t, double theta, CylConvention c) {
  const WedgeConfig& cfg = t.cfg;
  const bool inside = region_of(dir(theta)) == Region::Interior;
  const cplx k = inside ? cfg.k2 : cfg.k1;
  const double sign = c == CylConvention::Outgoing ? -1.0 : 1.0;
  CylData d;
  d.k = k;
  d.alpha = {sign * k * std::cos(theta), sign * k * std::sin(theta)};
  d.saddle = d.alpha;
  if (cfg.transparent()) {
    d.D = 0.0;
    return d;
  }
  const cplx k1s = cfg.k1 * cfg.k1, k2s = cfg.k2 * cfg.k2;
  const cplx f = at_saddle(d.alpha, inside, t, d.saddle);
  const cplx phase = std::exp(-I * (0.75 * pi));
  if (c == CylConvention::Outgoing) {
    d.D = f * (k1s - k2s) * phase / (2.0 * std::sqrt(2.0 * pi));
  } else {
    const cplx contrast = inside ? k1s / k2s - 1.0 : 1.0 - k2s / k1s;
    d.D = f / (8.0 * std::sqrt(2.0 * pi)) * contrast * phase;
  }
  return d;
}

}  // namespace

cplx cylindrical_coefficient(const spectral::SpectralTrace& t, double theta, CylConvention c) {
  return cylindrical(t, theta, c).D;
}

std::vector<CylindricalRow> cylindrical_coefficients(const spectral::SpectralTrace& t, const std::vector<double>& thetas,
                                                     const FarFieldOptions& o) {
  const auto lines = go_discontinuities(t.cfg);
  std::vector<CylindricalRow> out;
  for (double th : thetas) {
    CylindricalRow row;
    row.theta = th;
    row.id = region_of(dir(th)) == Region::Interior ? "psi_C" : "phi_C";
    row.in_band = band_distance(th, lines) < o.margin;
    try {
      auto d = cylindrical(t, th, o.convention);
      row.D = d.D;
      row.saddle = d.saddle;
    } catch (const std::exception&) {
      if (!row.in_band) throw;
      row.D = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
    out.push_back(row);
  }
  return out;
}

WaveComponent cylindrical_component(const spectral::SpectralTrace& t, double theta, const FarFieldOptions& o) {
  auto d = cylindrical(t, theta, o.convention);
  const bool inside = region_of(dir(theta)) == Region::Interior;
  WaveComponent w;
  w.id = inside ? "psi_C" : "phi_C";
  w.kind = Kind::Cylindrical;
  w.amplitude = d.D;
  w.phase_vector = d.alpha;
  w.decay_order = -0.5;
  w.support = {inside ? Region::Interior : Region::Exterior, {}};
  w.radial_k = d.k;
  return w;
}

cplx lateral_D(spectral::Lateral which, cplx L, const WedgeConfig& cfg) {
  const bool psi = which == spectral::Lateral::PsiL1 || which == spectral::Lateral::PsiL2;
  const cplx k1s = cfg.k1 * cfg.k1, k2s = cfg.k2 * cfg.k2;
  const cplx c = 2.0 * std::exp(I * (0.75 * pi)) * L / std::sqrt(pi);
  return psi ? c * std::pow(k2s - k1s, 0.75) * std::sqrt(cfg.k1) : -c * std::pow(k1s - k2s, 0.75) * std::sqrt(cfg.k2);
}

LateralTable lateral_coefficients(const spectral::SpectralTrace& t, const FarFieldOptions& o, LateralPair pair) {
  const WedgeConfig& cfg = t.cfg;
  LateralTable table;
  const bool psi_on = spectral::lateral_active(spectral::Lateral::PsiL1, cfg);
  const bool phi_on = spectral::lateral_active(spectral::Lateral::PhiL1, cfg);
  bool want_psi = pair == LateralPair::Psi || (pair == LateralPair::Active && psi_on);
  bool want_phi = pair == LateralPair::Phi || (pair == LateralPair::Active && phi_on);
  if (!want_psi && !want_phi) {
    table.note = "k1 = k2: no lateral waves";
    return table;
  }
  if (want_psi && !psi_on) {
    table.note = "psi lateral waves need Re k2 > Re k1; psi_L1 = psi_L2 = 0";
    return table;
  }
  if (want_phi && !phi_on) {
    table.note = "phi lateral waves need Re k1 > Re k2; phi_L1 = phi_L2 = 0";
    return table;
  }
  const auto pairs = want_psi ? std::array{spectral::Lateral::PsiL1, spectral::Lateral::PsiL2}
                              : std::array{spectral::Lateral::PhiL1, spectral::Lateral::PhiL2};
  for (auto l : pairs) {
    LateralRow row;
    row.id = spectral::lateral_name(l);
    row.which = l;
    row.L = spectral::lateral_limit(l, t, o.limits);
    row.D = lateral_D(l, row.L.value, cfg);
    table.rows.push_back(row);
  }
  return table;
}

std::vector<WaveComponent> lateral_components(const LateralTable& table, const WedgeConfig& cfg, LateralNorm n) {
  std::vector<WaveComponent> out;
  const cplx k1 = cfg.k1, k2 = cfg.k2;
  const double scale = n == LateralNorm::Displayed ? 1.0 : 1.0 / (2.0 * std::sqrt(2.0));
  for (const auto& row : table.rows) {
    if (!spectral::lateral_active(row.which, cfg)) continue;
    WaveComponent w;
    w.id = row.id;
    w.kind = Kind::Lateral;
    w.amplitude = scale * row.D;
    w.decay_order = -1.5;
    switch (row.which) {
      case spectral::Lateral::PsiL2: {
        const cplx d = std::sqrt(k2 * k2 - k1 * k1);
        w.phase_vector = {-k1, -d};
        w.front = {d, -k1};
        w.support = {Region::Interior, {hp(d, -k1), {0.0, 1.0}}};
        break;
      }
      case spectral::Lateral::PsiL1: {
        const cplx d = std::sqrt(k2 * k2 - k1 * k1);
        w.phase_vector = {-d, -k1};
        w.front = {-k1, d};
        w.support = {Region::Interior, {hp(-k1, d), {1.0, 0.0}}};
        break;
      }
      case spectral::Lateral::PhiL2: {
        const cplx d = std::sqrt(k1 * k1 - k2 * k2);
        w.phase_vector = {-k2, d};
        w.front = {d, k2};
        w.support = {Region::Exterior, {hp(d, k2), {0.0, -1.0}}};
        break;
      }
      case spectral::Lateral::PhiL1: {
        const cplx d = std::sqrt(k1 * k1 - k2 * k2);
        w.phase_vector = {d, -k2};
        w.front = {k2, d};
        w.support = {Region::Exterior, {hp(k2, d), {-1.0, 0.0}}};
        break;
      }
    }
    out.push_back(w);
  }
  return out;
}

FarFieldModel build_model(const spectral::SpectralTrace& t, const FarFieldOptions& o) {
  FarFieldModel m;
  m.cfg = t.cfg;
  m.options = o;
  m.go = go_components(t.cfg, t.forcing_scale);
  m.lateral_table = lateral_coefficients(t, o);
  m.lateral = lateral_components(m.lateral_table, t.cfg, o.lateral_norm);
  return m;
}

FarField total_far_field(double r, double theta, const spectral::SpectralTrace& t, const FarFieldModel& m) {
  if (!(r > 0.0)) throw std::invalid_argument("total_far_field: r must be positive");
  const Point x{r * std::cos(theta), r * std::sin(theta)};
  FarField f;
  f.region = region_of(x);
  f.margin = std::numeric_limits<double>::infinity();
  std::vector<const WaveComponent*> parts;
  for (const auto* list : {&m.go, &m.lateral})
    for (const auto& w : *list)
      if (w.support.region == f.region) parts.push_back(&w);
  for (const auto* w : parts) {
    for (double e : w->support.edges()) {
      const double d = angle_between(theta, e);
      if (d < f.margin) {
        f.margin = d;
        f.nearest = w->id;
      }
    }
  }
  if (f.margin < m.options.margin) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "total_far_field: theta = %.6f is %.4f rad from the edge of %s (margin %.3f)", theta,
                  f.margin, f.nearest.c_str(), m.options.margin);
    throw MarginError(buf, f.nearest, theta, f.margin);
  }
  for (const auto* w : parts) {
    cplx v = evaluate(*w, x);
    f.breakdown.emplace_back(w->id, v);
    f.total += v;
  }
  auto cyl = cylindrical_component(t, theta, m.options);
  cplx v = evaluate(cyl, x);
  f.breakdown.emplace_back(cyl.id, v);
  f.total += v;
  return f;
}

FarField total_far_field(double r, double theta, const spectral::SpectralTrace& t, const FarFieldOptions& o) {
  return total_far_field(r, theta, t, build_model(t, o));
}

std::vector<double> clean_rays(const WedgeConfig& cfg, double band) {
  std::vector<double> lines = {0.0, 0.5 * pi};
  for (const auto& w : go_components(cfg))
    if (w.support.region == Region::Interior)
      for (double e : w.support.edges()) lines.push_back(e);
  LateralTable table;
  for (auto l : {spectral::Lateral::PsiL1, spectral::Lateral::PsiL2})
    if (spectral::lateral_active(l, cfg)) table.rows.push_back({spectral::lateral_name(l), l, {}, 1.0});
  const auto lat = lateral_components(table, cfg);
  for (const auto& w : lat)
    for (double e : w.support.edges()) lines.push_back(e);
  std::sort(lines.begin(), lines.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (lines[i] < 0.0 || lines[i + 1] > 0.5 * pi || lines[i + 1] - lines[i] <= 2.0 * band) continue;
    const double mid = 0.5 * (lines[i] + lines[i + 1]);
    const Point d = dir(mid);
    if (std::none_of(lat.begin(), lat.end(), [&](const WaveComponent& w) { return w.support.contains(d); }))
      out.push_back(mid);
  }
  return out;
}

ConventionCheck check_convention(const spectral::SpectralTrace& t, const std::vector<double>& radii,
                                 std::vector<double> rays, double band, const spectral::SupportOptions& so) {
  const WedgeConfig& cfg = t.cfg;
  if (radii.size() < 3) throw std::invalid_argument("check_convention: at least three radii are needed");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("check_convention: radii must be positive");
  if (rays.empty()) rays = clean_rays(cfg, band);
  if (rays.empty()) throw std::invalid_argument("check_convention: no ray clear of the discontinuity lines");

  // verify_support works on tensor grids: sample the union of the coordinates, padded so that
  // consecutive values stay below the Nyquist spacing, and read the ray points off it.
  const double step = 0.5 * pi / cfg.scale();
  auto axis = [&](bool second) {
    std::vector<double> v{0.0};
    for (double th : rays)
      for (double r : radii) v.push_back(r * (second ? std::sin(th) : std::cos(th)));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> padded{v[0]};
    for (std::size_t i = 1; i < v.size(); ++i) {
      const int n = static_cast<int>(std::ceil((v[i] - v[i - 1]) / step));
      for (int j = 1; j < n; ++j) padded.push_back(v[i - 1] + (v[i] - v[i - 1]) * j / n);
      padded.push_back(v[i]);
    }
    return padded;
  };
  const auto x1 = axis(false), x2 = axis(true);
  auto rep = spectral::verify_support(t, x1, x2, so);
  auto index = [](const std::vector<double>& v, double x) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };

  const auto go = go_components(cfg, t.forcing_scale);
  const double sigma = so.sigma / cfg.k1.real();
  // The window multiplies each plane-like component by exp(-sigma^2 |Re alpha|^2 / 2).
  auto damp = [&](const cvec2& a) {
    return std::exp(-0.5 * sigma * sigma * (std::norm(a[0].real()) + std::norm(a[1].real())));
  };

  ConventionCheck c;
  c.radii = radii;
  const CylConvention conv[2] = {CylConvention::Displayed, CylConvention::Outgoing};
  double sum[2] = {0.0, 0.0};
  for (double th : rays) {
    RayFit f;
    f.theta = th;
    for (double r : radii) {
      const Point x{r * std::cos(th), r * std::sin(th)};
      cplx v = rep.psi[index(x1, x[0]) * x2.size() + index(x2, x[1])];
      for (const auto& w : go)
        if (w.support.region == Region::Interior) v -= damp(w.phase_vector) * evaluate(w, x);
      f.residual.push_back(v);
    }
    for (int k = 0; k < 2; ++k) {
      const double sign = conv[k] == CylConvention::Outgoing ? 1.0 : -1.0;
      std::vector<cplx> wave;
      cplx num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < radii.size(); ++j) {
        const cplx kr = cfg.k2 * radii[j];
        wave.push_back(damp({cfg.k2 * std::cos(th), cfg.k2 * std::sin(th)}) * std::exp(sign * I * kr) / std::sqrt(kr));
        num += std::conj(wave[j]) * f.residual[j];
        den += std::norm(wave[j]);
      }
      f.fitted[k] = num / den;
      double nr = 0.0, ne = 0.0;
      for (std::size_t j = 0; j < radii.size(); ++j) {
        nr += std::norm(f.residual[j]);
        ne += std::norm(f.residual[j] - f.fitted[k] * wave[j]);
      }
      f.shape_error[k] = std::sqrt(ne / nr);
      sum[k] += ne / nr;
      try {
        f.predicted[k] = cylindrical_coefficient(t, th, conv[k]);
      } catch (const std::exception&) {
        f.predicted[k] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
      }
    }
    c.rays.push_back(std::move(f));
  }
  c.error_displayed = std::sqrt(sum[0] / rays.size());
  c.error_outgoing = std::sqrt(sum[1] / rays.size());
  c.chosen = c.error_outgoing <= c.error_displayed ? CylConvention::Outgoing : CylConvention::Displayed;
  const int k = c.chosen == CylConvention::Outgoing ? 1 : 0;
  for (const auto& f : c.rays) c.amplitude_error = std::max(c.amplitude_error, std::abs(f.fitted[k] / f.predicted[k] - 1.0));
  return c;
}

void write_coefficients_csv(std::ostream& os, const WedgeConfig& cfg, const std::vector<CylindricalRow>& cyl,
                            const LateralTable& lat, const std::string& header) {
  if (!header.empty()) os << header << (header.back() == '\n' ? "" : "\n");
  os << "theta0,theta,re,im,abs,component,in_band\n";
  char buf[256];
  auto row = [&](std::optional<double> th, cplx v, const std::string& id, bool band) {
    std::snprintf(buf, sizeof buf, "%.10e,", cfg.theta0);
    os << buf;
    if (th) {
      std::snprintf(buf, sizeof buf, "%.10e", *th);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.10e,%.10e,%.10e,%s,%d\n", v.real(), v.imag(), std::abs(v), id.c_str(), band ? 1 : 0);
    os << buf;
  };
  for (const auto& r : cyl) row(r.theta, r.D, r.id, r.in_band);
  for (const auto& r : lat.rows) {
    row(std::nullopt, r.L.value, "L_" + r.id, false);
    row(std::nullopt, r.D, "D_" + r.id, false);
  }
}

}  // namespace pwedge::farfield
