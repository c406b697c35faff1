#include "pwedge/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <random>

#include "pwedge/farfield.hpp"
#include "pwedge/locality.hpp"

namespace pwedge::verify {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

Check skipped(std::string name, std::string why) {
  Check c;
  c.name = std::move(name);
  c.pass = true;
  c.skipped = true;
  c.detail = std::move(why);
  return c;
}

halfplane::Point polar(double r, double th) { return {r * std::cos(th), r * std::sin(th)}; }

// Three rays in the middle half of the widest lateral-free sector of (lo, hi).
std::vector<double> clear_rays(const halfplane::InterfaceConfig& cfg, halfplane::Wave which) {
  using halfplane::LateralWave;
  const bool up = which == halfplane::Wave::Reflected;
  std::vector<double> cuts{up ? 0.0 : -pi, up ? pi : 0.0};
  for (auto w : up ? std::array{LateralWave::PhiL1, LateralWave::PhiL2} : std::array{LateralWave::PsiL1, LateralWave::PsiL2})
    if (auto s = halfplane::lateral_sector(cfg, w)) {
      cuts.push_back(s->lo);
      cuts.push_back(s->hi);
    }
  std::sort(cuts.begin(), cuts.end());
  double lo = cuts[0], hi = cuts[0];
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    bool inside = false;
    for (auto w : {LateralWave::PhiL1, LateralWave::PhiL2, LateralWave::PsiL1, LateralWave::PsiL2})
      if (auto s = halfplane::lateral_sector(cfg, w)) inside = inside || (mid > s->lo && mid < s->hi);
    if (!inside && cuts[i + 1] - cuts[i] > hi - lo) lo = cuts[i], hi = cuts[i + 1];
  }
  const double w = hi - lo;
  return {lo + 0.25 * w, lo + 0.5 * w, hi - 0.25 * w};
}

}  // namespace

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["subject"] = r.subject;
  j["pass"] = r.pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json e{{"name", c.name}, {"pass", c.pass}, {"skipped", c.skipped}, {"detail", c.detail}};
    if (!c.skipped) {
      e["value"] = c.value;
      e["tolerance"] = c.tolerance;
    }
    j["checks"].push_back(e);
  }
  return j;
}

Check at_most(std::string name, double value, double tolerance, std::string detail) {
  return {std::move(name), value, tolerance, value <= tolerance, false, std::move(detail)};
}

Check near(std::string name, double value, double target, double tolerance, std::string detail) {
  if (detail.empty()) detail = fmt("target %.6g", target);
  return {std::move(name), value, tolerance, std::abs(value - target) <= tolerance, false, std::move(detail)};
}

Report halfplane_report(const halfplane::InterfaceConfig& cfg, const HalfplaneOptions& o) {
  using namespace halfplane;
  Report rep;
  rep.subject = "halfplane";
  if (cfg.k1 == cfg.k2) {
    double worst = 0.0;
    for (double th : {0.3, 1.5, 2.8}) worst = std::max(worst, std::abs(exact_scattered(polar(50.0, th), cfg)));
    rep.checks.push_back(at_most("scattered_field_vanishes", worst, 1e-10, "equal wavenumbers"));
    return rep;
  }

  const double rc = o.k1r_cylindrical / cfg.k1;
  double worst = 0.0, worst_disp = 0.0;
  for (Wave w : {Wave::Reflected, Wave::Transmitted})
    for (double th : clear_rays(cfg, w)) {
      const Point x = polar(rc, th);
      const cplx ex = w == Wave::Reflected ? exact_scattered(x, cfg) : exact_transmitted(x, cfg);
      worst = std::max(worst, rel(asympt_cylindrical(x, cfg, w, CylForm::Saddle), ex));
      worst_disp = std::max(worst_disp, rel(asympt_cylindrical(x, cfg, w, CylForm::Displayed), ex));
    }
  rep.checks.push_back(at_most("cylindrical_error", worst, 0.02,
                               fmt("k1 r = %.0f, saddle form; displayed form %.4f", o.k1r_cylindrical, worst_disp)));

  std::optional<LateralWave> lat;
  for (auto w : {LateralWave::PhiL1, LateralWave::PhiL2, LateralWave::PsiL1, LateralWave::PsiL2})
    if (auto s = lateral_sector(cfg, w); s && o.lateral_theta > s->lo && o.lateral_theta < s->hi) lat = w;
  if (lat) {
    const Point x = polar(o.k1r_lateral / cfg.k1, o.lateral_theta);
    auto ex = exact_lateral(x, cfg, *lat);
    rep.checks.push_back(at_most("lateral_error", rel(asympt_lateral(x, cfg, *lat), ex.value), 0.10,
                                 std::string(lateral_wave_name(*lat)) + fmt(" against the branch-cut integral at k1 r = %.0f",
                                                                            o.k1r_lateral)));
    const double sl = log_slope([&](double r) { return asympt_lateral(polar(r, o.lateral_theta), cfg, *lat); },
                                50.0 / cfg.k1, 2000.0 / cfg.k1, 12);
    rep.checks.push_back(near("lateral_slope", sl, -1.5, 0.05));
    const double se = log_slope([&](double r) { return exact_lateral(polar(r, o.lateral_theta), cfg, *lat).value; },
                                400.0 / cfg.k1, 4000.0 / cfg.k1, 8);
    rep.checks.push_back(near("lateral_slope_exact", se, -1.5, 0.05));

    // First angle away from the interface where the support switches, scanned in 1e-3 steps.
    auto s = *lateral_sector(cfg, *lat);
    const bool from_lo = s.lo == 0.0 || s.lo == -pi;
    const double start = from_lo ? s.lo : s.hi;
    const double step = from_lo ? 1e-3 : -1e-3;
    double found = start;
    for (double th = start + step; std::abs(th - start) < pi; th += step) {
      if (asympt_lateral(polar(100.0, th), cfg, *lat) == cplx(0.0)) break;
      found = th;
    }
    const double expected = from_lo ? s.hi : s.lo;
    rep.checks.push_back(near("lateral_boundary", found, expected, 0.01,
                              fmt("critical angle %.6f, detected %.6f", expected, found)));
  } else {
    rep.checks.push_back(skipped("lateral_error", "no active lateral wave contains the requested angle"));
  }

  const double sc = log_slope([&](double r) { return asympt_cylindrical(polar(r, pi / 2), cfg, Wave::Reflected); },
                              50.0 / cfg.k1, 2000.0 / cfg.k1, 12);
  rep.checks.push_back(near("cylindrical_slope", sc, -0.5, 0.02));
  return rep;
}

Report wedge_report(const spectral::SpectralTrace& t, const WedgeOptions& o) {
  using namespace spectral;
  const WedgeConfig& c = t.cfg;
  Report rep;
  rep.subject = "wedge";

  rep.checks.push_back(at_most("fixed_point_residual", sweep_change(t), o.fixed_point_tol, "one extra sweep"));
  bool monotone = true;
  for (std::size_t i = 1; i < t.history.size(); ++i) monotone = monotone && t.history[i] <= t.history[i - 1];
  rep.checks.push_back({"monotone_history", double(t.history.size()), 0.0, monotone && t.converged, false,
                        t.converged ? "residual history of the solve" : "solve did not converge"});

  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(-1.0, 1.0);
  double wh = 0.0, overlap = 0.0;
  int n_wh = 0, n_ov = 0;
  for (int tries = 0; n_wh < o.random_points && tries < 20 * o.random_points; ++tries) {
    const cvec2 a{cplx(re(rng), im(rng)), cplx(re(rng), im(rng))};
    if (classify(a, c) == Region::Invalid) continue;
    const cplx k = kernel::kernel_K(a, c), p = t.forcing_scale * kernel::forcing_P(a, c);
    if (std::abs(k) > 1e6 || std::abs(k) < 1e-6 || std::abs(p) == 0.0) continue;
    auto v = eval_psi_detail(a, t);
    wh = std::max(wh, std::abs(k * v.value + eval_phi34(a, t) + p) / std::abs(p));
    ++n_wh;
    if (v.region == Region::Overlap) {
      overlap = std::max(overlap, v.disagreement / std::abs(v.value));
      ++n_ov;
    }
  }
  rep.checks.push_back(at_most("wiener_hopf_residual", wh, o.wiener_hopf_tol, fmt("%.0f random points", n_wh)));
  const double ov_tol = 10.0 * std::max(t.residual, 1e-12);
  rep.checks.push_back(at_most("overlap_disagreement", overlap, ov_tol, fmt("%.0f overlap points", n_ov)));

  if (o.support) {
    if (c.kappa > 0.0) {
      std::vector<double> x;
      const double w = o.support_half_width / c.k1.real(), h = o.support_step / c.k1.real();
      for (int i = -int(w / h); i <= int(w / h); ++i) x.push_back(i * h);
      SupportOptions so;
      so.threads = o.threads;
      auto s = verify_support(t, x, x, so);
      rep.checks.push_back(at_most("support_ratio", s.ratio, 1e-2, "max |psi| outside over inside the quadrant"));
      rep.checks.push_back(at_most("interface_continuity", s.interface_error, 1e-2, "psi against phi on both faces"));
    } else {
      rep.checks.push_back(skipped("support_ratio", "needs kappa > 0"));
    }
  }

  auto add = additive_crossing_diagnostic(t);
  rep.checks.push_back({"additive_crossing_bounded", add.residual.back(), 0.0, add.bounded, false,
                        "remainder on shrinking tori around (-k1, a2)"});

  if (c.transparent()) {
    rep.checks.push_back(skipped("lateral_stability", "no lateral waves when k1 = k2"));
  } else {
    double worst = 0.0;
    for (const auto& r : farfield::lateral_coefficients(t).rows) worst = std::max(worst, r.L.stability);
    rep.checks.push_back(at_most("lateral_stability", worst, 1e-2, "Richardson change between ladder depths"));
  }

  if (o.locality) {
    double worst = 0.0;
    std::string name;
    for (const auto& m : locality::model_library()) {
      const double e = locality::compare_model(m, 200.0).rel_error;
      if (e > worst) worst = e, name = m.name;
    }
    rep.checks.push_back(at_most("locality_library", worst, 0.05, "worst model: " + name));
  }
  return rep;
}

}  // namespace pwedge::verify
