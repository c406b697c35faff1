#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pwedge/farfield.hpp"
#include "pwedge/halfplane.hpp"
#include "pwedge/kernel.hpp"
#include "pwedge/locality.hpp"
#include "pwedge/spectral.hpp"
#include "pwedge/verify.hpp"

#ifndef PWEDGE_VERSION
#define PWEDGE_VERSION "0.0.0"
#endif

namespace {

using namespace pwedge;
using json = nlohmann::json;

constexpr int exit_pass = 0;
constexpr int exit_failed = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_invalid = 4;

// Convention thresholds for `wedge convention`: the chosen form must fit, the other must not.
constexpr double convention_fit = 0.3;
constexpr double convention_reject = 0.5;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every option of a subcommand and its parents with its effective value, defaults included.
json option_values(const CLI::App* app) {
  json j = json::object();
  for (; app; app = app->get_parent())
    for (const CLI::Option* o : app->get_options()) {
      if (o->get_lnames().empty() || o->get_lnames()[0] == "help" || o->get_lnames()[0] == "version") continue;
      const std::string name = o->get_lnames()[0];
      if (o->count() > 0) {
        const auto& r = o->results();
        j[name] = r.size() == 1 ? json(r[0]) : json(r);
      } else if (o->get_type_size() == 0) {
        j[name] = false;
      } else {
        j[name] = o->get_default_str();
      }
    }
  return j;
}

std::string halfplane_hash(const halfplane::InterfaceConfig& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "halfplane k1=%.17g k2=%.17g b=%.17g", c.k1, c.k2, c.b);
  return kernel::digest(buf);
}

json halfplane_config_json(const halfplane::InterfaceConfig& c) { return {{"k1", c.k1}, {"k2", c.k2}, {"b", c.b}}; }

// Collects what one run read and wrote; saved next to its first output.
class Manifest {
 public:
  Manifest(const CLI::App* sub, json config, std::string hash, json conventions) {
    j_["tool"] = "pwedge";
    j_["version"] = PWEDGE_VERSION;
    j_["command"] = sub->get_parent()->get_name() + " " + sub->get_name();
    j_["config"] = std::move(config);
    j_["config_hash"] = std::move(hash);
    j_["params"] = option_values(sub);
    j_["conventions"] = std::move(conventions);
    j_["outputs"] = json::array();
    j_["started"] = utc_now();
  }

  const std::string& path() const { return path_; }
  std::string hash() const { return j_["config_hash"].get<std::string>(); }

  void output(const std::string& file) {
    if (path_.empty()) path_ = file + ".manifest.json";
    j_["outputs"].push_back(file);
  }

  // One comment line for CSV headers.
  std::string csv_header() const {
    std::string conv;
    for (const auto& [k, v] : j_["conventions"].items()) conv += " " + k + "=" + v.get<std::string>();
    return "# manifest=" + path_ + " config_hash=" + hash() + conv;
  }

  void set(const std::string& key, json value) { j_[key] = std::move(value); }

  void finish() {
    if (path_.empty()) return;
    j_["finished"] = utc_now();
    std::ofstream f(path_);
    if (!f) throw InvalidInput("cannot write " + path_);
    f << j_.dump(2) << "\n";
  }

 private:
  json j_;
  std::string path_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  return f;
}

// JSON to stdout, or to `out` with a manifest.
void emit_json(const json& j, const std::string& out, Manifest& m) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  m.output(out);
  json withref = j;
  withref["manifest"] = m.path();
  withref["config_hash"] = m.hash();
  open_out(out) << withref.dump(2) << "\n";
  m.finish();
}

void print_report(const verify::Report& r) {
  for (const auto& c : r.checks) {
    if (c.skipped)
      std::printf("SKIP %-28s %s\n", c.name.c_str(), c.detail.c_str());
    else
      std::printf("%s %-28s %-12.4g tol %-10.3g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance,
                  c.detail.c_str());
  }
  std::printf("%s: %s\n", r.subject.c_str(), r.pass() ? "pass" : "FAIL");
}

spectral::SpectralTrace load_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read trace " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  try {
    return spectral::trace_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

// ---- halfplane ----

struct HalfplaneArgs {
  double k1 = 0.0, k2 = 0.0, b = 0.0;
  double x1 = 0.0, x2 = 0.0;
  double r = 400.0, theta = std::numbers::pi / 6;
  double k1r_cylindrical = 300.0;
  double extent = 60.0;
  int n = 100;
  std::string form = "displayed";
  std::string out;
  int threads = 0;
};

halfplane::CylForm parse_form(const std::string& s) {
  if (s == "displayed") return halfplane::CylForm::Displayed;
  if (s == "saddle") return halfplane::CylForm::Saddle;
  throw InvalidInput("unknown form " + s);
}

json halfplane_conventions(const HalfplaneArgs& a) { return {{"cylindrical_form", a.form}}; }

int halfplane_field(const CLI::App* sub, const HalfplaneArgs& a) {
  const auto cfg = halfplane::make_interface(a.k1, a.k2, a.b);
  Manifest m(sub, halfplane_config_json(cfg), halfplane_hash(cfg), halfplane_conventions(a));
  const halfplane::Point x{a.x1, a.x2};
  const bool upper = a.x2 >= 0.0;
  json j{{"x1", a.x1}, {"x2", a.x2}, {"medium", upper ? "upper" : "lower"}};
  if (upper) {
    j["incident"] = complex_json(halfplane::incident(x, cfg));
    j["scattered"] = complex_json(halfplane::exact_scattered(x, cfg));
  } else {
    j["transmitted"] = complex_json(halfplane::exact_transmitted(x, cfg));
  }
  if (cfg.k1 == cfg.k2) {
    j["note"] = "equal wavenumbers: no scattered field";
  } else if (std::hypot(a.x1, a.x2) > 0.0) {
    j["asymptotic"] = complex_json(halfplane::asympt_total(x, cfg, parse_form(a.form)));
    if (auto w = halfplane::transition_warning(x, cfg)) j["warning"] = *w;
  }
  emit_json(j, a.out, m);
  return exit_pass;
}

int halfplane_asympt(const CLI::App* sub, const HalfplaneArgs& a) {
  using namespace halfplane;
  const auto cfg = make_interface(a.k1, a.k2, a.b);
  Manifest m(sub, halfplane_config_json(cfg), halfplane_hash(cfg), halfplane_conventions(a));
  const Point x{a.r * std::cos(a.theta), a.r * std::sin(a.theta)};
  const Wave wave = x[1] >= 0.0 ? Wave::Reflected : Wave::Transmitted;
  json j{{"r", a.r}, {"theta", a.theta}, {"wave", wave == Wave::Reflected ? "reflected" : "transmitted"}};
  j["cylindrical"] = complex_json(asympt_cylindrical(x, cfg, wave, parse_form(a.form)));
  json lat = json::object();
  for (auto w : {LateralWave::PhiL1, LateralWave::PhiL2, LateralWave::PsiL1, LateralWave::PsiL2})
    if (auto s = lateral_sector(cfg, w); s && a.theta > s->lo && a.theta < s->hi)
      lat[lateral_wave_name(w)] = complex_json(asympt_lateral(x, cfg, w));
  j["lateral"] = lat;
  j["total"] = complex_json(asympt_total(x, cfg, parse_form(a.form)));
  if (auto w = transition_warning(x, cfg)) {
    j["warning"] = *w;
    std::cerr << "warning: " << *w << "\n";
  }
  emit_json(j, a.out, m);
  return exit_pass;
}

int halfplane_heatmap(const CLI::App* sub, const HalfplaneArgs& a) {
  const auto cfg = halfplane::make_interface(a.k1, a.k2, a.b);
  if (a.n < 1 || !(a.extent > 0.0)) throw InvalidInput("need --n >= 1 and --extent > 0");
  Manifest m(sub, halfplane_config_json(cfg), halfplane_hash(cfg), halfplane_conventions(a));
  halfplane::HeatmapGrid g{-a.extent, a.extent, -a.extent, a.extent, a.n, a.n};
  auto h = halfplane::heatmap(cfg, g, parse_form(a.form), a.threads);
  m.output(a.out);
  auto f = open_out(a.out);
  f << m.csv_header() << "\n";
  halfplane::write_heatmap_csv(f, h);
  m.finish();
  std::printf("wrote %d x %d grid to %s\n", a.n, a.n, a.out.c_str());
  return exit_pass;
}

int halfplane_verify(const CLI::App* sub, const HalfplaneArgs& a) {
  const auto cfg = halfplane::make_interface(a.k1, a.k2, a.b);
  Manifest m(sub, halfplane_config_json(cfg), halfplane_hash(cfg), {{"cylindrical_form", "saddle"}});
  verify::HalfplaneOptions o;
  o.k1r_cylindrical = a.k1r_cylindrical;
  o.k1r_lateral = cfg.k1 * a.r;
  o.lateral_theta = a.theta;
  const auto rep = verify::halfplane_report(cfg, o);
  print_report(rep);
  if (!a.out.empty()) emit_json(verify::to_json(rep), a.out, m);
  return rep.pass() ? exit_pass : exit_failed;
}

// ---- wedge ----

struct WedgeArgs {
  double k1 = 1.0, k2 = 0.0, kappa = 0.0, theta0 = 0.0;
  spectral::ContourParams contour;
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
  std::string trace, out;
  int n = 180;
  std::string convention = "outgoing", lateral_norm = "crossing";
  double margin = farfield::default_margin;
  double r = 0.0, theta = 0.0;
  std::vector<double> radii{8, 10, 12, 14, 16, 18, 20, 22, 24};
  double sigma = 0.3, band = 0.15;
  int points = 1000;
  unsigned seed = 7;
  bool no_support = false, no_locality = false;
  int threads = 0;
  // Optional physical parameters a trace must match.
  std::optional<double> expect_k1, expect_k2, expect_kappa, expect_theta0;
};

farfield::FarFieldOptions farfield_options(const WedgeArgs& a) {
  farfield::FarFieldOptions o;
  auto c = farfield::parse_convention(a.convention);
  if (!c) throw InvalidInput("unknown convention " + a.convention);
  o.convention = *c;
  if (a.lateral_norm == "crossing")
    o.lateral_norm = farfield::LateralNorm::Crossing;
  else if (a.lateral_norm == "displayed")
    o.lateral_norm = farfield::LateralNorm::Displayed;
  else
    throw InvalidInput("unknown lateral normalization " + a.lateral_norm);
  o.margin = a.margin;
  return o;
}

json wedge_conventions(const farfield::FarFieldOptions& o) {
  return {{"cylindrical", farfield::convention_name(o.convention)},
          {"lateral_norm", farfield::lateral_norm_name(o.lateral_norm)}};
}

// 5 pi / 4 typed to four decimals (3.927) lands just outside the admissible range.
double snap_theta0(double theta0) {
  constexpr double top = 1.25 * std::numbers::pi;
  if (theta0 != top && std::abs(theta0 - top) < 5e-4) {
    std::cerr << "note: theta0 " << fmt("%.6g", theta0) << " taken as 5pi/4\n";
    return top;
  }
  return theta0;
}

spectral::SpectralTrace load_checked(const WedgeArgs& a) {
  auto t = load_trace(a.trace);
  if (a.expect_k1 || a.expect_k2 || a.expect_kappa || a.expect_theta0) {
    const auto want = kernel::make_config(a.expect_k1.value_or(t.cfg.k1.real()), a.expect_k2.value_or(t.cfg.k2.real()),
                                          a.expect_kappa.value_or(t.cfg.kappa),
                                          a.expect_theta0 ? snap_theta0(*a.expect_theta0) : t.cfg.theta0, true);
    if (kernel::config_hash(want) != kernel::config_hash(t.cfg))
      throw InvalidInput("stale trace: " + a.trace + " has config hash " + kernel::config_hash(t.cfg) +
                         ", the requested configuration has " + kernel::config_hash(want));
  }
  return t;
}

int wedge_solve(const CLI::App* sub, const WedgeArgs& a) {
  const auto cfg = kernel::make_config(a.k1, a.k2, a.kappa, snap_theta0(a.theta0), true);
  Manifest m(sub, kernel::to_json(cfg), kernel::config_hash(cfg), wedge_conventions({}));
  spectral::SolveOptions so;
  so.damping = a.damping;
  so.threads = a.threads;
  spectral::SpectralTrace t;
  try {
    t = spectral::solve_traces(cfg, a.contour, a.tol, a.max_iter, so);
  } catch (const spectral::NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return exit_nonconvergence;
  }
  for (std::size_t i = 0; i < t.history.size(); ++i) std::printf("iteration %zu residual %.3e\n", i + 1, t.history[i]);
  std::printf("converged in %d iterations, %zu nodes, config hash %s\n", t.iterations, t.contour.nodes.size(),
              kernel::config_hash(cfg).c_str());
  m.output(a.out);
  m.set("solve", {{"iterations", t.iterations}, {"residual", t.residual}, {"history", t.history}});
  json j = spectral::to_json(t);
  j["manifest"] = m.path();
  open_out(a.out) << j.dump() << "\n";
  m.finish();
  return exit_pass;
}

int wedge_coeffs(const CLI::App* sub, const WedgeArgs& a) {
  const auto t = load_checked(a);
  const auto o = farfield_options(a);
  if (a.n < 1) throw InvalidInput("need --n >= 1");
  Manifest m(sub, kernel::to_json(t.cfg), kernel::config_hash(t.cfg), wedge_conventions(o));
  m.set("trace", a.trace);

  // Cell midpoints of [0, 2 pi), so no sample sits on a face of the wedge.
  std::vector<farfield::CylindricalRow> cyl;
  int failed = 0;
  for (int i = 0; i < a.n; ++i) {
    const double th = (i + 0.5) * 2.0 * std::numbers::pi / a.n;
    try {
      cyl.push_back(farfield::cylindrical_coefficients(t, {th}, o).front());
    } catch (const std::exception&) {
      farfield::CylindricalRow r;
      r.theta = th;
      r.id = farfield::region_of({std::cos(th), std::sin(th)}) == farfield::Region::Interior ? "psi_C" : "phi_C";
      r.D = cplx(std::nan(""), 0.0);
      cyl.push_back(r);
      ++failed;
    }
  }
  if (failed) std::cerr << "warning: " << failed << " directions could not be evaluated in this convention\n";
  const auto lat = farfield::lateral_coefficients(t, o);
  if (!lat.note.empty()) std::cerr << "note: " << lat.note << "\n";

  m.output(a.out);
  auto f = open_out(a.out);
  farfield::write_coefficients_csv(f, t.cfg, cyl, lat, m.csv_header());
  m.finish();
  std::printf("wrote %zu cylindrical and %zu lateral rows to %s\n", cyl.size(), lat.rows.size(), a.out.c_str());
  return exit_pass;
}

int wedge_verify(const CLI::App* sub, const WedgeArgs& a) {
  const auto t = load_checked(a);
  Manifest m(sub, kernel::to_json(t.cfg), kernel::config_hash(t.cfg), wedge_conventions({}));
  m.set("trace", a.trace);
  verify::WedgeOptions o;
  o.random_points = a.points;
  o.seed = a.seed;
  o.support = !a.no_support;
  o.locality = !a.no_locality;
  o.threads = a.threads;
  const auto rep = verify::wedge_report(t, o);
  print_report(rep);
  const json j = verify::to_json(rep);
  if (a.out.empty())
    std::cout << j.dump(2) << "\n";
  else
    emit_json(j, a.out, m);
  return rep.pass() ? exit_pass : exit_failed;
}

int wedge_field(const CLI::App* sub, const WedgeArgs& a) {
  const auto t = load_checked(a);
  const auto o = farfield_options(a);
  if (!(a.r > 0.0)) throw InvalidInput("need --r > 0");
  Manifest m(sub, kernel::to_json(t.cfg), kernel::config_hash(t.cfg), wedge_conventions(o));
  m.set("trace", a.trace);
  try {
    const auto f = farfield::total_far_field(a.r, a.theta, t, o);
    json j{{"r", a.r}, {"theta", a.theta}, {"total", complex_json(f.total)}, {"margin", f.margin},
           {"nearest", f.nearest}};
    j["region"] = f.region == farfield::Region::Interior ? "interior" : "exterior";
    json b = json::object();
    for (const auto& [id, v] : f.breakdown) b[id] = complex_json(v);
    j["breakdown"] = b;
    emit_json(j, a.out, m);
  } catch (const farfield::MarginError& e) {
    std::cerr << e.what() << " (line " << e.line << " at " << fmt("%.6f", e.angle) << ", distance "
              << fmt("%.2e", e.distance) << ")\n";
    return exit_invalid;
  }
  return exit_pass;
}

int wedge_convention(const CLI::App* sub, const WedgeArgs& a) {
  const auto t = load_checked(a);
  if (!(t.cfg.kappa > 0.0)) throw InvalidInput("the convention check needs kappa > 0");
  Manifest m(sub, kernel::to_json(t.cfg), kernel::config_hash(t.cfg), wedge_conventions({}));
  m.set("trace", a.trace);
  spectral::SupportOptions so;
  so.sigma = a.sigma;
  so.threads = a.threads;
  const auto c = farfield::check_convention(t, a.radii, {}, a.band, so);
  using farfield::CylConvention;
  const CylConvention other = c.chosen == CylConvention::Outgoing ? CylConvention::Displayed : CylConvention::Outgoing;
  const bool pass = c.error(c.chosen) < convention_fit && c.error(other) > convention_reject;
  std::printf("rays %zu, shape error displayed %.4f outgoing %.4f, chosen %s, amplitude error %.3f: %s\n",
              c.rays.size(), c.error_displayed, c.error_outgoing, farfield::convention_name(c.chosen),
              c.amplitude_error, pass ? "pass" : "FAIL");
  json rays = json::array();
  for (const auto& r : c.rays)
    rays.push_back({{"theta", r.theta},
                    {"shape_error", {{"displayed", r.shape_error[0]}, {"outgoing", r.shape_error[1]}}},
                    {"fitted", {{"displayed", complex_json(r.fitted[0])}, {"outgoing", complex_json(r.fitted[1])}}},
                    {"predicted",
                     {{"displayed", complex_json(r.predicted[0])}, {"outgoing", complex_json(r.predicted[1])}}}});
  json j{{"radii", c.radii},
         {"rays", rays},
         {"error_displayed", c.error_displayed},
         {"error_outgoing", c.error_outgoing},
         {"amplitude_error", c.amplitude_error},
         {"chosen", farfield::convention_name(c.chosen)},
         {"pass", pass}};
  if (!a.out.empty()) emit_json(j, a.out, m);
  return pass ? exit_pass : exit_failed;
}

// ---- locality ----

int locality_demo(const CLI::App* sub, double radius, const std::string& out) {
  Manifest m(sub, json::object(), kernel::digest("locality"), json::object());
  json rows = json::array();
  std::printf("%-34s %-26s %-26s %s\n", "model", "estimate", "oracle", "rel.error");
  for (const auto& c : locality::model_library()) {
    const auto r = locality::compare_model(c, radius);
    std::printf("%-34s %+.5e%+.5ei %+.5e%+.5ei %.2e\n", c.name.c_str(), r.estimate.real(), r.estimate.imag(),
                r.oracle.real(), r.oracle.imag(), r.rel_error);
    rows.push_back({{"model", c.name},
                    {"estimate", complex_json(r.estimate)},
                    {"oracle", complex_json(r.oracle)},
                    {"rel_error", r.rel_error}});
  }
  if (!out.empty()) emit_json({{"radius", radius}, {"models", rows}}, out, m);
  return exit_pass;
}

void add_trace_options(CLI::App* s, WedgeArgs& w) {
  s->add_option("--trace", w.trace, "Spectral trace JSON written by `wedge solve`")
      ->required()
      ->check(CLI::ExistingFile);
  s->add_option("--expect-k1", w.expect_k1, "Refuse a trace whose Re k1 differs");
  s->add_option("--expect-k2", w.expect_k2, "Refuse a trace whose Re k2 differs");
  s->add_option("--expect-kappa", w.expect_kappa, "Refuse a trace whose kappa differs");
  s->add_option("--expect-theta0", w.expect_theta0, "Refuse a trace whose incidence angle differs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffraction by a penetrable right-angled wedge: spectral traces, far-field coefficients and checks",
               "pwedge"};
  app.set_version_flag("--version", PWEDGE_VERSION);
  app.set_config("--config", "", "Config file (TOML); command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  HalfplaneArgs h;
  WedgeArgs w;
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: all cores)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  int rc = exit_pass;
  auto run = [&rc](auto fn) { return [fn, &rc] { rc = fn(); }; };

  // halfplane
  auto* hp = app.add_subcommand("halfplane", "Two half-spaces with a point source: exact and asymptotic fields");
  hp->require_subcommand(1);
  auto hp_common = [&](CLI::App* s) {
    s->add_option("--k1", h.k1, "Wavenumber above the interface")->required()->check(CLI::PositiveNumber);
    s->add_option("--k2", h.k2, "Wavenumber below the interface")->required()->check(CLI::PositiveNumber);
    s->add_option("--b", h.b, "Source height")->capture_default_str()->check(CLI::NonNegativeNumber);
    s->add_option("--out", h.out, "Output file; a manifest is written next to it");
  };
  auto* hf = hp->add_subcommand("field", "Exact field at one point, with the asymptotic total");
  hp_common(hf);
  hf->add_option("--x1", h.x1)->required();
  hf->add_option("--x2", h.x2)->required();
  hf->add_option("--form", h.form, "Cylindrical term: displayed or saddle")->capture_default_str();
  hf->callback(run([&] { return halfplane_field(hf, h); }));

  auto* ha = hp->add_subcommand("asympt", "Cylindrical and lateral terms at (r, theta)");
  hp_common(ha);
  ha->add_option("--r", h.r)->required()->check(CLI::PositiveNumber);
  ha->add_option("--theta", h.theta, "Direction in radians")->required();
  ha->add_option("--form", h.form, "Cylindrical term: displayed or saddle")->capture_default_str();
  ha->callback(run([&] { return halfplane_asympt(ha, h); }));

  auto* hh = hp->add_subcommand("heatmap", "Asymptotic field on a square grid, as CSV");
  hp_common(hh);
  hh->get_option("--out")->required();
  hh->add_option("--extent", h.extent, "Half-width of the square")->capture_default_str();
  hh->add_option("--n", h.n, "Cells per side")->capture_default_str();
  hh->add_option("--form", h.form, "Cylindrical term: displayed or saddle")->capture_default_str();
  hh->callback(run([&] {
    h.threads = threads;
    return halfplane_heatmap(hh, h);
  }));

  auto* hv = hp->add_subcommand("verify", "Asymptotics against quadrature; pass/fail per check");
  hp_common(hv);
  hv->add_option("--r", h.r, "Radius for the lateral-wave comparison")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  hv->add_option("--theta", h.theta, "Direction for the lateral-wave comparison")->capture_default_str();
  hv->add_option("--k1r-cylindrical", h.k1r_cylindrical, "k1 r for the cylindrical comparison")->capture_default_str();
  hv->callback(run([&] { return halfplane_verify(hv, h); }));

  // wedge
  auto* wg = app.add_subcommand("wedge", "The penetrable wedge");
  wg->require_subcommand(1);
  auto* ws = wg->add_subcommand("solve", "Solve for the spectral traces and save them");
  ws->add_option("--k1", w.k1, "Re k1")->capture_default_str()->check(CLI::PositiveNumber);
  ws->add_option("--k2", w.k2, "Re k2")->required()->check(CLI::PositiveNumber);
  ws->add_option("--kappa", w.kappa, "Imaginary part of both wavenumbers")->required();
  ws->add_option("--theta0", w.theta0, "Incidence angle in radians, in (pi/2, 5pi/4]")->required();
  ws->add_option("--nodes", w.contour.n_nodes, "Base nodes per side")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ws->add_option("--truncation", w.contour.truncation_factor, "Contour length over max|k|")->capture_default_str();
  ws->add_option("--fine", w.contour.fine_factor, "Panel width near the real axis over kappa")->capture_default_str();
  ws->add_option("--tol", w.tol, "Fixed-point tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  ws->add_option("--max-iter", w.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  ws->add_option("--damping", w.damping)->capture_default_str();
  ws->add_option("--out", w.out, "Trace JSON")->required();
  ws->callback(run([&] {
    w.threads = threads;
    return wedge_solve(ws, w);
  }));

  auto* wc = wg->add_subcommand("coeffs", "Cylindrical and lateral coefficient table, as CSV");
  add_trace_options(wc, w);
  wc->add_option("--out", w.out)->required();
  wc->add_option("--n", w.n, "Directions over [0, 2pi)")->capture_default_str();
  wc->add_option("--convention", w.convention, "outgoing or displayed")->capture_default_str();
  wc->add_option("--lateral-norm", w.lateral_norm, "crossing or displayed")->capture_default_str();
  wc->add_option("--margin", w.margin, "Exclusion band around discontinuity lines")->capture_default_str();
  wc->callback(run([&] { return wedge_coeffs(wc, w); }));

  auto* wv = wg->add_subcommand("verify", "Residual, support, overlap, crossing and locality checks");
  add_trace_options(wv, w);
  wv->add_option("--out", w.out, "Report JSON");
  wv->add_option("--points", w.points, "Random points for the Wiener-Hopf residual")->capture_default_str();
  wv->add_option("--seed", w.seed)->capture_default_str();
  wv->add_flag("--no-support", w.no_support, "Skip the quadrant-support test");
  wv->add_flag("--no-locality", w.no_locality, "Skip the locality estimators");
  wv->callback(run([&] {
    w.threads = threads;
    return wedge_verify(wv, w);
  }));

  auto* wf = wg->add_subcommand("field", "Far field at (r, theta) with its breakdown");
  add_trace_options(wf, w);
  wf->add_option("--r", w.r)->required();
  wf->add_option("--theta", w.theta, "Direction in radians")->required();
  wf->add_option("--convention", w.convention, "outgoing or displayed")->capture_default_str();
  wf->add_option("--lateral-norm", w.lateral_norm, "crossing or displayed")->capture_default_str();
  wf->add_option("--margin", w.margin)->capture_default_str();
  wf->add_option("--out", w.out);
  wf->callback(run([&] { return wedge_field(wf, w); }));

  auto* wn = wg->add_subcommand("convention", "Pick the cylindrical-wave convention from a damped field");
  add_trace_options(wn, w);
  wn->add_option("--radii", w.radii)->capture_default_str();
  wn->add_option("--sigma", w.sigma, "Window width in units of 1/Re k1")->capture_default_str();
  wn->add_option("--band", w.band, "Half-width kept clear around discontinuity lines")->capture_default_str();
  wn->add_option("--out", w.out);
  wn->callback(run([&] {
    w.threads = threads;
    return wedge_convention(wn, w);
  }));

  // locality
  auto* lo = app.add_subcommand("locality", "Local estimators for singular integrands");
  lo->require_subcommand(1);
  double radius = 200.0;
  std::string lo_out;
  auto* ld = lo->add_subcommand("demo", "Estimator against brute force for the model library");
  ld->add_option("--radius", radius, "Scaled radius")->capture_default_str();
  ld->add_option("--out", lo_out);
  ld->callback(run([&] { return locality_demo(ld, radius, lo_out); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_invalid;
  } catch (const spectral::NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const halfplane::QuadratureError& e) {
    std::cerr << "quadrature did not converge: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_invalid;
  }
  return rc;
}
