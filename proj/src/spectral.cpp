#include "pwedge/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "parallel.hpp"

namespace pwedge::spectral {

using contours::branch_sqrt;
using contours::Contour;

namespace {

const cplx I(0.0, 1.0);

struct Roots {
  cplx r1, r2;
};

Roots roots_of(cplx a, const WedgeConfig& cfg) {
  return {branch_sqrt(cfg.k1 * cfg.k1 - a * a), branch_sqrt(cfg.k2 * cfg.k2 - a * a)};
}

// The continued variable u with its roots, the other variable v, and the forcing poles
// (a_u, a_v) in the matching order. Cont1: u = alpha1; Cont2: u = alpha2.
struct Target {
  cplx u, ru1, ru2, v;
};

struct Setup {
  cplx a_u, a_v;
  const std::vector<cplx>* trace;
};

Setup setup_for(Formula f, const SpectralTrace& t) {
  if (f == Formula::Cont1) return {t.cfg.a1, t.cfg.a2, &t.traceB};
  return {t.cfg.a2, t.cfg.a1, &t.traceA};
}

cplx integral(const Target& q, const SpectralTrace& t, const std::vector<cplx>& tr) {
  const auto& nodes = t.contour.nodes;
  const cplx dk = t.cfg.k2 * t.cfg.k2 - t.cfg.k1 * t.cfg.k1;
  if (dk == 0.0) return 0.0;
  cplx sum = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const cplx z = t.z[n], s = t.r1[n];
    sum += nodes[n].weight * tr[n] * (q.ru1 - z) / ((q.ru2 - z) * (z - q.v) * (s - q.u) * s);
  }
  return dk * sum;
}

struct OnCut {
  cplx z, r1, r2;
};

OnCut on_cut(const WedgeConfig& cfg, int cut, contours::Side side, double x) {
  const cplx k = cut == 1 ? cfg.k1 : cfg.k2;
  OnCut o;
  o.z = contours::cut_point(cut, x, k);
  const cplx own(side == contours::Side::Right ? x : -x, 0.0);
  if (cfg.transparent()) {
    o.r1 = o.r2 = own;
  } else if (cut == 1) {
    o.r1 = own;
    o.r2 = branch_sqrt(cfg.k2 * cfg.k2 - o.z * o.z);
  } else {
    o.r2 = own;
    o.r1 = branch_sqrt(cfg.k1 * cfg.k1 - o.z * o.z);
  }
  return o;
}

// A quadrature node produced by subdividing a panel: on-cut point, its r1 root, oriented
// weight and the interpolated trace.
struct SubNode {
  cplx z, s, w, tr;
};

// Panels whose Bernstein ellipse contains a near-singular parameter of the target are split
// recursively in their affine variable, with the trace interpolated from the panel's nodes.
// The integrand is singular where the r1 image of the contour meets u and where the contour
// meets v; on cut j these are the parameters x with x^2 = u^2 + k_j^2 - k1^2 and x^2 = k_j^2 - v^2.
class Refiner {
 public:
  Refiner(const SpectralTrace& t, const std::vector<cplx>& tr) : t_(t), tr_(tr), g_(contours::gauss_rule(order(t))) {}

  static int order(const SpectralTrace& t) { return t.params.panel_order; }

  void set_target(cplx u, const cplx* v) {
    const WedgeConfig& c = t_.cfg;
    for (int j = 0; j < 2; ++j) {
      const cplx k = j == 0 ? c.k1 : c.k2;
      auto& xs = cand_[j];
      xs.clear();
      cplx x = std::sqrt(u * u + k * k - c.k1 * c.k1);
      xs.push_back(x);
      xs.push_back(-x);
      if (v) {
        cplx y = std::sqrt(k * k - *v * *v);
        xs.push_back(y);
        xs.push_back(-y);
      }
    }
  }

  bool near(const SpectralTrace::Panel& p) const { return inside(p, -1.0, 1.0); }

  void refine(const SpectralTrace::Panel& p, std::vector<SubNode>& out) const {
    const std::size_t m = g_.x.size();
    xi_.resize(m);
    lam_.assign(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) xi_[i] = (y_of(p, t_.contour.nodes[p.start + i].param) - p.mid) / p.half;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) lam_[i] /= xi_[i] - xi_[j];
    split(p, -1.0, 1.0, 0, out);
  }

 private:
  cplx y_of(const SpectralTrace::Panel& p, cplx x) const { return p.tail ? t_.contour.truncation / x : x; }
  double y_of(const SpectralTrace::Panel& p, double x) const { return p.tail ? t_.contour.truncation / x : x; }

  bool inside(const SpectralTrace::Panel& p, double a, double b) const {
    const int cut = t_.contour.nodes[p.start].cut_index;
    for (cplx x : cand_[cut - 1]) {
      if (x == 0.0 && p.tail) continue;
      cplx xi = (y_of(p, x) - p.mid) / p.half;
      cplx loc = (xi - 0.5 * (a + b)) / (0.5 * (b - a));
      if (std::abs(loc - 1.0) + std::abs(loc + 1.0) < 2.9) return true;
    }
    return false;
  }

  cplx interpolate(std::size_t start, double xi) const {
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < xi_.size(); ++i) {
      double d = xi - xi_[i];
      if (d == 0.0) return tr_[start + i];
      num += lam_[i] / d * tr_[start + i];
      den += lam_[i] / d;
    }
    return num / den;
  }

  void split(const SpectralTrace::Panel& p, double a, double b, int depth, std::vector<SubNode>& out) const {
    if (depth < 40 && inside(p, a, b)) {
      const double c = 0.5 * (a + b);
      split(p, a, c, depth + 1, out);
      split(p, c, b, depth + 1, out);
      return;
    }
    const auto& nd = t_.contour.nodes[p.start];
    const double T = t_.contour.truncation;
    const double orient = nd.side == contours::Side::Left ? -1.0 : 1.0;
    for (std::size_t i = 0; i < g_.x.size(); ++i) {
      double xi = 0.5 * (a + b) + 0.5 * (b - a) * g_.x[i];
      double y = p.mid + p.half * xi;
      double x = p.tail ? T / y : y;
      double dxdy = p.tail ? T / (y * y) : 1.0;
      OnCut oc = on_cut(t_.cfg, nd.cut_index, nd.side, x);
      cplx w = orient * 0.5 * (b - a) * g_.w[i] * p.half * dxdy * (-x / oc.z);
      out.push_back({oc.z, oc.r1, w, interpolate(p.start, xi)});
    }
  }

  const SpectralTrace& t_;
  const std::vector<cplx>& tr_;
  const contours::GaussRule& g_;
  std::vector<cplx> cand_[2];
  mutable std::vector<double> xi_, lam_;
};

// The integral with near panels subdivided; used for evaluation off the solver nodes.
cplx integral_refined(const Target& q, const SpectralTrace& t, const std::vector<cplx>& tr) {
  const cplx dk = t.cfg.k2 * t.cfg.k2 - t.cfg.k1 * t.cfg.k1;
  if (dk == 0.0) return 0.0;
  const auto& nodes = t.contour.nodes;
  const std::size_t m = Refiner::order(t);
  Refiner rf(t, tr);
  rf.set_target(q.u, &q.v);
  std::vector<SubNode> sub;
  cplx sum = 0.0;
  auto term = [&](cplx z, cplx s) { return (q.ru1 - z) / ((q.ru2 - z) * (z - q.v) * (s - q.u) * s); };
  for (const auto& p : t.panels) {
    if (rf.near(p)) {
      sub.clear();
      rf.refine(p, sub);
      for (const auto& sn : sub) sum += sn.w * sn.tr * term(sn.z, sn.s);
    } else {
      for (std::size_t n = p.start; n < p.start + m; ++n) sum += nodes[n].weight * tr[n] * term(t.z[n], t.r1[n]);
    }
  }
  return dk * sum;
}

cplx external_term(const Target& q, const Setup& st, const SpectralTrace& t) {
  const WedgeConfig& c = t.cfg;
  Roots ra = roots_of(st.a_v, c);
  cplx kmo_u = (ra.r2 - q.u) / (ra.r1 - q.u);
  cplx kom_u = (q.ru2 - st.a_v) / (q.ru1 - st.a_v);
  cplx kmo_aa = (ra.r2 - st.a_u) / (ra.r1 - st.a_u);
  cplx p = 1.0 / ((st.a_u - q.u) * (st.a_v - q.v));
  return t.forcing_scale * kmo_u * p / (kom_u * kmo_aa);
}

cplx bracket(const Target& q, const Setup& st, const SpectralTrace& t, bool refined) {
  cplx in = refined ? integral_refined(q, t, *st.trace) : integral(q, t, *st.trace);
  return -I / (4.0 * std::numbers::pi) * in - external_term(q, st, t);
}

Target target_for(const cvec2& a, Formula f, const WedgeConfig& cfg) {
  cplx u = f == Formula::Cont1 ? a[0] : a[1];
  cplx v = f == Formula::Cont1 ? a[1] : a[0];
  Roots r = roots_of(u, cfg);
  return {u, r.r1, r.r2, v};
}

void check_target(const Target& q, const Setup& st, const WedgeConfig& cfg) {
  const double tiny = 1e-10 * cfg.scale();
  if (std::abs(q.ru1 + q.v) < tiny) throw SingularityError("denominator of the circle factor vanishes");
  if (std::abs(st.a_u - q.u) < tiny || std::abs(st.a_v - q.v) < tiny) throw SingularityError("forcing pole");
}

double sup_norm(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto x : v) m = std::max(m, std::abs(x));
  return m;
}

// New trace values at all nodes for the given formula from the current traces.
std::vector<cplx> apply(const SpectralTrace& t, Formula f, int threads) {
  Setup st = setup_for(f, t);
  const auto& nodes = t.contour.nodes;
  std::vector<cplx> out(nodes.size());
  detail::parallel_for(nodes.size(), threads, [&](std::size_t m) {
    Target q{t.z[m], t.r1[m], t.r2[m], t.r1[m]};
    cplx kp = (q.ru2 + q.v) / (q.ru1 + q.v);
    out[m] = bracket(q, st, t, false) / kp;
  });
  for (std::size_t m = 0; m < out.size(); ++m)
    if (!finite(out[m])) throw NonFiniteError("trace update produced a non-finite value at node " + std::to_string(m));
  return out;
}

}  // namespace

void SpectralTrace::prepare() {
  // The side enters only through the roots on the node's own cut, taken as exact limits;
  // evaluating the rational factors on the cut itself keeps both consistent.
  const std::size_t n_nodes = contour.nodes.size();
  z.resize(n_nodes);
  r1.resize(n_nodes);
  r2.resize(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const auto& nd = contour.nodes[n];
    OnCut o = on_cut(cfg, nd.cut_index, nd.side, nd.param);
    z[n] = o.z;
    r1[n] = o.r1;
    r2[n] = o.r2;
  }
  panels.clear();
  const std::size_t m = params.panel_order;
  if (m == 0 || n_nodes % m != 0) throw std::invalid_argument("contour size is not a multiple of the panel order");
  const double xmax = contours::gauss_rule(static_cast<int>(m)).x.back();
  for (std::size_t start = 0; start < n_nodes; start += m) {
    Panel p;
    p.start = start;
    p.tail = contour.tail && contour.nodes[start].param > contour.truncation;
    double lo = 1e300, hi = -1e300;
    for (std::size_t n = start; n < start + m; ++n) {
      double y = p.tail ? contour.truncation / contour.nodes[n].param : contour.nodes[n].param;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    p.mid = 0.5 * (lo + hi);
    p.half = 0.5 * (hi - lo) / xmax;
    panels.push_back(p);
  }
}

Contour solver_contour(const WedgeConfig& cfg, const ContourParams& p) {
  const double km = cfg.scale();
  contours::ContourOptions o;
  o.panel_order = p.panel_order;
  o.mapped_tail = true;
  o.attractors = {cfg.k1.real(), cfg.k2.real()};
  if (cfg.kappa > 0.0) {
    o.fine_width = p.fine_factor * cfg.kappa;
    o.fine_until = 2.0 * km;
  }
  const double T = p.truncation_factor * km, eps = p.offset_factor * km;
  Contour c1 = contours::build_contour(1, cfg.k1, cfg.kappa, p.n_nodes, T, eps, o);
  Contour c2 = contours::build_contour(2, cfg.k2, cfg.kappa, p.n_nodes, T, eps, o);
  return contours::join(c1, c2);
}

SpectralTrace solve_traces(const WedgeConfig& cfg, const ContourParams& p, double tol, int max_iter,
                           const SolveOptions& opt, bool allow_unconverged) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_traces: tol must be positive");
  if (!cfg.transparent() && !(cfg.kappa > 0.0))
    throw SingularityError("solve_traces: kappa > 0 is required so the trace points avoid the poles");
  SpectralTrace t;
  t.cfg = cfg;
  t.params = p;
  t.forcing_scale = opt.forcing_scale;
  t.contour = solver_contour(cfg, p);
  t.prepare();
  const std::size_t n = t.contour.nodes.size();
  t.traceA.assign(n, 0.0);
  t.traceB.assign(n, 0.0);
  // Initial guess: external additive terms only (the integrals vanish on zero traces).
  t.traceA = apply(t, Formula::Cont1, opt.threads);
  t.traceB = apply(t, Formula::Cont2, opt.threads);
  const double d = opt.damping;
  for (int it = 1; it <= max_iter; ++it) {
    auto a = apply(t, Formula::Cont1, opt.threads);
    double change = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      cplx nv = (1.0 - d) * t.traceA[m] + d * a[m];
      change = std::max(change, std::abs(nv - t.traceA[m]));
      t.traceA[m] = nv;
    }
    auto b = apply(t, Formula::Cont2, opt.threads);
    for (std::size_t m = 0; m < n; ++m) {
      cplx nv = (1.0 - d) * t.traceB[m] + d * b[m];
      change = std::max(change, std::abs(nv - t.traceB[m]));
      t.traceB[m] = nv;
    }
    double scale = std::max(sup_norm(t.traceA), sup_norm(t.traceB));
    t.residual = scale > 0.0 ? change / scale : change;
    t.history.push_back(t.residual);
    t.iterations = it;
    if (t.residual < tol) {
      t.converged = true;
      break;
    }
  }
  if (!t.converged && !allow_unconverged) {
    std::ostringstream os;
    os << "fixed-point iteration did not reach tol " << tol << " in " << max_iter << " sweeps; history:";
    for (double h : t.history) os << ' ' << h;
    throw NonConvergence(os.str());
  }
  return t;
}

double sweep_change(const SpectralTrace& t) {
  SpectralTrace c = t;
  auto a = apply(c, Formula::Cont1, 0);
  double change = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) change = std::max(change, std::abs(a[m] - c.traceA[m]));
  c.traceA = a;
  auto b = apply(c, Formula::Cont2, 0);
  for (std::size_t m = 0; m < b.size(); ++m) change = std::max(change, std::abs(b[m] - c.traceB[m]));
  double scale = std::max(sup_norm(t.traceA), sup_norm(t.traceB));
  return scale > 0.0 ? change / scale : change;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::PsiCont: return "PsiCont";
    case Region::PsiCont2: return "PsiCont2";
    case Region::Overlap: return "Overlap";
    case Region::Invalid: return "Invalid";
  }
  return "?";
}

namespace {

bool on_lower_cut(cplx a, const WedgeConfig& cfg) {
  const double tiny = 1e-12 * std::norm(cfg.scale());
  for (cplx k : {cfg.k1, cfg.k2}) {
    cplx w = k * k - a * a;
    if (std::abs(w.imag()) <= tiny && w.real() >= 0.0 && a.imag() <= 0.0) return true;
  }
  return false;
}

bool in_H_minus(cplx a, cplx pole, const WedgeConfig& cfg) {
  return a.imag() <= 0.0 && !on_lower_cut(a, cfg) && std::abs(a - pole) > 1e-10 * cfg.scale();
}

}  // namespace

Region classify(const cvec2& a, const WedgeConfig& cfg) {
  bool h1 = in_H_minus(a[0], cfg.a1, cfg), h2 = in_H_minus(a[1], cfg.a2, cfg);
  if (h1 && h2) return Region::Overlap;
  if (h1 && a[1].imag() >= 0.0) return Region::PsiCont;
  if (h2 && a[0].imag() >= 0.0) return Region::PsiCont2;
  return Region::Invalid;
}

cplx bracket_formula(const cvec2& a, Formula f, const SpectralTrace& t) {
  Setup st = setup_for(f, t);
  Target q = target_for(a, f, t.cfg);
  check_target(q, st, t.cfg);
  cplx v = bracket(q, st, t, true);
  if (!finite(v)) throw NonFiniteError("continuation formula produced a non-finite value");
  return v;
}

cplx psi_formula(const cvec2& a, Formula f, const SpectralTrace& t) {
  Target q = target_for(a, f, t.cfg);
  cplx kp = (q.ru2 + q.v) / (q.ru1 + q.v);
  if (std::abs(kp) < 1e-14) throw SingularityError("eval_psi_pp: on the circle pole; use eval_phi");
  return bracket_formula(a, f, t) / kp;
}

cplx phi_formula(const cvec2& a, Formula f, const SpectralTrace& t) {
  Target q = target_for(a, f, t.cfg);
  cplx km = (q.ru2 - q.v) / (q.ru1 - q.v);
  return km * bracket_formula(a, f, t);
}

PsiValue eval_psi_detail(const cvec2& a, const SpectralTrace& t) {
  Region r = classify(a, t.cfg);
  switch (r) {
    case Region::PsiCont: return {psi_formula(a, Formula::Cont1, t), r, 0.0};
    case Region::PsiCont2: return {psi_formula(a, Formula::Cont2, t), r, 0.0};
    case Region::Overlap: {
      cplx v1 = psi_formula(a, Formula::Cont1, t), v2 = psi_formula(a, Formula::Cont2, t);
      return {0.5 * (v1 + v2), r, std::abs(v1 - v2)};
    }
    case Region::Invalid: break;
  }
  throw SingularityError("eval_psi_pp: point outside the validity domains of both continuation formulas");
}

cplx eval_psi_pp(const cvec2& a, const SpectralTrace& t) { return eval_psi_detail(a, t).value; }

std::vector<cplx> psi_grid(const std::vector<cplx>& a1, const std::vector<cplx>& a2, Formula f,
                           const SpectralTrace& t, int threads) {
  // Rows run over the continued variable u; the v dependence of the integral is only
  // 1/(z - v), so the double sum factors into a matrix product. Panels are refined for u
  // only, so v must stay clear of the contour.
  const bool c1 = f == Formula::Cont1;
  const auto& us = c1 ? a1 : a2;
  const auto& vs = c1 ? a2 : a1;
  Setup st = setup_for(f, t);
  const auto& nodes = t.contour.nodes;
  const std::size_t nn = nodes.size(), nu = us.size(), nv = vs.size();
  const cplx dk = t.cfg.k2 * t.cfg.k2 - t.cfg.k1 * t.cfg.k1;
  std::vector<cplx> inv(nv * nn);
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t n = 0; n < nn; ++n) inv[j * nn + n] = 1.0 / (t.z[n] - vs[j]);
  std::vector<cplx> out(nu * nv);
  // Rows are processed in blocks so each row of `inv` is reused from cache.
  const std::size_t block = 16, n_blocks = (nu + block - 1) / block;
  detail::parallel_for(n_blocks, threads, [&](std::size_t bi) {
    const std::size_t i0 = bi * block, i1 = std::min(nu, i0 + block);
    std::vector<Roots> r(i1 - i0);
    std::vector<std::vector<cplx>> m(i1 - i0, std::vector<cplx>(nn, 0.0));
    std::vector<std::vector<SubNode>> extra(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) {
      const std::size_t li = i - i0;
      r[li] = roots_of(us[i], t.cfg);
      if (dk == 0.0) continue;
      auto coef = [&](cplx z, cplx s) { return dk * (r[li].r1 - z) / ((r[li].r2 - z) * (s - us[i]) * s); };
      Refiner rf(t, *st.trace);
      rf.set_target(us[i], nullptr);
      const std::size_t order = Refiner::order(t);
      for (const auto& p : t.panels) {
        if (rf.near(p)) {
          auto& ex = extra[li];
          std::size_t first = ex.size();
          rf.refine(p, ex);
          for (std::size_t e = first; e < ex.size(); ++e) ex[e].w *= ex[e].tr * coef(ex[e].z, ex[e].s);
        } else {
          for (std::size_t n = p.start; n < p.start + order; ++n)
            m[li][n] = nodes[n].weight * (*st.trace)[n] * coef(t.z[n], t.r1[n]);
        }
      }
    }
    for (std::size_t j = 0; j < nv; ++j) {
      const cplx* iv = &inv[j * nn];
      for (std::size_t i = i0; i < i1; ++i) {
        const std::size_t li = i - i0;
        Target q{us[i], r[li].r1, r[li].r2, vs[j]};
        check_target(q, st, t.cfg);
        cplx sum = 0.0;
        const cplx* mi = m[li].data();
        for (std::size_t n = 0; n < nn; ++n) sum += mi[n] * iv[n];
        for (const auto& e : extra[li]) sum += e.w / (e.z - vs[j]);
        cplx br = -I / (4.0 * std::numbers::pi) * sum - external_term(q, st, t);
        cplx kp = (r[li].r2 + vs[j]) / (r[li].r1 + vs[j]);
        out[c1 ? i * nv + j : j * nu + i] = br / kp;
      }
    }
  });
  for (auto v : out)
    if (!finite(v)) throw NonFiniteError("psi_grid produced a non-finite value");
  return out;
}

cplx eval_phi(const cvec2& a, const SpectralTrace& t) {
  switch (classify(a, t.cfg)) {
    case Region::PsiCont: return phi_formula(a, Formula::Cont1, t);
    case Region::PsiCont2: return phi_formula(a, Formula::Cont2, t);
    case Region::Overlap: return 0.5 * (phi_formula(a, Formula::Cont1, t) + phi_formula(a, Formula::Cont2, t));
    case Region::Invalid: break;
  }
  throw SingularityError("eval_phi: point outside the validity domains of both continuation formulas");
}

cplx eval_phi34(const cvec2& a, const SpectralTrace& t) {
  return -eval_phi(a, t) - t.forcing_scale * kernel::forcing_P(a, t.cfg);
}

namespace {

nlohmann::json cvec_json(const std::vector<cplx>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (auto x : v) j.push_back({x.real(), x.imag()});
  return j;
}

std::vector<cplx> cvec_from(const nlohmann::json& j) {
  std::vector<cplx> v;
  for (const auto& x : j) v.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
  return v;
}

}  // namespace

nlohmann::json to_json(const SpectralTrace& t) {
  return {{"schema", "pwedge.spectral_trace"},
          {"schema_version", SpectralTrace::schema_version},
          {"config", kernel::to_json(t.cfg)},
          {"config_hash", kernel::config_hash(t.cfg)},
          {"params",
           {{"n_nodes", t.params.n_nodes},
            {"truncation_factor", t.params.truncation_factor},
            {"offset_factor", t.params.offset_factor},
            {"fine_factor", t.params.fine_factor},
            {"panel_order", t.params.panel_order}}},
          {"forcing_scale", t.forcing_scale},
          {"iterations", t.iterations},
          {"residual", t.residual},
          {"converged", t.converged},
          {"history", t.history},
          {"contour", contours::to_json(t.contour)},
          {"traceA", cvec_json(t.traceA)},
          {"traceB", cvec_json(t.traceB)}};
}

SpectralTrace trace_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "pwedge.spectral_trace") throw std::invalid_argument("not a spectral trace file");
  if (j.at("schema_version").get<int>() != SpectralTrace::schema_version)
    throw std::invalid_argument("unsupported spectral trace schema version");
  SpectralTrace t;
  t.cfg = kernel::config_from_json(j.at("config"), true);
  if (j.at("config_hash").get<std::string>() != kernel::config_hash(t.cfg))
    throw std::invalid_argument("spectral trace config hash does not match its configuration");
  const auto& p = j.at("params");
  t.params.n_nodes = p.at("n_nodes").get<int>();
  t.params.truncation_factor = p.at("truncation_factor").get<double>();
  t.params.offset_factor = p.at("offset_factor").get<double>();
  t.params.fine_factor = p.at("fine_factor").get<double>();
  t.params.panel_order = p.at("panel_order").get<int>();
  t.forcing_scale = j.at("forcing_scale").get<double>();
  t.iterations = j.at("iterations").get<int>();
  t.residual = j.at("residual").get<double>();
  t.converged = j.at("converged").get<bool>();
  t.history = j.at("history").get<std::vector<double>>();
  t.contour = contours::contour_from_json(j.at("contour"));
  t.traceA = cvec_from(j.at("traceA"));
  t.traceB = cvec_from(j.at("traceB"));
  if (t.traceA.size() != t.contour.nodes.size() || t.traceB.size() != t.contour.nodes.size())
    throw std::invalid_argument("spectral trace sizes do not match the contour");
  t.prepare();
  return t;
}

}  // namespace pwedge::spectral
