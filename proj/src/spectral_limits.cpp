#include <cmath>
#include <stdexcept>

#include "pwedge/spectral.hpp"

namespace pwedge::spectral {

using contours::branch_sqrt;

const char* lateral_name(Lateral l) {
  switch (l) {
    case Lateral::PsiL1: return "psi_L1";
    case Lateral::PsiL2: return "psi_L2";
    case Lateral::PhiL1: return "phi_L1";
    case Lateral::PhiL2: return "phi_L2";
  }
  return "?";
}

namespace {

bool psi_pair(Lateral l) { return l == Lateral::PsiL1 || l == Lateral::PsiL2; }

}  // namespace

cplx lateral_branch_point(Lateral l, const WedgeConfig& cfg) { return psi_pair(l) ? -cfg.k1 : -cfg.k2; }

bool lateral_active(Lateral l, const WedgeConfig& cfg) {
  if (cfg.transparent()) return false;
  return psi_pair(l) ? cfg.k2.real() > cfg.k1.real() : cfg.k1.real() > cfg.k2.real();
}

cplx lateral_sample(Lateral l, cplx w, const SpectralTrace& t) {
  const WedgeConfig& c = t.cfg;
  if (c.transparent())
    throw std::domain_error(std::string(lateral_name(l)) + ": k1 = k2, the lateral waves vanish identically");
  if (!lateral_active(l, c))
    throw std::domain_error(std::string(lateral_name(l)) + ": inactive for this wavenumber ordering");
  const cplx b = lateral_branch_point(l, c);
  if (std::abs(w - b) > 0.25 * std::abs(b))
    throw std::domain_error(std::string(lateral_name(l)) + ": sample point too far from the branch point");
  switch (l) {
    case Lateral::PsiL2: return bracket_formula({w, branch_sqrt(c.k1 * c.k1 - w * w)}, Formula::Cont1, t);
    case Lateral::PsiL1: return bracket_formula({branch_sqrt(c.k1 * c.k1 - w * w), w}, Formula::Cont2, t);
    // Phi = K_{o-} x bracket of Cont1 (and K_{-o} x bracket of Cont2), so the quotient is the bracket.
    case Lateral::PhiL2: return bracket_formula({w, -branch_sqrt(c.k2 * c.k2 - w * w)}, Formula::Cont1, t);
    case Lateral::PhiL1: return bracket_formula({-branch_sqrt(c.k2 * c.k2 - w * w), w}, Formula::Cont2, t);
  }
  throw std::logic_error("lateral_sample");
}

cplx residue_corrected_traceA(cplx alpha1, const SpectralTrace& t) {
  return lateral_sample(Lateral::PsiL2, alpha1, t);
}

LimitEstimate lateral_limit(Lateral l, const SpectralTrace& t, const LimitOptions& o) {
  if (o.depth < 2) throw std::invalid_argument("lateral_limit: depth must be at least 2");
  if (!(o.ratio > 0.0 && o.ratio < 1.0) || !(o.delta0 > 0.0))
    throw std::invalid_argument("lateral_limit: need delta0 > 0 and 0 < ratio < 1");
  LimitEstimate e;
  const cplx b = lateral_branch_point(l, t.cfg);
  const double scale = std::abs(b);
  for (int j = 0; j < o.depth; ++j) {
    double d = o.delta0 * std::pow(o.ratio, j);
    e.deltas.push_back(d);
    e.samples.push_back(lateral_sample(l, b + d * scale, t));
  }
  // The samples expand in powers of sqrt(delta); eliminate one power per level.
  const double q = std::sqrt(o.ratio);
  std::vector<cplx> row = e.samples;
  std::vector<cplx> last_pair;
  for (int m = 1; m < o.depth; ++m) {
    const double qm = std::pow(q, m);
    for (std::size_t j = 0; j + m < e.samples.size(); ++j) row[j] = (row[j + 1] - qm * row[j]) / (1.0 - qm);
    if (m == o.depth - 2) e.previous = row[1];
  }
  e.value = row[0];
  if (o.depth == 2) e.previous = e.samples.back();
  e.stability = std::abs(e.value) > 0.0 ? std::abs(e.value - e.previous) / std::abs(e.value) : 0.0;
  return e;
}

namespace {

// Rough distance from a to the lower cut of sqrt(k^2 - a^2).
double lower_cut_distance(cplx a, cplx k) {
  if (a.imag() > 0.0) return std::abs(a.imag()) + std::abs(k.imag());
  cplx w = k * k - a * a;
  if (w.real() >= 0.0 && std::abs(a) > 0.0) return std::min(std::abs(w.imag()) / (2.0 * std::abs(a)), std::abs(a + k));
  return std::abs(a + k);
}

}  // namespace

AdditiveReport additive_crossing_diagnostic(const SpectralTrace& t, const std::vector<double>& deltas, int n_angles) {
  const WedgeConfig& c = t.cfg;
  const double pi = std::acos(-1.0);
  auto kmo = [&](cplx x1, cplx x2) { return kernel::factor_K(kernel::Factor::MinusCirc, {x1, x2}, c); };
  const cplx pref = kmo(-c.k1, c.a2) / (kmo(c.a1, c.a2) * (-c.k1 - c.a1));
  AdditiveReport r;
  r.deltas = deltas;
  for (double d : deltas) {
    double res = 0.0, sup = 0.0;
    const double dd = d * std::abs(c.k1);
    for (int i = 0; i < n_angles; ++i) {
      // Lower half of the alpha1 circle, where the first formula applies.
      cplx a1 = -c.k1 + dd * std::polar(1.0, pi * (1.1 + 0.7 * (i + 0.5) / n_angles));
      for (int j = 0; j < 2 * n_angles; ++j) {
        cplx a2 = c.a2 + dd * std::polar(1.0, pi * (j + 0.25) / n_angles);
        bool near_cut = false;
        for (cplx k : {c.k1, c.k2})
          near_cut = near_cut || lower_cut_distance(a1, k) < 0.25 * dd || lower_cut_distance(a2, k) < 0.25 * dd;
        if (near_cut) continue;
        cplx phi = eval_phi({a1, a2}, t);
        cplx u1 = pref / (a2 - c.a2);
        cplx u2 = pref * branch_sqrt(c.k1 * c.k1 - a1 * a1) / (-c.a2 * c.a2);
        res = std::max(res, std::abs(-phi - t.forcing_scale * (u1 + u2)));
        sup = std::max(sup, std::abs(phi));
      }
    }
    r.residual.push_back(res);
    r.phi_sup.push_back(sup);
  }
  double first = r.residual.empty() ? 0.0 : r.residual.front();
  r.bounded = true;
  for (double v : r.residual) r.bounded = r.bounded && v <= 10.0 * first + 1e-12;
  return r;
}

}  // namespace pwedge::spectral
