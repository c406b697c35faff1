#pragma once

#include <string>
#include <vector>

#include "pwedge/contours.hpp"
#include "pwedge/kernel.hpp"

namespace pwedge::spectral {

struct ContourParams {
  int n_nodes = 128;               // base nodes per side and cut, before refinement
  double truncation_factor = 40.0; // T = factor * max|k|
  double offset_factor = 1e-6;     // side offset = factor * max|k|
  double fine_factor = 0.5;        // panel width near the real axis = factor * kappa
  int panel_order = 16;
};

struct SolveOptions {
  double damping = 1.0;
  int threads = 0;  // 0: hardware concurrency
  double forcing_scale = 1.0;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralTrace {
  static constexpr int schema_version = 1;
  WedgeConfig cfg;
  ContourParams params;
  contours::Contour contour;  // P1 then P2
  std::vector<cplx> traceA;   // z -> Psi++(z, sqrt(k1^2 - z^2))
  std::vector<cplx> traceB;   // z -> Psi++(sqrt(k1^2 - z^2), z)
  int iterations = 0;
  double residual = 0.0;      // relative sup-norm change of the last sweep
  std::vector<double> history;
  bool converged = false;
  double forcing_scale = 1.0;

  // Per-node on-cut points and their side limits of sqrt(k_j^2 - z^2); filled by prepare().
  std::vector<cplx> z, r1, r2;
  // One entry per Gauss panel: its first node, whether it lies on the mapped tail, and the
  // affine variable (x, or T/x on the tail) as mid + half * node abscissa.
  struct Panel {
    std::size_t start = 0;
    bool tail = false;
    double mid = 0.0, half = 0.0;
  };
  std::vector<Panel> panels;
  void prepare();
};

// Builds the union contour P1 u P2 used by the solver.
contours::Contour solver_contour(const WedgeConfig& cfg, const ContourParams& p);

// Throws NonConvergence (carrying the history in its message) unless `allow_unconverged`.
SpectralTrace solve_traces(const WedgeConfig& cfg, const ContourParams& p, double tol, int max_iter,
                           const SolveOptions& opt = {}, bool allow_unconverged = false);

// One fixed-point sweep applied to a copy; returns the relative sup change.
double sweep_change(const SpectralTrace& t);

enum class Region { PsiCont, PsiCont2, Overlap, Invalid };
const char* region_name(Region r);
Region classify(const cvec2& a, const WedgeConfig& cfg);

enum class Formula { Cont1, Cont2 };

// Psi++ from one continuation formula evaluated as written, without a validity check.
cplx psi_formula(const cvec2& a, Formula f, const SpectralTrace& t);
// The bracket of a formula, i.e. K_{o+} Psi++ (Cont1) or K_{+o} Psi++ (Cont2).
cplx bracket_formula(const cvec2& a, Formula f, const SpectralTrace& t);

struct PsiValue {
  cplx value;
  Region region;
  double disagreement = 0.0;  // |Cont1 - Cont2| in the overlap
};

PsiValue eval_psi_detail(const cvec2& a, const SpectralTrace& t);
cplx eval_psi_pp(const cvec2& a, const SpectralTrace& t);
// Psi++ from one formula on the tensor grid a1 x a2, row-major in a1, no validity check.
std::vector<cplx> psi_grid(const std::vector<cplx>& a1, const std::vector<cplx>& a2, Formula f,
                           const SpectralTrace& t, int threads = 0);
// Phi = K Psi++ = -Phi34 - P++, computed as K_{-o} x bracket (or K_{o-} x bracket), finite on the circles.
cplx eval_phi(const cvec2& a, const SpectralTrace& t);
// Phi with a chosen formula and no validity check.
cplx phi_formula(const cvec2& a, Formula f, const SpectralTrace& t);
cplx eval_phi34(const cvec2& a, const SpectralTrace& t);

// Branch-point limits behind the lateral diffraction coefficients.
enum class Lateral { PsiL1, PsiL2, PhiL1, PhiL2 };
const char* lateral_name(Lateral l);
// The branch point approached by the free variable: -k1 for the psi pair, -k2 for the phi pair.
cplx lateral_branch_point(Lateral l, const WedgeConfig& cfg);
// Whether the pair is active: psi pair iff Re k2 > Re k1, phi pair iff Re k1 > Re k2.
bool lateral_active(Lateral l, const WedgeConfig& cfg);

// K_{o+}(a1, s) Psi++(a1, s) with s = sqrt(k1^2 - a1^2), for a1 near -k1.
cplx residue_corrected_traceA(cplx alpha1, const SpectralTrace& t);
// The regular combination whose limit defines L for the given wave, at free variable w:
//   PsiL2: K_{o+} Psi++ at (w, sqrt(k1^2 - w^2))      PsiL1: K_{+o} Psi++ at (sqrt(k1^2 - w^2), w)
//   PhiL2: Phi / K_{o-} at (w, -sqrt(k2^2 - w^2))     PhiL1: Phi / K_{-o} at (-sqrt(k2^2 - w^2), w)
cplx lateral_sample(Lateral l, cplx w, const SpectralTrace& t);

struct LimitOptions {
  double delta0 = 1e-2;  // first step from the branch point
  double ratio = 0.1;    // geometric ladder factor
  int depth = 3;         // number of ladder terms
};

struct LimitEstimate {
  cplx value;            // extrapolation using the whole ladder
  cplx previous;         // extrapolation using one term fewer (the smallest steps)
  double stability = 0;  // |value - previous| / |value|
  std::vector<double> deltas;
  std::vector<cplx> samples;
};

// Richardson extrapolation in powers of sqrt(delta) along w = branch + delta.
LimitEstimate lateral_limit(Lateral l, const SpectralTrace& t, const LimitOptions& o = {});

struct AdditiveReport {
  std::vector<double> deltas;
  std::vector<double> residual;  // sup |-Phi - U1 - U2| on the torus of radius delta around (-k1, a2)
  std::vector<double> phi_sup;   // sup |Phi| on the same points
  bool bounded = false;
};

AdditiveReport additive_crossing_diagnostic(const SpectralTrace& t,
                                            const std::vector<double>& deltas = {1e-1, 1e-2, 1e-3},
                                            int n_angles = 12);

struct SupportOptions {
  double shift_factor = 0.35;  // integration surface (R - i eta)^2, eta = factor * kappa
  double sigma = 0.1;          // spatial width of the Gaussian window, in units of 1/Re k1
  double fine_width = 1.5;     // panel width near the wavenumber circles, in units of kappa
  int panel_order = 16;
  int threads = 0;
};

struct SupportReport {
  std::vector<double> x1, x2;
  std::vector<cplx> psi;        // row-major in x1, window sigma
  double max_inside = 0, max_outside = 0, ratio = 0;
  double margin = 0;            // points closer than this to the quadrant edges are not counted
  std::vector<double> interface_s;
  std::vector<cplx> interface_psi, interface_phi;  // limits from both sides at (s,0) and (0,s)
  double interface_error = 0;   // max |psi - phi| / max |psi| over the interface samples
  std::size_t nodes_per_axis = 0;
};

// psi on the grid x1 x x2 by windowed quadrature of Psi++ over a shifted real surface, and
// the one-sided limits of psi and phi_sc + phi_in on the quadrant edges.
SupportReport verify_support(const SpectralTrace& t, const std::vector<double>& x1, const std::vector<double>& x2,
                             const SupportOptions& o = {});

nlohmann::json to_json(const SpectralTrace& t);
SpectralTrace trace_from_json(const nlohmann::json& j);

}  // namespace pwedge::spectral
