#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwedge/contours.hpp"

namespace pwedge::halfplane {

// Two media separated by x2 = 0: k1 above, k2 below, point source at (0, b).
struct InterfaceConfig {
  double k1 = 1.0;
  double k2 = 1.0;
  double b = 0.0;
};

InterfaceConfig make_interface(double k1, double k2, double b);

using Point = std::array<double, 2>;

// H0^(1)(x) for real x > 0: power series below 12, asymptotic expansion above.
cplx hankel0(double x);

// sqrt(k^2 - a^2) with vertical cuts, up from +k and down from -k; the kappa -> 0 limit.
cplx vertical_sqrt(double k, cplx a);

struct QuadOptions {
  double tol = 1e-10;      // on the error estimate, relative to the integral of |f|
  int max_depth = 15;      // adaptive bisections per piece
  double indent = 1e-2;    // detour radius in units of the wavenumber
};

struct QuadResult {
  cplx value;
  double error = 0.0;      // accumulated Gauss-Kronrod estimate
  double l1 = 0.0;
  bool converged = false;
};

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, QuadResult r) : std::runtime_error(what), result(r) {}
  QuadResult result;
};

// The spectral integrals for the reflected field (x2 >= 0) and the transmitted field (x2 <= 0).
QuadResult scattered_integral(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o = {});
QuadResult transmitted_integral(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o = {});
// Same, throwing QuadratureError when the estimate misses the tolerance.
cplx exact_scattered(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o = {});
cplx exact_transmitted(const Point& x, const InterfaceConfig& cfg, const QuadOptions& o = {});

cplx incident(const Point& x, const InterfaceConfig& cfg);

enum class Wave { Reflected, Transmitted };
enum class LateralWave { PhiL1, PhiL2, PsiL1, PsiL2 };
const char* lateral_wave_name(LateralWave w);

// Displayed: leading terms about the origin, with H0 carrying the radial dependence.
// Saddle: leading term about the saddle of the full phase, source height included.
enum class CylForm { Displayed, Saddle };

double polar_angle(const Point& x);

// Throws std::domain_error for a point outside the field's half-plane.
cplx asympt_cylindrical(const Point& x, const InterfaceConfig& cfg, Wave which, CylForm form = CylForm::Displayed);

// Support sector of a lateral wave, empty when the wavenumber ordering switches it off.
struct Sector {
  double lo = 0.0, hi = 0.0;
};
std::optional<Sector> lateral_sector(const InterfaceConfig& cfg, LateralWave w);
// Angles where a lateral wave switches on or off, for the field occupying x.
std::vector<double> transition_angles(const InterfaceConfig& cfg, Wave which);
inline constexpr double exclusion_band = 0.05;
// A message when theta lies within the exclusion band of a transition line.
std::optional<std::string> transition_warning(const Point& x, const InterfaceConfig& cfg);

// Zero outside the support sector.
cplx asympt_lateral(const Point& x, const InterfaceConfig& cfg, LateralWave w);
// 1 - i b sqrt(k2^2 - k1^2): the leading-order effect of the source height on the psi
// lateral waves, which asympt_lateral leaves out.
cplx psi_lateral_height_factor(const InterfaceConfig& cfg);
// The branch-cut integral that the lateral wave approximates, by quadrature along the cut.
QuadResult exact_lateral(const Point& x, const InterfaceConfig& cfg, LateralWave w, const QuadOptions& o = {});

// Cylindrical plus lateral terms of whichever field occupies x.
cplx asympt_total(const Point& x, const InterfaceConfig& cfg, CylForm form = CylForm::Displayed);

struct HeatmapGrid {
  double x1_min = -60, x1_max = 60, x2_min = -60, x2_max = 60;
  int n1 = 100, n2 = 100;  // cell centres
};

struct Heatmap {
  InterfaceConfig cfg;
  HeatmapGrid grid;
  std::vector<double> x1, x2;
  std::vector<cplx> value;  // row-major in x2, x1 fastest
};

Heatmap heatmap(const InterfaceConfig& cfg, const HeatmapGrid& grid, CylForm form = CylForm::Displayed,
                int threads = 0);
void write_heatmap_csv(std::ostream& os, const Heatmap& h);

}  // namespace pwedge::halfplane
