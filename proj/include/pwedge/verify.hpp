#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwedge/halfplane.hpp"
#include "pwedge/spectral.hpp"

namespace pwedge::verify {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;  // not applicable to this configuration
  std::string detail;
};

struct Report {
  std::string subject;
  std::vector<Check> checks;
  bool pass() const;
  const Check* find(const std::string& name) const;
};

nlohmann::json to_json(const Report& r);

// value <= tolerance passes.
Check at_most(std::string name, double value, double tolerance, std::string detail = {});
// |value - target| <= tolerance passes; value holds the measurement.
Check near(std::string name, double value, double target, double tolerance, std::string detail = {});

struct HalfplaneOptions {
  double k1r_cylindrical = 300.0;
  double k1r_lateral = 800.0;
  double lateral_theta = 0.5235987755982988;  // pi / 6
};

// Cylindrical terms against quadrature on rays clear of the lateral sectors, a lateral wave
// against its branch-cut integral, decay slopes, and the lateral sector boundary.
Report halfplane_report(const halfplane::InterfaceConfig& cfg, const HalfplaneOptions& o = {});

struct WedgeOptions {
  int random_points = 1000;
  std::uint32_t seed = 7;
  double fixed_point_tol = 1e-8;
  double wiener_hopf_tol = 1e-7;
  bool support = true;
  double support_half_width = 3.0;  // grid [-w, w]^2 in units of 1/Re k1
  double support_step = 0.25;
  bool locality = true;
  int threads = 0;
};

// Fixed-point and Wiener-Hopf residuals, agreement of the two continuation formulas, quadrant
// support and interface continuity, the additive crossing, lateral limit stability and the
// locality estimators.
Report wedge_report(const spectral::SpectralTrace& t, const WedgeOptions& o = {});

// Log-log least-squares slope of |f(r)| over n geometrically spaced radii.
template <class F>
double log_slope(F&& f, double r0, double r1, int n) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double r = r0 * std::pow(r1 / r0, double(i) / (n - 1));
    const double x = std::log(r), y = std::log(std::abs(f(r)));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace pwedge::verify
