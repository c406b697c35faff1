#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwedge/spectral.hpp"

namespace pwedge::farfield {

using Point = std::array<double, 2>;

// Interior: the wedge x1 > 0, x2 > 0 where psi lives. Exterior: the rest, where phi lives.
enum class Region { Interior, Exterior };
Region region_of(const Point& x);

struct HalfPlane {
  double c1 = 0.0, c2 = 0.0;  // c . x > 0
};

struct Support {
  Region region = Region::Interior;
  std::vector<HalfPlane> halfplanes;
  bool contains(const Point& x) const;
  // Directions where the support switches on or off, faces of the wedge excluded.
  std::vector<double> edges() const;
};

enum class Kind { Incident, GOTransmitted, GOReflected, GOShadow, Cylindrical, Lateral };
const char* kind_name(Kind k);

struct WaveComponent {
  std::string id;  // psi_T1, phi_R2, psi_C, phi_L1, ...
  Kind kind = Kind::Incident;
  cplx amplitude;
  cvec2 phase_vector{};   // the field goes like exp(-i x . phase_vector)
  double decay_order = 0.0;
  Support support;
  cplx radial_k;          // cylindrical: amplitude / sqrt(radial_k r)
  cvec2 front{};          // lateral: amplitude / |front . x|^{3/2}
  double validity_margin(const Point& x) const;  // angle to the nearest support edge
};

cplx evaluate(const WaveComponent& w, const Point& x);

// Geometrical optics, scaled by the incident amplitude. Components switched off by total
// internal reflection are left out.
std::vector<WaveComponent> go_simple(const WedgeConfig& cfg, double amplitude = 1.0);
std::vector<WaveComponent> go_complicated(const WedgeConfig& cfg, double amplitude = 1.0);
std::vector<WaveComponent> go_components(const WedgeConfig& cfg, double amplitude = 1.0);

enum class Role { T1, T2, R1, R2, C1, C2, L1, L2, PT, SR, PR, ST, SH };
const char* role_name(Role r);
struct ContributingPoint {
  Role role;
  cvec2 location;
  bool crossing = true;  // false for a saddle on a singularity
};
// The points behind the far field for the direction theta (which places C1 and C2).
std::vector<ContributingPoint> contributing_points(const WedgeConfig& cfg, double theta);

// Displayed: the coefficient and wave exactly as printed, with the spectral function at
// +k(cos theta, sin theta) and exp(-i k r). Outgoing: the saddle -k(cos theta, sin theta) and
// exp(+i k r), with the amplitude the saddle estimate gives, 4 k^2 times the displayed one.
enum class CylConvention { Displayed, Outgoing };
const char* convention_name(CylConvention c);
std::optional<CylConvention> parse_convention(const std::string& s);

// Displayed: D as printed. Crossing: D divided by 2 sqrt(2), the value the crossing estimate
// gives for the displayed local amplitude.
enum class LateralNorm { Displayed, Crossing };
const char* lateral_norm_name(LateralNorm n);

inline constexpr double default_margin = 0.05;

struct FarFieldOptions {
  CylConvention convention = CylConvention::Outgoing;
  LateralNorm lateral_norm = LateralNorm::Crossing;
  double margin = default_margin;
  spectral::LimitOptions limits;
};

// Directions where some GO component switches on or off, in [0, 2 pi).
std::vector<double> go_discontinuities(const WedgeConfig& cfg);

struct CylindricalRow {
  double theta = 0.0;
  std::string id;         // psi_C inside the wedge, phi_C outside
  cplx D;
  cvec2 saddle{};         // where the spectral function was evaluated
  bool in_band = false;   // within the margin of a GO discontinuity
};

cplx cylindrical_coefficient(const spectral::SpectralTrace& t, double theta, CylConvention c);
std::vector<CylindricalRow> cylindrical_coefficients(const spectral::SpectralTrace& t, const std::vector<double>& thetas,
                                                     const FarFieldOptions& o = {});
WaveComponent cylindrical_component(const spectral::SpectralTrace& t, double theta, const FarFieldOptions& o = {});

struct LateralRow {
  std::string id;  // psi_L1, psi_L2, phi_L1, phi_L2
  spectral::Lateral which;
  spectral::LimitEstimate L;
  cplx D;          // as displayed
};

struct LateralTable {
  std::vector<LateralRow> rows;  // empty when the ordering switches both pairs off
  std::string note;
};

enum class LateralPair { Active, Psi, Phi };
// Active picks the pair the wavenumber ordering switches on. Asking for the other pair gives
// an empty table and a note.
LateralTable lateral_coefficients(const spectral::SpectralTrace& t, const FarFieldOptions& o = {},
                                  LateralPair pair = LateralPair::Active);
// D from the limit L, as displayed.
cplx lateral_D(spectral::Lateral which, cplx L, const WedgeConfig& cfg);
// Only the active pair's rows are used; a table for the other pair gives no components.
std::vector<WaveComponent> lateral_components(const LateralTable& table, const WedgeConfig& cfg,
                                              LateralNorm n = LateralNorm::Crossing);

struct MarginError : std::domain_error {
  MarginError(const std::string& what, std::string line, double angle, double distance)
      : std::domain_error(what), line(std::move(line)), angle(angle), distance(distance) {}
  std::string line;  // id of the component whose edge is closest
  double angle, distance;
};

struct FarField {
  cplx total;
  Region region = Region::Interior;
  std::vector<std::pair<std::string, cplx>> breakdown;
  double margin = 0.0;      // angular distance to the nearest discontinuity line
  std::string nearest;
};

// Everything that does not depend on the observation direction.
struct FarFieldModel {
  WedgeConfig cfg;
  std::vector<WaveComponent> go, lateral;
  LateralTable lateral_table;
  FarFieldOptions options;
};
FarFieldModel build_model(const spectral::SpectralTrace& t, const FarFieldOptions& o = {});

// phi_in + phi_sc outside the wedge, psi inside. Throws MarginError within the margin of a
// discontinuity line.
FarField total_far_field(double r, double theta, const spectral::SpectralTrace& t, const FarFieldModel& m);
FarField total_far_field(double r, double theta, const spectral::SpectralTrace& t, const FarFieldOptions& o = {});

// Rays in (0, pi/2) free of GO and lateral discontinuities: the midpoint of every gap between
// consecutive lines that is wider than 2 band and outside all lateral supports.
std::vector<double> clean_rays(const WedgeConfig& cfg, double band);

// Field comparison with a damped trace. psi from verify_support minus its GO part is sampled on
// rays and fitted, ray by ray, with one complex amplitude times the cylindrical wave of each
// convention (exp(-i k r) or exp(+i k r), over sqrt(k r)).
struct RayFit {
  double theta = 0.0;
  std::vector<cplx> residual;          // smoothed psi minus smoothed GO, one per radius
  cplx fitted[2];                       // [Displayed, Outgoing]
  cplx predicted[2];                    // D of each convention, NaN where it cannot be evaluated
  double shape_error[2] = {0.0, 0.0};  // relative l2 misfit of the best single-amplitude fit
};

struct ConventionCheck {
  std::vector<double> radii;
  std::vector<RayFit> rays;
  double error_displayed = 0.0, error_outgoing = 0.0;  // rms of the shape errors over the rays
  double amplitude_error = 0.0;  // max |fitted / predicted - 1| of the chosen convention
  CylConvention chosen = CylConvention::Outgoing;
  double error(CylConvention c) const { return c == CylConvention::Displayed ? error_displayed : error_outgoing; }
};
// Empty rays selects clean_rays(cfg, band).
ConventionCheck check_convention(const spectral::SpectralTrace& t, const std::vector<double>& radii,
                                 std::vector<double> rays = {}, double band = 0.15,
                                 const spectral::SupportOptions& so = {});

void write_coefficients_csv(std::ostream& os, const WedgeConfig& cfg, const std::vector<CylindricalRow>& cyl,
                            const LateralTable& lat, const std::string& header);

}  // namespace pwedge::farfield
