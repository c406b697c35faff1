#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwedge/contours.hpp"

namespace pwedge::locality {

using Vec2 = std::array<double, 2>;
using CVec2 = std::array<cplx, 2>;
using Holomorphic = std::function<cplx(const CVec2&)>;

// Side of the real trace the arrow points to; Right means towards increasing Re a1
// (towards increasing Re a2 where dg/da1 = 0).
enum class Arrow { Left, Right };

struct SingularityDescriptor {
  Holomorphic g;       // defining function, real on R^2
  double m = 1.0;      // F ~ A g^-m
  Arrow arrow = Arrow::Right;
};

// (dg/da1, dg/da2) at a real point, by central differences.
Vec2 gradient(const Holomorphic& g, const Vec2& at);
// sign(n . eta) for the descriptor's arrow at a point of its trace.
int sign_factor(const SingularityDescriptor& d, const Vec2& at);

struct CrossingSpec {
  int s1 = 1, s2 = 1;
  double delta = 1.0;  // a1 b2 - a2 b1 > 0
  cplx A = 1.0;
  double m1 = 1.0, m2 = 1.0;
  Vec2 alpha{0.0, 0.0};
  Vec2 grad1{1.0, 0.0}, grad2{0.0, 1.0};
};

struct SosSpec {
  int s = 1;
  double xi = 0.0;
  cplx A = 1.0;
  double m = 1.0;
  Vec2 alpha{0.0, 0.0};
  Vec2 grad{1.0, 0.0};
};

// Orders the pair so that delta > 0 and reads the sign factors off the arrows.
CrossingSpec make_crossing(const SingularityDescriptor& d1, const SingularityDescriptor& d2, const Vec2& alpha, cplx A);
SosSpec make_sos(const SingularityDescriptor& d, const Vec2& alpha, cplx A);

struct Estimate {
  cplx value = 0.0;
  bool vanishes = false;  // an order is a non-positive integer, so the point does not contribute
};

// Throws std::domain_error on a Heaviside boundary line.
Estimate estimate_crossing(const CrossingSpec& c, const Vec2& x);
// Throws std::domain_error when s xi = 0.
Estimate estimate_sos(const SosSpec& c, const Vec2& x);

struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// xi in g = Lambda - xi zeta^2 + ..., from quadratic fits along the tangent on three
// shrinking stencils and Richardson extrapolation.
double compute_xi(const Holomorphic& g, const Vec2& alpha);

// Direction of the imaginary shift of the integration surface consistent with the arrows.
Vec2 arrow_vector(const std::vector<SingularityDescriptor>& ds, const Vec2& alpha);

struct LocalOptions {
  double radius = 0.5;         // half-width of the square patch around alpha*
  double flat = 0.5;           // fraction of the radius where the window is 1
  double shift = 1.0;          // surface R^2 + i eps nu with eps = shift / |x|
  double check_radius = 0.75;  // second window, as a fraction of radius, for the taper check
  double taper_tol = 1e-2;
  int panel_order = 16;
  int threads = 0;
};

struct LocalResult {
  cplx value = 0.0;
  double taper_change = 0.0;  // relative change when the window shrinks to check_radius
  bool taper_ok = false;
  std::size_t nodes = 0;
};

// (1/4pi^2) times the windowed integral of F e^{-i x.alpha} over the patch shifted by i eps nu.
LocalResult brute_force_local(const Holomorphic& F, const Vec2& alpha, const Vec2& x, const Vec2& nu,
                              const LocalOptions& o = {});

struct ModelCase {
  std::string name;
  bool sos = false;
  Holomorphic F;
  std::vector<SingularityDescriptor> sing;
  cplx A = 1.0;
  Vec2 alpha{0.0, 0.0};
  Vec2 direction{1.0, 0.0};  // observation direction
  double scale = 1.0;        // |x| = scaled radius / scale
};

// Crossings and saddles on singularities with orders 1/2, 1 and 3/2.
std::vector<ModelCase> model_library();
// The separable double pole 1 / ((a1 - a1*)(a2 - a2*)) with both arrows to the right.
ModelCase separable_double_pole(const Vec2& alpha);

struct ModelComparison {
  cplx estimate, oracle;
  double rel_error = 0.0;
  LocalResult local;
};

ModelComparison compare_model(const ModelCase& c, double scaled_radius, const LocalOptions& o = {});

}  // namespace pwedge::locality
