#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pwedge {

using cplx = std::complex<double>;

// Raised whenever a formula is evaluated at (or numerically on) one of its singular sets.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

namespace contours {

// Square root with the cut on the positive real axis: arg z taken in [0, 2pi), so Im >= 0.
cplx branch_sqrt(cplx z);

// A point of the lower cut h_j^-: -branch_sqrt(k^2 - x^2).
cplx cut_point(int j, double x, cplx k);

// Gauss-Legendre rule on [-1, 1], abscissae in ascending order; order 8, 16, 20 or 30.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int order);

enum class Side { Left, Right };

struct ContourNode {
  cplx point;   // displaced off the cut by `offset` towards its side
  cplx weight;  // quadrature weight times dz/dx, oriented
  Side side;
  int cut_index;
  double param;
  // Limit of branch_sqrt(k_j^2 - z^2) on this side of the node's own cut, i.e. +-param.
  cplx own_root() const { return side == Side::Right ? cplx(param, 0.0) : cplx(-param, 0.0); }
};

struct Contour {
  int cut_index = 0;  // 0 for a union of both cuts
  cplx k{};
  double kappa = 0.0;
  std::vector<ContourNode> nodes;
  double truncation = 0.0;
  double offset = 0.0;
  bool tail = false;  // nodes beyond `truncation` from the mapped tail x = T/u
};

struct ContourOptions {
  int panel_order = 16;
  bool mapped_tail = false;
  int tail_panels = 4;
  // Parameters x where the integrand is known to vary on a short scale; panels are graded
  // geometrically towards them down to `min_width`.
  std::vector<double> attractors;
  double min_width = 0.0;  // 0 selects max(kappa, 1e-3|k|)/4
  // Uniform panels of this width on [0, fine_until] when both are positive.
  double fine_width = 0.0;
  double fine_until = 0.0;
};

Contour build_contour(int j, cplx k, double kappa, int n_nodes, double truncation, double offset,
                      const ContourOptions& opt = {});

// Concatenation of P_1 and P_2 (cut_index of the result is 0).
Contour join(const Contour& a, const Contour& b);

using NodeFunction = std::function<cplx(const ContourNode&)>;

cplx integrate_contour(const NodeFunction& f, const Contour& c);

nlohmann::json to_json(const Contour& c);
Contour contour_from_json(const nlohmann::json& j);

}  // namespace contours
}  // namespace pwedge
