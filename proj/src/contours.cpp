#include "pwedge/contours.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace pwedge::contours {

cplx branch_sqrt(cplx z) {
  if (!finite(z)) throw NonFiniteError("branch_sqrt: non-finite argument");
  // std::sqrt has its cut on the negative axis and Re >= 0; rotate to put the cut on (0, inf).
  double arg = std::atan2(z.imag(), z.real());
  if (arg < 0.0) arg += 2.0 * std::numbers::pi;
  return std::polar(std::sqrt(std::abs(z)), 0.5 * arg);
}

cplx cut_point(int j, double x, cplx k) {
  if (j != 1 && j != 2) throw std::invalid_argument("cut_point: j must be 1 or 2");
  return -branch_sqrt((k - x) * (k + x));
}

namespace {

template <int N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule r;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  std::vector<std::pair<double, double>> xw;
  for (std::size_t i = 0; i < a.size(); ++i) {
    xw.emplace_back(a[i], w[i]);
    if (a[i] != 0.0) xw.emplace_back(-a[i], w[i]);
  }
  std::sort(xw.begin(), xw.end());
  for (auto [x, wt] : xw) {
    r.x.push_back(x);
    r.w.push_back(wt);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  static const GaussRule r8 = make_rule<8>(), r16 = make_rule<16>(), r20 = make_rule<20>(), r30 = make_rule<30>();
  switch (order) {
    case 8: return r8;
    case 16: return r16;
    case 20: return r20;
    case 30: return r30;
    default: throw std::invalid_argument("panel_order must be one of 8, 16, 20, 30");
  }
}

namespace {

// dc/dx for c(x) = -sqrt(k^2 - x^2).
cplx cut_derivative(double x, cplx k) {
  cplx c = -branch_sqrt((k - x) * (k + x));
  return -x / c;
}

std::vector<double> breakpoints(double T, int n_panels, const std::vector<double>& attractors, double hmin,
                                double fine_width, double fine_until) {
  std::vector<double> b;
  if (fine_width > 0.0)
    for (double x = fine_width; x < std::min(fine_until, T); x += fine_width) b.push_back(x);
  for (int i = 0; i <= n_panels; ++i) {
    double t = double(i) / n_panels;
    b.push_back(T * t * t);
  }
  for (double xa : attractors) {
    if (!(xa >= 0.0) || xa > T) continue;
    b.push_back(xa);
    for (double h = hmin; h < 0.5 * T; h *= 2.0) {
      if (xa - h > 0.0) b.push_back(xa - h);
      if (xa + h < T) b.push_back(xa + h);
    }
  }
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double v : b) {
    if (out.empty() || v - out.back() > 1e-3 * hmin) out.push_back(v);
  }
  if (out.back() < T) out.back() = T;
  return out;
}

}  // namespace

Contour build_contour(int j, cplx k, double kappa, int n_nodes, double truncation, double offset,
                      const ContourOptions& opt) {
  if (j != 1 && j != 2) throw std::invalid_argument("build_contour: j must be 1 or 2");
  if (n_nodes < 8) throw std::invalid_argument("build_contour: n_nodes must be >= 8");
  if (!(truncation > std::abs(k))) throw std::invalid_argument("build_contour: truncation must exceed |k|");
  if (!(offset > 0.0)) throw std::invalid_argument("build_contour: offset must be positive");
  if (!(k.real() > 0.0) || k.imag() < 0.0) throw std::invalid_argument("build_contour: need Re k > 0, Im k >= 0");

  const GaussRule& r = gauss_rule(opt.panel_order);
  const int n_panels = std::max(1, n_nodes / opt.panel_order);
  double hmin = opt.min_width > 0.0 ? opt.min_width : std::max(kappa, 1e-3 * std::abs(k)) / 4.0;
  // kappa = 0 leaves a square-root corner at x = Re k; panels ending there are mapped quadratically
  const double corner = kappa > 0.0 ? -1.0 : k.real();
  std::vector<double> att = opt.attractors;
  att.push_back(k.real());
  auto b = breakpoints(truncation, n_panels, att, hmin, opt.fine_width, opt.fine_until);

  // Parameter samples along x in [0, inf) with their dx weights.
  std::vector<std::pair<double, double>> xs;
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    double a = b[p], c = b[p + 1], h = 0.5 * (c - a), m = 0.5 * (c + a);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      double t = 0.5 * (r.x[i] + 1.0), wt = 0.5 * r.w[i];
      if (c == corner)
        xs.emplace_back(c - (c - a) * t * t, 2.0 * (c - a) * t * wt);
      else if (a == corner)
        xs.emplace_back(a + (c - a) * t * t, 2.0 * (c - a) * t * wt);
      else
        xs.emplace_back(m + h * r.x[i], h * r.w[i]);
    }
  }
  if (opt.mapped_tail) {
    // x = T/u on u in (0, 1], dx = T/u^2 du
    for (int p = 0; p < opt.tail_panels; ++p) {
      double a = double(p) / opt.tail_panels, c = double(p + 1) / opt.tail_panels;
      double h = 0.5 * (c - a), m = 0.5 * (c + a);
      for (std::size_t i = 0; i < r.x.size(); ++i) {
        double u = m + h * r.x[i];
        xs.emplace_back(truncation / u, h * r.w[i] * truncation / (u * u));
      }
    }
  }
  std::sort(xs.begin(), xs.end());

  Contour out;
  out.cut_index = j;
  out.k = k;
  out.kappa = kappa;
  out.truncation = truncation;
  out.offset = offset;
  out.tail = opt.mapped_tail;
  out.nodes.reserve(2 * xs.size());
  auto make = [&](double x, double wx, Side s) {
    cplx c = cut_point(j, x, k);
    cplx dc = cut_derivative(x, k);
    cplx unit = dc / std::abs(dc);
    cplx normal = s == Side::Left ? cplx(0, -1) * unit : cplx(0, 1) * unit;
    double orient = s == Side::Left ? -1.0 : 1.0;
    return ContourNode{c + offset * normal, orient * wx * dc, s, j, x};
  };
  // Up the left side from -i inf to -k_j, then back down the right side.
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) out.nodes.push_back(make(it->first, it->second, Side::Left));
  for (const auto& [x, wx] : xs) out.nodes.push_back(make(x, wx, Side::Right));
  return out;
}

Contour join(const Contour& a, const Contour& b) {
  Contour out = a;
  out.cut_index = 0;
  out.nodes.insert(out.nodes.end(), b.nodes.begin(), b.nodes.end());
  return out;
}

cplx integrate_contour(const NodeFunction& f, const Contour& c) {
  cplx sum = 0.0;
  for (const auto& n : c.nodes) {
    cplx v = f(n);
    if (!finite(v)) throw NonFiniteError("integrate_contour: non-finite integrand at node param " + std::to_string(n.param));
    sum += n.weight * v;
  }
  return sum;
}

nlohmann::json to_json(const Contour& c) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : c.nodes) {
    nodes.push_back({{"re", n.point.real()},
                     {"im", n.point.imag()},
                     {"w_re", n.weight.real()},
                     {"w_im", n.weight.imag()},
                     {"side", n.side == Side::Left ? "L" : "R"},
                     {"cut", n.cut_index},
                     {"param", n.param}});
  }
  return {{"cut_index", c.cut_index},
          {"k", {c.k.real(), c.k.imag()}},
          {"kappa", c.kappa},
          {"truncation", c.truncation},
          {"offset", c.offset},
          {"tail", c.tail},
          {"nodes", nodes}};
}

Contour contour_from_json(const nlohmann::json& j) {
  Contour c;
  c.cut_index = j.at("cut_index").get<int>();
  c.k = {j.at("k").at(0).get<double>(), j.at("k").at(1).get<double>()};
  c.kappa = j.at("kappa").get<double>();
  c.truncation = j.at("truncation").get<double>();
  c.offset = j.at("offset").get<double>();
  c.tail = j.value("tail", false);
  for (const auto& n : j.at("nodes")) {
    ContourNode node;
    node.point = {n.at("re").get<double>(), n.at("im").get<double>()};
    node.weight = {n.at("w_re").get<double>(), n.at("w_im").get<double>()};
    node.side = n.at("side").get<std::string>() == "L" ? Side::Left : Side::Right;
    node.cut_index = n.value("cut", c.cut_index);
    node.param = n.at("param").get<double>();
    c.nodes.push_back(node);
  }
  return c;
}

}  // namespace pwedge::contours
