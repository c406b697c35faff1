#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "parallel.hpp"
#include "pwedge/spectral.hpp"

namespace pwedge::spectral {

namespace {

struct Axis {
  std::vector<double> a, w;
};

template <int N>
void add_panels(const std::vector<double>& bp, Axis& ax) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& wt = rule::weights();
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    const double c = 0.5 * (bp[p] + bp[p + 1]), h = 0.5 * (bp[p + 1] - bp[p]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i], wi = wt[i];
      ax.a.push_back(c + h * xi);
      ax.w.push_back(h * wi);
      if (xi != 0.0) {
        ax.a.push_back(c - h * xi);
        ax.w.push_back(h * wi);
      }
    }
  }
}

// Real-axis nodes on [-A, A]: fine panels over the wavenumber discs, coarser ones outside.
Axis build_axis(double A, double inner, double fine, double coarse, int order) {
  std::vector<double> bp;
  auto fill = [&](double lo, double hi, double width) {
    int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    for (int i = 0; i < n; ++i) bp.push_back(lo + (hi - lo) * i / n);
  };
  fill(-A, -inner, coarse);
  fill(-inner, inner, fine);
  fill(inner, A, coarse);
  bp.push_back(A);
  Axis ax;
  switch (order) {
    case 8: add_panels<8>(bp, ax); break;
    case 16: add_panels<16>(bp, ax); break;
    case 20: add_panels<20>(bp, ax); break;
    default: throw std::invalid_argument("verify_support: panel_order must be 8, 16 or 20");
  }
  return ax;
}

}  // namespace

SupportReport verify_support(const SpectralTrace& t, const std::vector<double>& x1, const std::vector<double>& x2,
                             const SupportOptions& o) {
  const WedgeConfig& c = t.cfg;
  if (!(c.kappa > 0.0)) throw std::domain_error("verify_support: kappa > 0 is required");
  if (x1.empty() || x2.empty()) throw std::invalid_argument("verify_support: empty grid");
  const double kmax = c.scale();
  auto check_spacing = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
      if (std::abs(x[i + 1] - x[i]) > std::numbers::pi / kmax)
        throw std::invalid_argument("verify_support: grid spacing exceeds the Nyquist limit pi / max|k|");
  };
  check_spacing(x1);
  check_spacing(x2);

  const double unit = 1.0 / c.k1.real();
  const double sigma = o.sigma * unit;
  SupportReport r;
  r.x1 = x1;
  r.x2 = x2;
  r.margin = 5.0 * sigma;
  for (double s : {2.0, 2.5, 3.0}) r.interface_s.push_back(s * unit);

  double X = 0.0;
  for (double v : x1) X = std::max(X, std::abs(v));
  for (double v : x2) X = std::max(X, std::abs(v));
  X = std::max(X, 3.0 * unit + 3.0 * sigma);

  // The Gaussian window exp(-sigma^2 a^2 / 2) is below e^-18 past 6 / sigma.
  const double A = 6.0 / sigma, inner = 1.5 * kmax;
  const double eta = o.shift_factor * c.kappa;
  Axis ax = build_axis(A, inner, o.fine_width * c.kappa, std::min(2.0 * kmax, 8.0 / X), o.panel_order);
  const std::size_t N = ax.a.size();
  r.nodes_per_axis = N;

  std::vector<cplx> alpha(N);
  for (std::size_t i = 0; i < N; ++i) alpha[i] = cplx(ax.a[i], -eta);
  std::vector<cplx> psi;
  if (c.transparent()) {
    psi.resize(N * N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        psi[i * N + j] = -t.forcing_scale * kernel::forcing_P({alpha[i], alpha[j]}, c);
  } else {
    psi = psi_grid(alpha, alpha, Formula::Cont1, t, o.threads);
  }
  std::vector<cplx> phi34(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      cvec2 a{alpha[i], alpha[j]};
      phi34[i * N + j] = -kernel::kernel_K(a, c) * psi[i * N + j] - t.forcing_scale * kernel::forcing_P(a, c);
    }

  const double pref = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  // Row factors w(a) W(a) exp(-i alpha x), with the shift folded into exp(-eta x).
  auto factors = [&](const std::vector<double>& xs, double sig) {
    std::vector<cplx> e(xs.size() * N);
    for (std::size_t m = 0; m < xs.size(); ++m)
      for (std::size_t i = 0; i < N; ++i)
        e[m * N + i] = ax.w[i] * std::exp(-0.5 * sig * sig * ax.a[i] * ax.a[i]) * std::exp(-cplx(0.0, 1.0) * alpha[i] * xs[m]);
    return e;
  };
  auto transform = [&](const std::vector<cplx>& f, const std::vector<double>& xa, const std::vector<double>& xb,
                       double sig) {
    auto e1 = factors(xa, sig), e2 = factors(xb, sig);
    std::vector<cplx> tmp(N * xb.size()), out(xa.size() * xb.size());
    detail::parallel_for(N, o.threads, [&](std::size_t i) {
      for (std::size_t m = 0; m < xb.size(); ++m) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += f[i * N + j] * e2[m * N + j];
        tmp[i * xb.size() + m] = s;
      }
    });
    for (std::size_t p = 0; p < xa.size(); ++p)
      for (std::size_t m = 0; m < xb.size(); ++m) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += e1[p * N + i] * tmp[i * xb.size() + m];
        out[p * xb.size() + m] = pref * s;
      }
    return out;
  };

  r.psi = transform(psi, x1, x2, sigma);
  for (std::size_t p = 0; p < x1.size(); ++p)
    for (std::size_t m = 0; m < x2.size(); ++m) {
      const double v = std::abs(r.psi[p * x2.size() + m]);
      if (x1[p] > r.margin && x2[m] > r.margin) r.max_inside = std::max(r.max_inside, v);
      if (x1[p] < -r.margin || x2[m] < -r.margin) r.max_outside = std::max(r.max_outside, v);
    }
  r.ratio = r.max_inside > 0.0 ? r.max_outside / r.max_inside : 0.0;

  // On an edge the smoothed field is half the one-sided limit plus terms in sigma and
  // sigma^2; three widths eliminate both.
  const std::vector<double> zero{0.0};
  auto edge_limit = [&](const std::vector<cplx>& f, bool horizontal) {
    std::vector<cplx> lim(r.interface_s.size(), 0.0);
    const double coef[3] = {3.0, -3.0, 1.0};
    for (int m = 1; m <= 3; ++m) {
      auto v = horizontal ? transform(f, r.interface_s, zero, m * sigma) : transform(f, zero, r.interface_s, m * sigma);
      for (std::size_t q = 0; q < lim.size(); ++q) lim[q] += 2.0 * coef[m - 1] * v[q];
    }
    return lim;
  };
  double scale = 0.0, worst = 0.0;
  for (bool horizontal : {true, false}) {
    auto ps = edge_limit(psi, horizontal), ph = edge_limit(phi34, horizontal);
    for (std::size_t q = 0; q < ps.size(); ++q) {
      const double s = r.interface_s[q];
      cplx x_in = horizontal ? c.a1 * s : c.a2 * s;
      ph[q] += t.forcing_scale * std::exp(-cplx(0.0, 1.0) * x_in);
      r.interface_psi.push_back(ps[q]);
      r.interface_phi.push_back(ph[q]);
      scale = std::max(scale, std::abs(ps[q]));
      worst = std::max(worst, std::abs(ps[q] - ph[q]));
    }
  }
  r.interface_error = scale > 0.0 ? worst / scale : worst;
  return r;
}

}  // namespace pwedge::spectral
