#include "pwedge/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace pwedge::kernel {

using contours::branch_sqrt;

namespace {

constexpr double kTiny = 1e-10;

void check_denominator(cplx d, double scale, const char* what) {
  if (!finite(d) || std::abs(d) < kTiny * scale) throw SingularityError(std::string("vanishing denominator: ") + what);
}

}  // namespace

std::vector<std::string> validate(double k1_re, double k2_re, double kappa, double theta0, bool allow_transparent) {
  std::vector<std::string> v;
  const double pi = std::numbers::pi;
  if (!(k1_re > 0.0)) v.push_back("k1_re must be positive");
  if (!(k2_re > 0.0)) v.push_back("k2_re must be positive");
  if (!(kappa >= 0.0)) v.push_back("kappa must be non-negative");
  if (!(theta0 > pi / 2 && theta0 <= 5 * pi / 4)) v.push_back("theta0 must lie in (pi/2, 5pi/4]");
  if (std::abs(theta0 - pi) < 1e-12) v.push_back("theta0 must differ from pi");
  if (k1_re == k2_re && !allow_transparent) v.push_back("k1 and k2 must differ");
  cplx k1(k1_re, kappa), k2(k2_re, kappa);
  double s2 = std::max(std::norm(k1), std::norm(k2));
  if (k1_re != k2_re) {
    if (std::abs(k1 * k1 - 2.0 * k2 * k2) <= 1e-6 * s2) v.push_back("k1^2 too close to 2 k2^2 (lateral points coalesce)");
    if (std::abs(k2 * k2 - 2.0 * k1 * k1) <= 1e-6 * s2) v.push_back("k2^2 too close to 2 k1^2 (lateral points coalesce)");
  }
  return v;
}

WedgeConfig make_config(double k1_re, double k2_re, double kappa, double theta0, bool allow_transparent) {
  auto v = validate(k1_re, k2_re, kappa, theta0, allow_transparent);
  if (!v.empty()) {
    std::string msg = "invalid wedge configuration:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw std::invalid_argument(msg);
  }
  WedgeConfig c;
  c.k1 = {k1_re, kappa};
  c.k2 = {k2_re, kappa};
  c.kappa = kappa;
  c.theta0 = theta0;
  c.a1 = c.k1 * std::cos(theta0);
  c.a2 = c.k1 * std::sin(theta0);
  const double pi = std::numbers::pi;
  c.wcase = (theta0 > pi && theta0 < 1.5 * pi) ? WedgeCase::Simple : WedgeCase::Complicated;
  return c;
}

WedgeConfig config_from_json(const nlohmann::json& j, bool allow_transparent) {
  return make_config(j.at("k1_re").get<double>(), j.at("k2_re").get<double>(), j.at("kappa").get<double>(),
                     j.at("theta0").get<double>(), allow_transparent);
}

nlohmann::json to_json(const WedgeConfig& cfg) {
  return {{"k1_re", cfg.k1.real()}, {"k2_re", cfg.k2.real()}, {"kappa", cfg.kappa}, {"theta0", cfg.theta0}};
}

std::string digest(std::string_view text) {
  // FNV-1a, 64 bit
  std::uint64_t h = 14695981039346656037ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const WedgeConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.15g|%.15g|%.15g|%.15g", cfg.k1.real(), cfg.k2.real(), cfg.kappa, cfg.theta0);
  return digest(buf);
}

cplx kernel_K(const cvec2& a, const WedgeConfig& cfg) {
  cplx r2 = a[0] * a[0] + a[1] * a[1];
  cplx den = cfg.k1 * cfg.k1 - r2;
  check_denominator(den, std::norm(cfg.scale()), "k1^2 - a1^2 - a2^2");
  return (cfg.k2 * cfg.k2 - r2) / den;
}

cplx forcing_P(const cvec2& a, const WedgeConfig& cfg) {
  cplx d1 = cfg.a1 - a[0], d2 = cfg.a2 - a[1];
  check_denominator(d1, cfg.scale(), "a1 - alpha1 (forcing pole)");
  check_denominator(d2, cfg.scale(), "a2 - alpha2 (forcing pole)");
  return 1.0 / (d1 * d2);
}

cplx factor_K(Factor which, const cvec2& a, const WedgeConfig& cfg) {
  const cplx k1s = cfg.k1 * cfg.k1, k2s = cfg.k2 * cfg.k2;
  cplx num, den;
  switch (which) {
    case Factor::MinusCirc:
      num = branch_sqrt(k2s - a[1] * a[1]) - a[0];
      den = branch_sqrt(k1s - a[1] * a[1]) - a[0];
      break;
    case Factor::PlusCirc:
      num = branch_sqrt(k2s - a[1] * a[1]) + a[0];
      den = branch_sqrt(k1s - a[1] * a[1]) + a[0];
      break;
    case Factor::CircMinus:
      num = branch_sqrt(k2s - a[0] * a[0]) - a[1];
      den = branch_sqrt(k1s - a[0] * a[0]) - a[1];
      break;
    case Factor::CircPlus:
      num = branch_sqrt(k2s - a[0] * a[0]) + a[1];
      den = branch_sqrt(k1s - a[0] * a[0]) + a[1];
      break;
  }
  check_denominator(den, cfg.scale(), "kernel factor");
  return num / den;
}

cplx integrand_I1(const cvec2& a, cplx z1, cplx s1, cplx traceA_value, const WedgeConfig& cfg) {
  const double sc = cfg.scale();
  cplx kf = factor_K(Factor::MinusCirc, {z1, a[1]}, cfg);
  check_denominator(kf, sc, "K_{-o}(z1, alpha2)");
  check_denominator(z1 - a[0], sc, "z1 - alpha1");
  check_denominator(s1 - a[1], sc, "sqrt(k1^2 - z1^2) - alpha2");
  check_denominator(s1, sc, "sqrt(k1^2 - z1^2)");
  return (cfg.k2 * cfg.k2 - cfg.k1 * cfg.k1) * traceA_value / (kf * (z1 - a[0]) * (s1 - a[1]) * s1);
}

cplx integrand_I2(const cvec2& a, cplx z2, cplx s2, cplx traceB_value, const WedgeConfig& cfg) {
  const double sc = cfg.scale();
  cplx kf = factor_K(Factor::CircMinus, {a[0], z2}, cfg);
  check_denominator(kf, sc, "K_{o-}(alpha1, z2)");
  check_denominator(z2 - a[1], sc, "z2 - alpha2");
  check_denominator(s2 - a[0], sc, "sqrt(k1^2 - z2^2) - alpha1");
  check_denominator(s2, sc, "sqrt(k1^2 - z2^2)");
  return (cfg.k2 * cfg.k2 - cfg.k1 * cfg.k1) * traceB_value / (kf * (z2 - a[1]) * (s2 - a[0]) * s2);
}

cplx integrand_I1(const cvec2& a, cplx z1, cplx traceA_value, const WedgeConfig& cfg) {
  return integrand_I1(a, z1, branch_sqrt(cfg.k1 * cfg.k1 - z1 * z1), traceA_value, cfg);
}

cplx integrand_I2(const cvec2& a, cplx z2, cplx traceB_value, const WedgeConfig& cfg) {
  return integrand_I2(a, z2, branch_sqrt(cfg.k1 * cfg.k1 - z2 * z2), traceB_value, cfg);
}

}  // namespace pwedge::kernel
