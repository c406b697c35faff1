#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "pwedge/contours.hpp"

namespace pwedge {

using cvec2 = std::array<cplx, 2>;

enum class WedgeCase { Simple, Complicated };

struct WedgeConfig {
  cplx k1{}, k2{};
  double kappa = 0.0;
  double theta0 = 0.0;
  cplx a1{}, a2{};
  WedgeCase wcase = WedgeCase::Simple;
  double scale() const { return std::max(std::abs(k1), std::abs(k2)); }
  bool transparent() const { return k1 == k2; }
};

namespace kernel {

// Every violated invariant, empty when the configuration is admissible. The transparent
// case k1 == k2 is reported unless allowed explicitly (used by the exactness checks).
std::vector<std::string> validate(double k1_re, double k2_re, double kappa, double theta0,
                                  bool allow_transparent = false);

WedgeConfig make_config(double k1_re, double k2_re, double kappa, double theta0, bool allow_transparent = false);

WedgeConfig config_from_json(const nlohmann::json& j, bool allow_transparent = false);
nlohmann::json to_json(const WedgeConfig& cfg);
// Short stable digest of the physical parameters, written into every output header.
std::string config_hash(const WedgeConfig& cfg);
// 64-bit FNV-1a of the text, as 16 hex digits.
std::string digest(std::string_view text);

cplx kernel_K(const cvec2& a, const WedgeConfig& cfg);
cplx forcing_P(const cvec2& a, const WedgeConfig& cfg);

enum class Factor { MinusCirc, PlusCirc, CircMinus, CircPlus };

cplx factor_K(Factor which, const cvec2& a, const WedgeConfig& cfg);

// Variants taking the relevant root sqrt(k1^2 - z^2) explicitly, for use on the sides of a cut.
cplx integrand_I1(const cvec2& a, cplx z1, cplx s1, cplx traceA_value, const WedgeConfig& cfg);
cplx integrand_I2(const cvec2& a, cplx z2, cplx s2, cplx traceB_value, const WedgeConfig& cfg);

cplx integrand_I1(const cvec2& a, cplx z1, cplx traceA_value, const WedgeConfig& cfg);
cplx integrand_I2(const cvec2& a, cplx z2, cplx traceB_value, const WedgeConfig& cfg);

}  // namespace kernel
}  // namespace pwedge
