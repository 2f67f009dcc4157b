// SPDX-License-Identifier: Apache-2.0
#include "fracsob/constants.hpp"

#include <cmath>
#include <numbers>

namespace fracsob
{

void Params::validate() const
{
  if (dim < 1)
    throw DomainError("dimension must be >= 1, got " + std::to_string(dim));
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("fractional order must satisfy s in (0,1), got s=" + std::to_string(s));
}

void Params::validate_subcritical_dimension() const
{
  validate();
  if (!(dim > 2.0 * s))
    throw DomainError("critical exponent requires N > 2s (N=" + std::to_string(dim) +
                      ", s=" + std::to_string(s) + ")");
}

std::string to_string(RieszConvention c)
{
  return c == RieszConvention::Paper ? "paper" : "standard";
}

RieszConvention riesz_convention_from_string(const std::string& name)
{
  if (name == "standard")
    return RieszConvention::Standard;
  if (name == "paper")
    return RieszConvention::Paper;
  throw DomainError("unknown Riesz convention '" + name + "' (expected paper|standard)");
}

double critical_exponent(const Params& p)
{
  p.validate_subcritical_dimension();
  return 2.0 * p.dim / (p.dim - 2.0 * p.s);
}

double gagliardo_constant(const Params& p)
{
  p.validate();
  const double n = p.dim;
  return std::pow(4.0, p.s) * p.s * std::tgamma(0.5 * n + p.s) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - p.s));
}

double riesz_constant(const Params& p, RieszConvention c)
{
  p.validate_subcritical_dimension();
  const double n = p.dim;
  const double pi_n = std::pow(std::numbers::pi, -0.5 * n);
  if (c == RieszConvention::Paper)
    return pi_n * std::pow(2.0, -p.s) * std::tgamma(0.5 * (n - p.s)) / std::tgamma(0.5 * p.s);
  return pi_n * std::pow(2.0, -2.0 * p.s) * std::tgamma(0.5 * n - p.s) / std::tgamma(p.s);
}

double sphere_area(int n)
{
  const double m = n + 1.0;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

double bubble_profile_integral(int dim)
{
  const double n = dim;
  return std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(0.5 * n) / std::tgamma(n);
}

double bubble_normalization(const Params& p)
{
  return std::pow(bubble_profile_integral(p.dim), -1.0 / critical_exponent(p));
}

double killing_coefficient(const Params& p)
{
  return gagliardo_constant(p) * sphere_area(p.dim - 1) / (2.0 * p.s);
}

double mass_coefficient(const Params& p, RieszConvention c)
{
  return bubble_normalization(p) / riesz_constant(p, c);
}

}  // namespace fracsob
