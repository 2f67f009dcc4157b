// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fracsob
{

/// Raised when an operation is called outside the parameter range it is defined on.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Dimension and fractional order shared by every kernel in the library.
struct Params
{
  int dim = 2;
  double s = 0.75;

  /// Throws DomainError unless 0 < s < 1 and dim >= 1.
  void validate() const;
  /// Additionally requires dim > 2s (critical exponent finite).
  void validate_subcritical_dimension() const;
};

/// Normalization used for the Riesz potential of (-Delta)^s.
enum class RieszConvention
{
  Standard,  // pi^{-N/2} 2^{-2s} Gamma((N-2s)/2) / Gamma(s)
  Paper      // pi^{-N/2} 2^{-s} Gamma((N-s)/2) / Gamma(s/2)
};

std::string to_string(RieszConvention c);
RieszConvention riesz_convention_from_string(const std::string& name);

/// 2N / (N - 2s).
double critical_exponent(const Params& p);

/// c_{N,s} = 4^s s Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)); makes (-Delta)^s the
/// Fourier multiplier |xi|^{2s}.
double gagliardo_constant(const Params& p);

/// Constant t_{N,s} in R(x) = t_{N,s} |x|^{2s-N}.
double riesz_constant(const Params& p, RieszConvention c = RieszConvention::Standard);

/// Area of the unit sphere S^{n} embedded in R^{n+1}; sphere_area(0) == 2.
double sphere_area(int n);

/// Integral over R^N of (1+|x|^2)^{-N}, i.e. pi^{N/2} Gamma(N/2) / Gamma(N).
double bubble_profile_integral(int dim);

/// gamma_0 such that gamma_0 (eps/(eps^2+|x|^2))^{(N-2s)/2} has unit L^{2*_s}(R^N) norm.
double bubble_normalization(const Params& p);

/// a_{N,s} = c_{N,s} |S^{N-1}| / (2s): the killing measure of the unit ball at the origin,
/// and the constant in kappa_B(x) <= a_{N,s} (1 - rho)^{-2s} on B_rho.
double killing_coefficient(const Params& p);

/// a_s = gamma_0 / t_{N,s}, the weight of the mass term in the corrected test function.
double mass_coefficient(const Params& p, RieszConvention c = RieszConvention::Standard);

}  // namespace fracsob
