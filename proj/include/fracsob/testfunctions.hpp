// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fracsob/constants.hpp"
#include "fracsob/radial_quadrature.hpp"

namespace fracsob
{

/// Logarithmic cutoff: 0 for t <= 1/k^2, log(k^2 t)/log k up to t = 1/k, then 1.
double chi_k(double t, double k);

/// Quintic C^2 step P(x) = 10x^3 - 15x^4 + 6x^5 clamped to [0,1].
double smooth_step(double x);

/// Radial cutoff equal to 1 on [0,a], 0 on [2a, inf), C^2 in between.
double smooth_cutoff(double r, double a);

/// Interpolant of chi_k(1 - r). The last element must be no wider than 1/k^2.
RadialFunction boundary_cutoff(int k, std::shared_ptr<const RadialGrid> grid);

/// gamma_0 (eps / (eps^2 + r^2))^{(N-2s)/2}.
struct Bubble
{
  double eps = 1.0;
  Params params;

  Bubble(double eps, const Params& p);
  double operator()(double r) const;
  /// u(r) - u(rho) without cancellation when r and rho are close; d = |r - rho|.
  double difference(double r, double rho, double d) const;

private:
  double gamma0_, half_m_;
};

double bubble_eval(const Bubble& b, double r);

/// C * int int (f(r) - f(rho)) (g(r) - g(rho)) k(r,rho) (r rho)^{N-1} over [b_0, b_n]^2,
/// the whole-space bilinear form of radial functions restricted to that square.
double whole_space_bilinear(const Params& p, const std::vector<double>& breaks,
                            const std::function<double(double, double, double)>& df,
                            const std::function<double(double, double, double)>& dg,
                            const QuadSpec& q);

struct SharpConstantReport
{
  double value = 0.0;        ///< extrapolated quotient
  double energy = 0.0;       ///< whole-space energy including the tail estimate
  double norm = 0.0;         ///< ||u_eps||_{2*}
  double tail = 0.0;         ///< far-field energy correction
  double tail_rel = 0.0;     ///< |tail| / energy
  double truncation = 0.0;   ///< outer radius R_max
  double value_inner = 0.0;  ///< extrapolation from the inner pair of truncation radii
  double tail_exponent = 0.0;
};

/// Whole-space quotient of the bubble u_eps, evaluated by quadrature on [0, R]^2 with
/// extrapolated far-field correction. R defaults to eps * max(1e6, 1e8^{1/mu}).
SharpConstantReport sharp_constant(const Params& p, const QuadSpec& q, double eps = 1.0,
                                   double truncation = 0.0);

double sharp_constant_estimate(const Params& p, const QuadSpec& q);

/// Breakpoints used for whole-space radial integrals: 1/8-steps on [0,1], then
/// geometric with ratio 3/2 up to R.
std::vector<double> whole_space_breaks(double R);

struct EulerLagrangeReport
{
  std::vector<double> centers;
  std::vector<double> lhs;  ///< a(u_eps, phi_j)
  std::vector<double> rhs;  ///< S int u^{2*-1} phi_j
  double max_rel = 0.0;
};

/// Weak residual of (-Delta)^s u_eps = S u_eps^{2*-1} tested against hats centered
/// at the given radii (half-width = center / 2).
EulerLagrangeReport bubble_euler_lagrange(const Params& p, const QuadSpec& q, double eps,
                                          double S, const std::vector<double>& centers);

/// eta(r) u_eps(r) with eta = smooth_cutoff(., plateau), interpolated on the grid.
RadialFunction truncated_bubble(const Params& p, double eps, double plateau,
                                std::shared_ptr<const RadialGrid> grid);

/// v_eps = eta u_eps + eps^{(N-2s)/2} a_s kappa with eta = smooth_cutoff(., r_cut).
RadialFunction mass_corrected_family(const Params& p, double eps, double r_cut,
                                     const RadialFunction& kappa,
                                     std::shared_ptr<const RadialGrid> grid,
                                     RieszConvention conv = RieszConvention::Standard);

}  // namespace fracsob
