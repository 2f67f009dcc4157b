// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracsob/forms.hpp"

namespace fracsob
{

/// R(r) = t_{N,s} r^{2s-N}.
double riesz_potential(const Params& p, double r, RieszConvention c = RieszConvention::Standard);

/// Pointwise (-Delta)^s g at |x| = t for g = (chi - 1) R, chi = smooth_cutoff(., r_chi).
double fractional_laplacian_exterior_riesz(const Params& p, double t, double r_chi,
                                           const QuadSpec& q,
                                           RieszConvention c = RieszConvention::Standard);

struct MassResult
{
  double kappa0 = 0.0;
  RadialFunction field;  ///< kappa_chi = G - chi R
  double residual = 0.0; ///< relative residual of the linear solve
  Potential h_used;
  RieszConvention convention = RieszConvention::Standard;
  double r_chi = 0.0;
};

/// Load vectors of the mass equation, independent of the potential:
///   riesz[i]    = int_B chi R phi_i
///   exterior[i] = int_B (-Delta)^s((chi - 1) R) phi_i
struct MassLoads
{
  Eigen::VectorXd riesz;
  Eigen::VectorXd exterior;
  double r_chi = 0.0;
};

MassLoads assemble_mass_loads(const Params& p, const RadialGrid& grid, const QuadSpec& q,
                              double r_chi, RieszConvention c = RieszConvention::Standard);

/// Solve a_full(kappa, phi) + int h kappa phi = int F phi with
/// F = -h chi R - (-Delta)^s((chi - 1) R). F must carry the killing matrix.
MassResult solve_mass(const FormMatrices& F, double r_chi,
                      RieszConvention c = RieszConvention::Standard,
                      const MassLoads* loads = nullptr);

/// Convenience overload assembling the forms.
MassResult solve_mass(const Params& p, const Potential& h, std::shared_ptr<const RadialGrid> grid,
                      const QuadSpec& q, double r_chi,
                      RieszConvention c = RieszConvention::Standard);

/// Largest lambda for which a_full - lambda M2 stays positive definite.
double coercivity_limit(const FormMatrices& F);

struct MassRow
{
  double lambda = 0.0;
  double kappa0 = 0.0;
  double residual = 0.0;
  std::string error;
};

struct CrossingResult
{
  std::vector<MassRow> rows;
  std::optional<double> lambda_star;
  std::optional<std::pair<double, double>> bracket;
  double kappa0_at_star = 0.0;
  bool monotone = true;  ///< kappa0 changed sign at most once along the grid
  double coercivity_limit = 0.0;
};

/// kappa0 along h = -lambda for each lambda in the grid, then bisection of the
/// first sign change.
CrossingResult mass_crossing(const FormMatrices& F, const std::vector<double>& lambda_grid,
                             double r_chi, RieszConvention c = RieszConvention::Standard,
                             double tolerance = 1e-10);

/// For hats supported in r > 2 r_chi, compares a_full(chi R, phi_i) with
/// int (-Delta)^s((chi-1) R) phi_i; returns the largest relative deviation.
double exterior_consistency(const FormMatrices& F, double r_chi,
                            RieszConvention c = RieszConvention::Standard,
                            const MassLoads* loads = nullptr);

}  // namespace fracsob
