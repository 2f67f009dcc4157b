// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracsob/forms.hpp"
#include "fracsob/green_mass.hpp"

namespace fracsob
{

struct MinimizeOptions
{
  double tol = 1e-9;  ///< relative quotient decrease per step
  int max_iter = 500;
  /// Power in the denominator; the critical exponent when unset.
  std::optional<double> exponent;
};

struct MinimizeResult
{
  double value = 0.0;
  RadialFunction u;  ///< nonnegative, unit L^p norm
  int iterations = 0;
  std::vector<double> history;  ///< quotient before the first step, then after each step
  bool converged = false;
  std::string stop_reason;
  double exponent = 0.0;
};

/// Default starting point: boundary_cutoff(8) when N < 4s, otherwise a truncated
/// bubble with eps = 1/4 and cutoff plateau 1/2.
RadialFunction default_initial_guess(const FormMatrices& F);

/// Damped inverse iteration for min (u^T (A_reg + M_h) u) / ||u||_p^2.
MinimizeResult minimize_quotient(const FormMatrices& F,
                                 const std::optional<RadialFunction>& init = std::nullopt,
                                 const MinimizeOptions& opt = {});

struct GridPolicy
{
  int M = 256;
  double beta = 2.0;
  std::string kind = "graded";  ///< graded | two_sided

  std::shared_ptr<const RadialGrid> make() const;
};

struct SweepRow
{
  double s = 0.0;
  double value = 0.0;
  double s_der = 0.0;
  double gap = 0.0;  ///< s_der - value
  bool converged = false;
  int iterations = 0;
  std::string error;  ///< nonempty when the point failed
};

/// Minimize at each s (sorted ascending); failures are recorded per row.
std::vector<SweepRow> sweep_s(const Params& base, std::vector<double> s_values,
                              const Potential& h, const GridPolicy& grid, const QuadSpec& q,
                              const MinimizeOptions& opt = {}, const AssemblyOptions& asmb = {});

struct MassPathwayPoint
{
  double eps = 0.0;
  double full_quotient = 0.0;      ///< (Q_R^N + int h v^2) / ||v||^2
  double regional_quotient = 0.0;  ///< (Q_B + int h v^2) / ||v||^2
};

struct StrictReport
{
  double discrete_value = 0.0;
  double s_der = 0.0;
  double quad_error = 0.0;
  double margin = 0.0;
  bool strict = false;
  MinimizeResult minimizer;
  // low-dimensional pathway (2s < N < 4s)
  bool mass_pathway = false;
  double kappa0 = 0.0;
  std::vector<MassPathwayPoint> pathway;
  double pathway_min = 0.0;
  double pathway_eps = 0.0;
  bool strict_via_mass = false;
};

struct StrictOptions
{
  MinimizeOptions minimize;
  std::vector<double> eps_grid = {0.04, 0.02, 0.01, 0.005, 0.0025};
  /// Plateau of the cutoff eta in v_eps; the mass field is solved with the same cutoff
  /// so that eta u_eps + eps^{(N-2s)/2} a_s kappa_chi matches a multiple of G away from 0.
  double r_cut = 0.2;
  RieszConvention convention = RieszConvention::Standard;
  AssemblyOptions assembly;
};

/// Compare the discrete minimum with S_der; margin = 3 x estimated quadrature error.
StrictReport strict_subcritical_check(const Params& p, const Potential& h,
                                      std::shared_ptr<const RadialGrid> grid, const QuadSpec& q,
                                      const StrictOptions& opt = {});

}  // namespace fracsob
