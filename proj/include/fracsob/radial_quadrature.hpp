// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracsob/constants.hpp"
#include "fracsob/quadrature.hpp"

namespace fracsob
{

/// Raised when a quadrature routine cannot reach its accuracy target.
class QuadratureError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Mesh 0 = r_0 < ... < r_M = 1 on the unit radius.
class RadialGrid
{
public:
  /// r_i = 1 - (1 - i/M)^beta, refining toward the boundary.
  static RadialGrid graded(int M, double beta = 2.0);
  /// Graded toward both r = 0 and r = 1, with the halves meeting at r = 1/2.
  static RadialGrid two_sided(int M, double beta = 2.0);
  static RadialGrid from_nodes(std::vector<double> nodes, double beta = 1.0,
                               std::string kind = "custom");

  int elements() const { return static_cast<int>(nodes_.size()) - 1; }
  /// Number of free nodal values (every node except r = 1).
  int dofs() const { return elements(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[i]; }
  double width(int e) const { return nodes_[e + 1] - nodes_[e]; }
  double grading() const { return beta_; }
  const std::string& kind() const { return kind_; }

  /// Index of the element containing r (clamped to the mesh).
  int locate(double r) const;

  bool operator==(const RadialGrid& o) const { return nodes_ == o.nodes_; }

private:
  RadialGrid(std::vector<double> nodes, double beta, std::string kind);
  std::vector<double> nodes_;
  double beta_ = 1.0;
  std::string kind_;
};

/// Piecewise-linear radial function with zero trace at r = 1.
struct RadialFunction
{
  std::shared_ptr<const RadialGrid> grid;
  /// Nodal values for r_0 .. r_{M-1}; the value at r_M = 1 is implicitly 0.
  Eigen::VectorXd values;

  RadialFunction() = default;
  RadialFunction(std::shared_ptr<const RadialGrid> g, Eigen::VectorXd v);

  /// Interpolant of f at the free nodes.
  static RadialFunction interpolate(std::shared_ptr<const RadialGrid> g,
                                    const std::function<double(double)>& f);

  double operator()(double r) const;
  double nodal(int i) const { return i < values.size() ? values[i] : 0.0; }
};

struct QuadSpec
{
  int gauss_order = 6;
  int diagonal_levels = 5;
  int angular_order = 16;

  void validate() const;
};

/// Boundary geometry for N = 1: the symmetric interval (-1,1) seen through even
/// functions, or the half-line form on (0,1) without the reflected term.
enum class KernelMode
{
  Radial,
  HalfLine
};

/// Spherical average k(r,rho) of |r e - rho w|^{-N-2s} over w in S^{N-1}.
class AngularKernel
{
public:
  AngularKernel(const Params& p, const QuadSpec& q, KernelMode mode = KernelMode::Radial);

  /// Evaluate with the gap d = |r - rho| supplied separately so it keeps full
  /// relative precision when r and rho are close.
  double operator()(double r, double rho, double d) const;
  double operator()(double r, double rho) const;

  const Params& params() const { return p_; }
  KernelMode mode() const { return mode_; }

private:
  double numeric(double r, double rho, double d) const;

  Params p_;
  KernelMode mode_;
  double lambda_;
  double omega_;       // |S^{N-1}|
  double omega_low_;   // |S^{N-2}|
  Rule outer_, panel_;
  std::vector<double> outer_sin2_, outer_w_;
};

/// Scalar entry point: k(r,rho) for r != rho.
double angular_kernel(const Params& p, double r, double rho, const QuadSpec& q);

struct AssemblyOptions
{
  KernelMode mode = KernelMode::Radial;
  int jobs = 1;
  /// Skip the killing matrix in assemble_forms when only the regional form is needed.
  bool killing = true;
};

/// Prefactor C with Q(u) = C * int int (u(r)-u(rho))^2 k r^{N-1} rho^{N-1}.
double radial_form_prefactor(const Params& p, KernelMode mode = KernelMode::Radial);

/// Stiffness matrix of the regional form over the free nodal hats.
Eigen::MatrixXd assemble_regional_stiffness(const Params& p, const RadialGrid& grid,
                                            const QuadSpec& q,
                                            const AssemblyOptions& opt = {});

/// Killing measure kappa_B(t) = c_{N,s} int_{|y|>1} |x-y|^{-N-2s} dy at |x| = t < 1.
double killing_measure(const Params& p, double t, const QuadSpec& q);

/// Matrix of int_B kappa_B phi_i phi_j dx over the free nodal hats.
Eigen::MatrixXd assemble_killing_matrix(const Params& p, const RadialGrid& grid,
                                        const QuadSpec& q, const AssemblyOptions& opt = {});

/// Integrand F(r, rho, d) of a symmetric double integral whose singularity sits on
/// the diagonal and behaves like d^{1-2s} there (a squared difference against the kernel).
using PairIntegrand = std::function<double(double r, double rho, double d)>;

/// Integral of F over [b_0, b_n]^2 split into panel pairs at the given breakpoints.
/// Diagonal and touching pairs use singular-adapted rules for order s.
double integrate_panel_pairs(const std::vector<double>& breaks, const PairIntegrand& F,
                             double s, const QuadSpec& q);

/// Same integral, returned as partial sums: entry j is the integral over [b_0, b_{j+1}]^2.
std::vector<double> integrate_panel_pairs_cumulative(const std::vector<double>& breaks,
                                                     const PairIntegrand& F, double s,
                                                     const QuadSpec& q);

/// Composite rule on [0,1] graded toward 0: Gauss-Legendre on [2^{-l-1}, 2^{-l}] for
/// l < levels and a folded Gauss-Jacobi rule of weight z^alpha on [0, 2^{-levels}].
Rule geometric_rule(int levels, int order, double alpha);

}  // namespace fracsob
