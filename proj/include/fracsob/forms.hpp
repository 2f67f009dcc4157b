// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracsob/constants.hpp"
#include "fracsob/radial_quadrature.hpp"

namespace fracsob
{

/// Bounded radial potential h, piecewise linear between samples and constant
/// beyond the first and last sample.
class Potential
{
public:
  Potential() : r_{0.0}, h_{0.0} {}
  static Potential constant(double value);
  static Potential from_samples(std::vector<double> r, std::vector<double> h);
  /// Reads whitespace-separated "r value" lines; '#' starts a comment.
  static Potential from_file(const std::string& path);

  double operator()(double r) const;
  /// sup |h| over the samples.
  double bound() const { return bound_; }
  bool is_constant() const { return r_.size() == 1; }
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& samples() const { return h_; }
  std::string describe() const;

private:
  std::vector<double> r_, h_;
  double bound_ = 0.0;
};

struct FormMatrices
{
  std::shared_ptr<const RadialGrid> grid;
  Params params;
  QuadSpec quad;
  Potential h;
  Eigen::MatrixXd A_reg;  ///< regional stiffness
  Eigen::MatrixXd K;      ///< killing-weighted mass
  Eigen::MatrixXd Mh;     ///< potential-weighted mass
  Eigen::MatrixXd M2;     ///< L^2 mass
};

/// Grid-level mass matrix of int_B w(|x|) phi_i phi_j dx.
Eigen::MatrixXd weighted_mass_matrix(const Params& p, const RadialGrid& grid, int gauss_order,
                                     const std::function<double(double)>& weight);

FormMatrices assemble_forms(const Params& p, std::shared_ptr<const RadialGrid> grid,
                            const QuadSpec& q, const Potential& h = Potential::constant(0.0),
                            const AssemblyOptions& opt = {});

/// Replace the potential without reassembling the stiffness and killing parts.
void set_potential(FormMatrices& F, const Potential& h);

double regional_energy(const RadialFunction& u, const FormMatrices& F);
double full_energy(const RadialFunction& u, const FormMatrices& F);

/// (|S^{N-1}| int_0^1 |u|^p r^{N-1} dr)^{1/p} on the interpolant.
double lp_norm(const RadialFunction& u, double p, const Params& P, int gauss_order = 6);

/// b_i = int_B |u|^{p-2} u phi_i dx.
Eigen::VectorXd power_load(const RadialFunction& u, double p, const Params& P,
                           int gauss_order = 6);

/// (Q_B(u) + int h u^2) / ||u||_p^2 with p = 2*_s unless given.
double rayleigh_quotient(const RadialFunction& u, const FormMatrices& F);
double rayleigh_quotient(const RadialFunction& u, const FormMatrices& F, double exponent);

/// Smallest eigenvalue of (A, B) for symmetric A and positive definite B.
double smallest_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Throws DomainError unless A_reg + Mh is positive definite.
void require_coercive(const FormMatrices& F);
bool is_coercive(const Eigen::MatrixXd& A);

}  // namespace fracsob
