// SPDX-License-Identifier: Apache-2.0
#include "fracsob/forms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace fracsob
{

Potential Potential::constant(double value)
{
  return from_samples({0.0}, {value});
}

Potential Potential::from_samples(std::vector<double> r, std::vector<double> h)
{
  if (r.empty() || r.size() != h.size())
    throw DomainError("potential needs matching, nonempty radius and value samples");
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    if (!std::isfinite(r[i]) || !std::isfinite(h[i]))
      throw DomainError("potential samples must be finite");
    if (i > 0 && !(r[i] > r[i - 1]))
      throw DomainError("potential radii must be strictly increasing");
  }
  Potential out;
  out.r_ = std::move(r);
  out.h_ = std::move(h);
  out.bound_ = 0.0;
  for (double v : out.h_)
    out.bound_ = std::max(out.bound_, std::abs(v));
  return out;
}

Potential Potential::from_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open potential file '" + path + "'");
  std::vector<double> r, h;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos)
      line.erase(pos);
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a))
      continue;
    if (!(ls >> b))
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected 'r value'");
    r.push_back(a);
    h.push_back(b);
  }
  return from_samples(std::move(r), std::move(h));
}

double Potential::operator()(double r) const
{
  if (r <= r_.front())
    return h_.front();
  if (r >= r_.back())
    return h_.back();
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - r_.begin());
  const double x = (r - r_[j - 1]) / (r_[j] - r_[j - 1]);
  return (1.0 - x) * h_[j - 1] + x * h_[j];
}

std::string Potential::describe() const
{
  std::ostringstream os;
  os.precision(17);
  if (is_constant())
    os << "constant:" << h_.front();
  else
    os << "samples:" << r_.size();
  return os.str();
}

namespace
{

void check_grid(const RadialFunction& u, const FormMatrices& F)
{
  if (!u.grid || !F.grid || !(*u.grid == *F.grid))
    throw DomainError("function and form matrices live on different grids");
}

template <class Fn>
void for_each_point(const RadialGrid& g, int order, Fn&& fn)
{
  const Rule gl = gauss_legendre(order);
  for (int e = 0; e < g.elements(); ++e)
  {
    const double a = g.node(e), h = g.width(e);
    for (std::size_t i = 0; i < gl.size(); ++i)
      fn(e, gl.x[i], a + h * gl.x[i], h * gl.w[i]);
  }
}

}  // namespace

Eigen::MatrixXd weighted_mass_matrix(const Params& p, const RadialGrid& grid, int gauss_order,
                                     const std::function<double(double)>& weight)
{
  const int M = grid.dofs();
  const double omega = sphere_area(p.dim - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, M);
  for_each_point(grid, gauss_order, [&](int e, double x, double r, double w) {
    const double f = omega * w * weight(r) * std::pow(r, p.dim - 1);
    const double ph[2] = {1.0 - x, x};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (e + i < M && e + j < M)
          out(e + i, e + j) += f * ph[i] * ph[j];
  });
  return out;
}

FormMatrices assemble_forms(const Params& p, std::shared_ptr<const RadialGrid> grid,
                            const QuadSpec& q, const Potential& h, const AssemblyOptions& opt)
{
  p.validate();
  q.validate();
  FormMatrices F;
  F.grid = std::move(grid);
  F.params = p;
  F.quad = q;
  F.A_reg = assemble_regional_stiffness(p, *F.grid, q, opt);
  if (opt.mode == KernelMode::Radial && opt.killing)
    F.K = assemble_killing_matrix(p, *F.grid, q, opt);
  else
    F.K = Eigen::MatrixXd::Zero(F.grid->dofs(), F.grid->dofs());
  F.M2 = weighted_mass_matrix(p, *F.grid, q.gauss_order, [](double) { return 1.0; });
  set_potential(F, h);
  return F;
}

void set_potential(FormMatrices& F, const Potential& h)
{
  F.h = h;
  if (h.is_constant())
    F.Mh = h(0.0) * F.M2;
  else
    F.Mh = weighted_mass_matrix(F.params, *F.grid, F.quad.gauss_order, [&](double r) { return h(r); });
}

double regional_energy(const RadialFunction& u, const FormMatrices& F)
{
  check_grid(u, F);
  return u.values.dot(F.A_reg * u.values);
}

double full_energy(const RadialFunction& u, const FormMatrices& F)
{
  check_grid(u, F);
  return u.values.dot((F.A_reg + F.K) * u.values);
}

double lp_norm(const RadialFunction& u, double p, const Params& P, int gauss_order)
{
  if (!(p >= 1.0))
    throw DomainError("L^p norm needs p >= 1");
  double acc = 0.0;
  for_each_point(*u.grid, gauss_order, [&](int e, double x, double r, double w) {
    const double v = (1.0 - x) * u.nodal(e) + x * u.nodal(e + 1);
    acc += w * std::pow(std::abs(v), p) * std::pow(r, P.dim - 1);
  });
  return std::pow(sphere_area(P.dim - 1) * acc, 1.0 / p);
}

Eigen::VectorXd power_load(const RadialFunction& u, double p, const Params& P, int gauss_order)
{
  const int M = u.grid->dofs();
  const double omega = sphere_area(P.dim - 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(M);
  for_each_point(*u.grid, gauss_order, [&](int e, double x, double r, double w) {
    const double v = (1.0 - x) * u.nodal(e) + x * u.nodal(e + 1);
    const double f = omega * w * std::pow(r, P.dim - 1) * std::pow(std::abs(v), p - 2.0) * v;
    b[e] += f * (1.0 - x);
    if (e + 1 < M)
      b[e + 1] += f * x;
  });
  return b;
}

double rayleigh_quotient(const RadialFunction& u, const FormMatrices& F)
{
  return rayleigh_quotient(u, F, critical_exponent(F.params));
}

double rayleigh_quotient(const RadialFunction& u, const FormMatrices& F, double exponent)
{
  check_grid(u, F);
  const double nrm = lp_norm(u, exponent, F.params, F.quad.gauss_order);
  if (!(nrm > 0.0))
    throw DomainError("Rayleigh quotient of the zero function");
  return u.values.dot((F.A_reg + F.Mh) * u.values) / (nrm * nrm);
}

double smallest_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw DomainError("generalized eigensolve failed");
  return es.eigenvalues()[0];
}

bool is_coercive(const Eigen::MatrixXd& A)
{
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  return llt.info() == Eigen::Success;
}

void require_coercive(const FormMatrices& F)
{
  if (!is_coercive(F.A_reg + F.Mh))
    throw DomainError("form A_reg + M_h is not positive definite on the discrete space "
                      "(potential " + F.h.describe() + ")");
}

}  // namespace fracsob
