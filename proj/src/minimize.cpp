// SPDX-License-Identifier: Apache-2.0
#include "fracsob/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "fracsob/testfunctions.hpp"

namespace fracsob
{

RadialFunction default_initial_guess(const FormMatrices& F)
{
  const Params& p = F.params;
  if (p.dim >= 4.0 * p.s)
    return truncated_bubble(p, 0.25, 0.5, F.grid);
  return boundary_cutoff(8, F.grid);
}

namespace
{

/// Values of a nodal vector at the Gauss points used by lp_norm, with the
/// |S^{N-1}| r^{N-1} weights, so that norms along a segment cost O(points).
struct PointSampler
{
  std::vector<double> weight;
  std::vector<int> elem;
  std::vector<double> x;

  PointSampler(const RadialGrid& g, const Params& p, int order)
  {
    const Rule gl = gauss_legendre(order);
    const double omega = sphere_area(p.dim - 1);
    for (int e = 0; e < g.elements(); ++e)
      for (std::size_t i = 0; i < gl.size(); ++i)
      {
        const double r = g.node(e) + g.width(e) * gl.x[i];
        weight.push_back(omega * g.width(e) * gl.w[i] * std::pow(r, p.dim - 1));
        elem.push_back(e);
        x.push_back(gl.x[i]);
      }
  }

  Eigen::VectorXd sample(const Eigen::VectorXd& v) const
  {
    const int M = static_cast<int>(v.size());
    Eigen::VectorXd out(weight.size());
    for (std::size_t k = 0; k < weight.size(); ++k)
    {
      const int e = elem[k];
      const double b = e + 1 < M ? v[e + 1] : 0.0;
      out[k] = (1.0 - x[k]) * v[e] + x[k] * b;
    }
    return out;
  }

  double norm(const Eigen::VectorXd& pts, double p) const
  {
    double acc = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k)
      acc += weight[k] * std::pow(std::abs(pts[k]), p);
    return std::pow(acc, 1.0 / p);
  }
};

}  // namespace

MinimizeResult minimize_quotient(const FormMatrices& F, const std::optional<RadialFunction>& init,
                                 const MinimizeOptions& opt)
{
  const Params& P = F.params;
  const double p = opt.exponent ? *opt.exponent : critical_exponent(P);
  if (!(p >= 2.0))
    throw DomainError("minimization exponent must be >= 2");
  if (!(opt.tol > 0.0) || opt.max_iter < 1)
    throw DomainError("minimizer needs tol > 0 and max_iter >= 1");

  const Eigen::MatrixXd B = F.A_reg + F.Mh;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw DomainError("form A_reg + M_h is not positive definite; refusing to minimize "
                      "(potential " + F.h.describe() + ")");

  RadialFunction start = init ? *init : default_initial_guess(F);
  if (!start.grid || !(*start.grid == *F.grid))
    throw DomainError("initial guess lives on a different grid");
  const int order = F.quad.gauss_order;
  const PointSampler sampler(*F.grid, P, order);

  Eigen::VectorXd u = start.values.cwiseAbs();
  {
    const double n = sampler.norm(sampler.sample(u), p);
    if (!(n > 0.0))
      throw DomainError("initial guess is the zero function");
    u /= n;
  }
  double uBu = u.dot(B * u);
  double q = uBu;

  MinimizeResult res;
  res.exponent = p;
  res.history.push_back(q);
  int below = 0, tiny = 0;
  bool warm = false;

  for (int it = 1; it <= opt.max_iter; ++it)
  {
    const RadialFunction cur(F.grid, u);
    Eigen::VectorXd v = llt.solve(power_load(cur, p, P, order)).cwiseAbs();
    const Eigen::VectorXd up = sampler.sample(u);
    Eigen::VectorXd vp = sampler.sample(v);
    const double vn = sampler.norm(vp, p);
    v /= vn;
    vp /= vn;
    const double uBv = u.dot(B * v), vBv = v.dot(B * v);

    // both endpoints are nonnegative, so the segment is too
    auto f = [&](double t) {
      const double num = (1.0 - t) * (1.0 - t) * uBu + 2.0 * t * (1.0 - t) * uBv + t * t * vBv;
      const double n = sampler.norm((1.0 - t) * up + t * vp, p);
      return num / (n * n);
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = 1.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < 60 && b - a > 1e-12; ++k)
    {
      if (f1 <= f2)
      {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = f(x1);
      }
      else
      {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = f(x2);
      }
    }
    double t_best = 0.0, f_best = q;
    for (double t : {x1, x2, 1.0})
    {
      const double ft = (t == x1) ? f1 : (t == x2) ? f2 : f(t);
      if (ft < f_best)
      {
        f_best = ft;
        t_best = t;
      }
    }

    if (t_best > 0.0)
    {
      u = (1.0 - t_best) * u + t_best * v;
      u /= sampler.norm(sampler.sample(u), p);
      uBu = u.dot(B * u);
    }
    const double q_new = t_best > 0.0 ? uBu : q;
    const double rel = (q - q_new) / std::abs(q);
    q = q_new;
    res.history.push_back(q);
    res.iterations = it;

    below = rel < opt.tol ? below + 1 : 0;
    tiny = rel < 1e-12 ? tiny + 1 : 0;
    if (it == 1 && rel < opt.tol)
      warm = true;
    if (below >= 3 || (warm && it == 2 && below == 2))
    {
      res.converged = true;
      res.stop_reason = warm && it == 2 ? "warm start" : "relative decrease below tol";
      break;
    }
    if (tiny >= 3)
    {
      res.stop_reason = "stagnation";
      break;
    }
  }
  if (!res.converged && res.stop_reason.empty())
    res.stop_reason = "max_iter";

  res.u = RadialFunction(F.grid, u);
  res.value = rayleigh_quotient(res.u, F, p);
  return res;
}

std::shared_ptr<const RadialGrid> GridPolicy::make() const
{
  if (kind == "graded")
    return std::make_shared<const RadialGrid>(RadialGrid::graded(M, beta));
  if (kind == "two_sided")
    return std::make_shared<const RadialGrid>(RadialGrid::two_sided(M, beta));
  throw DomainError("unknown grid kind '" + kind + "' (expected graded|two_sided)");
}

std::vector<SweepRow> sweep_s(const Params& base, std::vector<double> s_values, const Potential& h,
                              const GridPolicy& grid, const QuadSpec& q,
                              const MinimizeOptions& opt, const AssemblyOptions& asmb)
{
  std::sort(s_values.begin(), s_values.end());
  std::vector<SweepRow> rows;
  AssemblyOptions a = asmb;
  a.killing = false;
  for (double s : s_values)
  {
    SweepRow row;
    row.s = s;
    try
    {
      Params p = base;
      p.s = s;
      p.validate_subcritical_dimension();
      const FormMatrices F = assemble_forms(p, grid.make(), q, h, a);
      const MinimizeResult r = minimize_quotient(F, std::nullopt, opt);
      row.value = r.value;
      row.converged = r.converged;
      row.iterations = r.iterations;
      row.s_der = sharp_constant_estimate(p, q);
      row.gap = row.s_der - row.value;
    }
    catch (const std::exception& e)
    {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

StrictReport strict_subcritical_check(const Params& p, const Potential& h,
                                      std::shared_ptr<const RadialGrid> grid, const QuadSpec& q,
                                      const StrictOptions& opt)
{
  p.validate_subcritical_dimension();
  StrictReport rep;
  const bool low = 2.0 * p.s < p.dim && p.dim < 4.0 * p.s;
  AssemblyOptions a = opt.assembly;
  a.killing = low;
  const FormMatrices F = assemble_forms(p, grid, q, h, a);
  require_coercive(F);

  rep.minimizer = minimize_quotient(F, std::nullopt, opt.minimize);
  rep.discrete_value = rep.minimizer.value;
  const SharpConstantReport sc = sharp_constant(p, q);
  rep.s_der = sc.value;

  // quadrature error: re-evaluate the minimizer with a lower Gauss order; the
  // diagonal levels stay put since the assembly already bounds their cell error
  QuadSpec qc = q;
  qc.gauss_order = std::max(4, q.gauss_order - 2);
  AssemblyOptions ac = opt.assembly;
  ac.killing = false;
  const FormMatrices Fc = assemble_forms(p, grid, qc, h, ac);
  const double coarse = rayleigh_quotient(rep.minimizer.u, Fc, rep.minimizer.exponent);
  rep.quad_error = std::abs(coarse - rep.discrete_value) + std::abs(sc.value - sc.value_inner) +
                   std::abs(sc.value) * sc.tail_rel;
  rep.margin = 3.0 * rep.quad_error;
  rep.strict = rep.discrete_value < rep.s_der - rep.margin;

  if (low)
  {
    rep.mass_pathway = true;
    const MassResult mass = solve_mass(F, opt.r_cut, opt.convention);
    rep.kappa0 = mass.kappa0;
    const double pc = critical_exponent(p);
    rep.pathway_min = std::numeric_limits<double>::infinity();
    for (double eps : opt.eps_grid)
    {
      const RadialFunction v =
          mass_corrected_family(p, eps, opt.r_cut, mass.field, grid, opt.convention);
      const double n = lp_norm(v, pc, p, q.gauss_order);
      const double reg = v.values.dot((F.A_reg + F.Mh) * v.values) / (n * n);
      const double full = reg + v.values.dot(F.K * v.values) / (n * n);
      rep.pathway.push_back({eps, full, reg});
      if (full < rep.pathway_min)
      {
        rep.pathway_min = full;
        rep.pathway_eps = eps;
      }
    }
    rep.strict_via_mass = rep.pathway_min < rep.s_der - rep.margin;
  }
  return rep;
}

}  // namespace fracsob
