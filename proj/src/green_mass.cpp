// SPDX-License-Identifier: Apache-2.0
#include "fracsob/green_mass.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "fracsob/testfunctions.hpp"

namespace fracsob
{

double riesz_potential(const Params& p, double r, RieszConvention c)
{
  if (!(r > 0.0))
    throw DomainError("Riesz potential is singular at r = 0");
  return riesz_constant(p, c) * std::pow(r, 2.0 * p.s - p.dim);
}

namespace
{

struct ExteriorRiesz
{
  Params p;
  double r_chi;
  double t_ns;

  double operator()(double r) const
  {
    if (r <= r_chi)
      return 0.0;
    return (smooth_cutoff(r, r_chi) - 1.0) * t_ns * std::pow(r, 2.0 * p.s - p.dim);
  }
};

void push_unique(std::vector<double>& v, double x)
{
  if (x > 0.0)
    v.push_back(x);
}

}  // namespace

double fractional_laplacian_exterior_riesz(const Params& p, double t, double r_chi,
                                           const QuadSpec& q, RieszConvention c)
{
  p.validate_subcritical_dimension();
  if (!(r_chi > 0.0 && r_chi < 0.5))
    throw DomainError("cutoff radius r_chi must lie in (0, 1/2)");
  if (t < 0.0)
    throw DomainError("radius must be nonnegative");
  const ExteriorRiesz g{p, r_chi, riesz_constant(p, c)};
  const int N = p.dim;
  const double s = p.s;
  const double gt = g(t);
  const double omega_low = N >= 2 ? sphere_area(N - 2) : 0.0;
  const Rule gth = gauss_legendre(q.angular_order);
  const std::array<double, 2> knots{r_chi, 2.0 * r_chi};

  // spherical mean of g(t) - g(|x + tau w|) over w in S^{N-1}
  auto A = [&](double tau) {
    if (N == 1)
      return 2.0 * gt - g(t + tau) - g(std::abs(t - tau));
    if (t == 0.0)
      return sphere_area(N - 1) * (gt - g(tau));
    std::vector<double> cuts{0.0, M_PI};
    for (double rc : knots)
    {
      const double cth = (rc * rc - t * t - tau * tau) / (2.0 * t * tau);
      if (cth > -1.0 && cth < 1.0)
        cuts.push_back(std::acos(cth));
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
      const double a = cuts[k], b = cuts[k + 1];
      if (b - a < 1e-15)
        continue;
      acc += integrate(gth, a, b, [&](double th) {
        const double rho = std::sqrt(std::max(0.0, t * t + tau * tau + 2.0 * t * tau * std::cos(th)));
        const double w = N == 2 ? 1.0 : std::pow(std::sin(th), N - 2);
        return (gt - g(rho)) * w;
      });
    }
    return omega_low * acc;
  };

  std::vector<double> br;
  for (double rc : knots)
  {
    push_unique(br, std::abs(t - rc));
    push_unique(br, t + rc);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return std::abs(b - a) < 1e-14; }),
           br.end());

  const int order = std::max(q.gauss_order, 10);
  const Rule gl = gauss_legendre(order);
  // first panel: A(tau) ~ tau^2, integrand tau^{1-2s}
  const double b1 = br.front();
  const Rule gj = gauss_jacobi(order, 1.0 - 2.0 * s);
  double acc = 0.0;
  for (std::size_t i = 0; i < gj.size(); ++i)
  {
    const double tau = b1 * gj.x[i];
    acc += gj.w[i] * A(tau) / (tau * tau);
  }
  acc *= std::pow(b1, 2.0 - 2.0 * s);

  const double T = 1048576.0;
  br.push_back(T);
  double lo = b1;
  std::size_t next = 1;
  while (lo < T)
  {
    while (next < br.size() && br[next] <= lo * (1.0 + 1e-14))
      ++next;
    const double hi = std::min(2.0 * lo, br[next]);
    acc += integrate(gl, lo, hi, [&](double tau) { return std::pow(tau, -1.0 - 2.0 * s) * A(tau); });
    lo = hi;
  }
  acc += sphere_area(N - 1) * gt * std::pow(T, -2.0 * s) / (2.0 * s);
  return gagliardo_constant(p) * acc;
}

namespace
{

/// int_B f phi_i over the free hats; element 0 uses a Jacobi rule for r^{2s-1}.
Eigen::VectorXd load_vector(const Params& p, const RadialGrid& grid, const QuadSpec& q,
                            const std::function<double(double)>& f, bool singular_origin)
{
  const int M = grid.dofs();
  const int N = p.dim;
  const double omega = sphere_area(N - 1);
  const Rule gl = gauss_legendre(q.gauss_order);
  const Rule gj = gauss_jacobi_folded(std::max(q.gauss_order, 8), 2.0 * p.s - 1.0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(M);
  for (int e = 0; e < grid.elements(); ++e)
  {
    const double a = grid.node(e), h = grid.width(e);
    const Rule& rule = (e == 0 && singular_origin) ? gj : gl;
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
      const double x = rule.x[i];
      const double r = a + h * x;
      const double v = omega * h * rule.w[i] * f(r) * std::pow(r, N - 1);
      b[e] += v * (1.0 - x);
      if (e + 1 < M)
        b[e + 1] += v * x;
    }
  }
  return b;
}

void require_standard(RieszConvention c)
{
  if (c != RieszConvention::Standard)
    throw DomainError("mass equation needs (-Delta)^s R = delta_0, which holds only for the "
                      "standard Riesz constant; rerun with the standard convention");
}

}  // namespace

MassLoads assemble_mass_loads(const Params& p, const RadialGrid& grid, const QuadSpec& q,
                              double r_chi, RieszConvention c)
{
  p.validate_subcritical_dimension();
  const double t_ns = riesz_constant(p, c);
  MassLoads L;
  L.r_chi = r_chi;
  L.riesz = load_vector(
      p, grid, q,
      [&](double r) { return smooth_cutoff(r, r_chi) * t_ns * std::pow(r, 2.0 * p.s - p.dim); },
      true);
  L.exterior = load_vector(
      p, grid, q, [&](double r) { return fractional_laplacian_exterior_riesz(p, r, r_chi, q, c); },
      false);
  return L;
}

double coercivity_limit(const FormMatrices& F)
{
  return smallest_generalized_eigenvalue(F.A_reg + F.K, F.M2);
}

MassResult solve_mass(const FormMatrices& F, double r_chi, RieszConvention c,
                      const MassLoads* loads)
{
  require_standard(c);
  const Params& p = F.params;
  if (!(2.0 * p.s < p.dim))
    throw DomainError("mass needs N > 2s");
  if (!(r_chi > 0.0 && r_chi < 0.5))
    throw DomainError("cutoff radius r_chi must lie in (0, 1/2)");
  if (F.K.isZero(0.0))
    throw DomainError("mass solve needs the killing matrix (full-space form)");

  MassLoads own;
  if (!loads || loads->r_chi != r_chi)
  {
    own = assemble_mass_loads(p, *F.grid, F.quad, r_chi, c);
    loads = &own;
  }
  const double t_ns = riesz_constant(p, c);
  Eigen::VectorXd hload;
  if (F.h.is_constant())
    hload = F.h(0.0) * loads->riesz;
  else
    hload = load_vector(
        p, *F.grid, F.quad,
        [&](double r) {
          return F.h(r) * smooth_cutoff(r, r_chi) * t_ns * std::pow(r, 2.0 * p.s - p.dim);
        },
        true);
  const Eigen::VectorXd rhs = -hload - loads->exterior;
  const Eigen::MatrixXd A = F.A_reg + F.K + F.Mh;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw DomainError("mass equation is not coercive for potential " + F.h.describe());
  Eigen::VectorXd kappa = llt.solve(rhs);
  // one step of iterative refinement
  kappa += llt.solve(rhs - A * kappa);

  MassResult out;
  out.field = RadialFunction(F.grid, kappa);
  out.kappa0 = kappa[0];
  out.residual = (A * kappa - rhs).norm() / rhs.norm();
  out.h_used = F.h;
  out.convention = c;
  out.r_chi = r_chi;
  return out;
}

MassResult solve_mass(const Params& p, const Potential& h, std::shared_ptr<const RadialGrid> grid,
                      const QuadSpec& q, double r_chi, RieszConvention c)
{
  require_standard(c);
  const FormMatrices F = assemble_forms(p, std::move(grid), q, h);
  return solve_mass(F, r_chi, c);
}

CrossingResult mass_crossing(const FormMatrices& F, const std::vector<double>& lambda_grid,
                             double r_chi, RieszConvention c, double tolerance)
{
  require_standard(c);
  CrossingResult out;
  if (lambda_grid.empty())
    return out;
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw DomainError("lambda grid must be increasing");

  const MassLoads loads = assemble_mass_loads(F.params, *F.grid, F.quad, r_chi, c);
  const Eigen::MatrixXd A_full = F.A_reg + F.K;
  out.coercivity_limit = coercivity_limit(F);

  auto kappa0 = [&](double lambda, double* residual) -> std::optional<double> {
    const Eigen::MatrixXd A = A_full - lambda * F.M2;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
      return std::nullopt;
    const Eigen::VectorXd rhs = lambda * loads.riesz - loads.exterior;
    Eigen::VectorXd k = llt.solve(rhs);
    k += llt.solve(rhs - A * k);
    if (residual)
      *residual = (A * k - rhs).norm() / rhs.norm();
    return k[0];
  };

  int sign_changes = 0;
  for (double lambda : lambda_grid)
  {
    MassRow row;
    row.lambda = lambda;
    const auto k = kappa0(lambda, &row.residual);
    if (!k)
      row.error = "non-coercive: lambda >= discrete first eigenvalue " +
                  std::to_string(out.coercivity_limit);
    else
      row.kappa0 = *k;
    if (!out.rows.empty() && row.error.empty())
    {
      for (auto it = out.rows.rbegin(); it != out.rows.rend(); ++it)
      {
        if (!it->error.empty())
          continue;
        if ((it->kappa0 < 0.0) != (row.kappa0 < 0.0))
        {
          ++sign_changes;
          if (!out.bracket)
            out.bracket = std::make_pair(it->lambda, lambda);
        }
        break;
      }
    }
    out.rows.push_back(row);
  }
  out.monotone = sign_changes <= 1;

  if (out.bracket)
  {
    double lo = out.bracket->first, hi = out.bracket->second;
    double klo = *kappa0(lo, nullptr);
    double mid = 0.5 * (lo + hi), kmid = 0.0;
    for (int it = 0; it < 200; ++it)
    {
      mid = 0.5 * (lo + hi);
      kmid = *kappa0(mid, nullptr);
      if (std::abs(kmid) < tolerance || hi - lo < 1e-15 * hi)
        break;
      if ((kmid < 0.0) == (klo < 0.0))
      {
        lo = mid;
        klo = kmid;
      }
      else
        hi = mid;
    }
    out.lambda_star = mid;
    out.kappa0_at_star = kmid;
  }
  return out;
}

double exterior_consistency(const FormMatrices& F, double r_chi, RieszConvention c,
                            const MassLoads* loads)
{
  require_standard(c);
  const Params& p = F.params;
  const RadialGrid& grid = *F.grid;
  MassLoads own;
  if (!loads || loads->r_chi != r_chi)
  {
    own = assemble_mass_loads(p, grid, F.quad, r_chi, c);
    loads = &own;
  }
  const double t_ns = riesz_constant(p, c);
  const AngularKernel k(p, F.quad);
  const int N = p.dim;
  const double pref = radial_form_prefactor(p);
  const QuadSpec& q = F.quad;
  const Rule gj = gauss_jacobi_folded(std::max(q.gauss_order, 10), 2.0 * p.s - 1.0);
  const Rule gl = gauss_legendre(std::max(q.gauss_order, 10));

  // chi R on [0, 2 r_chi]: Jacobi panel at the origin, then geometric panels
  std::vector<std::pair<double, double>> rpts;
  {
    const double a0 = 0.125 * r_chi;
    for (std::size_t i = 0; i < gj.size(); ++i)
    {
      const double r = a0 * gj.x[i];
      rpts.emplace_back(r, a0 * gj.w[i] * t_ns * std::pow(r, 2.0 * p.s - N) * std::pow(r, N - 1));
    }
    std::vector<double> cuts{a0, 0.25 * r_chi, 0.5 * r_chi, r_chi};
    for (int j = 1; j <= 8; ++j)
      cuts.push_back(r_chi * (1.0 + j / 8.0));
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
    {
      const double a = cuts[j], b = cuts[j + 1];
      for (std::size_t i = 0; i < gl.size(); ++i)
      {
        const double r = a + (b - a) * gl.x[i];
        rpts.emplace_back(r, (b - a) * gl.w[i] * smooth_cutoff(r, r_chi) * t_ns *
                                 std::pow(r, 2.0 * p.s - N) * std::pow(r, N - 1));
      }
    }
  }

  double worst = 0.0;
  for (int i = 1; i < grid.dofs(); ++i)
  {
    if (!(grid.node(i - 1) > 2.0 * r_chi * 1.05))
      continue;
    // a_full(chi R, phi_i) = -2 C int int chi R(r) phi_i(rho) k r^{N-1} rho^{N-1}
    double cross = 0.0;
    for (int e = i - 1; e <= i; ++e)
    {
      if (e >= grid.elements())
        continue;
      const double a = grid.node(e), h = grid.width(e);
      for (std::size_t j = 0; j < gl.size(); ++j)
      {
        const double x = gl.x[j];
        const double rho = a + h * x;
        const double phi = (e == i - 1) ? x : 1.0 - x;
        double inner = 0.0;
        for (const auto& [r, w] : rpts)
          inner += w * k(r, rho, rho - r);
        cross += h * gl.w[j] * phi * std::pow(rho, N - 1) * inner;
      }
    }
    cross *= -2.0 * pref;
    const double ref = loads->exterior[i];
    worst = std::max(worst, std::abs(cross - ref) / std::abs(ref));
  }
  return worst;
}

}  // namespace fracsob
