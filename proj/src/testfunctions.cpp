// SPDX-License-Identifier: Apache-2.0
#include "fracsob/testfunctions.hpp"

#include <algorithm>
#include <cmath>

namespace fracsob
{

double chi_k(double t, double k)
{
  if (!(k >= 2.0))
    throw DomainError("cutoff index k must be >= 2");
  if (t < 0.0)
    throw DomainError("cutoff argument must be nonnegative");
  const double lo = 1.0 / (k * k), hi = 1.0 / k;
  if (t <= lo)
    return 0.0;
  if (t >= hi)
    return 1.0;
  return std::log(k * k * t) / std::log(k);
}

double smooth_step(double x)
{
  if (x <= 0.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smooth_cutoff(double r, double a)
{
  return 1.0 - smooth_step((r - a) / a);
}

RadialFunction boundary_cutoff(int k, std::shared_ptr<const RadialGrid> grid)
{
  const double kk = k;
  if (k < 2)
    throw DomainError("cutoff index k must be >= 2");
  const int M = grid->elements();
  if (grid->node(M - 1) < 1.0 - 1.0 / (kk * kk))
    throw DomainError("grid does not resolve the boundary layer 1/k^2 for k=" +
                      std::to_string(k) + "; refine toward r = 1");
  return RadialFunction::interpolate(std::move(grid),
                                     [kk](double r) { return chi_k(1.0 - r, kk); });
}

Bubble::Bubble(double e, const Params& p) : eps(e), params(p)
{
  p.validate_subcritical_dimension();
  if (!(e > 0.0))
    throw DomainError("bubble scale must be positive");
  gamma0_ = bubble_normalization(p);
  half_m_ = 0.5 * (p.dim - 2.0 * p.s);
}

double Bubble::operator()(double r) const
{
  return gamma0_ * std::pow(eps / (eps * eps + r * r), half_m_);
}

double Bubble::difference(double r, double rho, double d) const
{
  // u(hi)/u(lo) = (1 + (hi^2 - lo^2)/(eps^2 + lo^2))^{-m/2}, hi^2 - lo^2 = d (r + rho)
  const double lo = std::min(r, rho);
  const double rise =
      (*this)(lo) * std::expm1(-half_m_ * std::log1p(d * (r + rho) / (eps * eps + lo * lo)));
  return r >= rho ? rise : -rise;
}

double bubble_eval(const Bubble& b, double r)
{
  return b(r);
}

double whole_space_bilinear(const Params& p, const std::vector<double>& breaks,
                            const std::function<double(double, double, double)>& df,
                            const std::function<double(double, double, double)>& dg,
                            const QuadSpec& q)
{
  const AngularKernel k(p, q);
  const int N = p.dim;
  const PairIntegrand F = [&](double r, double rho, double d) {
    const double a = df(r, rho, d);
    if (a == 0.0)
      return 0.0;
    const double b = dg(r, rho, d);
    if (b == 0.0)
      return 0.0;
    return a * b * k(r, rho, d) * std::pow(r * rho, N - 1);
  };
  return radial_form_prefactor(p) * integrate_panel_pairs(breaks, F, p.s, q);
}

std::vector<double> whole_space_breaks(double R)
{
  std::vector<double> b;
  for (int i = 0; i <= 8; ++i)
    b.push_back(i / 8.0);
  while (b.back() * 1.5 < R)
    b.push_back(b.back() * 1.5);
  if (b.back() < R)
    b.push_back(R);
  return b;
}

SharpConstantReport sharp_constant(const Params& p, const QuadSpec& q, double eps,
                                   double truncation)
{
  p.validate_subcritical_dimension();
  q.validate();
  const Bubble u(eps, p);
  const double m = p.dim - 2.0 * p.s;
  const double mu = std::min(m, 2.0 * p.s);
  double R = truncation > 0.0 ? truncation : eps * std::max(1e6, std::pow(1e8, 1.0 / mu));
  const std::vector<double> breaks = whole_space_breaks(R);
  R = breaks.back();

  const AngularKernel k(p, q);
  const int N = p.dim;
  const PairIntegrand F = [&](double r, double rho, double d) {
    const double du = u.difference(r, rho, d);
    return du * du * k(r, rho, d) * std::pow(r * rho, N - 1);
  };
  std::vector<double> E = integrate_panel_pairs_cumulative(breaks, F, p.s, q);
  const double C = radial_form_prefactor(p);
  for (auto& e : E)
    e *= C;

  // E(R) ~ E_inf - c R^{-mu}: extrapolate with two pairs of radii.
  auto extrapolate = [&](std::size_t j2, std::size_t j1, double& tail) {
    const double R2 = breaks[j2 + 1], R1 = breaks[j1 + 1];
    const double qq = std::pow(R1 / R2, mu);
    tail = (E[j2] - E[j1]) * qq / (1.0 - qq);
    return E[j2] + tail;
  };
  const std::size_t n = E.size();
  const std::size_t step = 12;  // ratio 1.5^12 ~ 130 between radii
  if (n < 3 * step + 2)
    throw QuadratureError("truncation radius too small for tail extrapolation");
  double tail_outer = 0.0, tail_inner = 0.0;
  const double E_outer = extrapolate(n - 1, n - 1 - step, tail_outer);
  const double E_inner = extrapolate(n - 1 - step, n - 1 - 2 * step, tail_inner);

  // ||u||_{2*}^{2*} with the far-field term gamma_0^{2*} eps^{...} R^{-N} / N
  const double pc = critical_exponent(p);
  const Rule gl = gauss_legendre(std::max(q.gauss_order, 8));
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    mass += integrate(gl, breaks[i], breaks[i + 1],
                      [&](double r) { return std::pow(u(r), pc) * std::pow(r, N - 1); });
  const double g0 = bubble_normalization(p);
  mass += std::pow(g0, pc) * std::pow(eps, N) * std::pow(R, -N) / N;
  mass *= sphere_area(N - 1);
  const double norm = std::pow(mass, 1.0 / pc);

  SharpConstantReport rep;
  rep.energy = E_outer;
  rep.norm = norm;
  rep.tail = tail_outer;
  rep.tail_rel = std::abs(tail_outer) / std::abs(E_outer);
  rep.truncation = R;
  rep.tail_exponent = mu;
  rep.value = E_outer / (norm * norm);
  rep.value_inner = E_inner / (norm * norm);
  if (!(rep.tail_rel < 1e-5))
    throw QuadratureError("far-field tail of the bubble energy is not below 1e-5 relative (" +
                          std::to_string(rep.tail_rel) + ")");
  (void)tail_inner;
  return rep;
}

double sharp_constant_estimate(const Params& p, const QuadSpec& q)
{
  return sharp_constant(p, q).value;
}

EulerLagrangeReport bubble_euler_lagrange(const Params& p, const QuadSpec& q, double eps,
                                          double S, const std::vector<double>& centers)
{
  const Bubble u(eps, p);
  const int N = p.dim;
  const double pc = critical_exponent(p);
  const double R = 1048576.0 * eps;
  EulerLagrangeReport rep;
  rep.centers = centers;
  for (double c : centers)
  {
    const double w = 0.5 * c;
    auto phi = [c, w](double r) { return std::max(0.0, 1.0 - std::abs(r - c) / w); };
    std::vector<double> breaks = whole_space_breaks(R);
    for (double x : {c - w, c, c + w})
      breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 breaks.end());
    const double lhs_sq = whole_space_bilinear(
        p, breaks, [&](double r, double rho, double d) { return u.difference(r, rho, d); },
        [&](double r, double rho, double) { return phi(r) - phi(rho); }, q);

    const Rule gl = gauss_legendre(std::max(q.gauss_order, 8));
    double pair = 0.0, load = 0.0;
    for (const auto& [a, b] : {std::pair{c - w, c}, std::pair{c, c + w}})
    {
      pair += integrate(gl, a, b, [&](double r) { return u(r) * phi(r) * std::pow(r, N - 1); });
      load += integrate(gl, a, b, [&](double r) {
        return std::pow(u(r), pc - 1.0) * phi(r) * std::pow(r, N - 1);
      });
    }
    // pairs with one radius beyond R: k ~ |S^{N-1}| rho^{-N-2s}
    const double omega = sphere_area(N - 1);
    const double tail =
        2.0 * radial_form_prefactor(p) * pair * omega * std::pow(R, -2.0 * p.s) / (2.0 * p.s);
    const double lhs = lhs_sq + tail;
    const double rhs = S * omega * load;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.max_rel = std::max(rep.max_rel, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return rep;
}

RadialFunction truncated_bubble(const Params& p, double eps, double plateau,
                                std::shared_ptr<const RadialGrid> grid)
{
  const Bubble u(eps, p);
  if (!(plateau > 0.0 && plateau <= 0.5))
    throw DomainError("cutoff plateau must lie in (0, 1/2]");
  return RadialFunction::interpolate(
      std::move(grid), [&](double r) { return smooth_cutoff(r, plateau) * u(r); });
}

RadialFunction mass_corrected_family(const Params& p, double eps, double r_cut,
                                     const RadialFunction& kappa,
                                     std::shared_ptr<const RadialGrid> grid, RieszConvention conv)
{
  p.validate();
  if (!(2.0 * p.s < p.dim && p.dim < 4.0 * p.s))
    throw DomainError("mass-corrected family needs 2s < N < 4s");
  if (!(r_cut > 0.0 && r_cut < 0.25))
    throw DomainError("cutoff radius must lie in (0, 1/4)");
  if (!(eps > 0.0 && eps <= 0.25 * r_cut))
    throw DomainError("bubble scale must satisfy 0 < eps <= r_cut / 4");
  const Bubble u(eps, p);
  const double weight = std::pow(eps, 0.5 * (p.dim - 2.0 * p.s)) * mass_coefficient(p, conv);
  return RadialFunction::interpolate(std::move(grid), [&](double r) {
    return smooth_cutoff(r, r_cut) * u(r) + weight * kappa(r);
  });
}

}  // namespace fracsob
