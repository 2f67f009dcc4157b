// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <map>

#include "fracsob/forms.hpp"
#include "fracsob/testfunctions.hpp"

using namespace fracsob;
using doctest::Approx;

namespace
{

// S(N,s) = 2^{2s} pi^s Gamma((N+2s)/2)/Gamma((N-2s)/2) (Gamma(N/2)/Gamma(N))^{2s/N}
double exact_sharp_constant(int N, double s)
{
  return std::pow(2.0, 2.0 * s) * std::pow(M_PI, s) * std::tgamma(0.5 * N + s) / std::tgamma(0.5 * N - s) *
         std::pow(std::tgamma(0.5 * N) / std::tgamma(N), 2.0 * s / N);
}

}  // namespace

TEST_CASE("logarithmic cutoff")
{
  for (double k : {2.0, 4.0, 10.0, 1000.0})
  {
    CHECK(chi_k(1.0 / (k * k), k) == Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(chi_k(1.0 / k, k) == Approx(1.0).epsilon(1e-15));
    CHECK(chi_k(5.0, k) == 1.0);
    CHECK(chi_k(0.0, k) == 0.0);
    for (double t : {1.0 / (k * k), 1.0 / k})
    {
      const double h = 1e-16 * t;
      CHECK(std::abs(chi_k(t + h, k) - chi_k(t - h, k)) < 1e-14);
    }
    double prev = 0.0;
    for (double t = 0.0; t < 1.0; t += 1e-3)
    {
      CHECK(chi_k(t, k) >= prev);
      prev = chi_k(t, k);
    }
  }
  CHECK(chi_k(0.125, 4.0) == Approx(0.5).epsilon(1e-15));
  CHECK(exact_sharp_constant(3, 0.6) == Approx(3.22877975076082).epsilon(1e-13));
}

TEST_CASE("smooth cutoff")
{
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == Approx(0.5));
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_cutoff(0.2, 0.25) == 1.0);
  CHECK(smooth_cutoff(0.25, 0.25) == 1.0);
  CHECK(smooth_cutoff(0.5, 0.25) == 0.0);
  CHECK(smooth_cutoff(0.375, 0.25) == Approx(0.5));
  // C^1 at the knots: one-sided difference quotients vanish
  const double h = 1e-6;
  CHECK(std::abs(smooth_cutoff(0.25 + h, 0.25) - 1.0) / h < 1e-8);
  CHECK(smooth_cutoff(0.5 - h, 0.25) / h < 1e-8);
}

TEST_CASE("boundary cutoff on the ball")
{
  auto g = std::make_shared<const RadialGrid>(RadialGrid::graded(128, 2.0));
  for (int k : {4, 8, 16, 64})
  {
    const RadialFunction u = boundary_cutoff(k, g);
    CHECK(u(1.0) == 0.0);
    for (int i = 0; i < g->dofs(); ++i)
    {
      CHECK(u.values[i] == Approx(chi_k(1.0 - g->node(i), k)).epsilon(1e-15));
      if (g->node(i) <= 1.0 - 1.0 / k)
        CHECK(u.values[i] == 1.0);
    }
  }
  // L^2 norm tends to |B|^{1/2}
  const Params p{2, 0.75};
  double prev = 0.0;
  for (int k : {4, 16, 64})
  {
    const double n = lp_norm(boundary_cutoff(k, g), 2.0, p);
    CHECK(n > prev);
    CHECK(n < std::sqrt(M_PI));
    prev = n;
  }
  CHECK(prev == Approx(std::sqrt(M_PI)).epsilon(2e-2));
  CHECK_THROWS_AS(boundary_cutoff(64, std::make_shared<const RadialGrid>(RadialGrid::graded(16, 2.0))),
                  DomainError);
  CHECK_THROWS_AS(boundary_cutoff(1, g), DomainError);
}

TEST_CASE("bubble")
{
  for (const Params p : {Params{2, 0.75}, Params{3, 0.6}, Params{1, 0.3}})
  {
    const double g0 = bubble_normalization(p);
    const double m = 0.5 * (p.dim - 2.0 * p.s);
    const Bubble b1(1.0, p), b2(0.3, p);
    CHECK(bubble_eval(b1, 0.0) == Approx(g0).epsilon(1e-15));
    CHECK(bubble_eval(b2, 0.0) == Approx(g0 * std::pow(0.3, -m)).epsilon(1e-14));
    CHECK(bubble_eval(b1, 1.0) == Approx(g0 * std::pow(2.0, -m)).epsilon(1e-14));
    double prev = INFINITY;
    for (double r = 0.0; r < 20.0; r += 0.1)
    {
      const double v = b2(r);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    const double r = 0.7, rho = 0.7 - 1e-9;
    CHECK(b2.difference(r, rho, r - rho) == Approx(b2(r) - b2(rho)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(Bubble(0.0, Params{2, 0.75}), DomainError);
  CHECK_THROWS_AS(Bubble(1.0, Params{1, 0.75}), DomainError);
}

TEST_CASE("whole-space quotient of the bubble")
{
  const QuadSpec q;
  std::map<std::pair<int, double>, double> got;
  for (const Params p : {Params{3, 0.6}, Params{2, 0.75}, Params{3, 0.8}, Params{2, 0.9}})
  {
    const SharpConstantReport r1 = sharp_constant(p, q, 1.0);
    const SharpConstantReport rh = sharp_constant(p, q, 0.5);
    const double exact = exact_sharp_constant(p.dim, p.s);
    CHECK(r1.value > 0.0);
    CHECK(rh.value == Approx(r1.value).epsilon(1e-3));
    CHECK(r1.value_inner == Approx(r1.value).epsilon(1e-4));
    CHECK(r1.tail_rel < 1e-5);
    CHECK(r1.value == Approx(exact).epsilon(1e-4));
    CHECK(r1.norm == Approx(1.0).epsilon(1e-6));
    got[{p.dim, p.s}] = r1.value;
  }
  CHECK(got[{3, 0.6}] != Approx(got[{3, 0.8}]).epsilon(1e-2));
  CHECK(sharp_constant_estimate(Params{3, 0.6}, q) == Approx(got[{3, 0.6}]).epsilon(1e-12));
  CHECK_THROWS_AS(sharp_constant(Params{1, 0.6}, q), DomainError);
}

TEST_CASE("bubble Euler-Lagrange residual")
{
  const QuadSpec q;
  for (const Params p : {Params{3, 0.6}, Params{2, 0.75}})
  {
    const double S = sharp_constant_estimate(p, q);
    const EulerLagrangeReport rep = bubble_euler_lagrange(p, q, 1.0, S, {0.25, 0.5, 1.0, 2.0, 4.0});
    CHECK(rep.lhs.size() == 5);
    CHECK(rep.max_rel < 2e-2);
    for (double v : rep.rhs)
      CHECK(v > 0.0);
  }
}

TEST_CASE("mass-corrected family")
{
  const Params p{2, 0.75};
  auto g = std::make_shared<const RadialGrid>(RadialGrid::two_sided(256, 4.0));
  const RadialFunction zero(g, Eigen::VectorXd::Zero(g->dofs()));
  const RadialFunction kappa = RadialFunction::interpolate(g, [](double r) { return 0.3 * (1.0 - r * r); });
  const double eps = 0.02, rc = 0.2;
  const RadialFunction v0 = mass_corrected_family(p, eps, rc, zero, g);
  const RadialFunction tb = truncated_bubble(p, eps, rc, g);
  CHECK((v0.values - tb.values).norm() == 0.0);
  const Bubble b(eps, p);
  for (int i = 0; i < g->dofs(); ++i)
    CHECK(v0.values[i] == Approx(smooth_cutoff(g->node(i), rc) * b(g->node(i))).epsilon(1e-14));

  const RadialFunction v = mass_corrected_family(p, eps, rc, kappa, g);
  const double shift = std::pow(eps, 0.5 * (p.dim - 2.0 * p.s)) * mass_coefficient(p);
  CHECK(v.values[0] == Approx(b(0.0) + shift * 0.3).epsilon(1e-14));
  for (int i = 0; i < g->dofs() && g->node(i) <= rc; ++i)
    CHECK(v.values[i] - v0.values[i] == Approx(shift * kappa.values[i]).epsilon(1e-12));
  CHECK(v(1.0) == 0.0);

  CHECK_THROWS_AS(mass_corrected_family(Params{3, 0.6}, eps, rc, zero, g), DomainError);
  CHECK_THROWS_AS(mass_corrected_family(Params{2, 0.45}, eps, rc, zero, g), DomainError);
  CHECK_THROWS_AS(mass_corrected_family(p, 0.1, rc, zero, g), DomainError);
  CHECK_THROWS_AS(mass_corrected_family(p, eps, 0.3, zero, g), DomainError);
}

TEST_CASE("boundary cutoffs lower the regional quotient as s decreases")
{
  // min over k of the quotient at chi_k(1 - r), N = 2, graded mesh resolving 1/64^2
  auto g = std::make_shared<const RadialGrid>(RadialGrid::graded(256, 2.0));
  std::vector<double> mins;
  for (double s : {0.9, 0.75, 0.6, 0.51})
  {
    const Params p{2, s};
    AssemblyOptions opt;
    opt.killing = false;
    const FormMatrices F = assemble_forms(p, g, QuadSpec{}, Potential::constant(0.0), opt);
    double best = INFINITY;
    for (int k : {4, 8, 16, 32, 64})
      best = std::min(best, rayleigh_quotient(boundary_cutoff(k, g), F));
    MESSAGE("s=" << s << " min quotient " << best);
    mins.push_back(best);
  }
  for (std::size_t i = 1; i < mins.size(); ++i)
    CHECK(mins[i] < mins[i - 1]);
}
