// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fracsob/green_mass.hpp"

using namespace fracsob;
using doctest::Approx;

namespace
{

// With h = 0 the mass at the origin is minus the s-harmonic extension of the Riesz
// potential, weighted by the exit distribution of the ball from its center:
//   kappa(0) = -2 Gamma(N/2) / (2^{2s} pi^{N/2} Gamma(s)^2 (N - 2s)).
double exit_distribution_mass(int N, double s)
{
  return -2.0 * std::tgamma(0.5 * N) /
         (std::pow(2.0, 2.0 * s) * std::pow(M_PI, 0.5 * N) * std::pow(std::tgamma(s), 2) * (N - 2.0 * s));
}

std::shared_ptr<const RadialGrid> graded(int M) { return std::make_shared<const RadialGrid>(RadialGrid::graded(M, 2.0)); }

}  // namespace

TEST_CASE("riesz potential")
{
  const Params p{2, 0.75};
  const double t = riesz_constant(p);
  CHECK(riesz_potential(p, 1.0) == Approx(t).epsilon(1e-15));
  CHECK(riesz_potential(p, 0.5) == Approx(t * std::pow(0.5, -0.5)).epsilon(1e-15));
  for (const Params q : {Params{3, 0.6}, Params{2, 0.75}, Params{5, 0.2}})
    CHECK(riesz_potential(q, 0.3) / riesz_potential(q, 0.6) == Approx(std::pow(2.0, q.dim - 2.0 * q.s)).epsilon(1e-14));
  CHECK(riesz_potential(p, 0.5, RieszConvention::Paper) == Approx(riesz_constant(p, RieszConvention::Paper) * std::pow(0.5, -0.5)));
  CHECK_THROWS_AS(riesz_potential(p, 0.0), DomainError);
  CHECK_THROWS_AS(riesz_potential(Params{1, 0.75}, 0.5), DomainError);
}

TEST_CASE("mass without potential")
{
  CHECK(exit_distribution_mass(2, 0.75) == Approx(-0.299776465089328).epsilon(1e-13));
  const QuadSpec q;
  for (const Params p : {Params{2, 0.75}, Params{2, 0.6}, Params{3, 0.8}})
  {
    const MassResult m = solve_mass(p, Potential::constant(0.0), graded(128), q, 0.25);
    CHECK(m.kappa0 < 0.0);
    CHECK(m.kappa0 == Approx(exit_distribution_mass(p.dim, p.s)).epsilon(1e-3));
    CHECK(m.residual < 1e-8);
    CHECK(m.field(1.0) == 0.0);
    CHECK(m.field.values[0] == m.kappa0);
    CHECK(m.convention == RieszConvention::Standard);
  }
}

TEST_CASE("mass under refinement and cutoff changes")
{
  const Params p{2, 0.75};
  const QuadSpec q;
  const double k128 = solve_mass(p, Potential::constant(0.0), graded(128), q, 0.25).kappa0;
  const double k256 = solve_mass(p, Potential::constant(0.0), graded(256), q, 0.25).kappa0;
  CHECK(std::abs(k256 - k128) < 1e-2 * std::abs(k256));

  const Params p7{2, 0.7};
  const FormMatrices F = assemble_forms(p7, graded(128), q);
  const double lambda0 = 0.5 * coercivity_limit(F);
  FormMatrices Fl = F;
  set_potential(Fl, Potential::constant(-lambda0));
  const MassResult a = solve_mass(Fl, 0.2), b = solve_mass(Fl, 0.3);
  CHECK(std::abs(a.kappa0 - b.kappa0) < 2e-2 * std::abs(a.kappa0));
  for (double rc : {0.15, 0.35})
    CHECK(std::abs(solve_mass(Fl, rc).kappa0 - a.kappa0) < 2e-2 * std::abs(a.kappa0));
  CHECK(a.residual < 1e-8);
  CHECK(a.h_used(0.5) == -lambda0);

  CHECK(exterior_consistency(F, 0.2) < 1e-4);
  CHECK(exterior_consistency(Fl, 0.25) < 1e-4);
}

TEST_CASE("mass along h = -lambda")
{
  const Params p{2, 0.75};
  const QuadSpec q;
  const FormMatrices F = assemble_forms(p, graded(128), q);
  const double limit = coercivity_limit(F);
  CHECK(limit > 0.0);
  const double mu = smallest_generalized_eigenvalue(F.A_reg + F.K, F.M2);
  CHECK(limit == Approx(mu).epsilon(1e-10));

  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i)
    grid.push_back(0.98 * limit * i / 10.0);
  const CrossingResult c = mass_crossing(F, grid, 0.25);
  REQUIRE(c.rows.size() == grid.size());
  CHECK(c.rows.front().kappa0 < 0.0);
  for (std::size_t i = 1; i < c.rows.size(); ++i)
    CHECK(c.rows[i].kappa0 > c.rows[i - 1].kappa0);
  CHECK(c.monotone);
  REQUIRE(c.lambda_star.has_value());
  CHECK(c.bracket->first < *c.lambda_star);
  CHECK(*c.lambda_star < c.bracket->second);
  CHECK(std::abs(c.kappa0_at_star) < 1e-8);
  CHECK(c.coercivity_limit == limit);

  const CrossingResult none = mass_crossing(F, {}, 0.25);
  CHECK(none.rows.empty());
  CHECK_FALSE(none.lambda_star.has_value());

  // past the coercivity limit the row carries an error instead of a value
  const CrossingResult bad = mass_crossing(F, {0.5 * limit, 1.1 * limit}, 0.25);
  CHECK(bad.rows[0].error.empty());
  CHECK_FALSE(bad.rows[1].error.empty());

  FormMatrices Fbad = F;
  set_potential(Fbad, Potential::constant(-1.1 * limit));
  CHECK_THROWS_AS(solve_mass(Fbad, 0.25), DomainError);
}

TEST_CASE("mass input validation")
{
  const Params p{2, 0.75};
  const QuadSpec q;
  const FormMatrices F = assemble_forms(p, graded(64), q);
  CHECK_THROWS_AS(solve_mass(F, 0.25, RieszConvention::Paper), DomainError);
  CHECK_THROWS_AS(solve_mass(F, 0.0), DomainError);
  CHECK_THROWS_AS(solve_mass(F, 0.5), DomainError);
  AssemblyOptions opt;
  opt.killing = false;
  const FormMatrices Fr = assemble_forms(p, graded(64), q, Potential::constant(0.0), opt);
  CHECK_THROWS_AS(solve_mass(Fr, 0.25), DomainError);
  CHECK_THROWS_AS(solve_mass(Params{1, 0.75}, Potential::constant(0.0), graded(64), q, 0.25), DomainError);
}

TEST_CASE("pointwise exterior term")
{
  // (-Delta)^s((chi-1)R) is smooth inside the plateau and finite across the transition
  const Params p{3, 0.6};
  const QuadSpec q;
  double prev = fractional_laplacian_exterior_riesz(p, 0.0, 0.25, q);
  CHECK(std::isfinite(prev));
  for (double t : {0.05, 0.1, 0.2, 0.3, 0.45, 0.7, 0.95})
  {
    const double v = fractional_laplacian_exterior_riesz(p, t, 0.25, q);
    CHECK(std::isfinite(v));
  }
  // inside the plateau (chi - 1) R <= 0 vanishes near x, so the value is a positive tail integral
  CHECK(fractional_laplacian_exterior_riesz(p, 0.1, 0.25, q) > 0.0);
}
