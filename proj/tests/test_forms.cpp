// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "fracsob/forms.hpp"
#include "fracsob/testfunctions.hpp"
#include "support/whole_space_oracle.hpp"

using namespace fracsob;
using doctest::Approx;

namespace
{

std::shared_ptr<const RadialGrid> graded(int M) { return std::make_shared<const RadialGrid>(RadialGrid::graded(M, 2.0)); }

// plateau of height 1 on [0, 1 - delta], linear down to 0 at r = 1, plus a smooth wiggle
struct Plateau
{
  double delta, a, b;
  double operator()(double r) const
  {
    const double base = std::min(1.0, (1.0 - r) / delta);
    return base * (1.0 + a * std::cos(std::numbers::pi * r) + b * r * r);
  }
};

}  // namespace

TEST_CASE("potential")
{
  const Potential z;
  CHECK(z(0.3) == 0.0);
  CHECK(z.is_constant());
  const Potential c = Potential::constant(-2.5);
  CHECK(c(0.9) == -2.5);
  CHECK(c.bound() == 2.5);
  const Potential h = Potential::from_samples({0.0, 0.5, 1.0}, {1.0, 3.0, -1.0});
  CHECK(h(0.25) == Approx(2.0));
  CHECK(h(0.75) == Approx(1.0));
  CHECK(h(2.0) == -1.0);
  CHECK(h.bound() == 3.0);
  CHECK_THROWS_AS(Potential::from_samples({0.0, 0.5}, {1.0}), DomainError);
  CHECK_THROWS_AS(Potential::from_samples({0.5, 0.2}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(Potential::from_samples({0.0, 0.5}, {1.0, INFINITY}), DomainError);

  const std::string path = "potential_test.txt";
  {
    std::ofstream out(path);
    out << "# radius value\n0.0 1.5\n0.5  2.5 # mid\n\n1.0 0.5\n";
  }
  const Potential f = Potential::from_file(path);
  CHECK(f.radii().size() == 3);
  CHECK(f(0.25) == Approx(2.0));
  {
    std::ofstream out(path);
    out << "0.0 abc\n";
  }
  CHECK_THROWS_AS(Potential::from_file(path), DomainError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(Potential::from_file("does/not/exist.txt"), DomainError);
}

TEST_CASE("lp norms")
{
  const Params p{2, 0.75};
  auto g = graded(256);
  const RadialFunction u = RadialFunction::interpolate(g, [](double r) { return 1.0 - r * r; });
  CHECK(lp_norm(u, 2.0, p) == Approx(std::sqrt(std::numbers::pi / 3.0)).epsilon(1e-4));
  RadialFunction z(g, Eigen::VectorXd::Zero(g->dofs()));
  CHECK(lp_norm(z, 3.0, p) == 0.0);
  RadialFunction v(g, -3.0 * u.values);
  CHECK(lp_norm(v, 5.0, p) == Approx(3.0 * lp_norm(u, 5.0, p)).epsilon(1e-14));
  CHECK_THROWS_AS(lp_norm(u, 0.5, p), DomainError);
}

TEST_CASE("form matrices")
{
  const Params p{2, 0.75};
  auto g = graded(64);
  const FormMatrices F = assemble_forms(p, g, QuadSpec{});
  for (const Eigen::MatrixXd* m : {&F.A_reg, &F.K, &F.M2, &F.Mh})
    CHECK((*m - m->transpose()).norm() <= 1e-14 * std::max(1.0, m->norm()));
  CHECK(is_coercive(F.A_reg + F.K));
  CHECK(F.Mh.norm() == 0.0);

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial)
  {
    Eigen::VectorXd x(g->dofs());
    for (auto& xi : x)
      xi = nd(rng);
    const RadialFunction u(g, x);
    const double reg = regional_energy(u, F), full = full_energy(u, F);
    CHECK(reg >= 0.0);
    CHECK(full > reg);
    CHECK(full == Approx(reg + x.dot(F.K * x)).epsilon(1e-14));
    CHECK(regional_energy(RadialFunction(g, 2.0 * x), F) == Approx(4.0 * reg).epsilon(1e-14));
  }
  const RadialFunction zero(g, Eigen::VectorXd::Zero(g->dofs()));
  CHECK(regional_energy(zero, F) == 0.0);
  CHECK(full_energy(zero, F) == 0.0);

  const RadialFunction other = RadialFunction::interpolate(graded(32), [](double r) { return 1.0 - r; });
  CHECK_THROWS_AS(regional_energy(other, F), DomainError);
  CHECK_THROWS_AS(rayleigh_quotient(zero, F), DomainError);
}

TEST_CASE("regional energy self-convergence")
{
  const Params p{2, 0.75};
  double prev = 0.0;
  for (int M : {256, 512})
  {
    auto g = graded(M);
    AssemblyOptions opt;
    opt.killing = false;
    const FormMatrices F = assemble_forms(p, g, QuadSpec{}, Potential::constant(0.0), opt);
    const double e = regional_energy(RadialFunction::interpolate(g, [](double r) { return 1.0 - r; }), F);
    if (prev > 0.0)
      CHECK(std::abs(e - prev) < 5e-3 * e);
    prev = e;
  }
}

TEST_CASE("full energy against whole-space quadrature")
{
  const Params p{2, 0.75};
  const double R = 0.5;
  auto f = [R](double r) { return r >= R ? 0.0 : std::pow(1.0 - r * r / (R * R), 6); };
  auto g = graded(256);
  const FormMatrices F = assemble_forms(p, g, QuadSpec{});
  const RadialFunction u = RadialFunction::interpolate(g, f);
  const double ref = oracle::WholeSpace{p.dim, p.s, R, f}.energy();
  CHECK(full_energy(u, F) == Approx(ref).epsilon(1e-3));
  CHECK(full_energy(u, F) - regional_energy(u, F) > 0.0);
}

TEST_CASE("rayleigh quotient")
{
  const Params p{3, 0.6};
  auto g = graded(64);
  FormMatrices F = assemble_forms(p, g, QuadSpec{});
  const RadialFunction u = RadialFunction::interpolate(g, [](double r) { return std::cos(1.5 * r) - std::cos(1.5); });
  const double q = rayleigh_quotient(u, F);
  CHECK(q > 0.0);
  CHECK(rayleigh_quotient(RadialFunction(g, 2.0 * u.values), F) == Approx(q).epsilon(1e-12));
  CHECK(rayleigh_quotient(RadialFunction(g, -0.01 * u.values), F) == Approx(q).epsilon(1e-12));
  const double n = lp_norm(u, critical_exponent(p), p);
  CHECK(q == Approx(u.values.dot(F.A_reg * u.values) / (n * n)).epsilon(1e-13));

  // h = -lambda beyond the first eigenvalue of (A_reg, M2)
  const double mu = smallest_generalized_eigenvalue(F.A_reg, F.M2);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(F.A_reg, F.M2);
  CHECK(es.eigenvalues()[0] == Approx(mu).epsilon(1e-10));
  const RadialFunction phi(g, es.eigenvectors().col(0));
  set_potential(F, Potential::constant(-1.1 * mu));
  CHECK(rayleigh_quotient(phi, F) < 0.0);
  CHECK_THROWS_AS(require_coercive(F), DomainError);
  set_potential(F, Potential::constant(-0.9 * mu));
  CHECK(rayleigh_quotient(phi, F) > 0.0);
  CHECK_NOTHROW(require_coercive(F));
}

TEST_CASE("killing bound for functions supported in a smaller ball")
{
  const Params p{2, 0.75};
  auto g = graded(128);
  const FormMatrices F = assemble_forms(p, g, QuadSpec{});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (double rho : {0.3, 0.6, 0.85})
    for (int trial = 0; trial < 10; ++trial)
    {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(g->dofs());
      for (int i = 0; i < g->dofs() && g->node(i) <= rho; ++i)
        x[i] = ud(rng);
      const RadialFunction u(g, x);
      const double gap = full_energy(u, F) - regional_energy(u, F);
      // support of u reaches one node past rho
      const int last = g->locate(rho) + 1;
      const double bound = killing_coefficient(p) * std::pow(1.0 - g->node(last), -2.0 * p.s) * x.dot(F.M2 * x);
      CHECK(gap > 0.0);
      CHECK(gap <= bound);
    }
}

TEST_CASE("Sobolev-type bound with a stable lower-order constant")
{
  const Params p{3, 0.6};
  const QuadSpec q;
  const double S = sharp_constant_estimate(p, q);
  const double qexp = critical_exponent(p);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> delta(0.05, 0.6), coef(-0.4, 0.4);
  std::vector<Plateau> family;
  for (int i = 0; i < 200; ++i)
    family.push_back({delta(rng), coef(rng), coef(rng)});

  std::vector<double> fitted;
  for (int M : {128, 256})
  {
    auto g = graded(M);
    AssemblyOptions opt;
    opt.killing = false;
    const FormMatrices F = assemble_forms(p, g, q, Potential::constant(0.0), opt);
    double C = 0.0;
    for (const Plateau& f : family)
    {
      const RadialFunction u = RadialFunction::interpolate(g, f);
      const double n = lp_norm(u, qexp, p);
      C = std::max(C, (S * n * n - regional_energy(u, F)) / u.values.dot(F.M2 * u.values));
    }
    fitted.push_back(C);
    MESSAGE("M=" << M << " fitted C=" << C << " S=" << S);
  }
  CHECK(std::isfinite(fitted[0]));
  CHECK(fitted[0] > 0.0);
  CHECK(fitted[1] == Approx(fitted[0]).epsilon(0.2));
}
