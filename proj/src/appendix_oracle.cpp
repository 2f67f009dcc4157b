// SPDX-License-Identifier: Apache-2.0
#include "fracsob/appendix_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "fracsob/constants.hpp"
#include "fracsob/quadrature.hpp"
#include "fracsob/radial_quadrature.hpp"
#include "fracsob/testfunctions.hpp"

namespace fracsob
{

namespace
{

void check_k(int k)
{
  if (k < 2)
    throw DomainError("cutoff index k must be >= 2");
}

double rel_err(double closed, double numeric)
{
  return std::abs(numeric - closed) / std::max(std::abs(closed), 1e-300);
}

}  // namespace

double l2_distance_closed_form(int k)
{
  check_k(k);
  const double kk = k, L = std::log(kk);
  return 1.0 / (kk * kk) +
         (1.0 / (kk * L * L)) * (2.0 - L * L / kk - 2.0 * L / kk - 2.0 / kk);
}

double l2_distance_printed_form(int k)
{
  check_k(k);
  const double kk = k, L = std::log(kk);
  return 1.0 / (kk * kk) +
         (1.0 / (kk * kk * L * L)) * (2.0 - L * L / kk - 2.0 * L / kk - 2.0 / kk);
}

double l2_distance_numeric(int k)
{
  check_k(k);
  const double kk = k;
  const Rule gl = gauss_legendre(12);
  auto f = [kk](double t) {
    const double g = chi_k(t, kk) - 1.0;
    return g * g;
  };
  const double a = 1.0 / (kk * kk), b = 1.0 / kk;
  double acc = a;  // chi_k - 1 = -1 on [0, 1/k^2]
  for (double lo = a; lo < b;)
  {
    const double hi = std::min(2.0 * lo, b);
    acc += integrate(gl, lo, hi, f);
    lo = hi;
  }
  return acc;
}

double j1k_closed_form(int k)
{
  check_k(k);
  return -std::log1p(-1.0 / k);
}

double j1k_numeric(int k)
{
  check_k(k);
  const double kk = k;
  const double b = 1.0 / kk;
  const Rule gl = gauss_legendre(16);
  return integrate(gl, 0.0, 1.0 / (kk * kk), [b](double x) { return 1.0 / (b - x); });
}

// ---------------------------------------------------------------------------
// one-dimensional s = 1/2 machinery

namespace
{

struct HalfSeminorm
{
  const std::function<double(double)>& f;
  Rule gl;
  int levels;

  double q(double x, double y) const
  {
    const double d = x - y;
    const double df = f(x) - f(y);
    return df * df / (d * d);
  }

  // [a, a+h]^2 in (z, u) coordinates; the integrand is bounded
  double identical(double a, double h) const
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i)
    {
      const double z = gl.x[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < gl.size(); ++j)
      {
        const double y = a + h * (1.0 - z) * gl.x[j];
        inner += gl.w[j] * q(y + h * z, y);
      }
      sum += gl.w[i] * (1.0 - z) * inner;
    }
    return 2.0 * h * h * sum;
  }

  // [b - hE, b] x [b, b + hF] and its mirror; Duffy triangles with geometric t-panels
  double touching(double b, double hE, double hF) const
  {
    double sum = 0.0;
    double hi = 1.0;
    for (int l = 0; l <= levels; ++l)
    {
      const double lo = (l == levels) ? 0.0 : 0.5 * hi;
      for (std::size_t i = 0; i < gl.size(); ++i)
      {
        const double t = lo + (hi - lo) * gl.x[i];
        const double wt = (hi - lo) * gl.w[i] * t;
        double inner = 0.0;
        for (std::size_t j = 0; j < gl.size(); ++j)
        {
          const double v = gl.x[j];
          inner += gl.w[j] * (q(b - hE * t, b + hF * t * v) + q(b - hE * t * v, b + hF * t));
        }
        sum += wt * inner;
      }
      hi = lo;
    }
    return 2.0 * hE * hF * sum;
  }

  double separated(double r0, double r1, double p0, double p1) const
  {
    const double lr = r1 - r0, lp = p1 - p0, gap = p0 - r1;
    if (gap < std::max(lr, lp))
    {
      if (lr >= lp)
      {
        const double m = 0.5 * (r0 + r1);
        return separated(r0, m, p0, p1) + separated(m, r1, p0, p1);
      }
      const double m = 0.5 * (p0 + p1);
      return separated(r0, r1, p0, m) + separated(r0, r1, m, p1);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i)
      for (std::size_t j = 0; j < gl.size(); ++j)
        sum += gl.w[i] * gl.w[j] * q(r0 + lr * gl.x[i], p0 + lp * gl.x[j]);
    return 2.0 * lr * lp * sum;
  }
};

}  // namespace

double half_seminorm_sq_interval(const std::function<double(double)>& f,
                                 const std::vector<double>& breaks, int order, int corner_levels)
{
  if (breaks.size() < 2)
    throw DomainError("need at least one panel");
  const HalfSeminorm hs{f, gauss_legendre(order), corner_levels};
  const std::size_t n = breaks.size() - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    const double a = breaks[i], b = breaks[i + 1];
    total += hs.identical(a, b - a);
    if (i + 1 < n)
      total += hs.touching(b, b - a, breaks[i + 2] - b);
    for (std::size_t j = i + 2; j < n; ++j)
      total += hs.separated(a, b, breaks[j], breaks[j + 1]);
  }
  const double c = gagliardo_constant(Params{1, 0.5});
  return 0.5 * c * total;
}

double half_seminorm_numeric(int k)
{
  check_k(k);
  const double kk = k;
  const double a = 1.0 / (kk * kk), b = 1.0 / kk;
  const std::function<double(double)> g = [kk](double x) { return chi_k(x, kk) - 1.0; };
  // log-geometric panels on both sides of the kink at 1/k^2
  std::vector<double> br{0.0};
  for (double x = a / 64.0; x < a; x *= 2.0)
    br.push_back(x);
  for (double x = a; x < b; x *= 2.0)
    br.push_back(x);
  br.push_back(b);
  br.erase(std::unique(br.begin(), br.end()), br.end());
  const double inner = half_seminorm_sq_interval(g, br, 12);
  // y > 1/k: g(y) = 0 and int_{1/k}^inf (y - x)^{-2} dy = 1/(b - x)
  const Rule gl = gauss_legendre(12);
  double outer = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    outer += integrate(gl, br[i], br[i + 1], [&](double x) { return g(x) * g(x) / (b - x); });
  const double c = gagliardo_constant(Params{1, 0.5});
  return std::sqrt(inner + 0.5 * c * 2.0 * outer);
}

std::vector<OracleReport> closed_form_oracles(const std::vector<int>& k_grid)
{
  std::vector<OracleReport> out;
  for (int k : k_grid)
  {
    OracleReport a{k, "l2_distance", l2_distance_closed_form(k), l2_distance_numeric(k), 0.0, true};
    a.rel_err = rel_err(a.closed_form, a.numeric);
    OracleReport b{k, "j1k", j1k_closed_form(k), j1k_numeric(k), 0.0, true};
    b.rel_err = rel_err(b.closed_form, b.numeric);
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

DecayFit h_half_seminorm_decay(const std::vector<int>& k_grid)
{
  DecayFit fit;
  if (k_grid.empty())
    throw DomainError("empty k grid");
  for (std::size_t i = 0; i < k_grid.size(); ++i)
  {
    if (k_grid[i] < 4)
      throw DomainError("seminorm decay needs k >= 4");
    if (i > 0 && k_grid[i] <= k_grid[i - 1])
      throw DomainError("k grid must be increasing");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  fit.decreasing = true;
  fit.min_scaled = std::numeric_limits<double>::infinity();
  for (int k : k_grid)
  {
    OracleReport r;
    r.k = k;
    r.quantity = "h_half_seminorm";
    r.numeric = half_seminorm_numeric(k);
    r.has_closed_form = false;
    r.closed_form = std::numeric_limits<double>::quiet_NaN();
    r.rel_err = std::numeric_limits<double>::quiet_NaN();
    if (!fit.rows.empty() && !(r.numeric < fit.rows.back().numeric))
      fit.decreasing = false;
    const double scaled = r.numeric * r.numeric * std::log(static_cast<double>(k));
    fit.max_scaled = std::max(fit.max_scaled, scaled);
    fit.min_scaled = std::min(fit.min_scaled, scaled);
    const double x = std::log(std::log(static_cast<double>(k))), y = std::log(r.numeric);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.rows.push_back(r);
  }
  const double n = static_cast<double>(k_grid.size());
  fit.slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return fit;
}

OracleReport half_line_engine_crosscheck(int k, int M)
{
  check_k(k);
  const double kk = k;
  const double a = 1.0 / (kk * kk), b = 1.0 / kk;
  // uniform grid, plus log-spaced nodes through the cutoff layer
  std::vector<double> nodes;
  for (double x = a / 8.0; x < a; x *= 2.0)
    nodes.push_back(x);
  for (double x = a; x < b; x *= std::sqrt(2.0))
    nodes.push_back(x);
  nodes.push_back(b);
  for (int i = 0; i <= M; ++i)
    nodes.push_back(static_cast<double>(i) / M);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-15; }),
              nodes.end());
  auto grid = std::make_shared<const RadialGrid>(RadialGrid::from_nodes(nodes, 1.0, "custom"));
  const RadialFunction u =
      RadialFunction::interpolate(grid, [kk](double x) { return chi_k(x, kk) - 1.0; });

  const Params p{1, 0.5};
  QuadSpec q;
  q.gauss_order = 8;
  q.diagonal_levels = 6;
  AssemblyOptions opt;
  opt.mode = KernelMode::HalfLine;
  const Eigen::MatrixXd A = assemble_regional_stiffness(p, *grid, q, opt);
  const double engine = u.values.dot(A * u.values);

  const std::function<double(double)> f = [&u](double x) { return u(x); };
  const double oned = half_seminorm_sq_interval(f, nodes, 10);
  OracleReport r{k, "half_line_crosscheck", oned, engine, rel_err(oned, engine), true};
  return r;
}

}  // namespace fracsob
