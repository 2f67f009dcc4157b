// SPDX-License-Identifier: Apache-2.0
#include "fracsob/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace fracsob
{

namespace
{

// Golub-Welsch for the monic Jacobi recurrence with weight (1-x)^a (1+x)^b on [-1,1],
// mapped to [0,1].
Rule golub_welsch_jacobi(int n, double a, double b)
{
  if (n < 1)
    throw std::invalid_argument("quadrature order must be positive");
  if (!(a > -1.0 && b > -1.0))
    throw std::invalid_argument("Jacobi exponents must exceed -1");

  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  const double ab = a + b;
  for (int k = 0; k < n; ++k)
  {
    const double t = 2.0 * k + ab;
    diag[k] = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (t * (t + 2.0));
  }
  for (int k = 1; k < n; ++k)
  {
    const double t = 2.0 * k + ab;
    double beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    if (k == 1 && std::abs(ab + 1.0) < 1e-14)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    sub[k - 1] = std::sqrt(beta);
  }

  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  if (n == 1)
  {
    r.x[0] = 0.5 * (1.0 + diag[0]);
    r.w[0] = mu0;
  }
  else
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int k = 0; k < n; ++k)
    {
      r.x[k] = 0.5 * (1.0 + es.eigenvalues()[k]);
      const double v0 = es.eigenvectors()(0, k);
      r.w[k] = mu0 * v0 * v0;
    }
  }
  const double scale = std::pow(2.0, -(ab + 1.0));
  for (auto& w : r.w)
    w *= scale;
  return r;
}

// Newton refinement of Legendre nodes keeps the symmetric rule accurate to roundoff.
Rule legendre_newton(int n)
{
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i)
  {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1)
        p0 = 1.0;
      const double pn = (n == 1) ? x : p1;
      dp = n * (x * pn - p0) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    r.x[n - 1 - i] = 0.5 * (1.0 + x);
    r.w[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

Rule gauss_legendre(int n)
{
  if (n < 1)
    throw std::invalid_argument("quadrature order must be positive");
  static std::mutex mtx;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end())
    return it->second;
  Rule r = legendre_newton(n);
  cache.emplace(n, r);
  return r;
}

Rule gauss_jacobi(int n, double alpha)
{
  static std::mutex mtx;
  static std::map<std::pair<int, double>, Rule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(n, alpha);
  auto it = cache.find(key);
  if (it != cache.end())
    return it->second;
  Rule r = golub_welsch_jacobi(n, 0.0, alpha);
  cache.emplace(key, r);
  return r;
}

Rule gauss_jacobi_folded(int n, double alpha)
{
  Rule r = gauss_jacobi(n, alpha);
  for (std::size_t i = 0; i < r.size(); ++i)
    r.w[i] /= std::pow(r.x[i], alpha);
  return r;
}

}  // namespace fracsob
