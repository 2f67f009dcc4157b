// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace fracsob
{

/// Nodes and weights of a one-dimensional rule on the reference interval [0,1].
struct Rule
{
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [0,1].
Rule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0,1] for the weight z^alpha (alpha > -1):
/// sum_i w_i f(x_i) ~ int_0^1 f(z) z^alpha dz.
Rule gauss_jacobi(int n, double alpha);

/// Same rule as gauss_jacobi, but with the weight folded back into w so that
/// sum_i w_i g(x_i) ~ int_0^1 g(z) dz for g(z) = z^alpha * smooth.
Rule gauss_jacobi_folded(int n, double alpha);

/// Integrate f over [a,b] with a rule on [0,1].
template <class F>
double integrate(const Rule& q, double a, double b, F&& f)
{
  const double h = b - a;
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    acc += q.w[i] * f(a + h * q.x[i]);
  return acc * h;
}

}  // namespace fracsob
