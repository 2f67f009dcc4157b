// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracsob
{

struct OracleReport
{
  int k = 0;
  std::string quantity;
  double closed_form = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
  bool has_closed_form = true;
};

/// ||chi_k - 1||^2_{L^2(R_+)} = 2/(k log^2 k) - 2/(k^2 log k) - 2/(k^2 log^2 k).
double l2_distance_closed_form(int k);
/// 1/k^2 + (1/(k^2 log^2 k))(2 - log^2 k/k - 2 log k/k - 2/k). Differs from the
/// integral by a factor k on the second term; regression value only.
double l2_distance_printed_form(int k);
/// Gauss quadrature of int_0^{1/k} (chi_k - 1)^2 on geometric panels.
double l2_distance_numeric(int k);

/// J^1_k = int_0^{1/k^2} int_{1/k}^inf (x - y)^{-2} dy dx = -log(1 - 1/k).
double j1k_closed_form(int k);
/// Outer Gauss quadrature of the exact inner integral 1/(1/k - x).
double j1k_numeric(int k);

/// (c_{1,1/2}/2) int int_{[b_0,b_n]^2} (f(x) - f(y))^2 / (x - y)^2 for f smooth between
/// consecutive breakpoints.
double half_seminorm_sq_interval(const std::function<double(double)>& f,
                                 const std::vector<double>& breaks, int order = 10,
                                 int corner_levels = 24);

/// [chi_k - 1]_{H^{1/2}(R_+)} (not squared).
double half_seminorm_numeric(int k);

/// Closed-form backed reports (L^2 distance and J^1_k) for every k.
std::vector<OracleReport> closed_form_oracles(const std::vector<int>& k_grid);

struct DecayFit
{
  std::vector<OracleReport> rows;
  double slope = 0.0;  ///< d log(seminorm) / d log(log k)
  bool decreasing = false;
  double max_scaled = 0.0;  ///< max over k of seminorm^2 log k
  double min_scaled = 0.0;
};

/// Seminorms of chi_k - 1 along the grid with a least-squares slope in log-log-k.
DecayFit h_half_seminorm_decay(const std::vector<int>& k_grid);

/// The interpolant of chi_k - 1 on an M-element uniform grid refined at 1/k^2 and 1/k,
/// measured by the 1-D machinery (closed_form field) and by the N = 1 half-line
/// stiffness matrix (numeric field).
OracleReport half_line_engine_crosscheck(int k, int M);

}  // namespace fracsob
