// SPDX-License-Identifier: Apache-2.0
#include "fracsob/radial_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <string>
#include <numbers>

#ifdef FRACSOB_HAVE_OPENMP
#include <omp.h>
#endif

namespace fracsob
{

namespace
{

constexpr double kPi = std::numbers::pi;

double ipow(double x, int n)
{
  double r = 1.0;
  for (int i = 0; i < n; ++i)
    r *= x;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// grids and functions

RadialGrid::RadialGrid(std::vector<double> nodes, double beta, std::string kind)
    : nodes_(std::move(nodes)), beta_(beta), kind_(std::move(kind))
{
  if (nodes_.size() < 5)
    throw DomainError("a radial grid needs at least 4 elements");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw DomainError("radial grid must start at 0 and end at 1");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw DomainError("radial grid nodes must be strictly increasing");
}

RadialGrid RadialGrid::graded(int M, double beta)
{
  if (M < 4)
    throw DomainError("grid size M must be >= 4");
  if (!(beta >= 1.0))
    throw DomainError("grading exponent must be >= 1");
  std::vector<double> r(M + 1);
  for (int i = 0; i <= M; ++i)
    r[i] = 1.0 - std::pow(1.0 - static_cast<double>(i) / M, beta);
  r[0] = 0.0;
  r[M] = 1.0;
  return RadialGrid(std::move(r), beta, "graded");
}

RadialGrid RadialGrid::two_sided(int M, double beta)
{
  if (M < 4 || M % 2 != 0)
    throw DomainError("two-sided grid size M must be even and >= 4");
  if (!(beta >= 1.0))
    throw DomainError("grading exponent must be >= 1");
  std::vector<double> r(M + 1);
  const int H = M / 2;
  for (int i = 0; i <= H; ++i)
  {
    const double x = static_cast<double>(i) / H;
    r[i] = 0.5 * std::pow(x, beta);
    r[M - i] = 1.0 - 0.5 * std::pow(x, beta);
  }
  r[H] = 0.5;
  return RadialGrid(std::move(r), beta, "two_sided");
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, double beta, std::string kind)
{
  return RadialGrid(std::move(nodes), beta, std::move(kind));
}

int RadialGrid::locate(double r) const
{
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  int e = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(e, 0, elements() - 1);
}

RadialFunction::RadialFunction(std::shared_ptr<const RadialGrid> g, Eigen::VectorXd v)
    : grid(std::move(g)), values(std::move(v))
{
  if (!grid)
    throw DomainError("radial function needs a grid");
  if (values.size() != grid->dofs())
    throw DomainError("radial function has " + std::to_string(values.size()) +
                      " values, grid expects " + std::to_string(grid->dofs()));
  if (!values.allFinite())
    throw DomainError("radial function values must be finite");
}

RadialFunction RadialFunction::interpolate(std::shared_ptr<const RadialGrid> g,
                                           const std::function<double(double)>& f)
{
  Eigen::VectorXd v(g->dofs());
  for (int i = 0; i < g->dofs(); ++i)
    v[i] = f(g->node(i));
  return RadialFunction(std::move(g), std::move(v));
}

double RadialFunction::operator()(double r) const
{
  if (r >= 1.0)
    return 0.0;
  const int e = grid->locate(r);
  const double a = grid->node(e), h = grid->width(e);
  const double x = (r - a) / h;
  return (1.0 - x) * nodal(e) + x * nodal(e + 1);
}

void QuadSpec::validate() const
{
  if (gauss_order < 4)
    throw DomainError("gauss_order must be >= 4");
  if (diagonal_levels < 3)
    throw DomainError("diagonal_levels must be >= 3");
  if (angular_order < 16)
    throw DomainError("angular_order must be >= 16");
}

// ---------------------------------------------------------------------------
// angular kernel

AngularKernel::AngularKernel(const Params& p, const QuadSpec& q, KernelMode mode)
    : p_(p), mode_(mode)
{
  p.validate();
  q.validate();
  if (mode == KernelMode::HalfLine && p.dim != 1)
    throw DomainError("half-line kernel is only defined for N = 1");
  lambda_ = 0.5 * (p.dim + 2.0 * p.s);
  omega_ = sphere_area(p.dim - 1);
  omega_low_ = p.dim >= 2 ? sphere_area(p.dim - 2) : 0.0;
  outer_ = gauss_legendre(q.angular_order);
  panel_ = gauss_legendre(q.angular_order);
  const double phi0 = kPi / 6.0, h = 0.5 * kPi - phi0;
  for (std::size_t i = 0; i < outer_.size(); ++i)
  {
    const double phi = phi0 + h * outer_.x[i];
    const double sp = std::sin(phi), cp = std::cos(phi);
    outer_sin2_.push_back(sp * sp);
    outer_w_.push_back(h * outer_.w[i] * (p.dim > 2 ? ipow(2.0 * sp * cp, p.dim - 2) : 1.0));
  }
}

double AngularKernel::operator()(double r, double rho) const
{
  return (*this)(r, rho, std::abs(r - rho));
}

double AngularKernel::operator()(double r, double rho, double d) const
{
  const double s = p_.s;
  const int N = p_.dim;
  if (N == 1)
  {
    const double near = std::pow(d, -1.0 - 2.0 * s);
    return mode_ == KernelMode::HalfLine ? near : near + std::pow(r + rho, -1.0 - 2.0 * s);
  }
  if (r == 0.0 || rho == 0.0)
    return omega_ * std::pow(std::max(r, rho), -2.0 * lambda_);
  if (N == 3)
  {
    const double e = 1.0 + 2.0 * s;
    const double sum = r + rho;
    // d^{-e} - sum^{-e} = -d^{-e} expm1(e log(d/sum)), log(d/sum) = log1p(-2 min/sum)
    const double ratio_log = std::log1p(-2.0 * std::min(r, rho) / sum);
    const double bracket = -std::pow(d, -e) * std::expm1(e * ratio_log);
    return 2.0 * kPi * bracket / (e * r * rho);
  }
  return numeric(r, rho, d);
}

double AngularKernel::numeric(double r, double rho, double d) const
{
  const int N = p_.dim;
  const double s = p_.s;
  const double lam = lambda_;
  const double b = 4.0 * r * rho;
  const double d2 = d * d;

  // [phi0, pi/2]: bounded away from the peak at phi = 0.
  double far = 0.0;
  for (std::size_t i = 0; i < outer_w_.size(); ++i)
    far += outer_w_[i] * std::exp(-lam * std::log(d2 + b * outer_sin2_[i]));

  // [0, phi0] after sin(phi) = (d/sqrt(b)) sinh(tau).
  const double sb = std::sqrt(b);
  const double T = std::asinh(0.5 * sb / d);
  const double tau_cut = 40.0 / (1.0 + 2.0 * s);
  double near = 0.0;
  double lo = 0.0;
  double hi = std::min(T, 1.0);
  while (lo < T && lo < tau_cut)
  {
    const double h = hi - lo;
    double acc = 0.0;
    for (std::size_t i = 0; i < panel_.size(); ++i)
    {
      const double tau = lo + h * panel_.x[i];
      const double ch = std::cosh(tau);
      double val = std::exp((1.0 - 2.0 * lam) * std::log(ch));
      if (N != 3)
      {
        const double sphi = d / sb * std::sinh(tau);
        const double cphi = std::sqrt(std::max(0.0, 1.0 - sphi * sphi));
        if (N == 2)
          val /= cphi;
        else
          val *= ipow(cphi, N - 3);
      }
      if (N > 2)
        val *= ipow(std::sinh(tau), N - 2);
      acc += panel_.w[i] * val;
    }
    near += acc * h;
    lo = hi;
    hi = std::min(T, 2.0 * hi);
  }
  near *= std::pow(d, -1.0 - 2.0 * s) * std::pow(b, -0.5 * (N - 1)) * ipow(2.0, N - 2);

  return 2.0 * omega_low_ * (near + far);
}

double angular_kernel(const Params& p, double r, double rho, const QuadSpec& q)
{
  if (r == rho)
    throw DomainError("angular kernel is singular on the diagonal r = rho");
  if (r < 0.0 || rho < 0.0)
    throw DomainError("radii must be nonnegative");
  return AngularKernel(p, q)(r, rho);
}

double radial_form_prefactor(const Params& p, KernelMode mode)
{
  const double c = gagliardo_constant(p);
  if (mode == KernelMode::HalfLine)
    return 0.5 * c;
  return 0.5 * c * sphere_area(p.dim - 1);
}

// ---------------------------------------------------------------------------
// stiffness assembly

Rule geometric_rule(int levels, int order, double alpha)
{
  Rule out;
  const Rule gl = gauss_legendre(order);
  double hi = 1.0;
  for (int l = 0; l < levels; ++l)
  {
    const double lo = 0.5 * hi;
    for (std::size_t i = 0; i < gl.size(); ++i)
    {
      out.x.push_back(lo + (hi - lo) * gl.x[i]);
      out.w.push_back((hi - lo) * gl.w[i]);
    }
    hi = lo;
  }
  const Rule gj = gauss_jacobi_folded(order, alpha);
  for (std::size_t i = 0; i < gj.size(); ++i)
  {
    out.x.push_back(hi * gj.x[i]);
    out.w.push_back(hi * gj.w[i]);
  }
  return out;
}

namespace
{

class StiffnessAssembler
{
public:
  StiffnessAssembler(const Params& p, const RadialGrid& g, const QuadSpec& q, KernelMode mode)
      : p_(p), g_(g), kernel_(p, q, mode), M_(g.dofs())
  {
    gl_ = gauss_legendre(q.gauss_order);
    for (int n = 1; n <= q.gauss_order; ++n)
      gl_by_order_.push_back(gauss_legendre(n));
    const int order = q.gauss_order;
    diag_ = geometric_rule(q.diagonal_levels, order, 1.0 - 2.0 * p.s);
    touch_ = geometric_rule(q.diagonal_levels, order, 2.0 - 2.0 * p.s);
    diag_coarse_ = geometric_rule(q.diagonal_levels - 1, order, 1.0 - 2.0 * p.s);
    touch_coarse_ = geometric_rule(q.diagonal_levels - 1, order, 2.0 - 2.0 * p.s);
    pref_ = radial_form_prefactor(p, mode);
  }

  /// Relative change of a near-diagonal cell between diagonal_levels - 1 and diagonal_levels.
  static constexpr double kCellTolerance = 1e-6;

  void element_block(int e, Eigen::MatrixXd& A) const
  {
    identical(e, A);
    if (e + 1 < g_.elements())
      touching(e, A);
    for (int f = e + 2; f < g_.elements(); ++f)
    {
      Block blk;
      separated(e, f, g_.node(e), g_.node(e + 1), g_.node(f), g_.node(f + 1), blk, 0);
      scatter_separated(e, f, blk, A);
    }
  }

private:
  struct Block
  {
    Eigen::Matrix2d ee = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d ff = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d ef = Eigen::Matrix2d::Zero();
  };

  double weight(double r) const { return ipow(r, p_.dim - 1); }
  double K(double r, double rho, double d) const
  {
    return kernel_(r, rho, d) * weight(r) * weight(rho);
  }

  void add(Eigen::MatrixXd& A, int i, int j, double v) const
  {
    if (i < M_ && j < M_)
      A(i, j) += v;
  }

  void check_cell(const char* kind, int e, double fine, double coarse) const
  {
    const double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
    if (!(rel <= kCellTolerance))
      throw QuadratureError(std::string(kind) + " cell " + std::to_string(e) +
                            " did not converge under diagonal refinement (relative change " +
                            std::to_string(rel) + "); raise diagonal_levels");
  }

  double identical_sum(int e, const Rule& rule) const
  {
    const double a = g_.node(e), h = g_.width(e);
    double sum = 0.0;
    for (std::size_t iz = 0; iz < rule.size(); ++iz)
    {
      const double z = rule.x[iz];
      double inner = 0.0;
      for (std::size_t iu = 0; iu < gl_.size(); ++iu)
      {
        const double rho = a + h * (1.0 - z) * gl_.x[iu];
        inner += gl_.w[iu] * K(rho + h * z, rho, h * z);
      }
      sum += rule.w[iz] * z * z * (1.0 - z) * inner;
    }
    return sum;
  }

  void identical(int e, Eigen::MatrixXd& A) const
  {
    const double h = g_.width(e);
    const double sum = identical_sum(e, diag_);
    check_cell("diagonal", e, sum, identical_sum(e, diag_coarse_));
    const double val = pref_ * 2.0 * h * h * sum;
    add(A, e, e, val);
    add(A, e + 1, e + 1, val);
    add(A, e, e + 1, -val);
    add(A, e + 1, e, -val);
  }

  Eigen::Matrix3d touching_sum(int e, const Rule& rule) const
  {
    const double b = g_.node(e + 1);
    const double hE = g_.width(e), hF = g_.width(e + 1);
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    for (std::size_t it = 0; it < rule.size(); ++it)
    {
      const double t = rule.x[it];
      for (std::size_t iv = 0; iv < gl_.size(); ++iv)
      {
        const double v = gl_.x[iv];
        const double w = rule.w[it] * gl_.w[iv] * t * t * t * hE * hF;
        {
          const double x = hE * t, y = hF * t * v;
          const double k = K(b - x, b + y, x + y);
          const Eigen::Vector3d D(1.0, v - 1.0, -v);
          S.noalias() += (w * k) * D * D.transpose();
        }
        {
          const double x = hE * t * v, y = hF * t;
          const double k = K(b - x, b + y, x + y);
          const Eigen::Vector3d D(v, 1.0 - v, -1.0);
          S.noalias() += (w * k) * D * D.transpose();
        }
      }
    }
    return S;
  }

  void touching(int e, Eigen::MatrixXd& A) const
  {
    Eigen::Matrix3d S = touching_sum(e, touch_);
    check_cell("touching", e, S.trace(), touching_sum(e, touch_coarse_).trace());
    S *= 2.0 * pref_;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        add(A, e + i, e + j, S(i, j));
  }

  // [r0,r1] inside element e, [p0,p1] inside element f, r1 < p0.
  void separated(int e, int f, double r0, double r1, double p0, double p1, Block& blk,
                 int depth) const
  {
    const double lr = r1 - r0, lp = p1 - p0;
    const double gap = p0 - r1;
    if (gap < 1.5 * std::max(lr, lp) && depth < 60)
    {
      if (lr >= lp)
      {
        const double m = 0.5 * (r0 + r1);
        separated(e, f, r0, m, p0, p1, blk, depth + 1);
        separated(e, f, m, r1, p0, p1, blk, depth + 1);
      }
      else
      {
        const double m = 0.5 * (p0 + p1);
        separated(e, f, r0, r1, p0, m, blk, depth + 1);
        separated(e, f, r0, r1, m, p1, blk, depth + 1);
      }
      return;
    }
    const double ea = g_.node(e), eb = g_.node(e + 1), he = g_.width(e);
    const double fa = g_.node(f), fb = g_.node(f + 1), hf = g_.width(f);
    // Far pairs see a smooth kernel across both intervals; the tensor rule error
    // decays like (len / gap)^{2n}.
    const double ratio = gap / std::max(lr, lp);
    int order = static_cast<int>(gl_.size());
    if (ratio >= 64.0)
      order = std::min(order, 2);
    else if (ratio >= 16.0)
      order = std::min(order, 3);
    else if (ratio >= 4.0)
      order = std::min(order, 4);
    const Rule& gl = gl_by_order_[order - 1];
    const std::size_t n = gl.size();
    std::array<double, 32> rq{}, rw{}, pq{}, pw{};
    for (std::size_t i = 0; i < n; ++i)
    {
      rq[i] = r0 + lr * gl.x[i];
      rw[i] = lr * gl.w[i];
      pq[i] = p0 + lp * gl.x[i];
      pw[i] = lp * gl.w[i];
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      const Eigen::Vector2d phe((eb - rq[i]) / he, (rq[i] - ea) / he);
      Eigen::Vector2d accf = Eigen::Vector2d::Zero();
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j)
      {
        const double wk = rw[i] * pw[j] * K(rq[i], pq[j], pq[j] - rq[i]);
        const Eigen::Vector2d phf((fb - pq[j]) / hf, (pq[j] - fa) / hf);
        row += wk;
        accf += wk * phf;
        blk.ff.noalias() += wk * phf * phf.transpose();
      }
      blk.ee.noalias() += row * phe * phe.transpose();
      blk.ef.noalias() -= phe * accf.transpose();
    }
  }

  void scatter_separated(int e, int f, const Block& blk, Eigen::MatrixXd& A) const
  {
    const double c = 2.0 * pref_;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
      {
        add(A, e + i, e + j, c * blk.ee(i, j));
        add(A, f + i, f + j, c * blk.ff(i, j));
        add(A, e + i, f + j, c * blk.ef(i, j));
        add(A, f + j, e + i, c * blk.ef(i, j));
      }
  }

  Params p_;
  const RadialGrid& g_;
  AngularKernel kernel_;
  int M_;
  Rule gl_, diag_, touch_, diag_coarse_, touch_coarse_;
  std::vector<Rule> gl_by_order_;
  double pref_;
};

}  // namespace

Eigen::MatrixXd assemble_regional_stiffness(const Params& p, const RadialGrid& grid,
                                            const QuadSpec& q, const AssemblyOptions& opt)
{
  q.validate();
  if (q.gauss_order > 32)
    throw DomainError("gauss_order must be <= 32");
  const StiffnessAssembler asmb(p, grid, q, opt.mode);
  const int M = grid.dofs();
  const int E = grid.elements();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);

#ifdef FRACSOB_HAVE_OPENMP
  if (opt.jobs > 1)
  {
    const int nt = opt.jobs;
    std::vector<Eigen::MatrixXd> parts(nt);
    std::exception_ptr failure;
#pragma omp parallel num_threads(nt)
    {
      const int tid = omp_get_thread_num();
      parts[tid] = Eigen::MatrixXd::Zero(M, M);
#pragma omp for schedule(static, 1)
      for (int e = 0; e < E; ++e)
      {
        try
        {
          asmb.element_block(e, parts[tid]);
        }
        catch (...)
        {
#pragma omp critical
          if (!failure)
            failure = std::current_exception();
        }
      }
    }
    if (failure)
      std::rethrow_exception(failure);
    for (const auto& part : parts)
      if (part.size())
        A += part;
    return 0.5 * (A + A.transpose());
  }
#endif
  for (int e = 0; e < E; ++e)
    asmb.element_block(e, A);
  return 0.5 * (A + A.transpose());
}

// ---------------------------------------------------------------------------
// generic panel pairs

namespace
{

struct PanelPairs
{
  const PairIntegrand& F;
  Rule gl, diag, touch;

  double identical(double a, double h) const
  {
    double sum = 0.0;
    for (std::size_t iz = 0; iz < diag.size(); ++iz)
    {
      const double z = diag.x[iz];
      double inner = 0.0;
      for (std::size_t iu = 0; iu < gl.size(); ++iu)
      {
        const double rho = a + h * (1.0 - z) * gl.x[iu];
        inner += gl.w[iu] * F(rho + h * z, rho, h * z);
      }
      sum += diag.w[iz] * (1.0 - z) * inner;
    }
    return 2.0 * h * h * sum;
  }

  // [b - hE, b] x [b, b + hF], counted for both orderings
  double touching(double b, double hE, double hF) const
  {
    double sum = 0.0;
    for (std::size_t it = 0; it < touch.size(); ++it)
    {
      const double t = touch.x[it];
      double inner = 0.0;
      for (std::size_t iv = 0; iv < gl.size(); ++iv)
      {
        const double v = gl.x[iv];
        double x = hE * t, y = hF * t * v;
        inner += gl.w[iv] * F(b - x, b + y, x + y);
        x = hE * t * v;
        y = hF * t;
        inner += gl.w[iv] * F(b - x, b + y, x + y);
      }
      sum += touch.w[it] * t * inner;
    }
    return 2.0 * hE * hF * sum;
  }

  // r0 < r1 <= p0 < p1 with p0 > r1, counted for both orderings
  double separated(double r0, double r1, double p0, double p1, int depth) const
  {
    const double lr = r1 - r0, lp = p1 - p0, gap = p0 - r1;
    if (gap < 1.5 * std::max(lr, lp) && depth < 80)
    {
      if (lr >= lp)
      {
        const double m = 0.5 * (r0 + r1);
        return separated(r0, m, p0, p1, depth + 1) + separated(m, r1, p0, p1, depth + 1);
      }
      const double m = 0.5 * (p0 + p1);
      return separated(r0, r1, p0, m, depth + 1) + separated(r0, r1, m, p1, depth + 1);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i)
    {
      const double r = r0 + lr * gl.x[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < gl.size(); ++j)
      {
        const double rho = p0 + lp * gl.x[j];
        inner += gl.w[j] * F(r, rho, rho - r);
      }
      sum += gl.w[i] * inner;
    }
    return 2.0 * lr * lp * sum;
  }
};

}  // namespace

double integrate_panel_pairs(const std::vector<double>& breaks, const PairIntegrand& F,
                             double s, const QuadSpec& q)
{
  return integrate_panel_pairs_cumulative(breaks, F, s, q).back();
}

std::vector<double> integrate_panel_pairs_cumulative(const std::vector<double>& breaks,
                                                     const PairIntegrand& F, double s,
                                                     const QuadSpec& q)
{
  if (breaks.size() < 2)
    throw DomainError("panel integration needs at least one panel");
  const PanelPairs pp{F, gauss_legendre(q.gauss_order),
                      geometric_rule(q.diagonal_levels, q.gauss_order, 1.0 - 2.0 * s),
                      geometric_rule(q.diagonal_levels, q.gauss_order, 2.0 - 2.0 * s)};
  const std::size_t n = breaks.size() - 1;
  std::vector<double> by_outer(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double a = breaks[i], b = breaks[i + 1];
    by_outer[i] += pp.identical(a, b - a);
    if (i + 1 < n)
      by_outer[i + 1] += pp.touching(b, b - a, breaks[i + 2] - b);
    for (std::size_t j = i + 2; j < n; ++j)
      by_outer[j] += pp.separated(a, b, breaks[j], breaks[j + 1], 0);
  }
  for (std::size_t j = 1; j < n; ++j)
    by_outer[j] += by_outer[j - 1];
  return by_outer;
}

// ---------------------------------------------------------------------------
// killing measure

double killing_measure(const Params& p, double t, const QuadSpec& q)
{
  p.validate();
  if (!(t >= 0.0 && t < 1.0))
    throw DomainError("killing measure needs 0 <= |x| < 1");
  const double c = gagliardo_constant(p);
  const double s = p.s;
  if (p.dim == 1)
    return c / (2.0 * s) * (std::pow(1.0 - t, -2.0 * s) + std::pow(1.0 + t, -2.0 * s));

  const AngularKernel k(p, q);
  const Rule gl = gauss_legendre(std::max(q.gauss_order, 10));
  const int N = p.dim;
  auto f = [&](double rho) { return ipow(rho, N - 1) * k(t, rho, rho - t); };

  double acc = 0.0;
  const double delta = 1.0 - t;
  double u = delta;
  while (t + 2.0 * u < 2.0)
  {
    acc += integrate(gl, t + u, t + 2.0 * u, f);
    u *= 2.0;
  }
  double lo = t + u;
  acc += integrate(gl, lo, 2.0, f);
  const double R = 65536.0;
  for (double a = 2.0; a < R; a *= 2.0)
    acc += integrate(gl, a, 2.0 * a, f);
  acc += sphere_area(N - 1) * std::pow(R, -2.0 * s) / (2.0 * s);
  return c * acc;
}

Eigen::MatrixXd assemble_killing_matrix(const Params& p, const RadialGrid& grid,
                                        const QuadSpec& q, const AssemblyOptions& opt)
{
  (void)opt;
  q.validate();
  const int M = grid.dofs();
  const int N = p.dim;
  const double omega = sphere_area(N - 1);
  const Rule gl = gauss_legendre(q.gauss_order);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(M, M);

  for (int e = 0; e < grid.elements(); ++e)
  {
    const double a = grid.node(e), b = grid.node(e + 1), h = b - a;
    Eigen::Matrix2d loc = Eigen::Matrix2d::Zero();
    auto point = [&](double r, double w) {
      const double kap = killing_measure(p, r, q);
      const Eigen::Vector2d ph((b - r) / h, (r - a) / h);
      loc.noalias() += (w * kap * ipow(r, N - 1)) * ph * ph.transpose();
    };
    const double db = 1.0 - b;
    if (e + 1 == grid.elements())
    {
      // distance to the boundary t = 1 - r, weight ~ t^{2-2s}
      const Rule gr = geometric_rule(q.diagonal_levels + 3, q.gauss_order, 2.0 - 2.0 * p.s);
      for (std::size_t i = 0; i < gr.size(); ++i)
        point(1.0 - h * gr.x[i], h * gr.w[i]);
    }
    else if (h > db)
    {
      // geometric panels in the distance to r = 1
      double lo = db;
      while (lo < 1.0 - a)
      {
        const double hi = std::min(2.0 * lo, 1.0 - a);
        for (std::size_t i = 0; i < gl.size(); ++i)
          point(1.0 - (lo + (hi - lo) * gl.x[i]), (hi - lo) * gl.w[i]);
        lo = hi;
      }
    }
    else
    {
      for (std::size_t i = 0; i < gl.size(); ++i)
        point(a + h * gl.x[i], h * gl.w[i]);
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (e + i < M && e + j < M)
          K(e + i, e + j) += omega * loc(i, j);
  }
  return K;
}

}  // namespace fracsob
