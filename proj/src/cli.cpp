// SPDX-License-Identifier: Apache-2.0
#include "fracsob/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fracsob/appendix_oracle.hpp"
#include "fracsob/green_mass.hpp"
#include "fracsob/minimize.hpp"
#include "fracsob/testfunctions.hpp"

#ifndef FRACSOB_VERSION
#define FRACSOB_VERSION "unknown"
#endif

namespace fracsob::cli
{

namespace
{

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNumerical = 2;

struct ExperimentConfig
{
  std::string command;
  int dim = 2;
  double s = 0.75;
  std::vector<double> s_list;
  std::optional<double> lambda;
  std::vector<double> lambda_list;
  std::string h_file;
  int grid = 256;
  double grading = 2.0;
  std::string mesh = "graded";
  int gauss = 6;
  int diag_levels = 5;
  int angular = 16;
  std::vector<int> k_grid = {4, 8, 16, 32};
  std::vector<double> eps_grid = {0.04, 0.02, 0.01, 0.005, 0.0025};
  double r_chi = 0.25;
  double eps = 1.0;
  std::string convention = "standard";
  std::string out;
  std::string format;
  int jobs = 1;
  bool deterministic = false;
  bool diagnostic = false;
  bool strict = false;
  bool plot = false;
  double threshold = 1e-6;
  double tol = 1e-9;
  int max_iter = 500;
};

json to_json(const ExperimentConfig& c)
{
  json j;
  j["command"] = c.command;
  j["dim"] = c.dim;
  if (c.command == "sweep")
    j["s_list"] = c.s_list;
  else
    j["s"] = c.s;
  if (c.lambda)
    j["lambda"] = *c.lambda;
  if (!c.lambda_list.empty())
    j["lambda_list"] = c.lambda_list;
  if (!c.h_file.empty())
    j["h_file"] = c.h_file;
  j["grid"] = {{"M", c.grid}, {"grading", c.grading}, {"kind", c.mesh}};
  j["quad"] = {{"gauss", c.gauss}, {"diag_levels", c.diag_levels}, {"angular", c.angular}};
  j["k_grid"] = c.k_grid;
  j["eps_grid"] = c.eps_grid;
  j["r_chi"] = c.r_chi;
  j["eps"] = c.eps;
  j["riesz_convention"] = c.convention;
  j["format"] = c.format;
  j["jobs"] = c.jobs;
  j["deterministic"] = c.deterministic;
  j["diagnostic"] = c.diagnostic;
  j["threshold"] = c.threshold;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  return j;
}

json provenance(const ExperimentConfig& c)
{
  return {{"library", "fracsob"},
          {"version", FRACSOB_VERSION},
          {"constants_convention", c.convention},
          {"config", to_json(c)}};
}

json number(double x)
{
  if (std::isfinite(x))
    return x;
  return nullptr;
}

void require(bool ok, const std::string& message)
{
  if (!ok)
    throw DomainError(message);
}

void validate_order(double s, bool diagnostic)
{
  if (diagnostic)
    require(s > 0.0 && s < 1.0, "fractional order must satisfy s ∈ (0,1), got s=" + std::to_string(s));
  else
    require(s > 0.5 && s < 1.0,
            "fractional order must satisfy s ∈ (1/2,1), got s=" + std::to_string(s) +
                " (pass --diagnostic to allow s ∈ (0,1) for the regional form)");
}

void validate(ExperimentConfig& c)
{
  require(c.dim >= 1, "dimension must be >= 1");
  if (c.format.empty())
    c.format = c.command == "sweep" ? "csv" : "json";
  require(c.format == "json" || c.format == "csv", "format must be json or csv");
  riesz_convention_from_string(c.convention);
  require(c.jobs >= 1, "jobs must be >= 1");
  if (c.deterministic)
    c.jobs = 1;
  require(c.tol > 0.0 && c.max_iter >= 1, "tol must be > 0 and max-iter >= 1");
  QuadSpec{c.gauss, c.diag_levels, c.angular}.validate();
  require(c.grading >= 1.0, "grading exponent must be >= 1");
  require(c.mesh == "graded" || c.mesh == "two_sided", "grid kind must be graded or two_sided");
  require(!(c.lambda && !c.h_file.empty()), "--lambda and --h-file are mutually exclusive");
  for (double e : c.eps_grid)
    require(e > 0.0, "eps grid entries must be positive");

  if (c.command == "sobolev" || c.command == "mass")
  {
    require(c.dim >= 2 || c.command == "sobolev", "ball experiments need N >= 2");
    validate_order(c.s, c.diagnostic && c.command == "sobolev");
  }
  if (c.command == "sweep")
  {
    if (c.s_list.empty())
      c.s_list = {0.51, 0.55, 0.6, 0.75, 0.9};
    for (double s : c.s_list)
      validate_order(s, c.diagnostic);
  }
  if (c.command == "mass")
  {
    require(c.r_chi > 0.0 && c.r_chi < 0.5, "cutoff radius r_chi must lie in (0, 1/2)");
    require(c.lambda_list.empty() || (!c.lambda && c.h_file.empty()),
            "--lambda-list cannot be combined with --lambda or --h-file");
  }
  if (c.command == "oracle")
  {
    require(!c.k_grid.empty(), "k grid must not be empty");
    for (int k : c.k_grid)
      require(k >= 2, "k grid entries must be >= 2");
    require(c.threshold > 0.0, "threshold must be positive");
  }
  if (c.command == "bubble-check")
  {
    validate_order(c.s, true);
    require(c.eps > 0.0, "bubble scale eps must be positive");
  }
  if (c.command == "mass" || c.command == "sobolev" || c.command == "sweep" ||
      c.command == "bubble-check")
  {
    if (c.command == "sweep")
      for (double s : c.s_list)
        Params{c.dim, s}.validate_subcritical_dimension();
    else
      Params{c.dim, c.s}.validate_subcritical_dimension();
  }
  if ((c.command == "sobolev" || c.command == "bubble-check") && c.format == "csv")
    throw DomainError(c.command + " emits a single JSON record; csv is for table commands");
}

Potential potential_of(const ExperimentConfig& c)
{
  if (!c.h_file.empty())
    return Potential::from_file(c.h_file);
  return Potential::constant(c.lambda ? -*c.lambda : 0.0);
}

QuadSpec quad_of(const ExperimentConfig& c)
{
  QuadSpec q;
  q.gauss_order = c.gauss;
  q.diagonal_levels = c.diag_levels;
  q.angular_order = c.angular;
  return q;
}

GridPolicy grid_of(const ExperimentConfig& c)
{
  GridPolicy g;
  g.M = c.grid;
  g.beta = c.grading;
  g.kind = c.mesh;
  return g;
}

AssemblyOptions assembly_of(const ExperimentConfig& c)
{
  AssemblyOptions a;
  a.jobs = c.jobs;
  if (c.dim == 1)
    a.mode = KernelMode::HalfLine;
  return a;
}

MinimizeOptions minimize_of(const ExperimentConfig& c)
{
  MinimizeOptions m;
  m.tol = c.tol;
  m.max_iter = c.max_iter;
  return m;
}

void emit(const ExperimentConfig& c, const std::string& text)
{
  if (c.out.empty())
  {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f)
    throw DomainError("cannot open output file '" + c.out + "'");
  f << text;
}

std::string csv_number(double x)
{
  if (!std::isfinite(x))
    return "nan";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

int cmd_sobolev(const ExperimentConfig& c)
{
  const Params p{c.dim, c.s};
  const QuadSpec q = quad_of(c);
  const GridPolicy g = grid_of(c);
  const auto grid = g.make();
  json j;
  j["params"] = {{"dim", p.dim}, {"s", p.s}};
  bool converged = false;
  if (c.strict)
  {
    StrictOptions so;
    so.minimize = minimize_of(c);
    so.eps_grid = c.eps_grid;
    so.convention = riesz_convention_from_string(c.convention);
    so.assembly = assembly_of(c);
    const StrictReport r = strict_subcritical_check(p, potential_of(c), grid, q, so);
    converged = r.minimizer.converged;
    j["params"]["exponent"] = r.minimizer.exponent;
    j["value"] = r.discrete_value;
    j["s_der"] = r.s_der;
    j["gap"] = r.s_der - r.discrete_value;
    j["iterations"] = r.minimizer.iterations;
    j["converged"] = converged;
    j["stop_reason"] = r.minimizer.stop_reason;
    j["strict"] = {{"quad_error", r.quad_error}, {"margin", r.margin}, {"strict", r.strict}};
    if (r.mass_pathway)
    {
      json path = json::array();
      for (const auto& pt : r.pathway)
        path.push_back({{"eps", pt.eps},
                        {"full_quotient", pt.full_quotient},
                        {"regional_quotient", pt.regional_quotient}});
      j["strict"]["kappa0"] = r.kappa0;
      j["strict"]["pathway"] = path;
      j["strict"]["pathway_min"] = r.pathway_min;
      j["strict"]["pathway_eps"] = r.pathway_eps;
      j["strict"]["strict_via_mass"] = r.strict_via_mass;
    }
  }
  else
  {
    AssemblyOptions a = assembly_of(c);
    a.killing = false;
    const FormMatrices F = assemble_forms(p, grid, q, potential_of(c), a);
    const MinimizeResult r = minimize_quotient(F, std::nullopt, minimize_of(c));
    const double sd = sharp_constant_estimate(p, q);
    converged = r.converged;
    j["params"]["exponent"] = r.exponent;
    j["value"] = r.value;
    j["s_der"] = sd;
    j["gap"] = sd - r.value;
    j["iterations"] = r.iterations;
    j["converged"] = converged;
    j["stop_reason"] = r.stop_reason;
  }
  j["grid"] = {{"M", grid->elements()}, {"grading", grid->grading()}, {"kind", grid->kind()}};
  j["quad"] = {{"gauss", q.gauss_order}, {"diag_levels", q.diagonal_levels},
               {"angular", q.angular_order}};
  j["constants_flag"] = c.convention;
  j["provenance"] = provenance(c);
  emit(c, j.dump(2) + "\n");
  return converged ? kOk : kNumerical;
}

int cmd_sweep(const ExperimentConfig& c)
{
  const auto rows = sweep_s(Params{c.dim, c.s_list.front()}, c.s_list, potential_of(c), grid_of(c),
                            quad_of(c), minimize_of(c), assembly_of(c));
  bool ok = true;
  for (const auto& r : rows)
    ok = ok && r.error.empty() && r.converged;
  if (c.format == "csv")
  {
    std::ostringstream os;
    if (c.plot)
    {
      os << "# s value\n";
      for (const auto& r : rows)
        os << csv_number(r.s) << ' ' << csv_number(r.value) << '\n';
    }
    else
    {
      os << "s,value,s_der,gap,converged\n";
      for (const auto& r : rows)
        os << csv_number(r.s) << ',' << (r.error.empty() ? csv_number(r.value) : "nan") << ','
           << csv_number(r.s_der) << ',' << (r.error.empty() ? csv_number(r.gap) : "nan") << ','
           << (r.converged ? "true" : "false") << '\n';
    }
    emit(c, os.str());
  }
  else
  {
    json j;
    j["rows"] = json::array();
    for (const auto& r : rows)
    {
      json row = {{"s", r.s},
                  {"value", number(r.value)},
                  {"s_der", number(r.s_der)},
                  {"gap", number(r.gap)},
                  {"converged", r.converged},
                  {"iterations", r.iterations}};
      if (!r.error.empty())
        row["error"] = r.error;
      j["rows"].push_back(row);
    }
    j["provenance"] = provenance(c);
    emit(c, j.dump(2) + "\n");
  }
  for (const auto& r : rows)
    if (!r.error.empty())
      std::cerr << "s=" << r.s << ": " << r.error << '\n';
  return ok ? kOk : kNumerical;
}

int cmd_mass(const ExperimentConfig& c)
{
  const Params p{c.dim, c.s};
  const QuadSpec q = quad_of(c);
  const auto grid = grid_of(c).make();
  const RieszConvention conv = riesz_convention_from_string(c.convention);
  FormMatrices F = assemble_forms(p, grid, q, potential_of(c), assembly_of(c));
  std::vector<MassRow> rows;
  std::optional<CrossingResult> crossing;
  if (!c.lambda_list.empty())
  {
    crossing = mass_crossing(F, c.lambda_list, c.r_chi, conv);
    rows = crossing->rows;
  }
  else
  {
    const MassResult m = solve_mass(F, c.r_chi, conv);
    rows.push_back({c.lambda.value_or(0.0), m.kappa0, m.residual, ""});
  }

  if (c.format == "csv")
  {
    std::ostringstream os;
    os << "lambda,kappa0,residual,error\n";
    for (const auto& r : rows)
      os << csv_number(r.lambda) << ',' << (r.error.empty() ? csv_number(r.kappa0) : "nan") << ','
         << (r.error.empty() ? csv_number(r.residual) : "nan") << ",\"" << r.error << "\"\n";
    if (crossing && crossing->lambda_star)
      os << "# crossing lambda_star=" << csv_number(*crossing->lambda_star) << '\n';
    emit(c, os.str());
    return kOk;
  }

  json j;
  j["params"] = {{"dim", p.dim}, {"s", p.s}};
  if (!c.h_file.empty())
    j["h"] = F.h.describe();
  j["rows"] = json::array();
  for (const auto& r : rows)
  {
    json row = json::object();
    if (c.h_file.empty())
      row["lambda"] = r.lambda;
    if (r.error.empty())
    {
      row["kappa0"] = r.kappa0;
      row["residual"] = r.residual;
    }
    else
      row["error"] = r.error;
    j["rows"].push_back(row);
  }
  if (crossing)
  {
    j["coercivity_limit"] = crossing->coercivity_limit;
    j["monotone"] = crossing->monotone;
    if (crossing->lambda_star && crossing->bracket)
      j["crossing"] = {{"lambda_star", *crossing->lambda_star},
                       {"bracket", {crossing->bracket->first, crossing->bracket->second}},
                       {"kappa0_at_star", crossing->kappa0_at_star}};
  }
  j["provenance"] = provenance(c);
  emit(c, j.dump(2) + "\n");
  return kOk;
}

int cmd_oracle(const ExperimentConfig& c)
{
  std::vector<OracleReport> rows = closed_form_oracles(c.k_grid);
  for (int k : c.k_grid)
    rows.push_back(half_line_engine_crosscheck(k, 32));
  std::optional<DecayFit> decay;
  bool seminorm_grid = c.k_grid.size() >= 2;
  for (std::size_t i = 0; i < c.k_grid.size(); ++i)
    seminorm_grid = seminorm_grid && c.k_grid[i] >= 4 && (i == 0 || c.k_grid[i] > c.k_grid[i - 1]);
  if (seminorm_grid)
    decay = h_half_seminorm_decay(c.k_grid);

  std::vector<std::string> failures;
  for (const auto& r : rows)
    if (r.has_closed_form && !(r.rel_err < c.threshold))
      failures.push_back(r.quantity + " k=" + std::to_string(r.k) + " rel_err=" + csv_number(r.rel_err));

  if (c.format == "csv")
  {
    std::ostringstream os;
    os << "k,quantity,closed_form,numeric,rel_err\n";
    for (const auto& r : rows)
      os << r.k << ',' << r.quantity << ',' << csv_number(r.closed_form) << ','
         << csv_number(r.numeric) << ',' << csv_number(r.rel_err) << '\n';
    if (decay)
      for (const auto& r : decay->rows)
        os << r.k << ',' << r.quantity << ",nan," << csv_number(r.numeric) << ",nan\n";
    emit(c, os.str());
  }
  else
  {
    json j;
    j["rows"] = json::array();
    auto add = [&j](const OracleReport& r) {
      j["rows"].push_back({{"k", r.k},
                           {"quantity", r.quantity},
                           {"closed_form", number(r.closed_form)},
                           {"numeric", r.numeric},
                           {"rel_err", number(r.rel_err)}});
    };
    for (const auto& r : rows)
      add(r);
    if (decay)
    {
      for (const auto& r : decay->rows)
        add(r);
      j["seminorm_decay"] = {{"slope", decay->slope},
                             {"decreasing", decay->decreasing},
                             {"min_scaled", decay->min_scaled},
                             {"max_scaled", decay->max_scaled}};
    }
    j["threshold"] = c.threshold;
    j["failures"] = failures;
    j["provenance"] = provenance(c);
    emit(c, j.dump(2) + "\n");
  }
  for (const auto& f : failures)
    std::cerr << "FAIL " << f << '\n';
  return failures.empty() ? kOk : kNumerical;
}

int cmd_bubble_check(const ExperimentConfig& c)
{
  const Params p{c.dim, c.s};
  const QuadSpec q = quad_of(c);
  const SharpConstantReport sc = sharp_constant(p, q, c.eps);
  const std::vector<double> centers{0.25 * c.eps, 0.5 * c.eps, c.eps, 2.0 * c.eps, 4.0 * c.eps};
  const EulerLagrangeReport el = bubble_euler_lagrange(p, q, c.eps, sc.value, centers);
  constexpr double tolerance = 2e-2;
  json j;
  j["params"] = {{"dim", p.dim}, {"s", p.s}, {"eps", c.eps}};
  j["s_der"] = sc.value;
  j["s_der_inner"] = sc.value_inner;
  j["tail_rel"] = sc.tail_rel;
  j["centers"] = el.centers;
  j["lhs"] = el.lhs;
  j["rhs"] = el.rhs;
  j["max_rel"] = el.max_rel;
  j["tolerance"] = tolerance;
  j["pass"] = el.max_rel < tolerance;
  j["provenance"] = provenance(c);
  emit(c, j.dump(2) + "\n");
  return el.max_rel < tolerance ? kOk : kNumerical;
}

}  // namespace

int run(int argc, char** argv)
{
  CLI::App app{"Fractional Sobolev constants on the unit ball: minimization, mass and oracles"};
  app.set_version_flag("--version", FRACSOB_VERSION);
  app.require_subcommand(1);

  ExperimentConfig c;
  auto common = [&c](CLI::App* sub) {
    sub->add_option("--dim", c.dim, "space dimension N")->envname("FRACSOB_DIM");
    sub->add_option("--s", c.s, "fractional order")->envname("FRACSOB_S");
    sub->add_option("--grid", c.grid, "number of radial elements M")->envname("FRACSOB_GRID");
    sub->add_option("--grading", c.grading, "mesh grading exponent")->envname("FRACSOB_GRADING");
    sub->add_option("--mesh", c.mesh, "graded | two_sided")->envname("FRACSOB_MESH");
    sub->add_option("--gauss", c.gauss, "Gauss order per element")->envname("FRACSOB_GAUSS");
    sub->add_option("--diag-levels", c.diag_levels, "geometric refinement levels near the diagonal")
        ->envname("FRACSOB_DIAG_LEVELS");
    sub->add_option("--angular", c.angular, "angular Gauss order")->envname("FRACSOB_ANGULAR");
    sub->add_option("--lambda", c.lambda, "constant potential h = -lambda");
    sub->add_option("--h-file", c.h_file, "potential samples, one 'r value' pair per line");
    sub->add_option("--k-grid", c.k_grid, "cutoff indices")->delimiter(',')->envname("FRACSOB_K_GRID");
    sub->add_option("--eps-grid", c.eps_grid, "bubble scales")->delimiter(',')->envname("FRACSOB_EPS_GRID");
    sub->add_option("--riesz-convention", c.convention, "standard | paper")
        ->envname("FRACSOB_RIESZ_CONVENTION");
    sub->add_option("--out", c.out, "output path (stdout when omitted)");
    sub->add_option("--format", c.format, "json | csv")->envname("FRACSOB_FORMAT");
    sub->add_option("--jobs", c.jobs, "assembly threads")->envname("FRACSOB_JOBS");
    sub->add_flag("--deterministic", c.deterministic, "sequential reductions")
        ->envname("FRACSOB_DETERMINISTIC");
    sub->add_option("--tol", c.tol, "relative decrease tolerance of the minimizer");
    sub->add_option("--max-iter", c.max_iter, "iteration cap of the minimizer");
  };

  auto* sobolev = app.add_subcommand("sobolev", "minimize the regional quotient once");
  common(sobolev);
  sobolev->add_flag("--strict", c.strict, "also run the strict subcritical check");
  sobolev->add_flag("--diagnostic", c.diagnostic, "allow s in (0,1)");

  auto* sweep = app.add_subcommand("sweep", "minimize along a list of fractional orders");
  common(sweep);
  sweep->add_option("--s-list", c.s_list, "fractional orders")->delimiter(',');
  sweep->add_flag("--plot", c.plot, "two-column 's value' output");
  sweep->add_flag("--diagnostic", c.diagnostic, "allow s in (0,1)");

  auto* mass = app.add_subcommand("mass", "regular part of the Green function at the origin");
  common(mass);
  mass->add_option("--lambda-list", c.lambda_list, "lambda values for a crossing sweep")
      ->delimiter(',');
  mass->add_option("--r-chi", c.r_chi, "plateau radius of the cutoff chi");

  auto* oracle = app.add_subcommand("oracle", "one-dimensional closed-form oracles");
  common(oracle);
  oracle->add_option("--threshold", c.threshold, "maximal relative error");

  auto* bubble = app.add_subcommand("bubble-check", "weak Euler-Lagrange residual of the bubble");
  common(bubble);
  bubble->add_option("--eps", c.eps, "bubble scale");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::Success& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return kInvalid;
  }

  for (auto* sub : app.get_subcommands())
    c.command = sub->get_name();

  try
  {
    validate(c);
    if (c.command == "sobolev")
      return cmd_sobolev(c);
    if (c.command == "sweep")
      return cmd_sweep(c);
    if (c.command == "mass")
      return cmd_mass(c);
    if (c.command == "oracle")
      return cmd_oracle(c);
    return cmd_bubble_check(c);
  }
  catch (const QuadratureError& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  catch (const DomainError& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace fracsob::cli
