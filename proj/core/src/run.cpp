#include "dve/run.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dve/convexity.hpp"
#include "dve/csv.hpp"
#include "dve/errors.hpp"
#include "dve/primal_ref.hpp"
#include "dve/rng.hpp"

namespace dve {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, key + ": expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, key + ": expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, key + ": expected true/false, got '" + value + "'");
}

// FNV-1a over the raw bytes of the doubles, in a fixed order.
std::string point_hash(const std::vector<double>& values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (!suite.empty() && suite != "convexity") {
    throw ConfigError("suite", "suite: unknown suite '" + suite +
                                   "'; available: convexity");
  }
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) {
      throw ConfigError(name,
                        std::string(name) + " must be positive, got " +
                            format_g17(v));
    }
  };
  positive("c_u", aux.c_u);
  positive("c_e", aux.c_e);
  positive("c_v", aux.c_v);
  positive("rho0", aux.rho0);
  positive("tol", newton.tol);
  if (newton.max_iter < 1) {
    throw ConfigError("max_iter", "max_iter must be >= 1");
  }
  if (nx < 1) throw ConfigError("nx", "nx must be >= 1");
  if (nt < 1) throw ConfigError("nt", "nt must be >= 1");
  if (t_final == 0.0) throw ConfigError("T", "T must be positive");
  if (samples < 1) throw ConfigError("samples", "samples must be >= 1");
  for (int ne : elements) {
    if (ne < 1) throw ConfigError("elements", "elements must all be >= 1");
  }
  if (suite.empty()) {
    try {
      CaseOptions opt;
      opt.aux = aux;
      build_case(case_name, opt);
    } catch (const UnknownCaseError& err) {
      throw ConfigError("case", err.what());
    }
  }
}

void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "case") {
    config.case_name = value;
  } else if (key == "suite") {
    config.suite = value;
  } else if (key == "elements") {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(static_cast<int>(parse_int("elements", trim(item))));
    }
    if (out.empty()) {
      throw ConfigError("elements", "elements: expected a comma list");
    }
    config.elements = out;
  } else if (key == "nx") {
    config.nx = static_cast<int>(parse_int(key, value));
  } else if (key == "nt") {
    config.nt = static_cast<int>(parse_int(key, value));
  } else if (key == "T") {
    config.t_final = parse_double(key, value);
  } else if (key == "c_u") {
    config.aux.c_u = parse_double(key, value);
  } else if (key == "c_e") {
    config.aux.c_e = parse_double(key, value);
  } else if (key == "c_v") {
    config.aux.c_v = parse_double(key, value);
  } else if (key == "rho0") {
    config.aux.rho0 = parse_double(key, value);
  } else if (key == "tol") {
    config.newton.tol = parse_double(key, value);
  } else if (key == "max_iter") {
    config.newton.max_iter = static_cast<int>(parse_int(key, value));
  } else if (key == "compare_primal") {
    config.compare_primal = parse_bool(key, value);
  } else if (key == "samples") {
    config.samples = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else {
    throw ConfigError(key, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config_stream(std::istream& in, const std::string& origin) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": expected key=value";
      throw ConfigError("config", msg.str());
    }
    apply_override(config, trim(line.substr(0, eq)),
                   trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open config file '" + path + "'");
  }
  return parse_config_stream(in, path);
}

void write_static_fields_csv(std::ostream& out, const StaticRunReport& report,
                             const CaseSpec& spec) {
  out << "x,u_hat,e_hat,u_target,e_target\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < report.node_x.size(); ++i) {
    const double x = report.node_x[i];
    out << format_g17(x) << ',' << format_g17(report.u_hat[i]) << ','
        << format_g17(report.e_hat[i]) << ','
        << format_g17(spec.has_target ? spec.u_target(x) : nan) << ','
        << format_g17(spec.has_target ? spec.e_target(x) : nan) << '\n';
  }
}

void write_dynamic_fields_csv(std::ostream& out,
                              const DynamicRunReport& report,
                              const CaseSpec& spec) {
  out << "x,u_hat,e_hat,u_target,e_target,t\n";
  const PiecewisePoly& e_ref =
      spec.e_reference.empty() ? spec.dyn.e0 : spec.e_reference;
  const PiecewisePoly u_ref = e_ref.antiderivative(0.0);
  const int nxp = static_cast<int>(report.x_nodes.size());
  for (std::size_t j = 0; j < report.t_nodes.size(); ++j) {
    for (int i = 0; i < nxp; ++i) {
      const std::size_t node = j * nxp + i;
      const double x = report.x_nodes[i];
      out << format_g17(x) << ',' << format_g17(report.u_nodal[node]) << ','
          << format_g17(report.e_nodal[node]) << ',' << format_g17(u_ref(x))
          << ',' << format_g17(e_ref(x)) << ','
          << format_g17(report.t_nodes[j]) << '\n';
    }
  }
}

void write_refinement_csv(std::ostream& out,
                          const std::vector<RefinementRow>& rows,
                          const AuxParams& aux) {
  out << "n_elements,err_u_l1,err_e_l1,c_u,c_e,c_v,rho0\n";
  for (const auto& row : rows) {
    out << row.n_elements << ',' << format_g17(row.err_u) << ','
        << format_g17(row.err_e) << ',' << format_g17(aux.c_u) << ','
        << format_g17(aux.c_e) << ',' << format_g17(aux.c_v) << ','
        << format_g17(aux.rho0) << '\n';
  }
}

void write_newton_history(std::ostream& out, const NewtonReport& report) {
  out << "iteration,residual_max_norm\n";
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    out << k << ',' << format_g17(report.residual_history[k]) << '\n';
  }
  out << "# converged=" << (report.converged ? "true" : "false");
  if (!report.failure.empty()) out << " failure=" << report.failure;
  out << "\n";
}

ConvexityCheckResult run_convexity_suite(int samples, std::uint64_t seed,
                                         std::ostream& svk_csv,
                                         std::ostream& neo_csv) {
  ConvexityCheckResult result;
  result.samples = samples;
  Rng rng(seed);
  const SvkParams params{1.0, 0.5, 2};
  const double scales[3] = {0.3, 1.0, 3.0};

  const auto sample_matrix = [&](double scale) {
    Eigen::MatrixXd M(2, 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) M(r, c) = scale * rng.normal();
    }
    return M;
  };

  // --- Saint Venant-Kirchhoff ---
  svk_csv << "point_hash,g,witness_bound,global_bound,witness_margin,"
             "global_margin\n";
  std::vector<SvkDualPoint> svk_points;
  std::vector<double> svk_values;
  std::vector<Eigen::MatrixXd> svk_argmax;
  for (int k = 0; k < samples; ++k) {
    const double scale = scales[k % 3];
    SvkDualPoint p;
    p.A = sample_matrix(scale);
    p.B = sample_matrix(scale);
    p.a = Eigen::VectorXd(2);
    p.a << scale * rng.normal(), scale * rng.normal();
    Eigen::MatrixXd argmax;
    const double g = g_svk(p, params, {}, &argmax);
    const double wb = svk_witness_bound(p, params);
    const double gb = svk_lower_bound(p, params);
    const double tol = 1e-9 * std::max(1.0, std::abs(g));
    if (g + tol < wb || g + tol < gb) ++result.lower_violations;
    svk_csv << point_hash({p.A(0, 0), p.A(0, 1), p.A(1, 0), p.A(1, 1),
                           p.a[0], p.a[1], p.B(0, 0), p.B(0, 1), p.B(1, 0),
                           p.B(1, 1)})
            << ',' << format_g17(g) << ',' << format_g17(wb) << ','
            << format_g17(gb) << ',' << format_g17(g - wb) << ','
            << format_g17(g - gb) << '\n';
    svk_points.push_back(p);
    svk_values.push_back(g);
    svk_argmax.push_back(argmax);
  }

  // Convex-combination checks with shared maximizer pools so that the
  // numeric sup cannot fake a violation by under-resolving an endpoint.
  const auto svk_value_at = [&](const SvkDualPoint& p,
                                const Eigen::MatrixXd& F) {
    return 0.75 * std::pow(p.a.norm(), 4.0 / 3.0) +
           svk_objective(p, params, F);
  };
  for (std::size_t k = 0; k + 1 < svk_points.size(); k += 2) {
    const SvkDualPoint& p1 = svk_points[k];
    const SvkDualPoint& p2 = svk_points[k + 1];
    for (double t : {0.25, 0.5, 0.75}) {
      SvkDualPoint mid;
      mid.A = t * p1.A + (1.0 - t) * p2.A;
      mid.a = t * p1.a + (1.0 - t) * p2.a;
      mid.B = t * p1.B + (1.0 - t) * p2.B;
      Eigen::MatrixXd mid_argmax;
      const double gm = g_svk(mid, params, {}, &mid_argmax);
      const double g1 =
          std::max(svk_values[k], svk_value_at(p1, mid_argmax));
      const double g2 =
          std::max(svk_values[k + 1], svk_value_at(p2, mid_argmax));
      const double combo = t * g1 + (1.0 - t) * g2;
      if (gm > combo + 1e-6 * std::max(1.0, std::abs(combo))) {
        ++result.convexity_violations;
      }
    }
  }

  // --- Incompressible neo-Hookean ---
  neo_csv << "point_hash,s,g,lower_bound,upper_bound,lower_margin,"
             "upper_margin,expect_infinite,flagged_infinite\n";
  std::vector<NeoHookeanDualPoint> neo_points;
  std::vector<double> neo_values;
  std::vector<Eigen::Matrix2d> neo_argmax;
  for (int k = 0; k < samples; ++k) {
    const double scale = scales[(k + 1) % 3];
    NeoHookeanDualPoint p;
    p.A = sample_matrix(scale);
    p.B = sample_matrix(scale);
    p.a = Eigen::Vector2d(scale * rng.normal(), scale * rng.normal());
    const double u = rng.uniform();
    if (u < 0.8) {
      p.s = rng.uniform(-0.9, 0.9);
    } else if (u < 0.9) {
      p.s = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.9, 1.0);
    } else {
      p.s = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(1.0, 3.0);
    }
    const bool expect_inf = std::abs(p.s) > 1.0;
    Eigen::Matrix2d argmax = Eigen::Matrix2d::Zero();
    const double g = g_neo_hookean(p, {}, &argmax);
    const bool flagged_inf = std::isinf(g);
    const double lb = expect_inf
                          ? -std::numeric_limits<double>::infinity()
                          : neo_lower_bound(p);
    const double ub = (std::abs(p.s) <= 0.9)
                          ? neo_upper_bound(p)
                          : std::numeric_limits<double>::infinity();
    if (expect_inf != flagged_inf) ++result.infinity_misses;
    if (!expect_inf) {
      const double tol = 1e-9 * std::max(1.0, std::abs(g));
      if (g + tol < lb) ++result.lower_violations;
      if (std::abs(p.s) <= 0.9 && g > ub + tol) ++result.upper_violations;
    }
    neo_csv << point_hash({p.A(0, 0), p.A(0, 1), p.A(1, 0), p.A(1, 1),
                           p.a[0], p.a[1], p.B(0, 0), p.B(0, 1), p.B(1, 0),
                           p.B(1, 1), p.s})
            << ',' << format_g17(p.s) << ',' << format_g17(g) << ','
            << format_g17(lb) << ',' << format_g17(ub) << ','
            << format_g17(g - lb) << ',' << format_g17(ub - g) << ','
            << (expect_inf ? 1 : 0) << ',' << (flagged_inf ? 1 : 0) << '\n';
    if (!expect_inf && std::abs(p.s) <= 0.9) {
      neo_points.push_back(p);
      neo_values.push_back(g);
      neo_argmax.push_back(argmax);
    }
  }

  const auto neo_value_at = [&](const NeoHookeanDualPoint& p,
                                const Eigen::Matrix2d& F) {
    return 0.5 * p.a.squaredNorm() - p.s + neo_objective(p, F);
  };
  for (std::size_t k = 0; k + 1 < neo_points.size(); k += 2) {
    const NeoHookeanDualPoint& p1 = neo_points[k];
    const NeoHookeanDualPoint& p2 = neo_points[k + 1];
    for (double t : {0.25, 0.5, 0.75}) {
      NeoHookeanDualPoint mid;
      mid.A = t * p1.A + (1.0 - t) * p2.A;
      mid.a = t * p1.a + (1.0 - t) * p2.a;
      mid.B = t * p1.B + (1.0 - t) * p2.B;
      mid.s = t * p1.s + (1.0 - t) * p2.s;
      Eigen::Matrix2d mid_argmax;
      const double gm = g_neo_hookean(mid, {}, &mid_argmax);
      const double g1 = std::max(neo_values[k], neo_value_at(p1, mid_argmax));
      const double g2 =
          std::max(neo_values[k + 1], neo_value_at(p2, mid_argmax));
      const double combo = t * g1 + (1.0 - t) * g2;
      if (gm > combo + 1e-6 * std::max(1.0, std::abs(combo))) {
        ++result.convexity_violations;
      }
    }
  }
  return result;
}

namespace {

void write_case_metadata(std::ostream& out, const RunConfig& config,
                         const CaseSpec& spec) {
  out << "case=" << spec.name << "\n";
  out << "c_u=" << format_g17(spec.aux.c_u) << " c_e="
      << format_g17(spec.aux.c_e) << " c_v=" << format_g17(spec.aux.c_v)
      << " rho0=" << format_g17(spec.aux.rho0) << "\n";
  out << "newton_tol=" << format_g17(config.newton.tol)
      << " max_iter=" << config.newton.max_iter << "\n";
}

int run_static(const RunConfig& config, const CaseSpec& spec,
               const std::filesystem::path& dir, std::ostream& log) {
  const std::vector<int> meshes =
      config.elements.empty() ? spec.refinement : config.elements;
  std::vector<StaticRunReport> reports;
  for (int ne : meshes) {
    reports.push_back(run_static_case(spec, ne, config.newton));
    const StaticRunReport& rep = reports.back();
    {
      std::ofstream f(dir / ("fields_" + spec.name + "_" +
                             std::to_string(ne) + ".csv"));
      write_static_fields_csv(f, rep, spec);
    }
    {
      std::ofstream f(dir / ("newton_" + spec.name + "_" +
                             std::to_string(ne) + ".txt"));
      write_newton_history(f, rep.newton);
    }
    log << spec.name << " ne=" << ne
        << " iters=" << rep.newton.iterations
        << " |R|=" << format_g17(rep.newton.residual_history.back());
    if (spec.has_target) {
      log << " err_u=" << format_g17(rep.err_u)
          << " err_e=" << format_g17(rep.err_e);
    }
    log << "\n";
  }

  std::vector<RefinementRow> rows;
  if (spec.has_target) {
    for (const auto& rep : reports) {
      rows.push_back({rep.n_elements, rep.err_u, rep.err_e});
    }
  } else {
    const int ref_ne =
        spec.reference_elements > 0 ? spec.reference_elements : 8000;
    const StaticRunReport ref = run_static_case(spec, ref_ne, config.newton);
    const Mesh1D ref_mesh = Mesh1D::uniform(ref_ne);
    for (const auto& rep : reports) {
      const Mesh1D mesh = Mesh1D::uniform(rep.n_elements);
      rows.push_back(
          {rep.n_elements,
           l1_error_between(rep.u_hat, mesh, ref.u_hat, ref_mesh),
           l1_error_between(rep.e_hat, mesh, ref.e_hat, ref_mesh)});
    }
    log << spec.name << " self-convergence reference ne=" << ref_ne << "\n";
  }
  {
    std::ofstream f(dir / ("table_" + spec.name + ".csv"));
    write_refinement_csv(f, rows, spec.aux);
  }
  {
    std::ofstream f(dir / ("run_" + spec.name + ".txt"));
    write_case_metadata(f, config, spec);
    f << "meshes=";
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      f << (i ? "," : "") << meshes[i];
    }
    f << "\n";
    for (const auto& rep : reports) {
      f << "ne=" << rep.n_elements << " iters=" << rep.newton.iterations
        << " mapping_residual=" << format_g17(rep.max_mapping_residual)
        << "\n";
    }
  }
  return 0;
}

int run_dynamic(const RunConfig& config, const CaseSpec& spec,
                const std::filesystem::path& dir, std::ostream& log) {
  const DynamicRunReport rep =
      run_dynamic_case(spec, config.nx, config.nt, config.newton);
  const std::string tag =
      spec.name + "_" + std::to_string(config.nx) + "x" +
      std::to_string(config.nt);
  {
    std::ofstream f(dir / ("fields_" + tag + ".csv"));
    write_dynamic_fields_csv(f, rep, spec);
  }
  {
    std::ofstream f(dir / ("newton_" + tag + ".txt"));
    write_newton_history(f, rep.newton);
  }
  const bool dual_stable = rep.stability_metric < 1e-2;
  log << spec.name << " nx=" << rep.nx << " nt=" << rep.nt
      << " T=" << format_g17(rep.t_final)
      << " iters=" << rep.newton.iterations
      << " stability_metric=" << format_g17(rep.stability_metric) << "\n";

  // Per-slab deviation series for the dual solve.
  {
    const PiecewisePoly& e_ref =
        spec.e_reference.empty() ? spec.dyn.e0 : spec.e_reference;
    std::vector<double> slab_max(static_cast<std::size_t>(rep.nt), 0.0);
    for (std::size_t k = 0; k < rep.qp.e.size(); ++k) {
      auto& slot = slab_max[rep.qp.cell_j[k]];
      slot = std::max(slot, std::abs(rep.qp.e[k] - e_ref(rep.qp.x[k])));
    }
    std::ofstream f(dir / ("dual_series_" + spec.name + ".csv"));
    f << "t,max_abs_e_deviation\n";
    for (int j = 0; j < rep.nt; ++j) {
      const double tmid = 0.5 * (rep.t_nodes[j] + rep.t_nodes[j + 1]);
      f << format_g17(tmid) << ',' << format_g17(slab_max[j]) << '\n';
    }
  }

  bool primal_blew_up = false;
  if (config.compare_primal) {
    // Twice the dual grid so the grain-boundary layers are resolved.
    const Mesh1D mesh = Mesh1D::uniform(2 * config.nx);
    const double dt = cfl_time_step(spec.dyn, mesh, spec.aux.rho0);
    const int n_steps =
        static_cast<int>(std::ceil(spec.dyn.t_final / dt)) + 1;
    const PrimalRunResult primal =
        evolve_primal(spec.dyn, mesh, dt, n_steps, spec.aux.rho0);
    primal_blew_up = primal.blew_up;
    std::ofstream f(dir / ("primal_series_" + spec.name + ".csv"));
    f << "t,max_abs_e\n";
    for (std::size_t k = 0; k < primal.times.size(); ++k) {
      f << format_g17(primal.times[k]) << ','
        << format_g17(primal.max_abs_strain[k]) << '\n';
    }
    log << "verdict: dual: " << (dual_stable ? "stable" : "unstable")
        << ", primal: " << (primal.blew_up ? "blow-up" : "bounded") << "\n";
  }
  {
    std::ofstream f(dir / ("run_" + tag + ".txt"));
    write_case_metadata(f, config, spec);
    f << "nx=" << rep.nx << " nt=" << rep.nt << " T="
      << format_g17(rep.t_final) << "\n";
    f << "stability_metric=" << format_g17(rep.stability_metric) << "\n";
    f << "mapping_residual=" << format_g17(rep.max_mapping_residual) << "\n";
    if (config.compare_primal) {
      f << "verdict dual=" << (dual_stable ? "stable" : "unstable")
        << " primal=" << (primal_blew_up ? "blow-up" : "bounded") << "\n";
    }
  }
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  config.validate();
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);

  if (!config.suite.empty()) {
    std::ofstream svk_csv(dir / "convexity_svk.csv");
    std::ofstream neo_csv(dir / "convexity_neo.csv");
    const ConvexityCheckResult res =
        run_convexity_suite(config.samples, config.seed, svk_csv, neo_csv);
    log << "convexity suite: samples=" << res.samples
        << " lower_violations=" << res.lower_violations
        << " upper_violations=" << res.upper_violations
        << " infinity_misses=" << res.infinity_misses
        << " convexity_violations=" << res.convexity_violations << "\n";
    const bool ok = res.lower_violations == 0 && res.upper_violations == 0 &&
                    res.infinity_misses == 0 &&
                    res.convexity_violations == 0;
    return ok ? 0 : 2;
  }

  CaseOptions opt;
  opt.aux = config.aux;
  opt.t_final = config.t_final;
  const CaseSpec spec = build_case(config.case_name, opt);
  try {
    return spec.dynamic ? run_dynamic(config, spec, dir, log)
                        : run_static(config, spec, dir, log);
  } catch (const SolveError& err) {
    log << "error: " << err.what() << "\n";
    return 2;
  }
}

}  // namespace dve
