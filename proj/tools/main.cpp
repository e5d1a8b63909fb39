// pnlevp: offline/online eigenvalue extraction for parametric nonlinear
// eigenvalue problems.
//
// Exit codes: 0 ok, 1 I/O, 2 usage or assumption violation, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnlevp/benchmarks.hpp"
#include "pnlevp/parallel.hpp"
#include "pnlevp/solver.hpp"

namespace {

using namespace pnlevp;
using nlohmann::json;

enum Exit : int { kOk = 0, kIo = 1, kUsage = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Real> parse_reals(const std::string& text, char sep, std::size_t count,
                              const std::string& flag) {
  std::vector<Real> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != count)
    throw UsageError(flag + ": expected " + std::to_string(count) + " values, got '" + text + "'");
  return out;
}

ContourDomain parse_domain(const std::string& disk, const std::string& ellipse,
                           const std::string& what) {
  if (!disk.empty() && !ellipse.empty())
    throw UsageError("give either a disk or an ellipse for the " + what + ", not both");
  try {
    if (!disk.empty()) {
      const auto v = parse_reals(disk, ',', 3, "--disk");
      return ContourDomain::disk(Complex(v[0], v[1]), v[2]);
    }
    if (!ellipse.empty()) {
      const auto v = parse_reals(ellipse, ',', 4, "--ellipse");
      return ContourDomain::ellipse(Complex(v[0], v[1]), v[2], v[3]);
    }
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("missing " + what + " (--disk c_re,c_im,radius or --ellipse c_re,c_im,s_re,s_im)");
}

std::pair<Real, Real> parse_range(const std::string& text, const std::string& flag) {
  const auto v = parse_reals(text, ':', 2, flag);
  if (!(v[0] <= v[1])) throw UsageError(flag + ": range must satisfy a <= b");
  return {v[0], v[1]};
}

std::string num(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

ProblemPtr builtin_problem(const std::string& name) {
  try {
    return make_problem(name);
  } catch (const ArgumentError&) {
    return nullptr;
  }
}

OfflineModel read_model(const std::string& path) {
  try {
    return load_model(path);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
}

// Whitespace-delimited columns: p, Re/Im of each eigenvalue, max residual.
std::string sweep_table(const std::vector<SweepRow>& rows, int m, const std::string& title) {
  std::ostringstream os;
  os << "# " << title << "\n# p";
  for (int k = 1; k <= m; ++k) os << " re_lambda" << k << " im_lambda" << k;
  os << " max_residual\n";
  for (const auto& row : rows) {
    os << num(row.p_hat.real());
    for (int k = 0; k < m; ++k) {
      if (static_cast<std::size_t>(k) < row.eigenvalues.size())
        os << ' ' << num(row.eigenvalues[static_cast<std::size_t>(k)].real()) << ' '
           << num(row.eigenvalues[static_cast<std::size_t>(k)].imag());
      else
        os << " nan nan";
    }
    os << ' ' << num(row.max_residual) << '\n';
  }
  return os.str();
}

json sweep_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json eig = json::array();
    for (const Complex z : row.eigenvalues) eig.push_back({z.real(), z.imag()});
    out.push_back({{"p", row.p_hat.real()},
                   {"eigenvalues", eig},
                   {"in_domain", row.in_domain},
                   {"max_residual", std::isnan(row.max_residual) ? json(nullptr)
                                                                 : json(row.max_residual)}});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct OfflineArgs {
  std::string problem, disk, ellipse, sample_disk, sample_ellipse, p_range, out;
  int q = 40, r = 20, n_nodes = 256;
  std::uint64_t seed = 1;
  double inflation = 4.0 / 3.0;
  double fit_tol = 1e-12, rank_tol = 1e-10;
  int max_p_nodes = 0;
};

int cmd_offline(const OfflineArgs& a) {
  const ContourDomain domain = parse_domain(a.disk, a.ellipse, "target domain");
  const auto [p_min, p_max] = parse_range(a.p_range, "--p");
  if (a.q < 2) throw UsageError("--q must be at least 2");
  if (a.r < 1 || a.n_nodes < 2) throw UsageError("--r must be >= 1 and --N >= 2");
  if (!(a.fit_tol > 0.0) || !(a.rank_tol > 0.0)) throw UsageError("tolerances must be positive");
  const ProblemPtr problem = builtin_problem(a.problem);
  if (!problem) {
    std::string list;
    for (const auto& n : problem_names()) list += " " + n;
    throw UsageError("unknown problem '" + a.problem + "'; available:" + list);
  }
  SamplingConfig config;
  try {
    if (!a.sample_disk.empty() || !a.sample_ellipse.empty())
      config = sampling_on(parse_domain(a.sample_disk, a.sample_ellipse, "sampling contour"), a.r,
                           a.q, p_min, p_max, problem->dim(), a.seed);
    else
      config = default_sampling(domain, a.r, a.q, p_min, p_max, problem->dim(), a.seed,
                                a.inflation);
    config.validate(domain);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  {
    // Fail on an unwritable destination before the expensive work.
    std::filesystem::path probe = a.out;
    probe += ".tmp";
    std::ofstream test(probe);
    if (!test) throw IoError("cannot write '" + a.out + "'");
    test.close();
    std::filesystem::remove(probe);
  }

  FitOptions fit;
  fit.fit_tol = a.fit_tol;
  fit.rank_tol = a.rank_tol;
  fit.max_p_nodes = a.max_p_nodes;
  const auto t0 = std::chrono::steady_clock::now();
  const OfflineModel model = offline(*problem, domain, config, a.n_nodes, fit);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!model.converged)
    std::cerr << "warning: rational fit stopped at relative error "
              << model.scalar_model.max_error << " (tolerance " << a.fit_tol << ")\n";
  save_model(model, a.out);
  std::cout << "m = " << model.m << "\n"
            << "degrees: z " << model.scalar_model.z_degree() << ", p "
            << model.scalar_model.p_degree() << "\n"
            << "max fit error = " << model.scalar_model.max_error << "\n"
            << "converged = " << (model.converged ? "yes" : "no") << "\n"
            << "wall time = " << secs << " s\n";
  return kOk;
}

struct OnlineArgs {
  std::string model, json_out;
  double p = 0.0;
  std::optional<double> rank_tol;
  bool no_cap = false;
};

int cmd_online(const OnlineArgs& a) {
  const OfflineModel model = read_model(a.model);
  const EigenSolution sol = online(model, a.p, a.rank_tol, !a.no_cap);
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& d : sol.diagnostics) std::cerr << "note: " << d << "\n";
  const ProblemPtr problem = builtin_problem(model.problem_name);
  std::vector<Real> res;
  if (problem && !sol.eigenvalues.empty()) res = residuals(*problem, sol);

  char line[160];
  std::snprintf(line, sizeof line, "%24s %24s %6s %12s\n", "re", "im", "in", "residual");
  std::cout << line;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    std::snprintf(line, sizeof line, "%24.16e %24.16e %6s %12.4e\n", sol.eigenvalues[k].real(),
                  sol.eigenvalues[k].imag(), sol.in_domain[k] ? "yes" : "no",
                  res.empty() ? std::nan("") : res[k]);
    std::cout << line;
  }
  if (!a.json_out.empty()) {
    json eig = json::array();
    for (const Complex z : sol.eigenvalues) eig.push_back({z.real(), z.imag()});
    const json doc = {{"p", a.p},
                      {"eigenvalues", eig},
                      {"in_domain", sol.in_domain},
                      {"residuals", res},
                      {"rank", sol.rank},
                      {"warnings", sol.warnings},
                      {"diagnostics", sol.diagnostics}};
    write_file(a.json_out, doc.dump(1) + "\n");
  }
  return kOk;
}

struct SweepArgs {
  std::string model, range, out, json_out;
  int n_test = 200;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.n_test < 1) throw UsageError("--n must be at least 1");
  std::optional<std::pair<Real, Real>> range;
  if (!a.range.empty()) range = parse_range(a.range, "--range");
  const OfflineModel model = read_model(a.model);
  const auto [lo, hi] = range.value_or(std::pair<Real, Real>{model.p_min(), model.p_max()});
  const ProblemPtr problem = builtin_problem(model.problem_name);
  const auto rows = parameter_sweep(model, uniform_parameters(lo, hi, a.n_test), problem.get());
  for (const auto& row : rows)
    for (const auto& w : row.warnings) std::cerr << "warning: " << w << "\n";
  const std::string table = sweep_table(rows, model.m, model.problem_name + " sweep");
  if (a.out.empty())
    std::cout << table;
  else
    write_file(a.out, table);
  if (!a.json_out.empty()) write_file(a.json_out, sweep_json(rows).dump(1) + "\n");
  return kOk;
}

struct BenchArgs {
  std::string name, out_dir = ".";
  bool json = false;
};

int cmd_bench(const BenchArgs& a) {
  try {
    benchmark_setup(a.name);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const BenchReport rep = run_benchmark(a.name);
  std::cout << a.name << ": m = " << rep.model.m << ", degrees z " << rep.model.scalar_model.z_degree()
            << " / p " << rep.model.scalar_model.p_degree() << ", offline " << rep.offline_seconds
            << " s, total " << rep.total_seconds << " s\n";
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.label << ": " << c.detail << "\n";
  const std::filesystem::path dir = a.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  write_file(dir / (a.name + ".dat"), sweep_table(rep.sweep, rep.model.m, a.name + " sweep"));
  if (a.json) write_file(dir / (a.name + ".json"), sweep_json(rep.sweep).dump(1) + "\n");
  std::cout << (rep.passed() ? "PASS" : "FAIL") << "\n";
  return rep.passed() ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric nonlinear eigenvalue solver (contour sampling, Loewner realization, "
               "bivariate rational surrogates)"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: PNLEVP_THREADS or all cores)");

  OfflineArgs off;
  auto* c_off = app.add_subcommand("offline", "Sample, check the eigenvalue count and fit a model");
  c_off->add_option("--problem", off.problem, "linear-demo | delay | damped-string | synthetic")->required();
  c_off->add_option("--disk", off.disk, "Target disk c_re,c_im,radius");
  c_off->add_option("--ellipse", off.ellipse, "Target ellipse c_re,c_im,s_re,s_im");
  c_off->add_option("--sample-disk", off.sample_disk, "Disk carrying the sample points");
  c_off->add_option("--sample-ellipse", off.sample_ellipse, "Ellipse carrying the sample points");
  c_off->add_option("--inflation", off.inflation, "Sampling contour scale when none is given")
      ->capture_default_str();
  c_off->add_option("--p", off.p_range, "Parameter range a:b")->required();
  c_off->add_option("--q", off.q, "Parameter samples")->capture_default_str();
  c_off->add_option("--r", off.r, "Probing directions")->capture_default_str();
  c_off->add_option("--N", off.n_nodes, "Quadrature nodes")->capture_default_str();
  c_off->add_option("--seed", off.seed, "Seed for the probing directions")->capture_default_str();
  c_off->add_option("--fit-tol", off.fit_tol, "Relative rational fit tolerance")->capture_default_str();
  c_off->add_option("--rank-tol", off.rank_tol, "Relative rank tolerance")->capture_default_str();
  c_off->add_option("--max-p-nodes", off.max_p_nodes, "Parameter node budget (0: all)");
  c_off->add_option("--out", off.out, "Model file")->required();

  OnlineArgs on;
  auto* c_on = app.add_subcommand("online", "Eigenvalues of a fitted model at one parameter");
  c_on->add_option("--model", on.model, "Model file")->required();
  c_on->add_option("--p", on.p, "Parameter value")->required();
  c_on->add_option("--rank-tol", on.rank_tol, "Override the model's rank tolerance");
  c_on->add_flag("--no-rank-cap", on.no_cap, "Do not cap the realization rank at m");
  c_on->add_option("--json", on.json_out, "Also write the result as JSON to this file");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Eigenvalue trajectories over a parameter range");
  c_sw->add_option("--model", sw.model, "Model file")->required();
  c_sw->add_option("--range", sw.range, "Parameter range a:b (default: the sampled range)");
  c_sw->add_option("--n", sw.n_test, "Number of test parameters")->capture_default_str();
  c_sw->add_option("--out", sw.out, "Data file (default: standard output)");
  c_sw->add_option("--json", sw.json_out, "Also write the rows as JSON to this file");

  BenchArgs be;
  auto* c_be = app.add_subcommand("bench", "Run a reference experiment and check it");
  std::string bench_list;
  for (const auto& n : benchmark_names()) bench_list += (bench_list.empty() ? "" : " | ") + n;
  c_be->add_option("name", be.name, bench_list)->required();
  c_be->add_option("--out-dir", be.out_dir, "Directory for the sweep files")->capture_default_str();
  c_be->add_flag("--json", be.json, "Also write the sweep as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) {
    const std::string value = std::to_string(threads);
    setenv("PNLEVP_THREADS", value.c_str(), 1);
  }

  try {
    if (*c_off) return cmd_offline(off);
    if (*c_on) return cmd_online(on);
    if (*c_sw) return cmd_sweep(sw);
    if (*c_be) return cmd_bench(be);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const AssumptionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
