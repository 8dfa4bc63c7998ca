#include "cli.hpp"

#include "qfield/channel.hpp"
#include "qfield/errors.hpp"
#include "qfield/propagation.hpp"
#include "qfield/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qfield::cli {

namespace {

struct Shared {
  std::string out;
  int jobs = 0;
  double rel_tol = 1e-10;
  double k_max = 0.0;
  double eps = 0.1;
  double delta = 10.0;
};

struct CapacityArgs {
  double lambda_min = 0.1, lambda_max = 1000.0;
  int points = 30;
  bool plot = false;
};

struct SmearingArgs {
  int dim = 3;
  int points = 1001;
  bool peak_normalize = false;
  bool plot = false;
};

struct BroadcastArgs {
  double r0_min = 0.2, r0_max = 20.0;
  int r0_points = 100;
  std::vector<double> lambdas = {10.0, 1000.0};
  bool plot = false;
};

struct VerifyArgs {
  std::string json;
  std::vector<std::string> suites;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Binary mode keeps LF line endings on every platform.
std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw BadParameter("cannot write " + path);
  return f;
}

std::string with_default(const std::string& out, const char* fallback) { return out.empty() ? fallback : out; }

std::string script_path(const std::string& csv) {
  std::filesystem::path p(csv);
  p.replace_extension(".gp");
  return p.string();
}

ChannelConfig base_config(const Shared& s) {
  ChannelConfig c;
  c.delta = s.delta;
  c.rel_tol = s.rel_tol;
  c.k_max = s.k_max;
  c.bob.eps = s.eps;
  return c;
}

void check_shared(const Shared& s) {
  if (!(s.rel_tol > 0.0)) throw BadParameter("--rel-tol must be positive");
  if (s.k_max < 0.0) throw BadParameter("--kmax must be non-negative");
  if (!(s.eps > 0.0)) throw BadParameter("--eps must be positive");
  if (!(s.delta >= 0.0)) throw BadParameter("--delta must be non-negative");
}

int run_capacity(const Shared& s, const CapacityArgs& a, std::ostream& out) {
  check_shared(s);
  if (a.points < 2) throw BadParameter("--points must be at least 2");
  const auto grid = log_grid(a.lambda_min, a.lambda_max, a.points);
  const auto rows = capacity_sweep(grid, base_config(s), s.jobs);
  const std::string path = with_default(s.out, "capacity.csv");
  auto f = open_out(path);
  f << "lambda_phi_over_sigma,ic,ic_clamped\n";
  for (const auto& r : rows) f << num(r.lambda_over_sigma) << ',' << num(r.ic) << ',' << num(r.ic_clamped) << '\n';
  out << "wrote " << path << " (" << rows.size() << " rows)\n";
  if (a.plot) {
    const std::string gp = script_path(path);
    auto g = open_out(gp);
    g << "set datafile separator ','\nset logscale x\nset xlabel 'lambda_phi / sigma'\n"
         "set ylabel 'max{0, I_c}'\nset yrange [0:1.05]\nset key off\n"
      << "plot '" << path << "' using 1:3 skip 1 with linespoints\n";
    out << "wrote " << gp << '\n';
  }
  return kOk;
}

int run_smearings(const Shared& s, const SmearingArgs& a, std::ostream& out) {
  check_shared(s);
  if (a.dim != 2 && a.dim != 3) throw BadParameter("--dim must be 2 or 3");
  if (a.points < 2) throw BadParameter("--points must be at least 2");
  const double sigma = 1.0, r_max = s.delta + 10.0 * sigma;
  ProfileGridOptions grid;
  grid.r_max = r_max;
  grid.rel_tol = s.rel_tol;
  const PropagationResult p = propagate_gaussian(a.dim, sigma, s.delta, grid);
  const RadialProfile* cols[] = {&p.profiles.fb1, &p.profiles.fb2, &p.profiles.fb3};

  std::vector<double> r(a.points);
  std::vector<std::array<double, 3>> v(a.points);
  std::array<double, 3> peak{};
  for (int i = 0; i < a.points; ++i) {
    r[i] = r_max * i / (a.points - 1);
    for (int c = 0; c < 3; ++c) {
      v[i][c] = (*cols[c])(r[i]);
      peak[c] = std::max(peak[c], std::abs(v[i][c]));
    }
  }
  if (a.peak_normalize)
    for (auto& row : v)
      for (int c = 0; c < 3; ++c)
        if (peak[c] > 0.0) row[c] /= peak[c];

  const std::string path = with_default(s.out, "smearings.csv");
  auto f = open_out(path);
  f << "r,fb1,fb2,fb3\n";
  for (int i = 0; i < a.points; ++i)
    f << num(r[i]) << ',' << num(v[i][0]) << ',' << num(v[i][1]) << ',' << num(v[i][2]) << '\n';
  out << "wrote " << path << " (" << a.points << " rows, d = " << a.dim << ")\n";
  if (a.plot) {
    const std::string gp = script_path(path);
    auto g = open_out(gp);
    g << "set datafile separator ','\nset xlabel 'r / sigma'\nset ylabel 'F_B'\n"
      << "plot '" << path << "' using 1:2 skip 1 with lines title 'F_B1', \\\n"
      << "     '' using 1:3 skip 1 with lines title 'F_B2', \\\n"
      << "     '' using 1:4 skip 1 with lines title 'F_B3'\n";
    out << "wrote " << gp << '\n';
  }
  return kOk;
}

int run_broadcast(const Shared& s, const BroadcastArgs& a, std::ostream& out) {
  check_shared(s);
  if (a.r0_points < 1) throw BadParameter("--r0-points must be positive");
  if (!(a.r0_min > 0.0)) throw BadParameter("--r0-min must be positive");
  if (a.lambdas.empty()) throw BadParameter("--lambdas needs at least one value");
  ChannelConfig base = base_config(s);
  const auto tables = broadcast_sweep(linear_grid(a.r0_min, a.r0_max, a.r0_points), a.lambdas, base, s.jobs);
  const std::string stem = with_default(s.out, "broadcast.csv");
  std::vector<std::string> written;
  for (double lam : a.lambdas) {
    const std::string path = broadcast_path(stem, lam);
    auto f = open_out(path);
    f << "r0,ic_bob1,ic_bob2\n";
    for (const BroadcastRow& r : tables.at(lam))
      f << num(r.r0) << ',' << num(r.ic_bob1) << ',' << num(r.ic_bob2) << '\n';
    out << "wrote " << path << " (" << tables.at(lam).size() << " rows, lambda_phi/sigma = " << short_num(lam)
        << ")\n";
    written.push_back(path);
  }
  if (a.plot) {
    const std::string gp = script_path(stem);
    auto g = open_out(gp);
    g << "set datafile separator ','\nset xlabel 'r0 / sigma'\nset ylabel 'max{0, I_c}'\n"
         "set yrange [0:1.05]\n";
    for (std::size_t i = 0; i < written.size(); ++i) {
      g << "set title 'lambda_phi/sigma = " << short_num(a.lambdas[i]) << "'\n"
        << "plot '" << written[i] << "' using 1:($2 > 0 ? $2 : 0) skip 1 with lines title 'B1', \\\n"
        << "     '' using 1:($3 > 0 ? $3 : 0) skip 1 with lines title 'B2'\n"
        << "pause -1\n";
    }
    out << "wrote " << gp << '\n';
  }
  return kOk;
}

int run_verify(const Shared& s, const VerifyArgs& a, std::ostream& out) {
  check_shared(s);
  VerifyOptions opt;
  opt.jobs = s.jobs;
  opt.rel_tol = s.rel_tol;
  opt.only = a.suites;
  const auto results = run_verify_suites(opt);
  int failed = 0;
  nlohmann::json report = nlohmann::json::array();
  for (const SuiteResult& r : results) {
    failed += r.passed ? 0 : 1;
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %-4s worst=%-12.4g tol=%-9.3g ", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.worst, r.tolerance);
    out << line << r.detail << '\n';
    report.push_back({{"suite", r.name},
                      {"module", r.module},
                      {"status", r.passed ? "pass" : "fail"},
                      {"worst", std::isfinite(r.worst) ? nlohmann::json(r.worst) : nlohmann::json(nullptr)},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail}});
  }
  out << results.size() << " suites, " << failed << " failed\n";
  if (!a.json.empty()) {
    auto f = open_out(a.json);
    f << nlohmann::json{{"suites", report}, {"failed", failed}, {"total", results.size()}}.dump(2) << '\n';
  }
  return failed == 0 ? kOk : kVerifyFailed;
}

} // namespace

std::string broadcast_path(const std::string& out, double lambda) {
  std::filesystem::path p(out);
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  return p.string() + "_lambda" + short_num(lambda) + ext;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum channels between smeared field detectors"};
  app.name("qfield");
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  Shared shared;
  app.add_option("--out", shared.out, "Output path");
  app.add_option("--jobs", shared.jobs, "Worker threads (0: machine parallelism)");
  app.add_option("--rel-tol", shared.rel_tol, "Quadrature relative tolerance");
  app.add_option("--kmax", shared.k_max, "Spectral cut-off in 1/sigma (0: policy default)");
  app.add_option("--eps", shared.eps, "Window roll-off width in sigma");
  app.add_option("--delta", shared.delta, "t_B - t_A in sigma");

  CapacityArgs cap;
  auto* c = app.add_subcommand("capacity", "Coherent information of the full channel against coupling");
  c->add_option("--lambda-min", cap.lambda_min, "Smallest lambda_phi/sigma");
  c->add_option("--lambda-max", cap.lambda_max, "Largest lambda_phi/sigma");
  c->add_option("--points", cap.points, "Log-spaced grid points");
  c->add_flag("--plot", cap.plot, "Also write a gnuplot script");

  SmearingArgs sm;
  auto* s = app.add_subcommand("smearings", "Bob's smearing functions for a Gaussian Alice");
  s->add_option("--dim", sm.dim, "Spatial dimension (2 or 3)");
  s->add_option("--points", sm.points, "Radial samples on [0, delta + 10]");
  s->add_flag("--peak-normalize", sm.peak_normalize, "Scale each column to unit peak magnitude");
  s->add_flag("--plot", sm.plot, "Also write a gnuplot script");

  BroadcastArgs bc;
  auto* b = app.add_subcommand("broadcast", "Coherent information to two complementary truncated Bobs");
  b->add_option("--r0-min", bc.r0_min, "Smallest truncation radius");
  b->add_option("--r0-max", bc.r0_max, "Largest truncation radius");
  b->add_option("--r0-points", bc.r0_points, "Linear grid points");
  b->add_option("--lambdas", bc.lambdas, "Couplings lambda_phi/sigma, one output file each")->delimiter(',');
  b->add_flag("--plot", bc.plot, "Also write a gnuplot script");

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "Run the invariant suites");
  v->add_option("--json", vf.json, "Write a machine-readable summary");
  v->add_option("--suite", vf.suites, "Run only the named suite (repeatable)");

  std::vector<std::string> argv_store = {"qfield"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (c->parsed()) return run_capacity(shared, cap, out);
    if (s->parsed()) return run_smearings(shared, sm, out);
    if (b->parsed()) return run_broadcast(shared, bc, out);
    return run_verify(shared, vf, out);
  } catch (const BadParameter& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

} // namespace qfield::cli
