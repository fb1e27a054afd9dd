// scctool: command-line front end for the SCC engine, surrogate fitting, the
// MILP kernel, the UC model and the benchmark suites.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sccuc/bench.hpp"
#include "sccuc/case_model.hpp"
#include "sccuc/milp.hpp"
#include "sccuc/scc_engine.hpp"
#include "sccuc/surrogate.hpp"
#include "sccuc/uc.hpp"

namespace fs = std::filesystem;
using namespace sccuc;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// "sched.json" -> "sched_audit.csv"
fs::path sibling(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_scc(const std::string& case_path, const std::string& x, const std::string& alpha, bool oracle) {
  const NetworkCase c = load_case_file(case_path);
  const CommitmentPattern p = CommitmentPattern::parse(c, x, alpha);
  const SccResult r = scc_all_buses(c, p);
  std::string out = oracle ? "bus,scc_pu,zff_re,zff_im,scc_oracle,abs_diff\n" : "bus,scc_pu,zff_re,zff_im\n";
  for (std::size_t b = 0; b < c.bus_count(); ++b) {
    out += std::to_string(c.buses[b].id) + "," + fmt(r.magnitude[b]) + "," + fmt(r.zff[b].real()) + "," +
           fmt(r.zff[b].imag());
    if (oracle) {
      const double o = std::abs(verify_superposition(c, p, b));
      out += "," + fmt(o) + "," + fmt(std::abs(o - r.magnitude[b]));
    }
    out += "\n";
  }
  std::cout << out;
  return 0;
}

std::string error_csv(const SurrogateModel& m) {
  std::string out = "bus,method,type1_n,type1_err,type2_n,type2_err\n";
  for (std::size_t i = 0; i < m.buses.size(); ++i) {
    const auto& d = m.buses[i].diagnostics;
    out += std::to_string(m.bus_ids[i]) + "," + to_string(m.method) + "," + std::to_string(d.type1.count) + "," +
           fmt(d.type1.err) + "," + std::to_string(d.type2.count) + "," + fmt(d.type2.err) + "\n";
  }
  return out;
}

double parse_nu(const std::string& s) {
  if (s == "auto") return -1.0;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() || !(v > 0.0)) throw std::invalid_argument("--nu must be 'auto' or a positive number");
  return v;
}

int cmd_fit(const std::string& case_path, const std::string& method, double ilim, const std::string& nu,
            const std::string& out) {
  const NetworkCase c = load_case_file(case_path);
  const SccDataset ds = enumerate_dataset(c);
  const SurrogateModel m = fit_all_buses(c, ds, {parse_fit_method(method), ilim, parse_nu(nu)});
  write_file(out, write_surrogate_model(m));
  const fs::path csv = sibling(out, "_errors.csv");
  write_file(csv, error_csv(m));
  std::cout << "wrote " << out << " and " << csv.string() << "\n";
  return 0;
}

int cmd_milp(const std::string& model_path) {
  const MilpModel m = import_lp_file(read_text_file(model_path));
  const Solution s = m.binary_count() ? solve_milp(m, 0.0) : solve_lp(m);
  std::cout << "status," << to_string(s.status) << "\n";
  if (s.status == SolveStatus::Optimal || s.status == SolveStatus::GapLimit) {
    std::cout << "objective," << fmt(s.objective) << "\n";
    for (std::size_t j = 0; j < m.variable_count(); ++j)
      std::cout << m.variables()[j].name << "," << fmt(s.values[j]) << "\n";
  }
  return s.status == SolveStatus::Optimal ? 0 : 1;
}

struct UcArgs {
  std::string case_path, instance, scc = "none", freq = "off", out = "schedule.json", lp;
  std::optional<double> ilim, pe_ratio;
  bool rolling = false;
  int horizon = 2;
};

int cmd_uc(const UcArgs& a) {
  NetworkCase c = load_case_file(a.case_path);
  if (a.pe_ratio)
    for (auto& g : c.ibgs) g.pe_ratio = *a.pe_ratio;
  const UcInstance inst = load_uc_instance_file(a.instance, c);

  UcOptions opts;
  opts.freq = a.freq == "on";
  opts.ilim = a.ilim;
  if (opts.freq && !inst.freq) throw std::invalid_argument("--freq on needs a freq block in the instance");
  std::optional<SurrogateModel> model;
  if (a.scc == "am") {
    opts.scc = SccMode::Analytical;
  } else if (a.scc != "none") {
    opts.scc = SccMode::Surrogate;
    // One fit serves every bus; per-bus limits of the instance use the largest value.
    double fit_ilim = a.ilim.value_or(0.0);
    if (!a.ilim)
      for (double v : inst.scc_limit) fit_ilim = std::max(fit_ilim, v);
    model = fit_all_buses(c, enumerate_dataset(c), {parse_fit_method(a.scc), fit_ilim, -1.0});
    opts.surrogate = &*model;
  }

  UcSchedule s;
  if (a.rolling) {
    s = solve_uc_rolling(inst, opts, a.horizon);
  } else {
    UcRun run = solve_uc(inst, opts);
    if (!a.lp.empty()) write_file(a.lp, export_lp_file(run.model.milp).text);
    s = std::move(run.schedule);
  }
  write_file(a.out, schedule_to_json(s, inst));
  write_file(sibling(a.out, "_audit.csv"), audit_to_csv(s));
  std::cout << "status " << to_string(s.status);
  if (s.status == SolveStatus::Optimal || s.status == SolveStatus::GapLimit)
    std::cout << ", objective " << fmt(s.objective) << ", audit flags " << s.audit_flags;
  std::cout << "\n";
  if (s.status != SolveStatus::Optimal && s.status != SolveStatus::GapLimit) return 1;
  return s.audit_flags == 0 ? 0 : 3;
}

int cmd_bench(const std::string& suite, const std::string& case_path, std::string instance,
              const std::string& out, std::optional<double> ilim) {
  const NetworkCase c = load_case_file(case_path);
  if (instance.empty()) {
    // net9.json pairs with net9_uc.json
    const fs::path p(case_path);
    instance = sibling(p, "_uc.json").string();
  }
  const UcInstance inst = load_uc_instance_file(instance, c);
  const BenchReport rep = run_bench_suite(suite, inst, ilim);
  const fs::path report(out);
  write_file(report, rep.to_json());
  for (const auto& t : rep.tables) write_file(sibling(report, "_" + t.name + ".csv"), t.to_csv());
  write_file(sibling(report, "_timings.csv"), rep.timings_csv());
  for (const auto& chk : rep.checks)
    std::cout << (chk.passed ? "ok   " : "FAIL ") << chk.name << (chk.detail.empty() ? "" : "  (" + chk.detail + ")")
              << "\n";
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"short-circuit-current constrained unit commitment toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  std::string case_path, x, alpha;
  bool oracle = false;
  auto* scc = app.add_subcommand("scc", "per-bus SCC of one commitment pattern");
  scc->add_option("--case", case_path, "network case file")->required();
  scc->add_option("--x", x, "SG on/off bits, e.g. 101")->required();
  scc->add_option("--alpha", alpha, "comma separated IBG fractions")->default_val("");
  scc->add_flag("--oracle", oracle, "also run the nodal superposition check");
  scc->callback([&] { rc = cmd_scc(case_path, x, alpha, oracle); });

  std::string method, nu = "auto", out;
  double ilim = 0.0;
  auto* fit = app.add_subcommand("fit", "fit SCC surrogates for every bus");
  fit->add_option("--case", case_path)->required();
  fit->add_option("--method", method)->required()->check(CLI::IsMember({"dm1", "dm2", "dm3"}));
  fit->add_option("--ilim", ilim, "SCC limit, p.u.")->required();
  fit->add_option("--nu", nu, "DM-3 margin or 'auto'");
  fit->add_option("--out", out)->required();
  fit->callback([&] { rc = cmd_fit(case_path, method, ilim, nu, out); });

  std::string model_path;
  auto* milp = app.add_subcommand("milp", "MILP kernel utilities");
  milp->require_subcommand(1);
  auto* milp_solve = milp->add_subcommand("solve", "solve an LP-format model");
  milp_solve->add_option("--model", model_path)->required();
  milp_solve->callback([&] { rc = cmd_milp(model_path); });

  UcArgs ua;
  auto* uc = app.add_subcommand("uc", "solve a stochastic unit commitment instance");
  uc->add_option("--case", ua.case_path)->required();
  uc->add_option("--instance", ua.instance)->required();
  uc->add_option("--scc", ua.scc)->check(CLI::IsMember({"none", "dm1", "dm2", "dm3", "am"}));
  uc->add_option("--freq", ua.freq)->check(CLI::IsMember({"on", "off"}));
  uc->add_option("--ilim", ua.ilim, "uniform SCC limit overriding the instance");
  uc->add_option("--pe-ratio", ua.pe_ratio, "PE overcapacity applied to every IBG");
  uc->add_flag("--rolling", ua.rolling, "receding-horizon loop");
  uc->add_option("--horizon", ua.horizon, "window length for --rolling")->check(CLI::PositiveNumber);
  uc->add_option("--out", ua.out);
  uc->add_option("--lp", ua.lp, "export the built model in LP format");
  uc->callback([&] { rc = cmd_uc(ua); });

  std::string suite, instance, bench_out = "report.json";
  std::optional<double> bench_ilim;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--suite", suite)->required()->check(CLI::IsMember({"penetration", "linearization", "limits", "pe"}));
  bench->add_option("--case", case_path)->required();
  bench->add_option("--instance", instance, "defaults to <case>_uc.json");
  bench->add_option("--out", bench_out);
  bench->add_option("--ilim", bench_ilim, "base SCC limit, default 0.75 of the all-SG level");
  bench->callback([&] { rc = cmd_bench(suite, case_path, instance, bench_out, bench_ilim); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CaseError& e) {
    std::cerr << "case error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
