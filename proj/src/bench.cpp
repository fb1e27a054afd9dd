#include "sccuc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#include "json.hpp"
#include "sccuc/scc_engine.hpp"
#include "sccuc/surrogate.hpp"

namespace sccuc {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool solved(const UcSchedule& s) {
  return s.status == SolveStatus::Optimal || s.status == SolveStatus::GapLimit;
}

struct MinScc {
  double value = std::numeric_limits<double>::infinity();
  int bus = 0;
  double mean = 0.0;
};

MinScc min_scc(const UcSchedule& s) {
  MinScc m;
  for (const auto& row : s.audit) {
    m.mean += row.scc_exact;
    if (row.scc_exact < m.value) {
      m.value = row.scc_exact;
      m.bus = row.bus;
    }
  }
  if (!s.audit.empty()) m.mean /= double(s.audit.size());
  return m;
}

// One solve per sweep point, run concurrently; each solve is single-threaded.
struct Task {
  UcInstance inst;
  UcOptions opts;
  std::optional<SurrogateModel> surrogate;
  UcSchedule schedule;
  std::string error;
  double seconds = 0.0;
};

void run_tasks(std::vector<Task>& tasks) {
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
    auto& t = tasks[static_cast<std::size_t>(i)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (t.surrogate) t.opts.surrogate = &*t.surrogate;
      t.schedule = solve_uc(t.inst, t.opts).schedule;
    } catch (const std::exception& e) {
      t.error = e.what();
    }
    t.seconds = seconds_since(t0);
  }
}

std::string status_of(const Task& t) {
  return t.error.empty() ? to_string(t.schedule.status) : "error: " + t.error;
}

double mean_total_demand(const UcInstance& inst) {
  double s = 0.0;
  for (int t = 0; t < inst.periods; ++t)
    for (std::size_t b = 0; b < inst.network.bus_count(); ++b)
      s += inst.network.buses[b].demand_at(static_cast<std::size_t>(t));
  return s / inst.periods;
}

ErrorReport aggregate_errors(const SurrogateModel& m) {
  ErrorReport r;
  double s1 = 0.0, s2 = 0.0;
  for (const auto& b : m.buses) {
    r.type1.count += b.diagnostics.type1.count;
    r.type2.count += b.diagnostics.type2.count;
    s1 += b.diagnostics.type1.err * double(b.diagnostics.type1.count);
    s2 += b.diagnostics.type2.err * double(b.diagnostics.type2.count);
  }
  r.type1.err = r.type1.count ? s1 / double(r.type1.count) : 0.0;
  r.type2.err = r.type2.count ? s2 / double(r.type2.count) : 0.0;
  return r;
}

bool am_eligible(const NetworkCase& c) {
  if (c.bus_count() > kAmMaxBuses || c.sgs.size() + c.ibgs.size() > 12) return false;
  return std::all_of(c.branches.begin(), c.branches.end(),
                     [](const Branch& b) { return b.impedance.real() == 0.0; });
}

SurrogateModel fit_dm3_model(const NetworkCase& c, double ilim) {
  const SccDataset ds = enumerate_dataset(c);
  return fit_all_buses(c, ds, {FitMethod::DM3, ilim, -1.0});
}

// Costs must not fall (rising = true) or rise as the sweep advances.
BenchCheck monotone_check(const std::string& name, const std::vector<Task>& tasks, bool rising) {
  BenchCheck chk{name, true, ""};
  double prev = 0.0;
  bool have = false;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    if (!t.error.empty() || !solved(t.schedule)) continue;
    const double cost = t.schedule.objective;
    if (have) {
      const double tol = 1e-7 * std::max(1.0, std::abs(prev));
      if ((rising && cost < prev - tol) || (!rising && cost > prev + tol)) {
        chk.passed = false;
        chk.detail = "point " + std::to_string(i) + ": cost " + num(cost) + " after " + num(prev);
      }
    }
    prev = cost;
    have = true;
  }
  if (!have) {
    chk.passed = false;
    chk.detail = "no solved sweep point";
  }
  return chk;
}

// Infeasible points are legitimate sweep outcomes; exceptions are not.
BenchCheck error_check(const std::vector<Task>& tasks) {
  BenchCheck chk{"no_solver_errors", true, ""};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].error.empty()) continue;
    chk.passed = false;
    chk.detail = "point " + std::to_string(i) + ": " + tasks[i].error;
  }
  return chk;
}

BenchCheck audit_check(const std::string& name, const std::vector<const Task*>& tasks) {
  BenchCheck chk{name, true, ""};
  for (const auto* t : tasks) {
    if (!t->error.empty() || !solved(t->schedule)) continue;
    if (t->schedule.audit_flags > 0) {
      chk.passed = false;
      chk.detail = std::to_string(t->schedule.audit_flags) + " bus/period cells below the limit";
    }
  }
  return chk;
}

}  // namespace

std::string BenchTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_field(header[i]);
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
    out += "\n";
  }
  return out;
}

bool BenchReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const BenchCheck& c) { return c.passed; });
}

std::string BenchReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["suite"] = suite;
  doc["label"] = label;
  doc["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) doc["tables"].push_back({{"name", t.name}, {"header", t.header}, {"rows", t.rows}});
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    doc["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  doc["ok"] = ok();
  return doc.dump(2) + "\n";
}

std::string BenchReport::timings_csv() const {
  std::string out = "item,seconds\n";
  for (const auto& [k, v] : timings) out += csv_field(k) + "," + num(v) + "\n";
  return out;
}

double reference_scc(const UcInstance& inst) {
  const NetworkCase& c = inst.network;
  CommitmentPattern p = CommitmentPattern::all_on(c);
  double ref = kInf;
  for (std::size_t node : inst.dispatch_nodes())
    for (std::size_t t = 0; t < static_cast<std::size_t>(inst.periods); ++t) {
      for (std::size_t k = 0; k < c.ibgs.size(); ++k) p.alpha[k] = inst.alpha(node, k, t);
      const auto r = scc_all_buses(c, p);
      ref = std::min(ref, *std::min_element(r.magnitude.begin(), r.magnitude.end()));
    }
  return ref;
}

BenchReport bench_penetration(const UcInstance& inst, const std::vector<double>& levels) {
  if (inst.network.ibgs.empty()) throw std::invalid_argument("penetration study needs IBGs in the case");
  if (!inst.freq) throw std::invalid_argument("penetration study needs a freq block in the instance");
  BenchReport rep;
  rep.suite = "penetration";
  const double dbar = mean_total_demand(inst);
  std::vector<Task> tasks;
  for (int si = 1; si >= 0; --si)
    for (double level : levels) {
      Task t;
      t.inst = inst;
      const double cap = level * dbar / double(inst.network.ibgs.size());
      for (auto& g : t.inst.network.ibgs) {
        g.capacity = cap;
        g.available = {cap};
      }
      if (!si)
        for (auto& w : t.inst.freq->wind_farms) w.si_max = 0.0;
      t.opts.freq = true;
      tasks.push_back(std::move(t));
    }
  run_tasks(tasks);

  BenchTable summary{"penetration_summary",
                     {"level", "si", "status", "cost", "rho_w_mean", "scc_oracle_mean", "scc_oracle_min", "min_bus"},
                     {}};
  BenchTable detail{"penetration_scc", {"level", "si", "node", "period", "bus", "scc_oracle"}, {}};
  std::vector<double> means[2];
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const int si = i < levels.size() ? 1 : 0;
    const double level = levels[i % levels.size()];
    rep.timings.emplace_back("penetration level=" + num(level) + " si=" + std::to_string(si), t.seconds);
    if (!t.error.empty() || !solved(t.schedule)) {
      summary.rows.push_back({num(level), std::to_string(si), status_of(t), "", "", "", "", ""});
      continue;
    }
    double rho = 0.0;
    for (const auto& cell : t.schedule.cells) rho += cell.rho_w;
    rho /= double(std::max<std::size_t>(1, t.schedule.cells.size()));
    const MinScc ms = min_scc(t.schedule);
    means[si].push_back(ms.mean);
    summary.rows.push_back({num(level), std::to_string(si), status_of(t), num(t.schedule.objective), num(rho),
                            num(ms.mean), num(ms.value), std::to_string(ms.bus)});
    for (const auto& row : t.schedule.audit)
      detail.rows.push_back({num(level), std::to_string(si), std::to_string(row.node),
                             std::to_string(row.period), std::to_string(row.bus), num(row.scc_exact)});
  }
  rep.tables = {summary, detail};
  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  BenchCheck chk{"si_off_scc_spread_le_si_on", spread(means[0]) <= spread(means[1]) + 1e-9,
                 "spread si_on=" + num(spread(means[1])) + " si_off=" + num(spread(means[0]))};
  rep.checks.push_back(chk);
  rep.checks.push_back(error_check(tasks));
  return rep;
}

BenchReport bench_linearization(const UcInstance& inst, double ilim) {
  const NetworkCase& c = inst.network;
  BenchReport rep;
  rep.suite = "linearization";
  const auto t_ds = std::chrono::steady_clock::now();
  const SccDataset ds = enumerate_dataset(c);
  rep.timings.emplace_back("dataset", seconds_since(t_ds));

  const bool freq = inst.freq.has_value();
  std::vector<std::string> names = {"none", "dm1", "dm2", "dm3"};
  std::vector<Task> tasks(4);
  std::vector<ErrorReport> errs(4);
  for (std::size_t i = 0; i < 4; ++i) {
    tasks[i].inst = inst;
    tasks[i].opts.freq = freq;
    tasks[i].opts.ilim = ilim;
    if (i == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    tasks[i].opts.scc = SccMode::Surrogate;
    tasks[i].surrogate = fit_all_buses(c, ds, {static_cast<FitMethod>(i - 1), ilim, -1.0});
    errs[i] = aggregate_errors(*tasks[i].surrogate);
    rep.timings.emplace_back("fit " + names[i], seconds_since(t0));
  }
  const bool with_am = am_eligible(c);
  if (with_am) {
    Task am;
    am.inst = inst;
    am.opts.freq = freq;
    am.opts.ilim = ilim;
    am.opts.scc = SccMode::Analytical;
    tasks.push_back(std::move(am));
    names.push_back("am");
    errs.push_back({});
  }
  run_tasks(tasks);

  BenchTable table{"linearization",
                   {"method", "type1_n", "type1_err", "type2_n", "type2_err", "status", "cost", "audit_flags"},
                   {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    rep.timings.emplace_back("solve " + names[i], t.seconds);
    const bool has_err = i >= 1 && i <= 3;
    const bool ok = t.error.empty() && solved(t.schedule);
    table.rows.push_back({names[i], has_err ? std::to_string(errs[i].type1.count) : "",
                          has_err ? num(errs[i].type1.err) : "",
                          has_err ? std::to_string(errs[i].type2.count) : "",
                          has_err ? num(errs[i].type2.err) : "", status_of(t),
                          ok ? num(t.schedule.objective) : "",
                          ok ? std::to_string(t.schedule.audit_flags) : ""});
  }
  if (!with_am) table.rows.push_back({"am", "", "", "", "", "skipped: case too large or lossy", "", ""});
  rep.tables.push_back(table);

  rep.checks.push_back({"dm2_type1_zero", errs[2].type1.count == 0, std::to_string(errs[2].type1.count)});
  rep.checks.push_back({"dm3_type1_zero", errs[3].type1.count == 0, std::to_string(errs[3].type1.count)});
  rep.checks.push_back({"dm3_type2_le_dm2", errs[3].type2.count <= errs[2].type2.count,
                        std::to_string(errs[3].type2.count) + " vs " + std::to_string(errs[2].type2.count)});
  rep.checks.push_back(audit_check("dm2_dm3_audit_clean", {&tasks[2], &tasks[3]}));
  rep.checks.push_back(error_check(tasks));
  for (std::size_t i = 2; i <= 3; ++i)
    if (!solved(tasks[i].schedule) || !tasks[i].error.empty())
      rep.checks.push_back({names[i] + "_solved", false, status_of(tasks[i])});
  if (with_am && errs[3].type1.count == 0 && errs[3].type2.count == 0) {
    const auto& a = tasks[4];
    const auto& d = tasks[3];
    BenchCheck chk{"am_matches_dm3", false, ""};
    if (a.error.empty() && d.error.empty() && solved(a.schedule) && solved(d.schedule)) {
      const double diff = std::abs(a.schedule.objective - d.schedule.objective);
      chk.passed = diff <= 1e-6 * std::max(1.0, std::abs(d.schedule.objective));
      chk.detail = "difference " + num(diff);
    } else {
      chk.passed = a.schedule.status == d.schedule.status && a.error.empty() && d.error.empty();
      chk.detail = "am " + status_of(a) + ", dm3 " + status_of(d);
    }
    rep.checks.push_back(chk);
  }
  return rep;
}

BenchReport bench_limit_sweep(const UcInstance& inst, const std::vector<double>& ilims) {
  BenchReport rep;
  rep.suite = "limits";
  std::vector<Task> tasks(ilims.size());
  for (std::size_t i = 0; i < ilims.size(); ++i) {
    auto& t = tasks[i];
    t.inst = inst;
    t.opts.freq = inst.freq.has_value();
    t.opts.ilim = ilims[i];
    if (ilims[i] > 0.0) {
      t.opts.scc = SccMode::Surrogate;
      t.surrogate = fit_dm3_model(inst.network, ilims[i]);
    }
  }
  run_tasks(tasks);
  BenchTable table{"limits", {"ilim", "status", "cost", "scc_oracle_min", "min_bus", "audit_flags"}, {}};
  std::vector<const Task*> all;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    all.push_back(&t);
    rep.timings.emplace_back("limit " + num(ilims[i]), t.seconds);
    if (!t.error.empty() || !solved(t.schedule)) {
      table.rows.push_back({num(ilims[i]), status_of(t), "", "", "", ""});
      continue;
    }
    const MinScc ms = min_scc(t.schedule);
    table.rows.push_back({num(ilims[i]), status_of(t), num(t.schedule.objective), num(ms.value),
                          std::to_string(ms.bus), std::to_string(t.schedule.audit_flags)});
  }
  rep.tables.push_back(table);
  rep.checks.push_back(monotone_check("cost_nondecreasing_in_ilim", tasks, true));
  rep.checks.push_back(error_check(tasks));
  rep.checks.push_back(audit_check("audit_clean", all));
  return rep;
}

BenchReport bench_pe_sweep(const UcInstance& inst, const std::vector<double>& ratios, double ilim) {
  BenchReport rep;
  rep.suite = "pe";
  std::vector<Task> tasks(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    auto& t = tasks[i];
    t.inst = inst;
    for (auto& g : t.inst.network.ibgs) g.pe_ratio = ratios[i];
    t.opts.freq = inst.freq.has_value();
    t.opts.ilim = ilim;
    t.opts.scc = SccMode::Surrogate;
    t.surrogate = fit_dm3_model(t.inst.network, ilim);
  }
  run_tasks(tasks);
  BenchTable table{"pe", {"pe_ratio", "ilim", "status", "cost", "scc_oracle_min", "min_bus", "audit_flags"}, {}};
  std::vector<const Task*> all;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    all.push_back(&t);
    rep.timings.emplace_back("pe " + num(ratios[i]), t.seconds);
    if (!t.error.empty() || !solved(t.schedule)) {
      table.rows.push_back({num(ratios[i]), num(ilim), status_of(t), "", "", "", ""});
      continue;
    }
    const MinScc ms = min_scc(t.schedule);
    table.rows.push_back({num(ratios[i]), num(ilim), status_of(t), num(t.schedule.objective), num(ms.value),
                          std::to_string(ms.bus), std::to_string(t.schedule.audit_flags)});
  }
  rep.tables.push_back(table);
  rep.checks.push_back(monotone_check("cost_nonincreasing_in_pe_ratio", tasks, false));
  rep.checks.push_back(error_check(tasks));
  rep.checks.push_back(audit_check("audit_clean", all));
  return rep;
}

BenchReport run_bench_suite(const std::string& suite, const UcInstance& inst, std::optional<double> ilim) {
  const double ref = reference_scc(inst);
  const double base = ilim.value_or(0.75 * ref);
  BenchReport rep;
  if (suite == "penetration") {
    rep = bench_penetration(inst, {0.0, 0.2, 0.4, 0.6});
  } else if (suite == "linearization") {
    rep = bench_linearization(inst, base);
  } else if (suite == "limits") {
    rep = bench_limit_sweep(inst, {0.0, 0.25 * ref, 0.5 * ref, 0.75 * ref, 0.9 * ref});
  } else if (suite == "pe") {
    rep = bench_pe_sweep(inst, {1.0, 1.25, 1.5}, base);
  } else {
    throw std::invalid_argument("unknown bench suite '" + suite +
                                "' (expected penetration, linearization, limits or pe)");
  }
  rep.label = "reference SCC " + num(ref) + " p.u., base limit " + num(base) + " p.u.";
  return rep;
}

}  // namespace sccuc
