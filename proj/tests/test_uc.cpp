#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sccuc/bench.hpp"
#include "sccuc/scc_engine.hpp"
#include "sccuc/surrogate.hpp"
#include "sccuc/uc.hpp"

using namespace sccuc;

namespace {

UcInstance single_node(const NetworkCase& c, int periods, double shed_cost = 1000.0) {
  UcInstance inst;
  inst.network = c;
  inst.periods = periods;
  inst.tree.push_back({0, -1, 1.0, 1.0, 1.0});
  inst.shed_cost = shed_cost;
  inst.scc_limit.assign(c.bus_count(), 0.0);
  return inst;
}

NetworkCase priced_bus(double demand) {
  NetworkCase c = testutil::one_bus(0.95, 0.2);
  c.buses[0].demand = {demand};
  auto& g = c.sgs[0];
  g.p_min = 0.1;
  g.p_max = 1.0;
  g.marginal_cost = 20.0;
  g.no_load_cost = 5.0;
  g.startup_cost = 10.0;
  return c;
}

SurrogateModel fit(const NetworkCase& c, FitMethod m, double ilim) {
  return fit_all_buses(c, enumerate_dataset(c), {m, ilim, -1.0});
}

FrequencyParams reference_freq(double total_demand, std::size_t farms, double gamma) {
  FrequencyParams f;
  f.delivery_time = 10.0;
  f.disturbance = 0.5;
  f.nadir_limit = 0.8;
  f.ss_limit = 0.5;
  f.rocof_limit = 0.5;
  f.nominal_frequency = 50.0;
  f.damping = 0.005 * total_demand;
  f.si_bound = 5.0;
  for (std::size_t j = 0; j < farms; ++j) f.wind_farms.push_back({j, gamma, 5.0});
  return f;
}

NadirGrid grid_for(const FrequencyParams& f) {
  NadirGrid g;
  g.h_min = 1.0;
  g.h_max = 60.0;
  g.r_max = 3.0;
  g.hs_max.assign(f.wind_farms.size(), f.si_bound);
  return g;
}

}  // namespace

TEST_SUITE("uc") {

TEST_CASE("binary product truth table") {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (double sign : {1.0, -1.0}) {
        MilpModel m;
        const auto x1 = m.add_binary("x1"), x2 = m.add_binary("x2");
        m.set_bounds(x1, a, a);
        m.set_bounds(x2, b, b);
        const auto eta = linearize_binary_product(m, x1, x2, "eta");
        m.set_objective(eta, sign);  // push η both ways
        const Solution s = solve_milp(m, 0.0);
        REQUIRE(s.optimal());
        CHECK(s.values[eta] == doctest::Approx(double(a * b)).epsilon(1e-9));
      }
}

TEST_CASE("one machine commits iff there is demand") {
  UcRun run = solve_uc(single_node(priced_bus(0.5), 1), {});
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  CHECK(run.schedule.cells[0].x[0] == 1);
  CHECK(run.schedule.objective == doctest::Approx(5.0 + 20.0 * 0.5 + 10.0));
  CHECK(run.schedule.cost.total() == doctest::Approx(run.schedule.objective));

  run = solve_uc(single_node(priced_bus(0.0), 1), {});
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  CHECK(run.schedule.cells[0].x[0] == 0);
  CHECK(run.schedule.objective == doctest::Approx(0.0));
}

TEST_CASE("demand above capacity is shed") {
  const UcRun run = solve_uc(single_node(priced_bus(1.5), 1, 100.0), {});
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  CHECK(run.schedule.cells[0].shed == doctest::Approx(0.5));
  CHECK(run.schedule.objective == doctest::Approx(5.0 + 20.0 + 10.0 + 100.0 * 0.5));
}

TEST_CASE("zero limits leave the schedule unchanged") {
  const UcInstance inst = testutil::load_instance("net9");
  const UcRun base = solve_uc(inst, {});
  const SurrogateModel s = fit(inst.network, FitMethod::DM3, 6.0);
  UcOptions o;
  o.scc = SccMode::Surrogate;
  o.surrogate = &s;
  o.ilim = 0.0;
  const UcRun zero = solve_uc(inst, o);
  REQUIRE(zero.schedule.status == SolveStatus::Optimal);
  CHECK(zero.schedule.objective == doctest::Approx(base.schedule.objective).epsilon(1e-9));
  for (std::size_t k = 0; k < base.schedule.cells.size(); ++k) CHECK(zero.schedule.cells[k].x == base.schedule.cells[k].x);
}

TEST_CASE("a limit above the all-on level is infeasible") {
  const UcInstance inst = testutil::load_instance("net3");
  const auto r = scc_all_buses(inst.network, CommitmentPattern::all_on(inst.network));
  const double ilim = *std::max_element(r.magnitude.begin(), r.magnitude.end()) + 0.5;
  for (FitMethod m : {FitMethod::DM2, FitMethod::DM3}) {
    const SurrogateModel s = fit(inst.network, m, ilim);
    UcOptions o;
    o.scc = SccMode::Surrogate;
    o.surrogate = &s;
    o.ilim = ilim;
    CHECK(solve_uc(inst, o).schedule.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("unconstrained runs can violate, DM-3 runs pass the audit") {
  const UcInstance inst = testutil::load_instance("net9");
  UcOptions none;
  none.ilim = 6.0;
  const UcRun free_run = solve_uc(inst, none);
  REQUIRE(free_run.schedule.status == SolveStatus::Optimal);
  CHECK(free_run.schedule.audit_flags > 0);

  const SurrogateModel s = fit(inst.network, FitMethod::DM3, 6.0);
  UcOptions o = none;
  o.scc = SccMode::Surrogate;
  o.surrogate = &s;
  const UcRun run = solve_uc(inst, o);
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  CHECK(run.schedule.audit_flags == 0);
  CHECK(run.schedule.objective >= free_run.schedule.objective - 1e-9);
  for (const auto& row : run.schedule.audit) CHECK(row.scc_exact >= row.ilim - 1e-7);
}

TEST_CASE("products of commitments are exact at the solution") {
  const UcInstance inst = testutil::load_instance("net9");
  const SurrogateModel s = fit(inst.network, FitMethod::DM1, 6.0);
  UcOptions o;
  o.scc = SccMode::Surrogate;
  o.surrogate = &s;
  o.ilim = 6.0;
  const UcRun run = solve_uc(inst, o);
  REQUIRE(run.solution.optimal());
  const auto& vars = run.model.milp.variables();
  std::size_t seen = 0;
  for (const auto& row : run.model.milp.constraints()) {
    // η ≥ x1 + x2 − 1 rows carry three terms and rhs −1
    if (row.sense != RowSense::GreaterEqual || row.terms.size() != 3 || row.rhs != -1.0) continue;
    const double eta = run.solution.values[row.terms[0].var];
    const double x1 = run.solution.values[row.terms[1].var], x2 = run.solution.values[row.terms[2].var];
    CHECK(vars[row.terms[1].var].kind == VarKind::Binary);
    CHECK(std::abs(eta - x1 * x2) <= 1e-6);
    ++seen;
  }
  CHECK(seen > 0);
}

TEST_CASE("analytical block on a single machine bus") {
  UcInstance inst = single_node(priced_bus(0.0), 1);
  inst.network.sgs[0].p_min = 0.0;
  UcOptions o;
  o.scc = SccMode::Analytical;
  o.ilim = 4.0;  // below 0.95/0.2 = 4.75, so the machine must run
  UcRun run = solve_uc(inst, o);
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  CHECK(run.schedule.cells[0].x[0] == 1);
  CHECK(run.schedule.objective == doctest::Approx(5.0 + 10.0));
  o.ilim = 5.0;
  CHECK(solve_uc(inst, o).schedule.status == SolveStatus::Infeasible);
}

TEST_CASE("analytical block configuration errors") {
  UcInstance inst = testutil::load_instance("net3");
  UcOptions o;
  o.scc = SccMode::Analytical;
  o.ilim = 2.5;
  o.am_zmax = 0.0;
  CHECK_THROWS_AS(build_uc(inst, o), ZmaxBindingError);

  o.am_zmax.reset();
  UcInstance lossy = inst;
  lossy.network.branches[0].impedance = {0.01, 0.1};
  CHECK_THROWS_AS(build_uc(lossy, o), AmGuardError);
  CHECK_THROWS_AS(build_uc(testutil::load_instance("net30s"), o), AmGuardError);
}

TEST_CASE("analytical and DM-3 objectives agree on net3") {
  const UcInstance inst = testutil::load_instance("net3");
  // the reference level is about 2.77 p.u.; 3.0 is out of reach for both
  for (double ilim : {1.5, 2.0, 2.5, 3.0}) {
    const SurrogateModel s = fit(inst.network, FitMethod::DM3, ilim);
    UcOptions dm;
    dm.scc = SccMode::Surrogate;
    dm.surrogate = &s;
    dm.ilim = ilim;
    UcOptions am;
    am.scc = SccMode::Analytical;
    am.ilim = ilim;
    const UcRun a = solve_uc(inst, dm, 0.0), b = solve_uc(inst, am, 0.0);
    REQUIRE(a.schedule.status == b.schedule.status);
    if (ilim > 2.8) {
      CHECK(a.schedule.status == SolveStatus::Infeasible);
      continue;
    }
    CHECK(std::abs(a.schedule.objective - b.schedule.objective) <= 1e-6);
    CHECK(b.schedule.audit_flags == 0);
  }
}

// A node LP here once stalled in phase one and was pruned as infeasible,
// leaving the analytical run ~17% above the surrogate runs.
TEST_CASE("analytical block is not beaten by a surrogate on net9") {
  const UcInstance inst = testutil::load_instance("net9");
  const double ilim = 0.5 * reference_scc(inst);
  const SurrogateModel s = fit(inst.network, FitMethod::DM2, ilim);
  UcOptions dm;
  dm.scc = SccMode::Surrogate;
  dm.surrogate = &s;
  dm.ilim = ilim;
  UcOptions am;
  am.scc = SccMode::Analytical;
  am.ilim = ilim;
  const UcRun a = solve_uc(inst, dm, 0.0), b = solve_uc(inst, am, 0.0);
  REQUIRE(a.schedule.status == SolveStatus::Optimal);
  REQUIRE(b.schedule.status == SolveStatus::Optimal);
  CHECK(a.schedule.audit_flags == 0);
  CHECK(b.schedule.objective <= a.schedule.objective + 1e-6);
}

TEST_CASE("nadir planes at the reference parameters") {
  const FrequencyParams f = reference_freq(3.15, 2, 0.001);
  const NadirGrid g = grid_for(f);
  const auto planes = generate_nadir_planes(f, g);
  CHECK(planes.size() == g.h_points * g.hs_levels);
  const NadirAudit a = audit_nadir_planes(planes, f, g, 10000);
  CHECK(a.passed());
  CHECK(a.feasible_samples > 0);
  // tangency: each plane touches the surface at its own point
  const NadirCurve n = nadir_curve(f);
  for (const auto& pl : planes) {
    const double h = -pl.b, r = -pl.a;
    std::vector<double> hs(pl.c.size());
    for (std::size_t j = 0; j < hs.size(); ++j) hs[j] = pl.c[j] / (2.0 * n.q * n.gamma[j]);
    CHECK(h * r == doctest::Approx(n.rhs(hs)).epsilon(1e-9));
    CHECK(std::abs(pl.value(h, r, hs)) <= 1e-9 * std::max(1.0, n.c0));
  }
}

TEST_CASE("synthetic inertia raises the nadir requirement") {
  const FrequencyParams f = reference_freq(3.15, 1, 0.05);
  const NadirCurve n = nadir_curve(f);
  double prev = n.rhs(std::vector<double>{0.0});
  for (double hs = 0.5; hs <= 5.0; hs += 0.5) {
    const double v = n.rhs(std::vector<double>{hs});
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("without synthetic inertia the planes are two-dimensional") {
  const FrequencyParams f = reference_freq(3.15, 2, 0.0);
  const NadirGrid g = grid_for(f);
  const auto planes = generate_nadir_planes(f, g);
  CHECK(planes.size() == g.h_points);
  for (const auto& pl : planes)
    for (double c : pl.c) CHECK(c == 0.0);
  CHECK(audit_nadir_planes(planes, f, g, 10000).passed());
}

TEST_CASE("nadir region errors") {
  FrequencyParams f = reference_freq(3.15, 1, 0.01);
  NadirGrid g = grid_for(f);
  g.h_max = 0.1;
  g.r_max = 0.1;
  CHECK_THROWS_AS(generate_nadir_planes(f, g), NadirRegionError);
  f.damping = 100.0;  // c0 < 0 with SI available
  CHECK_THROWS_AS(generate_nadir_planes(f, grid_for(f)), NadirRegionError);
}

TEST_CASE("frequency constraints hold in every dispatch cell") {
  const UcInstance inst = testutil::load_instance("net9");
  UcOptions o;
  o.freq = true;
  const UcRun run = solve_uc(inst, o);
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  const auto& f = *inst.freq;
  const double h_rocof = f.disturbance * f.nominal_frequency / (2.0 * f.rocof_limit);
  for (const auto& cell : run.schedule.cells) {
    CHECK(cell.inertia >= h_rocof - 1e-6);
    CHECK(cell.pfr >= f.disturbance - f.damping * f.ss_limit - 1e-6);
    for (const auto& pl : run.model.layout.planes) CHECK(pl.value(cell.inertia, cell.pfr, cell.hs) <= 1e-6);
  }
}

TEST_CASE("zero wind gives zero penetration") {
  UcInstance inst = testutil::load_instance("net3");
  for (auto& w : inst.network.ibgs) w.available = {0.0};
  const UcRun run = solve_uc(inst, {});
  REQUIRE(run.schedule.status == SolveStatus::Optimal);
  for (const auto& cell : run.schedule.cells) CHECK(cell.rho_w == 0.0);
}

TEST_CASE("rolling horizon") {
  const UcInstance inst = testutil::load_instance("net3");
  const UcSchedule full = solve_uc(inst, {}).schedule;
  const UcSchedule roll = solve_uc_rolling(inst, {}, 2);
  REQUIRE(roll.status == SolveStatus::Optimal);
  CHECK(roll.cells.size() == full.cells.size());
  CHECK(roll.cost.total() >= full.objective - 1e-6);
  CHECK(solve_uc_rolling(inst, {}, 4).cost.total() == doctest::Approx(full.objective));
}

TEST_CASE("schedule documents") {
  const UcInstance inst = testutil::load_instance("net3");
  const UcSchedule s = solve_uc(inst, {}).schedule;
  const std::string a = schedule_to_json(s, inst);
  CHECK(a == schedule_to_json(solve_uc(inst, {}).schedule, inst));
  const std::string csv = audit_to_csv(s);
  CHECK(csv.rfind("node,period,bus,scc_exact,ilim,flag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4 * 3);
}

}  // TEST_SUITE
