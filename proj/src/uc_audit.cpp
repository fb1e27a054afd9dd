#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "sccuc/scc_engine.hpp"
#include "sccuc/uc.hpp"

namespace sccuc {

UcSchedule extract_and_audit(const Solution& sol, const UcInstance& inst, const UcModel& model) {
  UcSchedule s;
  s.status = sol.status;
  s.nodes = sol.nodes;
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::GapLimit) return s;
  s.objective = sol.objective;
  s.best_bound = sol.best_bound;

  const auto& L = model.layout;
  const auto& v = sol.values;
  const NetworkCase& c = inst.network;
  const std::size_t G = c.sgs.size(), C = c.ibgs.size(), N = c.bus_count(), T = L.periods;

  for (auto idx : L.am_z)
    if (std::abs(v[idx]) >= L.am_zmax * (1.0 - 1e-9))
      throw ZmaxBindingError("impedance entry reached the McCormick bound Z_max = " +
                             std::to_string(L.am_zmax) + "; re-solve with a larger bound");

  s.period_cost.assign(T, {});
  for (std::size_t t = 0; t < T; ++t) {
    auto& pc = s.period_cost[t];
    for (std::size_t g = 0; g < G; ++g) {
      const double on = std::round(v[L.x[g][t]]);
      pc.no_load += c.sgs[g].no_load_cost * inst.dt * on;
      pc.startup += c.sgs[g].startup_cost * v[L.startup[g][t]];
    }
  }

  for (std::size_t k = 0; k < L.nodes.size(); ++k) {
    const std::size_t ni = L.nodes[k];
    const auto& node = inst.tree[ni];
    for (std::size_t t = 0; t < T; ++t) {
      NodePeriod cell;
      cell.node = node.id;
      cell.period = t;
      for (std::size_t g = 0; g < G; ++g) cell.x.push_back(v[L.x[g][t]] > 0.5 ? 1 : 0);
      for (auto i : L.p[k][t]) cell.p.push_back(v[i]);
      for (auto i : L.r[k][t]) cell.r.push_back(v[i]);
      for (auto i : L.w[k][t]) cell.w.push_back(v[i]);
      for (auto i : L.hs[k][t]) cell.hs.push_back(v[i]);
      for (auto i : L.shed[k][t]) cell.shed += v[i];
      for (std::size_t cc = 0; cc < C; ++cc) cell.alpha.push_back(inst.alpha(ni, cc, t));
      for (std::size_t g = 0; g < G; ++g)
        cell.inertia += cell.x[g] * c.sgs[g].inertia * c.sgs[g].machine_base;
      for (double h : cell.hs) cell.inertia += h;
      for (double r : cell.r) cell.pfr += r;

      double demand = 0.0, wind = 0.0;
      for (std::size_t b = 0; b < N; ++b) demand += inst.demand(ni, b, t);
      for (double w : cell.w) wind += w;
      // Available wind less curtailment, over demand.
      cell.rho_w = demand > 0.0 ? wind / demand : 0.0;

      auto& pc = s.period_cost[t];
      for (std::size_t g = 0; g < G; ++g)
        pc.marginal += node.probability * inst.dt * c.sgs[g].marginal_cost * cell.p[g];
      pc.shed += node.probability * inst.dt * inst.shed_cost * cell.shed;

      std::vector<double> mags(N, 0.0);
      try {
        const auto res = scc_all_buses(c, CommitmentPattern{cell.x, cell.alpha});
        mags = res.magnitude;
      } catch (const IslandedNetworkError&) {
        // No source path: the audit records zero current at every bus.
      }
      for (std::size_t b = 0; b < N; ++b) {
        AuditRow row{node.id, t, c.buses[b].id, mags[b], L.ilim[b], false};
        row.flag = L.ilim[b] > 0.0 && mags[b] < L.ilim[b] - 1e-7 * std::max(1.0, L.ilim[b]);
        s.audit_flags += row.flag ? 1 : 0;
        s.audit.push_back(row);
      }
      s.cells.push_back(std::move(cell));
    }
  }
  for (const auto& pc : s.period_cost) {
    s.cost.startup += pc.startup;
    s.cost.no_load += pc.no_load;
    s.cost.marginal += pc.marginal;
    s.cost.shed += pc.shed;
  }
  return s;
}

std::string schedule_to_json(const UcSchedule& s, const UcInstance& inst) {
  using nlohmann::ordered_json;
  const NetworkCase& c = inst.network;
  ordered_json doc;
  doc["status"] = to_string(s.status);
  if (std::isfinite(s.objective)) doc["objective"] = s.objective;
  else doc["objective"] = nullptr;
  doc["bb_nodes"] = s.nodes;
  doc["cost"] = {{"startup", s.cost.startup},
                 {"no_load", s.cost.no_load},
                 {"marginal", s.cost.marginal},
                 {"shed", s.cost.shed},
                 {"total", s.cost.total()}};
  doc["audit_flags"] = s.audit_flags;
  ordered_json cells = ordered_json::array();
  for (const auto& cell : s.cells) {
    ordered_json j;
    j["node"] = cell.node;
    j["period"] = cell.period;
    ordered_json x, p, r, w, hs, alpha;
    for (std::size_t g = 0; g < c.sgs.size(); ++g) {
      x[c.sgs[g].id] = cell.x[g];
      p[c.sgs[g].id] = cell.p[g];
      if (!cell.r.empty()) r[c.sgs[g].id] = cell.r[g];
    }
    for (std::size_t k = 0; k < c.ibgs.size(); ++k) {
      w[c.ibgs[k].id] = cell.w[k];
      alpha[c.ibgs[k].id] = cell.alpha[k];
    }
    if (inst.freq)
      for (std::size_t k = 0; k < cell.hs.size(); ++k) hs[c.ibgs[inst.freq->wind_farms[k].ibg].id] = cell.hs[k];
    j["x"] = x;
    j["p"] = p;
    if (!cell.r.empty()) j["r"] = r;
    j["w"] = w;
    if (!cell.hs.empty()) j["hs"] = hs;
    j["alpha"] = alpha;
    j["shed"] = cell.shed;
    j["inertia"] = cell.inertia;
    j["pfr"] = cell.pfr;
    j["rho_w"] = cell.rho_w;
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string audit_to_csv(const UcSchedule& s) {
  std::string out = "node,period,bus,scc_exact,ilim,flag\n";
  char buf[160];
  for (const auto& r : s.audit) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%d,%.10g,%.10g,%d\n", r.node, r.period, r.bus,
                  r.scc_exact, r.ilim, r.flag ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace sccuc
