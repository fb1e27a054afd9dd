#include <algorithm>
#include <cmath>
#include <numeric>

#include "sccuc/scc_engine.hpp"
#include "sccuc/uc.hpp"

namespace sccuc {

std::size_t linearize_binary_product(MilpModel& m, std::size_t x1, std::size_t x2,
                                     const std::string& name) {
  const std::size_t eta = m.add_variable(name, 0.0, 1.0);
  m.add_constraint(name + "_le1", {{eta, 1.0}, {x1, -1.0}}, RowSense::LessEqual, 0.0);
  m.add_constraint(name + "_le2", {{eta, 1.0}, {x2, -1.0}}, RowSense::LessEqual, 0.0);
  m.add_constraint(name + "_ge", {{eta, 1.0}, {x1, -1.0}, {x2, -1.0}}, RowSense::GreaterEqual, -1.0);
  return eta;
}

std::vector<std::size_t> add_surrogate_scc_constraints(
    MilpModel& m, const SurrogateModel& s, const std::vector<std::size_t>& x_vars,
    std::vector<std::optional<std::size_t>>& eta_cache, std::span<const double> alpha,
    std::span<const double> ilim, const std::string& tag) {
  const std::size_t G = x_vars.size();
  if (s.sg_ids.size() != G || s.ibg_ids.size() != alpha.size() || s.buses.size() != ilim.size())
    throw DimensionError("surrogate model does not match the case");
  eta_cache.resize(pair_count(G));
  std::vector<std::size_t> rows;
  for (std::size_t f = 0; f < ilim.size(); ++f) {
    if (!(ilim[f] > 0.0)) continue;
    const auto& k = s.buses[f];
    std::vector<Term> terms;
    for (std::size_t g = 0; g < G; ++g)
      if (k.k_sg[g] != 0.0) terms.push_back({x_vars[g], k.k_sg[g]});
    std::size_t pm = 0;
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = i + 1; j < G; ++j, ++pm) {
        if (k.k_pair[pm] == 0.0) continue;
        if (!eta_cache[pm])
          eta_cache[pm] = linearize_binary_product(
              m, x_vars[i], x_vars[j], "eta_" + s.sg_ids[i] + "_" + s.sg_ids[j] + "_" + tag);
        terms.push_back({*eta_cache[pm], k.k_pair[pm]});
      }
    double rhs = ilim[f];
    for (std::size_t c = 0; c < alpha.size(); ++c) rhs -= k.k_ibg[c] * alpha[c];
    rows.push_back(m.add_constraint("scc_" + std::to_string(s.bus_ids[f]) + "_" + tag,
                                    std::move(terms), RowSense::GreaterEqual, rhs));
  }
  return rows;
}

double default_am_zmax(const NetworkCase& c) {
  const std::size_t G = c.sgs.size();
  if (G > 20) throw AmGuardError("too many SGs to bound the impedance matrix by enumeration");
  double zmax = 0.0;
  std::vector<std::uint8_t> x(G);
  for (std::uint32_t code = 0; code < (1u << G); ++code) {
    for (std::size_t g = 0; g < G; ++g) x[g] = (code >> g) & 1u;
    const auto lu = lu_factor(build_admittance(c, x));
    if (lu.singular()) continue;
    const CMatrix z = invert(lu);
    for (const auto& v : z.data()) zmax = std::max(zmax, std::abs(v));
  }
  if (zmax == 0.0) throw AmGuardError("no commitment pattern gives a non-singular network");
  return 2.0 * zmax;
}

namespace {

std::string sfx(std::size_t t) { return "t" + std::to_string(t); }
std::string sfx(int node, std::size_t t) { return "n" + std::to_string(node) + "_t" + std::to_string(t); }

// Buses grouped by connected component of the branch graph, keeping only
// components that have no shunt path to ground.
std::vector<std::vector<std::size_t>> floating_components(const NetworkCase& c) {
  const std::size_t n = c.bus_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<bool> grounded(n, false);
  for (const auto& br : c.branches) {
    if (br.is_shunt()) grounded[br.from] = true;
    else parent[find(br.from)] = find(br.to);
  }
  std::vector<bool> root_grounded(n, false);
  for (std::size_t i = 0; i < n; ++i)
    if (grounded[i]) root_grounded[find(i)] = true;
  std::vector<std::vector<std::size_t>> comps(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!root_grounded[find(i)]) comps[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& cp : comps)
    if (!cp.empty()) out.push_back(std::move(cp));
  return out;
}

struct AmPeriod {
  std::vector<std::size_t> z;                // N×N, row-major
  std::vector<std::vector<std::size_t>> mu;  // [bus i][g]
};

// ZY = I for a lossless network, with Z = jZ_im. Only the imaginary part of Z
// is a variable; μ(i, g) = Z_im(i, Ψ(g))·x_g is McCormick-linearized.
AmPeriod add_am_period(MilpModel& m, const NetworkCase& c, const std::vector<std::size_t>& x,
                       double zmax, std::size_t t) {
  const std::size_t n = c.bus_count(), G = c.sgs.size();
  const CMatrix y0 = line_admittance(c);
  AmPeriod am;
  am.z.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      am.z[i * n + k] = m.add_variable("zim_" + std::to_string(i + 1) + "_" + std::to_string(k + 1) +
                                           "_" + sfx(t),
                                       0.0, zmax);
  am.mu.assign(n, std::vector<std::size_t>(G));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < G; ++g) {
      const std::string nm = "mu_" + std::to_string(i + 1) + "_" + c.sgs[g].id + "_" + sfx(t);
      // Z ∈ [0, Z_max], so the lower envelope μ ≥ 0·x is the variable bound.
      const std::size_t mu = m.add_variable(nm, 0.0, zmax);
      const std::size_t zv = am.z[i * n + c.sgs[g].bus];
      am.mu[i][g] = mu;
      m.add_constraint(nm + "_a", {{mu, 1.0}, {x[g], -zmax}}, RowSense::LessEqual, 0.0);
      m.add_constraint(nm + "_c", {{mu, 1.0}, {zv, -1.0}}, RowSense::LessEqual, 0.0);
      m.add_constraint(nm + "_d", {{mu, 1.0}, {zv, -1.0}, {x[g], -zmax}}, RowSense::GreaterEqual, -zmax);
    }
  // Re[(jZ)(jB⁰ + Σ −j x_g/X_g)](i,k) = −Σ_l Z(i,l)B⁰(l,k) + Σ_{Ψ(g)=k} μ(i,g)/X_g = δ_ik
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Term> terms;
      for (std::size_t l = 0; l < n; ++l) {
        const double b = y0(l, k).imag();
        if (b != 0.0) terms.push_back({am.z[i * n + l], -b});
      }
      for (std::size_t g = 0; g < G; ++g)
        if (c.sgs[g].bus == k) terms.push_back({am.mu[i][g], 1.0 / c.sgs[g].xd_subtransient});
      m.add_constraint("zy_" + std::to_string(i + 1) + "_" + std::to_string(k + 1) + "_" + sfx(t),
                       std::move(terms), RowSense::Equal, i == k ? 1.0 : 0.0);
    }
  return am;
}

void check_am_guard(const NetworkCase& c) {
  if (c.bus_count() > kAmMaxBuses)
    throw AmGuardError("analytical SCC formulation limited to " + std::to_string(kAmMaxBuses) +
                       " buses (case has " + std::to_string(c.bus_count()) + ")");
  // Inductive and lossless: Y = −jB with B an M-matrix, so every entry of
  // Z = jB⁻¹ has a non-negative imaginary part.
  for (const auto& br : c.branches)
    if (br.impedance.real() != 0.0 || !(br.impedance.imag() > 0.0))
      throw AmGuardError("analytical SCC formulation requires a lossless inductive network");
}

}  // namespace

UcModel build_uc(const UcInstance& inst, const UcOptions& opts) {
  validate_instance(inst);
  const NetworkCase& c = inst.network;
  const std::size_t G = c.sgs.size(), C = c.ibgs.size(), N = c.bus_count();
  const auto T = static_cast<std::size_t>(inst.periods);
  UcModel out;
  MilpModel& m = out.milp;
  UcLayout& L = out.layout;
  L.periods = T;
  L.nodes = inst.dispatch_nodes();
  L.ilim = opts.ilim ? std::vector<double>(N, *opts.ilim) : inst.scc_limit;
  for (double v : L.ilim)
    if (!(v >= 0.0)) throw std::invalid_argument("SCC limits must be non-negative");
  const bool scc_active =
      opts.scc != SccMode::None && std::any_of(L.ilim.begin(), L.ilim.end(), [](double v) { return v > 0.0; });
  if (opts.scc == SccMode::Surrogate && !opts.surrogate)
    throw std::invalid_argument("surrogate SCC mode needs a fitted surrogate");
  if (opts.scc == SccMode::Analytical) {
    check_am_guard(c);
    if (opts.am_zmax && !(*opts.am_zmax > 0.0))
      throw ZmaxBindingError("Z_max = " + std::to_string(*opts.am_zmax) +
                             " binds every impedance entry; re-solve with a positive bound");
    L.am_zmax = opts.am_zmax ? *opts.am_zmax : default_am_zmax(c);
  }

  // First stage: commitment shared by every scenario node.
  L.x.assign(G, std::vector<std::size_t>(T));
  L.startup = L.x;
  L.shutdown = L.x;
  for (std::size_t g = 0; g < G; ++g) {
    const auto& sg = c.sgs[g];
    for (std::size_t t = 0; t < T; ++t) {
      L.x[g][t] = m.add_binary("x_" + sg.id + "_" + sfx(t), sg.no_load_cost * inst.dt);
      L.startup[g][t] = m.add_variable("su_" + sg.id + "_" + sfx(t), 0.0, 1.0, VarKind::Continuous,
                                       sg.startup_cost);
      L.shutdown[g][t] = m.add_variable("sd_" + sg.id + "_" + sfx(t), 0.0, 1.0);
    }
    const double init = (!inst.initial_on.empty() && inst.initial_on[g]) ? 1.0 : 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<Term> terms{{L.startup[g][t], 1.0}, {L.shutdown[g][t], -1.0}, {L.x[g][t], -1.0}};
      double rhs = 0.0;
      if (t == 0) rhs = -init;
      else terms.push_back({L.x[g][t - 1], 1.0});
      m.add_constraint("trans_" + sg.id + "_" + sfx(t), std::move(terms), RowSense::Equal, rhs);
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (sg.min_up > 1) {
        std::vector<Term> terms{{L.x[g][t], -1.0}};
        for (std::size_t s = t + 1 - std::min<std::size_t>(t + 1, std::size_t(sg.min_up)); s <= t; ++s)
          terms.push_back({L.startup[g][s], 1.0});
        m.add_constraint("minup_" + sg.id + "_" + sfx(t), std::move(terms), RowSense::LessEqual, 0.0);
      }
      if (sg.min_down > 1) {
        std::vector<Term> terms{{L.x[g][t], 1.0}};
        for (std::size_t s = t + 1 - std::min<std::size_t>(t + 1, std::size_t(sg.min_down)); s <= t; ++s)
          terms.push_back({L.shutdown[g][s], 1.0});
        m.add_constraint("mindn_" + sg.id + "_" + sfx(t), std::move(terms), RowSense::LessEqual, 1.0);
      }
    }
  }

  // A floating island needs a committed SG before its Y(x) is invertible.
  if (scc_active) {
    for (const auto& comp : floating_components(c)) {
      std::vector<std::size_t> members;
      for (std::size_t g = 0; g < G; ++g)
        if (std::find(comp.begin(), comp.end(), c.sgs[g].bus) != comp.end()) members.push_back(g);
      if (members.empty()) continue;
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<Term> terms;
        for (auto g : members) terms.push_back({L.x[g][t], 1.0});
        m.add_constraint("island_" + std::to_string(c.buses[comp.front()].id) + "_" + sfx(t),
                         std::move(terms), RowSense::GreaterEqual, 1.0);
      }
    }
  }

  std::vector<std::vector<std::optional<std::size_t>>> eta(T);
  std::vector<AmPeriod> am;
  if (opts.scc == SccMode::Analytical && scc_active) {
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<std::size_t> xt(G);
      for (std::size_t g = 0; g < G; ++g) xt[g] = L.x[g][t];
      am.push_back(add_am_period(m, c, xt, L.am_zmax, t));
      L.am_z.insert(L.am_z.end(), am.back().z.begin(), am.back().z.end());
    }
  }

  // Frequency data shared by all nodes.
  std::vector<double> h_unit(G);
  for (std::size_t g = 0; g < G; ++g) h_unit[g] = c.sgs[g].inertia * c.sgs[g].machine_base;
  const FrequencyParams* fp = (opts.freq && inst.freq) ? &*inst.freq : nullptr;
  if (opts.freq && !inst.freq) throw std::invalid_argument("frequency constraints requested but the instance has no freq block");
  if (fp) {
    NadirGrid grid;
    grid.h_max = std::accumulate(h_unit.begin(), h_unit.end(), 0.0);
    for (const auto& w : fp->wind_farms) {
      grid.hs_max.push_back(w.si_max);
      grid.h_max += w.si_max;
    }
    for (const auto& sg : c.sgs) grid.r_max += sg.p_max;
    grid.h_points = opts.nadir_h_points;
    grid.hs_levels = opts.nadir_hs_levels;
    L.planes = generate_nadir_planes(*fp, grid);
  }

  L.network_flow = std::any_of(c.branches.begin(), c.branches.end(),
                               [](const Branch& b) { return b.rating.has_value() && !b.is_shunt(); });

  const std::size_t K = L.nodes.size();
  L.p.assign(K, {});
  L.r = L.w = L.hs = L.shed = L.p;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t ni = L.nodes[k];
    const auto& node = inst.tree[ni];
    const double pi = node.probability;
    L.p[k].resize(T);
    L.r[k].resize(T);
    L.w[k].resize(T);
    L.hs[k].resize(T);
    L.shed[k].resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      const std::string tag = sfx(node.id, t);
      auto& p = L.p[k][t];
      auto& r = L.r[k][t];
      auto& w = L.w[k][t];
      auto& hs = L.hs[k][t];
      auto& shed = L.shed[k][t];
      std::vector<double> alpha(C);
      for (std::size_t cc = 0; cc < C; ++cc) alpha[cc] = inst.alpha(ni, cc, t);

      for (std::size_t g = 0; g < G; ++g) {
        const auto& sg = c.sgs[g];
        p.push_back(m.add_variable("p_" + sg.id + "_" + tag, 0.0, sg.p_max, VarKind::Continuous,
                                   pi * inst.dt * sg.marginal_cost));
        m.add_constraint("pmin_" + sg.id + "_" + tag, {{p[g], 1.0}, {L.x[g][t], -sg.p_min}},
                         RowSense::GreaterEqual, 0.0);
        m.add_constraint("pmax_" + sg.id + "_" + tag, {{p[g], 1.0}, {L.x[g][t], -sg.p_max}},
                         RowSense::LessEqual, 0.0);
      }
      for (std::size_t cc = 0; cc < C; ++cc)
        w.push_back(m.add_variable("w_" + c.ibgs[cc].id + "_" + tag, 0.0, inst.available(ni, cc, t)));

      double demand = 0.0;
      for (std::size_t b = 0; b < N; ++b) demand += inst.demand(ni, b, t);

      if (!L.network_flow) {
        shed.push_back(m.add_variable("shed_" + tag, 0.0, std::max(demand, 0.0), VarKind::Continuous,
                                      pi * inst.dt * inst.shed_cost));
        std::vector<Term> bal;
        for (auto v : p) bal.push_back({v, 1.0});
        for (auto v : w) bal.push_back({v, 1.0});
        bal.push_back({shed[0], 1.0});
        m.add_constraint("bal_" + tag, std::move(bal), RowSense::Equal, demand);
      } else {
        // DC flow: bus angles, per-bus balance and shedding, rated branch limits.
        std::vector<std::size_t> theta(N);
        for (std::size_t b = 0; b < N; ++b) {
          const double lo = b == 0 ? 0.0 : -kInf, hi = b == 0 ? 0.0 : kInf;
          theta[b] = m.add_variable("th_" + std::to_string(c.buses[b].id) + "_" + tag, lo, hi);
          const double d = inst.demand(ni, b, t);
          shed.push_back(m.add_variable("shed_" + std::to_string(c.buses[b].id) + "_" + tag, 0.0,
                                        std::max(d, 0.0), VarKind::Continuous,
                                        pi * inst.dt * inst.shed_cost));
        }
        std::vector<std::vector<Term>> bal(N);
        for (std::size_t g = 0; g < G; ++g) bal[c.sgs[g].bus].push_back({p[g], 1.0});
        for (std::size_t cc = 0; cc < C; ++cc) bal[c.ibgs[cc].bus].push_back({w[cc], 1.0});
        for (std::size_t b = 0; b < N; ++b) bal[b].push_back({shed[b], 1.0});
        for (std::size_t br = 0; br < c.branches.size(); ++br) {
          const auto& e = c.branches[br];
          if (e.is_shunt()) continue;
          const double sus = 1.0 / e.impedance.imag();
          // flow f→t = sus·(θf − θt) leaves `from` and enters `to`
          bal[e.from].push_back({theta[e.from], -sus});
          bal[e.from].push_back({theta[e.to], sus});
          bal[e.to].push_back({theta[e.to], -sus});
          bal[e.to].push_back({theta[e.from], sus});
          if (e.rating) {
            const std::string nm = "flow_" + std::to_string(br + 1) + "_" + tag;
            m.add_constraint(nm + "_hi", {{theta[e.from], sus}, {theta[e.to], -sus}}, RowSense::LessEqual, *e.rating);
            m.add_constraint(nm + "_lo", {{theta[e.from], sus}, {theta[e.to], -sus}}, RowSense::GreaterEqual, -*e.rating);
          }
        }
        for (std::size_t b = 0; b < N; ++b)
          m.add_constraint("bal_" + std::to_string(c.buses[b].id) + "_" + tag, std::move(bal[b]),
                           RowSense::Equal, inst.demand(ni, b, t));
      }

      if (fp) {
        for (std::size_t g = 0; g < G; ++g) {
          const auto& sg = c.sgs[g];
          r.push_back(m.add_variable("r_" + sg.id + "_" + tag, 0.0, sg.p_max));
          m.add_constraint("head_" + sg.id + "_" + tag,
                           {{r[g], 1.0}, {p[g], 1.0}, {L.x[g][t], -sg.p_max}}, RowSense::LessEqual, 0.0);
        }
        for (std::size_t j = 0; j < fp->wind_farms.size(); ++j) {
          const auto& wf = fp->wind_farms[j];
          hs.push_back(m.add_variable("hs_" + c.ibgs[wf.ibg].id + "_" + tag, 0.0,
                                      wf.si_max * alpha[wf.ibg]));
        }
        const double ss_need = fp->disturbance - fp->damping * fp->ss_limit;
        if (ss_need > 0.0) {
          std::vector<Term> terms;
          for (auto v : r) terms.push_back({v, 1.0});
          m.add_constraint("ss_" + tag, std::move(terms), RowSense::GreaterEqual, ss_need);
        }
        auto inertia_terms = [&](double scale) {
          std::vector<Term> terms;
          for (std::size_t g = 0; g < G; ++g)
            if (h_unit[g] != 0.0) terms.push_back({L.x[g][t], scale * h_unit[g]});
          for (auto v : hs) terms.push_back({v, scale});
          return terms;
        };
        m.add_constraint("rocof_" + tag, inertia_terms(1.0), RowSense::GreaterEqual,
                         fp->disturbance * fp->nominal_frequency / (2.0 * fp->rocof_limit));
        for (std::size_t i = 0; i < L.planes.size(); ++i) {
          const auto& pl = L.planes[i];
          if (pl.a == 0.0 && pl.b == 0.0) continue;
          std::vector<Term> terms = inertia_terms(pl.a);
          for (auto v : r) terms.push_back({v, pl.b});
          for (std::size_t j = 0; j < hs.size(); ++j)
            if (pl.c[j] != 0.0) terms.push_back({hs[j], pl.c[j]});
          m.add_constraint("nadir" + std::to_string(i) + "_" + tag, std::move(terms),
                           RowSense::LessEqual, -pl.d);
        }
      }

      if (scc_active && opts.scc == SccMode::Surrogate) {
        std::vector<std::size_t> xt(G);
        for (std::size_t g = 0; g < G; ++g) xt[g] = L.x[g][t];
        add_surrogate_scc_constraints(m, *opts.surrogate, xt, eta[t], alpha, L.ilim, tag);
      }
      if (scc_active && opts.scc == SccMode::Analytical) {
        // Σ_g a_g μ(F,g) + Σ_c I_c α_c Z(F,Φ(c)) ≥ ilim·Z(F,F)
        const auto& ap = am[t];
        for (std::size_t f = 0; f < N; ++f) {
          if (!(L.ilim[f] > 0.0)) continue;
          std::vector<Term> terms;
          for (std::size_t g = 0; g < G; ++g) {
            const auto& sg = c.sgs[g];
            terms.push_back({ap.mu[f][g], c.beta * c.buses[sg.bus].nominal_voltage / sg.xd_subtransient});
          }
          double zff = -L.ilim[f];
          for (std::size_t cc = 0; cc < C; ++cc) {
            const auto& ib = c.ibgs[cc];
            const double coef = ib.fault_current * ib.pe_ratio * alpha[cc];
            if (coef == 0.0) continue;
            if (ib.bus == f) zff += coef;
            else terms.push_back({ap.z[f * N + ib.bus], coef});
          }
          terms.push_back({ap.z[f * N + f], zff});
          m.add_constraint("am_scc_" + std::to_string(c.buses[f].id) + "_" + tag, std::move(terms),
                           RowSense::GreaterEqual, 0.0);
        }
      }
    }
  }
  return out;
}

UcRun solve_uc(const UcInstance& inst, const UcOptions& opts, double gap) {
  UcRun run;
  run.model = build_uc(inst, opts);
  run.solution = solve_milp(run.model.milp, gap);
  run.schedule = extract_and_audit(run.solution, inst, run.model);
  return run;
}

UcSchedule solve_uc_rolling(const UcInstance& inst, const UcOptions& opts, int horizon) {
  if (horizon < 1) throw std::invalid_argument("rolling horizon must be at least one period");
  validate_instance(inst);
  const auto T = static_cast<std::size_t>(inst.periods);
  UcSchedule total;
  total.status = SolveStatus::Optimal;
  total.objective = 0.0;
  total.best_bound = 0.0;
  std::vector<bool> on = inst.initial_on;
  if (on.empty()) on.assign(inst.network.sgs.size(), false);

  auto slice = [](const std::vector<double>& v, std::size_t from, std::size_t len) {
    if (v.size() <= 1) return v;
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(from),
                               v.begin() + static_cast<std::ptrdiff_t>(std::min(v.size(), from + len)));
  };

  for (std::size_t t0 = 0; t0 < T; ++t0) {
    const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(horizon), T - t0);
    UcInstance win = inst;
    win.periods = static_cast<int>(len);
    for (auto& b : win.network.buses) b.demand = slice(b.demand, t0, len);
    for (auto& g : win.network.ibgs) g.available = slice(g.available, t0, len);
    win.initial_on = on;
    UcRun run = solve_uc(win, opts);
    if (run.schedule.status != SolveStatus::Optimal && run.schedule.status != SolveStatus::GapLimit) {
      total.status = run.schedule.status;
      total.objective = kInf;
      return total;
    }
    if (run.schedule.status == SolveStatus::GapLimit) total.status = SolveStatus::GapLimit;
    for (const auto& cell : run.schedule.cells) {
      if (cell.period != 0) continue;
      NodePeriod kept = cell;
      kept.period = t0;
      total.cells.push_back(std::move(kept));
    }
    for (const auto& row : run.schedule.audit) {
      if (row.period != 0) continue;
      AuditRow kept = row;
      kept.period = t0;
      total.audit_flags += kept.flag ? 1 : 0;
      total.audit.push_back(kept);
    }
    const auto& pc = run.schedule.period_cost.at(0);
    total.cost.startup += pc.startup;
    total.cost.no_load += pc.no_load;
    total.cost.marginal += pc.marginal;
    total.cost.shed += pc.shed;
    total.nodes += run.schedule.nodes;
    for (std::size_t g = 0; g < on.size(); ++g)
      on[g] = run.solution.values[run.model.layout.x[g][0]] > 0.5;
  }
  total.objective = total.cost.total();
  total.best_bound = total.objective;
  total.period_cost.clear();
  return total;
}

}  // namespace sccuc
