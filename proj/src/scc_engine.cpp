#include "sccuc/scc_engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sccuc {

namespace {
constexpr Complex kJ{0.0, 1.0};
}

CommitmentPattern CommitmentPattern::all_on(const NetworkCase& c) {
  return {std::vector<std::uint8_t>(c.sgs.size(), 1), std::vector<double>(c.ibgs.size(), 1.0)};
}

CommitmentPattern CommitmentPattern::parse(const NetworkCase& c, const std::string& bits,
                                           const std::string& alphas) {
  CommitmentPattern p;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("SG status must be a string of 0/1");
    p.x.push_back(ch == '1' ? 1 : 0);
  }
  std::stringstream ss(alphas);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double a = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad alpha value: " + item);
    p.alpha.push_back(a);
  }
  if (p.alpha.empty() && !c.ibgs.empty() && alphas.empty()) p.alpha.assign(c.ibgs.size(), 1.0);
  validate_pattern(c, p);
  return p;
}

void validate_pattern(const NetworkCase& c, const CommitmentPattern& p) {
  if (p.x.size() != c.sgs.size())
    throw DimensionError("commitment pattern has " + std::to_string(p.x.size()) +
                         " SG entries, case has " + std::to_string(c.sgs.size()));
  if (p.alpha.size() != c.ibgs.size())
    throw DimensionError("commitment pattern has " + std::to_string(p.alpha.size()) +
                         " IBG entries, case has " + std::to_string(c.ibgs.size()));
  for (auto v : p.x)
    if (v > 1) throw std::invalid_argument("SG status must be 0 or 1");
  for (double a : p.alpha)
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

CMatrix line_admittance(const NetworkCase& c) {
  const std::size_t n = c.bus_count();
  CMatrix y(n, n);
  for (const auto& br : c.branches) {
    const Complex adm = 1.0 / br.impedance;
    y(br.from, br.from) += adm;
    if (br.is_shunt()) continue;
    y(br.to, br.to) += adm;
    y(br.from, br.to) -= adm;
    y(br.to, br.from) -= adm;
  }
  return y;
}

CMatrix build_admittance(const NetworkCase& c, std::span<const std::uint8_t> x) {
  if (x.size() != c.sgs.size()) throw DimensionError("build_admittance: x has wrong length");
  CMatrix y = line_admittance(c);
  for (std::size_t g = 0; g < c.sgs.size(); ++g) {
    if (!x[g]) continue;
    const auto& sg = c.sgs[g];
    y(sg.bus, sg.bus) += 1.0 / (kJ * sg.xd_subtransient);
  }
  return y;
}

Complex sg_norton_current(const NetworkCase& c, std::size_t g) {
  const auto& sg = c.sgs.at(g);
  const double e = c.beta * c.buses[sg.bus].nominal_voltage;
  return e / (kJ * sg.xd_subtransient);
}

Complex ibg_fault_injection(const NetworkCase& c, std::size_t ibg, double alpha) {
  const auto& g = c.ibgs.at(ibg);
  return -kJ * (g.fault_current * g.pe_ratio * alpha);
}

std::vector<int> unsupported_buses(const NetworkCase& c, std::span<const std::uint8_t> x) {
  const std::size_t n = c.bus_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<bool> grounded(n, false);
  for (const auto& br : c.branches) {
    if (br.is_shunt()) {
      grounded[br.from] = true;
    } else {
      parent[find(br.from)] = find(br.to);
    }
  }
  for (std::size_t g = 0; g < c.sgs.size(); ++g)
    if (x[g]) grounded[c.sgs[g].bus] = true;
  std::vector<bool> root_ok(n, false);
  for (std::size_t i = 0; i < n; ++i)
    if (grounded[i]) root_ok[find(i)] = true;
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!root_ok[find(i)]) out.push_back(c.buses[i].id);
  return out;
}

Complex SccDecomposition::current(std::size_t fault_bus, std::span<const double> alpha) const {
  Complex num = sg_numerator[fault_bus];
  for (std::size_t k = 0; k < alpha.size(); ++k) num += alpha[k] * ibg_numerator(fault_bus, k);
  return num / zff[fault_bus];
}

namespace {

[[noreturn]] void throw_islanded(const NetworkCase& c, std::span<const std::uint8_t> x) {
  auto buses = unsupported_buses(c, x);
  std::ostringstream msg;
  msg << "islanded/zero-source network: admittance matrix is singular";
  if (!buses.empty()) {
    msg << "; unsupported buses:";
    for (int b : buses) msg << ' ' << b;
  }
  throw IslandedNetworkError(msg.str(), std::move(buses));
}

}  // namespace

SccDecomposition decompose_scc(const NetworkCase& c, std::span<const std::uint8_t> x) {
  const CMatrix y = build_admittance(c, x);
  const auto lu = lu_factor(y);
  if (lu.singular()) throw_islanded(c, x);

  SccDecomposition d;
  d.z = invert(lu);
  const std::size_t n = c.bus_count();
  d.sg_numerator.assign(n, Complex{});
  d.ibg_numerator = CMatrix(n, c.ibgs.size());
  d.zff.resize(n);
  std::vector<Complex> ig(c.sgs.size());
  for (std::size_t g = 0; g < c.sgs.size(); ++g) ig[g] = sg_norton_current(c, g);
  std::vector<Complex> ic(c.ibgs.size());
  for (std::size_t k = 0; k < c.ibgs.size(); ++k) ic[k] = ibg_fault_injection(c, k, 1.0);

  for (std::size_t f = 0; f < n; ++f) {
    Complex acc{};
    for (std::size_t g = 0; g < c.sgs.size(); ++g)
      if (x[g]) acc -= d.z(f, c.sgs[g].bus) * ig[g];
    d.sg_numerator[f] = acc;
    for (std::size_t k = 0; k < c.ibgs.size(); ++k)
      d.ibg_numerator(f, k) = -d.z(f, c.ibgs[k].bus) * ic[k];
    d.zff[f] = d.z(f, f);
  }
  return d;
}

SccResult scc_all_buses(const NetworkCase& c, const CommitmentPattern& p) {
  validate_pattern(c, p);
  SccDecomposition d = decompose_scc(c, p.x);
  SccResult r;
  const std::size_t n = c.bus_count();
  r.current.resize(n);
  r.magnitude.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    r.current[f] = d.current(f, p.alpha);
    r.magnitude[f] = std::abs(r.current[f]);
  }
  r.zff = std::move(d.zff);
  r.z = std::move(d.z);
  return r;
}

double zy_residual(const CMatrix& z, const CMatrix& y) {
  CMatrix prod = z * y;
  for (std::size_t i = 0; i < prod.rows(); ++i) prod(i, i) -= 1.0;
  return prod.norm_inf();
}

Complex verify_superposition(const NetworkCase& c, const CommitmentPattern& p,
                             std::size_t fault_bus, const OracleOptions& opts) {
  validate_pattern(c, p);
  const std::size_t n = c.bus_count();
  if (fault_bus >= n) throw DimensionError("verify_superposition: fault bus out of range");

  const CMatrix y = build_admittance(c, p.x);

  // Pre-fault IBG output, taken at unity power factor from its online capacity.
  std::vector<Complex> ibg_load(c.ibgs.size());
  for (std::size_t k = 0; k < c.ibgs.size(); ++k) {
    const auto& g = c.ibgs[k];
    ibg_load[k] = opts.ibg_load_scale * p.alpha[k] * g.capacity / c.buses[g.bus].nominal_voltage;
  }

  // Pre-fault circuit.
  std::vector<Complex> j_pre(n);
  for (std::size_t g = 0; g < c.sgs.size(); ++g)
    if (p.x[g]) j_pre[c.sgs[g].bus] += sg_norton_current(c, g);
  for (std::size_t k = 0; k < c.ibgs.size(); ++k) j_pre[c.ibgs[k].bus] += ibg_load[k];
  const auto lu_pre = lu_factor(y);
  if (lu_pre.singular()) throw_islanded(c, p.x);
  const std::vector<Complex> v_pre = solve(lu_pre, std::span<const Complex>(j_pre));

  // Pure-fault circuit: SG sources removed, IBGs inject (I_f - I_L), and the
  // fault bus is held at -V_F(0).
  std::vector<Complex> j_pure(n);
  for (std::size_t k = 0; k < c.ibgs.size(); ++k)
    j_pure[c.ibgs[k].bus] += ibg_fault_injection(c, k, p.alpha[k]) - ibg_load[k];
  std::vector<Complex> v_pure(n);
  v_pure[fault_bus] = -v_pre[fault_bus];

  if (n > 1) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
      if (i != fault_bus) keep.push_back(i);
    CMatrix y_red(keep.size(), keep.size());
    std::vector<Complex> rhs(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = 0; b < keep.size(); ++b) y_red(a, b) = y(keep[a], keep[b]);
      rhs[a] = j_pure[keep[a]] - y(keep[a], fault_bus) * v_pure[fault_bus];
    }
    const auto lu_red = lu_factor(y_red);
    if (lu_red.singular()) throw_islanded(c, p.x);
    const auto v_red = solve(lu_red, std::span<const Complex>(rhs));
    for (std::size_t a = 0; a < keep.size(); ++a) v_pure[keep[a]] = v_red[a];
  }

  // Net injection at F in the pure-fault circuit is the fault-source current
  // plus whatever the local IBG injects.
  Complex injected{};
  for (std::size_t k = 0; k < n; ++k) injected += y(fault_bus, k) * v_pure[k];
  // The pre-fault circuit carries no fault current, so this is the total.
  return injected - j_pure[fault_bus];
}

}  // namespace sccuc
