#include "sccuc/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "json.hpp"
#include "sccuc/milp.hpp"
#include "sccuc/scc_engine.hpp"

namespace sccuc {

using nlohmann::ordered_json;

std::uint8_t SccDataset::x(std::size_t sample, std::size_t g) const {
  const std::size_t shift = sg_count + ibg_count - 1 - g;
  return static_cast<std::uint8_t>((codes[sample] >> shift) & 1u);
}

double SccDataset::alpha(std::size_t sample, std::size_t c) const {
  const std::size_t shift = ibg_count - 1 - c;
  return static_cast<double>((codes[sample] >> shift) & 1u);
}

std::vector<std::uint8_t> SccDataset::x_of(std::size_t sample) const {
  std::vector<std::uint8_t> v(sg_count);
  for (std::size_t g = 0; g < sg_count; ++g) v[g] = x(sample, g);
  return v;
}

std::vector<double> SccDataset::alpha_of(std::size_t sample) const {
  std::vector<double> v(ibg_count);
  for (std::size_t c = 0; c < ibg_count; ++c) v[c] = alpha(sample, c);
  return v;
}

namespace {

struct Slice {
  std::vector<std::uint32_t> codes;
  std::vector<double> scc;  // row-major, samples × buses
  std::size_t skipped = 0;
};

// All α corners for one SG pattern; Z is formed once per pattern.
Slice enumerate_slice(const NetworkCase& c, std::uint32_t xcode) {
  const std::size_t G = c.sgs.size(), C = c.ibgs.size(), n = c.bus_count();
  std::vector<std::uint8_t> x(G);
  for (std::size_t g = 0; g < G; ++g) x[g] = (xcode >> (G - 1 - g)) & 1u;
  Slice s;
  const std::uint32_t corners = 1u << C;
  SccDecomposition d;
  try {
    d = decompose_scc(c, x);
  } catch (const IslandedNetworkError&) {
    s.skipped = corners;
    return s;
  }
  s.codes.reserve(corners);
  s.scc.reserve(std::size_t{corners} * n);
  std::vector<double> alpha(C);
  for (std::uint32_t a = 0; a < corners; ++a) {
    for (std::size_t k = 0; k < C; ++k) alpha[k] = (a >> (C - 1 - k)) & 1u;
    s.codes.push_back((xcode << C) | a);
    for (std::size_t f = 0; f < n; ++f) s.scc.push_back(std::abs(d.current(f, alpha)));
  }
  return s;
}

void check_size(const NetworkCase& c) {
  validate_case(c);
  const std::size_t bits = c.sgs.size() + c.ibgs.size();
  if (bits > kMaxEnumerationBits)
    throw DatasetSizeError("dataset enumeration over " + std::to_string(bits) +
                           " generators exceeds the limit of " +
                           std::to_string(kMaxEnumerationBits));
}

SccDataset assemble(const NetworkCase& c, std::vector<Slice>& slices) {
  SccDataset ds;
  ds.sg_count = c.sgs.size();
  ds.ibg_count = c.ibgs.size();
  ds.bus_count = c.bus_count();
  std::size_t total = 0;
  for (const auto& s : slices) total += s.codes.size();
  ds.codes.reserve(total);
  ds.scc = RMatrix(total, ds.bus_count);
  std::size_t row = 0;
  for (auto& s : slices) {
    ds.skipped += s.skipped;
    for (std::size_t i = 0; i < s.codes.size(); ++i, ++row) {
      ds.codes.push_back(s.codes[i]);
      for (std::size_t f = 0; f < ds.bus_count; ++f) ds.scc(row, f) = s.scc[i * ds.bus_count + f];
    }
    s = Slice{};
  }
  return ds;
}

}  // namespace

SccDataset enumerate_dataset(const NetworkCase& c) {
  check_size(c);
  const std::int64_t patterns = std::int64_t{1} << c.sgs.size();
  std::vector<Slice> slices(static_cast<std::size_t>(patterns));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < patterns; ++p) {
    try {
      slices[static_cast<std::size_t>(p)] = enumerate_slice(c, static_cast<std::uint32_t>(p));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(c, slices);
}

SccDataset enumerate_dataset_serial(const NetworkCase& c) {
  check_size(c);
  const std::uint32_t patterns = 1u << c.sgs.size();
  std::vector<Slice> slices(patterns);
  for (std::uint32_t p = 0; p < patterns; ++p) slices[p] = enumerate_slice(c, p);
  return assemble(c, slices);
}

std::string to_string(FitMethod m) {
  switch (m) {
    case FitMethod::DM1: return "dm1";
    case FitMethod::DM2: return "dm2";
    case FitMethod::DM3: return "dm3";
  }
  return "?";
}

FitMethod parse_fit_method(const std::string& s) {
  if (s == "dm1") return FitMethod::DM1;
  if (s == "dm2") return FitMethod::DM2;
  if (s == "dm3") return FitMethod::DM3;
  throw std::invalid_argument("unknown fit method '" + s + "' (expected dm1, dm2 or dm3)");
}

std::size_t pair_count(std::size_t sgs) { return sgs < 2 ? 0 : sgs * (sgs - 1) / 2; }

std::vector<double> surrogate_features(std::span<const std::uint8_t> x,
                                       std::span<const double> alpha) {
  std::vector<double> f;
  f.reserve(x.size() + alpha.size() + pair_count(x.size()));
  for (auto v : x) f.push_back(v);
  for (double a : alpha) f.push_back(a);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) f.push_back(double(x[i] & x[j]));
  return f;
}

double eval_surrogate(const SccSurrogate& s, std::span<const std::uint8_t> x,
                      std::span<const double> alpha) {
  if (x.size() != s.k_sg.size() || alpha.size() != s.k_ibg.size())
    throw DimensionError("eval_surrogate: pattern does not match the surrogate");
  double v = 0.0;
  for (std::size_t g = 0; g < x.size(); ++g) v += s.k_sg[g] * x[g];
  for (std::size_t c = 0; c < alpha.size(); ++c) v += s.k_ibg[c] * alpha[c];
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j, ++m)
      if (x[i] && x[j]) v += s.k_pair[m];
  return v;
}

namespace {

RMatrix design_matrix(const SccDataset& ds) {
  const std::size_t p = ds.sg_count + ds.ibg_count + pair_count(ds.sg_count);
  RMatrix X(ds.size(), p);
  for (std::size_t w = 0; w < ds.size(); ++w) {
    const auto f = surrogate_features(ds.x_of(w), ds.alpha_of(w));
    std::copy(f.begin(), f.end(), X.row(w).begin());
  }
  return X;
}

SccSurrogate unpack(const SccDataset& ds, std::size_t bus, FitMethod method,
                    const std::vector<double>& k) {
  SccSurrogate s;
  s.method = method;
  s.bus = bus;
  auto it = k.begin();
  s.k_sg.assign(it, it + static_cast<std::ptrdiff_t>(ds.sg_count));
  it += static_cast<std::ptrdiff_t>(ds.sg_count);
  s.k_ibg.assign(it, it + static_cast<std::ptrdiff_t>(ds.ibg_count));
  it += static_cast<std::ptrdiff_t>(ds.ibg_count);
  s.k_pair.assign(it, k.end());
  return s;
}

void check_fit_inputs(const SccDataset& ds, std::size_t bus) {
  if (bus >= ds.bus_count) throw DimensionError("fault bus index out of range");
  const std::size_t p = ds.sg_count + ds.ibg_count + pair_count(ds.sg_count);
  if (ds.size() < p)
    throw FitError("dataset has " + std::to_string(ds.size()) + " samples for " +
                   std::to_string(p) + " coefficients");
}

}  // namespace

SccSurrogate fit_dm1(const SccDataset& ds, std::size_t bus) {
  check_fit_inputs(ds, bus);
  const RMatrix X = design_matrix(ds);
  const std::size_t p = X.cols();
  RMatrix normal(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t w = 0; w < X.rows(); ++w) {
    const auto row = X.row(w);
    const double y = ds.scc(w, bus);
    for (std::size_t i = 0; i < p; ++i) {
      if (row[i] == 0.0) continue;
      rhs[i] += row[i] * y;
      for (std::size_t j = 0; j < p; ++j) normal(i, j) += row[i] * row[j];
    }
  }
  // Tikhonov damping keeps rank-deficient designs solvable and deterministic.
  double scale = 1.0;
  for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, normal(i, i));
  for (std::size_t i = 0; i < p; ++i) normal(i, i) += 1e-10 * scale;
  const auto k = solve(lu_factor(normal), std::span<const double>(rhs));
  return unpack(ds, bus, FitMethod::DM1, k);
}

SccSurrogate fit_dm2(const SccDataset& ds, std::size_t bus) {
  check_fit_inputs(ds, bus);
  const RMatrix X = design_matrix(ds);
  const std::size_t p = X.cols();
  MilpModel m;
  for (std::size_t j = 0; j < p; ++j) m.add_variable("k" + std::to_string(j), -kInf, kInf);
  // min Σ (y − Xk)  ⇔  min −Σ_ω X_ω k  (+ Σ y)
  double ysum = 0.0;
  for (std::size_t w = 0; w < X.rows(); ++w) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < p; ++j) {
      if (X(w, j) == 0.0) continue;
      terms.push_back({j, X(w, j)});
      m.add_objective(j, -X(w, j));
    }
    m.add_constraint("w" + std::to_string(w), std::move(terms), RowSense::LessEqual, ds.scc(w, bus));
    ysum += ds.scc(w, bus);
  }
  m.set_objective_constant(ysum);
  const Solution sol = solve_lp(m);
  if (sol.status == SolveStatus::Unbounded) throw FitError("DM-2 LP is unbounded");
  if (sol.status != SolveStatus::Optimal)
    throw FitError("DM-2 LP infeasible although the zero surrogate is feasible");
  return unpack(ds, bus, FitMethod::DM2, sol.values);
}

namespace {

struct Dm3Rows {
  RMatrix a;
  std::vector<double> b;
  std::vector<std::size_t> omega2;
};

Dm3Rows dm3_rows(const SccDataset& ds, const RMatrix& X, std::size_t bus, double ilim, double nu) {
  Dm3Rows r;
  std::vector<std::size_t> below, above;
  for (std::size_t w = 0; w < ds.size(); ++w) {
    const double y = ds.scc(w, bus);
    if (y < ilim) below.push_back(w);
    else if (y < ilim + nu) r.omega2.push_back(w);
    else above.push_back(w);
  }
  const std::size_t p = X.cols();
  r.a = RMatrix(below.size() + above.size(), p);
  std::size_t i = 0;
  for (auto w : below) {
    for (std::size_t j = 0; j < p; ++j) r.a(i, j) = X(w, j);
    r.b.push_back(ilim - kStrictMargin);
    ++i;
  }
  for (auto w : above) {
    for (std::size_t j = 0; j < p; ++j) r.a(i, j) = -X(w, j);
    r.b.push_back(-(ilim + kSecureMargin * std::max(1.0, std::abs(ilim))));
    ++i;
  }
  return r;
}

bool rows_feasible(const Dm3Rows& r) {
  if (r.b.empty()) return true;
  MilpModel m;
  const std::size_t p = r.a.cols();
  for (std::size_t j = 0; j < p; ++j) m.add_variable("k" + std::to_string(j), -kInf, kInf);
  for (std::size_t i = 0; i < r.b.size(); ++i) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < p; ++j)
      if (r.a(i, j) != 0.0) terms.push_back({j, r.a(i, j)});
    m.add_constraint("r" + std::to_string(i), std::move(terms), RowSense::LessEqual, r.b[i]);
  }
  return solve_lp(m).status == SolveStatus::Optimal;
}

void check_dm3_args(double ilim, double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be a finite value >= 0");
  if (!std::isfinite(ilim)) throw std::invalid_argument("ilim must be finite");
}

}  // namespace

SccSurrogate fit_dm3(const SccDataset& ds, std::size_t bus, double ilim, double nu) {
  check_fit_inputs(ds, bus);
  check_dm3_args(ilim, nu);
  const RMatrix X = design_matrix(ds);
  const std::size_t p = X.cols();
  const Dm3Rows rows = dm3_rows(ds, X, bus, ilim, nu);
  if (!rows_feasible(rows))
    throw MarginTooSmallError("DM-3 margin too small: no surrogate separates the data at nu = " +
                                  std::to_string(nu),
                              nu);

  // ½kᵀGk + gᵀk with G = 2X₂ᵀX₂, g = −2X₂ᵀy₂ over Ω₂.
  RMatrix G(p, p);
  std::vector<double> g(p, 0.0);
  for (auto w : rows.omega2) {
    const auto row = X.row(w);
    const double y = ds.scc(w, bus);
    for (std::size_t i = 0; i < p; ++i) {
      if (row[i] == 0.0) continue;
      g[i] -= 2.0 * row[i] * y;
      for (std::size_t j = 0; j < p; ++j) G(i, j) += 2.0 * row[i] * row[j];
    }
  }
  const QpResult qp = solve_qp_active_set(G, g, rows.a, rows.b);
  if (qp.status != QpStatus::Optimal)
    throw FitError("DM-3 QP reported infeasible on a feasible constraint set");
  SccSurrogate s = unpack(ds, bus, FitMethod::DM3, qp.x);
  s.nu = nu;
  return s;
}

double select_nu(const SccDataset& ds, std::size_t bus, double ilim) {
  check_fit_inputs(ds, bus);
  check_dm3_args(ilim, 0.0);
  const RMatrix X = design_matrix(ds);
  // Feasibility must be monotone in ν (a larger Ω₂ only removes rows); every
  // probe is recorded and the ordering is checked rather than assumed.
  double min_feasible = kInf, max_infeasible = -kInf;
  auto feasible = [&](double nu) {
    const bool ok = rows_feasible(dm3_rows(ds, X, bus, ilim, nu));
    if (ok) min_feasible = std::min(min_feasible, nu);
    else max_infeasible = std::max(max_infeasible, nu);
    if (max_infeasible > min_feasible) throw FitError("DM-3 feasibility is not monotone in nu");
    return ok;
  };
  if (feasible(0.0)) return 0.0;
  double ymax = 0.0;
  for (std::size_t w = 0; w < ds.size(); ++w) ymax = std::max(ymax, ds.scc(w, bus));
  const double hi0 = ymax - ilim;
  if (!(hi0 > 0.0) || !feasible(hi0))
    throw FitError("DM-3 infeasible for every margin: the surrogate cannot keep below-limit "
                   "samples under the limit (structural misfit)");
  double lo = 0.0, hi = hi0;
  const double tol = 1e-4 * hi0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

ErrorReport classify_errors(const SccSurrogate& s, const SccDataset& ds, double ilim) {
  ErrorReport rep;
  double sum1 = 0.0, sum2 = 0.0;
  std::size_t n1 = 0, n2 = 0;
  for (std::size_t w = 0; w < ds.size(); ++w) {
    const double exact = ds.scc(w, s.bus);
    const double est = eval_surrogate(s, ds.x_of(w), ds.alpha_of(w));
    const bool est_above = est >= ilim;
    const bool exact_above = exact >= ilim;
    if (est_above == exact_above) continue;
    auto& stats = est_above ? rep.type1 : rep.type2;
    ++stats.count;
    if (exact > 0.0) {
      (est_above ? sum1 : sum2) += (est - exact) / exact;
      ++(est_above ? n1 : n2);
    }
  }
  rep.type1.err = n1 ? sum1 / double(n1) : 0.0;
  rep.type2.err = n2 ? sum2 / double(n2) : 0.0;
  return rep;
}

SurrogateModel fit_all_buses(const NetworkCase& c, const SccDataset& ds, const FitRequest& req) {
  SurrogateModel model;
  model.method = req.method;
  model.ilim = req.ilim;
  for (const auto& g : c.sgs) model.sg_ids.push_back(g.id);
  for (const auto& g : c.ibgs) model.ibg_ids.push_back(g.id);
  const std::size_t n = c.bus_count();
  for (const auto& b : c.buses) model.bus_ids.push_back(b.id);
  model.buses.resize(n);
  std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t f = 0; f < static_cast<std::int64_t>(n); ++f) {
    const auto bus = static_cast<std::size_t>(f);
    try {
      SccSurrogate s;
      switch (req.method) {
        case FitMethod::DM1: s = fit_dm1(ds, bus); break;
        case FitMethod::DM2: s = fit_dm2(ds, bus); break;
        case FitMethod::DM3: {
          const double nu = req.nu < 0.0 ? select_nu(ds, bus, req.ilim) : req.nu;
          s = fit_dm3(ds, bus, req.ilim, nu);
          break;
        }
      }
      s.diagnostics = classify_errors(s, ds, req.ilim);
      model.buses[bus] = std::move(s);
    } catch (...) {
      failures[bus] = std::current_exception();
    }
  }
  for (auto& e : failures)
    if (e) std::rethrow_exception(e);
  return model;
}

std::string write_surrogate_model(const SurrogateModel& m) {
  ordered_json doc;
  doc["method"] = to_string(m.method);
  doc["ilim"] = m.ilim;
  doc["sg"] = m.sg_ids;
  doc["ibg"] = m.ibg_ids;
  doc["buses"] = ordered_json::array();
  for (std::size_t i = 0; i < m.buses.size(); ++i) {
    const auto& s = m.buses[i];
    ordered_json b;
    b["bus"] = m.bus_ids.at(i);
    b["nu"] = s.nu;
    b["k_sg"] = s.k_sg;
    b["k_ibg"] = s.k_ibg;
    b["k_pair"] = s.k_pair;
    b["type1"] = {{"n", s.diagnostics.type1.count}, {"err", s.diagnostics.type1.err}};
    b["type2"] = {{"n", s.diagnostics.type2.count}, {"err", s.diagnostics.type2.err}};
    doc["buses"].push_back(std::move(b));
  }
  return doc.dump(2) + "\n";
}

SurrogateModel parse_surrogate_model(std::string_view text) {
  SurrogateModel m;
  try {
    const auto doc = ordered_json::parse(text);
    m.method = parse_fit_method(doc.at("method").get<std::string>());
    m.ilim = doc.at("ilim").get<double>();
    m.sg_ids = doc.at("sg").get<std::vector<std::string>>();
    m.ibg_ids = doc.at("ibg").get<std::vector<std::string>>();
    const std::size_t pairs = pair_count(m.sg_ids.size());
    for (std::size_t i = 0; i < doc.at("buses").size(); ++i) {
      const auto& b = doc["buses"][i];
      SccSurrogate s;
      s.method = m.method;
      s.bus = i;
      s.nu = b.at("nu").get<double>();
      s.k_sg = b.at("k_sg").get<std::vector<double>>();
      s.k_ibg = b.at("k_ibg").get<std::vector<double>>();
      s.k_pair = b.at("k_pair").get<std::vector<double>>();
      if (s.k_sg.size() != m.sg_ids.size() || s.k_ibg.size() != m.ibg_ids.size() ||
          s.k_pair.size() != pairs)
        throw std::invalid_argument("buses[" + std::to_string(i) + "]: coefficient arrays do not match the generator lists");
      if (b.contains("type1")) {
        s.diagnostics.type1 = {b["type1"].at("n").get<std::size_t>(), b["type1"].at("err").get<double>()};
        s.diagnostics.type2 = {b["type2"].at("n").get<std::size_t>(), b["type2"].at("err").get<double>()};
      }
      m.bus_ids.push_back(b.at("bus").get<int>());
      m.buses.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("surrogate model: ") + e.what());
  }
  return m;
}

}  // namespace sccuc
