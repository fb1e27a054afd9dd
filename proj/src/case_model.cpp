#include "sccuc/case_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sccuc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double Bus::demand_at(std::size_t t) const {
  if (demand.empty()) return 0.0;
  return demand.size() == 1 ? demand.front() : demand.at(t);
}

double Ibg::available_at(std::size_t t) const {
  if (available.empty()) return 0.0;
  return available.size() == 1 ? available.front() : available.at(t);
}

std::optional<std::size_t> NetworkCase::find_bus(int external_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == external_id) return i;
  return std::nullopt;
}

namespace {

std::string index_path(const std::string& section, std::size_t i) {
  return section + "[" + std::to_string(i) + "]";
}

/// Walks one JSON object, recording the keys read so unknown keys can be
/// rejected.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw CaseError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw CaseError(path_ + "." + key, "missing required field");
    return *it;
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw CaseError(path_ + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw CaseError(path_ + "." + key, "value is not finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw CaseError(path_ + "." + key, "expected an integer");
    return v.get<int>();
  }

  int integer_or(const std::string& key, int fallback) {
    return has(key) ? integer(key) : (seen_.insert(key), fallback);
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw CaseError(path_ + "." + key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    const std::string p = path_ + "." + key;
    if (!v.is_array()) throw CaseError(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw CaseError(index_path(p, i), "expected a number");
      const double d = v[i].get<double>();
      if (!std::isfinite(d)) throw CaseError(index_path(p, i), "value is not finite");
      out.push_back(d);
    }
    return out;
  }

  const json& array_or_empty(const std::string& key) {
    static const json empty = json::array();
    if (!has(key)) return empty;
    const json& v = raw(key);
    if (!v.is_array()) throw CaseError(path_ + "." + key, "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw CaseError(path_ + "." + it.key(), "unknown field");
    }
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw CaseError("line " + std::to_string(line) + ", column " + std::to_string(col),
                    "syntax error");
  }
}

void require(bool ok, const std::string& where, const std::string& message) {
  if (!ok) throw CaseError(where, message);
}

std::size_t resolve_bus(const NetworkCase& c, int id, const std::string& where) {
  auto idx = c.find_bus(id);
  if (!idx) throw CaseError(where, "references unknown bus " + std::to_string(id));
  return *idx;
}

}  // namespace

void validate_case(const NetworkCase& c) {
  require(c.base_mva > 0.0, "system.base_mva", "must be positive");
  require(c.beta >= 0.95 && c.beta <= 1.1, "system.beta", "must lie in [0.95, 1.1]");
  require(!c.buses.empty(), "bus", "at least one bus is required");
  std::set<int> ids;
  for (std::size_t i = 0; i < c.buses.size(); ++i) {
    const auto& b = c.buses[i];
    const std::string p = index_path("bus", i);
    require(b.id > 0, p + ".id", "bus ids must be positive");
    require(ids.insert(b.id).second, p + ".id", "duplicate bus id " + std::to_string(b.id));
    require(b.nominal_voltage > 0.0, p + ".vn", "must be positive");
    for (double d : b.demand) require(d >= 0.0, p + ".demand", "demand must be non-negative");
  }
  const std::size_t n = c.buses.size();
  for (std::size_t i = 0; i < c.branches.size(); ++i) {
    const auto& br = c.branches[i];
    const std::string p = index_path("branch", i);
    require(br.from < n, p, "from bus out of range");
    require(br.to == kGround || br.to < n, p, "to bus out of range");
    require(br.from != br.to, p, "from and to are the same bus");
    require(br.impedance.real() >= 0.0, p + ".r", "resistance must be non-negative");
    require(br.impedance.imag() >= 0.0, p + ".x", "negative reactance");
    require(std::abs(br.impedance) > 0.0, p, "impedance magnitude must be positive");
    if (br.rating) require(*br.rating > 0.0, p + ".rate", "rating must be positive");
  }
  require(!c.sgs.empty() || !c.ibgs.empty(), "sg", "at least one SG or IBG is required");
  std::set<std::string> gen_ids;
  for (std::size_t i = 0; i < c.sgs.size(); ++i) {
    const auto& g = c.sgs[i];
    const std::string p = "sg " + g.id;
    require(gen_ids.insert(g.id).second, p, "duplicate generator id");
    require(g.bus < n, p + ".bus", "bus out of range");
    require(g.xd_subtransient > 0.0, p + ".xd2", "subtransient reactance must be positive");
    require(g.p_min >= 0.0 && g.p_min <= g.p_max, p + ".pmin", "requires 0 <= pmin <= pmax");
    require(g.marginal_cost >= 0.0 && g.no_load_cost >= 0.0 && g.startup_cost >= 0.0, p,
            "costs must be non-negative");
    require(g.min_up >= 0 && g.min_down >= 0, p, "minimum up/down times must be non-negative");
    require(g.inertia >= 0.0, p + ".h", "inertia constant must be non-negative");
    require(g.machine_base > 0.0, p + ".mbase", "machine base must be positive");
  }
  for (std::size_t i = 0; i < c.ibgs.size(); ++i) {
    const auto& g = c.ibgs[i];
    const std::string p = "ibg " + g.id;
    require(gen_ids.insert(g.id).second, p, "duplicate generator id");
    require(g.bus < n, p + ".bus", "bus out of range");
    require(g.fault_current >= 0.0, p + ".if", "fault current must be non-negative");
    require(g.capacity >= 0.0, p + ".cap", "capacity must be non-negative");
    require(g.pe_ratio >= 1.0, p + ".pe_ratio", "PE capacity ratio must be at least 1");
    for (double a : g.available)
      require(a >= 0.0 && a <= g.capacity, p + ".avail", "availability must lie in [0, cap]");
  }
}

NetworkCase parse_case(std::string_view text) {
  const json doc = parse_document(text);
  ObjectReader root(doc, "case");
  NetworkCase c;

  {
    ObjectReader sys(root.raw("system"), "system");
    c.base_mva = sys.number("base_mva");
    c.beta = sys.number_or("beta", 0.95);
    sys.finish();
  }

  const json& buses = root.raw("bus");
  if (!buses.is_array()) throw CaseError("bus", "expected an array");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    ObjectReader r(buses[i], index_path("bus", i));
    Bus b;
    b.id = r.integer("id");
    b.nominal_voltage = r.number_or("vn", 1.0);
    if (r.has("demand")) b.demand = r.numbers("demand");
    r.finish();
    c.buses.push_back(std::move(b));
  }
  // Bus ids must be unique before generator/branch references are resolved.
  {
    std::set<int> seen;
    for (std::size_t i = 0; i < c.buses.size(); ++i)
      if (!seen.insert(c.buses[i].id).second)
        throw CaseError(index_path("bus", i) + ".id",
                        "duplicate bus id " + std::to_string(c.buses[i].id));
  }

  const json& branches = root.array_or_empty("branch");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    ObjectReader r(branches[i], index_path("branch", i));
    const int from = r.integer("from");
    const int to = r.integer("to");
    const std::string label = index_path("branch", i) + " (" + std::to_string(from) + "-" +
                              std::to_string(to) + ")";
    Branch br;
    br.from = resolve_bus(c, from, label);
    br.to = to == 0 ? kGround : resolve_bus(c, to, label);
    br.impedance = Complex(r.number("r"), r.number("x"));
    if (r.has("rate")) br.rating = r.number("rate");
    r.finish();
    c.branches.push_back(br);
  }

  const json& sgs = root.array_or_empty("sg");
  for (std::size_t i = 0; i < sgs.size(); ++i) {
    ObjectReader r(sgs[i], index_path("sg", i));
    SynchGen g;
    g.id = r.string("id");
    g.bus = resolve_bus(c, r.integer("bus"), "sg " + g.id);
    g.xd_subtransient = r.number("xd2");
    g.p_min = r.number("pmin");
    g.p_max = r.number("pmax");
    g.marginal_cost = r.number("cm");
    g.no_load_cost = r.number("cnl");
    g.startup_cost = r.number("cst");
    g.min_up = r.integer("tup");
    g.min_down = r.integer("tdn");
    g.inertia = r.number("h");
    g.machine_base = r.number("mbase");
    r.finish();
    c.sgs.push_back(std::move(g));
  }

  const json& ibgs = root.array_or_empty("ibg");
  for (std::size_t i = 0; i < ibgs.size(); ++i) {
    ObjectReader r(ibgs[i], index_path("ibg", i));
    Ibg g;
    g.id = r.string("id");
    g.bus = resolve_bus(c, r.integer("bus"), "ibg " + g.id);
    g.fault_current = r.number("if");
    g.capacity = r.number("cap");
    g.pe_ratio = r.number_or("pe_ratio", 1.0);
    g.available = r.has("avail") ? r.numbers("avail") : std::vector<double>{};
    r.finish();
    c.ibgs.push_back(std::move(g));
  }
  root.finish();
  validate_case(c);
  return c;
}

std::string write_case(const NetworkCase& c) {
  ordered_json doc;
  doc["system"] = {{"base_mva", c.base_mva}, {"beta", c.beta}};
  ordered_json buses = ordered_json::array();
  for (const auto& b : c.buses) {
    buses.push_back({{"id", b.id}, {"vn", b.nominal_voltage}, {"demand", b.demand}});
  }
  doc["bus"] = buses;
  ordered_json branches = ordered_json::array();
  for (const auto& br : c.branches) {
    ordered_json e{{"from", c.buses[br.from].id},
                   {"to", br.is_shunt() ? 0 : c.buses[br.to].id},
                   {"r", br.impedance.real()},
                   {"x", br.impedance.imag()}};
    if (br.rating) e["rate"] = *br.rating;
    branches.push_back(e);
  }
  doc["branch"] = branches;
  ordered_json sgs = ordered_json::array();
  for (const auto& g : c.sgs) {
    sgs.push_back({{"id", g.id},
                   {"bus", c.buses[g.bus].id},
                   {"xd2", g.xd_subtransient},
                   {"pmin", g.p_min},
                   {"pmax", g.p_max},
                   {"cm", g.marginal_cost},
                   {"cnl", g.no_load_cost},
                   {"cst", g.startup_cost},
                   {"tup", g.min_up},
                   {"tdn", g.min_down},
                   {"h", g.inertia},
                   {"mbase", g.machine_base}});
  }
  doc["sg"] = sgs;
  ordered_json ibgs = ordered_json::array();
  for (const auto& g : c.ibgs) {
    ibgs.push_back({{"id", g.id},
                    {"bus", c.buses[g.bus].id},
                    {"if", g.fault_current},
                    {"cap", g.capacity},
                    {"pe_ratio", g.pe_ratio},
                    {"avail", g.available}});
  }
  doc["ibg"] = ibgs;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkCase load_case_file(const std::string& path) { return parse_case(read_text_file(path)); }

std::vector<std::size_t> UcInstance::dispatch_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const bool has_child = std::any_of(tree.begin(), tree.end(),
                                       [&](const ScenarioNode& n) { return n.parent == tree[i].id; });
    if (!has_child) out.push_back(i);
  }
  return out;
}

double UcInstance::demand(std::size_t node, std::size_t bus, std::size_t t) const {
  return network.buses[bus].demand_at(t) * tree[node].demand_scale;
}

double UcInstance::available(std::size_t node, std::size_t ibg, std::size_t t) const {
  const auto& g = network.ibgs[ibg];
  return std::min(g.capacity, g.available_at(t) * tree[node].avail_scale);
}

double UcInstance::alpha(std::size_t node, std::size_t ibg, std::size_t t) const {
  const auto& g = network.ibgs[ibg];
  if (g.capacity <= 0.0) return 0.0;
  return std::clamp(available(node, ibg, t) / g.capacity, 0.0, 1.0);
}

void validate_instance(const UcInstance& inst) {
  validate_case(inst.network);
  require(inst.periods >= 1, "periods.n", "must be at least 1");
  require(inst.dt > 0.0, "periods.dt", "must be positive");
  require(inst.shed_cost >= 0.0, "shed_cost", "must be non-negative");
  const auto T = static_cast<std::size_t>(inst.periods);
  for (std::size_t i = 0; i < inst.network.buses.size(); ++i) {
    const auto& d = inst.network.buses[i].demand;
    require(d.size() <= 1 || d.size() >= T, index_path("bus", i) + ".demand",
            "profile shorter than the horizon");
  }
  for (const auto& g : inst.network.ibgs) {
    require(g.available.size() <= 1 || g.available.size() >= T, "ibg " + g.id + ".avail",
            "profile shorter than the horizon");
  }
  require(!inst.tree.empty(), "tree", "scenario tree needs a root node");
  std::map<int, std::size_t> by_id;
  int roots = 0;
  for (std::size_t i = 0; i < inst.tree.size(); ++i) {
    const auto& n = inst.tree[i];
    const std::string p = index_path("tree", i);
    require(by_id.emplace(n.id, i).second, p + ".id", "duplicate node id");
    require(n.probability >= 0.0 && n.probability <= 1.0 + 1e-9, p + ".prob",
            "probability must lie in [0, 1]");
    require(n.demand_scale >= 0.0 && n.avail_scale >= 0.0, p, "scales must be non-negative");
    if (n.parent == -1) ++roots;
  }
  require(roots == 1, "tree", "exactly one root node (parent -1) is required");
  for (std::size_t i = 0; i < inst.tree.size(); ++i) {
    const auto& n = inst.tree[i];
    const std::string p = index_path("tree", i);
    if (n.parent == -1) {
      require(std::abs(n.probability - 1.0) <= 1e-9, p + ".prob", "root probability must be 1");
    } else {
      require(by_id.count(n.parent) > 0, p + ".parent", "unknown parent node");
    }
  }
  for (const auto& n : inst.tree) {
    double sum = 0.0;
    bool any = false;
    for (const auto& m : inst.tree) {
      if (m.parent == n.id) {
        sum += m.probability;
        any = true;
      }
    }
    if (any && std::abs(sum - n.probability) > 1e-9) {
      throw CaseError("tree node " + std::to_string(n.id),
                      "children probabilities sum to " + std::to_string(sum) +
                          " but the node has " + std::to_string(n.probability));
    }
  }
  // Reject cycles: every node must reach the root.
  for (const auto& n : inst.tree) {
    int cur = n.parent;
    std::size_t steps = 0;
    while (cur != -1) {
      require(++steps <= inst.tree.size(), "tree", "parent links contain a cycle");
      cur = inst.tree[by_id.at(cur)].parent;
    }
  }
  require(inst.scc_limit.size() == inst.network.buses.size(), "scc_limit",
          "limit vector must cover every bus");
  for (double v : inst.scc_limit) require(v >= 0.0, "scc_limit", "limits must be non-negative");
  require(inst.initial_on.empty() || inst.initial_on.size() == inst.network.sgs.size(),
          "initial_on", "must cover every SG");
  if (inst.freq) {
    const auto& f = *inst.freq;
    require(f.damping > 0.0, "freq.damping", "must be positive");
    require(f.delivery_time > 0.0, "freq.td", "must be positive");
    require(f.disturbance > 0.0, "freq.dpl", "must be positive");
    require(f.nadir_limit > 0.0, "freq.nadir_limit", "must be positive");
    require(f.ss_limit > 0.0, "freq.ss_limit", "must be positive");
    require(f.rocof_limit > 0.0, "freq.rocof_limit", "must be positive");
    require(f.nominal_frequency > 0.0, "freq.f0", "must be positive");
    require(f.si_bound >= 0.0, "freq.si_max", "must be non-negative");
    for (const auto& w : f.wind_farms) {
      require(w.ibg < inst.network.ibgs.size(), "freq.wind", "unknown IBG");
      require(w.gamma >= 0.0, "freq.wind.gamma", "must be non-negative");
      require(w.si_max >= 0.0, "freq.wind.si_max", "must be non-negative");
    }
  }
}

UcInstance parse_uc_instance(std::string_view text, const NetworkCase& network) {
  const json doc = parse_document(text);
  ObjectReader root(doc, "instance");
  UcInstance inst;
  inst.network = network;
  if (root.has("case")) root.string("case");

  {
    ObjectReader p(root.raw("periods"), "periods");
    inst.periods = p.integer("n");
    inst.dt = p.number_or("dt", 1.0);
    p.finish();
  }

  const json& tree = root.array_or_empty("tree");
  for (std::size_t i = 0; i < tree.size(); ++i) {
    ObjectReader r(tree[i], index_path("tree", i));
    ScenarioNode n;
    n.id = r.integer("id");
    n.parent = r.integer_or("parent", -1);
    n.probability = r.number("prob");
    n.demand_scale = r.number_or("demand_scale", 1.0);
    n.avail_scale = r.number_or("avail_scale", 1.0);
    r.finish();
    inst.tree.push_back(n);
  }
  if (inst.tree.empty()) inst.tree.push_back(ScenarioNode{});

  inst.shed_cost = root.number_or("shed_cost", 0.0);

  inst.scc_limit.assign(network.buses.size(), 0.0);
  const json& limits = root.array_or_empty("scc_limit");
  for (std::size_t i = 0; i < limits.size(); ++i) {
    ObjectReader r(limits[i], index_path("scc_limit", i));
    const int bus = r.integer("bus");
    const auto idx = network.find_bus(bus);
    if (!idx) throw CaseError(index_path("scc_limit", i), "unknown bus " + std::to_string(bus));
    inst.scc_limit[*idx] = r.number("ilim");
    r.finish();
  }

  if (root.has("freq")) {
    ObjectReader f(root.raw("freq"), "freq");
    FrequencyParams fp;
    fp.damping = f.number("damping");
    fp.delivery_time = f.number("td");
    fp.disturbance = f.number("dpl");
    fp.nadir_limit = f.number("nadir_limit");
    fp.ss_limit = f.number("ss_limit");
    fp.rocof_limit = f.number("rocof_limit");
    fp.nominal_frequency = f.number_or("f0", 50.0);
    fp.si_bound = f.number_or("si_max", 0.0);
    const json& wind = f.array_or_empty("wind");
    for (std::size_t i = 0; i < wind.size(); ++i) {
      ObjectReader w(wind[i], index_path("freq.wind", i));
      const std::string id = w.string("id");
      WindFarm farm;
      auto it = std::find_if(network.ibgs.begin(), network.ibgs.end(),
                             [&](const Ibg& g) { return g.id == id; });
      if (it == network.ibgs.end())
        throw CaseError(index_path("freq.wind", i), "unknown IBG " + id);
      farm.ibg = static_cast<std::size_t>(it - network.ibgs.begin());
      farm.gamma = w.number("gamma");
      farm.si_max = w.number_or("si_max", fp.si_bound);
      w.finish();
      fp.wind_farms.push_back(farm);
    }
    f.finish();
    inst.freq = fp;
  }

  if (root.has("initial_on")) {
    const json& on = root.raw("initial_on");
    if (!on.is_array()) throw CaseError("initial_on", "expected an array of SG ids");
    inst.initial_on.assign(network.sgs.size(), false);
    for (std::size_t i = 0; i < on.size(); ++i) {
      if (!on[i].is_string()) throw CaseError(index_path("initial_on", i), "expected a string");
      const auto id = on[i].get<std::string>();
      auto it = std::find_if(network.sgs.begin(), network.sgs.end(),
                             [&](const SynchGen& g) { return g.id == id; });
      if (it == network.sgs.end()) throw CaseError(index_path("initial_on", i), "unknown SG " + id);
      inst.initial_on[static_cast<std::size_t>(it - network.sgs.begin())] = true;
    }
  }
  root.finish();
  validate_instance(inst);
  return inst;
}

UcInstance load_uc_instance_file(const std::string& path, const NetworkCase& network) {
  return parse_uc_instance(read_text_file(path), network);
}

}  // namespace sccuc
