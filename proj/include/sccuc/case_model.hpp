#pragma once

// Network and unit-commitment instance types plus the case-file reader/writer.
//
// All electrical quantities are per-unit on the system base. Bus ids are
// 1-based in files and mapped to 0-based indices in file order; a branch whose
// `to` field is 0 connects its `from` bus to ground (a shunt element).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sccuc/linalg.hpp"

namespace sccuc {

inline constexpr std::size_t kGround = static_cast<std::size_t>(-1);

struct Bus {
  int id = 0;  // external (1-based)
  double nominal_voltage = 1.0;
  std::vector<double> demand;

  /// Demand in period t; a single-entry profile is constant.
  double demand_at(std::size_t t) const;
  bool operator==(const Bus&) const = default;
};

struct Branch {
  std::size_t from = 0;
  std::size_t to = kGround;
  Complex impedance{0.0, 0.0};
  std::optional<double> rating;  // thermal limit, p.u.

  bool is_shunt() const noexcept { return to == kGround; }
  bool operator==(const Branch&) const = default;
};

struct SynchGen {
  std::string id;
  std::size_t bus = 0;
  double xd_subtransient = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  double marginal_cost = 0.0;
  double no_load_cost = 0.0;
  double startup_cost = 0.0;
  int min_up = 1;
  int min_down = 1;
  double inertia = 0.0;       // H_g, seconds on machine base
  double machine_base = 1.0;  // p.u. of system base

  bool operator==(const SynchGen&) const = default;
};

struct Ibg {
  std::string id;
  std::size_t bus = 0;
  double fault_current = 0.0;
  double capacity = 0.0;
  double pe_ratio = 1.0;
  std::vector<double> available;

  double available_at(std::size_t t) const;
  bool operator==(const Ibg&) const = default;
};

struct NetworkCase {
  double base_mva = 100.0;
  double beta = 0.95;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<SynchGen> sgs;
  std::vector<Ibg> ibgs;

  std::size_t bus_count() const noexcept { return buses.size(); }
  /// Internal index of an external bus id, or nullopt.
  std::optional<std::size_t> find_bus(int external_id) const;
  bool operator==(const NetworkCase&) const = default;
};

/// Raised for malformed documents. `where()` is either "line L, column C" for
/// syntax errors or a field path such as "sg[2].xd2" for semantic ones.
class CaseError : public std::runtime_error {
public:
  CaseError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// Checks every invariant of a case; throws CaseError naming the entity.
void validate_case(const NetworkCase& c);

NetworkCase parse_case(std::string_view text);
std::string write_case(const NetworkCase& c);
NetworkCase load_case_file(const std::string& path);

struct ScenarioNode {
  int id = 0;
  int parent = -1;  // -1 for the root
  double probability = 1.0;
  double demand_scale = 1.0;
  double avail_scale = 1.0;
  bool operator==(const ScenarioNode&) const = default;
};

struct WindFarm {
  std::size_t ibg = 0;  // index into NetworkCase::ibgs
  double gamma = 0.0;
  double si_max = 0.0;
  bool operator==(const WindFarm&) const = default;
};

struct FrequencyParams {
  double damping = 0.0;            // D, p.u./Hz
  double delivery_time = 0.0;      // T_d, s
  double disturbance = 0.0;        // ΔP_L, p.u.
  double nadir_limit = 0.0;        // Hz
  double ss_limit = 0.0;           // Hz
  double rocof_limit = 0.0;        // Hz/s
  double nominal_frequency = 50.0; // Hz
  double si_bound = 0.0;           // sampling/upper bound for each H_sj
  std::vector<WindFarm> wind_farms;
  bool operator==(const FrequencyParams&) const = default;
};

struct UcInstance {
  NetworkCase network;
  int periods = 1;
  double dt = 1.0;  // hours per period
  std::vector<ScenarioNode> tree;
  double shed_cost = 0.0;
  std::vector<double> scc_limit;  // per internal bus index, p.u.
  std::optional<FrequencyParams> freq;
  std::vector<bool> initial_on;  // per SG

  /// Indices (into tree) of the nodes that carry dispatch decisions: the
  /// leaves, or the root alone for a single-node tree.
  std::vector<std::size_t> dispatch_nodes() const;
  /// α_c for an IBG in a node and period: available power over capacity.
  double alpha(std::size_t node, std::size_t ibg, std::size_t t) const;
  double demand(std::size_t node, std::size_t bus, std::size_t t) const;
  double available(std::size_t node, std::size_t ibg, std::size_t t) const;
};

void validate_instance(const UcInstance& inst);

/// Parses the UC-instance document against an already parsed network.
UcInstance parse_uc_instance(std::string_view text, const NetworkCase& network);
UcInstance load_uc_instance_file(const std::string& path, const NetworkCase& network);

std::string read_text_file(const std::string& path);

}  // namespace sccuc
