#pragma once

// Stochastic unit commitment with SCC and frequency-security constraints.
//
// Two-stage tree: commitment (x, startup, shutdown) is shared by all nodes;
// every leaf carries its own dispatch, PFR, synthetic inertia and shedding.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sccuc/case_model.hpp"
#include "sccuc/milp.hpp"
#include "sccuc/surrogate.hpp"

namespace sccuc {

// ---------------------------------------------------------------------------
// Frequency nadir

/// a·H + b·R + Σ c_j·H_sj + d ≤ 0
struct NadirPlane {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> c;
  double d = 0.0;

  double value(double h, double r, std::span<const double> hs) const;
};

/// The nadir requirement written as  H·R ≥ c0 + q·Σ γ_j H_sj², with H in
/// seconds on system base (the f0/2 swing-equation factor is folded into c0, q).
struct NadirCurve {
  double c0 = 0.0;
  double q = 0.0;
  std::vector<double> gamma;

  double rhs(std::span<const double> hs) const;
  bool feasible(double h, double r, std::span<const double> hs) const;
};

NadirCurve nadir_curve(const FrequencyParams& f);

struct NadirGrid {
  double h_min = 0.0;
  double h_max = 0.0;
  double r_max = 0.0;
  std::vector<double> hs_max;  // per wind farm
  std::size_t h_points = 8;
  std::size_t hs_levels = 3;  // common fraction of hs_max, 0 … 1
};

class NadirRegionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Tangent cuts of the nadir surface; throws NadirRegionError when no
/// (H, R) inside the grid bounds can satisfy the requirement.
std::vector<NadirPlane> generate_nadir_planes(const FrequencyParams& f, const NadirGrid& grid);

struct NadirAudit {
  std::size_t feasible_samples = 0;
  std::size_t feasible_rejected = 0;    // feasible points cut off by some plane
  std::size_t infeasible_samples = 0;
  std::size_t infeasible_accepted = 0;  // near-tangency infeasible points passing all planes
  bool passed() const noexcept { return feasible_rejected == 0 && infeasible_accepted == 0; }
};

NadirAudit audit_nadir_planes(const std::vector<NadirPlane>& planes, const FrequencyParams& f,
                              const NadirGrid& grid, std::size_t samples = 10000,
                              std::uint64_t seed = 20240607);

// ---------------------------------------------------------------------------
// Model building

enum class SccMode { None, Surrogate, Analytical };

/// Adds η ∈ [0,1] with η ≤ x1, η ≤ x2, η ≥ x1 + x2 − 1.
std::size_t linearize_binary_product(MilpModel& m, std::size_t x1, std::size_t x2,
                                     const std::string& name);

class AmGuardError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// |Z| reached the McCormick bound; the relaxation may have cut off schedules.
class ZmaxBindingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kAmMaxBuses = 12;

struct UcOptions {
  SccMode scc = SccMode::None;
  const SurrogateModel* surrogate = nullptr;
  bool freq = false;
  /// Overrides every bus limit of the instance when set.
  std::optional<double> ilim;
  /// McCormick bound of the AM block; ≤ 0 is rejected, unset picks a default.
  std::optional<double> am_zmax;
  std::size_t nadir_h_points = 8;
  std::size_t nadir_hs_levels = 3;
};

/// Variable indices of a built model, needed to decode a solution.
struct UcLayout {
  std::size_t periods = 0;
  std::vector<std::size_t> nodes;           // tree indices of the dispatch nodes
  std::vector<std::vector<std::size_t>> x;  // [g][t]
  std::vector<std::vector<std::size_t>> startup;
  std::vector<std::vector<std::size_t>> shutdown;
  // [node][t][unit]
  std::vector<std::vector<std::vector<std::size_t>>> p, r, w, hs;
  std::vector<std::vector<std::vector<std::size_t>>> shed;  // [node][t][0] or per bus
  std::vector<double> ilim;  // per bus, after override
  std::vector<NadirPlane> planes;
  // AM: |Z| entries per period, for the post-solve binding check
  std::vector<std::size_t> am_z;
  double am_zmax = 0.0;
  bool network_flow = false;
};

struct UcModel {
  MilpModel milp;
  UcLayout layout;
};

/// Surrogate SCC rows for one period of one node.
std::vector<std::size_t> add_surrogate_scc_constraints(
    MilpModel& m, const SurrogateModel& s, const std::vector<std::size_t>& x_vars,
    std::vector<std::optional<std::size_t>>& eta_cache, std::span<const double> alpha,
    std::span<const double> ilim, const std::string& tag);

/// Default McCormick bound: twice the largest |Z_ik| over all non-singular
/// commitment patterns.
double default_am_zmax(const NetworkCase& c);

UcModel build_uc(const UcInstance& inst, const UcOptions& opts);

// ---------------------------------------------------------------------------
// Schedules

struct AuditRow {
  int node = 0;
  std::size_t period = 0;
  int bus = 0;
  double scc_exact = 0.0;
  double ilim = 0.0;
  bool flag = false;
};

struct NodePeriod {
  int node = 0;
  std::size_t period = 0;
  std::vector<std::uint8_t> x;
  std::vector<double> p, r, w, hs;
  double shed = 0.0;
  double inertia = 0.0;
  double pfr = 0.0;
  double rho_w = 0.0;
  std::vector<double> alpha;
};

struct CostBreakdown {
  double startup = 0.0;
  double no_load = 0.0;
  double marginal = 0.0;
  double shed = 0.0;
  double total() const { return startup + no_load + marginal + shed; }
};

struct UcSchedule {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  double best_bound = -kInf;
  std::size_t nodes = 0;
  std::vector<NodePeriod> cells;
  CostBreakdown cost;
  std::vector<CostBreakdown> period_cost;  // probability-weighted, per period
  std::vector<AuditRow> audit;
  std::size_t audit_flags = 0;
};

/// Decodes the solution and recomputes every SCC from scratch with the exact
/// engine. Infeasible/unbounded solutions yield an empty schedule with status.
UcSchedule extract_and_audit(const Solution& sol, const UcInstance& inst, const UcModel& model);

struct UcRun {
  UcModel model;
  Solution solution;
  UcSchedule schedule;
};

/// Build, solve (B&B at the default gap) and audit.
UcRun solve_uc(const UcInstance& inst, const UcOptions& opts, double gap = kDefaultMipGap);

/// Receding-horizon loop: solve a window of `horizon` periods, keep the first
/// period, shift by one and carry the commitment forward.
UcSchedule solve_uc_rolling(const UcInstance& inst, const UcOptions& opts, int horizon);

std::string schedule_to_json(const UcSchedule& s, const UcInstance& inst);
std::string audit_to_csv(const UcSchedule& s);

}  // namespace sccuc
