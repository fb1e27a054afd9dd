#pragma once

// Exact subtransient short-circuit currents for mixed SG/IBG networks.
//
// SGs are Norton sources βV_n/(jX''_d) behind their subtransient admittance;
// IBGs are constant current sources of magnitude I_f·α·pe_ratio injected at
// -90° relative to the common voltage reference. For a bolted three-phase
// fault at bus F:
//
//   I''_F = (-Σ_g Z_{F,Ψ(g)} I_g x_g - Σ_c Z_{F,Φ(c)} I_c) / Z_FF,  Z = (Y⁰ + Yᵍ(x))⁻¹

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sccuc/case_model.hpp"
#include "sccuc/linalg.hpp"

namespace sccuc {

struct CommitmentPattern {
  std::vector<std::uint8_t> x;  // per SG, 0 or 1
  std::vector<double> alpha;    // per IBG, in [0, 1]

  static CommitmentPattern all_on(const NetworkCase& c);
  /// Parses "101" style SG bits and a comma separated α list.
  static CommitmentPattern parse(const NetworkCase& c, const std::string& bits,
                                 const std::string& alphas);
};

void validate_pattern(const NetworkCase& c, const CommitmentPattern& p);

/// Raised when Y(x) is singular because some island has neither a committed
/// SG nor a shunt path to ground.
class IslandedNetworkError : public std::runtime_error {
public:
  IslandedNetworkError(const std::string& what, std::vector<int> buses)
      : std::runtime_error(what), buses_(std::move(buses)) {}
  /// External ids of the buses in unsupported islands.
  const std::vector<int>& buses() const noexcept { return buses_; }

private:
  std::vector<int> buses_;
};

/// Y⁰: branch admittances only (shunt branches on the diagonal).
CMatrix line_admittance(const NetworkCase& c);
/// Y = Y⁰ + Yᵍ(x) with 1/(jX''_dg) added at Ψ(g) for committed SGs.
CMatrix build_admittance(const NetworkCase& c, std::span<const std::uint8_t> x);

Complex sg_norton_current(const NetworkCase& c, std::size_t g);
/// Fault-time injection of one IBG at online fraction α.
Complex ibg_fault_injection(const NetworkCase& c, std::size_t ibg, double alpha);

/// Buses (external ids) lying in islands without SG or shunt support.
std::vector<int> unsupported_buses(const NetworkCase& c, std::span<const std::uint8_t> x);

/// Per fault bus, the SCC numerator split into the SG part and the per-unit-α
/// part of each IBG, so that I''_F = (sg[F] + Σ_c α_c ibg(F, c)) / Z_FF.
struct SccDecomposition {
  CMatrix z;
  std::vector<Complex> sg_numerator;
  CMatrix ibg_numerator;  // rows: fault bus, cols: IBG (α = 1)
  std::vector<Complex> zff;

  Complex current(std::size_t fault_bus, std::span<const double> alpha) const;
};

/// Throws IslandedNetworkError when Y(x) is singular.
SccDecomposition decompose_scc(const NetworkCase& c, std::span<const std::uint8_t> x);

struct SccResult {
  std::vector<Complex> current;
  std::vector<double> magnitude;
  CMatrix z;
  std::vector<Complex> zff;
};

SccResult scc_all_buses(const NetworkCase& c, const CommitmentPattern& p);

/// ‖Z·Y − I‖∞.
double zy_residual(const CMatrix& z, const CMatrix& y);

struct OracleOptions {
  /// Multiplier on the pre-fault IBG output current I_L (the quantity that
  /// must cancel out of the final result).
  double ibg_load_scale = 1.0;
};

/// Independent SCC route: solves the pre-fault circuit (SG Norton sources and
/// IBG pre-fault currents), then the pure-fault circuit with −V_F(0) imposed at
/// the fault bus and IBG sources (I_f − I_L), and returns the fault current of
/// their superposition. Never forms Z.
Complex verify_superposition(const NetworkCase& c, const CommitmentPattern& p,
                             std::size_t fault_bus, const OracleOptions& opts = {});

}  // namespace sccuc
