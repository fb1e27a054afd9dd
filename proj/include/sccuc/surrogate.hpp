#pragma once

// Exhaustive SCC dataset over binary SG/IBG patterns and per-bus linear
// surrogates  Î_F = Σ k_Fg x_g + Σ k_Fc α_c + Σ k_Fm x_g1 x_g2  (no intercept).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sccuc/case_model.hpp"
#include "sccuc/linalg.hpp"

namespace sccuc {

inline constexpr std::size_t kMaxEnumerationBits = 24;
/// Ω₁ rows of DM-3 are written Î ≤ ilim − kStrictMargin.
inline constexpr double kStrictMargin = 1e-6;
/// Ω₃ rows are written Î ≥ ilim·(1 + kSecureMargin) (ilim ≥ 1), which keeps
/// them clear of the QP feasibility tolerance so rounding cannot turn a secure
/// sample into a Type-II error.
inline constexpr double kSecureMargin = 1e-8;

class DatasetSizeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Fit could not be produced (DM-2 LP unbounded, DM-3 structurally infeasible).
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// DM-3 constraints infeasible for the requested margin ν.
class MarginTooSmallError : public FitError {
public:
  MarginTooSmallError(const std::string& what, double nu) : FitError(what), nu_(nu) {}
  double nu() const noexcept { return nu_; }

private:
  double nu_;
};

struct SccDataset {
  std::size_t sg_count = 0;
  std::size_t ibg_count = 0;
  std::size_t bus_count = 0;
  /// Pattern code per sample: the bit string x_1..x_G α_1..α_C read as a
  /// binary number, x_1 most significant.
  std::vector<std::uint32_t> codes;
  RMatrix scc;  // samples × buses, |I''| in p.u.
  std::size_t skipped = 0;

  std::size_t size() const noexcept { return codes.size(); }
  std::uint8_t x(std::size_t sample, std::size_t g) const;
  double alpha(std::size_t sample, std::size_t c) const;
  std::vector<std::uint8_t> x_of(std::size_t sample) const;
  std::vector<double> alpha_of(std::size_t sample) const;
};

/// OpenMP over SG patterns; the result is identical to the serial version.
SccDataset enumerate_dataset(const NetworkCase& c);
SccDataset enumerate_dataset_serial(const NetworkCase& c);

enum class FitMethod { DM1, DM2, DM3 };
std::string to_string(FitMethod m);
FitMethod parse_fit_method(const std::string& s);

struct ErrorStats {
  std::size_t count = 0;
  double err = 0.0;  // mean of (Î − I'')/I'' over the error set
  bool operator==(const ErrorStats&) const = default;
};

struct ErrorReport {
  ErrorStats type1;  // Î ≥ ilim but I'' < ilim
  ErrorStats type2;  // Î < ilim but I'' ≥ ilim
};

struct SccSurrogate {
  FitMethod method = FitMethod::DM1;
  std::size_t bus = 0;  // internal fault-bus index
  std::vector<double> k_sg;
  std::vector<double> k_ibg;
  std::vector<double> k_pair;  // pairs (g1 < g2) in lexicographic order
  double nu = 0.0;
  ErrorReport diagnostics;

  std::size_t coefficient_count() const noexcept {
    return k_sg.size() + k_ibg.size() + k_pair.size();
  }
  bool operator==(const SccSurrogate& o) const {
    return method == o.method && bus == o.bus && k_sg == o.k_sg && k_ibg == o.k_ibg &&
           k_pair == o.k_pair && nu == o.nu;
  }
};

std::size_t pair_count(std::size_t sgs);
/// [x_g..., α_c..., η_m...] in the coefficient order of SccSurrogate.
std::vector<double> surrogate_features(std::span<const std::uint8_t> x, std::span<const double> alpha);

double eval_surrogate(const SccSurrogate& s, std::span<const std::uint8_t> x,
                      std::span<const double> alpha);

SccSurrogate fit_dm1(const SccDataset& ds, std::size_t bus);
SccSurrogate fit_dm2(const SccDataset& ds, std::size_t bus);
/// Throws MarginTooSmallError when the Ω₁/Ω₃ constraints cannot be met.
SccSurrogate fit_dm3(const SccDataset& ds, std::size_t bus, double ilim, double nu);

/// Smallest feasible ν by bisection on [0, max I'' − ilim].
double select_nu(const SccDataset& ds, std::size_t bus, double ilim);

ErrorReport classify_errors(const SccSurrogate& s, const SccDataset& ds, double ilim);

/// A fitted model for every bus of a case (what `fit` writes).
struct SurrogateModel {
  FitMethod method = FitMethod::DM1;
  double ilim = 0.0;
  std::vector<std::string> sg_ids;
  std::vector<std::string> ibg_ids;
  std::vector<int> bus_ids;  // external id per entry of `buses`
  std::vector<SccSurrogate> buses;
};

struct FitRequest {
  FitMethod method = FitMethod::DM3;
  double ilim = 0.0;
  /// DM-3 margin; negative selects it automatically per bus.
  double nu = -1.0;
};

/// Fits every bus (in parallel) and fills the Type-I/II diagnostics.
SurrogateModel fit_all_buses(const NetworkCase& c, const SccDataset& ds, const FitRequest& req);

std::string write_surrogate_model(const SurrogateModel& m);
SurrogateModel parse_surrogate_model(std::string_view text);

}  // namespace sccuc
