#pragma once

// Sweep studies over the bundled cases. Each suite produces plain tables
// (written as CSV) plus named checks; wall times are kept apart so that the
// tables and report are byte-identical across runs.

#include <optional>
#include <string>
#include <vector>

#include "sccuc/case_model.hpp"
#include "sccuc/uc.hpp"

namespace sccuc {

struct BenchTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct BenchCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BenchReport {
  std::string suite;
  std::string label;
  std::vector<BenchTable> tables;
  std::vector<BenchCheck> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds, not part of the report

  bool ok() const;
  std::string to_json() const;
  std::string timings_csv() const;
};

/// Reference SCC level of an instance: the smallest bus SCC with every SG on,
/// over all dispatch nodes and periods at their own IBG availability. This is
/// the largest uniform limit the instance can meet; sweeps use fractions of it.
double reference_scc(const UcInstance& inst);

/// Wind penetration targets are met by resizing every IBG to an equal share of
/// ρ·(mean demand) with full availability.
BenchReport bench_penetration(const UcInstance& inst, const std::vector<double>& levels);
/// DM-1/2/3 fits, and AM when the case is small and lossless, on one instance.
BenchReport bench_linearization(const UcInstance& inst, double ilim);
BenchReport bench_limit_sweep(const UcInstance& inst, const std::vector<double>& ilims);
BenchReport bench_pe_sweep(const UcInstance& inst, const std::vector<double>& ratios, double ilim);

/// Default sweep points derived from the case, as used by the CLI.
BenchReport run_bench_suite(const std::string& suite, const UcInstance& inst,
                            std::optional<double> ilim);

}  // namespace sccuc
