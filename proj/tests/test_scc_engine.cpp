#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "sccuc/scc_engine.hpp"

using namespace sccuc;

namespace {

// All nonsingular {0,1} patterns of a case.
template <typename F>
void for_each_pattern(const NetworkCase& c, F&& f) {
  const std::size_t G = c.sgs.size(), C = c.ibgs.size();
  for (std::uint32_t code = 0; code < (1u << (G + C)); ++code) {
    CommitmentPattern p;
    for (std::size_t g = 0; g < G; ++g) p.x.push_back((code >> (G + C - 1 - g)) & 1u);
    for (std::size_t k = 0; k < C; ++k) p.alpha.push_back(double((code >> (C - 1 - k)) & 1u));
    if (!unsupported_buses(c, p.x).empty()) continue;
    f(p);
  }
}

}  // namespace

TEST_SUITE("scc_engine") {

TEST_CASE("admittance of a single machine bus") {
  const NetworkCase c = testutil::one_bus(0.95, 0.2);
  const std::vector<std::uint8_t> on{1}, off{0};
  const CMatrix y = build_admittance(c, on);
  CHECK(std::abs(y(0, 0) - Complex(0.0, -5.0)) < 1e-14);
  CHECK(build_admittance(c, off)(0, 0) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(scc_all_buses(c, {{0}, {}}), IslandedNetworkError);
}

TEST_CASE("hand-assembled three-bus admittance") {
  const NetworkCase c = testutil::load("net3");
  const std::vector<std::uint8_t> x{1};
  const CMatrix y = build_admittance(c, x);
  const Complex y12 = 1.0 / Complex(0, 0.1), y23 = 1.0 / Complex(0, 0.15), y13 = 1.0 / Complex(0, 0.2);
  const Complex ysg = 1.0 / Complex(0, 0.25);
  CHECK(std::abs(y(0, 0) - (y12 + y13 + ysg)) < 1e-12);
  CHECK(std::abs(y(1, 1) - (y12 + y23)) < 1e-12);
  CHECK(std::abs(y(2, 2) - (y23 + y13)) < 1e-12);
  CHECK(std::abs(y(0, 1) + y12) < 1e-12);
  CHECK(std::abs(y(1, 2) + y23) < 1e-12);
  CHECK(std::abs(y(2, 0) + y13) < 1e-12);
}

TEST_CASE("Norton currents") {
  CHECK(std::abs(sg_norton_current(testutil::one_bus(0.95, 0.2), 0) - Complex(0.0, -4.75)) < 1e-14);
  CHECK(std::abs(sg_norton_current(testutil::one_bus(1.1, 0.1), 0) - Complex(0.0, -11.0)) < 1e-12);
  const NetworkCase c = testutil::load("net3");
  const double e = c.beta * c.buses[0].nominal_voltage;
  CHECK(std::abs(sg_norton_current(c, 0) - e / Complex(0.0, 0.25)) < 1e-14);
}

TEST_CASE("single machine fault current") {
  const NetworkCase c = testutil::one_bus(0.95, 0.2);
  const CommitmentPattern p{{1}, {}};
  const auto r = scc_all_buses(c, p);
  CHECK(r.magnitude[0] == doctest::Approx(4.75).epsilon(1e-12));
  CHECK(std::abs(verify_superposition(c, p, 0) - r.current[0]) < 1e-12);
}

TEST_CASE("IBG fault at its own bus returns its rated fault current") {
  NetworkCase c;
  c.buses.push_back({1, 1.0, {0.0}});
  Branch gnd;
  gnd.from = 0;
  gnd.impedance = {0.0, 0.5};
  c.branches.push_back(gnd);
  Ibg w;
  w.id = "W1";
  w.fault_current = 1.0;
  w.capacity = 1.0;
  c.ibgs.push_back(w);
  CHECK(scc_all_buses(c, {{}, {1.0}}).magnitude[0] == doctest::Approx(1.0).epsilon(1e-12));
  c.ibgs[0].pe_ratio = 1.5;
  CHECK(scc_all_buses(c, {{}, {0.6}}).magnitude[0] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("closed form matches superposition on net3 for every pattern") {
  const NetworkCase c = testutil::load("net3");
  std::size_t checked = 0;
  for_each_pattern(c, [&](const CommitmentPattern& p) {
    const auto r = scc_all_buses(c, p);
    for (std::size_t b = 0; b < c.bus_count(); ++b)
      CHECK(std::abs(std::abs(verify_superposition(c, p, b)) - r.magnitude[b]) <= 1e-9);
    CHECK(zy_residual(r.z, build_admittance(c, p.x)) <= 1e-9);
    ++checked;
  });
  CHECK(checked == 2);  // x = 0 leaves no source path
}

TEST_CASE("pre-fault IBG current does not change the result") {
  for (const char* stem : {"net3", "net9"}) {
    const NetworkCase c = testutil::load(stem);
    for_each_pattern(c, [&](const CommitmentPattern& p) {
      for (std::size_t b = 0; b < c.bus_count(); ++b) {
        const double base = std::abs(verify_superposition(c, p, b));
        for (double s : {0.5, 1.5})
          CHECK(std::abs(std::abs(verify_superposition(c, p, b, {s})) - base) <= 1e-9);
      }
    });
  }
}

TEST_CASE("complex current is affine in alpha at fixed commitment") {
  const NetworkCase c = testutil::load("net9");
  const std::vector<std::uint8_t> x{1, 0, 1};
  const auto dec = decompose_scc(c, x);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double lam = u(rng);
    std::vector<double> mix{lam * a[0] + (1 - lam) * b[0], lam * a[1] + (1 - lam) * b[1]};
    for (std::size_t f = 0; f < c.bus_count(); ++f) {
      const Complex lhs = dec.current(f, mix);
      const Complex rhs = lam * dec.current(f, a) + (1 - lam) * dec.current(f, b);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
      CHECK(std::abs(scc_all_buses(c, {x, mix}).current[f] - lhs) <= 1e-12);
    }
  }
}

TEST_CASE("islands without a source are reported by bus") {
  NetworkCase c = testutil::load("net9");
  const std::vector<std::uint8_t> none(c.sgs.size(), 0);
  const auto buses = unsupported_buses(c, none);
  CHECK(buses.size() == c.bus_count());
  try {
    scc_all_buses(c, {none, std::vector<double>(c.ibgs.size(), 1.0)});
    FAIL("expected IslandedNetworkError");
  } catch (const IslandedNetworkError& e) {
    CHECK(e.buses() == buses);
  }
}

TEST_CASE("pattern validation") {
  const NetworkCase c = testutil::load("net9");
  CHECK_THROWS(validate_pattern(c, {{1, 1}, {0.0, 0.0}}));
  CHECK_THROWS(validate_pattern(c, {{1, 1, 1}, {1.5, 0.0}}));
  const auto p = CommitmentPattern::parse(c, "101", "0.5,1");
  CHECK(p.x == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(p.alpha == std::vector<double>{0.5, 1.0});
}

TEST_CASE("residual of Z against Y on larger cases") {
  const NetworkCase c = testutil::load("net30s");
  const auto p = CommitmentPattern::all_on(c);
  const auto r = scc_all_buses(c, p);
  CHECK(zy_residual(r.z, build_admittance(c, p.x)) <= 1e-9);
  for (double m : r.magnitude) CHECK(m > 0.0);
}

}  // TEST_SUITE
