#include "doctest.h"
#include "helpers.hpp"
#include "sccuc/bench.hpp"

using namespace sccuc;

TEST_SUITE("bench") {

TEST_CASE("limit sweep on net3") {
  const UcInstance inst = testutil::load_instance("net3");
  const double ref = reference_scc(inst);
  CHECK(ref > 0.0);
  const BenchReport a = bench_limit_sweep(inst, {0.0, 0.5 * ref, 0.75 * ref, ref});
  CHECK(a.ok());
  REQUIRE(a.tables.size() == 1);
  CHECK(a.tables[0].rows.size() == 4);
  const BenchReport b = bench_limit_sweep(inst, {0.0, 0.5 * ref, 0.75 * ref, ref});
  CHECK(a.to_json() == b.to_json());
  CHECK(a.tables[0].to_csv() == b.tables[0].to_csv());
}

TEST_CASE("linearization table on net3") {
  const UcInstance inst = testutil::load_instance("net3");
  const BenchReport r = bench_linearization(inst, 0.75 * reference_scc(inst));
  CHECK(r.ok());
  const auto& rows = r.tables.at(0).rows;
  CHECK(rows.size() == 5);  // none, dm1, dm2, dm3, am
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name);
}

TEST_CASE("unknown suites are rejected") {
  const UcInstance inst = testutil::load_instance("net3");
  CHECK_THROWS(run_bench_suite("nope", inst, std::nullopt));
}

TEST_CASE("csv quoting") {
  BenchTable t{"t", {"a", "b"}, {{"x,y", "plain"}}};
  CHECK(t.to_csv() == "a,b\n\"x,y\",plain\n");
}

}  // TEST_SUITE
