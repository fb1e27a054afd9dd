#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "sccuc/linalg.hpp"
#include "sccuc/milp.hpp"

using namespace sccuc;

namespace {

struct DenseLp {
  std::size_t n = 0;
  std::vector<std::vector<double>> a;  // rows a·x ≤ b
  std::vector<double> b, c, upper;     // 0 ≤ x ≤ upper
};

DenseLp random_lp(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseLp lp;
  lp.n = 2 + rng() % 3;
  const std::size_t m = 2 + rng() % 6;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(lp.n);
    for (double& v : row) v = u(rng);
    lp.a.push_back(row);
    lp.b.push_back(0.5 + std::abs(u(rng)) * 3.0);  // x = 0 stays feasible
  }
  for (std::size_t j = 0; j < lp.n; ++j) {
    lp.c.push_back(u(rng));
    lp.upper.push_back(2.0 + 8.0 * std::abs(u(rng)));
  }
  return lp;
}

MilpModel to_model(const DenseLp& lp) {
  MilpModel m;
  for (std::size_t j = 0; j < lp.n; ++j) m.add_variable("x" + std::to_string(j), 0.0, lp.upper[j], VarKind::Continuous, lp.c[j]);
  for (std::size_t i = 0; i < lp.a.size(); ++i) {
    std::vector<Term> t;
    for (std::size_t j = 0; j < lp.n; ++j) t.push_back({j, lp.a[i][j]});
    m.add_constraint("r" + std::to_string(i), t, RowSense::LessEqual, lp.b[i]);
  }
  return m;
}

// Every vertex is the solution of n tight constraints among rows and bounds.
double vertex_enumeration(const DenseLp& lp) {
  std::vector<std::vector<double>> rows = lp.a;
  std::vector<double> rhs = lp.b;
  for (std::size_t j = 0; j < lp.n; ++j) {
    std::vector<double> e(lp.n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(lp.upper[j]);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
  }
  const std::size_t k = rows.size();
  std::vector<bool> pick(k, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(lp.n), true);
  double best = kInf;
  do {
    RMatrix a(lp.n, lp.n);
    std::vector<double> b;
    std::size_t r = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!pick[i]) continue;
      for (std::size_t j = 0; j < lp.n; ++j) a(r, j) = rows[i][j];
      b.push_back(rhs[i]);
      ++r;
    }
    const auto f = lu_factor(a);
    if (f.singular()) continue;
    const auto x = solve(f, std::span<const double>(b));
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < lp.n; ++j) s += rows[i][j] * x[j];
      ok = s <= rhs[i] + 1e-9;
    }
    if (!ok) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.n; ++j) obj += lp.c[j] * x[j];
    best = std::min(best, obj);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_SUITE("milp") {

TEST_CASE("single bound row") {
  MilpModel m;
  const auto x = m.add_variable("x", -kInf, kInf, VarKind::Continuous, 1.0);
  m.add_constraint("c", {{x, 1.0}}, RowSense::GreaterEqual, 3.0);
  const Solution s = solve_lp(m);
  REQUIRE(s.optimal());
  CHECK(s.values[0] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("two-variable simplex corner") {
  MilpModel m;
  const auto x = m.add_variable("x", 0.0, kInf, VarKind::Continuous, -1.0);
  const auto y = m.add_variable("y", 0.0, kInf, VarKind::Continuous, -1.0);
  m.add_constraint("c", {{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 1.0);
  const Solution s = solve_lp(m);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-1.0));
}

TEST_CASE("unbounded and infeasible LPs") {
  MilpModel m;
  const auto x = m.add_variable("x", 0.0, kInf, VarKind::Continuous, -1.0);
  CHECK(solve_lp(m).status == SolveStatus::Unbounded);
  m.add_constraint("a", {{x, 1.0}}, RowSense::LessEqual, 1.0);
  m.add_constraint("b", {{x, 1.0}}, RowSense::GreaterEqual, 2.0);
  CHECK(solve_lp(m).status == SolveStatus::Infeasible);
}

TEST_CASE("random LPs against vertex enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const DenseLp lp = random_lp(rng);
    const Solution s = solve_lp(to_model(lp));
    CAPTURE(trial);
    REQUIRE(s.optimal());
    CHECK(std::abs(s.objective - vertex_enumeration(lp)) <= 1e-7);
    CHECK(to_model(lp).max_violation(s.values) <= 1e-9);
  }
}

TEST_CASE("knapsack matches exhaustive search") {
  const std::vector<double> value{10, 13, 7, 8, 4}, weight{5, 7, 4, 5, 2};
  const double cap = 13;
  MilpModel m;
  std::vector<Term> w;
  for (std::size_t i = 0; i < 5; ++i) {
    m.add_binary("x" + std::to_string(i), -value[i]);
    w.push_back({i, weight[i]});
  }
  m.add_constraint("cap", w, RowSense::LessEqual, cap);
  double best = 0.0;
  for (int mask = 0; mask < 32; ++mask) {
    double v = 0, wt = 0;
    for (int i = 0; i < 5; ++i)
      if (mask >> i & 1) {
        v += value[i];
        wt += weight[i];
      }
    if (wt <= cap) best = std::max(best, v);
  }
  const Solution s = solve_milp(m, 0.0);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-best));
  for (double v : s.values) CHECK((v == 0.0 || v == 1.0));
  CHECK(s.objective >= s.best_bound - 1e-9);
}

TEST_CASE("integral relaxation needs only the root") {
  MilpModel m;
  const auto a = m.add_binary("a", 3.0), b = m.add_binary("b", 2.0), c = m.add_binary("c", 4.0);
  m.add_constraint("ab", {{a, 1.0}, {b, 1.0}}, RowSense::GreaterEqual, 1.0);
  m.add_constraint("bc", {{b, 1.0}, {c, 1.0}}, RowSense::GreaterEqual, 1.0);
  const Solution s = solve_milp(m, 0.0);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.nodes == 1);
}

TEST_CASE("infeasible binary model") {
  MilpModel m;
  const auto a = m.add_binary("x1"), b = m.add_binary("x2");
  m.add_constraint("c", {{a, 1.0}, {b, 1.0}}, RowSense::GreaterEqual, 3.0);
  CHECK(solve_milp(m, 0.0).status == SolveStatus::Infeasible);
}

TEST_CASE("branch and bound is deterministic") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MilpModel m;
  std::vector<Term> row1, row2;
  for (std::size_t i = 0; i < 10; ++i) {
    m.add_binary("x" + std::to_string(i), -u(rng));
    row1.push_back({i, u(rng)});
    row2.push_back({i, u(rng)});
  }
  m.add_constraint("r1", row1, RowSense::LessEqual, 2.0);
  m.add_constraint("r2", row2, RowSense::LessEqual, 2.5);
  const Solution a = solve_milp(m, 0.0), b = solve_milp(m, 0.0);
  CHECK(a.values == b.values);
  CHECK(a.objective == b.objective);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("model validation") {
  MilpModel m;
  m.add_variable("x", 0.0, 1.0);
  m.validate();
  MilpModel dangling = m;
  dangling.add_constraint("c", {{3, 1.0}}, RowSense::LessEqual, 1.0);
  CHECK_THROWS_AS(dangling.validate(), ModelError);
  MilpModel wide = m;
  wide.add_variable("b", 0.0, 2.0, VarKind::Binary);
  CHECK_THROWS_AS(wide.validate(), ModelError);
  CHECK_THROWS_AS(solve_lp(wide), ModelError);
}

TEST_CASE("QP with an active bound") {
  RMatrix h(1, 1);
  h(0, 0) = 2.0;
  RMatrix a(1, 1);
  a(0, 0) = 1.0;
  const std::vector<double> g{-2.0}, b{0.0};
  const QpResult r = solve_qp_active_set(h, g, a, b);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(std::abs(r.x[0]) <= 1e-9);
  CHECK(r.multipliers[0] == doctest::Approx(2.0));
}

TEST_CASE("unconstrained QP solves the normal equations") {
  // min ‖Ax − y‖² with A = [[1,0],[1,1],[1,2]]
  RMatrix h(2, 2);
  h(0, 0) = 2 * 3.0;
  h(0, 1) = h(1, 0) = 2 * 3.0;
  h(1, 1) = 2 * 5.0;
  const std::vector<double> y{1.0, 2.0, 2.0};
  const std::vector<double> g{-2 * (y[0] + y[1] + y[2]), -2 * (y[1] + 2 * y[2])};
  const QpResult r = solve_qp_active_set(h, g, RMatrix(0, 2), std::vector<double>{});
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(7.0 / 6.0));
  CHECK(r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("QP infeasibility is detected") {
  RMatrix h = RMatrix::identity(1);
  RMatrix a(2, 1);
  a(0, 0) = 1.0;
  a(1, 0) = -1.0;
  const std::vector<double> g{0.0}, b{0.0, -1.0};
  CHECK(solve_qp_active_set(h, g, a, b).status == QpStatus::Infeasible);
}

TEST_CASE("random box QPs against projected gradient") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    RMatrix mm(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) mm(i, j) = u(rng);
    RMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) h(i, j) += mm(k, i) * mm(k, j);
        if (i == j) h(i, j) += 0.1;
      }
    std::vector<double> g(n), lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 3.0 * u(rng);
      lo[i] = -0.5 - std::abs(u(rng));
      hi[i] = 0.5 + std::abs(u(rng));
    }
    RMatrix a(2 * n, n);
    std::vector<double> b(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      a(2 * i, i) = 1.0;
      b[2 * i] = hi[i];
      a(2 * i + 1, i) = -1.0;
      b[2 * i + 1] = -lo[i];
    }
    auto objective = [&](const std::vector<double>& x) {
      double f = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        f += g[i] * x[i];
        for (std::size_t j = 0; j < n; ++j) f += 0.5 * x[i] * h(i, j) * x[j];
      }
      return f;
    };
    const QpResult r = solve_qp_active_set(h, g, a, b);
    REQUIRE(r.status == QpStatus::Optimal);

    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += std::abs(h(i, j));
      lip = std::max(lip, s);
    }
    std::vector<double> x(n, 0.0);
    for (int it = 0; it < 200000; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double grad = g[i];
        for (std::size_t j = 0; j < n; ++j) grad += h(i, j) * x[j];
        x[i] = std::clamp(x[i] - grad / lip, lo[i], hi[i]);
      }
    }
    CAPTURE(trial);
    CHECK(std::abs(objective(r.x) - objective(x)) <= 1e-6);
    for (std::size_t i = 0; i < n; ++i) CHECK((r.x[i] >= lo[i] - 1e-9 && r.x[i] <= hi[i] + 1e-9));
  }
}

TEST_CASE("LP file for a single variable") {
  MilpModel m;
  m.add_variable("x", 0.0, 4.0, VarKind::Continuous, 1.0);
  const LpExport e = export_lp_file(m);
  CHECK(e.text == "Minimize\n obj: + 1 x\nSubject To\nBounds\n 0 <= x <= 4\nEnd\n");
  CHECK(export_lp_file(m).text == e.text);
  CHECK(e.renamed.empty());
}

TEST_CASE("LP names are sanitized with a rename table") {
  MilpModel m;
  const auto a = m.add_variable("power out", 0.0, 1.0, VarKind::Continuous, 2.0);
  const auto b = m.add_binary("on[1]", 1.0);
  m.add_constraint("link row", {{a, 1.0}, {b, -1.0}}, RowSense::LessEqual, 0.0);
  const LpExport e = export_lp_file(m);
  CHECK(e.renamed.at("power out") == "power_out");
  CHECK(e.renamed.at("link row") == "link_row");
  CHECK(e.text.find("\\ rename: power out -> power_out") != std::string::npos);
  CHECK(e.text.find("power out") == e.text.find("\\ rename: power out") + 10);
}

TEST_CASE("LP files round-trip") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MilpModel m;
  std::vector<Term> row;
  for (std::size_t i = 0; i < 6; ++i) {
    m.add_binary("y" + std::to_string(i), -u(rng));
    row.push_back({i, u(rng)});
  }
  const auto z = m.add_variable("z", -1.0, 3.5, VarKind::Continuous, 0.25);
  row.push_back({z, 1.0});
  m.add_constraint("cap", row, RowSense::LessEqual, 2.0);
  m.add_constraint("eq", {{0, 1.0}, {z, 1.0}}, RowSense::Equal, 1.5);
  m.set_objective_constant(7.0);
  const std::string text = export_lp_file(m).text;
  const MilpModel back = import_lp_file(text);
  CHECK(back.variable_count() == m.variable_count());
  CHECK(back.binary_count() == m.binary_count());
  CHECK(export_lp_file(back).text == text);
  CHECK(solve_milp(back, 0.0).objective == doctest::Approx(solve_milp(m, 0.0).objective).epsilon(1e-12));
}

}  // TEST_SUITE
