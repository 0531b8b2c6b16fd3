#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "tcsi/error.hpp"
#include "tcsi/structural.hpp"

using namespace tcsi;

namespace {

// Exhaustive search over all maximum matchings; returns the maximum size and
// the equations left unmatched by at least one maximum matching.
struct BruteForce {
  std::size_t best = 0;
  std::set<std::size_t> sometimes_free;
};

void enumerate(const StructuralModel& m, std::size_t eq, std::vector<bool>& used,
               std::vector<int>& assign, std::size_t size, std::vector<std::vector<int>>& found,
               std::size_t& best) {
  const auto& eqs = m.equations();
  if (eq == eqs.size()) {
    if (size > best) {
      best = size;
      found.clear();
    }
    if (size == best) found.push_back(assign);
    return;
  }
  // Prune branches that cannot reach the current best.
  if (size + (eqs.size() - eq) < best) return;
  assign[eq] = -1;
  enumerate(m, eq + 1, used, assign, size, found, best);
  for (std::size_t v : eqs[eq].unknowns) {
    if (used[v]) continue;
    used[v] = true;
    assign[eq] = static_cast<int>(v);
    enumerate(m, eq + 1, used, assign, size + 1, found, best);
    used[v] = false;
  }
  assign[eq] = -1;
}

BruteForce brute_force(const StructuralModel& m) {
  std::vector<bool> used(m.unknowns().size(), false);
  std::vector<int> assign(m.equations().size(), -1);
  std::vector<std::vector<int>> found;
  BruteForce out;
  enumerate(m, 0, used, assign, 0, found, out.best);
  for (const auto& a : found) {
    for (std::size_t e = 0; e < a.size(); ++e) {
      if (a[e] < 0) out.sometimes_free.insert(e);
    }
  }
  return out;
}

StructuralModel random_model(std::mt19937& rng, std::size_t n_eq, std::size_t n_var) {
  StructuralModel m;
  for (std::size_t v = 0; v < n_var; ++v) m.declare_unknown("x" + std::to_string(v));
  std::bernoulli_distribution coin(0.3);
  for (std::size_t e = 0; e < n_eq; ++e) {
    std::vector<std::string> vars;
    for (std::size_t v = 0; v < n_var; ++v) {
      if (coin(rng)) vars.push_back("x" + std::to_string(v));
    }
    m.add_equation("e" + std::to_string(e + 1), vars);
  }
  return m;
}

std::set<std::string> labels(const StructuralModel& m, const std::vector<std::size_t>& eqs) {
  std::set<std::string> out;
  for (std::size_t e : eqs) out.insert(m.equations()[e].label);
  return out;
}

std::size_t fault_col(const StructuralModel& m, std::string_view name) {
  const auto& f = m.faults();
  return static_cast<std::size_t>(std::find(f.begin(), f.end(), name) - f.begin());
}

}  // namespace

TEST_CASE("matching on trivial models") {
  StructuralModel empty;
  CHECK(maximum_matching(empty).size == 0);

  StructuralModel diag;
  for (int k = 0; k < 5; ++k) diag.add_equation("e" + std::to_string(k), {"x" + std::to_string(k)});
  CHECK(maximum_matching(diag).size == 5);
  const DMDecomposition dm = dm_decompose(diag);
  CHECK(dm.over_equations.empty());
  CHECK(dm.under_equations.empty());
  CHECK(dm.just_equations.size() == 5);
}

TEST_CASE("dc motor matching and over-determined part") {
  const StructuralModel m = build_dc_motor_example();
  CHECK(m.equations().size() == 9);
  CHECK(m.unknowns().size() == 7);
  CHECK(m.faults().size() == 4);
  CHECK(maximum_matching(m).size == 7);
  CHECK(brute_force(m).best == 7);

  const DMDecomposition dm = dm_decompose(m);
  CHECK(labels(m, dm.over_equations) == std::set<std::string>{"e1", "e3", "e7", "e8", "e9"});
  std::set<std::string> oracle;
  for (std::size_t e : brute_force(m).sometimes_free) oracle.insert(m.equations()[e].label);
  CHECK(labels(m, dm.over_equations) == oracle);
}

TEST_CASE("dc motor incidence rows") {
  const StructuralModel m = build_dc_motor_example();
  const auto e1 = m.unknown_names(m.equation("e1"));
  CHECK(std::set<std::string>(e1.begin(), e1.end()) == std::set<std::string>{"i", "omega"});
  CHECK(m.equation("e1").knowns.size() == 1);
  CHECK(m.knowns()[m.equation("e1").knowns[0]] == "V");
  CHECK(m.faults()[m.equation("e1").faults[0]] == "f_R");
  const auto e5 = m.unknown_names(m.equation("e5"));
  CHECK(std::set<std::string>(e5.begin(), e5.end()) == std::set<std::string>{"theta", "omega"});
}

TEST_CASE("over-determined part matches brute force on random models") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const StructuralModel m = random_model(rng, 8, 6);
    const BruteForce bf = brute_force(m);
    CHECK(maximum_matching(m).size == bf.best);
    const DMDecomposition dm = dm_decompose(m);
    const std::set<std::size_t> over(dm.over_equations.begin(), dm.over_equations.end());
    CHECK(over == bf.sometimes_free);
  }
}

TEST_CASE("dropping a sensor equation shrinks the over-determined part") {
  const StructuralModel m = build_dc_motor_example();
  std::vector<bool> active(m.equations().size(), true);
  const auto before = over_determined_mask(m, active);
  active[m.equation_index("e9")] = false;
  const auto after = over_determined_mask(m, active);
  const auto count = [](const std::vector<bool>& v) { return std::count(v.begin(), v.end(), true); };
  CHECK(count(after) < count(before));
}

TEST_CASE("dc motor isolability") {
  const StructuralModel m = build_dc_motor_example();
  const IsolabilityResult r = structural_isolability(m);
  const std::size_t fR = fault_col(m, "f_R"), fi = fault_col(m, "f_i");
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.detectable[i]);
    for (std::size_t j = 0; j < 4; ++j) {
      const bool expected = i == j || ((i == fR || i == fi) && (j == fR || j == fi));
      CHECK(r.fim.at(i, j) == expected);
    }
  }
}

TEST_CASE("faults in disjoint redundant subsystems are isolable") {
  StructuralModel m;
  m.add_equation("a1", {"x"}, {"u"}, {"f1"});
  m.add_equation("a2", {"x"}, {"y1"});
  m.add_equation("b1", {"z"}, {"v"}, {"f2"});
  m.add_equation("b2", {"z"}, {"y2"});
  const IsolabilityResult r = structural_isolability(m);
  CHECK(r.fim.at(0, 0));
  CHECK(r.fim.at(1, 1));
  CHECK_FALSE(r.fim.at(0, 1));
  CHECK_FALSE(r.fim.at(1, 0));
}

TEST_CASE("engine structural model counts") {
  const StructuralModel m = build_engine_structural_model();
  CHECK(m.equations().size() == 62);
  CHECK(m.faults().size() == 11);
  std::size_t with_faults = 0;
  for (const auto& e : m.equations()) with_faults += e.faults.empty() ? 0 : 1;
  CHECK(with_faults == 10);
  const auto e30 = m.unknown_names(m.equation("e30"));
  CHECK(std::set<std::string>(e30.begin(), e30.end()) == std::set<std::string>{"W_f", "W_ei"});
  for (int k = 54; k <= 62; ++k) {
    CHECK(m.equation("e" + std::to_string(k)).unknowns.size() == 1);
  }
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("engine structural isolability has two non-isolable pairs") {
  const StructuralModel m = build_engine_structural_model();
  const IsolabilityResult r = structural_isolability(m);
  std::set<std::pair<std::string, std::string>> off;
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(r.detectable[i]);
    for (std::size_t j = 0; j < 11; ++j) {
      if (i != j && r.fim.at(i, j)) off.insert({m.faults()[i], m.faults()[j]});
    }
  }
  const std::set<std::pair<std::string, std::string>> expected{
      {"f_paf", "f_Waf"}, {"f_Waf", "f_paf"}, {"f_Wth", "f_xth"}, {"f_xth", "f_Wth"}};
  CHECK(off == expected);
}

TEST_CASE("structural model text round trip") {
  const StructuralModel m = build_engine_structural_model();
  std::ostringstream out;
  write_structural_model(out, m);
  const StructuralModel back = parse_structural_model(out.str(), "mem");
  REQUIRE(back.equations().size() == m.equations().size());
  CHECK(back.faults() == m.faults());
  for (std::size_t e = 0; e < m.equations().size(); ++e) {
    CHECK(back.equations()[e].label == m.equations()[e].label);
    CHECK(back.unknown_names(back.equations()[e]) == m.unknown_names(m.equations()[e]));
  }
  CHECK(structural_isolability(back).fim == structural_isolability(m).fim);
}

TEST_CASE("structural model parse errors") {
  CHECK_THROWS(parse_structural_model("e1 | x | | f1\ne1 | y | | f2\n", "dup"));
  CHECK_THROWS(parse_structural_model("e1 | x | | f1\ne2 | x | | f1\n", "fault twice"));
}
