#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/analysis.hpp"
#include "mta/parallel.hpp"

using namespace mta;

namespace {

struct ThreadGuard {
  ~ThreadGuard() { parallel::set_threads(1); }
};

}  // namespace

TEST_CASE("index loop visits everything once under both paths") {
  ThreadGuard guard;
  std::vector<int> serial(1000, 0), omp(1000, 0);
  parallel::set_threads(1);
  parallel::for_index(serial.size(), [&](std::size_t i) { serial[i] = static_cast<int>(i) * 3; });
  parallel::set_threads(8);
  parallel::for_index(omp.size(), [&](std::size_t i) { omp[i] = static_cast<int>(i) * 3; });
  CHECK(serial == omp);
}

TEST_CASE("catalog build is identical serial and parallel") {
  ThreadGuard guard;
  Scenario s = load_scenario(chain3_doc());
  parallel::set_threads(1);
  PathCatalog serial = PathCatalog::build(s);
  parallel::set_threads(8);
  PathCatalog omp = PathCatalog::build(s);
  REQUIRE(serial.size() == omp.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial.path(i).key() == omp.path(i).key());
}

TEST_CASE("solver and verifier outputs match the serial reference bit for bit") {
  ThreadGuard guard;
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});

  parallel::set_threads(1);
  Solution a = branch_and_bound(mp);
  auto rep_a = verify_equilibrium(s, cat, mp, a, 1e-6);
  parallel::set_threads(8);
  Solution b = branch_and_bound(mp);
  auto rep_b = verify_equilibrium(s, cat, mp, b, 1e-6);

  REQUIRE(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.nodes == b.nodes);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t j = 0; j < a.values.size(); ++j) CHECK(a.values[j] == b.values[j]);

  REQUIRE(rep_a.options.size() == rep_b.options.size());
  CHECK(rep_a.passed == rep_b.passed);
  for (std::size_t i = 0; i < rep_a.options.size(); ++i) {
    CHECK(rep_a.options[i].cost == rep_b.options[i].cost);
    CHECK(rep_a.options[i].best_gain == rep_b.options[i].best_gain);
  }
}
