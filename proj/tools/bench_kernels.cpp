// Compares the serial reference path with the OpenMP kernels on the pieces
// that parallelize: catalog enumeration, reduced-cost pricing and the
// per-OD equilibrium verification. Run as: mta_bench <scenario> [threads]

#include <chrono>
#include <iostream>

#include "mta/analysis.hpp"
#include "mta/parallel.hpp"
#include "mta/runner.hpp"

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: mta_bench <scenario.json> [threads]\n";
    return 1;
  }
  int threads = argc > 2 ? std::atoi(argv[2]) : 4;
  mta::Scenario s = mta::load_scenario_file(argv[1]);

  mta::parallel::set_threads(1);
  auto cat = mta::PathCatalog::build(s);
  auto mp = mta::build_program(s, cat, mta::Principle::UE, {});
  auto sol = mta::branch_and_bound(mp, {});
  if (sol.status != mta::SolveStatus::Optimal) {
    std::cerr << "scenario did not solve to optimality; benchmark aborted\n";
    return 1;
  }

  struct Row {
    const char* name;
    double serial_ms;
    double parallel_ms;
  };
  std::vector<Row> rows;

  {
    mta::parallel::set_threads(1);
    double serial = time_ms([&] { mta::PathCatalog::build(s); }, 5);
    mta::parallel::set_threads(threads);
    double par = time_ms([&] { mta::PathCatalog::build(s); }, 5);
    rows.push_back({"catalog_build", serial, par});
  }
  {
    mta::parallel::set_threads(1);
    double serial = time_ms([&] { mta::branch_and_bound(mp, {}); }, 3);
    mta::parallel::set_threads(threads);
    double par = time_ms([&] { mta::branch_and_bound(mp, {}); }, 3);
    rows.push_back({"solve_pricing", serial, par});
  }
  {
    mta::parallel::set_threads(1);
    double serial = time_ms([&] { mta::verify_equilibrium(s, cat, mp, sol, 1e-6); }, 3);
    mta::parallel::set_threads(threads);
    double par = time_ms([&] { mta::verify_equilibrium(s, cat, mp, sol, 1e-6); }, 3);
    rows.push_back({"verify_equilibrium", serial, par});
  }

  std::cout << "kernel,serial_ms,omp_ms,speedup(threads=" << threads << ")\n";
  for (const auto& r : rows)
    std::cout << r.name << "," << r.serial_ms << "," << r.parallel_ms << ","
              << (r.parallel_ms > 0 ? r.serial_ms / r.parallel_ms : 0.0) << "\n";
  return 0;
}
