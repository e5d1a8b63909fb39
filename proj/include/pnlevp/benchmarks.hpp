#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnlevp/solver.hpp"

namespace pnlevp {

/// Pinned settings of one reference experiment.
struct BenchmarkSetup {
  std::string name;
  std::string problem;
  ContourDomain domain;
  ContourDomain sample_domain;  // sample points lie on its boundary
  Real p_min = 0.0;
  Real p_max = 1.0;
  int r = 1;
  int q = 2;
  int n_nodes = 2;
  std::uint64_t seed = 1;
  int n_test = 200;  // sweep points in [p_min, p_max]
  FitOptions fit;

  SamplingConfig sampling(Eigen::Index dim) const;
};

struct BenchCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct BenchReport {
  BenchmarkSetup setup;
  OfflineModel model;
  std::vector<SweepRow> sweep;
  std::vector<BenchCheck> checks;
  double offline_seconds = 0.0;
  double total_seconds = 0.0;

  bool passed() const;
};

/// "linear-1", "linear-2", "delay", "damped-string-1", "damped-string-2".
std::vector<std::string> benchmark_names();

/// Throws ArgumentError for an unknown name.
BenchmarkSetup benchmark_setup(const std::string& name);

/// Offline phase, a sweep over the parameter range and the pass/fail checks.
BenchReport run_benchmark(const std::string& name, unsigned workers = 0);

}  // namespace pnlevp
