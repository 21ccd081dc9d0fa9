#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/lorth.hpp"
#include "orthoconv/rng.hpp"
#include "orthoconv/spectral.hpp"

namespace orthoconv {

/// Adam settings for the penalty minimization. The defaults are the fixed
/// learning rate 0.01 over 3000 steps with the standard bias-corrected
/// moment estimates.
struct OptimizerConfig {
  double learning_rate = 0.01;
  int steps = 3000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  std::uint64_t seed = 12;
  double success_threshold = 1e-6;

  void validate() const {
    require(learning_rate > 0.0 && steps >= 1 && beta1 >= 0.0 && beta1 < 1.0 &&
                beta2 >= 0.0 && beta2 < 1.0 && eps_hat > 0.0,
            ErrorCode::NonPositiveDim, "invalid optimizer configuration");
  }
};

/// Per-run record: the penalty value before each step plus the final one
/// (steps + 1 entries), the final kernel, and end-of-run extremal singular
/// values at the reference channel size.
struct OptimizationTrace {
  std::vector<double> lorth_values;
  KernelTensor final_kernel;
  int reference_N = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool success = false;

  double final_lorth() const { return lorth_values.back(); }
};

/// End-of-run diagnostics target an input of spatial extent 64 per axis,
/// i.e. N = 64/S, floored so that SN >= 2k - 1 always holds.
inline int reference_channel_size(const Architecture& arch) {
  const int from_input = std::max(1, 64 / arch.S);
  const int floor_n = (2 * arch.k - 1 + arch.S - 1) / arch.S;
  return std::max(from_input, floor_n);
}

/// Minimizes the orthogonality penalty with Adam from a Glorot-uniform
/// start. Deterministic for a fixed (arch, config); runs the full step
/// budget with no early stopping.
inline OptimizationTrace minimize_lorth(const Architecture& arch,
                                        const OptimizerConfig& config) {
  validate_architecture(arch);
  config.validate();

  KernelTensor kernel = glorot_uniform_init(arch, config.seed);
  const std::size_t n = kernel.data.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);

  OptimizationTrace trace;
  trace.lorth_values.reserve(static_cast<std::size_t>(config.steps) + 1);

  double beta1_pow = 1.0, beta2_pow = 1.0;
  for (int step = 1; step <= config.steps; ++step) {
    trace.lorth_values.push_back(lorth(kernel));
    KernelTensor grad = lorth_gradient(kernel);
    beta1_pow *= config.beta1;
    beta2_pow *= config.beta2;
    const double m_scale = 1.0 / (1.0 - beta1_pow);
    const double v_scale = 1.0 / (1.0 - beta2_pow);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad.data[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      kernel.data[i] -= config.learning_rate * (m[i] * m_scale) /
                        (std::sqrt(v[i] * v_scale) + config.eps_hat);
    }
  }
  trace.lorth_values.push_back(lorth(kernel));

  trace.final_kernel = kernel;
  trace.reference_N = reference_channel_size(arch);
  SingularSpectrum extremes = extremal_singular_values(
      kernel, trace.reference_N, 1e-9, 10000,
      derive_seed(config.seed, {0x7369676d61ull}));
  trace.sigma_min = extremes.sigma_min;
  trace.sigma_max = extremes.sigma_max;
  trace.success = trace.final_lorth() <= config.success_threshold;
  return trace;
}

struct SweepRanges {
  int d = 2;
  int C_min = 1, C_max = 0;
  int M_min = 1, M_max = 0;
  std::vector<int> S_set;
  std::vector<int> k_set;
};

struct SweepRow {
  Architecture arch;
  double ratio = 0.0;  ///< M / (C * S^d)
  double lorth_final = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool success = false;
  std::uint64_t seed = 0;
  KernelTensor final_kernel;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< grid order over the eligible architectures
  long long total = 0;
  long long excluded = 0;  ///< architectures with no orthogonal layer
};

/// Enumerates the grid in (C, M, S, k) order and reports eligibility
/// counts without optimizing anything.
inline SweepResult count_eligible(const SweepRanges& ranges) {
  SweepResult result;
  for (int C = ranges.C_min; C <= ranges.C_max; ++C)
    for (int M = ranges.M_min; M <= ranges.M_max; ++M)
      for (int S : ranges.S_set)
        for (int k : ranges.k_set) {
          ++result.total;
          Architecture arch{ranges.d, M, C, k, S};
          if (!exists_orthogonal(arch)) ++result.excluded;
        }
  return result;
}

inline int worker_count() {
  if (const char* env = std::getenv("ORTHOCONV_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs minimize_lorth over every eligible architecture of the grid, each
/// with a stream seed derived from the master seed and the architecture
/// itself. Rows are produced in canonical grid order regardless of how the
/// work is scheduled across threads.
inline SweepResult sweep_architectures(const SweepRanges& ranges,
                                       const OptimizerConfig& config,
                                       double success_threshold = 1e-6) {
  config.validate();
  SweepResult result;
  std::vector<Architecture> eligible;
  for (int C = ranges.C_min; C <= ranges.C_max; ++C)
    for (int M = ranges.M_min; M <= ranges.M_max; ++M)
      for (int S : ranges.S_set)
        for (int k : ranges.k_set) {
          ++result.total;
          Architecture arch{ranges.d, M, C, k, S};
          if (exists_orthogonal(arch))
            eligible.push_back(arch);
          else
            ++result.excluded;
        }

  result.rows.resize(eligible.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= eligible.size()) return;
      const Architecture& arch = eligible[i];
      OptimizerConfig row_config = config;
      row_config.success_threshold = success_threshold;
      row_config.seed = derive_seed(
          config.seed,
          {static_cast<std::uint64_t>(arch.d),
           static_cast<std::uint64_t>(arch.M),
           static_cast<std::uint64_t>(arch.C),
           static_cast<std::uint64_t>(arch.k),
           static_cast<std::uint64_t>(arch.S)});
      OptimizationTrace trace = minimize_lorth(arch, row_config);
      SweepRow& row = result.rows[i];
      row.arch = arch;
      row.ratio = static_cast<double>(arch.M) /
                  (static_cast<double>(arch.C) * arch.stride_power());
      row.lorth_final = trace.final_lorth();
      row.sigma_min = trace.sigma_min;
      row.sigma_max = trace.sigma_max;
      row.success = trace.success;
      row.seed = row_config.seed;
      row.final_kernel = std::move(trace.final_kernel);
    }
  };

  const int threads =
      std::min<int>(worker_count(), static_cast<int>(eligible.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return result;
}

/// Repeats the optimization with independent seeds on a square-boundary
/// architecture and reports the fraction of runs reaching the success
/// threshold. Both outcomes occur in practice: the square landscape stalls
/// a sizable share of starts.
inline double repeat_square_case(const Architecture& arch, int runs,
                                 const OptimizerConfig& config) {
  validate_architecture(arch);
  require(case_of(arch) == Case::Square, ErrorCode::WrongCase,
          "repeat_square_case requires M = C*S^d");
  require(runs >= 1, ErrorCode::InvalidRuns, "needs runs >= 1");
  config.validate();

  std::vector<char> outcome(static_cast<std::size_t>(runs), 0);
  std::atomic<int> next{0};
  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= runs) return;
      OptimizerConfig run_config = config;
      run_config.seed =
          derive_seed(config.seed, {0x7265706561ull,
                                    static_cast<std::uint64_t>(i)});
      OptimizationTrace trace = minimize_lorth(arch, run_config);
      outcome[static_cast<std::size_t>(i)] = trace.success ? 1 : 0;
    }
  };
  const int threads = std::min(worker_count(), runs);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  int successes = 0;
  for (char c : outcome) successes += c;
  return static_cast<double>(successes) / runs;
}

struct StabilityRow {
  int N = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Extremal singular values of a fixed kernel across a ladder of channel
/// sizes, matrix-free. For a well-trained kernel the values stay pinned
/// near 1 at every N; for an undertrained kernel the spread widens with N.
inline std::vector<StabilityRow> stability_across_n(
    const KernelTensor& K, const std::vector<int>& Ns, double tol = 1e-9,
    int max_iter = 10000, std::uint64_t seed = 0) {
  K.check_shape();
  for (int N : Ns)
    require(static_cast<long long>(K.arch.S) * N >= 2 * K.arch.k - 1,
            ErrorCode::SignalTooSmall,
            "stability ladder requires SN >= 2k - 1 (N=" + std::to_string(N) +
                ")");
  std::vector<StabilityRow> rows;
  rows.reserve(Ns.size());
  for (int N : Ns) {
    SingularSpectrum extremes = extremal_singular_values(
        K, N, tol, max_iter,
        derive_seed(seed, {0x737461626cull, static_cast<std::uint64_t>(N)}));
    rows.push_back({N, extremes.sigma_min, extremes.sigma_max});
  }
  return rows;
}

}  // namespace orthoconv
