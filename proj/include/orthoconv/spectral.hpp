#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/convmat.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/rng.hpp"

namespace orthoconv {

/// Singular-spectrum result. Full mode carries the complete list (sorted
/// descending, min(M,C)*N^d values, S = 1 only); Extremal mode carries the
/// (sigma_min, sigma_max) pair obtained by shifted power iteration.
struct SingularSpectrum {
  enum class Mode { Full, Extremal };

  Mode mode = Mode::Full;
  Architecture arch;
  int N = 0;
  std::vector<double> values;  ///< Full mode only, descending
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int iterations_used = 0;  ///< Extremal mode: both power-iteration runs
  bool converged = true;
};

struct PowerIterationResult {
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Rayleigh-quotient power iteration for the largest eigenvalue of a
/// self-adjoint PSD operator on R^dim. Convergence is declared on the
/// eigenvalue estimate, |lambda_t - lambda_{t-1}| <= tol * max(1, lambda_t);
/// the eigenvector itself may keep rotating inside a degenerate eigenspace.
template <class Operator>
PowerIterationResult power_iteration(Operator&& op, long long dim, double tol,
                                     int max_iter, std::uint64_t seed) {
  SplitMix64 gen(derive_seed(seed, {0x706f776572ull}));
  std::vector<double> v = gen.next_unit_vector(static_cast<int>(dim));
  std::vector<double> w(v.size(), 0.0);

  PowerIterationResult result;
  double prev = 0.0;
  for (int t = 1; t <= max_iter; ++t) {
    op(std::span<const double>(v), std::span<double>(w));
    double lambda = 0.0, norm_sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      lambda += v[i] * w[i];
      norm_sq += w[i] * w[i];
    }
    result.lambda = lambda;
    result.iterations = t;
    if (t > 1 && std::abs(lambda - prev) <= tol * std::max(1.0, std::abs(lambda))) {
      result.converged = true;
      return result;
    }
    prev = lambda;
    if (norm_sq == 0.0) {
      // Operator annihilates the iterate: for a PSD map this pins the
      // estimate at zero.
      result.lambda = 0.0;
      result.converged = true;
      return result;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] * inv;
  }
  return result;
}

/// Full singular spectrum for S = 1 layers: the circular layer matrix is
/// unitarily block-diagonalized by the DFT, so the spectrum is the union
/// over the N^d frequency bins of the singular values of the M x C matrix
/// of kernel transforms. Forward transform uses a negative exponent and no
/// normalization; kernel entries occupy indices 0..k-1 of each length-N
/// axis (a cyclic shift only changes bins by a unimodular phase, which
/// singular values ignore).
inline SingularSpectrum singular_values_full(const KernelTensor& K, int N) {
  K.check_shape();
  const Architecture& arch = K.arch;
  require(arch.S == 1, ErrorCode::StrideNotOne,
          "full spectrum is only available for S = 1");
  require(N >= arch.k, ErrorCode::SignalTooSmall,
          "full spectrum needs N >= k");

  const int k = arch.k;
  using Complex = std::complex<double>;

  // Twiddle table: w(t) = exp(-2*pi*i*t/N) for t in [0, N*k).
  std::vector<Complex> twiddle(static_cast<std::size_t>(N) * k);
  for (std::size_t t = 0; t < twiddle.size(); ++t) {
    const double angle =
        -2.0 * 3.14159265358979323846 * static_cast<double>(t % N) / N;
    twiddle[t] = Complex(std::cos(angle), std::sin(angle));
  }

  SingularSpectrum out;
  out.mode = SingularSpectrum::Mode::Full;
  out.arch = arch;
  out.N = N;

  Eigen::MatrixXcd bin(arch.M, arch.C);
  if (arch.d == 1) {
    for (int w = 0; w < N; ++w) {
      for (int m = 0; m < arch.M; ++m)
        for (int c = 0; c < arch.C; ++c) {
          Complex acc(0.0, 0.0);
          for (int j = 0; j < k; ++j)
            acc += K.at(m, c, j) *
                   twiddle[static_cast<std::size_t>(w) * j % N];
          bin(m, c) = acc;
        }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(bin);
      const auto& sv = svd.singularValues();
      for (long i = 0; i < sv.size(); ++i) out.values.push_back(sv[i]);
    }
  } else {
    for (int w1 = 0; w1 < N; ++w1)
      for (int w2 = 0; w2 < N; ++w2) {
        for (int m = 0; m < arch.M; ++m)
          for (int c = 0; c < arch.C; ++c) {
            Complex acc(0.0, 0.0);
            for (int a = 0; a < k; ++a) {
              const Complex row_phase =
                  twiddle[static_cast<std::size_t>(w1) * a % N];
              for (int b = 0; b < k; ++b)
                acc += K.at(m, c, a, b) * row_phase *
                       twiddle[static_cast<std::size_t>(w2) * b % N];
            }
            bin(m, c) = acc;
          }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(bin);
        const auto& sv = svd.singularValues();
        for (long i = 0; i < sv.size(); ++i) out.values.push_back(sv[i]);
      }
  }

  std::sort(out.values.begin(), out.values.end(), std::greater<double>());
  out.sigma_max = out.values.front();
  out.sigma_min = out.values.back();
  return out;
}

/// Extremal singular values for any stride, matrix-free: power iteration
/// on the case-appropriate Gram operator G (K K^T in the RO/Square case,
/// K^T K in the CO case) gives lambda_max; a second run on
/// bigCste*Id - G with bigCste = shift_factor * lambda_max reaches the
/// bottom of the spectrum. sigma_max = sqrt(lambda_1),
/// sigma_min = sqrt(max(0, bigCste - lambda_2)).
inline SingularSpectrum extremal_singular_values(
    const KernelTensor& K, int N, double tol = 1e-9, int max_iter = 10000,
    std::uint64_t seed = 0, double shift_factor = 1.1) {
  K.check_shape();
  const Architecture& arch = K.arch;
  require(static_cast<long long>(arch.S) * N >= arch.k,
          ErrorCode::SignalTooSmall, "extremal singular values need SN >= k");

  const bool gram_on_output = case_of(arch) != Case::CO;
  const long long dim =
      gram_on_output ? layer_output_dim(arch, N) : layer_input_dim(arch, N);
  const long long other =
      gram_on_output ? layer_input_dim(arch, N) : layer_output_dim(arch, N);

  std::vector<double> scratch(static_cast<std::size_t>(other));
  auto gram = [&](std::span<const double> in, std::span<double> out) {
    if (gram_on_output) {
      apply_layer_adjoint_into(K, N, in, scratch);
      apply_layer_into(K, N, scratch, out);
    } else {
      apply_layer_into(K, N, in, scratch);
      apply_layer_adjoint_into(K, N, scratch, out);
    }
  };

  PowerIterationResult top = power_iteration(
      gram, dim, tol, max_iter, derive_seed(seed, {0x746f70ull}));
  require(top.lambda > 1e-300, ErrorCode::ZeroOperator,
          "layer operator is numerically zero");

  const double big_cste = shift_factor * top.lambda;
  auto shifted = [&](std::span<const double> in, std::span<double> out) {
    gram(in, out);
    for (std::size_t i = 0; i < in.size(); ++i)
      out[i] = big_cste * in[i] - out[i];
  };
  PowerIterationResult bottom = power_iteration(
      shifted, dim, tol, max_iter, derive_seed(seed, {0x626f74746f6dull}));

  SingularSpectrum out;
  out.mode = SingularSpectrum::Mode::Extremal;
  out.arch = arch;
  out.N = N;
  out.sigma_max = std::sqrt(top.lambda);
  out.sigma_min = std::sqrt(std::max(0.0, big_cste - bottom.lambda));
  out.iterations_used = top.iterations + bottom.iterations;
  out.converged = top.converged && bottom.converged;
  return out;
}

}  // namespace orthoconv
