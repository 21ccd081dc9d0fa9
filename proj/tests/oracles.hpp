#pragma once

// Test-only reference implementations, written directly from the defining
// formulas and kept independent of the library's construction paths:
// the layer matrix is assembled column-by-column by pushing basis vectors
// through a literal convolution loop, correlations use a brute-force
// sliding window, and gradients come from central differences.

#include <Eigen/Dense>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/lorth.hpp"

namespace oracles {

using orthoconv::Architecture;
using orthoconv::KernelTensor;
using orthoconv::PaddingMode;

inline int wrap(int v, int n) { return ((v % n) + n) % n; }

/// Literal strided circular convolution, machine-learning convention:
/// y[m][i] = sum_c sum_a K[m][c][a] * x[c][(S*i + a - r) mod SN].
inline std::vector<double> direct_circular_conv(const KernelTensor& K, int N,
                                                const std::vector<double>& x) {
  const Architecture& a = K.arch;
  const int n = a.S * N;
  const int r = a.radius();
  if (a.d == 1) {
    std::vector<double> y(static_cast<std::size_t>(a.M) * N, 0.0);
    for (int m = 0; m < a.M; ++m)
      for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t = 0; t < a.k; ++t)
            acc += K.at(m, c, t) *
                   x[static_cast<std::size_t>(c) * n + wrap(a.S * i + t - r, n)];
        y[static_cast<std::size_t>(m) * N + i] = acc;
      }
    return y;
  }
  std::vector<double> y(static_cast<std::size_t>(a.M) * N * N, 0.0);
  for (int m = 0; m < a.M; ++m)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t1 = 0; t1 < a.k; ++t1)
            for (int t2 = 0; t2 < a.k; ++t2)
              acc += K.at(m, c, t1, t2) *
                     x[(static_cast<std::size_t>(c) * n +
                        wrap(a.S * i1 + t1 - r, n)) *
                           n +
                       wrap(a.S * i2 + t2 - r, n)];
        y[(static_cast<std::size_t>(m) * N + i1) * N + i2] = acc;
      }
  return y;
}

/// Literal valid-padding convolution (S = 1): outputs only where the
/// shifted kernel stays inside the input support.
inline std::vector<double> direct_valid_conv(const KernelTensor& K, int N,
                                             const std::vector<double>& x) {
  const Architecture& a = K.arch;
  const int out = N - a.k + 1;
  if (a.d == 1) {
    std::vector<double> y(static_cast<std::size_t>(a.M) * out, 0.0);
    for (int m = 0; m < a.M; ++m)
      for (int i = 0; i < out; ++i) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t = 0; t < a.k; ++t)
            acc += K.at(m, c, t) * x[static_cast<std::size_t>(c) * N + i + t];
        y[static_cast<std::size_t>(m) * out + i] = acc;
      }
    return y;
  }
  std::vector<double> y(static_cast<std::size_t>(a.M) * out * out, 0.0);
  for (int m = 0; m < a.M; ++m)
    for (int i1 = 0; i1 < out; ++i1)
      for (int i2 = 0; i2 < out; ++i2) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t1 = 0; t1 < a.k; ++t1)
            for (int t2 = 0; t2 < a.k; ++t2)
              acc += K.at(m, c, t1, t2) *
                     x[(static_cast<std::size_t>(c) * N + i1 + t1) * N + i2 + t2];
        y[(static_cast<std::size_t>(m) * out + i1) * out + i2] = acc;
      }
  return y;
}

/// Literal same-size zero-padding convolution (S = 1).
inline std::vector<double> direct_same_zero_conv(const KernelTensor& K, int N,
                                                 const std::vector<double>& x) {
  const Architecture& a = K.arch;
  const int r = a.radius();
  auto in = [&](int c, int p) -> double {
    if (p < 0 || p >= N) return 0.0;
    return x[static_cast<std::size_t>(c) * N + p];
  };
  auto in2 = [&](int c, int p1, int p2) -> double {
    if (p1 < 0 || p1 >= N || p2 < 0 || p2 >= N) return 0.0;
    return x[(static_cast<std::size_t>(c) * N + p1) * N + p2];
  };
  if (a.d == 1) {
    std::vector<double> y(static_cast<std::size_t>(a.M) * N, 0.0);
    for (int m = 0; m < a.M; ++m)
      for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t = 0; t < a.k; ++t) acc += K.at(m, c, t) * in(c, i + t - r);
        y[static_cast<std::size_t>(m) * N + i] = acc;
      }
    return y;
  }
  std::vector<double> y(static_cast<std::size_t>(a.M) * N * N, 0.0);
  for (int m = 0; m < a.M; ++m)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        double acc = 0.0;
        for (int c = 0; c < a.C; ++c)
          for (int t1 = 0; t1 < a.k; ++t1)
            for (int t2 = 0; t2 < a.k; ++t2)
              acc += K.at(m, c, t1, t2) * in2(c, i1 + t1 - r, i2 + t2 - r);
        y[(static_cast<std::size_t>(m) * N + i1) * N + i2] = acc;
      }
  return y;
}

/// Dense layer matrix assembled one column at a time from the convolution
/// definition itself (basis vector in, output column out).
inline Eigen::MatrixXd naive_layer_matrix(const KernelTensor& K, int N,
                                          PaddingMode padding) {
  const Architecture& a = K.arch;
  const int in_extent = padding == PaddingMode::Circular ? a.S * N : N;
  const long long cols =
      static_cast<long long>(a.C) * (a.d == 1 ? in_extent : in_extent * in_extent);
  std::vector<double> basis(static_cast<std::size_t>(cols), 0.0);

  auto apply = [&](const std::vector<double>& x) {
    switch (padding) {
      case PaddingMode::Circular: return direct_circular_conv(K, N, x);
      case PaddingMode::Valid: return direct_valid_conv(K, N, x);
      case PaddingMode::SameZero: return direct_same_zero_conv(K, N, x);
    }
    return std::vector<double>{};
  };

  basis.assign(basis.size(), 0.0);
  basis[0] = 1.0;
  std::vector<double> first = apply(basis);
  basis[0] = 0.0;
  Eigen::MatrixXd out(static_cast<long>(first.size()), static_cast<long>(cols));
  for (long long j = 0; j < cols; ++j) {
    basis[static_cast<std::size_t>(j)] = 1.0;
    std::vector<double> col = apply(basis);
    basis[static_cast<std::size_t>(j)] = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i)
      out(static_cast<long>(i), static_cast<long>(j)) = col[i];
  }
  return out;
}

/// Brute-force strided cross-correlation of 1D kernels against an
/// explicitly materialized zero-padding of g.
inline std::vector<double> brute_cross_correlation(
    const std::vector<double>& h, const std::vector<double>& g, int P, int S) {
  const int k = static_cast<int>(h.size());
  std::vector<double> padded(static_cast<std::size_t>(k + 2 * P), 0.0);
  for (int i = 0; i < k; ++i) padded[static_cast<std::size_t>(P + i)] = g[i];
  std::vector<double> full(static_cast<std::size_t>(2 * P + 1), 0.0);
  for (int i = 0; i <= 2 * P; ++i) {
    double acc = 0.0;
    for (int t = 0; t < k; ++t) acc += h[t] * padded[static_cast<std::size_t>(t + i)];
    full[static_cast<std::size_t>(i)] = acc;
  }
  std::vector<double> strided;
  for (int i = 0; S * i <= 2 * P; ++i) strided.push_back(full[static_cast<std::size_t>(S * i)]);
  return strided;
}

/// Central-difference gradient of lorth.
inline KernelTensor finite_difference_gradient(const KernelTensor& K,
                                               double step = 1e-5) {
  KernelTensor grad(K.arch);
  KernelTensor probe = K;
  for (std::size_t i = 0; i < K.data.size(); ++i) {
    probe.data[i] = K.data[i] + step;
    const double up = orthoconv::lorth(probe);
    probe.data[i] = K.data[i] - step;
    const double down = orthoconv::lorth(probe);
    probe.data[i] = K.data[i];
    grad.data[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracles
