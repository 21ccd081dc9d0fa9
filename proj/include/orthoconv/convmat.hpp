#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"

namespace orthoconv {

/// Default cap on dense materialization (entries). Matrix-free operators
/// have no such cap.
inline constexpr long long kDefaultMaxDenseEntries = 100'000'000;

/// Dense realization of the layer transform for a given channel size and
/// padding. Rows/cols depend on the padding:
///   circular:  M*N^d x C*S^d*N^d
///   valid:     M*(N-k+1)^d x C*N^d   (S = 1 only)
///   same_zero: M*N^d x C*N^d         (S = 1 only)
struct LayerMatrix {
  Architecture arch;
  int N = 0;
  PaddingMode padding = PaddingMode::Circular;
  Eigen::MatrixXd matrix;

  long long rows() const { return matrix.rows(); }
  long long cols() const { return matrix.cols(); }
};

/// C(x): square circulant matrix with first column x; entry (i, j) equals
/// x[(i - j) mod n].
inline Eigen::MatrixXd circulant(const Eigen::VectorXd& x) {
  const long n = x.size();
  require(n >= 1, ErrorCode::EmptyVector, "circulant of an empty vector");
  Eigen::MatrixXd out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out(i, j) = x[(i - j + n) % n];
  return out;
}

/// Doubly-block circulant matrix of an n x n generator: block (I, J) is the
/// circulant of row (I - J) mod n.
inline Eigen::MatrixXd doubly_block_circulant(const Eigen::MatrixXd& x) {
  const long n = x.rows();
  require(n >= 1 && x.cols() == n, ErrorCode::ShapeMismatch,
          "doubly_block_circulant needs a square generator");
  Eigen::MatrixXd out(n * n, n * n);
  for (long bi = 0; bi < n; ++bi)
    for (long bj = 0; bj < n; ++bj) {
      const Eigen::VectorXd row = x.row((bi - bj + n) % n);
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
          out(bi * n + i, bj * n + j) = row[(i - j + n) % n];
    }
  return out;
}

/// Embeds a length-k kernel into a length-n circulant generator:
/// entry i equals h[r - i] for i in [-r, r] (indices mod n), 0 elsewhere,
/// so that circulant(embed_kernel(h, n)) applies the unstrided circular
/// convolution with h (machine-learning convention, no kernel flip).
inline Eigen::VectorXd embed_kernel(const Eigen::VectorXd& h, int n) {
  const int k = static_cast<int>(h.size());
  require(n >= k, ErrorCode::KernelTooLarge,
          "kernel extent " + std::to_string(k) + " exceeds signal size " +
              std::to_string(n));
  const int r = (k - 1) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = -r; i <= r; ++i) out[(i + n) % n] = h[r - i];
  return out;
}

/// 2D analogue of the 1D embedding.
inline Eigen::MatrixXd embed_kernel(const Eigen::MatrixXd& h, int n) {
  const int k = static_cast<int>(h.rows());
  require(h.cols() == k, ErrorCode::ShapeMismatch, "kernel must be square");
  require(n >= k, ErrorCode::KernelTooLarge,
          "kernel extent " + std::to_string(k) + " exceeds signal size " +
              std::to_string(n));
  const int r = (k - 1) / 2;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j)
      out((i + n) % n, (j + n) % n) = h(r - i, r - j);
  return out;
}

/// Stride-S sampling matrix: d=1 gives the N x SN matrix with
/// (S_N x)_m = x_{Sm}; d=2 gives the N^2 x S^2N^2 matrix acting the same
/// way on vectorized images. Rows are orthonormal: S_N S_N^T = Id.
inline Eigen::MatrixXd sampling_matrix(int N, int S, int d) {
  require(N >= 1 && S >= 1, ErrorCode::NonPositiveDim,
          "sampling_matrix needs N, S >= 1");
  require(d == 1 || d == 2, ErrorCode::BadDimensionality,
          "sampling_matrix needs d in {1,2}");
  const long n = S * static_cast<long>(N);
  if (d == 1) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, n);
    for (int i = 0; i < N; ++i) out(i, static_cast<long>(S) * i) = 1.0;
    return out;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<long>(N) * N, n * n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      out(static_cast<long>(i) * N + j,
          static_cast<long>(S) * i * n + static_cast<long>(S) * j) = 1.0;
  return out;
}

namespace detail {

inline int wrap(int v, int n) { return ((v % n) + n) % n; }

inline Eigen::VectorXd kernel_slice_1d(const KernelTensor& K, int m, int c) {
  Eigen::VectorXd h(K.arch.k);
  for (int i = 0; i < K.arch.k; ++i) h[i] = K.at(m, c, i);
  return h;
}

inline Eigen::MatrixXd kernel_slice_2d(const KernelTensor& K, int m, int c) {
  Eigen::MatrixXd h(K.arch.k, K.arch.k);
  for (int i = 0; i < K.arch.k; ++i)
    for (int j = 0; j < K.arch.k; ++j) h(i, j) = K.at(m, c, i, j);
  return h;
}

}  // namespace detail

/// Assembles the dense layer transform matrix block by block. The (m, c)
/// block realizes the single-channel convolution from input channel c to
/// output channel m. Vectorization is channel-major, then row-major within
/// a channel (shared convention across the whole library).
inline LayerMatrix build_layer_matrix(
    const KernelTensor& K, int N, PaddingMode padding,
    long long max_entries = kDefaultMaxDenseEntries) {
  K.check_shape();
  const Architecture& arch = K.arch;
  const int k = arch.k;
  const int S = arch.S;
  const int r = arch.radius();

  long long rows = 0, cols = 0;
  if (padding == PaddingMode::Circular) {
    require(static_cast<long long>(S) * N >= k, ErrorCode::SignalTooSmall,
            "circular padding needs SN >= k");
    rows = arch.M * arch.spatial_size(N);
    cols = arch.C * arch.stride_power() * arch.spatial_size(N);
  } else {
    require(S == 1, ErrorCode::UnsupportedStride,
            "valid/same_zero paddings are only defined for S = 1");
    require(N >= k, ErrorCode::SignalTooSmall,
            "valid/same_zero padding needs N >= k");
    const int out_extent = (padding == PaddingMode::Valid) ? N - k + 1 : N;
    rows = arch.M * arch.spatial_size(out_extent);
    cols = arch.C * arch.spatial_size(N);
  }
  require(rows * cols <= max_entries, ErrorCode::MatrixTooLarge,
          "dense layer matrix would hold " + std::to_string(rows * cols) +
              " entries (cap " + std::to_string(max_entries) + ")");

  LayerMatrix out;
  out.arch = arch;
  out.N = N;
  out.padding = padding;
  out.matrix = Eigen::MatrixXd::Zero(rows, cols);

  const int n = S * N;  // input extent per axis (circular)
  for (int m = 0; m < arch.M; ++m) {
    for (int c = 0; c < arch.C; ++c) {
      if (padding == PaddingMode::Circular) {
        if (arch.d == 1) {
          const Eigen::VectorXd emb =
              embed_kernel(detail::kernel_slice_1d(K, m, c), n);
          for (int i = 0; i < N; ++i)
            for (int j = 0; j < n; ++j)
              out.matrix(static_cast<long>(m) * N + i,
                         static_cast<long>(c) * n + j) =
                  emb[detail::wrap(S * i - j, n)];
        } else {
          const Eigen::MatrixXd emb =
              embed_kernel(detail::kernel_slice_2d(K, m, c), n);
          for (int i1 = 0; i1 < N; ++i1)
            for (int i2 = 0; i2 < N; ++i2) {
              const long row =
                  (static_cast<long>(m) * N + i1) * N + i2;
              for (int j1 = 0; j1 < n; ++j1) {
                const int w1 = detail::wrap(S * i1 - j1, n);
                for (int j2 = 0; j2 < n; ++j2)
                  out.matrix(row, (static_cast<long>(c) * n + j1) * n + j2) =
                      emb(w1, detail::wrap(S * i2 - j2, n));
              }
            }
        }
      } else {
        // Banded blocks. valid: rows indexed by fully interior windows,
        // entry (i, j) = h[j - i]; same_zero: square blocks with entry
        // (i, j) = h[j - i + r].
        const int off = (padding == PaddingMode::Valid) ? 0 : r;
        const int out_extent = (padding == PaddingMode::Valid) ? N - k + 1 : N;
        if (arch.d == 1) {
          for (int i = 0; i < out_extent; ++i)
            for (int a = 0; a < k; ++a) {
              const int j = i + a - off;
              if (j < 0 || j >= N) continue;
              out.matrix(static_cast<long>(m) * out_extent + i,
                         static_cast<long>(c) * N + j) = K.at(m, c, a);
            }
        } else {
          for (int i1 = 0; i1 < out_extent; ++i1)
            for (int i2 = 0; i2 < out_extent; ++i2) {
              const long row =
                  (static_cast<long>(m) * out_extent + i1) * out_extent + i2;
              for (int a = 0; a < k; ++a) {
                const int j1 = i1 + a - off;
                if (j1 < 0 || j1 >= N) continue;
                for (int b = 0; b < k; ++b) {
                  const int j2 = i2 + b - off;
                  if (j2 < 0 || j2 >= N) continue;
                  out.matrix(row, (static_cast<long>(c) * N + j1) * N + j2) =
                      K.at(m, c, a, b);
                }
              }
            }
        }
      }
    }
  }
  return out;
}

/// Input-space dimension of the circular layer operator, C*S^d*N^d.
inline long long layer_input_dim(const Architecture& arch, int N) {
  return arch.C * arch.stride_power() * arch.spatial_size(N);
}

/// Output-space dimension, M*N^d.
inline long long layer_output_dim(const Architecture& arch, int N) {
  return arch.M * arch.spatial_size(N);
}

/// Matrix-free application of the circular layer operator:
/// y = K x by direct strided circular convolution, without materializing
/// the dense matrix. Agrees with build_layer_matrix(..., Circular) up to
/// floating-point accumulation order.
inline void apply_layer_into(const KernelTensor& K, int N,
                             std::span<const double> x,
                             std::span<double> y) {
  K.check_shape();
  const Architecture& arch = K.arch;
  const int n = arch.S * N;
  require(n >= arch.k, ErrorCode::SignalTooSmall, "apply_layer needs SN >= k");
  require(static_cast<long long>(x.size()) == layer_input_dim(arch, N),
          ErrorCode::DimensionMismatch, "input vector has wrong length");
  require(static_cast<long long>(y.size()) == layer_output_dim(arch, N),
          ErrorCode::DimensionMismatch, "output vector has wrong length");
  const int k = arch.k;
  const int S = arch.S;
  const int r = arch.radius();

  if (arch.d == 1) {
    for (int m = 0; m < arch.M; ++m)
      for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int c = 0; c < arch.C; ++c) {
          const double* xc = x.data() + static_cast<std::size_t>(c) * n;
          for (int a = 0; a < k; ++a) {
            int p = S * i + a - r;
            if (p < 0) p += n;
            else if (p >= n) p -= n;
            acc += K.at(m, c, a) * xc[p];
          }
        }
        y[static_cast<std::size_t>(m) * N + i] = acc;
      }
    return;
  }

  for (int m = 0; m < arch.M; ++m)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        double acc = 0.0;
        for (int c = 0; c < arch.C; ++c) {
          const double* xc =
              x.data() + static_cast<std::size_t>(c) * n * n;
          for (int a = 0; a < k; ++a) {
            int p1 = S * i1 + a - r;
            if (p1 < 0) p1 += n;
            else if (p1 >= n) p1 -= n;
            const double* xrow = xc + static_cast<std::size_t>(p1) * n;
            for (int b = 0; b < k; ++b) {
              int p2 = S * i2 + b - r;
              if (p2 < 0) p2 += n;
              else if (p2 >= n) p2 -= n;
              acc += K.at(m, c, a, b) * xrow[p2];
            }
          }
        }
        y[(static_cast<std::size_t>(m) * N + i1) * N + i2] = acc;
      }
}

/// Matrix-free adjoint: z = K^T y.
inline void apply_layer_adjoint_into(const KernelTensor& K, int N,
                                     std::span<const double> y,
                                     std::span<double> z) {
  K.check_shape();
  const Architecture& arch = K.arch;
  const int n = arch.S * N;
  require(n >= arch.k, ErrorCode::SignalTooSmall,
          "apply_layer_adjoint needs SN >= k");
  require(static_cast<long long>(y.size()) == layer_output_dim(arch, N),
          ErrorCode::DimensionMismatch, "input vector has wrong length");
  require(static_cast<long long>(z.size()) == layer_input_dim(arch, N),
          ErrorCode::DimensionMismatch, "output vector has wrong length");
  const int k = arch.k;
  const int S = arch.S;
  const int r = arch.radius();
  std::fill(z.begin(), z.end(), 0.0);

  if (arch.d == 1) {
    for (int m = 0; m < arch.M; ++m)
      for (int i = 0; i < N; ++i) {
        const double v = y[static_cast<std::size_t>(m) * N + i];
        if (v == 0.0) continue;
        for (int c = 0; c < arch.C; ++c) {
          double* zc = z.data() + static_cast<std::size_t>(c) * n;
          for (int a = 0; a < k; ++a) {
            int p = S * i + a - r;
            if (p < 0) p += n;
            else if (p >= n) p -= n;
            zc[p] += K.at(m, c, a) * v;
          }
        }
      }
    return;
  }

  for (int m = 0; m < arch.M; ++m)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        const double v = y[(static_cast<std::size_t>(m) * N + i1) * N + i2];
        if (v == 0.0) continue;
        for (int c = 0; c < arch.C; ++c) {
          double* zc = z.data() + static_cast<std::size_t>(c) * n * n;
          for (int a = 0; a < k; ++a) {
            int p1 = S * i1 + a - r;
            if (p1 < 0) p1 += n;
            else if (p1 >= n) p1 -= n;
            double* zrow = zc + static_cast<std::size_t>(p1) * n;
            for (int b = 0; b < k; ++b) {
              int p2 = S * i2 + b - r;
              if (p2 < 0) p2 += n;
              else if (p2 >= n) p2 -= n;
              zrow[p2] += K.at(m, c, a, b) * v;
            }
          }
        }
      }
}

inline std::vector<double> apply_layer(const KernelTensor& K, int N,
                                       std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(layer_output_dim(K.arch, N)));
  apply_layer_into(K, N, x, y);
  return y;
}

inline std::vector<double> apply_layer_adjoint(const KernelTensor& K, int N,
                                               std::span<const double> y) {
  std::vector<double> z(static_cast<std::size_t>(layer_input_dim(K.arch, N)));
  apply_layer_adjoint_into(K, N, y, z);
  return z;
}

}  // namespace orthoconv
