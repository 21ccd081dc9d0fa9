#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"

namespace orthoconv {

/// Self-correlation tensor CONV(K, K, padding zero = P, stride = S) with
/// P = floor((k-1)/S)*S: shape M x M x e (d=1) or M x M x e x e (d=2),
/// e = 2P/S + 1. Entry (m, l) is the channel-summed strided cross
/// correlation of the kernels of output channels m and l.
struct CorrelationTensor {
  Architecture arch;
  int extent = 1;  ///< spatial extent per axis, 2P/S + 1
  std::vector<double> data;

  double& at(int m, int l, int u) {
    return data[(static_cast<std::size_t>(m) * arch.M + l) * extent + u];
  }
  double at(int m, int l, int u) const {
    return data[(static_cast<std::size_t>(m) * arch.M + l) * extent + u];
  }
  double& at(int m, int l, int u, int v) {
    return data[((static_cast<std::size_t>(m) * arch.M + l) * extent + u) *
                    extent +
                v];
  }
  double at(int m, int l, int u, int v) const {
    return data[((static_cast<std::size_t>(m) * arch.M + l) * extent + u) *
                    extent +
                v];
  }
};

/// Strided cross-correlation of two 1D kernels of equal extent against a
/// zero-padding of the second by P on each side (no kernel flip):
/// entry i equals sum_{i'} h[i'] * gbar[i' + S*i].
inline Eigen::VectorXd kernel_cross_correlation(const Eigen::VectorXd& h,
                                                const Eigen::VectorXd& g,
                                                int P, int S) {
  require(h.size() == g.size(), ErrorCode::ShapeMismatch,
          "kernels must have equal extent");
  require(P >= 0 && S >= 1, ErrorCode::NonPositiveDim,
          "need P >= 0 and S >= 1");
  const int k = static_cast<int>(h.size());
  const int extent = (2 * P) / S + 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(extent);
  for (int i = 0; i < extent; ++i) {
    double acc = 0.0;
    for (int ip = 0; ip < k; ++ip) {
      const int gi = ip + S * i - P;  // index into g after removing the pad
      if (gi >= 0 && gi < k) acc += h[ip] * g[gi];
    }
    out[i] = acc;
  }
  return out;
}

/// 2D analogue; output is (2P/S + 1) x (2P/S + 1).
inline Eigen::MatrixXd kernel_cross_correlation(const Eigen::MatrixXd& h,
                                                const Eigen::MatrixXd& g,
                                                int P, int S) {
  require(h.rows() == g.rows() && h.cols() == g.cols() && h.rows() == h.cols(),
          ErrorCode::ShapeMismatch, "kernels must be square of equal extent");
  require(P >= 0 && S >= 1, ErrorCode::NonPositiveDim,
          "need P >= 0 and S >= 1");
  const int k = static_cast<int>(h.rows());
  const int extent = (2 * P) / S + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(extent, extent);
  for (int i = 0; i < extent; ++i)
    for (int j = 0; j < extent; ++j) {
      double acc = 0.0;
      for (int ip = 0; ip < k; ++ip) {
        const int gi = ip + S * i - P;
        if (gi < 0 || gi >= k) continue;
        for (int jp = 0; jp < k; ++jp) {
          const int gj = jp + S * j - P;
          if (gj >= 0 && gj < k) acc += h(ip, jp) * g(gi, gj);
        }
      }
      out(i, j) = acc;
    }
  return out;
}

/// CONV(K, K, padding zero = P, stride = S) with the penalty's canonical
/// P. Channel summation runs c-ascending so results do not depend on any
/// parallel schedule.
inline CorrelationTensor correlation_tensor(const KernelTensor& K) {
  K.check_shape();
  const Architecture& arch = K.arch;
  const int P = arch.correlation_padding();
  const int S = arch.S;
  const int k = arch.k;
  const int extent = arch.correlation_extent();

  CorrelationTensor T;
  T.arch = arch;
  T.extent = extent;
  const std::size_t cells = static_cast<std::size_t>(arch.M) * arch.M *
                            (arch.d == 1 ? extent : extent * extent);
  T.data.assign(cells, 0.0);

  if (arch.d == 1) {
    for (int m = 0; m < arch.M; ++m)
      for (int l = 0; l < arch.M; ++l)
        for (int u = 0; u < extent; ++u) {
          double acc = 0.0;
          for (int c = 0; c < arch.C; ++c) {
            for (int ip = 0; ip < k; ++ip) {
              const int gi = ip + S * u - P;
              if (gi >= 0 && gi < k) acc += K.at(m, c, ip) * K.at(l, c, gi);
            }
          }
          T.at(m, l, u) = acc;
        }
    return T;
  }

  for (int m = 0; m < arch.M; ++m)
    for (int l = 0; l < arch.M; ++l)
      for (int u = 0; u < extent; ++u)
        for (int v = 0; v < extent; ++v) {
          double acc = 0.0;
          for (int c = 0; c < arch.C; ++c) {
            for (int ip = 0; ip < k; ++ip) {
              const int gi = ip + S * u - P;
              if (gi < 0 || gi >= k) continue;
              for (int jp = 0; jp < k; ++jp) {
                const int gj = jp + S * v - P;
                if (gj >= 0 && gj < k)
                  acc += K.at(m, c, ip, jp) * K.at(l, c, gi, gj);
              }
            }
          }
          T.at(m, l, u, v) = acc;
        }
  return T;
}

/// Squared Frobenius distance between the correlation tensor and its
/// orthogonality target (zero everywhere except an M x M identity at the
/// central spatial position); in the CO case the constant M - C*S^d is
/// subtracted so that zero is attained exactly at orthogonal layers in
/// both cases. The raw value may dip a hair below zero in the CO case;
/// reports clamp at zero, the function returns the raw value.
inline double lorth(const KernelTensor& K) {
  const Architecture& arch = K.arch;
  CorrelationTensor T = correlation_tensor(K);
  const int center = arch.correlation_padding() / arch.S;

  double total = 0.0;
  if (arch.d == 1) {
    for (int m = 0; m < arch.M; ++m)
      for (int l = 0; l < arch.M; ++l)
        for (int u = 0; u < T.extent; ++u) {
          const double target = (m == l && u == center) ? 1.0 : 0.0;
          const double diff = T.at(m, l, u) - target;
          total += diff * diff;
        }
  } else {
    for (int m = 0; m < arch.M; ++m)
      for (int l = 0; l < arch.M; ++l)
        for (int u = 0; u < T.extent; ++u)
          for (int v = 0; v < T.extent; ++v) {
            const double target =
                (m == l && u == center && v == center) ? 1.0 : 0.0;
            const double diff = T.at(m, l, u, v) - target;
            total += diff * diff;
          }
  }
  if (case_of(arch) == Case::CO)
    total -= static_cast<double>(arch.M) -
             static_cast<double>(arch.C) * arch.stride_power();
  return total;
}

/// Closed-form gradient of lorth: the penalty is quadratic in the
/// correlation residual R, and the chain rule collapses to correlating R
/// back against the kernel, grad = 4 * (R star K). The CO constant does
/// not contribute. Matches central finite differences to the library-wide
/// 1e-5 relative contract.
inline KernelTensor lorth_gradient(const KernelTensor& K) {
  const Architecture& arch = K.arch;
  CorrelationTensor T = correlation_tensor(K);
  const int P = arch.correlation_padding();
  const int S = arch.S;
  const int k = arch.k;
  const int extent = T.extent;
  const int center = P / S;

  KernelTensor grad(arch);
  if (arch.d == 1) {
    for (int a = 0; a < arch.M; ++a)
      for (int c = 0; c < arch.C; ++c)
        for (int p = 0; p < k; ++p) {
          double acc = 0.0;
          for (int l = 0; l < arch.M; ++l)
            for (int u = 0; u < extent; ++u) {
              const int q = p + S * u - P;
              if (q < 0 || q >= k) continue;
              const double target = (a == l && u == center) ? 1.0 : 0.0;
              acc += (T.at(a, l, u) - target) * K.at(l, c, q);
            }
          grad.at(a, c, p) = 4.0 * acc;
        }
    return grad;
  }

  for (int a = 0; a < arch.M; ++a)
    for (int c = 0; c < arch.C; ++c)
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
          double acc = 0.0;
          for (int l = 0; l < arch.M; ++l)
            for (int u = 0; u < extent; ++u) {
              const int p2 = p + S * u - P;
              if (p2 < 0 || p2 >= k) continue;
              for (int v = 0; v < extent; ++v) {
                const int q2 = q + S * v - P;
                if (q2 < 0 || q2 >= k) continue;
                const double target =
                    (a == l && u == center && v == center) ? 1.0 : 0.0;
                acc += (T.at(a, l, u, v) - target) * K.at(l, c, p2, q2);
              }
            }
          grad.at(a, c, p, q) = 4.0 * acc;
        }
  return grad;
}

}  // namespace orthoconv
