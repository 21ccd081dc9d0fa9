#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "orthoconv/architecture.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/rng.hpp"

namespace orthoconv {

/// The weight tensor of a layer: shape M x C x k (d=1) or M x C x k x k
/// (d=2), stored flat in (m, c, i[, j]) row-major order.
struct KernelTensor {
  Architecture arch;
  std::vector<double> data;

  KernelTensor() = default;

  explicit KernelTensor(const Architecture& a)
      : arch(a), data(static_cast<std::size_t>(a.weight_count()), 0.0) {
    validate_architecture(a);
  }

  double& at(int m, int c, int i) {
    return data[(static_cast<std::size_t>(m) * arch.C + c) * arch.k + i];
  }
  double at(int m, int c, int i) const {
    return data[(static_cast<std::size_t>(m) * arch.C + c) * arch.k + i];
  }
  double& at(int m, int c, int i, int j) {
    return data[((static_cast<std::size_t>(m) * arch.C + c) * arch.k + i) *
                    arch.k +
                j];
  }
  double at(int m, int c, int i, int j) const {
    return data[((static_cast<std::size_t>(m) * arch.C + c) * arch.k + i) *
                    arch.k +
                j];
  }

  /// Start of the (m, c) kernel slice in the flat array.
  std::size_t slice_offset(int m, int c) const {
    return (static_cast<std::size_t>(m) * arch.C + c) * arch.kernel_power();
  }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void check_shape() const {
    validate_architecture(arch);
    require(data.size() == static_cast<std::size_t>(arch.weight_count()),
            ErrorCode::ShapeMismatch,
            "kernel data length " + std::to_string(data.size()) +
                " does not match " + arch.describe());
  }
};

/// Glorot/Xavier uniform initialization: entries i.i.d. uniform on [-a, a]
/// with a = sqrt(6 / (fan_in + fan_out)), fan_in = C*k^d, fan_out = M*k^d.
/// Deterministic for a fixed seed.
inline KernelTensor glorot_uniform_init(const Architecture& arch,
                                        std::uint64_t seed) {
  validate_architecture(arch);
  KernelTensor kernel(arch);
  double fan_in = static_cast<double>(arch.C) * arch.kernel_power();
  double fan_out = static_cast<double>(arch.M) * arch.kernel_power();
  double a = std::sqrt(6.0 / (fan_in + fan_out));
  SplitMix64 gen(derive_seed(seed, {0x676c6f726f74ull}));
  for (double& w : kernel.data) w = gen.next_uniform_symmetric(a);
  return kernel;
}

namespace detail {

// Basis-kernel index (i, j) for flat index l over a g x g grid, row-major:
// l -> (l % g, l / g). Enumerating over the min(k, S) grid (rather than the
// full k grid) is what keeps distinct basis kernels on disjoint stride
// lattices; wider enumerations lose row orthogonality whenever k > S.
inline void basis_pair(int l, int g, int& i, int& j) {
  i = l % g;
  j = l / g;
}

}  // namespace detail

/// Builds an explicitly orthogonal kernel tensor for an eligible
/// architecture. The construction places one canonical basis kernel per
/// group of C output channels:
///   - RO/Square: basis indices drawn from the min(k,S) grid, one nonzero
///     entry per populated (m, c) slice, block-diagonal across channels.
///   - CO: all S^d shifted Dirac kernels appear once per input channel in
///     the first C*S^d output channels; remaining output channels are zero.
/// The resulting layer matrix is exactly orthogonal (circular padding, any
/// N with SN >= k).
inline KernelTensor construct_orthogonal(const Architecture& arch) {
  validate_architecture(arch);
  require(exists_orthogonal(arch), ErrorCode::NoOrthogonalLayer,
          "no orthogonal layer exists for " + arch.describe());
  KernelTensor kernel(arch);
  Case layer_case = case_of(arch);

  // Side of the basis grid: min(k,S) in the RO/Square case, S in the CO
  // case. On the square boundary the two coincide (S <= k there).
  int grid = (layer_case == Case::CO) ? arch.S : std::min(arch.k, arch.S);
  long long basis_count =
      arch.d == 1 ? grid : static_cast<long long>(grid) * grid;
  long long populated =
      (layer_case == Case::CO)
          ? static_cast<long long>(arch.C) * arch.stride_power()
          : arch.M;

  for (long long l = 0; l < basis_count; ++l) {
    for (int j = 1; j <= arch.C; ++j) {
      long long channel = l * arch.C + j;  // 1-based output channel
      if (channel > populated) break;
      int m = static_cast<int>(channel - 1);
      int c = j - 1;
      if (arch.d == 1) {
        kernel.at(m, c, static_cast<int>(l)) = 1.0;
      } else {
        int bi = 0, bj = 0;
        detail::basis_pair(static_cast<int>(l), grid, bi, bj);
        kernel.at(m, c, bi, bj) = 1.0;
      }
    }
  }
  return kernel;
}

}  // namespace orthoconv
