#pragma once

#include <cstdint>
#include <string>

#include "orthoconv/errors.hpp"

namespace orthoconv {

/// Orthogonality regime of a layer, decided by comparing M with C*S^d.
/// RO layers are wide (row-orthogonality, K K^T = Id), CO layers are tall
/// (column-orthogonality, K^T K = Id), Square is the boundary where both
/// notions coincide.
enum class Case { RO, CO, Square };

enum class PaddingMode { Circular, Valid, SameZero };

inline const char* case_name(Case c) {
  switch (c) {
    case Case::RO: return "RO";
    case Case::CO: return "CO";
    case Case::Square: return "Square";
  }
  return "?";
}

inline const char* padding_name(PaddingMode p) {
  switch (p) {
    case PaddingMode::Circular: return "circular";
    case PaddingMode::Valid: return "valid";
    case PaddingMode::SameZero: return "same_zero";
  }
  return "?";
}

/// A convolutional layer architecture (d, M, C, k, S):
/// dimensionality, output channels, input channels, kernel extent per axis
/// (odd), stride. Channel size N is a separate runtime parameter: inputs
/// have extent S*N per axis, outputs extent N.
struct Architecture {
  int d = 2;  ///< 1 for signals, 2 for images
  int M = 1;  ///< output channels
  int C = 1;  ///< input channels
  int k = 1;  ///< kernel extent per axis, odd
  int S = 1;  ///< stride

  /// Half-extent r with k = 2r + 1.
  int radius() const { return (k - 1) / 2; }

  /// Zero-padding used by the self-correlation tensor: the largest
  /// multiple of S strictly below k.
  int correlation_padding() const { return ((k - 1) / S) * S; }

  /// Spatial extent per axis of the correlation tensor, 2P/S + 1.
  int correlation_extent() const { return 2 * (correlation_padding() / S) + 1; }

  /// S^d.
  long long stride_power() const {
    return d == 1 ? static_cast<long long>(S)
                  : static_cast<long long>(S) * S;
  }

  /// k^d.
  long long kernel_power() const {
    return d == 1 ? static_cast<long long>(k)
                  : static_cast<long long>(k) * k;
  }

  /// N^d for a given channel size.
  long long spatial_size(int N) const {
    return d == 1 ? static_cast<long long>(N)
                  : static_cast<long long>(N) * N;
  }

  /// Number of weights, M*C*k^d.
  long long weight_count() const {
    return static_cast<long long>(M) * C * kernel_power();
  }

  std::string describe() const {
    return "(d=" + std::to_string(d) + ", M=" + std::to_string(M) +
           ", C=" + std::to_string(C) + ", k=" + std::to_string(k) +
           ", S=" + std::to_string(S) + ")";
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Checks all architecture invariants; throws on the first violation.
inline void validate_architecture(const Architecture& arch) {
  require(arch.d == 1 || arch.d == 2, ErrorCode::BadDimensionality,
          "d must be 1 or 2, got " + std::to_string(arch.d));
  require(arch.M >= 1 && arch.C >= 1 && arch.k >= 1 && arch.S >= 1,
          ErrorCode::NonPositiveDim,
          "M, C, k, S must all be positive in " + arch.describe());
  require(arch.k % 2 == 1, ErrorCode::EvenKernel,
          "kernel extent must be odd, got k=" + std::to_string(arch.k));
}

inline Case case_of(const Architecture& arch) {
  validate_architecture(arch);
  long long boundary = static_cast<long long>(arch.C) * arch.stride_power();
  if (arch.M < boundary) return Case::RO;
  if (arch.M > boundary) return Case::CO;
  return Case::Square;
}

/// Existence of an orthogonal layer for this architecture (for any channel
/// size N with SN >= k): in the RO case this requires M <= C*k^d, in the
/// CO case S <= k. On the square boundary the two conditions coincide.
inline bool exists_orthogonal(const Architecture& arch) {
  switch (case_of(arch)) {
    case Case::RO:
      return arch.M <= static_cast<long long>(arch.C) * arch.kernel_power();
    case Case::CO:
    case Case::Square:
      return arch.S <= arch.k;
  }
  return false;
}

}  // namespace orthoconv
