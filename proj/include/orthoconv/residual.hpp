#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "orthoconv/architecture.hpp"
#include "orthoconv/convmat.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/lorth.hpp"
#include "orthoconv/spectral.hpp"

namespace orthoconv {

enum class SpectralMethod { Auto, Dense, MatrixFree };

/// Certification summary for one (kernel, N) pair. aip_epsilon always
/// equals err_s (the spectral residual is exactly the isometry defect).
struct ResidualReport {
  Architecture arch;
  int N = 0;
  Case layer_case = Case::RO;
  double lorth_value = 0.0;  ///< clamped at zero
  double err_f = 0.0;
  double err_s = 0.0;
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double frobenius_identity_gap = 0.0;
  bool sandwich_satisfied = false;
  double aip_epsilon = 0.0;
};

namespace detail {

/// Case-appropriate orthogonality residual, dense: K K^T - Id in the
/// RO/Square case, K^T K - Id in the CO case. The Gram always lives on the
/// smaller side of the matrix.
inline Eigen::MatrixXd orthogonality_residual(
    const KernelTensor& K, int N,
    long long max_entries = kDefaultMaxDenseEntries) {
  LayerMatrix layer = build_layer_matrix(K, N, PaddingMode::Circular,
                                         max_entries);
  const bool row_side = case_of(K.arch) != Case::CO;
  Eigen::MatrixXd gram = row_side
                             ? (layer.matrix * layer.matrix.transpose()).eval()
                             : (layer.matrix.transpose() * layer.matrix).eval();
  gram.diagonal().array() -= 1.0;
  return gram;
}

}  // namespace detail

/// Frobenius norm of the case-appropriate orthogonality residual.
inline double err_frobenius(const KernelTensor& K, int N,
                            long long max_entries = kDefaultMaxDenseEntries) {
  return detail::orthogonality_residual(K, N, max_entries).norm();
}

/// Spectral norm of the orthogonality residual. Dense path is a symmetric
/// eigendecomposition; matrix-free path reads the residual spectral norm
/// off the extremal singular values, max(|sigma_max^2 - 1|, |sigma_min^2 - 1|).
inline double err_spectral(const KernelTensor& K, int N,
                           SpectralMethod method = SpectralMethod::Auto,
                           long long max_entries = kDefaultMaxDenseEntries,
                           std::uint64_t seed = 0) {
  if (method == SpectralMethod::Auto) {
    const long long dense_cost =
        layer_output_dim(K.arch, N) * layer_input_dim(K.arch, N);
    method = dense_cost <= max_entries ? SpectralMethod::Dense
                                       : SpectralMethod::MatrixFree;
  }
  if (method == SpectralMethod::Dense) {
    Eigen::MatrixXd residual = detail::orthogonality_residual(K, N, max_entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(
        residual, Eigen::EigenvaluesOnly);
    const auto& lambda = eigensolver.eigenvalues();
    return std::max(std::abs(lambda[0]), std::abs(lambda[lambda.size() - 1]));
  }
  SingularSpectrum extremes =
      extremal_singular_values(K, N, 1e-12, 100000, seed);
  return std::max(std::abs(extremes.sigma_max * extremes.sigma_max - 1.0),
                  std::abs(extremes.sigma_min * extremes.sigma_min - 1.0));
}

/// Relative gap in the identity err_f^2 = N^d * lorth, which holds exactly
/// whenever SN >= 2k - 1. Contract: gap <= 1e-9.
inline double check_frobenius_identity(
    const KernelTensor& K, int N,
    long long max_entries = kDefaultMaxDenseEntries) {
  const Architecture& arch = K.arch;
  require(static_cast<long long>(arch.S) * N >= 2 * arch.k - 1,
          ErrorCode::SignalTooSmall,
          "the Frobenius identity requires SN >= 2k - 1");
  const double err = err_frobenius(K, N, max_entries);
  const double rhs = static_cast<double>(arch.spatial_size(N)) * lorth(K);
  return std::abs(err * err - rhs) / std::max(1.0, rhs);
}

/// Architecture-only constants sandwiching err_s^2 between multiples of
/// lorth: alpha_prime * L <= err_s^2 <= alpha * L. alpha_prime is
/// 1/min(M, C*S^d); alpha is (2*floor((k-1)/S)+1)^d * M in the RO case and
/// (2k-1)^d * C in the CO case; the square boundary takes the smaller of
/// the two alphas.
inline std::pair<double, double> spectral_bounds(const Architecture& arch) {
  validate_architecture(arch);
  const double alpha_prime =
      1.0 / static_cast<double>(std::min<long long>(
                arch.M, arch.C * arch.stride_power()));
  const double bracket = 2.0 * ((arch.k - 1) / arch.S) + 1.0;
  const double alpha_ro =
      (arch.d == 1 ? bracket : bracket * bracket) * arch.M;
  const double width = 2.0 * arch.k - 1.0;
  const double alpha_co = (arch.d == 1 ? width : width * width) * arch.C;
  double alpha = 0.0;
  switch (case_of(arch)) {
    case Case::RO: alpha = alpha_ro; break;
    case Case::CO: alpha = alpha_co; break;
    case Case::Square: alpha = std::min(alpha_ro, alpha_co); break;
  }
  return {alpha_prime, alpha};
}

/// Verifies the spectral sandwich at tolerance 1e-9 * (1 + alpha * L).
inline bool check_spectral_sandwich(
    const KernelTensor& K, int N,
    long long max_entries = kDefaultMaxDenseEntries) {
  const Architecture& arch = K.arch;
  require(static_cast<long long>(arch.S) * N >= 2 * arch.k - 1,
          ErrorCode::SignalTooSmall,
          "the spectral sandwich requires SN >= 2k - 1");
  const double L = lorth(K);
  const auto [alpha_prime, alpha] = spectral_bounds(arch);
  const double err = err_spectral(K, N, SpectralMethod::Auto, max_entries);
  const double tol = 1e-9 * (1.0 + alpha * L);
  return alpha_prime * L - tol <= err * err && err * err <= alpha * L + tol;
}

struct AipResult {
  double epsilon = 0.0;          ///< err_s, the certified isometry defect
  double worst_violation = 0.0;  ///< largest sampled constraint deficit
};

/// Samples random unit vectors in the input and output spaces and verifies
/// the approximate-isometry inequalities with epsilon = err_s:
///   RO:  |Kx|^2 <= (1+e),  (1-e) <= |K^T y|^2 <= (1+e)
///   CO:  (1-e) <= |Kx|^2 <= (1+e),  |K^T y|^2 <= (1+e)
/// The square boundary checks both sets. Returns the worst deficit over
/// all sampled constraints (0 when everything holds).
inline AipResult aip_check(const KernelTensor& K, int N, int sample_count,
                           std::uint64_t seed,
                           long long max_entries = kDefaultMaxDenseEntries) {
  const Architecture& arch = K.arch;
  require(static_cast<long long>(arch.S) * N >= arch.k,
          ErrorCode::SignalTooSmall, "aip_check needs SN >= k");
  AipResult result;
  result.epsilon = err_spectral(K, N, SpectralMethod::Auto, max_entries, seed);
  const double upper = 1.0 + result.epsilon;
  const double lower = 1.0 - result.epsilon;
  const Case layer_case = case_of(arch);

  SplitMix64 gen(derive_seed(seed, {0x616970ull}));
  const long long in_dim = layer_input_dim(arch, N);
  const long long out_dim = layer_output_dim(arch, N);
  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    std::vector<double> x = gen.next_unit_vector(static_cast<int>(in_dim));
    std::vector<double> y = gen.next_unit_vector(static_cast<int>(out_dim));
    double fwd_sq = 0.0;
    for (double v : apply_layer(K, N, x)) fwd_sq += v * v;
    double adj_sq = 0.0;
    for (double v : apply_layer_adjoint(K, N, y)) adj_sq += v * v;

    // ||x|| = ||y|| = 1 by construction.
    worst = std::max(worst, fwd_sq - upper);
    worst = std::max(worst, adj_sq - upper);
    if (layer_case != Case::CO) worst = std::max(worst, lower - adj_sq);
    if (layer_case != Case::RO) worst = std::max(worst, lower - fwd_sq);
  }
  result.worst_violation = std::max(0.0, worst);
  return result;
}

/// Quantitative certificate that no valid-padding CO layer is orthogonal:
/// the squared distances of the three pinned column norms (first entry,
/// last entry, total energy of the first input channel's kernels) from 1
/// sum to at least 1/3 for every kernel tensor, because total energy
/// dominates the two endpoint energies.
inline double valid_co_obstruction(const KernelTensor& K, PaddingMode padding,
                                   int N) {
  K.check_shape();
  const Architecture& arch = K.arch;
  require(padding == PaddingMode::Valid, ErrorCode::WrongPadding,
          "obstruction certificate applies to valid padding");
  require(case_of(arch) != Case::RO, ErrorCode::WrongCase,
          "obstruction certificate applies to the CO/Square case");
  require(arch.S == 1, ErrorCode::UnsupportedStride,
          "valid padding analysis is unstrided");
  require(N >= 2 * arch.k - 1, ErrorCode::SignalTooSmall,
          "obstruction certificate needs N >= 2k - 1");
  // With k = 1 the three pinned columns collapse onto one another and the
  // certificate is vacuous (pointwise layers can be orthogonal).
  require(arch.k >= 3, ErrorCode::KernelTooSmall,
          "obstruction certificate needs k >= 3");

  const int last = arch.k - 1;
  double s_first = 0.0, s_last = 0.0, s_total = 0.0;
  for (int m = 0; m < arch.M; ++m) {
    if (arch.d == 1) {
      s_first += K.at(m, 0, 0) * K.at(m, 0, 0);
      s_last += K.at(m, 0, last) * K.at(m, 0, last);
      for (int i = 0; i < arch.k; ++i) s_total += K.at(m, 0, i) * K.at(m, 0, i);
    } else {
      s_first += K.at(m, 0, 0, 0) * K.at(m, 0, 0, 0);
      s_last += K.at(m, 0, last, last) * K.at(m, 0, last, last);
      for (int i = 0; i < arch.k; ++i)
        for (int j = 0; j < arch.k; ++j)
          s_total += K.at(m, 0, i, j) * K.at(m, 0, i, j);
    }
  }
  const double g1 = s_first - 1.0, g2 = s_last - 1.0, g3 = s_total - 1.0;
  return g1 * g1 + g2 * g2 + g3 * g3;
}

/// Off-center energy of a kernel tensor: the total squared mass outside the
/// central position of each (m, c) slice. An orthogonal same-zero-padding
/// layer forces every slice onto the center Dirac, so a small same-padding
/// residual must come with small off-center energy; observing residual
/// <= tol together with off-center energy > 10*tol would break that
/// structure and raises ContractViolation.
inline double same_padding_structure(
    const KernelTensor& K, PaddingMode padding, int N, double tol,
    long long max_entries = kDefaultMaxDenseEntries) {
  K.check_shape();
  const Architecture& arch = K.arch;
  require(padding == PaddingMode::SameZero, ErrorCode::WrongPadding,
          "structure check applies to same-zero padding");
  require(arch.S == 1, ErrorCode::UnsupportedStride,
          "same-zero padding analysis is unstrided");
  require(N >= arch.k, ErrorCode::SignalTooSmall, "needs N >= k");

  const int r = arch.radius();
  double off_center = 0.0;
  for (int m = 0; m < arch.M; ++m)
    for (int c = 0; c < arch.C; ++c) {
      if (arch.d == 1) {
        for (int i = 0; i < arch.k; ++i)
          if (i != r) off_center += K.at(m, c, i) * K.at(m, c, i);
      } else {
        for (int i = 0; i < arch.k; ++i)
          for (int j = 0; j < arch.k; ++j)
            if (i != r || j != r)
              off_center += K.at(m, c, i, j) * K.at(m, c, i, j);
      }
    }

  if (tol > 0.0 && tol <= 1e-8) {
    LayerMatrix layer =
        build_layer_matrix(K, N, PaddingMode::SameZero, max_entries);
    const bool row_side = arch.M <= arch.C;
    Eigen::MatrixXd gram =
        row_side ? (layer.matrix * layer.matrix.transpose()).eval()
                 : (layer.matrix.transpose() * layer.matrix).eval();
    gram.diagonal().array() -= 1.0;
    const double residual = gram.norm();
    require(!(residual <= tol && off_center > 10.0 * tol),
            ErrorCode::ContractViolation,
            "near-orthogonal same-zero layer with off-center kernel mass");
  }
  return off_center;
}

/// Rescales a Frobenius residual measured at channel size N to channel
/// size N': errF' = errF * sqrt((N'/N)^d).
inline double scale_err_frobenius(double err_f, int N, int N_prime, int d) {
  require(err_f >= 0.0, ErrorCode::NonPositiveDim, "errF must be >= 0");
  require(N >= 1 && N_prime >= 1, ErrorCode::NonPositiveDim,
          "channel sizes must be positive");
  require(d == 1 || d == 2, ErrorCode::BadDimensionality, "d must be 1 or 2");
  const double ratio = static_cast<double>(N_prime) / N;
  return err_f * std::sqrt(d == 1 ? ratio : ratio * ratio);
}

/// Full certification bundle at one channel size (requires SN >= 2k - 1 so
/// the theorem checks are in scope).
inline ResidualReport residual_report(
    const KernelTensor& K, int N,
    long long max_entries = kDefaultMaxDenseEntries) {
  const Architecture& arch = K.arch;
  require(static_cast<long long>(arch.S) * N >= 2 * arch.k - 1,
          ErrorCode::SignalTooSmall, "residual report requires SN >= 2k - 1");
  ResidualReport report;
  report.arch = arch;
  report.N = N;
  report.layer_case = case_of(arch);
  report.lorth_value = std::max(0.0, lorth(K));
  report.err_f = err_frobenius(K, N, max_entries);
  report.err_s = err_spectral(K, N, SpectralMethod::Auto, max_entries);
  const auto [alpha_prime, alpha] = spectral_bounds(arch);
  report.alpha_prime = alpha_prime;
  report.alpha = alpha;
  report.frobenius_identity_gap = check_frobenius_identity(K, N, max_entries);
  report.sandwich_satisfied = check_spectral_sandwich(K, N, max_entries);
  report.aip_epsilon = report.err_s;
  return report;
}

}  // namespace orthoconv
