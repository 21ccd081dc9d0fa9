#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "orthoconv/convmat.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/residual.hpp"
#include "oracles.hpp"

using namespace orthoconv;

TEST_CASE("glorot init is deterministic and bounded", "[kernel]") {
  Architecture arch{2, 16, 16, 3, 1};
  KernelTensor a = glorot_uniform_init(arch, 1234);
  KernelTensor b = glorot_uniform_init(arch, 1234);
  REQUIRE(a.data == b.data);  // bitwise

  KernelTensor c = glorot_uniform_init(arch, 1235);
  CHECK(a.data != c.data);

  const double bound = std::sqrt(6.0 / (16.0 * 9 + 16.0 * 9));
  for (double w : a.data) CHECK(std::abs(w) <= bound);
}

TEST_CASE("glorot entries have near-zero empirical mean", "[kernel]") {
  // 10404 draws in a single tensor; 3-sigma band for the sample mean of
  // uniform[-a, a] with sigma = 2a/sqrt(12).
  Architecture arch{2, 34, 34, 3, 1};
  KernelTensor K = glorot_uniform_init(arch, 99);
  const std::size_t n = 10000;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += K.data[i];
  mean /= static_cast<double>(n);
  const double a = std::sqrt(6.0 / ((34.0 + 34.0) * 9));
  const double band = 3.0 * (2.0 * a) / std::sqrt(12.0 * n);
  CHECK(std::abs(mean) <= band);
}

TEST_CASE("orthogonal construction entry patterns", "[kernel]") {
  SECTION("d=1 block diagonal") {
    KernelTensor K = construct_orthogonal({1, 2, 2, 3, 1});
    CHECK(K.at(0, 0, 0) == 1.0);
    CHECK(K.at(1, 1, 0) == 1.0);
    double total = 0.0;
    for (double v : K.data) total += std::abs(v);
    CHECK(total == 2.0);
  }
  SECTION("identity layer") {
    KernelTensor K = construct_orthogonal({1, 1, 1, 1, 1});
    REQUIRE(K.data.size() == 1);
    CHECK(K.data[0] == 1.0);
    LayerMatrix lm = build_layer_matrix(K, 5, PaddingMode::Circular);
    CHECK((lm.matrix - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
  }
  SECTION("d=2 square stride grid") {
    // Shifted Dirac e_{z,z'} on output channel z'S + z + 1.
    KernelTensor K = construct_orthogonal({2, 4, 1, 3, 2});
    CHECK(K.at(0, 0, 0, 0) == 1.0);
    CHECK(K.at(1, 0, 1, 0) == 1.0);
    CHECK(K.at(2, 0, 0, 1) == 1.0);
    CHECK(K.at(3, 0, 1, 1) == 1.0);
    LayerMatrix lm = build_layer_matrix(K, 4, PaddingMode::Circular);
    Eigen::MatrixXd gram = lm.matrix.transpose() * lm.matrix;
    CHECK((gram - Eigen::MatrixXd::Identity(64, 64)).norm() <= 1e-12);
  }
  SECTION("CO zero rows past C*S^d") {
    KernelTensor K = construct_orthogonal({1, 5, 1, 3, 2});
    for (int m = 2; m < 5; ++m)
      for (int i = 0; i < 3; ++i) CHECK(K.at(m, 0, i) == 0.0);
  }
}

TEST_CASE("construction sparsity invariant", "[kernel][property]") {
  for (int d : {1, 2})
    for (int M = 1; M <= 6; ++M)
      for (int C = 1; C <= 4; ++C)
        for (int S : {1, 2, 3})
          for (int k : {1, 3, 5}) {
            Architecture arch{d, M, C, k, S};
            if (!exists_orthogonal(arch)) continue;
            KernelTensor K = construct_orthogonal(arch);
            for (int m = 0; m < M; ++m)
              for (int c = 0; c < C; ++c) {
                int nonzero = 0;
                const std::size_t off = K.slice_offset(m, c);
                for (long long t = 0; t < arch.kernel_power(); ++t)
                  if (K.data[off + static_cast<std::size_t>(t)] != 0.0)
                    ++nonzero;
                CHECK(nonzero <= 1);
              }
          }
}

TEST_CASE("constructed layers are orthogonal at multiple sizes",
          "[kernel][property]") {
  for (int d : {1, 2})
    for (int M = 1; M <= 5; ++M)
      for (int C = 1; C <= 3; ++C)
        for (int S : {1, 2, 4})
          for (int k : {1, 3, 5}) {
            Architecture arch{d, M, C, k, S};
            if (!exists_orthogonal(arch)) continue;
            KernelTensor K = construct_orthogonal(arch);
            const int n_lo = (k + S - 1) / S;
            for (int N : {n_lo, n_lo + 2}) {
              Eigen::MatrixXd dense =
                  oracles::naive_layer_matrix(K, N, PaddingMode::Circular);
              const bool row_side = case_of(arch) != Case::CO;
              Eigen::MatrixXd gram = row_side
                                         ? (dense * dense.transpose()).eval()
                                         : (dense.transpose() * dense).eval();
              gram.diagonal().array() -= 1.0;
              INFO(arch.describe() << " N=" << N);
              CHECK(gram.norm() <= 1e-10);
            }
          }
}

TEST_CASE("construct_orthogonal rejects infeasible architectures",
          "[kernel]") {
  CHECK_THROWS_AS(construct_orthogonal({2, 2, 1, 1, 2}), Error);
  try {
    construct_orthogonal({2, 2, 1, 1, 2});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoOrthogonalLayer);
  }
}

TEST_CASE("rank deficiency when the RO condition fails",
          "[kernel][property]") {
  // M > C*k^d in the RO case: at least (M - C*k^d)*N^d singular values of
  // the layer matrix vanish for every kernel.
  SplitMix64 gen(5);
  for (auto [d, M, C, k, S] :
       {std::tuple{1, 5, 1, 3, 5}, {1, 4, 1, 1, 4}, {2, 6, 1, 1, 3}}) {
    Architecture arch{d, M, C, k, S};
    REQUIRE(case_of(arch) != Case::CO);
    REQUIRE_FALSE(exists_orthogonal(arch));
    KernelTensor K(arch);
    for (double& w : K.data) w = gen.next_normal();
    const int N = 2;
    Eigen::MatrixXd dense =
        oracles::naive_layer_matrix(K, N, PaddingMode::Circular);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    const auto& sv = svd.singularValues();
    long zeros = 0;
    for (long i = 0; i < sv.size(); ++i)
      if (sv[i] < 1e-10) ++zeros;
    const long long expected =
        (M - C * arch.kernel_power()) * arch.spatial_size(N);
    CHECK(zeros >= expected);
  }
}
