#include <catch2/catch_amalgamated.hpp>

#include "orthoconv/architecture.hpp"

using namespace orthoconv;

namespace {

bool throws_code(ErrorCode expected, const Architecture& arch) {
  try {
    validate_architecture(arch);
  } catch (const Error& e) {
    return e.code() == expected;
  }
  return false;
}

}  // namespace

TEST_CASE("architecture validation", "[architecture]") {
  REQUIRE_NOTHROW(validate_architecture({2, 64, 3, 3, 1}));
  CHECK(throws_code(ErrorCode::EvenKernel, {2, 64, 3, 4, 1}));
  CHECK(throws_code(ErrorCode::NonPositiveDim, {1, 0, 1, 3, 1}));
  CHECK(throws_code(ErrorCode::NonPositiveDim, {2, 4, 2, 3, 0}));
  CHECK(throws_code(ErrorCode::BadDimensionality, {3, 4, 2, 3, 1}));
}

TEST_CASE("derived quantities", "[architecture]") {
  Architecture arch{2, 8, 4, 5, 2};
  CHECK(arch.radius() == 2);
  CHECK(arch.correlation_padding() == 4);  // floor(4/2)*2
  CHECK(arch.correlation_extent() == 5);
  CHECK(arch.stride_power() == 4);
  CHECK(arch.kernel_power() == 25);

  // P is a multiple of S and 0 <= P <= k-1 across a small grid.
  for (int k : {1, 3, 5, 7})
    for (int S = 1; S <= 6; ++S) {
      Architecture a{1, 1, 1, k, S};
      const int P = a.correlation_padding();
      CHECK(P % S == 0);
      CHECK(P >= 0);
      CHECK(P <= k - 1);
    }
}

TEST_CASE("case classification", "[architecture]") {
  CHECK(case_of({2, 128, 128, 3, 2}) == Case::RO);  // 128 < 512
  CHECK(case_of({2, 64, 3, 3, 1}) == Case::CO);     // 64 > 3
  CHECK(case_of({2, 4, 1, 3, 2}) == Case::Square);  // 4 = 4
  CHECK(case_of({1, 2, 1, 3, 1}) == Case::CO);      // d=1 compares M to C*S
}

TEST_CASE("existence conditions", "[architecture]") {
  // Strided pointwise skip-connection shape: never orthogonal.
  for (int C : {1, 2, 4, 7})
    CHECK_FALSE(exists_orthogonal({2, 2 * C, C, 1, 2}));

  CHECK(exists_orthogonal({2, 64, 3, 3, 1}));  // CO, S=1 <= k=3
  CHECK(exists_orthogonal({1, 5, 2, 3, 4}));   // RO, 5 <= C*k = 6
  CHECK_FALSE(exists_orthogonal({1, 7, 2, 3, 4}));  // RO, 7 > 6
  CHECK_FALSE(exists_orthogonal({2, 9, 1, 1, 3}));  // CO needs S <= k
}

TEST_CASE("existence is monotone in k", "[architecture][property]") {
  for (int d : {1, 2})
    for (int M = 1; M <= 8; ++M)
      for (int C = 1; C <= 6; ++C)
        for (int S : {1, 2, 3})
          for (int k : {1, 3, 5}) {
            Architecture lo{d, M, C, k, S};
            Architecture hi{d, M, C, k + 2, S};
            if (exists_orthogonal(lo)) CHECK(exists_orthogonal(hi));
          }
}
