#include <doctest.h>

#include <cmath>

#include "relfeat/rng.hpp"

using namespace relfeat;

TEST_SUITE("rng") {

TEST_CASE("same key reproduces the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams differ by label and index") {
  const auto s1 = derive_seed(7, "gibbs", 0);
  const auto s2 = derive_seed(7, "gibbs", 1);
  const auto s3 = derive_seed(7, "kmeans", 0);
  CHECK(s1 != s2);
  CHECK(s1 != s3);
  CHECK(derive_seed(7, "gibbs", 0) == s1);
}

TEST_CASE("uniform stays in (0, 1] and has the right mean") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal moments") {
  Rng rng(2);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("gamma moments match shape * scale") {
  Rng rng(3);
  const double shape = 6.5, scale = 0.4;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.gamma(shape, scale);
  const double mean = sum / n;
  // SE of the mean is scale * sqrt(shape / n).
  CHECK(std::abs(mean - shape * scale) < 4.0 * scale * std::sqrt(shape / static_cast<double>(n)));
}

TEST_CASE("inverse gamma mean is scale / (shape - 1)") {
  Rng rng(4);
  const double shape = 6.0, scale = 6.0;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.inverse_gamma(shape, scale);
  CHECK(std::abs(sum / n - scale / (shape - 1.0)) < 0.03);
}

TEST_CASE("sample_without_replacement draws distinct indices") {
  Rng rng(5);
  const auto picks = rng.sample_without_replacement(10, 6);
  CHECK(picks.size() == 6);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    CHECK(picks[i] < 10);
    for (std::size_t j = i + 1; j < picks.size(); ++j) CHECK(picks[i] != picks[j]);
  }
}

}  // TEST_SUITE
