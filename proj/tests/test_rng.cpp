#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

#include "mono/parallel.hpp"
#include "mono/rng.hpp"

using namespace mono;

TEST_CASE("mt19937_64 output is fixed by the standard") {
  Engine eng(5489u);
  for (int i = 1; i < 10000; ++i) eng();
  CHECK(eng() == 9981545732273789042ULL);
}

TEST_CASE("derive_seed is deterministic and tag sensitive") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(7, std::uint64_t{0}) != derive_seed(7, std::uint64_t{1}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 10000);
}

TEST_CASE("uniform_index stays in range and covers it evenly") {
  Engine eng = make_engine(3);
  std::vector<int> hist(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = uniform_index(eng, 7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  for (int h : hist) CHECK(std::abs(h - n / 7) < 5 * std::sqrt(n / 7.0));
  CHECK(uniform_index(eng, 1) == 0);
}

TEST_CASE("uniform01 and standard_normal moments") {
  Engine eng = make_engine(11);
  const int n = 200000;
  double s = 0, ss = 0, u = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(eng);
    s += z;
    ss += z * z;
    const double x = uniform01(eng);
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    u += x;
  }
  CHECK(std::abs(s / n) < 0.015);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
  CHECK(std::abs(u / n - 0.5) < 0.005);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Engine e1 = make_engine(9), e2 = make_engine(9);
  shuffle(std::span(a), e1);
  shuffle(std::span(b), e2);
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "37");
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("no calls for empty range"); });
}
