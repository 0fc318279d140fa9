#include "doctest.h"
#include "socnav/geometry.hpp"
#include "socnav/rng.hpp"

using namespace socnav;

TEST_CASE("resample_by_spacing keeps spacing and endpoints") {
  const std::vector<Vec2> line{{0, 0}, {2, 0}};
  const auto r = resample_by_spacing(line, 0.2);
  REQUIRE(r.size() == 11);
  CHECK(r.front() == Vec2{0, 0});
  CHECK(r.back().x == doctest::Approx(2.0).epsilon(1e-12));
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(distance(r[i - 1], r[i]) == doctest::Approx(0.2));

  const auto odd = resample_by_spacing({{0, 0}, {1, 0}, {1, 0.5}}, 0.4);
  CHECK(odd.back() == Vec2{1, 0.5});
  CHECK(odd.size() == 5);
}

TEST_CASE("resample_by_spacing is idempotent on point positions") {
  const std::vector<Vec2> bend{{0, 0}, {1.3, 0.4}, {2.0, 2.1}};
  const auto once = resample_by_spacing(bend, 0.2);
  const auto twice = resample_by_spacing(once, 0.2);
  REQUIRE(twice.size() >= once.size() - 1);
  for (std::size_t i = 0; i < twice.size(); ++i) {
    const double d = point_segment_distance(twice[i], once[std::min(i, once.size() - 1)],
                                            once[std::min(i + 1, once.size() - 1)]);
    CHECK(d < 1e-9 + 0.2);
  }
}

TEST_CASE("resample_uniform returns exactly count points") {
  const std::vector<Vec2> l{{0, 0}, {3, 4}};
  const auto r = resample_uniform(l, 100);
  REQUIRE(r.size() == 100);
  CHECK(r.front() == l.front());
  CHECK(r.back() == l.back());
  CHECK(distance(r[0], r[1]) == doctest::Approx(5.0 / 99));
}

TEST_CASE("point_segment_distance") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == 1.0);
  CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == 2.0);
  CHECK(point_segment_distance({1, 1}, {0, 0}, {0, 0}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("rng streams are reproducible and seed-separated") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int k = r.uniform_int(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
  }
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("rng frozen values") {
  Rng r(7);
  CHECK(r.next() == 0xc11f6531eb66d9a7ULL);
  CHECK(mix_seed(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("shuffle is a permutation") {
  Rng r(3);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  r.shuffle(v);
  auto s = v;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 50; ++i) CHECK(s[i] == i);
}
