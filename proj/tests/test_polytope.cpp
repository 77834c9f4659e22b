#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "asep/symmetry.hpp"
#include "helpers.hpp"

using namespace asep;
using namespace asep::testing;

TEST_CASE("arc indexing is a bijection") {
  for (int n = 2; n <= 7; ++n) {
    ArcIndex a(n);
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CHECK(a.arc(i, j) == k);
        CHECK(a.endpoints(k) == std::pair<int, int>{i, j});
        ++k;
      }
    CHECK(k == a.m());
  }
}

TEST_CASE("constraint system row layout") {
  ConstraintSystem cs = ConstraintSystem::make(5);
  CHECK(cs.sec_masks.size() == (1 << 5) - 2 - 2 * 5);
  CHECK(std::is_sorted(cs.sec_masks.begin(), cs.sec_masks.end()));
  CHECK(cs.row_name(0) == "indeg(0)");
  CHECK(cs.row_name(5) == "outdeg(0)");
  CHECK(cs.row_name(10) == "sec({0,1})");
}

TEST_CASE("cut values") {
  SolutionPoint tour = standard_cycle(4);
  CHECK(cut_value(tour, {4, 0b0011}) == 1);

  SolutionPoint v = halfint_n4();
  CHECK(cut_value(v, {4, 0b0011}) == 1);
  CHECK(cut_value(v, {4, 0b0101}) == Rat(3, 2));
  CHECK(cut_value(v, {4, 0b0011}) == cut_oracle(v, 0b0011));
  CHECK(cut_value(v, {4, 0b0101}) == cut_oracle(v, 0b0101));

  CHECK_THROWS_AS(cut_value(v, {4, 0}), std::invalid_argument);
  CHECK_THROWS_AS(cut_value(v, {4, 0b1111}), std::invalid_argument);
}

TEST_CASE("membership") {
  CHECK(is_member(standard_cycle(4)).member);
  CHECK(is_member(standard_cycle(6)).member);

  SolutionPoint zeros;
  zeros.n = 4;
  zeros.x.assign(12, Rat(0));
  MemberResult r = is_member(zeros);
  CHECK(!r.member);
  CHECK(r.violated_row.find("deg") != std::string::npos);

  std::vector<Rat> uniform(12, Rat(1, 3));
  CHECK(is_member(SolutionPoint::make(4, uniform)).member);
}

TEST_CASE("vertex test") {
  CHECK(is_vertex(halfint_n4()));
  CHECK(is_vertex(maxgap_n6()));
  CHECK(is_vertex(standard_cycle(5)));

  std::vector<Rat> uniform(12, Rat(1, 3));
  CHECK(!is_vertex(SolutionPoint::make(4, uniform)));

  SolutionPoint zeros;
  zeros.n = 4;
  zeros.x.assign(12, Rat(0));
  CHECK_THROWS_AS(is_vertex(zeros), std::invalid_argument);
}

TEST_CASE("tight sets") {
  SUBCASE("the n=4 fractional vertex has exactly {0,1} and {2,3}") {
    std::vector<NodeSet> ts = tight_sets(halfint_n4());
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].mask == 0b0011);
    CHECK(ts[1].mask == 0b1100);
  }
  SUBCASE("counts across the n=5 orbit representatives") {
    CHECK(tight_sets(maxgap_n5()).size() == 6);
    CHECK(tight_sets(twoloops_n5()).size() == 4);
    CHECK(tight_sets(thirds_n5()).size() == 4);
    CHECK(tight_sets(mixed_n5()).size() == 4);
    CHECK(tight_sets(standard_cycle(5)).size() == 10);
  }
  SUBCASE("scan agrees with the direct-sum oracle") {
    for (const SolutionPoint& p : {halfint_n4(), maxgap_n5(), thirds_n5(), seed_n6()}) {
      std::vector<uint32_t> expect = tight_sets_oracle(p);
      std::vector<NodeSet> got = tight_sets(p);
      REQUIRE(got.size() == expect.size());
      for (size_t i = 0; i < got.size(); ++i) CHECK(got[i].mask == expect[i]);
    }
  }
}

TEST_CASE("component histograms") {
  std::map<Rat, int> h = component_histogram(halfint_n4());
  CHECK(h[Rat(0)] == 4);
  CHECK(h[Rat(1, 2)] == 8);
  CHECK(h.size() == 2);

  h = component_histogram(standard_cycle(4));
  CHECK(h[Rat(0)] == 8);
  CHECK(h[Rat(1)] == 4);

  h = component_histogram(seed_n6());
  CHECK(h[Rat(0)] == 17);
  CHECK(h[Rat(1, 3)] == 8);
  CHECK(h[Rat(2, 3)] == 5);
}

TEST_CASE("cuts of complementary sets agree on members") {
  for (const SolutionPoint& p : {halfint_n4(), maxgap_n5(), thirds_n5(), seed_n6()}) {
    REQUIRE(is_member(p).member);
    for (uint32_t mask = 1; mask + 1 < (1u << p.n); ++mask) {
      NodeSet s{p.n, mask};
      CHECK(cut_value(p, s) == cut_value(p, s.complement()));
    }
  }
}

TEST_CASE("every tour is a member and a vertex") {
  for (int n = 4; n <= 6; ++n) {
    std::vector<std::vector<int>> tours = enumerate_tours(n);
    CHECK(tours.size() == static_cast<size_t>(n == 4 ? 6 : n == 5 ? 24 : 120));
    for (const std::vector<int>& t : tours) {
      SolutionPoint p = tour_point(t);
      CHECK(is_member(p).member);
      CHECK(is_vertex(p));
    }
  }
}

TEST_CASE("n=4 vertices are exactly the non-midpoints") {
  // materialize all 12 vertices: the tour orbit and the fractional orbit
  std::vector<SolutionPoint> verts;
  for (const std::vector<int>& t : enumerate_tours(4)) verts.push_back(tour_point(t));
  {
    std::vector<int> img(4);
    std::iota(img.begin(), img.end(), 0);
    std::set<std::string> seen;
    do {
      Perm p;
      p.img = img;
      SolutionPoint y = apply(p, halfint_n4());
      if (seen.insert(y.serialize()).second) verts.push_back(y);
    } while (std::next_permutation(img.begin(), img.end()));
  }
  REQUIRE(verts.size() == 12);
  for (const SolutionPoint& v : verts) CHECK(is_vertex(v));
  // midpoints of distinct vertices are members but never vertices
  for (size_t a = 0; a < verts.size(); ++a)
    for (size_t b = a + 1; b < verts.size(); ++b) {
      SolutionPoint m = midpoint(verts[a], verts[b]);
      CHECK(is_member(m).member);
      CHECK(!is_vertex(m));
    }
}

TEST_CASE("points reject out-of-range entries") {
  std::vector<Rat> e(12, Rat(0));
  e[0] = Rat(3, 2);
  CHECK_THROWS_AS(SolutionPoint::make(4, e), std::invalid_argument);
  e[0] = Rat(-1, 2);
  CHECK_THROWS_AS(SolutionPoint::make(4, e), std::invalid_argument);
}
