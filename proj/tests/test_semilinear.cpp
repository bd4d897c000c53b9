#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "hypersack/semilinear.hpp"

using namespace hypersack;

namespace {

SemilinearSet make_set(std::vector<std::string> vars,
                       std::vector<LinearSet> comps) {
  return SemilinearSet::make(std::move(vars), std::move(comps));
}

std::set<Row> box_rows(const SemilinearSet& s, Nat b) {
  std::set<Row> out;
  for (const auto& v : s.enumerate_box(b)) out.insert(s.to_row(v));
  return out;
}

SemilinearSet random_set(std::mt19937& rng, const std::vector<std::string>& vars,
                         int max_components = 3, int max_periods = 2,
                         Nat max_entry = 3) {
  std::uniform_int_distribution<int> ncomp(0, max_components);
  std::uniform_int_distribution<int> nper(0, max_periods);
  std::uniform_int_distribution<Nat> entry(0, max_entry);
  std::vector<LinearSet> comps;
  int k = ncomp(rng);
  for (int i = 0; i < k; ++i) {
    LinearSet c;
    for (size_t j = 0; j < vars.size(); ++j) c.offset.push_back(entry(rng));
    int p = nper(rng);
    for (int q = 0; q < p; ++q) {
      Row r;
      for (size_t j = 0; j < vars.size(); ++j) r.push_back(entry(rng));
      c.periods.push_back(r);
    }
    comps.push_back(c);
  }
  return make_set(vars, comps);
}

}  // namespace

TEST_CASE("diophantine completion agrees with brute-force minimal solutions") {
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> dim(1, 3), ncols(1, 4);
  std::uniform_int_distribution<Nat> entry(-2, 2);
  for (int trial = 0; trial < 60; ++trial) {
    int m = dim(rng), n = ncols(rng);
    std::vector<Row> cols(n, Row(m));
    for (auto& c : cols)
      for (auto& x : c) x = entry(rng);

    auto completion = minimal_homogeneous_solutions(cols);

    // Brute force: all x in [0,6]^n with Ax = 0, then keep the minimal ones.
    const Nat B = 6;
    std::vector<Row> sols;
    Row x(n, 0);
    while (true) {
      Row ax(m, 0);
      bool zero = true, nonzero_x = false;
      for (int i = 0; i < n; ++i) {
        nonzero_x = nonzero_x || x[i] != 0;
        for (int j = 0; j < m; ++j) ax[j] += x[i] * cols[i][j];
      }
      for (Nat v : ax) zero = zero && v == 0;
      if (zero && nonzero_x) sols.push_back(x);
      int i = 0;
      while (i < n && x[i] == B) x[i++] = 0;
      if (i == n) break;
      ++x[i];
    }
    auto leq = [](const Row& a, const Row& b) {
      for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
      return true;
    };
    std::vector<Row> brute_minimal;
    for (const auto& s : sols) {
      bool minimal = true;
      for (const auto& t : sols)
        if (t != s && leq(t, s)) minimal = false;
      if (minimal) brute_minimal.push_back(s);
    }

    // Every brute-minimal solution must be reported.
    for (const auto& s : brute_minimal)
      REQUIRE(std::find(completion.begin(), completion.end(), s) !=
              completion.end());
    // Every reported solution small enough to lie in the brute box must be
    // brute-minimal.
    for (const auto& s : completion) {
      bool in_box = std::all_of(s.begin(), s.end(), [&](Nat v) { return v <= B; });
      if (in_box)
        REQUIRE(std::find(brute_minimal.begin(), brute_minimal.end(), s) !=
                brute_minimal.end());
    }
  }
}

TEST_CASE("union basics") {
  auto diag = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  auto none = SemilinearSet::empty({"x", "y"});
  REQUIRE(diag.unite(none) == diag);
  REQUIRE(none.unite(diag) == diag);

  auto a = SemilinearSet::point({{"x", 1}, {"y", 0}});
  auto b = SemilinearSet::point({{"x", 0}, {"y", 1}});
  auto u = a.unite(b);
  auto pts = box_rows(u, 5);
  REQUIRE(pts == std::set<Row>{{0, 1}, {1, 0}});
  REQUIRE_THROWS(a.unite(SemilinearSet::point({{"z", 1}})));
}

TEST_CASE("oplus basics") {
  auto x1 = SemilinearSet::point({{"x", 1}});
  auto y2 = SemilinearSet::point({{"y", 2}});
  auto both = x1.oplus(y2);
  REQUIRE(both.vars() == std::vector<std::string>{"x", "y"});
  REQUIRE(box_rows(both, 5) == std::set<Row>{{1, 2}});

  auto none = SemilinearSet::empty({"z"});
  REQUIRE(x1.oplus(none).is_empty());
  REQUIRE_THROWS(x1.oplus(x1));
}

TEST_CASE("scale_shift basics") {
  auto nat = make_set({"x"}, {{{0}, {{1}}}});
  auto same = nat.scale_shift({{"x", 1}}, {{"x", 0}});
  REQUIRE(same == nat);

  auto odds = nat.scale_shift({{"x", 2}}, {{"x", 1}});
  REQUIRE(box_rows(odds, 9) == std::set<Row>{{1}, {3}, {5}, {7}, {9}});
  REQUIRE_THROWS(nat.scale_shift({{"x", 0}}, {{"x", 0}}));
}

TEST_CASE("intersect pinned cases") {
  auto diag = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  auto dbl = make_set({"x", "y"}, {{{0, 0}, {{1, 2}}}});
  auto meet = diag.intersect(dbl);
  REQUIRE(box_rows(meet, 20) == std::set<Row>{{0, 0}});

  REQUIRE(box_rows(diag.intersect(diag), 20) == box_rows(diag, 20));

  auto shifted = make_set({"x", "y"}, {{{0, 2}, {{1, 1}}}});
  REQUIRE(diag.intersect(shifted).is_empty());
}

TEST_CASE("project pinned cases") {
  auto pt = SemilinearSet::point({{"x", 1}, {"y", 2}});
  auto px = pt.project({"x"});
  REQUIRE(px == SemilinearSet::point({{"x", 1}}));
  REQUIRE(pt.project({"x", "y"}) == pt);
  REQUIRE_THROWS(pt.project({"q"}));
}

TEST_CASE("member pinned cases") {
  auto diag = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  REQUIRE(diag.member({{"x", 0}, {"y", 0}}));
  REQUIRE(diag.member({{"x", 7}, {"y", 7}}));
  REQUIRE_FALSE(diag.member({{"x", 1}, {"y", 2}}));
}

TEST_CASE("magnitude pinned cases") {
  auto diag = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  REQUIRE(diag.magnitude() == 1);
  REQUIRE(SemilinearSet::empty({"x"}).magnitude() == 0);
  auto seven = SemilinearSet::point({{"n", 7}});
  REQUIRE(seven.magnitude() == 7);
}

TEST_CASE("enumerate_box pinned cases") {
  auto diag = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  auto pts = diag.enumerate_box(3);
  REQUIRE(pts.size() == 4);
  REQUIRE(box_rows(diag, 3) == std::set<Row>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  REQUIRE(SemilinearSet::empty({"x", "y"}).enumerate_box(10).empty());
}

TEST_CASE("operations are exact on boxes") {
  std::mt19937 rng(987123);
  const std::vector<std::string> vars{"x", "y"};
  const Nat B = 8;
  for (int trial = 0; trial < 40; ++trial) {
    auto s = random_set(rng, vars);
    auto t = random_set(rng, vars);
    auto sb = box_rows(s, B), tb = box_rows(t, B);

    std::set<Row> expect_union = sb;
    expect_union.insert(tb.begin(), tb.end());
    REQUIRE(box_rows(s.unite(t), B) == expect_union);

    std::set<Row> expect_meet;
    std::set_intersection(sb.begin(), sb.end(), tb.begin(), tb.end(),
                          std::inserter(expect_meet, expect_meet.begin()));
    REQUIRE(box_rows(s.intersect(t), B) == expect_meet);

    // oplus against a set over disjoint names
    auto u = random_set(rng, {"z"});
    std::set<Row> expect_oplus;
    for (const auto& a : sb)
      for (const auto& c : box_rows(u, B))
        expect_oplus.insert({a[0], a[1], c[0]});
    REQUIRE(box_rows(s.oplus(u), B) == expect_oplus);

    // projection: every projected box point survives, and every point of the
    // projected set has a witness (whose other coordinate may exceed B)
    auto proj = s.project({"x"});
    auto proj_box = box_rows(proj, B);
    for (const auto& a : sb) REQUIRE(proj_box.count({a[0]}) == 1);
    for (const auto& p : proj_box) {
      bool witnessed = false;
      for (Nat y = 0; y <= 200 && !witnessed; ++y)
        witnessed = s.member({{"x", p[0]}, {"y", y}});
      REQUIRE(witnessed);
    }

    // membership agrees with the box on every box point
    for (Nat x = 0; x <= B; ++x)
      for (Nat y = 0; y <= B; ++y) {
        bool in_box = sb.count({x, y}) > 0;
        REQUIRE(s.member({{"x", x}, {"y", y}}) == in_box);
      }
  }
}

TEST_CASE("scale_shift is exact on boxes") {
  std::mt19937 rng(5150);
  const std::vector<std::string> vars{"x", "y"};
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_set(rng, vars);
    Valuation m{{"x", 2}, {"y", 3}}, d{{"x", 1}, {"y", 0}};
    auto scaled = s.scale_shift(m, d);
    std::set<Row> expect;
    for (const auto& r : box_rows(s, 20)) {
      Row img{2 * r[0] + 1, 3 * r[1]};
      if (img[0] <= 20 && img[1] <= 20) expect.insert(img);
    }
    REQUIRE(box_rows(scaled, 20) == expect);
  }
}

TEST_CASE("magnitude laws") {
  std::mt19937 rng(33033);
  const std::vector<std::string> vars{"x", "y"};
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_set(rng, vars);
    auto t = random_set(rng, vars);
    REQUIRE(s.unite(t).magnitude() == std::max(s.magnitude(), t.magnitude()));
    auto u = random_set(rng, {"w", "z"});
    if (!s.is_empty() && !u.is_empty())
      REQUIRE(s.oplus(u).magnitude() == std::max(s.magnitude(), u.magnitude()));
    else
      REQUIRE(s.oplus(u).is_empty());
    auto scaled = s.scale_shift({{"x", 2}, {"y", 2}}, {{"x", 1}, {"y", 1}});
    REQUIRE(scaled.magnitude() <= 2 * s.magnitude() + 1);
    REQUIRE(s.project({"x"}).magnitude() <= s.magnitude());
  }
}

TEST_CASE("canonical serialization is byte-identical and round-trips") {
  LinearSet c1{{1, 0}, {{1, 1}, {0, 2}}};
  LinearSet c2{{0, 3}, {}};
  auto a = make_set({"x", "y"}, {c1, c2});
  auto b = make_set({"x", "y"}, {c2, c1});  // same set, different build order
  REQUIRE(a.to_text() == b.to_text());
  REQUIRE(SemilinearSet::from_text(a.to_text()) == a);
  REQUIRE(SemilinearSet::from_text(a.to_text()).to_text() == a.to_text());

  // zero periods are canonicalized away; duplicate periods collapse
  LinearSet noisy{{1, 0}, {{0, 0}, {1, 1}, {1, 1}, {0, 2}}};
  REQUIRE(make_set({"x", "y"}, {noisy}).to_text() ==
          make_set({"x", "y"}, {c1}).to_text());

  // empty domain round-trip
  auto unit = SemilinearSet::point({});
  REQUIRE(SemilinearSet::from_text(unit.to_text()) == unit);
  auto none = SemilinearSet::empty({});
  REQUIRE(SemilinearSet::from_text(none.to_text()) == none);
}

TEST_CASE("serialization rejects malformed input") {
  REQUIRE_THROWS(SemilinearSet::from_text("x=1\n"));
  REQUIRE_THROWS(SemilinearSet::from_text("vars x\ny=1\n"));
  REQUIRE_THROWS(SemilinearSet::from_text("vars x,y\nx=1\n"));
  REQUIRE_THROWS(SemilinearSet::from_text("vars x\nx=-2\n"));
}

TEST_CASE("rename permutes coordinates") {
  auto s = make_set({"a", "b"}, {{{1, 2}, {{1, 0}}}});
  auto r = s.rename({{"a", "z"}, {"b", "c"}});
  REQUIRE(r.vars() == std::vector<std::string>{"c", "z"});
  REQUIRE(r.member({{"c", 2}, {"z", 1}}));
  REQUIRE(r.member({{"c", 2}, {"z", 4}}));
  REQUIRE_FALSE(r.member({{"c", 4}, {"z", 2}}));
}

TEST_CASE("pruned preserves the set and removes absorbed parts") {
  auto base = make_set({"x", "y"}, {{{0, 0}, {{1, 1}}}});
  auto shadow = make_set({"x", "y"}, {{{2, 2}, {{1, 1}}}});
  auto pruned = base.unite(shadow).pruned();
  REQUIRE(pruned == base);

  std::mt19937 rng(777);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = random_set(rng, {"x", "y"});
    REQUIRE(box_rows(s.pruned(), 12) == box_rows(s, 12));
  }
}

TEST_CASE("minkowski sum and star") {
  auto a = make_set({"x", "y"}, {{{1, 0}, {}}});
  auto b = make_set({"x", "y"}, {{{0, 2}, {{1, 1}}}});
  REQUIRE(box_rows(minkowski_sum(a, b), 6) ==
          std::set<Row>{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}});

  std::mt19937 rng(424242);
  const Nat B = 7;
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_set(rng, {"x", "y"}, 2, 1, 2);
    // brute star: close the box under addition of box members of s
    std::set<Row> closure{{0, 0}};
    std::set<Row> gens = box_rows(s, B);
    bool grew = true;
    while (grew) {
      grew = false;
      std::set<Row> next = closure;
      for (const auto& c : closure)
        for (const auto& g : gens) {
          Row sum{c[0] + g[0], c[1] + g[1]};
          if (sum[0] <= B && sum[1] <= B && !next.count(sum)) {
            next.insert(sum);
            grew = true;
          }
        }
      closure = next;
    }
    REQUIRE(box_rows(addition_star(s), B) == closure);
  }
}
