#include <cstdlib>
#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "hypersack/constants.hpp"
#include "hypersack/group.hpp"

using namespace hypersack;

namespace {

Word rand_word(std::mt19937& rng, const Group& g, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, g.alphabet().size() - 1);
  Word w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) w.push_back(pick(rng));
  return w;
}

bool freely_reduced(const Alphabet& a, const Word& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (a.inverse(w[i]) == w[i + 1]) return false;
  return true;
}

// All words over the group's alphabet with length <= max_len.
std::vector<Word> all_words(const Group& g, int max_len) {
  std::vector<Word> out{Word{}};
  size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t end = out.size();
    for (size_t i = begin; i < end; ++i)
      for (int l = 0; l < g.alphabet().size(); ++l) {
        Word w = out[i];
        w.push_back(l);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

}  // namespace

TEST_CASE("free reduction and shortlex basics") {
  FreeGroup f2(2);
  CHECK(f2.describe() == "F2");
  CHECK(f2.alphabet().size() == 4);
  CHECK(f2.alphabet().name(0) == "a");
  CHECK(f2.alphabet().name(1) == "a^-1");
  CHECK(f2.alphabet().inverse(0) == 1);

  CHECK(f2.shortlex_reduce(f2.parse_word("a a^-1 b")) == f2.parse_word("b"));
  CHECK(f2.shortlex_reduce(f2.parse_word("a b b^-1 a^-1")).empty());
  CHECK(f2.word_problem(f2.parse_word("a b b^-1 a^-1")));
  CHECK_FALSE(f2.word_problem(f2.parse_word("a b a^-1")));
  CHECK(f2.geodesic_length(f2.parse_word("a b b^-1 a")) == 2);
  CHECK(f2.word_text(f2.parse_word("a b^-1")) == "a b^-1");

  CHECK(f2.order_of(Word{}) == 1);
  CHECK(f2.order_of(f2.parse_word("a a^-1")) == 1);
  CHECK_FALSE(f2.order_of(f2.parse_word("a")).has_value());

  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Word w = rand_word(rng, f2, 12);
    Word r = f2.shortlex_reduce(w);
    CHECK(freely_reduced(f2.alphabet(), r));
    CHECK(f2.shortlex_reduce(r) == r);
    CHECK(f2.word_problem(concat(w, inverse_word(f2.alphabet(), r))));
  }
}

TEST_CASE("free group ball sizes") {
  FreeGroup f2(2);
  CHECK(f2.ball(0).size() == 1);
  CHECK(f2.ball(1).size() == 5);
  CHECK(f2.ball(2).size() == 17);
  CHECK(f2.ball(3).size() == 53);
  CHECK_THROWS_AS(f2.ball(5, 100), std::runtime_error);

  // Sorted by length, then by letter order.
  std::vector<Word> b1 = f2.ball(1);
  CHECK(b1[0] == Word{});
  CHECK(b1[1] == Word{0});
  CHECK(b1[4] == Word{3});
}

TEST_CASE("finite group from table text") {
  auto z2 = FiniteGroup::from_table_text("e,a\na,e\n");
  CHECK(z2->order() == 2);
  CHECK(z2->alphabet().size() == 1);
  CHECK(z2->alphabet().name(0) == "a");
  CHECK(z2->alphabet().inverse(0) == 0);
  CHECK(z2->word_problem(z2->parse_word("a a")));
  CHECK_FALSE(z2->word_problem(z2->parse_word("a a a")));
  CHECK(z2->parse_word("a^-1") == z2->parse_word("a"));
  CHECK(z2->order_of(z2->parse_word("a")) == 2);
  CHECK(z2->order_of(Word{}) == 1);
  CHECK(z2->delta() == 1);

  auto z3 = FiniteGroup::from_table_text("e,a,b\na,b,e\nb,e,a\n");
  CHECK(z3->order_of(z3->parse_word("a")) == 3);
  CHECK(z3->parse_word("a^-1") == z3->parse_word("b"));
  CHECK(z3->shortlex_reduce(z3->parse_word("a a")) == z3->parse_word("b"));
  CHECK(z3->ball(1).size() == 3);
  CHECK(z3->ball(2).size() == 3);

  // Comments and blank lines are fine.
  auto z2c = FiniteGroup::from_table_text("# two elements\n\ne,a\na,e\n");
  CHECK(z2c->order() == 2);
}

TEST_CASE("bad tables are rejected") {
  CHECK_THROWS_AS(FiniteGroup::from_table_text(""), std::invalid_argument);
  // No identity element (duplicate rows).
  CHECK_THROWS_AS(FiniteGroup::from_table_text("e,a\ne,a\n"),
                  std::invalid_argument);
  // Row is not a permutation.
  CHECK_THROWS_AS(FiniteGroup::from_table_text("e,a\na,a\n"),
                  std::invalid_argument);
  // Wrong row count.
  CHECK_THROWS_AS(FiniteGroup::from_table_text("e,a\n"),
                  std::invalid_argument);
  // Unknown name in body.
  CHECK_THROWS_AS(FiniteGroup::from_table_text("e,a\na,c\n"),
                  std::invalid_argument);
  // A Latin square with identity that is not associative (a*b != b*a, and
  // order-5 groups are abelian, so this cannot be a group).
  CHECK_THROWS_AS(
      FiniteGroup::from_table_text(
          "e,a,b,c,d\na,e,c,d,b\nb,d,e,a,c\nc,b,d,e,a\nd,c,a,b,e\n"),
      std::invalid_argument);
}

TEST_CASE("s3 table is a valid group of order 6") {
  auto s3 = parse_group_spec("S3");
  auto* fg = dynamic_cast<const FiniteGroup*>(s3.get());
  REQUIRE(fg != nullptr);
  CHECK(fg->order() == 6);
  CHECK(fg->delta() == 1);
  CHECK(fg->order_of(fg->parse_word("r")) == 3);
  CHECK(fg->order_of(fg->parse_word("x")) == 2);
  // Non-abelian: the commutator of x and r is r, not 1.
  CHECK_FALSE(fg->word_problem(fg->parse_word("x r x^-1 r^-1")));
  // Conjugation by a reflection inverts the rotation.
  CHECK(fg->word_problem(fg->parse_word("x r x^-1 r")));
}

TEST_CASE("finite shortlex agrees with brute force search") {
  for (const char* spec : {"Z/2", "Z/3", "S3"}) {
    auto g = parse_group_spec(spec);
    auto* fg = dynamic_cast<const FiniteGroup*>(g.get());
    REQUIRE(fg != nullptr);
    std::vector<Word> words = all_words(*g, 3);
    for (const Word& w : words) {
      Word r = g->shortlex_reduce(w);
      CHECK(fg->eval(r) == fg->eval(w));
      // r is the first word in shortlex enumeration with the same value.
      for (const Word& cand : words) {
        if (cand.size() > r.size() ||
            (cand.size() == r.size() && !(cand < r)))
          break;
        CHECK(fg->eval(cand) != fg->eval(w));
      }
    }
  }
}

TEST_CASE("direct product with Z") {
  auto g = parse_group_spec("(Z) x Z");
  CHECK(g->describe() == "(F1) x Z");
  CHECK(g->alphabet().size() == 4);
  CHECK(g->alphabet().name(2) == "t");
  CHECK(g->alphabet().name(3) == "t^-1");

  CHECK(g->word_text(g->shortlex_reduce(g->parse_word("t a"))) == "a t");
  CHECK(g->geodesic_length(g->parse_word("a t a^-1")) == 1);
  CHECK(g->word_problem(g->parse_word("t a t^-1 a^-1")));
  CHECK_FALSE(g->order_of(g->parse_word("t")).has_value());
  CHECK(g->order_of(g->parse_word("a a^-1")) == 1);

  auto h = parse_group_spec("(Z/2) x Z");
  CHECK(h->order_of(h->parse_word("a")) == 2);
  CHECK_FALSE(h->order_of(h->parse_word("a t")).has_value());
  CHECK(h->word_problem(h->parse_word("a t a t^-1")));
  CHECK(h->ball(2).size() == 8);  // (g, z) with (g != 1) + |z| <= 2

  // Fresh central generator name avoids clashes with inner names.
  auto k = std::make_shared<DirectZGroup>(
      FiniteGroup::from_table_text("e,t\nt,e\n"));
  CHECK(k->alphabet().name(0) == "t");
  CHECK(k->alphabet().name(1) == "t1");
}

TEST_CASE("free product of two finite groups") {
  auto g = parse_group_spec("(Z/2) * (finite:z2b.table)",
                            std::string(HYPERSACK_DATA_DIR) + "/tables");
  CHECK(g->alphabet().size() == 2);
  CHECK(g->alphabet().name(0) == "a");
  CHECK(g->alphabet().name(1) == "b");

  CHECK(g->word_problem(g->parse_word("a b b a")));
  CHECK_FALSE(g->word_problem(g->parse_word("a b a b a b")));
  CHECK(g->order_of(g->parse_word("a")) == 2);
  CHECK_FALSE(g->order_of(g->parse_word("a b")).has_value());
  CHECK(g->order_of(g->parse_word("a b a")) == 2);  // conjugate of b
  CHECK(g->order_of(g->parse_word("b a b a b")) == 2);

  CHECK(g->shortlex_reduce(g->parse_word("a a b b")).empty());
  CHECK(g->shortlex_reduce(g->parse_word("a a b a a b")).empty());
  CHECK(g->word_text(g->shortlex_reduce(g->parse_word("a b a b b a"))) ==
        "a b");
  // Ball of radius r holds the 2r+1 alternating words.
  CHECK(g->ball(3).size() == 7);
}

TEST_CASE("free product name clashes get side prefixes") {
  auto g = parse_group_spec("(Z/2) * (Z/2)");
  CHECK(g->alphabet().size() == 2);
  CHECK(g->alphabet().name(0) == "left.a");
  CHECK(g->alphabet().name(1) == "right.a");
  CHECK(g->word_problem(g->parse_word("left.a left.a")));
  CHECK_FALSE(g->word_problem(g->parse_word("left.a right.a")));

  auto f = parse_group_spec("(F2) * (F2)");
  CHECK(f->alphabet().size() == 8);
  CHECK(f->alphabet().index_of("left.a").has_value());
  CHECK(f->alphabet().index_of("right.b^-1").has_value());
  CHECK(f->parse_word("right.a^-1") ==
        Word{f->alphabet().inverse(*f->alphabet().index_of("right.a"))});
  // Reduces like F4.
  CHECK(f->word_problem(
      f->parse_word("left.a right.b right.b^-1 left.a^-1")));
  CHECK(f->geodesic_length(f->parse_word("left.a right.b left.a")) == 3);
}

TEST_CASE("mixed composites parse and reduce") {
  auto g = parse_group_spec("((Z/2) * (Z/2)) x Z");
  CHECK(g->alphabet().index_of("t").has_value());
  CHECK(g->word_problem(g->parse_word("left.a t left.a t^-1")));
  CHECK_FALSE(g->order_of(g->parse_word("left.a t")).has_value());

  auto h = parse_group_spec("(F1) * (Z/2)");
  CHECK(h->alphabet().size() == 3);
  // Both factors name a generator "a", so both sides get prefixed.
  CHECK(h->alphabet().index_of("left.a").has_value());
  CHECK(h->alphabet().index_of("right.a").has_value());
}

TEST_CASE("group spec parse errors") {
  CHECK_THROWS_AS(parse_group_spec(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("F0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("F2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("garbage"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("(F2 x Z"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("(F2) x Q"), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_spec("finite:no_such_file.table"),
                  std::runtime_error);
  CHECK(parse_group_spec("(F2)")->describe() == "F2");
  CHECK(parse_group_spec("  F3 ")->describe() == "F3");
}

TEST_CASE("word problem matches shortlex emptiness everywhere") {
  std::vector<GroupPtr> groups = {
      parse_group_spec("F2"),
      parse_group_spec("Z/3"),
      parse_group_spec("(Z/2) * (finite:" +
                           std::string(HYPERSACK_DATA_DIR) +
                           "/tables/z2b.table)"),
      parse_group_spec("(Z/2) x Z"),
  };
  for (const auto& g : groups) {
    int max_len = g->alphabet().size() > 2 ? 4 : 6;
    for (const Word& w : all_words(*g, max_len)) {
      Word r = g->shortlex_reduce(w);
      CHECK(g->word_problem(w) == r.empty());
      CHECK(g->shortlex_reduce(r) == r);
      CHECK(g->word_problem(concat(w, inverse_word(g->alphabet(), r))));
      CHECK(r.size() <= w.size());
    }
  }
}

TEST_CASE("hyperbolicity constants") {
  auto f2 = parse_group_spec("F2");
  HyperbolicConstants cf = constants_for(*f2);
  CHECK(cf.delta == 0);
  CHECK(cf.N == 1);
  CHECK(cf.L == 2);
  CHECK(cf.K_EH == 1);
  CHECK(cf.lambda == 1);
  CHECK(cf.epsilon == 0);
  CHECK(cf.kappa == 2);
  CHECK(cf.gamma == 6);
  CHECK(cf.xi == 0);

  auto z2 = parse_group_spec("Z/2");
  HyperbolicConstants cz = constants_for(*z2);
  CHECK(cz.delta == 1);
  CHECK(cz.L == 36);
  CHECK(cz.N == 2);
  CHECK(cz.K_EH == 4);
  CHECK(cz.gamma == 6);

  auto s3 = parse_group_spec("S3");
  HyperbolicConstants cs = constants_for(*s3);
  CHECK(cs.N == 6);
  CHECK(cs.K_EH == 36);

  CHECK_THROWS_AS(constants_for(*parse_group_spec("(F2) x Z")),
                  std::invalid_argument);
  CHECK_THROWS_AS(constants_for(*parse_group_spec("(Z/2) * (Z/3)")),
                  std::invalid_argument);

  auto [lam, eps] = power_quasigeodesic_params(cf, 3);
  CHECK(lam == 3);
  CHECK(eps == 24);
}

TEST_CASE("constants environment overrides") {
  setenv("HYPERSACK_CONSTANTS", "{\"free\": {\"kappa\": 5, \"xi\": 2}}", 1);
  HyperbolicConstants c = constants_for(*parse_group_spec("F2"));
  CHECK(c.kappa == 5);
  CHECK(c.xi == 2);
  CHECK(c.gamma == 10);  // clamped to 2*delta + 2*kappa
  HyperbolicConstants cz = constants_for(*parse_group_spec("Z/2"));
  CHECK(cz.kappa == 2);  // finite family untouched

  setenv("HYPERSACK_CONSTANTS", "not json", 1);
  CHECK_THROWS_AS(constants_for(*parse_group_spec("F2")), std::runtime_error);
  unsetenv("HYPERSACK_CONSTANTS");
}

TEST_CASE("local quasigeodesics") {
  auto f2 = parse_group_spec("F2");
  Word back_forth = word_power(f2->parse_word("a a^-1"), 5);
  CHECK_FALSE(is_local_quasigeodesic(*f2, back_forth, 1, 0, std::nullopt));
  CHECK(is_local_quasigeodesic(*f2, word_power(f2->parse_word("a b"), 10), 1,
                               0, std::nullopt));
  // Locality window below the defect length masks the failure.
  CHECK(is_local_quasigeodesic(*f2, back_forth, 1, 1, Nat{1}));

  // Powers of any reduced word are quasigeodesic with parameters derived
  // from the word's length.
  std::mt19937 rng(11);
  std::vector<GroupPtr> groups = {f2, parse_group_spec("Z/2"),
                                  parse_group_spec("S3")};
  for (const auto& g : groups) {
    HyperbolicConstants c = constants_for(*g);
    for (int trial = 0; trial < 34; ++trial) {
      Word u = g->shortlex_reduce(rand_word(rng, *g, 3));
      if (u.empty()) continue;
      auto [lam, eps] =
          power_quasigeodesic_params(c, static_cast<Nat>(u.size()));
      std::uniform_int_distribution<int> exp(1, 10);
      Word path = word_power(u, exp(rng));
      CHECK(is_local_quasigeodesic(*g, path, lam, eps, std::nullopt));
    }
  }
}
