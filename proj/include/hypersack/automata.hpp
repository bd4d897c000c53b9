#pragma once

#include <string>
#include <vector>

#include "hypersack/expression.hpp"
#include "hypersack/group.hpp"
#include "hypersack/semilinear.hpp"

namespace hypersack {

// Finite automaton whose edges are labelled with group words (possibly
// empty). States are 0..num_states-1.
struct WordNfa {
  struct Edge {
    int from;
    Word label;
    int to;
  };
  int num_states = 0;
  int initial = 0;
  std::vector<int> finals;
  std::vector<Edge> edges;
};

bool is_acyclic(const WordNfa& a);

WordNfa word_nfa_from_json(const Group& g, const std::string& text);
std::string word_nfa_to_json(const Group& g, const WordNfa& a);

// Layered automaton accepting exactly u_1^{n_1} v_1 ... u_k^{n_k} v_k for
// 0 <= n_i <= p, with row/kind metadata for reading exponents off a run.
struct GridNfa {
  WordNfa nfa;
  std::vector<int> row;        // 1-based power row of each edge
  std::vector<char> is_power;  // edge spells one copy of u_row
};

GridNfa grid_nfa(const Expression& e, Nat p);

Valuation decode_grid_run(const Expression& e, const GridNfa& grid,
                          const std::vector<int>& run_edges);

struct MembershipResult {
  bool accepted = false;
  std::vector<int> run_edges;  // witness: an accepting run, by edge index
};

// Does the automaton accept some word equal to 1 in g? Requires an acyclic
// state graph. Free groups go through inverse-pair saturation, finite groups
// through an element-set sweep, composites through a normal-form sweep
// capped at 100000 forms per state.
MembershipResult acyclic_membership(const Group& g, const WordNfa& a);

// Automaton whose edges emit vectors of naturals; the language lives in
// N^d with named coordinates.
struct CountNfa {
  struct Edge {
    int from;
    Row emit;
    int to;
  };
  std::vector<std::string> vars;
  int num_states = 0;
  int initial = 0;
  std::vector<int> finals;
  std::vector<Edge> edges;
};

CountNfa count_nfa_from_json(const std::string& text);
std::string count_nfa_to_json(const CountNfa& a);

// Exact set of emission sums over accepting runs. Automata whose trimmed
// part has at most max_kernel_states states go through the kernel-subset
// construction; larger ones (or blowups) fall back to state elimination
// over the commutative semiring of semilinear sets. Both routes are exact.
SemilinearSet parikh_image(const CountNfa& a, int max_kernel_states = 12);

// Block-split arithmetic: n1 = p*l + r with 0 <= r < l, and
// s*l = n2 + t with 0 <= t < l (round up to whole blocks).
struct SplitParams {
  Nat p, r, s, t;
};
SplitParams split_params(Nat n1, Nat n2, Nat l);

}  // namespace hypersack
