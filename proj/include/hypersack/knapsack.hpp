#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypersack/automata.hpp"
#include "hypersack/constants.hpp"
#include "hypersack/expression.hpp"
#include "hypersack/group.hpp"
#include "hypersack/semilinear.hpp"

namespace hypersack {

// Raised when an instance lies outside the fragment with computable full
// solution sets: a free product factor raised to an infinite-order base.
// Bounded decision (grid route) still works for such instances.
struct UnsupportedInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveStats {
  long long case_splits = 0;       // positivity subsets + polygon conjuncts
  long long torsion_branches = 0;  // residue combinations explored
  long long power_branches = 0;    // shift classes from power normalization
  long long depth2_nfa_states = 0; // largest progression automaton realized
  int max_recursion_depth = 0;     // deepest nested subequation solve
};

// Computes explicit semilinear solution sets of power equations
// u_1^{x_1} v_1 ... u_k^{x_k} v_k = 1 over free groups, finite groups,
// free products of those, and direct products with Z. The solver keeps
// per-instance memo tables, so reuse one instance across related calls.
class Solver {
 public:
  explicit Solver(GroupPtr group);

  // Full solution set of e over its sorted variables.
  SemilinearSet solve(const Expression& e);

  // Exact solutions of u^x v = 1 for an infinite-order base whose literal
  // powers are geodesic. There is at most one, found by a bounded scan.
  SemilinearSet solve_depth1(const Word& u, const std::string& var,
                             const Word& v);

  // Exact solutions of u1^x v1 u2^y v2 = 1 under the same provisos on both
  // bases: a bounded rectangle scan joined with the Parikh image of the
  // progression automaton.
  SemilinearSet solve_depth2(const Word& u1, const std::string& x,
                             const Word& v1, const Word& u2,
                             const std::string& y, const Word& v2);

  // Counting automaton for the aligned form v1 * u1^{n1} = u2^{n2} * v2.
  // Every accepting run is a genuine solution, and every solution with
  // n1*|u1| >= N1+N2 is accepted; coordinates are named n1, n2.
  CountNfa progression_nfa(const Word& v1, const Word& u1, const Word& u2,
                           const Word& v2);

  const SolveStats& stats() const { return stats_; }
  const GroupPtr& group() const { return group_; }

  // Present for free and finite base groups, absent for composites.
  const std::optional<HyperbolicConstants>& constants() const {
    return consts_;
  }

 private:
  struct TorsionBranch {
    Expression expr;  // torsion power bases substituted by fixed residues
    // eliminated variable -> (residue, order)
    std::vector<std::pair<std::string, std::pair<Nat, Nat>>> pinned;
  };
  struct PowerPlan {
    bool rewrite = false;
    Nat m = 1;   // solutions of the original exponent are m*x' + d
    Word base;   // replacement power base with geodesic literal powers
    Word head;   // conjugating prefix: head tilde^d conj base^{x'} ...
    Word tilde;  // rotated base the search conjugated
    Word conj;
    Word tail;   // ... conj^icv head^inv, folded into the next constant
  };
  struct Link {
    std::string target, left, right;  // target = left + right + 1
  };
  struct Conjunct {
    std::vector<Expression> subs;  // variable-disjoint subequations
    std::vector<Link> links;
  };

  const std::vector<Word>& cached_ball(Nat r);
  std::string expr_key(const Expression& e) const;
  SemilinearSet solve_expr(const Expression& e);
  SemilinearSet solve_torsion_free(const Expression& e);
  SemilinearSet solve_posloop(const Expression& e);
  SemilinearSet solve_pos(const Expression& e);
  SemilinearSet solve_polygon(const Expression& e);
  std::vector<TorsionBranch> reduce_torsion(const Expression& e);
  PowerPlan plan_power(const Word& u);
  std::vector<Conjunct> split_polygon(const Expression& e);
  SemilinearSet depth2_canonical(const Word& v1, const Word& u1,
                                 const Word& u2, const Word& v2);
  SemilinearSet solve_direct_z(const Expression& e);
  bool geodesic_powers(const Word& u) const;

  GroupPtr group_;
  std::optional<HyperbolicConstants> consts_;
  SolveStats stats_;
  int depth_ = 0;
  long long fresh_counter_ = 0;
  std::map<std::string, SemilinearSet> memo_;
  std::map<std::string, SemilinearSet> memo2_;
  std::map<Nat, std::vector<Word>> balls_;
};

struct DecideOptions {
  char route = 'x';          // 'a' solution set, 'b' grid automaton, 'x' auto
  std::optional<Nat> bound;  // grid exponent bound (inclusive) for route b
};

struct DecideOutcome {
  bool yes = false;
  std::optional<Valuation> witness;
  char route_used = 'a';
};

// Is there a solution at all? Route a computes the solution set and reads a
// witness off it; route b runs grid-automaton membership, using the given
// bound or, failing that, one derived from the solution set's magnitude.
DecideOutcome decide(const Expression& e, const DecideOptions& opts = {});

struct SystemOutcome {
  bool satisfiable = false;
  std::optional<Valuation> witness;
  SemilinearSet solutions;  // over the union of the original variables
};

// Simultaneous solutions of several equations over one group; variables
// shared between equations are conjoined by equality diagonals.
SystemOutcome solve_system(const std::vector<Expression>& es);

}  // namespace hypersack
