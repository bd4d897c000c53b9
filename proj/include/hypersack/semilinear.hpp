#pragma once

#include <map>
#include <string>
#include <vector>

namespace hypersack {

using Nat = long long;

// Assignment of natural numbers to variable names.
using Valuation = std::map<std::string, Nat>;

// Dense coordinate row, aligned with the owning set's variable order.
using Row = std::vector<Nat>;

// offset + ℕ·periods[0] + ℕ·periods[1] + ...
struct LinearSet {
  Row offset;
  std::vector<Row> periods;

  bool operator==(const LinearSet& o) const {
    return offset == o.offset && periods == o.periods;
  }
  bool operator<(const LinearSet& o) const {
    if (offset != o.offset) return offset < o.offset;
    return periods < o.periods;
  }
};

// Finite union of linear sets over a fixed, sorted variable domain.
// The empty set is the set with zero components; a LinearSet always
// contains its own offset, so it is never empty.
class SemilinearSet {
 public:
  SemilinearSet() = default;  // empty set over the empty domain

  static SemilinearSet empty(std::vector<std::string> vars);
  static SemilinearSet universe(std::vector<std::string> vars);
  static SemilinearSet point(const Valuation& v);
  // vars must be sorted and duplicate-free; rows aligned with vars.
  static SemilinearSet make(std::vector<std::string> vars,
                            std::vector<LinearSet> components);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<LinearSet>& components() const { return comps_; }
  bool is_empty() const { return comps_.empty(); }

  SemilinearSet unite(const SemilinearSet& t) const;
  SemilinearSet oplus(const SemilinearSet& t) const;
  SemilinearSet scale_shift(const Valuation& m, const Valuation& d) const;
  SemilinearSet intersect(const SemilinearSet& t) const;
  SemilinearSet project(const std::vector<std::string>& keep) const;
  bool member(const Valuation& v) const;
  Nat magnitude() const;
  std::vector<Valuation> enumerate_box(Nat bound) const;

  // Bijective variable renaming; coordinates are re-sorted by new names.
  SemilinearSet rename(const std::map<std::string, std::string>& mapping) const;

  // Semantically equal set with absorbed components and redundant periods
  // removed. Used to keep iterated sums (Parikh extraction) small.
  SemilinearSet pruned() const;

  Row to_row(const Valuation& v) const;
  Valuation to_valuation(const Row& r) const;

  std::string to_text() const;
  static SemilinearSet from_text(const std::string& text);

  bool operator==(const SemilinearSet& o) const {
    return vars_ == o.vars_ && comps_ == o.comps_;
  }

 private:
  std::vector<std::string> vars_;
  std::vector<LinearSet> comps_;

  void canonicalize();
};

// Minkowski sum over the same domain: { s + t | s ∈ S, t ∈ T }.
SemilinearSet minkowski_sum(const SemilinearSet& s, const SemilinearSet& t);

// Closure of S under addition, including the zero vector.
SemilinearSet addition_star(const SemilinearSet& s);

// All minimal nonzero x ∈ ℕ^n with Σ x[i]·cols[i] = 0 (componentwise over ℤ),
// computed by Contejean-Devie completion. Every nonnegative solution of the
// system is an ℕ-combination of the returned vectors.
std::vector<Row> minimal_homogeneous_solutions(const std::vector<Row>& cols);

}  // namespace hypersack
