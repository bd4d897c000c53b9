#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypersack/semilinear.hpp"

namespace hypersack {

using Letter = int;
using Word = std::vector<Letter>;

struct Symbol {
  std::string name;
  int inverse = -1;  // index of the formal inverse symbol
};

class Alphabet {
 public:
  int add(std::string name);
  void link_inverses(int i, int j);
  int size() const { return static_cast<int>(syms_.size()); }
  const std::string& name(int i) const { return syms_.at(i).name; }
  int inverse(int i) const { return syms_.at(i).inverse; }
  std::optional<int> index_of(const std::string& name) const;

 private:
  std::vector<Symbol> syms_;
  std::map<std::string, int> index_;
};

enum class GroupKind { Free, Finite, DirectZ, FreeProduct };

class Group {
 public:
  virtual ~Group() = default;

  const Alphabet& alphabet() const { return alpha_; }
  virtual GroupKind kind() const = 0;
  virtual std::string describe() const = 0;

  // Length-lexicographically least word representing the same element.
  virtual Word shortlex_reduce(const Word& w) const = 0;
  // Least n >= 1 with w^n = 1, or nullopt for infinite order.
  virtual std::optional<Nat> order_of(const Word& w) const = 0;
  // Slimness constant of the geometric pipeline; only base hyperbolic
  // backends (free, finite) provide one.
  virtual Nat delta() const;

  bool word_problem(const Word& w) const { return shortlex_reduce(w).empty(); }
  Nat geodesic_length(const Word& w) const {
    return static_cast<Nat>(shortlex_reduce(w).size());
  }

  // Shortlex representatives of every element at distance <= r from the
  // identity, sorted by length then letter order.
  std::vector<Word> ball(Nat r, size_t cap = 1000000) const;

  Word parse_word(const std::string& text) const;
  std::string word_text(const Word& w) const;

 protected:
  Alphabet alpha_;
  void check_letters(const Word& w) const;
};

using GroupPtr = std::shared_ptr<const Group>;

class FreeGroup : public Group {
 public:
  explicit FreeGroup(int rank);
  GroupKind kind() const override { return GroupKind::Free; }
  std::string describe() const override;
  Word shortlex_reduce(const Word& w) const override;
  std::optional<Nat> order_of(const Word& w) const override;
  Nat delta() const override { return 0; }
  int rank() const { return rank_; }

 private:
  int rank_;
};

class FiniteGroup : public Group {
 public:
  // n x n multiplication table over element names; table[i][j] is the index
  // of the product element_i * element_j. Validated on construction.
  FiniteGroup(std::vector<std::string> names,
              std::vector<std::vector<int>> table);

  GroupKind kind() const override { return GroupKind::Finite; }
  std::string describe() const override;
  Word shortlex_reduce(const Word& w) const override;
  std::optional<Nat> order_of(const Word& w) const override;
  Nat delta() const override { return diameter_; }

  int order() const { return static_cast<int>(names_.size()); }
  int eval(const Word& w) const;  // element index of the word's value
  int mul(int a, int b) const;    // product of two element indices

  // Parses the comma-separated table format: one row per element, and the
  // first row (the identity row) doubles as the element-name list.
  static std::shared_ptr<FiniteGroup> from_table_text(const std::string& text);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<int>> table_;
  int identity_ = 0;
  std::vector<int> inv_elem_;
  std::vector<int> sym_elem_;   // symbol index -> element index
  std::vector<Word> reps_;      // element index -> shortlex word
  Nat diameter_ = 0;
};

class DirectZGroup : public Group {
 public:
  explicit DirectZGroup(GroupPtr inner);
  GroupKind kind() const override { return GroupKind::DirectZ; }
  std::string describe() const override;
  Word shortlex_reduce(const Word& w) const override;
  std::optional<Nat> order_of(const Word& w) const override;

  const GroupPtr& inner() const { return inner_; }
  // +1 / -1 for the two fresh central letters, 0 for inner letters.
  int z_exponent(Letter l) const;
  Word project_inner(const Word& w) const;
  Nat project_z(const Word& w) const;

 private:
  GroupPtr inner_;
  int t_plus_, t_minus_;
};

class FreeProductGroup : public Group {
 public:
  FreeProductGroup(GroupPtr left, GroupPtr right);
  GroupKind kind() const override { return GroupKind::FreeProduct; }
  std::string describe() const override;
  Word shortlex_reduce(const Word& w) const override;
  std::optional<Nat> order_of(const Word& w) const override;

  const GroupPtr& left() const { return left_; }
  const GroupPtr& right() const { return right_; }

 private:
  GroupPtr left_, right_;
  int left_size_;
  // Alternating one-sided blocks, each holding a reduced nonempty inner word.
  struct Syllable {
    int side;
    Word word;  // in the factor's own letter indices
  };
  std::vector<Syllable> to_syllables(const Word& w) const;
  Word from_syllables(const std::vector<Syllable>& s) const;
};

// Word helpers over a fixed alphabet.
Word concat(const Word& a, const Word& b);
Word inverse_word(const Alphabet& alpha, const Word& w);
Word word_power(const Word& u, Nat n);

// True iff every subpath of w spanning at most zeta letters has length
// bounded by lambda * (geodesic distance of its endpoints) + epsilon.
// zeta = nullopt tests the global (non-local) condition.
bool is_local_quasigeodesic(const Group& g, const Word& w, Nat lambda,
                            Nat epsilon, std::optional<Nat> zeta);

// Text format: `F2`, `Z` (= F1), `finite:<file>`, `(S) x Z`, `(S) * (T)`,
// plus the built-in table aliases `Z/2`, `Z/3`, `S3`. Paths are resolved
// relative to base_dir when given.
GroupPtr parse_group_spec(const std::string& text,
                          const std::string& base_dir = "");

}  // namespace hypersack
