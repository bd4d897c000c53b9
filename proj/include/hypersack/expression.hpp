#pragma once

#include <string>
#include <vector>

#include "hypersack/group.hpp"
#include "hypersack/semilinear.hpp"

namespace hypersack {

// A power expression u_1^{x_1} v_1 u_2^{x_2} v_2 ... u_k^{x_k} v_k over a
// group, asked to equal 1. Exponent variables range over the naturals; each
// appears once. Constant stretches are folded into the v words, with any
// leading constant rotated to the tail (a cyclic shift, so the solution set
// is unchanged).
struct Expression {
  GroupPtr group;
  std::vector<Word> u;
  std::vector<std::string> vars;
  std::vector<Word> v;

  int depth() const { return static_cast<int>(u.size()); }
  std::vector<std::string> sorted_vars() const;
  Word evaluate(const Valuation& val) const;
  std::string to_text() const;
};

// Text form: whitespace-separated factors `base`, `base^<int>` or
// `base^<var>`, where base is a single symbol or a bracketed word like
// [a b^-1]. Examples: `a^x b a^y`, `[a b]^n [b a]^-2 c`.
Expression parse_expression(const GroupPtr& group, const std::string& text);

}  // namespace hypersack
