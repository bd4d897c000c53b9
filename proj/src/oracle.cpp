#include "hypersack/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hypersack {

namespace {

constexpr Nat kBruteCap = 10000000;

// Runs fn over every valuation of vars in [0, box]^k.
template <typename Fn>
void for_each_valuation(const std::vector<std::string>& vars, Nat box,
                        Fn&& fn) {
  Valuation val;
  for (const auto& v : vars) val[v] = 0;
  while (true) {
    fn(val);
    size_t i = 0;
    for (; i < vars.size(); ++i) {
      auto& slot = val[vars[vars.size() - 1 - i]];
      if (slot < box) {
        ++slot;
        break;
      }
      slot = 0;
    }
    if (i == vars.size()) break;
  }
}

void check_cap(size_t nvars, Nat box) {
  Nat total = 1;
  for (size_t i = 0; i < nvars; ++i) {
    total *= box + 1;
    if (total > kBruteCap)
      throw std::runtime_error("brute force search space exceeds cap");
  }
}

}  // namespace

bool verify(const Expression& e, const Valuation& val) {
  return e.group->word_problem(e.evaluate(val));
}

SemilinearSet brute_solve(const Expression& e, Nat box) {
  return brute_solve_system({e}, box);
}

SemilinearSet brute_solve_system(const std::vector<Expression>& es, Nat box) {
  if (es.empty()) throw std::invalid_argument("empty system");
  std::set<std::string> var_set;
  for (const auto& e : es)
    for (const auto& v : e.vars) var_set.insert(v);
  std::vector<std::string> vars(var_set.begin(), var_set.end());
  check_cap(vars.size(), box);

  std::vector<LinearSet> points;
  for_each_valuation(vars, box, [&](const Valuation& val) {
    for (const auto& e : es)
      if (!verify(e, val)) return;
    LinearSet p;
    for (const auto& v : vars) p.offset.push_back(val.at(v));
    points.push_back(std::move(p));
  });
  return SemilinearSet::make(vars, points);
}

}  // namespace hypersack
