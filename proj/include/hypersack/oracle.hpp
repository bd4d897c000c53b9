#pragma once

#include <vector>

#include "hypersack/expression.hpp"
#include "hypersack/semilinear.hpp"

namespace hypersack {

// Ground-truth reference: direct evaluation in the group.

// True iff the expression evaluates to the identity under val.
bool verify(const Expression& e, const Valuation& val);

// All solutions with every variable in [0, box], as a finite union of
// points. Throws if the search space exceeds 10^7 valuations.
SemilinearSet brute_solve(const Expression& e, Nat box);

// Simultaneous solutions of several expressions over the union of their
// variables, same box and cap.
SemilinearSet brute_solve_system(const std::vector<Expression>& es, Nat box);

}  // namespace hypersack
