#pragma once

#include <utility>

#include "hypersack/group.hpp"

namespace hypersack {

// Geometric parameters steering the power-normalization and case-split
// machinery. Derived fields come from the group; the tunables have
// conservative defaults and can be overridden through the
// HYPERSACK_CONSTANTS environment variable, which holds a JSON object like
//   {"free": {"kappa": 2, "gamma": 8}, "finite": {"xi": 1}}
// with any subset of kappa, gamma, xi, lambda, epsilon per family.
struct HyperbolicConstants {
  Nat delta = 0;   // thin-triangle constant of the base group
  Nat N = 1;       // number of elements within distance 2*delta of 1
  Nat L = 2;       // power length threshold, 34*delta + 2
  Nat K_EH = 1;    // conjugate search budget, |B(4*delta)|^2
  Nat lambda = 1;  // operating quasigeodesic slope for normalized powers
  Nat epsilon = 0;
  Nat kappa = 2;   // slack added to endpoint distances in progression bounds
  Nat gamma = 6;   // stabilizer ball radius, at least 2*delta + 2*kappa
  Nat xi = 0;      // polygon split search radius seed
};

// Only free and finite base groups carry these constants; composite groups
// are handled by reduction and have none.
HyperbolicConstants constants_for(const Group& g);

// (lambda, epsilon) certified for paths spelling powers of a word of
// geodesic length glen: lambda = N*glen, epsilon = 2*(N*glen)^2 + 2*N*glen.
std::pair<Nat, Nat> power_quasigeodesic_params(const HyperbolicConstants& c,
                                               Nat glen);

}  // namespace hypersack
