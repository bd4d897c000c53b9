#include "hypersack/constants.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace hypersack {

namespace {

void apply_overrides(HyperbolicConstants& c, const char* family) {
  const char* env = std::getenv("HYPERSACK_CONSTANTS");
  if (!env || !*env) return;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(env);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("bad HYPERSACK_CONSTANTS: ") +
                             e.what());
  }
  if (!doc.is_object() || !doc.contains(family)) return;
  const nlohmann::json& sub = doc.at(family);
  auto pick = [&](const char* key, Nat& slot) {
    if (sub.contains(key)) slot = sub.at(key).get<Nat>();
  };
  pick("kappa", c.kappa);
  pick("gamma", c.gamma);
  pick("xi", c.xi);
  pick("lambda", c.lambda);
  pick("epsilon", c.epsilon);
}

}  // namespace

HyperbolicConstants constants_for(const Group& g) {
  GroupKind k = g.kind();
  if (k != GroupKind::Free && k != GroupKind::Finite)
    throw std::invalid_argument(
        "hyperbolicity constants are only defined for free and finite "
        "groups, not " +
        g.describe());
  HyperbolicConstants c;
  c.delta = g.delta();
  c.N = static_cast<Nat>(g.ball(2 * c.delta).size());
  c.L = 34 * c.delta + 2;
  Nat b4 = static_cast<Nat>(g.ball(4 * c.delta).size());
  c.K_EH = b4 * b4;
  apply_overrides(c, k == GroupKind::Free ? "free" : "finite");
  if (c.lambda < 1) throw std::runtime_error("lambda must be at least 1");
  c.gamma = std::max(c.gamma, 2 * c.delta + 2 * c.kappa);
  return c;
}

std::pair<Nat, Nat> power_quasigeodesic_params(const HyperbolicConstants& c,
                                               Nat glen) {
  Nat lam = c.N * glen;
  return {lam, 2 * lam * lam + 2 * lam};
}

}  // namespace hypersack
