#include "hypersack/knapsack.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <memory>
#include <sstream>
#include <tuple>

#include "hypersack/oracle.hpp"

namespace hypersack {

namespace {

Word prefix_of(const Word& w, Nat n) {
  return Word(w.begin(), w.begin() + static_cast<size_t>(n));
}

Word suffix_of(const Word& w, Nat n) {
  return Word(w.begin() + static_cast<size_t>(n), w.end());
}

Word concat3(const Word& a, const Word& b, const Word& c) {
  return concat(concat(a, b), c);
}

// All coordinates >= 1 over the given (sorted) domain.
SemilinearSet positivity_set(const std::vector<std::string>& vars) {
  LinearSet c;
  c.offset.assign(vars.size(), 1);
  for (size_t i = 0; i < vars.size(); ++i) {
    Row p(vars.size(), 0);
    p[i] = 1;
    c.periods.push_back(std::move(p));
  }
  return SemilinearSet::make(vars, {c});
}

SemilinearSet zero_point(const std::vector<std::string>& vars) {
  Valuation v;
  for (const auto& x : vars) v[x] = 0;
  return SemilinearSet::point(v);
}

// Adjoin a fresh coordinate target = left + right + 1 to every component.
// Because target does not occur in s, this is an affine image rather than
// a genuine intersection, so no equation solving is needed.
SemilinearSet apply_link(const SemilinearSet& s, const std::string& target,
                         const std::string& left, const std::string& right) {
  const auto& old_vars = s.vars();
  assert(!std::binary_search(old_vars.begin(), old_vars.end(), target));
  std::vector<std::string> vars = old_vars;
  vars.push_back(target);
  std::sort(vars.begin(), vars.end());
  auto at = [&](const std::string& n) {
    return static_cast<size_t>(
        std::lower_bound(vars.begin(), vars.end(), n) - vars.begin());
  };
  std::vector<size_t> pos(old_vars.size());
  for (size_t i = 0; i < old_vars.size(); ++i) pos[i] = at(old_vars[i]);
  const size_t tp = at(target);
  const size_t li = static_cast<size_t>(
      std::lower_bound(old_vars.begin(), old_vars.end(), left) -
      old_vars.begin());
  const size_t ri = static_cast<size_t>(
      std::lower_bound(old_vars.begin(), old_vars.end(), right) -
      old_vars.begin());
  assert(li < old_vars.size() && old_vars[li] == left);
  assert(ri < old_vars.size() && old_vars[ri] == right);

  std::vector<LinearSet> comps;
  for (const auto& c : s.components()) {
    LinearSet out;
    out.offset.assign(vars.size(), 0);
    for (size_t i = 0; i < old_vars.size(); ++i)
      out.offset[pos[i]] = c.offset[i];
    out.offset[tp] = c.offset[li] + c.offset[ri] + 1;
    for (const auto& p : c.periods) {
      Row q(vars.size(), 0);
      for (size_t i = 0; i < old_vars.size(); ++i) q[pos[i]] = p[i];
      q[tp] = p[li] + p[ri];
      out.periods.push_back(std::move(q));
    }
    comps.push_back(std::move(out));
  }
  return SemilinearSet::make(std::move(vars), std::move(comps));
}

Valuation lex_min_offset(const SemilinearSet& s) {
  const Row* best = nullptr;
  for (const auto& c : s.components())
    if (!best || c.offset < *best) best = &c.offset;
  Valuation v;
  for (size_t i = 0; i < s.vars().size(); ++i) v[s.vars()[i]] = (*best)[i];
  return v;
}

// Drops the factors with keep[i] == false, substituting the constant
// subst[i] for their power, and folds stranded constants into whichever
// constant slot survives. A leading constant is rotated onto the tail,
// which keeps the solutions of `= 1` unchanged.
Expression restricted(const GroupPtr& g, const Expression& e,
                      const std::vector<char>& keep,
                      const std::vector<Word>& subst) {
  Expression out;
  out.group = g;
  Word pending, lead;
  bool any = false;
  for (int i = 0; i < e.depth(); ++i) {
    if (keep[i]) {
      if (!any)
        lead = pending;
      else
        out.v.back() = concat(out.v.back(), pending);
      pending.clear();
      any = true;
      out.u.push_back(e.u[i]);
      out.vars.push_back(e.vars[i]);
      out.v.push_back(e.v[i]);
    } else {
      pending = concat3(pending, subst[i], e.v[i]);
    }
  }
  if (!any) {
    out.v.push_back(g->shortlex_reduce(pending));
    return out;
  }
  out.v.back() = concat3(out.v.back(), pending, lead);
  for (auto& w : out.v) w = g->shortlex_reduce(w);
  return out;
}

}  // namespace

Solver::Solver(GroupPtr group) : group_(std::move(group)) {
  if (!group_) throw std::invalid_argument("solver needs a group");
  auto k = group_->kind();
  if (k == GroupKind::Free || k == GroupKind::Finite)
    consts_ = constants_for(*group_);
}

const std::vector<Word>& Solver::cached_ball(Nat r) {
  auto it = balls_.find(r);
  if (it == balls_.end()) it = balls_.emplace(r, group_->ball(r)).first;
  return it->second;
}

bool Solver::geodesic_powers(const Word& u) const {
  if (u.empty()) return false;
  return group_->geodesic_length(word_power(u, 8)) ==
         8 * static_cast<Nat>(u.size());
}

std::string Solver::expr_key(const Expression& e) const {
  std::ostringstream os;
  auto put = [&](const Word& w) {
    for (Letter l : w) os << l << '.';
    os << '/';
  };
  for (int i = 0; i < e.depth(); ++i) {
    put(e.u[i]);
    put(e.v[i]);
  }
  if (e.depth() == 0) put(e.v[0]);
  return os.str();
}

SemilinearSet Solver::solve(const Expression& e) {
  if (e.group.get() != group_.get())
    throw std::invalid_argument("expression group does not match the solver");
  if (group_->kind() == GroupKind::DirectZ) return solve_direct_z(e);
  Expression n = e;
  for (auto& w : n.u) w = group_->shortlex_reduce(w);
  for (auto& w : n.v) w = group_->shortlex_reduce(w);
  return solve_expr(n);
}

SemilinearSet Solver::solve_expr(const Expression& e) {
  struct Guard {
    int& d;
    ~Guard() { --d; }
  } guard{++depth_};
  stats_.max_recursion_depth = std::max(stats_.max_recursion_depth, depth_);
  if (depth_ > 64)
    throw std::logic_error("subequation recursion failed to terminate");

  std::map<std::string, std::string> to_pos, from_pos;
  for (int i = 0; i < e.depth(); ++i) {
    std::string p = "#p" + std::to_string(i);
    to_pos[e.vars[i]] = p;
    from_pos[p] = e.vars[i];
  }
  const std::string key = expr_key(e);
  if (auto it = memo_.find(key); it != memo_.end())
    return it->second.rename(from_pos);

  auto total = SemilinearSet::empty(e.sorted_vars());
  for (auto& br : reduce_torsion(e)) {
    ++stats_.torsion_branches;
    SemilinearSet core;
    if (br.expr.depth() == 0) {
      core = group_->word_problem(br.expr.v[0]) ? SemilinearSet::universe({})
                                                : SemilinearSet::empty({});
    } else if (!consts_) {
      throw UnsupportedInstance(
          "full solution sets over this group need every power base to have "
          "finite order; use the bounded grid route instead");
    } else {
      core = solve_torsion_free(br.expr);
    }
    for (const auto& [var, fo] : br.pinned) {
      LinearSet c;
      c.offset = {fo.first};
      c.periods = {{fo.second}};
      core = core.oplus(SemilinearSet::make({var}, {c}));
    }
    total = total.unite(core);
  }
  memo_.emplace(key, total.rename(to_pos));
  return total;
}

std::vector<Solver::TorsionBranch> Solver::reduce_torsion(
    const Expression& e) {
  const int k = e.depth();
  std::vector<int> tors;
  std::vector<Nat> orders;
  for (int i = 0; i < k; ++i)
    if (auto o = group_->order_of(e.u[i])) {
      tors.push_back(i);
      orders.push_back(*o);
    }
  if (tors.empty()) return {TorsionBranch{e, {}}};

  Nat combos = 1;
  for (Nat o : orders) {
    combos *= o;
    if (combos > 100000)
      throw std::runtime_error("too many torsion residue combinations");
  }

  std::vector<char> keep(k, 1);
  for (int i : tors) keep[i] = 0;
  std::vector<TorsionBranch> out;
  std::vector<Nat> f(tors.size(), 0);
  while (true) {
    std::vector<Word> subst(k);
    TorsionBranch br;
    for (size_t j = 0; j < tors.size(); ++j) {
      subst[tors[j]] = word_power(e.u[tors[j]], f[j]);
      br.pinned.emplace_back(e.vars[tors[j]],
                             std::make_pair(f[j], orders[j]));
    }
    br.expr = restricted(group_, e, keep, subst);
    out.push_back(std::move(br));
    size_t j = tors.size();
    while (j > 0) {
      if (++f[j - 1] < orders[j - 1]) break;
      f[j - 1] = 0;
      --j;
    }
    if (j == 0) break;
  }
  return out;
}

Solver::PowerPlan Solver::plan_power(const Word& u) {
  PowerPlan p;
  if (geodesic_powers(u)) {
    p.base = u;
    return p;
  }
  const auto& c = *consts_;
  p.rewrite = true;
  const Nat half = static_cast<Nat>(u.size()) / 2;
  p.head = prefix_of(u, half);
  p.tilde = group_->shortlex_reduce(concat(suffix_of(u, half), p.head));
  if (p.tilde.empty())
    throw std::logic_error("infinite-order base rotated to the identity");

  std::vector<std::pair<Word, Nat>> cands;
  if (static_cast<Nat>(p.tilde.size()) >= 2 * c.L + 1) {
    for (Nat m = 1; m <= c.K_EH; ++m)
      for (const auto& cw : cached_ball(4 * c.delta)) cands.push_back({cw, m});
  } else {
    cands.push_back({Word{}, 1});
  }
  const auto& alpha = group_->alphabet();
  for (const auto& [cw, m] : cands) {
    Word base = group_->shortlex_reduce(
        concat3(inverse_word(alpha, cw), word_power(p.tilde, m), cw));
    if (base.empty() || !geodesic_powers(base)) continue;
    p.m = m;
    p.conj = cw;
    p.base = base;
    p.tail = concat(inverse_word(alpha, cw), inverse_word(alpha, p.head));
    return p;
  }
  throw std::runtime_error("could not rewrite a power base into one with "
                           "geodesic literal powers");
}

SemilinearSet Solver::solve_torsion_free(const Expression& e) {
  const int k = e.depth();
  std::vector<PowerPlan> plans;
  plans.reserve(k);
  for (const auto& u : e.u) plans.push_back(plan_power(u));

  auto total = SemilinearSet::empty(e.sorted_vars());
  std::vector<Nat> d(k, 0);
  while (true) {
    ++stats_.power_branches;
    Expression e2;
    e2.group = group_;
    e2.vars = e.vars;
    e2.u.resize(k);
    e2.v.resize(k);
    Word lead;
    Valuation mult, shift;
    for (int i = 0; i < k; ++i) {
      const auto& pl = plans[i];
      Word pre, post;
      if (pl.rewrite) {
        pre = concat3(pl.head, word_power(pl.tilde, d[i]), pl.conj);
        post = pl.tail;
      }
      if (i == 0)
        lead = pre;
      else
        e2.v[i - 1] = concat(e2.v[i - 1], pre);
      e2.u[i] = pl.base;
      e2.v[i] = concat(post, e.v[i]);
      mult[e.vars[i]] = pl.m;
      shift[e.vars[i]] = d[i];
    }
    e2.v[k - 1] = concat(e2.v[k - 1], lead);
    for (auto& w : e2.v) w = group_->shortlex_reduce(w);
    total = total.unite(solve_posloop(e2).scale_shift(mult, shift));

    int j = k - 1;
    while (j >= 0) {
      if (++d[j] < plans[j].m) break;
      d[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return total;
}

SemilinearSet Solver::solve_posloop(const Expression& e) {
  const int k = e.depth();
  const auto dom = e.sorted_vars();
  auto total = SemilinearSet::empty(dom);
  const std::vector<Word> subst(k);  // dropped powers contribute u^0
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    ++stats_.case_splits;
    std::vector<char> keep(k);
    std::vector<std::string> kept, dropped;
    for (int i = 0; i < k; ++i) {
      keep[i] = (mask >> i) & 1u;
      (keep[i] ? kept : dropped).push_back(e.vars[i]);
    }
    auto S = solve_pos(restricted(group_, e, keep, subst));
    if (!kept.empty()) {
      std::sort(kept.begin(), kept.end());
      S = S.intersect(positivity_set(kept));
    }
    if (S.is_empty()) continue;
    if (!dropped.empty()) {
      std::sort(dropped.begin(), dropped.end());
      S = S.oplus(zero_point(dropped));
    }
    total = total.unite(S);
  }
  return total;
}

SemilinearSet Solver::solve_pos(const Expression& e) {
  switch (e.depth()) {
    case 0:
      return group_->word_problem(e.v[0]) ? SemilinearSet::universe({})
                                          : SemilinearSet::empty({});
    case 1: {
      Nat b = (consts_->lambda * static_cast<Nat>(e.v[0].size()) +
               consts_->epsilon) /
              static_cast<Nat>(e.u[0].size());
      std::vector<Nat> hits;
      for (Nat n = 0; n <= b; ++n)
        if (group_->word_problem(concat(word_power(e.u[0], n), e.v[0])))
          hits.push_back(n);
      if (hits.size() > 1)
        throw std::logic_error(
            "two exponents satisfied a single infinite-order power");
      if (hits.empty()) return SemilinearSet::empty({e.vars[0]});
      return SemilinearSet::point({{e.vars[0], hits[0]}});
    }
    case 2: {
      // u1^x v1 u2^y v2 = 1  <=>  v1 u2^y = (u1^-1)^x v2^-1
      const auto& alpha = group_->alphabet();
      auto S = depth2_canonical(
          e.v[0], e.u[1],
          group_->shortlex_reduce(inverse_word(alpha, e.u[0])),
          group_->shortlex_reduce(inverse_word(alpha, e.v[1])));
      return S.rename({{"n1", e.vars[1]}, {"n2", e.vars[0]}});
    }
    default:
      return solve_polygon(e);
  }
}

SemilinearSet Solver::solve_depth1(const Word& u, const std::string& var,
                                   const Word& v) {
  if (!consts_)
    throw std::invalid_argument("depth-1 scan works over base groups only");
  if (u.empty() || !geodesic_powers(u))
    throw std::invalid_argument(
        "depth-1 scan needs a base with geodesic literal powers");
  Expression e;
  e.group = group_;
  e.u = {u};
  e.vars = {var};
  e.v = {group_->shortlex_reduce(v)};
  return solve_pos(e);
}

SemilinearSet Solver::solve_depth2(const Word& u1, const std::string& x,
                                   const Word& v1, const Word& u2,
                                   const std::string& y, const Word& v2) {
  if (!consts_)
    throw std::invalid_argument("depth-2 solver works over base groups only");
  if (x == y) throw std::invalid_argument("depth-2 exponents must differ");
  if (u1.empty() || u2.empty() || !geodesic_powers(u1) ||
      !geodesic_powers(u2))
    throw std::invalid_argument(
        "depth-2 solver needs bases with geodesic literal powers");
  Expression e;
  e.group = group_;
  e.u = {u1, u2};
  e.vars = {x, y};
  e.v = {group_->shortlex_reduce(v1), group_->shortlex_reduce(v2)};
  return solve_pos(e);
}

SemilinearSet Solver::depth2_canonical(const Word& v1, const Word& u1,
                                       const Word& u2, const Word& v2) {
  std::ostringstream os;
  for (const Word* w : {&v1, &u1, &u2, &v2}) {
    for (Letter l : *w) os << l << '.';
    os << '/';
  }
  const std::string key = os.str();
  if (auto it = memo2_.find(key); it != memo2_.end()) return it->second;

  const auto& c = *consts_;
  const Nat l1 = static_cast<Nat>(u1.size());
  const Nat l2 = static_cast<Nat>(u2.size());
  const Nat m1 = static_cast<Nat>(v1.size());
  const Nat m2 = static_cast<Nat>(v2.size());
  const Nat N1 = c.lambda * (m1 + 2 * c.delta + c.kappa) + c.epsilon;
  const Nat N2 = c.lambda * (m2 + 2 * c.delta + c.kappa) + c.epsilon;

  // Rectangle scan: exact for every solution with n1*l1 <= N1+N2, and the
  // n2 range is wide enough to catch every partner exponent in there.
  const Nat n1hi = (N1 + N2 + l1 - 1) / l1;
  const Nat n2hi =
      (c.lambda * (N1 + N2 + m1 + m2 + l1) + c.epsilon) / l2 + 1;
  std::vector<Word> rhs(static_cast<size_t>(n2hi) + 1);
  for (Nat n2 = 0; n2 <= n2hi; ++n2)
    rhs[n2] = group_->shortlex_reduce(concat(word_power(u2, n2), v2));
  std::vector<LinearSet> points;
  for (Nat n1 = 0; n1 <= n1hi; ++n1) {
    Word lhs = group_->shortlex_reduce(concat(v1, word_power(u1, n1)));
    for (Nat n2 = 0; n2 <= n2hi; ++n2)
      if (lhs == rhs[n2]) points.push_back(LinearSet{{n1, n2}, {}});
  }
  auto S1 = SemilinearSet::make({"n1", "n2"}, std::move(points));

  auto S2 = parikh_image(progression_nfa(v1, u1, u2, v2));
  auto out = S1.unite(S2).pruned();
  memo2_.emplace(key, out);
  return out;
}

CountNfa Solver::progression_nfa(const Word& v1, const Word& u1,
                                 const Word& u2, const Word& v2) {
  if (!consts_)
    throw std::invalid_argument(
        "progression automata exist over base groups only");
  if (u1.empty() || u2.empty())
    throw std::invalid_argument("progression automata need nonempty bases");
  const auto& c = *consts_;
  const auto& alpha = group_->alphabet();
  const Nat l1 = static_cast<Nat>(u1.size());
  const Nat l2 = static_cast<Nat>(u2.size());
  const Nat m1 = static_cast<Nat>(v1.size());
  const Nat m2 = static_cast<Nat>(v2.size());
  const Nat N1 = c.lambda * (m1 + 2 * c.delta + c.kappa) + c.epsilon;
  const Nat N2 = c.lambda * (m2 + 2 * c.delta + c.kappa) + c.epsilon;
  const auto main = split_params(N1, N2, l1);

  CountNfa a;
  a.vars = {"n1", "n2"};
  a.initial = 0;
  a.finals = {1};

  // A state (i, b, j) says: the left side has read v1 u1^{a1} u1[:i], the
  // right side u2^{a2} u2[:j], and their difference is the short word b,
  // meaning v1 u1^{a1} u1[:i] = u2^{a2} u2[:j] b with (a1, a2) emitted.
  std::map<std::tuple<Nat, Word, Nat>, int> ids;
  std::vector<std::tuple<Nat, Word, Nat>> info = {{}, {}};
  std::deque<int> work;
  auto intern = [&](Nat i, const Word& b, Nat j) {
    auto [it, fresh] = ids.try_emplace({i, b, j}, static_cast<int>(info.size()));
    if (fresh) {
      info.push_back({i, b, j});
      work.push_back(it->second);
    }
    return it->second;
  };

  // Entry: jump N1 letters into the power on the left and k letters on the
  // right, keeping only jumps whose difference stays in the gamma ball.
  const Word lhs_entry =
      concat3(v1, word_power(u1, main.p), prefix_of(u1, main.r));
  const Nat k_entry =
      c.lambda * (m1 + N1 + 2 * c.delta + 2 * c.kappa) + c.epsilon;
  for (Nat k = 0; k <= k_entry; ++k) {
    const auto ks = split_params(k, 0, l2);
    Word rhs = concat(word_power(u2, ks.p), prefix_of(u2, ks.r));
    Word b = group_->shortlex_reduce(concat(inverse_word(alpha, rhs), lhs_entry));
    if (static_cast<Nat>(b.size()) > c.gamma) continue;
    a.edges.push_back({0, {main.p, ks.p}, intern(main.r, b, ks.r)});
  }

  // One-letter progress on either side; a completed block emits one count.
  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    const auto [i, b, j] = info[sid];
    Word bl = group_->shortlex_reduce(concat(b, Word{u1[i]}));
    if (static_cast<Nat>(bl.size()) <= c.gamma) {
      Nat ni = i + 1 == l1 ? 0 : i + 1;
      a.edges.push_back(
          {sid, {i + 1 == l1 ? 1 : 0, 0}, intern(ni, bl, j)});
    }
    Word br = group_->shortlex_reduce(
        concat(Word{alpha.inverse(u2[j])}, b));
    if (static_cast<Nat>(br.size()) <= c.gamma) {
      Nat nj = j + 1 == l2 ? 0 : j + 1;
      a.edges.push_back(
          {sid, {0, j + 1 == l2 ? 1 : 0}, intern(i, br, nj)});
    }
  }

  // Exit: complete the left side with N2 letters (s whole blocks, entered t
  // letters in) and the right side with k letters, then require both sides
  // to agree as group elements.
  const Word u1_tail = suffix_of(word_power(u1, main.s), main.t);
  const Nat k_exit =
      c.lambda * (m2 + N2 + 2 * c.delta + 2 * c.kappa) + c.epsilon;
  for (Nat k = 0; k <= k_exit; ++k) {
    const auto ks = split_params(0, k, l2);
    Word target = group_->shortlex_reduce(
        concat(suffix_of(word_power(u2, ks.s), ks.t), v2));
    for (size_t sid = 2; sid < info.size(); ++sid) {
      const auto& [i, b, j] = info[sid];
      if (i != main.t || j != ks.t) continue;
      if (group_->shortlex_reduce(concat(b, u1_tail)) != target) continue;
      a.edges.push_back({static_cast<int>(sid), {main.s, ks.s}, 1});
    }
  }

  a.num_states = static_cast<int>(info.size());
  const Nat realized = static_cast<Nat>(info.size()) - 2;
  stats_.depth2_nfa_states = std::max(stats_.depth2_nfa_states, realized);
  if (realized > l1 * l2 * static_cast<Nat>(cached_ball(c.gamma).size()))
    throw std::logic_error("progression automaton left its state budget");
  return a;
}

std::vector<Solver::Conjunct> Solver::split_polygon(const Expression& e) {
  const int k = e.depth();
  // Put a longest base at position 1 (0-based) by a cyclic factor shift;
  // the cuts below then always land in the longest power first.
  int best = 0;
  for (int i = 1; i < k; ++i)
    if (e.u[i].size() > e.u[best].size()) best = i;
  if (e.u[1].size() == e.u[best].size()) best = 1;
  Expression er;
  er.group = group_;
  const int shift = (best - 1 + k) % k;
  for (int i = 0; i < k; ++i) {
    int s = (i + shift) % k;
    er.u.push_back(e.u[s]);
    er.vars.push_back(e.vars[s]);
    er.v.push_back(e.v[s]);
  }

  Nat h = 0;
  if (consts_->xi > 0)
    h = consts_->xi +
        static_cast<Nat>(std::ceil(
            static_cast<double>(consts_->xi) * std::log2(2.0 * k)));
  const auto& bh = cached_ball(h);
  const auto& bh1 = cached_ball(h + 1);
  const auto& b2h1 = cached_ball(2 * h + 1);
  const auto& alpha = group_->alphabet();
  const auto& u = er.u;
  const auto& v = er.v;
  const auto& x = er.vars;

  auto fresh = [&](const char* stem, int i) {
    return std::string("#") + stem + std::to_string(i) + "_" +
           std::to_string(++fresh_counter_);
  };
  auto mk = [&](std::vector<Word> uu, std::vector<std::string> xx,
                std::vector<Word> vv) {
    if (static_cast<int>(uu.size()) >= k)
      throw std::logic_error("polygon subequation failed to shrink");
    Expression s;
    s.group = group_;
    s.u = std::move(uu);
    s.vars = std::move(xx);
    s.v = std::move(vv);
    for (auto& w : s.v) w = group_->shortlex_reduce(w);
    return s;
  };
  // The factors p..q of the rotated equation, as parallel u/var/v arrays.
  auto span_u = [&](int p, int q) {
    return std::vector<Word>(u.begin() + p, u.begin() + q + 1);
  };
  auto span_x = [&](int p, int q) {
    return std::vector<std::string>(x.begin() + p, x.begin() + q + 1);
  };
  auto span_v = [&](int p, int q) {
    return std::vector<Word>(v.begin() + p, v.begin() + q + 1);
  };
  auto append = [](auto vec, auto tail) {
    vec.insert(vec.end(), tail.begin(), tail.end());
    return vec;
  };

  std::vector<Conjunct> out;

  // Family 1.1: the second power meets the constant v_j further around the
  // polygon. Cut u2 at a2, v_j at b, difference w.
  for (int j = 2; j < k; ++j)
    for (Nat a2 = 0; a2 <= static_cast<Nat>(u[1].size()); ++a2)
      for (Nat b = 0; b <= static_cast<Nat>(v[j].size()); ++b)
        for (const auto& w : bh) {
          auto y2 = fresh("y", 1), z2 = fresh("z", 1);
          Conjunct cj;
          cj.subs.push_back(mk(
              append(std::vector<Word>{u[0], u[1]}, span_u(j + 1, k - 1)),
              append(std::vector<std::string>{x[0], y2}, span_x(j + 1, k - 1)),
              append(std::vector<Word>{v[0], concat3(prefix_of(u[1], a2), w,
                                                     suffix_of(v[j], b))},
                     span_v(j + 1, k - 1))));
          cj.subs.push_back(
              mk(span_u(1, j), append(std::vector<std::string>{z2},
                                      span_x(2, j)),
                 append(span_v(1, j - 1),
                        std::vector<Word>{concat3(
                            prefix_of(v[j], b), inverse_word(alpha, w),
                            suffix_of(u[1], a2))})));
          cj.links.push_back({x[1], y2, z2});
          out.push_back(std::move(cj));
        }

  // Family 1.2: the second power meets another power u_j. Cut u2 at a2,
  // u_j at cc, difference w; both exponents split.
  for (int j = 3; j < k; ++j)
    for (Nat a2 = 0; a2 <= static_cast<Nat>(u[1].size()); ++a2)
      for (Nat cc = 0; cc <= static_cast<Nat>(u[j].size()); ++cc)
        for (const auto& w : bh) {
          auto y2 = fresh("y", 1), z2 = fresh("z", 1);
          auto yj = fresh("y", j), zj = fresh("z", j);
          Conjunct cj;
          cj.subs.push_back(mk(
              append(std::vector<Word>{u[0], u[1], u[j]}, span_u(j + 1, k - 1)),
              append(std::vector<std::string>{x[0], y2, zj},
                     span_x(j + 1, k - 1)),
              append(std::vector<Word>{v[0],
                                       concat3(prefix_of(u[1], a2), w,
                                               suffix_of(u[j], cc)),
                                       v[j]},
                     span_v(j + 1, k - 1))));
          cj.subs.push_back(
              mk(append(span_u(1, j - 1), std::vector<Word>{u[j]}),
                 append(append(std::vector<std::string>{z2}, span_x(2, j - 1)),
                        std::vector<std::string>{yj}),
                 append(span_v(1, j - 1),
                        std::vector<Word>{concat3(
                            prefix_of(u[j], cc), inverse_word(alpha, w),
                            suffix_of(u[1], a2))})));
          cj.links.push_back({x[1], y2, z2});
          cj.links.push_back({x[j], yj, zj});
          out.push_back(std::move(cj));
        }

  // Family 2: the first power's neighbourhood. 2.1/2.2 cut v1 or u1
  // against v2; 2.3/2.4 cut them against a point inside v2; 2.5/2.6 are
  // the mirror images, cutting into u3's territory.
  for (Nat b = 0; b <= static_cast<Nat>(v[0].size()); ++b)
    for (const auto& w : bh) {  // 2.1
      Conjunct cj;
      cj.subs.push_back(mk({u[1]}, {x[1]},
                           {concat(w, suffix_of(v[0], b))}));
      cj.subs.push_back(mk(
          append(std::vector<Word>{u[0]}, span_u(2, k - 1)),
          append(std::vector<std::string>{x[0]}, span_x(2, k - 1)),
          append(std::vector<Word>{concat3(prefix_of(v[0], b),
                                           inverse_word(alpha, w), v[1])},
                 span_v(2, k - 1))));
      out.push_back(std::move(cj));
    }

  for (Nat aa = 0; aa <= static_cast<Nat>(u[0].size()); ++aa)
    for (const auto& w : bh) {  // 2.2
      auto y1 = fresh("y", 0), z1 = fresh("z", 0);
      Conjunct cj;
      cj.subs.push_back(mk({u[0], u[1]}, {z1, x[1]},
                           {v[0], concat(w, suffix_of(u[0], aa))}));
      cj.subs.push_back(mk(
          append(std::vector<Word>{u[0]}, span_u(2, k - 1)),
          append(std::vector<std::string>{y1}, span_x(2, k - 1)),
          append(std::vector<Word>{concat3(prefix_of(u[0], aa),
                                           inverse_word(alpha, w), v[1])},
                 span_v(2, k - 1))));
      cj.links.push_back({x[0], y1, z1});
      out.push_back(std::move(cj));
    }

  for (Nat b = 0; b <= static_cast<Nat>(v[0].size()); ++b)
    for (Nat b2 = 0; b2 <= static_cast<Nat>(v[1].size()); ++b2)
      for (const auto& w : b2h1) {  // 2.3
        Conjunct cj;
        cj.subs.push_back(
            mk({u[1]}, {x[1]},
               {concat3(prefix_of(v[1], b2), w, suffix_of(v[0], b))}));
        cj.subs.push_back(mk(
            append(std::vector<Word>{u[0]}, span_u(2, k - 1)),
            append(std::vector<std::string>{x[0]}, span_x(2, k - 1)),
            append(std::vector<Word>{concat3(prefix_of(v[0], b),
                                             inverse_word(alpha, w),
                                             suffix_of(v[1], b2))},
                   span_v(2, k - 1))));
        out.push_back(std::move(cj));
      }

  for (Nat aa = 0; aa <= static_cast<Nat>(u[0].size()); ++aa)
    for (Nat b2 = 0; b2 <= static_cast<Nat>(v[1].size()); ++b2)
      for (const auto& w : b2h1) {  // 2.4
        auto y1 = fresh("y", 0), z1 = fresh("z", 0);
        Conjunct cj;
        cj.subs.push_back(
            mk({u[0], u[1]}, {z1, x[1]},
               {v[0], concat3(prefix_of(v[1], b2), w, suffix_of(u[0], aa))}));
        cj.subs.push_back(mk(
            append(std::vector<Word>{u[0]}, span_u(2, k - 1)),
            append(std::vector<std::string>{y1}, span_x(2, k - 1)),
            append(std::vector<Word>{concat3(prefix_of(u[0], aa),
                                             inverse_word(alpha, w),
                                             suffix_of(v[1], b2))},
                   span_v(2, k - 1))));
        cj.links.push_back({x[0], y1, z1});
        out.push_back(std::move(cj));
      }

  for (Nat b = 0; b <= static_cast<Nat>(v[0].size()); ++b)
    for (Nat cc = 0; cc <= static_cast<Nat>(u[2].size()); ++cc)
      for (const auto& w : b2h1) {  // 2.5
        auto y3 = fresh("y", 2), z3 = fresh("z", 2);
        Conjunct cj;
        cj.subs.push_back(
            mk({u[1], u[2]}, {x[1], y3},
               {v[1], concat3(prefix_of(u[2], cc), inverse_word(alpha, w),
                              suffix_of(v[0], b))}));
        cj.subs.push_back(mk(
            append(append(std::vector<Word>{u[2]}, span_u(3, k - 1)),
                   std::vector<Word>{u[0]}),
            append(append(std::vector<std::string>{z3}, span_x(3, k - 1)),
                   std::vector<std::string>{x[0]}),
            append(append(std::vector<Word>{v[2]}, span_v(3, k - 1)),
                   std::vector<Word>{concat3(prefix_of(v[0], b), w,
                                             suffix_of(u[2], cc))})));
        cj.links.push_back({x[2], y3, z3});
        out.push_back(std::move(cj));
      }

  for (Nat aa = 0; aa <= static_cast<Nat>(u[0].size()); ++aa)
    for (Nat a2 = 0; a2 <= static_cast<Nat>(u[1].size()); ++a2)
      for (Nat cc = 0; cc <= static_cast<Nat>(u[2].size()); ++cc)
        for (const auto& w1 : bh)
          for (const auto& w2 : bh1) {  // 2.6
            Word w = group_->shortlex_reduce(
                concat(inverse_word(alpha, w1), w2));
            auto y1 = fresh("y", 0), z1 = fresh("z", 0);
            auto y2 = fresh("y", 1), z2 = fresh("z", 1);
            auto y3 = fresh("y", 2), z3 = fresh("z", 2);
            Conjunct cj;
            cj.subs.push_back(
                mk({u[0], u[1]}, {z1, y2},
                   {v[0], concat3(prefix_of(u[1], a2), w1,
                                  suffix_of(u[0], aa))}));
            cj.subs.push_back(
                mk({u[1], u[2]}, {z2, y3},
                   {v[1], concat3(prefix_of(u[2], cc),
                                  inverse_word(alpha, w2),
                                  suffix_of(u[1], a2))}));
            cj.subs.push_back(mk(
                append(append(std::vector<Word>{u[2]}, span_u(3, k - 1)),
                       std::vector<Word>{u[0]}),
                append(append(std::vector<std::string>{z3},
                              span_x(3, k - 1)),
                       std::vector<std::string>{y1}),
                append(append(std::vector<Word>{v[2]}, span_v(3, k - 1)),
                       std::vector<Word>{concat3(prefix_of(u[0], aa), w,
                                                 suffix_of(u[2], cc))})));
            cj.links.push_back({x[0], y1, z1});
            cj.links.push_back({x[1], y2, z2});
            cj.links.push_back({x[2], y3, z3});
            out.push_back(std::move(cj));
          }

  return out;
}

SemilinearSet Solver::solve_polygon(const Expression& e) {
  const auto dom = e.sorted_vars();
  auto total = SemilinearSet::empty(dom);
  for (auto& cj : split_polygon(e)) {
    ++stats_.case_splits;
    auto S = SemilinearSet::universe({});
    bool dead = false;
    for (const auto& sub : cj.subs) {
      auto sol = solve_expr(sub);
      if (sol.is_empty()) {
        dead = true;
        break;
      }
      S = S.oplus(sol);
    }
    if (dead) continue;
    for (const auto& ln : cj.links)
      S = apply_link(S, ln.target, ln.left, ln.right);
    total = total.unite(S.project(dom));
  }
  return total;
}

SemilinearSet Solver::solve_direct_z(const Expression& e) {
  auto dz = std::dynamic_pointer_cast<const DirectZGroup>(group_);
  Expression ei;
  ei.group = dz->inner();
  ei.vars = e.vars;
  std::map<std::string, Nat> coeff;
  Nat shift = 0;
  for (int i = 0; i < e.depth(); ++i) {
    ei.u.push_back(dz->project_inner(e.u[i]));
    coeff[e.vars[i]] = dz->project_z(e.u[i]);
  }
  for (const auto& w : e.v) {
    ei.v.push_back(dz->project_inner(w));
    shift += dz->project_z(w);
  }

  Solver inner(dz->inner());
  auto sol = inner.solve(ei);
  stats_.case_splits += inner.stats().case_splits;
  stats_.torsion_branches += inner.stats().torsion_branches;
  stats_.power_branches += inner.stats().power_branches;
  stats_.depth2_nfa_states =
      std::max(stats_.depth2_nfa_states, inner.stats().depth2_nfa_states);
  stats_.max_recursion_depth =
      std::max(stats_.max_recursion_depth, inner.stats().max_recursion_depth);

  // Central coordinate: sum(coeff_i * x_i) + shift = 0 over the naturals,
  // described by the Hilbert basis of the homogenized single-row system.
  const auto vars = e.sorted_vars();
  std::vector<Row> cols;
  for (const auto& n : vars) cols.push_back({coeff[n]});
  cols.push_back({shift});
  std::vector<Row> offsets, periods;
  for (const auto& s : minimal_homogeneous_solutions(cols)) {
    Row head(s.begin(), s.end() - 1);
    if (s.back() == 0)
      periods.push_back(std::move(head));
    else if (s.back() == 1)
      offsets.push_back(std::move(head));
  }
  std::vector<LinearSet> comps;
  for (auto& o : offsets) comps.push_back({o, periods});
  auto constraint = SemilinearSet::make(vars, std::move(comps)).pruned();
  return sol.intersect(constraint);
}

DecideOutcome decide(const Expression& e, const DecideOptions& opts) {
  auto solve_route = [&]() {
    DecideOutcome out;
    out.route_used = 'a';
    Solver s(e.group);
    auto set = s.solve(e);
    if (set.is_empty()) return out;
    auto w = lex_min_offset(set);
    if (!verify(e, w))
      throw std::logic_error("solution-set witness failed re-verification");
    out.yes = true;
    out.witness = std::move(w);
    return out;
  };
  auto grid_route = [&](Nat bound) {
    DecideOutcome out;
    out.route_used = 'b';
    auto grid = grid_nfa(e, bound);
    auto res = acyclic_membership(*e.group, grid.nfa);
    if (!res.accepted) return out;
    auto w = decode_grid_run(e, grid, res.run_edges);
    if (!verify(e, w))
      throw std::logic_error("grid witness failed re-verification");
    out.yes = true;
    out.witness = std::move(w);
    return out;
  };

  switch (opts.route) {
    case 'a':
      return solve_route();
    case 'b': {
      Nat bound;
      if (opts.bound) {
        bound = *opts.bound;
      } else {
        Solver s(e.group);
        auto set = s.solve(e);
        bound = set.is_empty() ? 0 : set.magnitude() + 1;
      }
      return grid_route(bound);
    }
    case 'x': {
      try {
        return solve_route();
      } catch (const UnsupportedInstance&) {
        if (!opts.bound) throw;
        return grid_route(*opts.bound);
      }
    }
    default:
      throw std::invalid_argument("decision route must be a, b or x");
  }
}

SystemOutcome solve_system(const std::vector<Expression>& es) {
  if (es.empty()) throw std::invalid_argument("empty equation system");
  const GroupPtr& g = es[0].group;
  for (const auto& e : es)
    if (e.group.get() != g.get())
      throw std::invalid_argument("system equations must share one group");

  Solver solver(g);
  auto S = SemilinearSet::universe({});
  std::map<std::string, std::vector<std::string>> copies;
  for (size_t j = 0; j < es.size(); ++j) {
    Expression r = es[j];
    for (auto& x : r.vars) {
      std::string c = x + "#" + std::to_string(j);
      copies[x].push_back(c);
      x = c;
    }
    S = S.oplus(solver.solve(r));
  }

  for (const auto& [orig, cs] : copies) {
    if (cs.size() < 2) continue;
    std::vector<std::string> d(cs);
    std::sort(d.begin(), d.end());
    LinearSet diag;
    diag.offset.assign(d.size(), 0);
    diag.periods = {Row(d.size(), 1)};
    std::vector<std::string> rest;
    for (const auto& n : S.vars())
      if (std::find(d.begin(), d.end(), n) == d.end()) rest.push_back(n);
    S = S.intersect(SemilinearSet::make(d, {diag})
                        .oplus(SemilinearSet::universe(rest)));
  }

  std::vector<std::string> reps;
  std::map<std::string, std::string> back;
  for (const auto& [orig, cs] : copies) {
    reps.push_back(cs[0]);
    back[cs[0]] = orig;
  }
  std::sort(reps.begin(), reps.end());

  SystemOutcome out;
  out.solutions = S.project(reps).rename(back);
  out.satisfiable = !out.solutions.is_empty();
  if (out.satisfiable) {
    auto w = lex_min_offset(out.solutions);
    for (const auto& e : es)
      if (!verify(e, w))
        throw std::logic_error("system witness failed re-verification");
    out.witness = std::move(w);
  }
  return out;
}

}  // namespace hypersack
