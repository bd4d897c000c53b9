#include "hypersack/automata.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace hypersack {

namespace {

void validate_states(int num_states, int initial,
                     const std::vector<int>& finals) {
  if (num_states < 1)
    throw std::invalid_argument("automaton needs at least one state");
  if (initial < 0 || initial >= num_states)
    throw std::invalid_argument("initial state out of range");
  for (int f : finals)
    if (f < 0 || f >= num_states)
      throw std::invalid_argument("final state out of range");
}

template <typename EdgeT>
void validate_edges(int num_states, const std::vector<EdgeT>& edges) {
  for (const auto& e : edges)
    if (e.from < 0 || e.from >= num_states || e.to < 0 || e.to >= num_states)
      throw std::invalid_argument("edge endpoint out of range");
}

// Topological order of all states; empty result if the graph has a cycle.
std::vector<int> topo_order(int n, const std::vector<WordNfa::Edge>& edges) {
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (const auto& e : edges) {
    ++indeg[e.to];
    out[e.from].push_back(e.to);
  }
  std::deque<int> q;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) q.push_back(i);
  std::vector<int> order;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    order.push_back(v);
    for (int w : out[v])
      if (--indeg[w] == 0) q.push_back(w);
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

struct Bits {
  std::vector<uint64_t> w;
  explicit Bits(int n = 0) : w((n + 63) / 64, 0) {}
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w[i >> 6] |= uint64_t(1) << (i & 63); }
};

template <typename Fn>
void for_each_bit(const Bits& b, Fn&& fn) {
  for (size_t blk = 0; blk < b.w.size(); ++blk) {
    uint64_t m = b.w[blk];
    while (m) {
      int bit = __builtin_ctzll(m);
      m &= m - 1;
      fn(static_cast<int>(blk * 64 + bit));
    }
  }
}

// ---------------------------------------------------------------------------
// Membership for free groups: saturate with inverse-pair closure rules,
// keeping enough provenance to reassemble an accepting run.

struct Piece {
  int from, to;
  Letter letter;  // -1 for the empty label
  int orig;       // original edge index
};

struct EpsEdge {
  int from, to;
  int base_piece;  // >= 0: an original empty-label piece
  int in_piece, out_piece;  // derived: in_piece, (q => r), out_piece
};

class Saturator {
 public:
  Saturator(const Group& g, const WordNfa& a) : g_(g), a_(a) {
    n_ = a.num_states;
    for (size_t ei = 0; ei < a.edges.size(); ++ei) {
      const WordNfa::Edge& e = a.edges[ei];
      if (e.label.empty()) {
        pieces_.push_back({e.from, e.to, -1, static_cast<int>(ei)});
        continue;
      }
      int prev = e.from;
      for (size_t j = 0; j < e.label.size(); ++j) {
        int next = j + 1 == e.label.size() ? e.to : n_++;
        pieces_.push_back({prev, next, e.label[j], static_cast<int>(ei)});
        prev = next;
      }
    }
    in_by_state_.resize(n_);
    out_by_state_.resize(n_);
    for (size_t pi = 0; pi < pieces_.size(); ++pi) {
      if (pieces_[pi].letter < 0) continue;
      in_by_state_[pieces_[pi].to].push_back(static_cast<int>(pi));
      out_by_state_[pieces_[pi].from].push_back(static_cast<int>(pi));
    }
    reach_.assign(n_, Bits(n_));
    reach_in_.assign(n_, Bits(n_));
    pair_edge_.assign(static_cast<size_t>(n_) * n_, -1);
  }

  MembershipResult run() {
    for (int t = 0; t < n_; ++t) {
      reach_[t].set(t);
      reach_in_[t].set(t);
      worklist_.emplace_back(t, t);
    }
    for (size_t pi = 0; pi < pieces_.size(); ++pi)
      if (pieces_[pi].letter < 0)
        add_edge(EpsEdge{pieces_[pi].from, pieces_[pi].to,
                         static_cast<int>(pi), -1, -1});
    while (!worklist_.empty()) {
      auto [q, r] = worklist_.front();
      worklist_.pop_front();
      for (int pi : in_by_state_[q])
        for (int po : out_by_state_[r])
          if (g_.alphabet().inverse(pieces_[pi].letter) == pieces_[po].letter)
            add_edge(EpsEdge{pieces_[pi].from, pieces_[po].to, -1, pi, po});
    }

    MembershipResult res;
    for (int f : a_.finals) {
      if (f == a_.initial || reach_[a_.initial].test(f)) {
        res.accepted = true;
        res.run_edges = expand(a_.initial, f);
        break;
      }
    }
    return res;
  }

 private:
  void add_pair(int t, int u, int eid) {
    if (reach_[t].test(u)) return;
    reach_[t].set(u);
    reach_in_[u].set(t);
    pair_edge_[static_cast<size_t>(t) * n_ + u] = eid;
    worklist_.emplace_back(t, u);
  }

  void add_edge(EpsEdge e) {
    if (reach_[e.from].test(e.to)) return;
    if (eps_edges_.size() > 2000000)
      throw std::runtime_error("saturation budget exceeded");
    int eid = static_cast<int>(eps_edges_.size());
    eps_edges_.push_back(e);
    // Close transitively: everything reaching e.from now reaches everything
    // reachable from e.to. Both sides are reflexive, so the pair (from, to)
    // itself is covered.
    std::vector<int> sources;
    for_each_bit(reach_in_[e.from], [&](int t) { sources.push_back(t); });
    for (int t : sources)
      for_each_bit(reach_[e.to], [&](int u) { add_pair(t, u, eid); });
  }

  // Emits the run of pieces witnessing t => u, then maps pieces back to
  // original edges.
  std::vector<int> expand(int t0, int u0) {
    std::vector<int> run_pieces;
    struct Task {
      int kind;  // 0 pair, 1 edge, 2 piece
      int a, b;
    };
    std::vector<Task> stack{{0, t0, u0}};
    while (!stack.empty()) {
      Task task = stack.back();
      stack.pop_back();
      if (task.kind == 2) {
        run_pieces.push_back(task.a);
        continue;
      }
      if (task.kind == 0) {
        if (task.a == task.b) continue;
        int eid = pair_edge_[static_cast<size_t>(task.a) * n_ + task.b];
        const EpsEdge& e = eps_edges_.at(eid);
        stack.push_back({0, e.to, task.b});
        stack.push_back({1, eid, 0});
        stack.push_back({0, task.a, e.from});
        continue;
      }
      const EpsEdge& e = eps_edges_.at(task.a);
      if (e.base_piece >= 0) {
        run_pieces.push_back(e.base_piece);
        continue;
      }
      stack.push_back({2, e.out_piece, 0});
      stack.push_back({0, pieces_[e.in_piece].to, pieces_[e.out_piece].from});
      stack.push_back({2, e.in_piece, 0});
    }
    std::vector<int> run;
    for (int pi : run_pieces) {
      int orig = pieces_[pi].orig;
      if (run.empty() || run.back() != orig) run.push_back(orig);
    }
    return run;
  }

  const Group& g_;
  const WordNfa& a_;
  int n_;
  std::vector<Piece> pieces_;
  std::vector<std::vector<int>> in_by_state_, out_by_state_;
  std::vector<Bits> reach_, reach_in_;
  std::vector<int> pair_edge_;
  std::vector<EpsEdge> eps_edges_;
  std::deque<std::pair<int, int>> worklist_;
};

MembershipResult finite_membership(const FiniteGroup& g, const WordNfa& a,
                                   const std::vector<int>& order) {
  int n = a.num_states, m = g.order();
  int identity = g.eval(Word{});
  std::vector<std::vector<WordNfa::Edge>> out(n);
  std::vector<std::vector<int>> out_ids(n);
  for (size_t ei = 0; ei < a.edges.size(); ++ei) {
    out[a.edges[ei].from].push_back(a.edges[ei]);
    out_ids[a.edges[ei].from].push_back(static_cast<int>(ei));
  }
  auto slot = [m](int state, int elem) {
    return static_cast<size_t>(state) * m + elem;
  };
  std::vector<char> reached(static_cast<size_t>(n) * m, 0);
  std::vector<int> par_state(static_cast<size_t>(n) * m, -1);
  std::vector<int> par_elem(static_cast<size_t>(n) * m, -1);
  std::vector<int> par_edge(static_cast<size_t>(n) * m, -1);
  reached[slot(a.initial, identity)] = 1;
  for (int state : order) {
    for (int elem = 0; elem < m; ++elem) {
      if (!reached[slot(state, elem)]) continue;
      for (size_t k = 0; k < out[state].size(); ++k) {
        const WordNfa::Edge& e = out[state][k];
        int ne = g.mul(elem, g.eval(e.label));
        if (reached[slot(e.to, ne)]) continue;
        reached[slot(e.to, ne)] = 1;
        par_state[slot(e.to, ne)] = state;
        par_elem[slot(e.to, ne)] = elem;
        par_edge[slot(e.to, ne)] = out_ids[state][k];
      }
    }
  }
  MembershipResult res;
  for (int f : a.finals) {
    if (!reached[slot(f, identity)]) continue;
    res.accepted = true;
    int state = f, elem = identity;
    while (par_edge[slot(state, elem)] >= 0) {
      size_t s = slot(state, elem);
      res.run_edges.push_back(par_edge[s]);
      state = par_state[s];
      elem = par_elem[s];
    }
    std::reverse(res.run_edges.begin(), res.run_edges.end());
    break;
  }
  return res;
}

MembershipResult composite_membership(const Group& g, const WordNfa& a,
                                      const std::vector<int>& order) {
  constexpr size_t kFormCap = 100000;
  int n = a.num_states;
  std::vector<std::vector<int>> out_ids(n);
  for (size_t ei = 0; ei < a.edges.size(); ++ei)
    out_ids[a.edges[ei].from].push_back(static_cast<int>(ei));
  struct Parent {
    int state = -1;
    Word word;
    int edge = -1;
  };
  std::vector<std::map<Word, Parent>> reach(n);
  reach[a.initial].emplace(Word{}, Parent{});
  for (int state : order) {
    for (const auto& [word, parent] : reach[state]) {
      for (int ei : out_ids[state]) {
        const WordNfa::Edge& e = a.edges[ei];
        Word nw = g.shortlex_reduce(concat(word, e.label));
        auto& bucket = reach[e.to];
        if (bucket.count(nw)) continue;
        if (bucket.size() >= kFormCap)
          throw std::runtime_error("membership form budget exceeded");
        bucket.emplace(std::move(nw), Parent{state, word, ei});
      }
    }
  }
  MembershipResult res;
  for (int f : a.finals) {
    auto it = reach[f].find(Word{});
    if (it == reach[f].end()) continue;
    res.accepted = true;
    int state = f;
    Word word;
    while (true) {
      const Parent& p = reach[state].at(word);
      if (p.edge < 0) break;
      res.run_edges.push_back(p.edge);
      state = p.state;
      word = p.word;
    }
    std::reverse(res.run_edges.begin(), res.run_edges.end());
    break;
  }
  return res;
}

}  // namespace

bool is_acyclic(const WordNfa& a) {
  return !topo_order(a.num_states, a.edges).empty() || a.num_states == 0;
}

MembershipResult acyclic_membership(const Group& g, const WordNfa& a) {
  validate_states(a.num_states, a.initial, a.finals);
  validate_edges(a.num_states, a.edges);
  for (const auto& e : a.edges)
    for (Letter l : e.label)
      if (l < 0 || l >= g.alphabet().size())
        throw std::invalid_argument("edge label letter out of range");
  std::vector<int> order = topo_order(a.num_states, a.edges);
  if (order.empty())
    throw std::invalid_argument("membership needs an acyclic automaton");
  switch (g.kind()) {
    case GroupKind::Free:
      return Saturator(g, a).run();
    case GroupKind::Finite:
      return finite_membership(static_cast<const FiniteGroup&>(g), a, order);
    default:
      return composite_membership(g, a, order);
  }
}

// ---------------------------------------------------------------------------
// Grid automata

GridNfa grid_nfa(const Expression& e, Nat p) {
  if (p < 0) throw std::invalid_argument("grid bound must be nonnegative");
  int k = e.depth();
  GridNfa grid;
  if (k == 0) {
    // No power rows: the automaton just spells the constant word.
    grid.nfa.num_states = 2;
    grid.nfa.initial = 0;
    grid.nfa.finals = {1};
    grid.nfa.edges.push_back({0, e.v[0], 1});
    grid.row.push_back(0);
    grid.is_power.push_back(0);
    return grid;
  }
  Nat cols = p + 1;
  grid.nfa.num_states = static_cast<int>((k + 1) * cols);
  auto id = [&](int i, Nat j) { return static_cast<int>((i - 1) * cols + j); };
  grid.nfa.initial = id(1, 0);
  grid.nfa.finals = {id(k + 1, 0)};
  for (int i = 1; i <= k; ++i) {
    for (Nat j = 0; j < p; ++j) {
      grid.nfa.edges.push_back({id(i, j), e.u[i - 1], id(i, j + 1)});
      grid.row.push_back(i);
      grid.is_power.push_back(1);
      grid.nfa.edges.push_back({id(i, j), Word{}, id(i, j + 1)});
      grid.row.push_back(i);
      grid.is_power.push_back(0);
    }
    grid.nfa.edges.push_back({id(i, p), e.v[i - 1], id(i + 1, 0)});
    grid.row.push_back(i);
    grid.is_power.push_back(0);
  }
  return grid;
}

Valuation decode_grid_run(const Expression& e, const GridNfa& grid,
                          const std::vector<int>& run_edges) {
  Valuation val;
  for (const auto& v : e.vars) val[v] = 0;
  for (int ei : run_edges) {
    if (ei < 0 || ei >= static_cast<int>(grid.nfa.edges.size()))
      throw std::invalid_argument("run edge out of range");
    if (grid.is_power[ei]) ++val[e.vars[grid.row[ei] - 1]];
  }
  return val;
}

// ---------------------------------------------------------------------------
// JSON round trips

WordNfa word_nfa_from_json(const Group& g, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("bad automaton JSON: ") +
                                e.what());
  }
  WordNfa a;
  try {
    a.num_states = doc.at("states").get<int>();
    a.initial = doc.at("initial").get<int>();
    a.finals = doc.at("finals").get<std::vector<int>>();
    for (const auto& t : doc.at("transitions")) {
      WordNfa::Edge e;
      e.from = t.at("from").get<int>();
      e.to = t.at("to").get<int>();
      e.label = g.parse_word(t.at("label").get<std::string>());
      a.edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad automaton JSON: ") +
                                e.what());
  }
  validate_states(a.num_states, a.initial, a.finals);
  validate_edges(a.num_states, a.edges);
  return a;
}

std::string word_nfa_to_json(const Group& g, const WordNfa& a) {
  nlohmann::json doc;
  doc["states"] = a.num_states;
  doc["initial"] = a.initial;
  doc["finals"] = a.finals;
  doc["transitions"] = nlohmann::json::array();
  for (const auto& e : a.edges)
    doc["transitions"].push_back({{"from", e.from},
                                  {"label", g.word_text(e.label)},
                                  {"to", e.to}});
  return doc.dump(2);
}

CountNfa count_nfa_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("bad automaton JSON: ") +
                                e.what());
  }
  CountNfa a;
  try {
    a.vars = doc.at("vars").get<std::vector<std::string>>();
    a.num_states = doc.at("states").get<int>();
    a.initial = doc.at("initial").get<int>();
    a.finals = doc.at("finals").get<std::vector<int>>();
    for (const auto& t : doc.at("transitions")) {
      CountNfa::Edge e;
      e.from = t.at("from").get<int>();
      e.to = t.at("to").get<int>();
      e.emit = t.at("emit").get<Row>();
      a.edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad automaton JSON: ") +
                                e.what());
  }
  validate_states(a.num_states, a.initial, a.finals);
  validate_edges(a.num_states, a.edges);
  for (const auto& e : a.edges) {
    if (e.emit.size() != a.vars.size())
      throw std::invalid_argument("emission dimension mismatch");
    for (Nat x : e.emit)
      if (x < 0) throw std::invalid_argument("negative emission");
  }
  return a;
}

std::string count_nfa_to_json(const CountNfa& a) {
  nlohmann::json doc;
  doc["vars"] = a.vars;
  doc["states"] = a.num_states;
  doc["initial"] = a.initial;
  doc["finals"] = a.finals;
  doc["transitions"] = nlohmann::json::array();
  for (const auto& e : a.edges)
    doc["transitions"].push_back(
        {{"from", e.from}, {"emit", e.emit}, {"to", e.to}});
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Parikh images

namespace {

struct TrimmedCounts {
  int m = 0;
  int initial = 0;
  std::vector<char> is_final;
  std::vector<CountNfa::Edge> edges;
};

// Keep states on some path from the initial state to a final state.
std::optional<TrimmedCounts> trim_counts(const CountNfa& a) {
  int n = a.num_states;
  std::vector<std::vector<int>> out(n), in(n);
  for (const auto& e : a.edges) {
    out[e.from].push_back(e.to);
    in[e.to].push_back(e.from);
  }
  auto bfs = [n](const std::vector<std::vector<int>>& adj,
                 std::vector<int> seeds) {
    std::vector<char> seen(n, 0);
    std::deque<int> q;
    for (int s : seeds)
      if (!seen[s]) {
        seen[s] = 1;
        q.push_back(s);
      }
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          q.push_back(w);
        }
    }
    return seen;
  };
  std::vector<char> fwd = bfs(out, {a.initial});
  std::vector<char> bwd = bfs(in, a.finals);
  std::vector<int> remap(n, -1);
  TrimmedCounts t;
  for (int i = 0; i < n; ++i)
    if (fwd[i] && bwd[i]) remap[i] = t.m++;
  if (remap[a.initial] < 0) return std::nullopt;
  t.initial = remap[a.initial];
  t.is_final.assign(t.m, 0);
  for (int f : a.finals)
    if (remap[f] >= 0) t.is_final[remap[f]] = 1;
  for (const auto& e : a.edges)
    if (remap[e.from] >= 0 && remap[e.to] >= 0)
      t.edges.push_back({remap[e.from], e.emit, remap[e.to]});
  return t;
}

Row add_rows(const Row& a, const Row& b) {
  Row c = a;
  for (size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

// Offsets and cycle periods per state subset; exact but can blow up, in
// which case it reports failure and the caller switches routes.
std::optional<SemilinearSet> kernel_route(const TrimmedCounts& t,
                                          const std::vector<std::string>& vars,
                                          size_t d) {
  long long budget = 4000000;
  int m = t.m;
  std::vector<std::vector<CountNfa::Edge>> by_from(m);
  for (const auto& e : t.edges) by_from[e.from].push_back(e);

  std::vector<LinearSet> components;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    if (!(mask >> t.initial & 1)) continue;
    bool has_final = false;
    for (int i = 0; i < m; ++i)
      if ((mask >> i & 1) && t.is_final[i]) has_final = true;
    if (!has_final) continue;
    int csize = __builtin_popcount(mask);

    // Emission sums of runs that visit exactly this subset, each state at
    // most |C| times.
    std::set<Row> offsets;
    std::set<std::vector<Nat>> seen_nodes;
    std::vector<int> counts(m, 0);
    Row sum(d, 0);
    auto key = [&](int state) {
      std::vector<Nat> k(1, state);
      k.insert(k.end(), counts.begin(), counts.end());
      k.insert(k.end(), sum.begin(), sum.end());
      return k;
    };
    bool blown = false;
    auto dfs = [&](auto&& self, int state) -> void {
      if (blown) return;
      if (--budget < 0) {
        blown = true;
        return;
      }
      if (t.is_final[state]) {
        bool all = true;
        for (int i = 0; i < m; ++i)
          if ((mask >> i & 1) && counts[i] == 0) all = false;
        if (all) offsets.insert(sum);
      }
      for (const auto& e : by_from[state]) {
        if (!(mask >> e.to & 1) || counts[e.to] >= csize) continue;
        ++counts[e.to];
        for (size_t i = 0; i < d; ++i) sum[i] += e.emit[i];
        if (seen_nodes.insert(key(e.to)).second) self(self, e.to);
        for (size_t i = 0; i < d; ++i) sum[i] -= e.emit[i];
        --counts[e.to];
      }
    };
    counts[t.initial] = 1;
    seen_nodes.insert(key(t.initial));
    dfs(dfs, t.initial);
    if (blown) return std::nullopt;
    if (offsets.empty()) continue;

    // Emission sums of simple cycles inside the subset, each enumerated
    // from its smallest state.
    std::set<Row> periods;
    for (int anchor = 0; anchor < m; ++anchor) {
      if (!(mask >> anchor & 1)) continue;
      std::vector<char> on_path(m, 0);
      Row csum(d, 0);
      auto cyc = [&](auto&& self, int state) -> void {
        if (blown) return;
        if (--budget < 0) {
          blown = true;
          return;
        }
        for (const auto& e : by_from[state]) {
          if (!(mask >> e.to & 1)) continue;
          if (e.to == anchor) {
            periods.insert(add_rows(csum, e.emit));
            continue;
          }
          if (e.to < anchor || on_path[e.to]) continue;
          on_path[e.to] = 1;
          for (size_t i = 0; i < d; ++i) csum[i] += e.emit[i];
          self(self, e.to);
          for (size_t i = 0; i < d; ++i) csum[i] -= e.emit[i];
          on_path[e.to] = 0;
        }
      };
      cyc(cyc, anchor);
      if (blown) return std::nullopt;
    }

    std::vector<Row> period_rows(periods.begin(), periods.end());
    for (const Row& o : offsets)
      components.push_back(LinearSet{o, period_rows});
  }
  return SemilinearSet::make(vars, components).pruned();
}

SemilinearSet elimination_route(const TrimmedCounts& t,
                                const std::vector<std::string>& vars,
                                size_t d) {
  int m = t.m;
  int src = m, snk = m + 1;
  std::map<std::pair<int, int>, SemilinearSet> cell;
  std::map<int, std::set<int>> outs, ins;
  auto point = [&](const Row& r) {
    return SemilinearSet::make(vars, {LinearSet{r, {}}});
  };
  auto add = [&](int p, int q, const SemilinearSet& s) {
    if (s.is_empty()) return;
    auto it = cell.find({p, q});
    if (it == cell.end()) {
      cell.emplace(std::make_pair(p, q), s.pruned());
      outs[p].insert(q);
      ins[q].insert(p);
    } else {
      it->second = it->second.unite(s).pruned();
    }
  };
  add(src, t.initial, point(Row(d, 0)));
  for (int f = 0; f < m; ++f)
    if (t.is_final[f]) add(f, snk, point(Row(d, 0)));
  for (const auto& e : t.edges) add(e.from, e.to, point(e.emit));

  std::set<int> remaining;
  for (int i = 0; i < m; ++i) remaining.insert(i);
  while (!remaining.empty()) {
    int best = -1;
    long long best_cost = -1;
    for (int s : remaining) {
      long long icount = 0, ocount = 0;
      for (int p : ins[s])
        if (p != s) ++icount;
      for (int q : outs[s])
        if (q != s) ++ocount;
      long long cost = icount * ocount;
      if (best < 0 || cost < best_cost) {
        best = s;
        best_cost = cost;
      }
    }
    int s = best;
    remaining.erase(s);

    SemilinearSet loop = SemilinearSet::empty(vars);
    if (auto it = cell.find({s, s}); it != cell.end()) loop = it->second;
    SemilinearSet star = addition_star(loop);
    std::vector<int> sources(ins[s].begin(), ins[s].end());
    std::vector<int> targets(outs[s].begin(), outs[s].end());
    for (int p : sources) {
      if (p == s) continue;
      const SemilinearSet& in_set = cell.at({p, s});
      SemilinearSet through = minkowski_sum(in_set, star);
      for (int q : targets) {
        if (q == s) continue;
        add(p, q, minkowski_sum(through, cell.at({s, q})));
      }
    }
    for (int p : sources) {
      cell.erase({p, s});
      outs[p].erase(s);
    }
    for (int q : targets) {
      cell.erase({s, q});
      ins[q].erase(s);
    }
    outs.erase(s);
    ins.erase(s);
  }
  if (auto it = cell.find({src, snk}); it != cell.end()) return it->second;
  return SemilinearSet::empty(vars);
}

}  // namespace

SemilinearSet parikh_image(const CountNfa& a, int max_kernel_states) {
  validate_states(a.num_states, a.initial, a.finals);
  validate_edges(a.num_states, a.edges);
  size_t d = a.vars.size();
  for (const auto& e : a.edges) {
    if (e.emit.size() != d)
      throw std::invalid_argument("emission dimension mismatch");
    for (Nat x : e.emit)
      if (x < 0) throw std::invalid_argument("negative emission");
  }
  std::vector<std::string> vars = a.vars;
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw std::invalid_argument("duplicate emission coordinate names");
  std::vector<size_t> perm(d);
  for (size_t i = 0; i < d; ++i)
    perm[i] = std::lower_bound(vars.begin(), vars.end(), a.vars[i]) -
              vars.begin();

  std::optional<TrimmedCounts> trimmed = trim_counts(a);
  if (!trimmed) return SemilinearSet::empty(vars);
  for (auto& e : trimmed->edges) {
    Row r(d, 0);
    for (size_t i = 0; i < d; ++i) r[perm[i]] = e.emit[i];
    e.emit = std::move(r);
  }

  if (trimmed->m <= max_kernel_states)
    if (auto s = kernel_route(*trimmed, vars, d)) return *s;
  return elimination_route(*trimmed, vars, d);
}

SplitParams split_params(Nat n1, Nat n2, Nat l) {
  if (l < 1) throw std::invalid_argument("block length must be positive");
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("negative split input");
  SplitParams sp;
  sp.p = n1 / l;
  sp.r = n1 % l;
  sp.s = (n2 + l - 1) / l;
  sp.t = (l - n2 % l) % l;
  return sp;
}

}  // namespace hypersack
