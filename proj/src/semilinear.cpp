#include "hypersack/semilinear.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hypersack {

namespace {

bool is_sorted_unique(const std::vector<std::string>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;
  return true;
}

Row add_rows(const Row& a, const Row& b) {
  Row r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

bool row_leq(const Row& a, const Row& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

bool row_zero(const Row& a) {
  for (Nat x : a)
    if (x != 0) return false;
  return true;
}

// Does `target` lie in offset + ℕ-combinations of `periods`? Depth-first
// search over multipliers; sound because all entries are ≥ 0 and periods
// are nonzero, so each multiplier is bounded by the remaining coordinates.
bool reachable_from(const Row& offset, const std::vector<Row>& periods,
                    const Row& target) {
  if (!row_leq(offset, target)) return false;
  Row rem(target.size());
  for (size_t i = 0; i < target.size(); ++i) rem[i] = target[i] - offset[i];

  // Iterative DFS over (period index, remaining vector).
  struct Frame {
    size_t idx;
    Row rem;
  };
  std::vector<Frame> stack{{0, rem}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (row_zero(f.rem)) return true;
    if (f.idx >= periods.size()) continue;
    const Row& p = periods[f.idx];
    // multiplier 0 first, then every feasible positive multiplier
    Row cur = f.rem;
    stack.push_back({f.idx + 1, cur});
    while (true) {
      bool ok = true;
      for (size_t i = 0; i < cur.size(); ++i) {
        cur[i] -= p[i];
        if (cur[i] < 0) ok = false;
      }
      if (!ok) break;
      stack.push_back({f.idx + 1, cur});
    }
  }
  return false;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SemilinearSet SemilinearSet::empty(std::vector<std::string> vars) {
  std::sort(vars.begin(), vars.end());
  return make(std::move(vars), {});
}

SemilinearSet SemilinearSet::universe(std::vector<std::string> vars) {
  std::sort(vars.begin(), vars.end());
  LinearSet full;
  full.offset.assign(vars.size(), 0);
  for (size_t i = 0; i < vars.size(); ++i) {
    Row unit(vars.size(), 0);
    unit[i] = 1;
    full.periods.push_back(unit);
  }
  return make(std::move(vars), {full});
}

SemilinearSet SemilinearSet::point(const Valuation& v) {
  std::vector<std::string> vars;
  LinearSet comp;
  for (const auto& [name, value] : v) {
    if (value < 0) throw std::invalid_argument("negative value in valuation");
    vars.push_back(name);
    comp.offset.push_back(value);
  }
  return make(std::move(vars), {comp});
}

SemilinearSet SemilinearSet::make(std::vector<std::string> vars,
                                  std::vector<LinearSet> components) {
  if (!is_sorted_unique(vars))
    throw std::invalid_argument("semilinear domain must be sorted and unique");
  SemilinearSet s;
  s.vars_ = std::move(vars);
  s.comps_ = std::move(components);
  for (const auto& c : s.comps_) {
    if (c.offset.size() != s.vars_.size())
      throw std::invalid_argument("component arity mismatch");
    for (const auto& p : c.periods)
      if (p.size() != s.vars_.size())
        throw std::invalid_argument("period arity mismatch");
  }
  s.canonicalize();
  return s;
}

void SemilinearSet::canonicalize() {
  for (auto& c : comps_) {
    c.periods.erase(
        std::remove_if(c.periods.begin(), c.periods.end(), row_zero),
        c.periods.end());
    std::sort(c.periods.begin(), c.periods.end());
    c.periods.erase(std::unique(c.periods.begin(), c.periods.end()),
                    c.periods.end());
  }
  std::sort(comps_.begin(), comps_.end());
  comps_.erase(std::unique(comps_.begin(), comps_.end()), comps_.end());
}

SemilinearSet SemilinearSet::unite(const SemilinearSet& t) const {
  if (vars_ != t.vars_)
    throw std::invalid_argument("union: variable sets differ");
  std::vector<LinearSet> comps = comps_;
  comps.insert(comps.end(), t.comps_.begin(), t.comps_.end());
  return make(vars_, std::move(comps));
}

SemilinearSet SemilinearSet::oplus(const SemilinearSet& t) const {
  std::vector<std::string> merged = vars_;
  merged.insert(merged.end(), t.vars_.begin(), t.vars_.end());
  std::sort(merged.begin(), merged.end());
  if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
    throw std::invalid_argument("oplus: variable sets overlap");

  // Position of each operand coordinate in the merged domain.
  auto positions = [&](const std::vector<std::string>& vs) {
    std::vector<size_t> pos;
    for (const auto& v : vs)
      pos.push_back(std::lower_bound(merged.begin(), merged.end(), v) -
                    merged.begin());
    return pos;
  };
  std::vector<size_t> lpos = positions(vars_), rpos = positions(t.vars_);

  auto embed = [&](const Row& l, const Row& r) {
    Row out(merged.size(), 0);
    for (size_t i = 0; i < l.size(); ++i) out[lpos[i]] = l[i];
    for (size_t i = 0; i < r.size(); ++i) out[rpos[i]] = r[i];
    return out;
  };

  std::vector<LinearSet> comps;
  for (const auto& a : comps_) {
    for (const auto& b : t.comps_) {
      LinearSet c;
      c.offset = embed(a.offset, b.offset);
      Row zl(vars_.size(), 0), zr(t.vars_.size(), 0);
      for (const auto& p : a.periods) c.periods.push_back(embed(p, zr));
      for (const auto& p : b.periods) c.periods.push_back(embed(zl, p));
      comps.push_back(std::move(c));
    }
  }
  return make(std::move(merged), std::move(comps));
}

SemilinearSet SemilinearSet::scale_shift(const Valuation& m,
                                         const Valuation& d) const {
  Row mr = to_row(m), dr = to_row(d);
  for (Nat x : mr)
    if (x < 1)
      throw std::invalid_argument("scale_shift: multipliers must be >= 1");
  for (Nat x : dr)
    if (x < 0) throw std::invalid_argument("scale_shift: negative shift");
  std::vector<LinearSet> comps;
  for (const auto& c : comps_) {
    LinearSet out;
    out.offset.resize(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i)
      out.offset[i] = mr[i] * c.offset[i] + dr[i];
    for (const auto& p : c.periods) {
      Row q(vars_.size());
      for (size_t i = 0; i < vars_.size(); ++i) q[i] = mr[i] * p[i];
      out.periods.push_back(std::move(q));
    }
    comps.push_back(std::move(out));
  }
  return make(vars_, std::move(comps));
}

std::vector<Row> minimal_homogeneous_solutions(const std::vector<Row>& cols) {
  if (cols.empty()) return {};
  const size_t n = cols.size();
  const size_t m = cols[0].size();
  for (const auto& c : cols)
    if (c.size() != m) throw std::invalid_argument("ragged column matrix");

  struct Node {
    Row x;   // candidate solution
    Row ax;  // value of the linear map at x
  };
  auto dot = [&](const Row& a, const Row& b) {
    Nat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<Row> basis;
  auto dominated = [&](const Row& x) {
    for (const auto& b : basis)
      if (row_leq(b, x)) return true;
    return false;
  };

  std::vector<Node> frontier;
  for (size_t i = 0; i < n; ++i) {
    Row x(n, 0);
    x[i] = 1;
    frontier.push_back({std::move(x), cols[i]});
  }

  size_t expanded = 0;
  while (!frontier.empty()) {
    std::set<Row> seen;
    std::vector<Node> next;
    for (auto& node : frontier) {
      if (row_zero(node.ax)) {
        if (!dominated(node.x)) basis.push_back(node.x);
        continue;
      }
      for (size_t i = 0; i < n; ++i) {
        // Contejean-Devie branching rule: only step in directions that
        // decrease the squared norm of the image.
        if (dot(node.ax, cols[i]) >= 0) continue;
        Row y = node.x;
        y[i] += 1;
        if (dominated(y) || seen.count(y)) continue;
        seen.insert(y);
        next.push_back({y, add_rows(node.ax, cols[i])});
        if (++expanded > 2000000)
          throw std::runtime_error(
              "diophantine completion exceeded its expansion budget");
      }
    }
    frontier = std::move(next);
  }

  // Final minimality sweep (insertion order can admit rare dominations).
  std::vector<Row> out;
  for (size_t i = 0; i < basis.size(); ++i) {
    bool keep = true;
    for (size_t j = 0; j < basis.size() && keep; ++j)
      if (i != j && row_leq(basis[j], basis[i]) && basis[j] != basis[i])
        keep = false;
    if (keep) out.push_back(basis[i]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SemilinearSet SemilinearSet::intersect(const SemilinearSet& t) const {
  if (vars_ != t.vars_)
    throw std::invalid_argument("intersect: variable sets differ");
  const size_t dim = vars_.size();
  std::vector<LinearSet> comps;

  for (const auto& a : comps_) {
    for (const auto& b : t.comps_) {
      // Solve a.offset + Σλ·a.periods = b.offset + Σμ·b.periods over ℕ by
      // homogenizing with a fresh unknown whose column is the offset gap.
      const size_t n1 = a.periods.size(), n2 = b.periods.size();
      std::vector<Row> cols;
      for (const auto& p : a.periods) cols.push_back(p);
      for (const auto& p : b.periods) {
        Row neg(dim);
        for (size_t i = 0; i < dim; ++i) neg[i] = -p[i];
        cols.push_back(std::move(neg));
      }
      Row gap(dim);
      for (size_t i = 0; i < dim; ++i) gap[i] = a.offset[i] - b.offset[i];
      cols.push_back(std::move(gap));

      std::vector<Row> minimal = minimal_homogeneous_solutions(cols);

      std::vector<Row> periods;
      std::vector<Row> starts;
      for (const auto& sol : minimal) {
        Nat h = sol[n1 + n2];  // homogenizing coordinate
        if (h > 1) continue;   // cannot contribute to solutions at h = 1
        Row image(dim, 0);
        for (size_t i = 0; i < n1; ++i)
          for (size_t j = 0; j < dim; ++j) image[j] += sol[i] * a.periods[i][j];
        if (h == 0) {
          periods.push_back(std::move(image));
        } else {
          starts.push_back(add_rows(a.offset, image));
        }
      }
      for (const auto& s : starts) comps.push_back({s, periods});
    }
  }
  return make(vars_, std::move(comps));
}

SemilinearSet SemilinearSet::project(
    const std::vector<std::string>& keep) const {
  std::vector<std::string> kept = keep;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  std::vector<size_t> idx;
  for (const auto& v : kept) {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v)
      throw std::invalid_argument("project: unknown variable " + v);
    idx.push_back(it - vars_.begin());
  }
  auto shrink = [&](const Row& r) {
    Row out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = r[idx[i]];
    return out;
  };
  std::vector<LinearSet> comps;
  for (const auto& c : comps_) {
    LinearSet out;
    out.offset = shrink(c.offset);
    for (const auto& p : c.periods) out.periods.push_back(shrink(p));
    comps.push_back(std::move(out));
  }
  return make(std::move(kept), std::move(comps));
}

bool SemilinearSet::member(const Valuation& v) const {
  Row target = to_row(v);
  for (const auto& c : comps_)
    if (reachable_from(c.offset, c.periods, target)) return true;
  return false;
}

Nat SemilinearSet::magnitude() const {
  Nat m = 0;
  for (const auto& c : comps_) {
    for (Nat x : c.offset) m = std::max(m, x);
    for (const auto& p : c.periods)
      for (Nat x : p) m = std::max(m, x);
  }
  return m;
}

std::vector<Valuation> SemilinearSet::enumerate_box(Nat bound) const {
  if (bound < 0) throw std::invalid_argument("enumerate_box: negative bound");
  std::set<Row> rows;
  auto within = [&](const Row& r) {
    for (Nat x : r)
      if (x > bound) return false;
    return true;
  };
  for (const auto& c : comps_) {
    if (!within(c.offset)) continue;
    // DFS over period multipliers; all entries are nonnegative, so any
    // partial sum exceeding the box can be cut off.
    struct Frame {
      size_t idx;
      Row cur;
    };
    std::vector<Frame> stack{{0, c.offset}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (f.idx == c.periods.size()) {
        rows.insert(f.cur);
        continue;
      }
      Row cur = f.cur;
      while (within(cur)) {
        stack.push_back({f.idx + 1, cur});
        cur = add_rows(cur, c.periods[f.idx]);
      }
    }
  }
  std::vector<Valuation> out;
  for (const auto& r : rows) out.push_back(to_valuation(r));
  return out;
}

SemilinearSet SemilinearSet::rename(
    const std::map<std::string, std::string>& mapping) const {
  std::vector<std::string> renamed;
  for (const auto& v : vars_) {
    auto it = mapping.find(v);
    renamed.push_back(it == mapping.end() ? v : it->second);
  }
  std::vector<std::string> sorted = renamed;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("rename: name collision");
  // permutation: position in the new sorted order for each old coordinate
  std::vector<size_t> pos;
  for (const auto& v : renamed)
    pos.push_back(std::lower_bound(sorted.begin(), sorted.end(), v) -
                  sorted.begin());
  auto permute = [&](const Row& r) {
    Row out(r.size());
    for (size_t i = 0; i < r.size(); ++i) out[pos[i]] = r[i];
    return out;
  };
  std::vector<LinearSet> comps;
  for (const auto& c : comps_) {
    LinearSet out;
    out.offset = permute(c.offset);
    for (const auto& p : c.periods) out.periods.push_back(permute(p));
    comps.push_back(std::move(out));
  }
  return make(std::move(sorted), std::move(comps));
}

SemilinearSet SemilinearSet::pruned() const {
  std::vector<LinearSet> comps = comps_;
  // Drop periods expressible from the other periods of the same component.
  for (auto& c : comps) {
    for (size_t i = 0; i < c.periods.size();) {
      std::vector<Row> rest;
      for (size_t j = 0; j < c.periods.size(); ++j)
        if (j != i) rest.push_back(c.periods[j]);
      Row zero(c.offset.size(), 0);
      if (reachable_from(zero, rest, c.periods[i]))
        c.periods.erase(c.periods.begin() + i);
      else
        ++i;
    }
  }
  // Drop components absorbed by another component.
  auto absorbed_by = [&](const LinearSet& a, const LinearSet& b) {
    if (!reachable_from(b.offset, b.periods, a.offset)) return false;
    Row zero(a.offset.size(), 0);
    for (const auto& p : a.periods)
      if (!reachable_from(zero, b.periods, p)) return false;
    return true;
  };
  std::vector<bool> dead(comps.size(), false);
  for (size_t i = 0; i < comps.size(); ++i) {
    for (size_t j = 0; j < comps.size() && !dead[i]; ++j) {
      if (i == j || dead[j]) continue;
      if (comps[i] == comps[j] && i > j) continue;
      if (absorbed_by(comps[i], comps[j])) dead[i] = true;
    }
  }
  std::vector<LinearSet> kept;
  for (size_t i = 0; i < comps.size(); ++i)
    if (!dead[i]) kept.push_back(comps[i]);
  return make(vars_, std::move(kept));
}

Row SemilinearSet::to_row(const Valuation& v) const {
  if (v.size() != vars_.size())
    throw std::invalid_argument("valuation does not match variable set");
  Row r(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    auto it = v.find(vars_[i]);
    if (it == v.end())
      throw std::invalid_argument("valuation missing variable " + vars_[i]);
    if (it->second < 0)
      throw std::invalid_argument("negative value in valuation");
    r[i] = it->second;
  }
  return r;
}

Valuation SemilinearSet::to_valuation(const Row& r) const {
  Valuation v;
  for (size_t i = 0; i < vars_.size(); ++i) v[vars_[i]] = r[i];
  return v;
}

namespace {

std::string row_text(const std::vector<std::string>& vars, const Row& r) {
  if (vars.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ",";
    out += vars[i] + "=" + std::to_string(r[i]);
  }
  return out;
}

Row parse_row(const std::vector<std::string>& vars, const std::string& text) {
  std::string body = trim(text);
  if (vars.empty()) {
    if (body != "-") throw std::runtime_error("expected '-' for empty domain");
    return {};
  }
  Row r(vars.size());
  std::vector<bool> seen(vars.size(), false);
  for (const auto& part : split(body, ',')) {
    auto kv = split(trim(part), '=');
    if (kv.size() != 2)
      throw std::runtime_error("bad vector entry '" + part + "'");
    std::string name = trim(kv[0]);
    auto it = std::lower_bound(vars.begin(), vars.end(), name);
    if (it == vars.end() || *it != name)
      throw std::runtime_error("unknown variable '" + name + "'");
    size_t i = it - vars.begin();
    if (seen[i]) throw std::runtime_error("duplicate variable '" + name + "'");
    seen[i] = true;
    try {
      r[i] = std::stoll(trim(kv[1]));
    } catch (const std::exception&) {
      throw std::runtime_error("bad number in '" + part + "'");
    }
    if (r[i] < 0) throw std::runtime_error("negative entry in '" + part + "'");
  }
  for (size_t i = 0; i < vars.size(); ++i)
    if (!seen[i])
      throw std::runtime_error("vector is missing variable '" + vars[i] + "'");
  return r;
}

}  // namespace

std::string SemilinearSet::to_text() const {
  std::string out = "vars";
  for (size_t i = 0; i < vars_.size(); ++i)
    out += (i ? "," : " ") + vars_[i];
  out += "\n";
  for (const auto& c : comps_) {
    out += row_text(vars_, c.offset);
    if (!c.periods.empty()) {
      out += " |";
      for (size_t i = 0; i < c.periods.size(); ++i) {
        out += (i ? " ; " : " ") + row_text(vars_, c.periods[i]);
      }
    }
    out += "\n";
  }
  return out;
}

SemilinearSet SemilinearSet::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> vars;
  bool header_seen = false;
  std::vector<LinearSet> comps;
  while (std::getline(in, line)) {
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    if (!header_seen) {
      if (body.substr(0, 4) != "vars")
        throw std::runtime_error("semilinear text must start with 'vars'");
      std::string rest = trim(body.substr(4));
      if (!rest.empty())
        for (const auto& v : split(rest, ',')) vars.push_back(trim(v));
      std::sort(vars.begin(), vars.end());
      if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
        throw std::runtime_error("duplicate variable in header");
      header_seen = true;
      continue;
    }
    LinearSet c;
    auto bar = body.find('|');
    c.offset = parse_row(vars, body.substr(0, bar));
    if (bar != std::string::npos) {
      for (const auto& p : split(body.substr(bar + 1), ';'))
        c.periods.push_back(parse_row(vars, p));
    }
    comps.push_back(std::move(c));
  }
  if (!header_seen)
    throw std::runtime_error("semilinear text must start with 'vars'");
  return make(std::move(vars), std::move(comps));
}

SemilinearSet minkowski_sum(const SemilinearSet& s, const SemilinearSet& t) {
  if (s.vars() != t.vars())
    throw std::invalid_argument("minkowski_sum: variable sets differ");
  std::vector<LinearSet> comps;
  for (const auto& a : s.components()) {
    for (const auto& b : t.components()) {
      LinearSet c;
      c.offset = Row(a.offset.size());
      for (size_t i = 0; i < a.offset.size(); ++i)
        c.offset[i] = a.offset[i] + b.offset[i];
      c.periods = a.periods;
      c.periods.insert(c.periods.end(), b.periods.begin(), b.periods.end());
      comps.push_back(std::move(c));
    }
  }
  return SemilinearSet::make(s.vars(), std::move(comps));
}

SemilinearSet addition_star(const SemilinearSet& s) {
  // (A_1 ∪ ... ∪ A_m)* = A_1* + ... + A_m* in a commutative monoid, and for
  // a linear set L = a + P*, L⁺ = a + ℕa + P*, so L* = {0} ∪ L⁺.
  SemilinearSet acc = SemilinearSet::point([&] {
    Valuation z;
    for (const auto& v : s.vars()) z[v] = 0;
    return z;
  }());
  for (const auto& c : s.components()) {
    LinearSet plus;
    plus.offset = c.offset;
    plus.periods = c.periods;
    plus.periods.push_back(c.offset);
    LinearSet zero;
    zero.offset = Row(c.offset.size(), 0);
    SemilinearSet star = SemilinearSet::make(s.vars(), {zero, plus});
    acc = minkowski_sum(acc, star).pruned();
  }
  return acc;
}

}  // namespace hypersack
