#include "hypersack/group.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hypersack {

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

int Alphabet::add(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  if (index_.count(name))
    throw std::invalid_argument("duplicate symbol name: " + name);
  int id = static_cast<int>(syms_.size());
  index_[name] = id;
  syms_.push_back(Symbol{std::move(name), -1});
  return id;
}

void Alphabet::link_inverses(int i, int j) {
  syms_.at(i).inverse = j;
  syms_.at(j).inverse = i;
}

std::optional<int> Alphabet::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Group::check_letters(const Word& w) const {
  for (Letter l : w)
    if (l < 0 || l >= alpha_.size())
      throw std::invalid_argument("letter index out of range");
}

Nat Group::delta() const {
  throw std::invalid_argument("no slimness constant for " + describe());
}

std::vector<Word> Group::ball(Nat r, size_t cap) const {
  std::set<Word> seen;
  seen.insert(Word{});
  std::vector<Word> frontier{Word{}};
  for (Nat round = 0; round < r && !frontier.empty(); ++round) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (int l = 0; l < alpha_.size(); ++l) {
        Word cand = w;
        cand.push_back(l);
        Word red = shortlex_reduce(cand);
        if (seen.insert(red).second) {
          if (seen.size() > cap)
            throw std::runtime_error("ball enumeration exceeded cap");
          next.push_back(std::move(red));
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<Word> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), shortlex_less);
  return out;
}

Word Group::parse_word(const std::string& text) const {
  Word out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (auto i = alpha_.index_of(tok)) {
      out.push_back(*i);
      continue;
    }
    if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "^-1") == 0) {
      std::string base = tok.substr(0, tok.size() - 3);
      if (auto i = alpha_.index_of(base)) {
        out.push_back(alpha_.inverse(*i));
        continue;
      }
    }
    throw std::invalid_argument("unknown symbol '" + tok + "' in " +
                                describe());
  }
  return out;
}

std::string Group::word_text(const Word& w) const {
  check_letters(w);
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += alpha_.name(w[i]);
  }
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word inverse_word(const Alphabet& alpha, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back(alpha.inverse(*it));
  return out;
}

Word word_power(const Word& u, Nat n) {
  if (n < 0) throw std::invalid_argument("negative word power");
  Word out;
  out.reserve(u.size() * static_cast<size_t>(n));
  for (Nat i = 0; i < n; ++i) out.insert(out.end(), u.begin(), u.end());
  return out;
}

bool is_local_quasigeodesic(const Group& g, const Word& w, Nat lambda,
                            Nat epsilon, std::optional<Nat> zeta) {
  size_t n = w.size();
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b <= n; ++b) {
      Nat span = static_cast<Nat>(b - a);
      if (zeta && span > *zeta) break;
      Word sub(w.begin() + a, w.begin() + b);
      if (span > lambda * g.geodesic_length(sub) + epsilon) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Free groups

FreeGroup::FreeGroup(int rank) : rank_(rank) {
  if (rank < 1 || rank > 26)
    throw std::invalid_argument("free group rank must be between 1 and 26");
  for (int i = 0; i < rank; ++i) {
    std::string base(1, static_cast<char>('a' + i));
    int g = alpha_.add(base);
    int gi = alpha_.add(base + "^-1");
    alpha_.link_inverses(g, gi);
  }
}

std::string FreeGroup::describe() const {
  return "F" + std::to_string(rank_);
}

Word FreeGroup::shortlex_reduce(const Word& w) const {
  check_letters(w);
  Word stack;
  for (Letter l : w) {
    if (!stack.empty() && alpha_.inverse(stack.back()) == l)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return stack;
}

std::optional<Nat> FreeGroup::order_of(const Word& w) const {
  if (shortlex_reduce(w).empty()) return 1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Finite groups given by multiplication table

FiniteGroup::FiniteGroup(std::vector<std::string> names,
                         std::vector<std::vector<int>> table)
    : names_(std::move(names)), table_(std::move(table)) {
  int n = static_cast<int>(names_.size());
  if (n < 1) throw std::invalid_argument("empty multiplication table");
  if (static_cast<int>(table_.size()) != n)
    throw std::invalid_argument("multiplication table is not square");
  for (const auto& row : table_) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n)
        throw std::invalid_argument("table entry out of range");
  }

  int id = -1;
  for (int i = 0; i < n; ++i) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      ok = table_[i][j] == j && table_[j][i] == j;
    if (ok) {
      id = i;
      break;
    }
  }
  if (id < 0)
    throw std::invalid_argument("multiplication table has no identity");
  identity_ = id;

  for (int i = 0; i < n; ++i) {
    std::vector<char> row_seen(n, 0), col_seen(n, 0);
    for (int j = 0; j < n; ++j) {
      if (row_seen[table_[i][j]]++)
        throw std::invalid_argument("table row is not a permutation");
      if (col_seen[table_[j][i]]++)
        throw std::invalid_argument("table column is not a permutation");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (table_[table_[i][j]][k] != table_[i][table_[j][k]])
          throw std::invalid_argument("multiplication table is not associative");

  inv_elem_.assign(n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (table_[i][j] == identity_) inv_elem_[i] = j;

  // Generators are all non-identity elements, in table order.
  std::vector<int> elem_sym(n, -1);
  for (int i = 0; i < n; ++i) {
    if (i == identity_) continue;
    int s = alpha_.add(names_[i]);
    sym_elem_.push_back(i);
    elem_sym[i] = s;
  }
  for (int s = 0; s < alpha_.size(); ++s) {
    int inv = inv_elem_[sym_elem_[s]];
    alpha_.link_inverses(s, elem_sym[inv]);
  }

  reps_.assign(n, Word{});
  std::vector<char> seen(n, 0);
  seen[identity_] = 1;
  std::deque<int> queue{identity_};
  while (!queue.empty()) {
    int e = queue.front();
    queue.pop_front();
    for (int s = 0; s < alpha_.size(); ++s) {
      int h = table_[e][sym_elem_[s]];
      if (seen[h]) continue;
      seen[h] = 1;
      reps_[h] = reps_[e];
      reps_[h].push_back(s);
      queue.push_back(h);
    }
  }
  for (int e = 0; e < n; ++e) {
    if (!seen[e])
      throw std::invalid_argument("table element unreachable from identity");
    diameter_ = std::max(diameter_, static_cast<Nat>(reps_[e].size()));
  }
}

std::string FiniteGroup::describe() const {
  return "finite(" + std::to_string(order()) + ")";
}

int FiniteGroup::eval(const Word& w) const {
  check_letters(w);
  int e = identity_;
  for (Letter l : w) e = table_[e][sym_elem_[l]];
  return e;
}

int FiniteGroup::mul(int a, int b) const {
  if (a < 0 || a >= order() || b < 0 || b >= order())
    throw std::invalid_argument("element index out of range");
  return table_[a][b];
}

Word FiniteGroup::shortlex_reduce(const Word& w) const {
  return reps_[eval(w)];
}

std::optional<Nat> FiniteGroup::order_of(const Word& w) const {
  int e = eval(w);
  int acc = e;
  for (int k = 1; k <= order(); ++k) {
    if (acc == identity_) return k;
    acc = table_[acc][e];
  }
  throw std::logic_error("element order not found");
}

std::shared_ptr<FiniteGroup> FiniteGroup::from_table_text(
    const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(t);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim_copy(cell));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw std::invalid_argument("empty multiplication table");
  const std::vector<std::string>& names = rows[0];
  size_t n = names.size();
  if (rows.size() != n)
    throw std::invalid_argument(
        "table must have one row per element named in its first row");
  std::map<std::string, int> index;
  for (size_t i = 0; i < n; ++i) {
    const std::string& name = names[i];
    if (name.empty()) throw std::invalid_argument("empty element name");
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
        throw std::invalid_argument("bad character in element name: " + name);
    if (!index.emplace(name, static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate element name: " + name);
  }
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw std::invalid_argument("table row has wrong length");
    for (size_t j = 0; j < n; ++j) {
      auto it = index.find(rows[i][j]);
      if (it == index.end())
        throw std::invalid_argument("unknown element in table: " + rows[i][j]);
      table[i][j] = it->second;
    }
  }
  // Any table that validates has its identity in row 0: an identity row
  // spells out the element names in order, and rows are distinct.
  return std::make_shared<FiniteGroup>(names, table);
}

// ---------------------------------------------------------------------------
// Direct product with Z

DirectZGroup::DirectZGroup(GroupPtr inner) : inner_(std::move(inner)) {
  const Alphabet& ia = inner_->alphabet();
  for (int i = 0; i < ia.size(); ++i) alpha_.add(ia.name(i));
  for (int i = 0; i < ia.size(); ++i)
    if (ia.inverse(i) >= i) alpha_.link_inverses(i, ia.inverse(i));

  std::string tname = "t";
  for (int k = 1; alpha_.index_of(tname) || alpha_.index_of(tname + "^-1");
       ++k)
    tname = "t" + std::to_string(k);
  t_plus_ = alpha_.add(tname);
  t_minus_ = alpha_.add(tname + "^-1");
  alpha_.link_inverses(t_plus_, t_minus_);
}

std::string DirectZGroup::describe() const {
  return "(" + inner_->describe() + ") x Z";
}

int DirectZGroup::z_exponent(Letter l) const {
  if (l == t_plus_) return 1;
  if (l == t_minus_) return -1;
  return 0;
}

Word DirectZGroup::project_inner(const Word& w) const {
  check_letters(w);
  Word out;
  for (Letter l : w)
    if (z_exponent(l) == 0) out.push_back(l);
  return out;
}

Nat DirectZGroup::project_z(const Word& w) const {
  check_letters(w);
  Nat z = 0;
  for (Letter l : w) z += z_exponent(l);
  return z;
}

Word DirectZGroup::shortlex_reduce(const Word& w) const {
  Word out = inner_->shortlex_reduce(project_inner(w));
  Nat z = project_z(w);
  Letter t = z >= 0 ? t_plus_ : t_minus_;
  for (Nat i = 0; i < (z >= 0 ? z : -z); ++i) out.push_back(t);
  return out;
}

std::optional<Nat> DirectZGroup::order_of(const Word& w) const {
  if (project_z(w) != 0) return std::nullopt;
  return inner_->order_of(project_inner(w));
}

// ---------------------------------------------------------------------------
// Free products

FreeProductGroup::FreeProductGroup(GroupPtr left, GroupPtr right)
    : left_(std::move(left)), right_(std::move(right)) {
  const Alphabet& la = left_->alphabet();
  const Alphabet& ra = right_->alphabet();
  left_size_ = la.size();

  std::set<std::string> lnames;
  for (int i = 0; i < la.size(); ++i) lnames.insert(la.name(i));
  bool clash = false;
  for (int i = 0; i < ra.size(); ++i)
    if (lnames.count(ra.name(i))) clash = true;
  std::string lp = clash ? "left." : "";
  std::string rp = clash ? "right." : "";

  for (int i = 0; i < la.size(); ++i) alpha_.add(lp + la.name(i));
  for (int i = 0; i < ra.size(); ++i) alpha_.add(rp + ra.name(i));
  for (int i = 0; i < la.size(); ++i)
    if (la.inverse(i) >= i) alpha_.link_inverses(i, la.inverse(i));
  for (int i = 0; i < ra.size(); ++i)
    if (ra.inverse(i) >= i)
      alpha_.link_inverses(left_size_ + i, left_size_ + ra.inverse(i));
}

std::string FreeProductGroup::describe() const {
  return "(" + left_->describe() + ") * (" + right_->describe() + ")";
}

std::vector<FreeProductGroup::Syllable> FreeProductGroup::to_syllables(
    const Word& w) const {
  check_letters(w);
  std::vector<Syllable> stack;
  for (Letter l : w) {
    int side = l < left_size_ ? 0 : 1;
    Letter il = side == 0 ? l : l - left_size_;
    const Group& factor = side == 0 ? *left_ : *right_;
    if (!stack.empty() && stack.back().side == side) {
      Word merged = stack.back().word;
      merged.push_back(il);
      merged = factor.shortlex_reduce(merged);
      if (merged.empty())
        stack.pop_back();
      else
        stack.back().word = std::move(merged);
    } else {
      stack.push_back(Syllable{side, Word{il}});
    }
  }
  return stack;
}

Word FreeProductGroup::from_syllables(const std::vector<Syllable>& s) const {
  Word out;
  for (const Syllable& syl : s)
    for (Letter il : syl.word)
      out.push_back(syl.side == 0 ? il : il + left_size_);
  return out;
}

Word FreeProductGroup::shortlex_reduce(const Word& w) const {
  return from_syllables(to_syllables(w));
}

std::optional<Nat> FreeProductGroup::order_of(const Word& w) const {
  std::vector<Syllable> syl = to_syllables(w);
  // Cyclic reduction: conjugating by the last syllable merges it into the
  // first whenever the two ends live in the same factor.
  while (syl.size() >= 2 && syl.front().side == syl.back().side) {
    const Group& factor = syl.front().side == 0 ? *left_ : *right_;
    Word merged =
        factor.shortlex_reduce(concat(syl.back().word, syl.front().word));
    int side = syl.front().side;
    syl.erase(syl.begin());
    syl.pop_back();
    if (!merged.empty())
      syl.insert(syl.begin(), Syllable{side, std::move(merged)});
  }
  if (syl.empty()) return 1;
  if (syl.size() == 1) {
    const Group& factor = syl[0].side == 0 ? *left_ : *right_;
    return factor.order_of(syl[0].word);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Group spec parsing

namespace {

const char* kZ2Table = "e,a\na,e\n";
const char* kZ3Table = "e,a,b\na,b,e\nb,e,a\n";
const char* kS3Table =
    "e,r,q,x,y,z\n"
    "r,q,e,y,z,x\n"
    "q,e,r,z,x,y\n"
    "x,z,y,e,q,r\n"
    "y,x,z,r,e,q\n"
    "z,y,x,q,r,e\n";

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

}  // namespace

GroupPtr parse_group_spec(const std::string& text, const std::string& base_dir) {
  std::string t = trim_copy(text);
  if (t.empty()) throw std::invalid_argument("empty group spec");

  if (t == "Z") return std::make_shared<FreeGroup>(1);
  if (t == "Z/2") return FiniteGroup::from_table_text(kZ2Table);
  if (t == "Z/3") return FiniteGroup::from_table_text(kZ3Table);
  if (t == "S3") return FiniteGroup::from_table_text(kS3Table);

  if (t[0] == 'F' && t.size() > 1 &&
      t.find_first_not_of("0123456789", 1) == std::string::npos) {
    return std::make_shared<FreeGroup>(std::stoi(t.substr(1)));
  }

  if (t.rfind("finite:", 0) == 0) {
    std::string path = trim_copy(t.substr(7));
    if (path.empty()) throw std::invalid_argument("missing table file path");
    if (!base_dir.empty() && path[0] != '/') path = base_dir + "/" + path;
    return FiniteGroup::from_table_text(read_file(path));
  }

  if (t[0] == '(') {
    int depth = 0;
    size_t close = std::string::npos;
    for (size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '(') ++depth;
      if (t[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string::npos)
      throw std::invalid_argument("unbalanced parentheses in group spec");
    GroupPtr first = parse_group_spec(t.substr(1, close - 1), base_dir);
    std::string rest = trim_copy(t.substr(close + 1));
    if (rest.empty()) return first;
    if (rest[0] == 'x') {
      if (trim_copy(rest.substr(1)) != "Z")
        throw std::invalid_argument(
            "only direct products with Z are supported");
      return std::make_shared<DirectZGroup>(first);
    }
    if (rest[0] == '*') {
      GroupPtr second = parse_group_spec(rest.substr(1), base_dir);
      return std::make_shared<FreeProductGroup>(first, second);
    }
    throw std::invalid_argument("unrecognized group spec: " + text);
  }

  throw std::invalid_argument("unrecognized group spec: " + text);
}

}  // namespace hypersack
