#include "hypersack/expression.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace hypersack {

namespace {

struct RawFactor {
  std::string base;  // inner text of a bracket, or a lone symbol token
  std::string exp;   // empty means exponent 1
};

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  return s.find_first_not_of("0123456789", i) == std::string::npos;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      return false;
  return true;
}

std::vector<RawFactor> scan_factors(const std::string& text) {
  std::vector<RawFactor> out;
  size_t i = 0, n = text.size();
  auto skip_space = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_space();
  while (i < n) {
    RawFactor f;
    if (text[i] == '[') {
      size_t close = text.find(']', i + 1);
      if (close == std::string::npos)
        throw std::invalid_argument("unterminated bracket in expression");
      f.base = text.substr(i + 1, close - i - 1);
      i = close + 1;
    } else {
      size_t j = i;
      while (j < n && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '[' && text[j] != ']' && text[j] != '^')
        ++j;
      if (j == i)
        throw std::invalid_argument("unexpected character in expression: " +
                                    text.substr(i, 1));
      f.base = text.substr(i, j - i);
      i = j;
    }
    if (i < n && text[i] == '^') {
      size_t j = ++i;
      if (j < n && text[j] == '-') ++j;
      while (j < n && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '[' && text[j] != ']' && text[j] != '^')
        ++j;
      if (j == i)
        throw std::invalid_argument("missing exponent after ^");
      f.exp = text.substr(i, j - i);
      i = j;
    }
    out.push_back(std::move(f));
    skip_space();
  }
  return out;
}

}  // namespace

std::vector<std::string> Expression::sorted_vars() const {
  std::vector<std::string> vs = vars;
  std::sort(vs.begin(), vs.end());
  return vs;
}

Word Expression::evaluate(const Valuation& val) const {
  Word out;
  for (int i = 0; i < depth(); ++i) {
    auto it = val.find(vars[i]);
    if (it == val.end())
      throw std::invalid_argument("valuation missing variable " + vars[i]);
    if (it->second < 0)
      throw std::invalid_argument("negative exponent for " + vars[i]);
    Word block = word_power(u[i], it->second);
    out.insert(out.end(), block.begin(), block.end());
    out.insert(out.end(), v[i].begin(), v[i].end());
  }
  if (depth() == 0 && !v.empty())
    out.insert(out.end(), v[0].begin(), v[0].end());
  return out;
}

std::string Expression::to_text() const {
  const Group& g = *group;
  auto bracket = [&](const Word& w) {
    if (w.empty()) return std::string("[]");
    std::string body = g.word_text(w);
    if (w.size() == 1 && body.find('^') == std::string::npos) return body;
    return "[" + body + "]";
  };
  std::string out;
  auto append = [&](const std::string& s) {
    if (!out.empty() && !s.empty()) out += ' ';
    out += s;
  };
  for (int i = 0; i < depth(); ++i) {
    append(bracket(u[i]) + "^" + vars[i]);
    if (!v[i].empty()) append(g.word_text(v[i]));
  }
  if (depth() == 0) {
    if (v.empty() || v[0].empty()) return "[]";
    append(g.word_text(v[0]));
  }
  return out;
}

Expression parse_expression(const GroupPtr& group, const std::string& text) {
  Expression e;
  e.group = group;
  const Group& g = *group;

  Word leading;
  Word* pending = &leading;
  std::set<std::string> seen_vars;

  for (const RawFactor& f : scan_factors(text)) {
    Word base = g.parse_word(f.base);
    if (f.exp.empty() || is_integer(f.exp)) {
      Nat n = f.exp.empty() ? 1 : std::stoll(f.exp);
      Word block = n >= 0 ? word_power(base, n)
                          : word_power(inverse_word(g.alphabet(), base), -n);
      pending->insert(pending->end(), block.begin(), block.end());
      continue;
    }
    if (!is_identifier(f.exp))
      throw std::invalid_argument("bad exponent: " + f.exp);
    if (!seen_vars.insert(f.exp).second)
      throw std::invalid_argument("variable used twice: " + f.exp);
    e.u.push_back(base);
    e.vars.push_back(f.exp);
    e.v.emplace_back();
    pending = &e.v.back();
  }

  if (e.depth() == 0) {
    e.v.push_back(std::move(leading));
  } else if (!leading.empty()) {
    // Rotate the leading constant to the tail; E = 1 iff the rotation is 1.
    Word& tail = e.v.back();
    tail.insert(tail.end(), leading.begin(), leading.end());
  }
  return e;
}

}  // namespace hypersack
