#pragma once

#include <string>
#include <vector>

#include "hypersack/expression.hpp"

namespace hypersack {

struct CorpusInstance {
  std::string group_spec;
  GroupPtr group;
  Expression expr;
  Nat box = 8;
  int line = 0;  // source line of the expression, for messages
};

// Reads an instance list with one directive per line: `group <spec>` picks
// the group for the following expressions, `box <n>` the enumeration bound,
// `expr <text>` adds an instance. Blank lines and lines starting with '#'
// are skipped. Table paths in group specs resolve relative to the file.
std::vector<CorpusInstance> load_corpus(const std::string& path);

}  // namespace hypersack
