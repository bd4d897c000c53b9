#include "hypersack/corpus.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hypersack {

std::vector<CorpusInstance> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::string dir;
  if (auto cut = path.find_last_of('/'); cut != std::string::npos)
    dir = path.substr(0, cut);

  std::vector<CorpusInstance> out;
  std::map<std::string, GroupPtr> groups;
  std::string spec;
  GroupPtr group;
  Nat box = 8;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    std::string rest;
    std::getline(ls, rest);
    if (auto start = rest.find_first_not_of(" \t"); start != std::string::npos)
      rest = rest.substr(start);
    else
      rest.clear();
    try {
      if (head == "group") {
        spec = rest;
        auto it = groups.find(spec);
        if (it == groups.end())
          it = groups.emplace(spec, parse_group_spec(spec, dir)).first;
        group = it->second;
      } else if (head == "box") {
        box = std::stoll(rest);
        if (box < 0) throw std::invalid_argument("negative box");
      } else if (head == "expr") {
        if (!group)
          throw std::runtime_error("expr before any group directive");
        out.push_back({spec, group, parse_expression(group, rest), box, lineno});
      } else {
        throw std::runtime_error("unknown directive '" + head + "'");
      }
    } catch (const std::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               ex.what());
    }
  }
  return out;
}

}  // namespace hypersack
