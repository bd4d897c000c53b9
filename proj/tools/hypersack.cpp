#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypersack/corpus.hpp"
#include "hypersack/knapsack.hpp"
#include "hypersack/oracle.hpp"

using namespace hypersack;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fmt_valuation(const Valuation& v) {
  if (v.empty()) return "-";
  std::string out;
  for (const auto& [name, value] : v) {
    if (!out.empty()) out += ',';
    out += name + "=" + std::to_string(value);
  }
  return out;
}

// One run's worth of diagnostics, printed as JSON on request.
struct RunReport {
  std::string answer;
  std::optional<Valuation> witness;
  Nat magnitude = 0;
  double parse_ms = 0, solve_ms = 0, verify_ms = 0;
  SolveStats stats;
};

void emit_report(const RunReport& r) {
  nlohmann::json j;
  j["answer"] = r.answer;
  if (r.witness) {
    nlohmann::json w = nlohmann::json::object();
    for (const auto& [name, value] : *r.witness) w[name] = value;
    j["witness"] = w;
  }
  j["magnitude"] = r.magnitude;
  j["timings_ms"] = {{"parse", r.parse_ms},
                     {"solve", r.solve_ms},
                     {"verify", r.verify_ms}};
  j["case_splits"] = r.stats.case_splits;
  j["torsion_branches"] = r.stats.torsion_branches;
  j["power_branches"] = r.stats.power_branches;
  j["depth2_nfa_states"] = r.stats.depth2_nfa_states;
  j["recursion_depth"] = r.stats.max_recursion_depth;
  std::cerr << j.dump() << "\n";
}

struct CommonArgs {
  std::string group_spec;
  std::string tables;
  std::string expr;
  bool report = false;
};

void add_common(CLI::App* sc, CommonArgs& a, bool needs_expr = true) {
  sc->add_option("-g,--group", a.group_spec,
                 "group spec: Z, F<k>, Z/2, Z/3, S3, finite:<table>, "
                 "(S) x Z, (S) * <spec>")
      ->required();
  sc->add_option("--tables", a.tables,
                 "directory for relative finite:<table> paths");
  if (needs_expr)
    sc->add_option("-e,--expr", a.expr, "power expression, e.g. 'a^x b^-2'")
        ->required();
  sc->add_flag("--report", a.report, "print a JSON run report to stderr");
}

int run_decide(const CommonArgs& a, const std::string& route,
               std::optional<Nat> bound) {
  RunReport rep;
  auto t0 = Clock::now();
  auto g = parse_group_spec(a.group_spec, a.tables);
  auto e = parse_expression(g, a.expr);
  rep.parse_ms = ms_since(t0);

  DecideOptions opts;
  opts.route = route == "auto" ? 'x' : route[0];
  opts.bound = bound;
  t0 = Clock::now();
  auto out = decide(e, opts);
  rep.solve_ms = ms_since(t0);

  rep.answer = out.yes ? "yes" : "no";
  rep.witness = out.witness;
  if (out.witness) {
    t0 = Clock::now();
    if (!verify(e, *out.witness))
      throw std::logic_error("witness failed verification");
    rep.verify_ms = ms_since(t0);
    for (auto [name, value] : *out.witness)
      rep.magnitude = std::max(rep.magnitude, value);
  }
  std::cout << rep.answer << "\n";
  if (out.witness) std::cout << fmt_valuation(*out.witness) << "\n";
  if (a.report) emit_report(rep);
  return out.yes ? 0 : 1;
}

int run_solve(const CommonArgs& a) {
  RunReport rep;
  auto t0 = Clock::now();
  auto g = parse_group_spec(a.group_spec, a.tables);
  auto e = parse_expression(g, a.expr);
  rep.parse_ms = ms_since(t0);

  Solver s(g);
  t0 = Clock::now();
  auto sol = s.solve(e);
  rep.solve_ms = ms_since(t0);
  rep.stats = s.stats();
  rep.answer = sol.is_empty() ? "empty" : "solved";
  if (!sol.is_empty()) {
    rep.magnitude = sol.magnitude();
    t0 = Clock::now();
    for (const auto& val : sol.enumerate_box(2))
      if (!verify(e, val))
        throw std::logic_error("solution set failed spot verification");
    rep.verify_ms = ms_since(t0);
  }
  std::cout << sol.to_text();
  if (a.report) emit_report(rep);
  return sol.is_empty() ? 1 : 0;
}

int run_system(const CommonArgs& a, const std::vector<std::string>& exprs) {
  RunReport rep;
  auto t0 = Clock::now();
  auto g = parse_group_spec(a.group_spec, a.tables);
  std::vector<Expression> es;
  for (const auto& text : exprs) es.push_back(parse_expression(g, text));
  rep.parse_ms = ms_since(t0);

  t0 = Clock::now();
  auto out = solve_system(es);
  rep.solve_ms = ms_since(t0);
  rep.answer = out.satisfiable ? "sat" : "unsat";
  rep.witness = out.witness;
  if (!out.solutions.is_empty()) rep.magnitude = out.solutions.magnitude();

  std::cout << rep.answer << "\n";
  if (out.witness) std::cout << fmt_valuation(*out.witness) << "\n";
  std::cout << out.solutions.to_text();
  if (a.report) emit_report(rep);
  return out.satisfiable ? 0 : 1;
}

int run_oracle(const CommonArgs& a, const std::vector<std::string>& exprs,
               Nat box) {
  auto g = parse_group_spec(a.group_spec, a.tables);
  std::vector<Expression> es;
  for (const auto& text : exprs) es.push_back(parse_expression(g, text));
  auto sol = es.size() == 1 ? brute_solve(es[0], box)
                            : brute_solve_system(es, box);
  auto pts = sol.enumerate_box(box);
  for (const auto& val : pts) std::cout << fmt_valuation(val) << "\n";
  return pts.empty() ? 1 : 0;
}

int run_nfa_member(const CommonArgs& a, const std::string& nfa_path) {
  auto g = parse_group_spec(a.group_spec, a.tables);
  auto nfa = word_nfa_from_json(*g, read_input(nfa_path));
  auto res = acyclic_membership(*g, nfa);
  if (!res.accepted) {
    std::cout << "no\n";
    return 1;
  }
  Word w;
  for (int eid : res.run_edges)
    w = concat(w, nfa.edges[static_cast<size_t>(eid)].label);
  std::cout << "yes\n" << g->word_text(w) << "\n";
  return 0;
}

int run_parikh(const std::string& nfa_path) {
  auto nfa = count_nfa_from_json(read_input(nfa_path));
  std::cout << parikh_image(nfa).to_text();
  return 0;
}

int bench_one(size_t idx, const std::string& spec, const Expression& e,
              Nat box, bool& all_ok) {
  std::ostringstream line;
  line << "[" << idx << "] group=\"" << spec << "\" expr=\"" << e.to_text()
       << "\" box=" << box;
  try {
    Solver s(e.group);
    auto t0 = Clock::now();
    auto sol = s.solve(e);
    double solve_ms = ms_since(t0);
    t0 = Clock::now();
    auto expect = brute_solve(e, box);
    double oracle_ms = ms_since(t0);
    bool ok = sol.enumerate_box(box) == expect.enumerate_box(box);
    if (ok && !sol.is_empty())
      ok = verify(e, sol.enumerate_box(sol.magnitude() + 1).front());
    line << " points=" << expect.components().size()
         << " magnitude=" << (sol.is_empty() ? -1 : sol.magnitude())
         << " solve_ms=" << solve_ms << " oracle_ms=" << oracle_ms
         << " splits=" << s.stats().case_splits
         << " depth=" << s.stats().max_recursion_depth
         << " verdict=" << (ok ? "ok" : "MISMATCH");
    if (!ok) all_ok = false;
  } catch (const UnsupportedInstance&) {
    line << " verdict=unsupported";
  }
  std::cout << line.str() << "\n";
  return 0;
}

int run_bench(const std::string& corpus_path, const CommonArgs& a,
              int random_count, Nat box, unsigned seed) {
  bool all_ok = true;
  size_t idx = 0;
  if (!corpus_path.empty()) {
    for (const auto& inst : load_corpus(corpus_path))
      bench_one(idx++, inst.group_spec, inst.expr, inst.box, all_ok);
  }
  if (random_count > 0) {
    if (a.group_spec.empty())
      throw std::runtime_error("--random needs --group");
    auto g = parse_group_spec(a.group_spec, a.tables);
    std::mt19937 rng(seed);
    const int n = static_cast<int>(g->alphabet().size());
    std::uniform_int_distribution<int> letter(0, n - 1);
    std::uniform_int_distribution<int> depth(1, 3), base_len(1, 2),
        const_len(0, 2);
    for (int t = 0; t < random_count; ++t) {
      Expression e;
      e.group = g;
      int k = depth(rng);
      for (int i = 0; i < k; ++i) {
        Word u(static_cast<size_t>(base_len(rng)));
        for (auto& l : u) l = letter(rng);
        Word v(static_cast<size_t>(const_len(rng)));
        for (auto& l : v) l = letter(rng);
        e.u.push_back(u);
        e.vars.push_back("x" + std::to_string(i));
        e.v.push_back(v);
      }
      bench_one(idx++, a.group_spec, e, box, all_ok);
    }
  }
  if (idx == 0) throw std::runtime_error("nothing to bench: give --corpus or --random");
  return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "solution sets of knapsack and exponent equations over groups"};
  app.require_subcommand(1);

  CommonArgs dec_args, sol_args, sys_args, ora_args, nfa_args, ben_args;
  std::string route = "auto";
  std::optional<Nat> bound;
  std::vector<std::string> sys_exprs, ora_exprs;
  Nat ora_box = 8, ben_box = 6;
  std::string nfa_path, count_path, corpus_path;
  int random_count = 0;
  unsigned seed = 1;

  auto* dec = app.add_subcommand(
      "decide", "is there a solution? exit 0 yes, 1 no, 2 error");
  add_common(dec, dec_args);
  dec->add_option("--route", route, "a (solution set), b (grid), auto")
      ->check(CLI::IsMember({"a", "b", "auto"}));
  dec->add_option("--bound", bound, "exponent bound for the grid route");

  auto* sol = app.add_subcommand(
      "solve", "print the full solution set; exit 1 when empty");
  add_common(sol, sol_args);

  auto* sys = app.add_subcommand(
      "system", "simultaneous equations sharing variables");
  add_common(sys, sys_args, false);
  sys->add_option("-e,--expr", sys_exprs, "equation (repeatable)")
      ->required();

  auto* ora = app.add_subcommand(
      "oracle", "brute-force solutions within a box, one per line");
  add_common(ora, ora_args, false);
  ora->add_option("-e,--expr", ora_exprs, "equation (repeatable)")
      ->required();
  ora->add_option("--box", ora_box, "coordinate bound")->required();

  auto* nfm = app.add_subcommand(
      "nfa-member", "does an acyclic word automaton accept the identity?");
  add_common(nfm, nfa_args, false);
  nfm->add_option("--nfa", nfa_path, "word automaton JSON (- for stdin)")
      ->required();

  auto* par = app.add_subcommand(
      "parikh", "exact Parikh image of a counting automaton");
  par->add_option("--nfa", count_path, "counting automaton JSON (- for stdin)")
      ->required();

  auto* ben = app.add_subcommand(
      "bench", "solve instances, check them against the oracle, time them");
  ben->add_option("--corpus", corpus_path, "instance file");
  ben->add_option("-g,--group", ben_args.group_spec, "group for --random");
  ben->add_option("--tables", ben_args.tables, "table directory");
  ben->add_option("--random", random_count, "generate this many instances");
  ben->add_option("--box", ben_box, "oracle box for random instances");
  ben->add_option("--seed", seed, "random generator seed");

  try {
    app.parse(argc, argv);
    if (*dec) return run_decide(dec_args, route, bound);
    if (*sol) return run_solve(sol_args);
    if (*sys) return run_system(sys_args, sys_exprs);
    if (*ora) return run_oracle(ora_args, ora_exprs, ora_box);
    if (*nfm) return run_nfa_member(nfa_args, nfa_path);
    if (*par) return run_parikh(count_path);
    if (*ben) return run_bench(corpus_path, ben_args, random_count, ben_box, seed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
