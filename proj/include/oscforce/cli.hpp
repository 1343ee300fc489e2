#pragma once

// Command-line front end. dispatch() parses argv, runs one module operation,
// prints a RunReport as JSON on `out` and a one-line summary per check on
// `err`. Output is a function of the arguments and stdin only.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oscforce/alphabet.hpp"
#include "oscforce/error.hpp"
#include "oscforce/forcing.hpp"
#include "oscforce/json_io.hpp"
#include "oscforce/oscillation.hpp"
#include "oscforce/perfectset.hpp"
#include "oscforce/seqspace.hpp"
#include "oscforce/sptrees.hpp"

namespace oscforce::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_verification_failed = 1,
  exit_usage = 2,
  exit_malformed_json = 3,
  exit_precondition = 4,
  exit_budget_exhausted = 5,
};

inline constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  every check passed\n"
    "  1  a verification check failed (including refine or labeler contract failures)\n"
    "  2  usage error or unknown subcommand\n"
    "  3  malformed JSON or malformed literal input\n"
    "  4  violated precondition (bad sequence, alphabet mismatch, overflow, missing bit)\n"
    "  5  budget exhausted before the oracle produced a witness\n";

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return exit_malformed_json;
    case ErrorCode::budget_exhausted: return exit_budget_exhausted;
    case ErrorCode::invariant_violation:
    case ErrorCode::labeler_violation:
    case ErrorCode::refine_failure: return exit_verification_failed;
    case ErrorCode::precondition:
    case ErrorCode::overflow:
    case ErrorCode::alphabet_mismatch:
    case ErrorCode::missing_bit: return exit_precondition;
  }
  return exit_precondition;
}

struct Verdict {
  std::string check;
  std::string status;  // pass | fail | unknown
  std::string detail;
};

struct RunReport {
  std::string command;
  std::string inputs_digest;
  std::vector<Verdict> verdicts;
  int exit_status = exit_ok;
  Json result = Json::object();
  std::optional<Json> error;

  void check(std::string name, bool passed, std::string detail = {}) {
    verdicts.push_back({std::move(name), passed ? "pass" : "fail", std::move(detail)});
  }
  void unknown(std::string name, std::string detail) {
    verdicts.push_back({std::move(name), "unknown", std::move(detail)});
  }
  bool any_failed() const {
    return std::any_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.status == "fail"; });
  }
};

inline Json to_json(const RunReport& r) {
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) {
    Json jv{{"check", v.check}, {"status", v.status}};
    if (!v.detail.empty()) jv["detail"] = v.detail;
    verdicts.push_back(std::move(jv));
  }
  Json out{{"command", r.command},
           {"inputs_digest", r.inputs_digest},
           {"verdicts", verdicts},
           {"exit_status", r.exit_status},
           {"result", r.result}};
  if (r.error) out["error"] = *r.error;
  return out;
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace detail {

struct Options {
  std::string alphabet = "omega";
  std::string tree = "full";
  std::string target;
  std::size_t budget = 256;
  std::size_t depth = 0;
  std::size_t len = 0;
  std::size_t k = 0;
  Nat seed = 1;
  std::optional<std::string> reqs;
  std::optional<std::string> x, y, z;
  std::optional<std::size_t> upto, bits;
  std::optional<Nat> i, j, kslot, n;
  std::optional<std::string> word, parts;
  std::optional<std::size_t> merge_len;
  std::string poset = "cohen:1";
  std::optional<std::size_t> steps;
  std::optional<std::string> start;
  std::string labels = "0,1,2";
  bool compact = false;
};

/// Lazily read stdin; the text joins the inputs digest once consumed.
class Input {
 public:
  explicit Input(std::istream& in) : in_(in) {}

  const std::string& text() {
    if (!read_) {
      text_.assign(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
      read_ = true;
    }
    return text_;
  }
  Json json() {
    Json j = Json::parse(text(), nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::parse, "stdin does not hold valid JSON");
    return j;
  }
  bool consumed() const noexcept { return read_; }

 private:
  std::istream& in_;
  std::string text_;
  bool read_ = false;
};

template <OrderedAlphabet A>
BasicIncSeq<typename A::value_type> seq_arg(const Json& j, const char* name) {
  using V = typename A::value_type;
  if (!j.is_array()) fail(ErrorCode::parse, std::string(name) + " must be a JSON list");
  auto values = j.get<std::vector<V>>();
  auto verdict = validate_inc(values);
  if (!verdict.valid) {
    fail(ErrorCode::precondition,
         std::string(name) + " is not strictly increasing at index " + std::to_string(*verdict.first_violation));
  }
  return BasicIncSeq<V>(std::move(values));
}

template <OrderedAlphabet A>
void run_oscillate(const Options& o, Input& in, RunReport& r) {
  Json jx, jy, jz;
  if (o.x || o.y || o.z) {
    if (!(o.x && o.y && o.z)) fail(ErrorCode::precondition, "oscillate needs all of --x, --y, --z");
    jx = load_json_arg(*o.x);
    jy = load_json_arg(*o.y);
    jz = load_json_arg(*o.z);
  } else {
    const Json j = in.json();
    if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j.contains("z")) {
      fail(ErrorCode::parse, "stdin must be {\"x\": [...], \"y\": [...], \"z\": [...]}");
    }
    jx = j.at("x");
    jy = j.at("y");
    jz = j.at("z");
  }
  const auto x = seq_arg<A>(jx, "x");
  const auto y = seq_arg<A>(jy, "y");
  const auto z = seq_arg<A>(jz, "z");
  const std::size_t window = std::min({x.size(), y.size(), z.size()});
  require(window >= 1, ErrorCode::precondition, "oscillate needs nonempty sequences");
  const std::size_t upto = o.upto.value_or(window - 1);
  const auto set = osc_set(x.view(), y.view(), z.view(), upto);
  const auto c = color(x.view(), y.view(), z.view(), o.bits.value_or(window));
  const std::size_t want = o.bits.value_or(c.indices.size());
  const auto shown = color(x.view(), y.view(), z.view(), want);
  r.result = {{"alphabet", std::string(A::name())}, {"window", window},     {"upto", upto},
              {"osc_set", set},                     {"indices", c.indices}, {"bits", shown.bits},
              {"complete", shown.complete}};
  r.check("increasing", true);
  if (shown.complete) {
    r.check("color-complete", true);
  } else {
    r.unknown("color-complete", "only " + std::to_string(c.indices.size()) + " oscillation points in the window");
  }
}

template <OrderedAlphabet A>
void run_invert(const Options& o, RunReport& r) {
  const auto tree = load_tree<A>(o.tree);
  const BitWord target(o.target);
  const auto inv = invert(*tree, target, o.budget);
  const auto problems = verify_inversion(*tree, inv, target);
  const auto c = color(inv.x, inv.y, inv.z, target.size());
  r.result = to_json(inv);
  r.result["tree"] = tree->describe();
  r.result["alphabet"] = std::string(A::name());
  r.result["target"] = target;
  r.result["color"] = c.bits;
  r.result["verified"] = problems.empty();
  r.check("verified", problems.empty(), problems.empty() ? "" : problems.front());
  r.check("color", c.complete && c.bits == target, "color " + c.bits.str());
}

template <OrderedAlphabet A>
void run_surjectivity(const Options& o, RunReport& r) {
  const auto tree = load_tree<A>(o.tree);
  const auto report = surjectivity_check(*tree, o.len, o.budget);
  r.result = to_json(report);
  r.result["alphabet"] = std::string(A::name());
  r.check("surjective", report.ok(),
          std::to_string(report.verified_count()) + "/" + std::to_string(report.rows.size()) + " verified");
}

template <OrderedAlphabet A>
void run_tree_validate(const Options& o, RunReport& r) {
  const auto tree = load_tree<A>(o.tree);
  const auto report = validate_tree(*tree, o.depth, o.budget);
  r.result = to_json(report);
  r.result["tree"] = tree->describe();
  r.result["alphabet"] = std::string(A::name());
  r.check("tree-valid", report.ok(),
          report.ok() ? std::to_string(report.nodes_checked) + " nodes" : report.violations.front().kind);
}

inline BitWord word_input(const Options& o, Input& in) {
  if (o.word) return BitWord(*o.word);
  const Json j = in.json();
  if (j.is_string()) return j.get<BitWord>();
  if (j.is_object() && j.contains("word")) return j.at("word").get<BitWord>();
  fail(ErrorCode::parse, "expected --word or a JSON word on stdin");
}

inline void run_blocks_split(const Options& o, Input& in, RunReport& r) {
  require(o.i.has_value(), ErrorCode::precondition, "blocks split needs --i");
  const BitWord d = word_input(o, in);
  const BitWord part = o.j ? block_split2(d, *o.i, *o.j) : block_split(d, *o.i);
  r.result = {{"word", d}, {"i", *o.i}, {"part", part}};
  if (o.j) r.result["j"] = *o.j;
  // Independent re-read through block_index.
  BitWord again;
  for (Nat k = 0; k < part.size(); ++k) {
    Nat pos = o.j ? block_index(*o.i, block_index(*o.j, k)) : block_index(*o.i, k);
    again.push_back(d[pos]);
  }
  r.check("positions", again == part);
}

inline void run_blocks_merge(const Options& o, Input& in, RunReport& r) {
  Json j = o.parts ? load_json_arg(*o.parts) : in.json();
  std::optional<std::size_t> len = o.merge_len;
  if (j.is_object() && j.contains("parts")) {
    if (!len && j.contains("len")) len = j.at("len").get<std::size_t>();
    j = j.at("parts");
  }
  if (!j.is_object()) fail(ErrorCode::parse, "parts must be a JSON object mapping block index to word");
  std::map<Nat, BitWord> parts;
  for (const auto& [key, value] : j.items()) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::parse, "part keys must be decimal block indices");
    }
    parts.emplace(std::stoull(key), value.get<BitWord>());
  }
  require(len.has_value(), ErrorCode::precondition, "blocks merge needs --len");
  const BitWord d = block_merge(parts, *len);
  Json jparts = Json::object();
  for (const auto& [i, w] : parts) jparts[std::to_string(i)] = w;
  r.result = {{"len", *len}, {"parts", jparts}, {"word", d}};
  bool agrees = true;
  for (const auto& [i, w] : parts) {
    const BitWord back = block_split(d, i);
    agrees = agrees && back.is_prefix_of(w);
  }
  r.check("roundtrip", agrees);
}

inline void run_blocks_index(const Options& o, RunReport& r) {
  if (o.n) {
    const auto [i, k] = block_locate(*o.n);
    r.result = {{"n", *o.n}, {"i", i}, {"k", k}};
    r.check("inverse", block_index(i, k) == *o.n);
    return;
  }
  require(o.i && o.kslot, ErrorCode::precondition, "blocks index needs --i and --k, or --n");
  const Nat n = block_index(*o.i, *o.kslot);
  r.result = {{"i", *o.i}, {"k", *o.kslot}, {"n", n}};
  r.check("inverse", block_locate(n) == std::pair{*o.i, *o.kslot});
}

inline std::pair<std::string, Nat> poset_arg(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if ((kind != "cohen" && kind != "collapse") || colon == std::string::npos) {
    fail(ErrorCode::parse, "poset must be cohen:K or collapse:D");
  }
  const std::string digits = spec.substr(colon + 1);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    fail(ErrorCode::parse, "poset parameter must be a decimal number");
  }
  return {kind, std::stoull(digits)};
}

template <Poset P>
void report_chain(const P& poset, const std::vector<DenseReq<typename P::condition_type>>& reqs,
                  const typename P::condition_type& start, RunReport& r) {
  const auto chain = rs_generic(poset, reqs, start);
  bool descending = true;
  bool meets = true;
  bool valid = true;
  for (std::size_t n = 0; n < chain.size(); ++n) {
    valid = valid && poset.valid(chain[n]);
    if (n > 0) {
      descending = descending && poset.leq(chain[n], chain[n - 1]);
      meets = meets && reqs[n - 1].member(chain[n]);
    }
  }
  Json names = Json::array();
  for (const auto& q : reqs) names.push_back(q.name);
  r.result["requirements"] = names;
  r.result["chain"] = chain;
  r.result["final"] = chain.back();
  r.check("valid", valid);
  r.check("descending", descending);
  r.check("meets-requirements", meets);
}

template <class Cond>
std::vector<DenseReq<Cond>> first_steps(std::vector<DenseReq<Cond>> reqs, const std::optional<std::size_t>& steps) {
  if (steps && *steps < reqs.size()) reqs.resize(*steps);
  return reqs;
}

inline void run_generic(const Options& o, RunReport& r) {
  const auto [kind, param] = poset_arg(o.poset);
  r.result["poset"] = o.poset;
  if (kind == "cohen") {
    const CohenPoset poset(param);
    std::vector<DenseReq<CohenCondition>> reqs;
    if (o.reqs) {
      reqs = parse_cohen_reqs(load_json_arg(*o.reqs));
    } else {
      for (Nat i = 0; i < param; ++i) reqs.push_back(defined_upto(i, 4));
      for (Nat i = 0; i < param; ++i) {
        for (Nat j = i + 1; j < param; ++j) reqs.push_back(coordinates_differ(i, j));
      }
    }
    const CohenCondition start = o.start ? load_json_arg(*o.start).get<CohenCondition>() : poset.root();
    report_chain(poset, first_steps(std::move(reqs), o.steps), start, r);
  } else {
    const CollapsePoset poset(param);
    std::vector<DenseReq<CollapseCondition>> reqs;
    if (o.reqs) {
      reqs = parse_collapse_reqs(load_json_arg(*o.reqs));
    } else {
      for (Nat n = 0; n < 4; ++n) reqs.push_back(in_domain(n));
      for (Nat b = 0; b < param; ++b) reqs.push_back(in_range(b));
    }
    const CollapseCondition start = o.start ? load_json_arg(*o.start).get<CollapseCondition>() : poset.root();
    report_chain(poset, first_steps(std::move(reqs), o.steps), start, r);
  }
}

inline std::vector<Nat> labels_arg(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (!j.is_discarded() && j.is_array()) return j.get<std::vector<Nat>>();
  std::vector<Nat> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::parse, "labels must be a comma list or JSON list of naturals");
    }
    out.push_back(std::stoull(item));
  }
  return out;
}

inline void run_fuse(const Options& o, RunReport& r) {
  const CohenPoset poset(1);
  const auto labels = labels_arg(o.labels);
  require(!labels.empty(), ErrorCode::precondition, "fuse needs at least one label");
  const auto reqs = o.reqs ? parse_cohen_reqs(load_json_arg(*o.reqs)) : random_open_reqs(o.seed, o.depth + 1);
  for (const auto& q : reqs) require(q.open, ErrorCode::precondition, "fuse needs open requirements");
  const auto labeler = unary_gap_labeler(0);
  const auto tree = fuse_generic_tree(poset, reqs, labeler, labels, o.depth);
  const auto report = check_fusion(tree, poset, reqs, labeler);
  Json names = Json::array();
  for (const auto& q : reqs) names.push_back(q.name);
  r.result = to_json(tree);
  r.result["requirements"] = names;
  r.result["node_count"] = tree.nodes.size();
  for (const auto& c : report.checks) r.check(c.name, c.passed(), c.first_detail);
}

inline void run_perfectset(const Options& o, RunReport& r) {
  require(o.k >= 1, ErrorCode::precondition, "perfectset needs --k >= 1");
  const auto family = o.reqs ? parse_cohen_reqs(load_json_arg(*o.reqs)) : default_cohen_family(o.k, o.depth);
  const auto pg = pgeneric_tree(lift_family(family, o.k), o.depth);
  const auto cert = perfect_mutual_cert(pg.generic, o.k, family, o.budget);
  Json names = Json::array();
  for (const auto& q : family) names.push_back(q.name);
  r.result = {{"depth", o.depth},
              {"k", o.k},
              {"requirements", names},
              {"prefix", pg.prefix},
              {"branches", branches(pg.prefix)},
              {"generic", pg.generic},
              {"certificate", to_json(cert)}};
  const auto verdict = pcond_validate(pg.prefix.m(), pg.prefix.nodes());
  r.check("valid-prefix", verdict.valid, verdict.first_violation);
  r.check("finitely-perfect", finitely_perfect(pg.prefix));
  r.check("certificate", cert.ok(),
          std::to_string(cert.met) + " met, " + std::to_string(cert.not_met) + " not met, " +
              std::to_string(cert.unknown) + " unknown at budget " + std::to_string(cert.budget));
}

template <template <class> class Run>
void with_alphabet(const Options& o, RunReport& r, Input& in) {
  if (o.alphabet == "omega") {
    Run<Omega>{}(o, r, in);
  } else if (o.alphabet == "lex2") {
    Run<LexOmega2>{}(o, r, in);
  } else {
    fail(ErrorCode::parse, "alphabet must be omega or lex2");
  }
}

template <class A>
struct OscillateRun {
  void operator()(const Options& o, RunReport& r, Input& in) const { run_oscillate<A>(o, in, r); }
};
template <class A>
struct InvertRun {
  void operator()(const Options& o, RunReport& r, Input&) const { run_invert<A>(o, r); }
};
template <class A>
struct SurjectivityRun {
  void operator()(const Options& o, RunReport& r, Input&) const { run_surjectivity<A>(o, r); }
};
template <class A>
struct TreeValidateRun {
  void operator()(const Options& o, RunReport& r, Input&) const { run_tree_validate<A>(o, r); }
};

}  // namespace detail

/// Runs one command. Returns the process exit status.
inline int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  using detail::Options;
  Options o;

  CLI::App app{"Oscillation colorings, superperfect trees and finite-condition forcing", "oscforce"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.add_flag("--json", o.compact, "Print the report as compact single-line JSON");

  auto alphabet = [&](CLI::App* c) {
    c->add_option("--alphabet", o.alphabet, "omega or lex2")->capture_default_str();
  };
  auto tree = [&](CLI::App* c) {
    c->add_option("--tree", o.tree, "full, even, comb, rand:N, JSON spec, or a file")->capture_default_str();
  };
  auto compact = [&](CLI::App* c) { c->add_flag("--json", o.compact, "Compact output"); };

  auto* osc = app.add_subcommand("oscillate", "Oscillation set and coloring of a triple (JSON on stdin or --x/--y/--z)");
  alphabet(osc);
  compact(osc);
  osc->add_option("--x", o.x, "x as inline JSON or a file");
  osc->add_option("--y", o.y, "y as inline JSON or a file");
  osc->add_option("--z", o.z, "z as inline JSON or a file");
  osc->add_option("--upto", o.upto, "Largest n to test (default: window - 1)");
  osc->add_option("--bits", o.bits, "Number of color bits requested (default: all found)");

  auto* inv = app.add_subcommand("invert", "Build a triple in a tree realizing a target coloring");
  alphabet(inv);
  tree(inv);
  compact(inv);
  inv->add_option("--target", o.target, "Target bits");
  inv->add_option("--budget", o.budget, "Oracle probe budget")->capture_default_str();

  auto* surj = app.add_subcommand("surjectivity", "Invert and verify every word of a given length");
  alphabet(surj);
  tree(surj);
  compact(surj);
  o.len = 3;
  surj->add_option("--len", o.len, "Word length")->capture_default_str();
  surj->add_option("--budget", o.budget, "Oracle probe budget")->capture_default_str();

  auto* tr = app.add_subcommand("tree", "Tree utilities");
  tr->require_subcommand(1);
  auto* validate = tr->add_subcommand("validate", "Check an oracle's promises to a depth");
  alphabet(validate);
  tree(validate);
  compact(validate);
  validate->add_option("--depth", o.depth, "Depth (default 3)");
  validate->add_option("--budget", o.budget, "Probe budget (default 16)");

  auto* blocks = app.add_subcommand("blocks", "Dyadic block partition of positions");
  blocks->require_subcommand(1);
  auto* split = blocks->add_subcommand("split", "Restrict a word to A_i (or A_{i,j})");
  compact(split);
  split->add_option("--word", o.word, "Word (default: JSON on stdin)");
  split->add_option("--i", o.i, "Block index i")->required();
  split->add_option("--j", o.j, "Second-level index j");
  auto* merge = blocks->add_subcommand("merge", "Reassemble a word from its blocks");
  compact(merge);
  merge->add_option("--parts", o.parts, "{\"0\": \"..\", ...} inline or a file (default: stdin)");
  merge->add_option("--len", o.merge_len, "Output length (default: \"len\" in the JSON input)");
  auto* index = blocks->add_subcommand("index", "k-th element of A_i, or locate n with --n");
  compact(index);
  index->add_option("--i", o.i, "Block index i");
  index->add_option("--k", o.kslot, "Slot k");
  index->add_option("--n", o.n, "Position to locate");

  auto* gen = app.add_subcommand("generic", "Meet a list of dense requirements from a start condition");
  compact(gen);
  gen->add_option("--poset", o.poset, "cohen:K or collapse:D")->capture_default_str();
  gen->add_option("--reqs", o.reqs, "Requirement list, inline JSON or a file");
  gen->add_option("--steps", o.steps, "Use only the first N requirements");
  gen->add_option("--start", o.start, "Start condition (default: root)");

  auto* fuse = app.add_subcommand("fuse", "Fusion tree over C(1) with the unary-gap labeler");
  compact(fuse);
  fuse->add_option("--labels", o.labels, "Sampled labels, comma list or JSON")->capture_default_str();
  fuse->add_option("--depth", o.depth, "Tree depth (default 2)");
  fuse->add_option("--seed", o.seed, "Seed for the default requirement list")->capture_default_str();
  fuse->add_option("--reqs", o.reqs, "Open C(1) requirements (more than depth of them)");

  auto* perfect = app.add_subcommand("perfectset", "Generic perfect tree and branch-tuple certificate");
  compact(perfect);
  perfect->add_option("--depth", o.depth, "Depth (default 6)");
  perfect->add_option("--k", o.k, "Tuple size (default 2)");
  perfect->add_option("--reqs", o.reqs, "C(k) requirement family to lift and certify");
  perfect->add_option("--budget", o.budget, "Per-requirement search budget (default 4096)");

  for (const auto& a : args) {
    if (a.empty() || a[0] == '-') continue;
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(), [&](CLI::App* c) { return c->get_name() == a; });
    if (!known) {
      err << "oscforce: unknown subcommand '" << a << "'\n" << "run with --help for usage\n";
      return exit_usage;
    }
    break;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "oscforce: " << e.what() << "\n" << "run with --help for usage\n";
    return exit_usage;
  }

  auto given = [](CLI::App* c, const char* name) { return c->count(name) > 0; };
  detail::Input input(in);
  RunReport r;
  std::function<void()> run;
  if (osc->parsed()) {
    r.command = "oscillate";
    run = [&] { detail::with_alphabet<detail::OscillateRun>(o, r, input); };
  } else if (inv->parsed()) {
    r.command = "invert";
    run = [&] { detail::with_alphabet<detail::InvertRun>(o, r, input); };
  } else if (surj->parsed()) {
    r.command = "surjectivity";
    run = [&] { detail::with_alphabet<detail::SurjectivityRun>(o, r, input); };
  } else if (validate->parsed()) {
    r.command = "tree validate";
    if (!given(validate, "--depth")) o.depth = 3;
    if (!given(validate, "--budget")) o.budget = 16;
    run = [&] { detail::with_alphabet<detail::TreeValidateRun>(o, r, input); };
  } else if (split->parsed()) {
    r.command = "blocks split";
    run = [&] { detail::run_blocks_split(o, input, r); };
  } else if (merge->parsed()) {
    r.command = "blocks merge";
    run = [&] { detail::run_blocks_merge(o, input, r); };
  } else if (index->parsed()) {
    r.command = "blocks index";
    run = [&] { detail::run_blocks_index(o, r); };
  } else if (gen->parsed()) {
    r.command = "generic";
    run = [&] { detail::run_generic(o, r); };
  } else if (fuse->parsed()) {
    r.command = "fuse";
    if (!given(fuse, "--depth")) o.depth = 2;
    run = [&] { detail::run_fuse(o, r); };
  } else if (perfect->parsed()) {
    r.command = "perfectset";
    if (!given(perfect, "--depth")) o.depth = 6;
    if (!given(perfect, "--k")) o.k = 2;
    if (!given(perfect, "--budget")) o.budget = 4096;
    run = [&] { detail::run_perfectset(o, r); };
  } else {
    err << "oscforce: missing subcommand\nrun with --help for usage\n";
    return exit_usage;
  }

  auto record_error = [&](int code, const std::string& kind, const std::string& message) {
    r.exit_status = code;
    r.verdicts.push_back({"run", "fail", message});
    r.error = Json{{"code", kind}, {"message", message}};
  };
  try {
    run();
    r.exit_status = r.any_failed() ? exit_verification_failed : exit_ok;
  } catch (const Error& e) {
    record_error(exit_code_for(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const Json::exception& e) {
    record_error(exit_malformed_json, "parse", e.what());
  }

  // Arguments naming files contribute their contents too.
  std::string digest_input;
  for (const auto& a : args) {
    digest_input += a;
    digest_input.push_back('\0');
    std::error_code ec;
    if (!a.empty() && a.front() != '-' && std::filesystem::is_regular_file(a, ec)) {
      std::ifstream file(a, std::ios::binary);
      std::stringstream buf;
      buf << file.rdbuf();
      digest_input += buf.str();
      digest_input.push_back('\0');
    }
  }
  if (input.consumed()) digest_input += input.text();
  r.inputs_digest = "fnv1a64:" + fnv1a_hex(digest_input);

  const Json report = to_json(r);
  out << (o.compact ? report.dump() : report.dump(2)) << "\n";
  for (const auto& v : r.verdicts) {
    err << r.command << ": " << v.check << " " << v.status;
    if (!v.detail.empty()) err << " (" << v.detail << ")";
    err << "\n";
  }
  return r.exit_status;
}

}  // namespace oscforce::cli
