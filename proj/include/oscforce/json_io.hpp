#pragma once

// JSON encodings of the library's values and the loaders for tree and
// requirement specifications.
//
//   IncSeq            [0, 2, 5]
//   BitWord           "0110"
//   LexPair           [major, minor]
//   CohenCondition    [[n, i, bit], ...]
//   CollapseCondition [[n, beta], ...]
//   PerfectCondition  {"m": m, "nodes": ["", "0", ...]}
//   tree spec         "full" | "even" | "comb" | "rand:N" | {"rand": N}
//                     | {"constraints": [{"depth": d, "mod": m, "rem": r}]}
//                     | {"graft": [spec, spec]} | path to a file holding one
//   requirement spec  [{"cell": [n, i]}, {"defined": [i, upto]},
//                      {"differ": [i, j]}, {"pattern": ["01", "10"]},
//                      {"after": [i, "01", from]}, {"domain": n},
//                      {"range": beta}]

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oscforce/alphabet.hpp"
#include "oscforce/error.hpp"
#include "oscforce/forcing.hpp"
#include "oscforce/oscillation.hpp"
#include "oscforce/perfectset.hpp"
#include "oscforce/seqspace.hpp"
#include "oscforce/sptrees.hpp"

namespace oscforce {

using Json = nlohmann::json;

inline void to_json(Json& j, const LexPair& v) { j = Json::array({v.major, v.minor}); }
inline void from_json(const Json& j, LexPair& v) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::parse, "a lex2 value is a pair [major, minor]");
  v = {j.at(0).get<Nat>(), j.at(1).get<Nat>()};
}

inline void to_json(Json& j, const BitWord& w) { j = w.str(); }
inline void from_json(const Json& j, BitWord& w) {
  if (!j.is_string()) fail(ErrorCode::parse, "a bit word is a string over 01");
  w = BitWord(j.get<std::string>());
}

template <class V>
void to_json(Json& j, const BasicIncSeq<V>& s) {
  j = s.entries();
}
template <class V>
void from_json(const Json& j, BasicIncSeq<V>& s) {
  s = BasicIncSeq<V>(j.get<std::vector<V>>());
}

inline void to_json(Json& j, const CohenCondition& p) {
  j = Json::array();
  for (const auto& [key, bit] : p) j.push_back(Json::array({key.n, key.i, bit ? 1 : 0}));
}
inline void from_json(const Json& j, CohenCondition& p) {
  if (!j.is_array()) fail(ErrorCode::parse, "a Cohen condition is a list of [n, i, bit]");
  std::vector<CohenCondition::Cell> cells;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 3) fail(ErrorCode::parse, "a Cohen cell is [n, i, bit]");
    const auto bit = c.at(2).get<Nat>();
    if (bit > 1) fail(ErrorCode::parse, "a Cohen cell's value must be 0 or 1");
    cells.push_back({{c.at(0).get<Nat>(), c.at(1).get<Nat>()}, bit == 1});
  }
  p = CohenCondition(std::move(cells));
}

inline void to_json(Json& j, const CollapseCondition& p) {
  j = Json::array();
  for (const auto& [n, beta] : p) j.push_back(Json::array({n, beta}));
}
inline void from_json(const Json& j, CollapseCondition& p) {
  if (!j.is_array()) fail(ErrorCode::parse, "a collapse condition is a list of [n, beta]");
  std::vector<CollapseCondition::Cell> cells;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 2) fail(ErrorCode::parse, "a collapse cell is [n, beta]");
    cells.push_back({c.at(0).get<Nat>(), c.at(1).get<Nat>()});
  }
  p = CollapseCondition(std::move(cells));
}

inline void to_json(Json& j, const PerfectCondition& p) { j = Json{{"m", p.m()}, {"nodes", p.nodes()}}; }
inline void from_json(const Json& j, PerfectCondition& p) {
  if (!j.is_object() || !j.contains("m") || !j.contains("nodes")) {
    fail(ErrorCode::parse, "a perfect condition is {\"m\": m, \"nodes\": [words]}");
  }
  p = pcond_from_nodes(j.at("m").get<std::size_t>(), j.at("nodes").get<std::vector<BitWord>>());
}

/// Reads inline JSON, or the contents of the named file when the text does
/// not parse as JSON and names an existing file.
inline Json load_json_arg(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (!j.is_discarded()) return j;
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) {
    std::ifstream file(text);
    std::stringstream buf;
    buf << file.rdbuf();
    j = Json::parse(buf.str(), nullptr, false);
    if (!j.is_discarded()) return j;
    fail(ErrorCode::parse, "file '" + text + "' does not hold valid JSON");
  }
  fail(ErrorCode::parse, "argument is neither JSON nor a readable file: " + text);
}

// ---------------------------------------------------------------------------
// Tree specifications

namespace detail {

template <OrderedAlphabet A>
TreePtr<A> tree_from_json(const Json& j);

template <OrderedAlphabet A>
TreePtr<A> named_tree(const std::string& name) {
  if (name == "full") return full_tree<A>();
  if (name.rfind("rand:", 0) == 0) {
    const std::string digits = name.substr(5);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::parse, "rand:N needs a decimal seed");
    }
    return rand_sptree<A>(std::stoull(digits));
  }
  if (name == "even" || name == "comb") {
    if constexpr (std::is_same_v<A, Omega>) {
      return name == "even" ? even_tree() : comb_tree();
    } else {
      fail(ErrorCode::alphabet_mismatch, "tree '" + name + "' is only defined over omega");
    }
  }
  return nullptr;
}

template <OrderedAlphabet A>
TreePtr<A> tree_from_json(const Json& j) {
  if (j.is_string()) {
    auto t = named_tree<A>(j.get<std::string>());
    if (!t) fail(ErrorCode::parse, "unknown tree name '" + j.get<std::string>() + "'");
    return t;
  }
  if (!j.is_object() || j.size() != 1) fail(ErrorCode::parse, "a tree spec object has exactly one key");
  if (j.contains("rand")) return rand_sptree<A>(j.at("rand").get<Nat>());
  if (j.contains("graft")) {
    const auto& parts = j.at("graft");
    if (!parts.is_array() || parts.size() != 2) fail(ErrorCode::parse, "graft takes two tree specs");
    return graft<A>(tree_from_json<A>(parts.at(0)), tree_from_json<A>(parts.at(1)));
  }
  if (j.contains("constraints")) {
    if constexpr (std::is_same_v<A, Omega>) {
      std::vector<ModConstraint> cs;
      for (const auto& c : j.at("constraints")) {
        ModConstraint mc;
        if (c.contains("depth")) mc.depth = c.at("depth").get<std::size_t>();
        mc.mod = c.at("mod").get<Nat>();
        mc.rem = c.value("rem", Nat{0});
        cs.push_back(mc);
      }
      return constraint_tree(std::move(cs));
    } else {
      fail(ErrorCode::alphabet_mismatch, "constraint trees are only defined over omega");
    }
  }
  fail(ErrorCode::parse, "unknown tree spec key '" + j.begin().key() + "'");
}

}  // namespace detail

/// Builds a tree from a spec string: a builtin name, inline JSON, or a path.
template <OrderedAlphabet A>
TreePtr<A> load_tree(const std::string& spec) {
  if (auto t = detail::named_tree<A>(spec)) return t;
  return detail::tree_from_json<A>(load_json_arg(spec));
}

// ---------------------------------------------------------------------------
// Requirement specifications

namespace detail {

inline std::pair<std::string, const Json*> req_entry(const Json& j) {
  if (!j.is_object() || j.size() != 1) fail(ErrorCode::parse, "a requirement spec is an object with one key");
  return {j.begin().key(), &j.begin().value()};
}

}  // namespace detail

inline std::vector<DenseReq<CohenCondition>> parse_cohen_reqs(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::parse, "requirements are a JSON list");
  std::vector<DenseReq<CohenCondition>> out;
  for (const auto& item : j) {
    auto [kind, arg] = detail::req_entry(item);
    const Json& a = *arg;
    if (kind == "cell") {
      out.push_back(cell_defined(a.at(0).get<Nat>(), a.at(1).get<Nat>()));
    } else if (kind == "defined") {
      out.push_back(defined_upto(a.at(0).get<Nat>(), a.at(1).get<Nat>()));
    } else if (kind == "differ") {
      out.push_back(coordinates_differ(a.at(0).get<Nat>(), a.at(1).get<Nat>()));
    } else if (kind == "pattern") {
      out.push_back(joint_pattern(a.get<std::vector<BitWord>>()));
    } else if (kind == "after") {
      out.push_back(pattern_after(a.at(0).get<Nat>(), a.at(1).get<BitWord>(), a.at(2).get<Nat>()));
    } else {
      fail(ErrorCode::parse, "unknown Cohen requirement '" + kind + "'");
    }
  }
  return out;
}

inline std::vector<DenseReq<CollapseCondition>> parse_collapse_reqs(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::parse, "requirements are a JSON list");
  std::vector<DenseReq<CollapseCondition>> out;
  for (const auto& item : j) {
    auto [kind, arg] = detail::req_entry(item);
    if (kind == "domain") {
      out.push_back(in_domain(arg->get<Nat>()));
    } else if (kind == "range") {
      out.push_back(in_range(arg->get<Nat>()));
    } else {
      fail(ErrorCode::parse, "unknown collapse requirement '" + kind + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

template <OrderedAlphabet A>
Json to_json(const Inversion<A>& inv) {
  Json stages = Json::array();
  for (const auto& s : inv.trace.stages) {
    stages.push_back({{"l", s.l}, {"m", s.m}, {"n", s.n}, {"bit", s.bit ? 1 : 0}});
  }
  return {{"x", inv.x},
          {"y", inv.y},
          {"z", inv.z},
          {"trace", {{"indices", inv.trace.indices}, {"bits", inv.trace.bits}, {"stages", stages}}}};
}

inline Json to_json(const SurjectivityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json jr{{"word", row.word}, {"success", row.success}, {"verified", row.verified}};
    if (!row.detail.empty()) jr["detail"] = row.detail;
    rows.push_back(std::move(jr));
  }
  return {{"tree", r.tree}, {"word_len", r.word_len}, {"verified", r.verified_count()}, {"total", r.rows.size()},
          {"rows", rows}};
}

template <OrderedAlphabet A>
Json to_json(const TreeReport<A>& r) {
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back({{"node", v.node}, {"kind", v.kind}, {"detail", v.detail}});
  return {{"nodes_checked", r.nodes_checked}, {"violations", vs}};
}

template <class Cond>
Json to_json(const FusionTree<Cond>& tree) {
  Json nodes = Json::object();
  for (const auto& [t, node] : tree.nodes) {
    nodes[index_key(t)] = {{"condition", node.condition}, {"labels", node.labels}};
  }
  return {{"labels", tree.label_sample}, {"depth", tree.depth}, {"nodes", nodes}};
}

inline Json to_json(const GenericityVerdict& v) {
  Json out{{"req", v.req}, {"verdict", std::string(to_string(v.kind))}, {"evaluations", v.evaluations}};
  if (v.witness) out["witness"] = *v.witness;
  return out;
}

/// Certificate summary plus per-tuple verdict kinds (witnesses omitted).
inline Json to_json(const PerfectCert& cert) {
  Json tuples = Json::array();
  for (const auto& t : cert.tuples) {
    Json kinds = Json::array();
    for (const auto& v : t.verdicts) kinds.push_back(std::string(to_string(v.kind)));
    tuples.push_back({{"branches", t.branch_indices}, {"verdicts", kinds}});
  }
  return {{"k", cert.k},         {"budget", cert.budget},   {"met", cert.met}, {"not_met", cert.not_met},
          {"unknown", cert.unknown}, {"pass", cert.ok()}, {"tuples", tuples}};
}

}  // namespace oscforce
