#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lipdyn/dynamics.hpp"
#include "lipdyn/errors.hpp"
#include "lipdyn/matrix.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/oracles.hpp"
#include "lipdyn/scalar.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

// JSON presentations for trees, symbols and vectors, CSV for matrices and
// orbits. Exact scalars travel as "p/q" strings so round trips lose nothing;
// floating payloads use plain numbers. Unknown keys are rejected: a typo in
// an input file should fail loudly, not silently change the object.

namespace lipdyn {

using json = nlohmann::json;

// --- file IO --------------------------------------------------------------

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("invalid JSON in " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write to " + path + " failed");
}

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + " must be a JSON object");
    for (const auto& [key, val] : j.items())
        if (!allowed.count(key))
            throw ValidationError("unknown key \"" + key + "\" in " + what);
}

inline long long to_ll(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ValidationError(what + " must be an integer");
    return j.get<long long>();
}

inline VertexId key_to_vertex(const std::string& key, const std::string& what) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + " has non-integer vertex key \"" + key + "\"");
    }
}

template <class R>
R real_from_json(const json& j, const std::string& what);

template <>
inline Rational real_from_json<Rational>(const json& j, const std::string& what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float())
        throw ValidationError(what + ": exact mode needs integers or \"p/q\" strings");
    throw ValidationError(what + " must be a number or a rational string");
}

template <>
inline double real_from_json<double>(const json& j, const std::string& what) {
    if (j.is_string()) return rational_to_double(parse_rational(j.get<std::string>()));
    if (j.is_number()) return j.get<double>();
    throw ValidationError(what + " must be a number or a rational string");
}

}  // namespace detail

// Scalar encoding: a bare value is real; a two-element array is [re, im].
template <class K>
K scalar_from_json(const json& j, const std::string& what) {
    using T = scalar_traits<K>;
    if (j.is_array()) {
        if (j.size() != 2) throw ValidationError(what + " complex value needs [re, im]");
        return T::from_parts(
            detail::real_from_json<typename T::real_type>(j[0], what + " (re)"),
            detail::real_from_json<typename T::real_type>(j[1], what + " (im)"));
    }
    return T::from_real(detail::real_from_json<typename T::real_type>(j, what));
}

inline json rational_json(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1 &&
        rational_abs(r) < Rational(1LL << 53))
        return json(r.convert_to<long long>());
    return json(rational_to_string(r));
}

inline json scalar_to_json(const RationalComplex& v) {
    if (v.im == 0) return rational_json(v.re);
    return json::array({rational_json(v.re), rational_json(v.im)});
}

inline json scalar_to_json(const FloatComplex& v) {
    if (v.imag() == 0.0) return json(v.real());
    return json::array({v.real(), v.imag()});
}

// --- trees ------------------------------------------------------------

inline json tree_to_json(const TreePtr& t) {
    json j;
    j["kind"] = tree_kind_name(t->kind());
    if (t->kind() == TreeKind::Explicit) {
        j["root"] = 0;
        json edges = json::array();
        for (const auto& [u, v] : t->core_edges()) edges.push_back(json::array({u, v}));
        j["edges"] = edges;
        json tails = json::object();
        for (const auto& [v, cycle] : t->tail_rules()) {
            if (cycle.size() == 1)
                tails[std::to_string(v)] = cycle[0];
            else
                tails[std::to_string(v)] = cycle;
        }
        j["tail_degrees"] = tails;
    }
    return j;
}

inline TreePtr tree_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"kind", "root", "edges", "tail_degrees", "max_depth"},
                                "tree");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("tree needs a \"kind\" string");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "path_n0" || kind == "z_line") {
        for (const char* key : {"edges", "tail_degrees", "root"})
            if (j.contains(key))
                throw ValidationError(std::string("\"") + key + "\" only applies to explicit trees");
        return kind == "path_n0" ? RootedTree::path_n0() : RootedTree::z_line();
    }
    if (kind != "explicit") throw ValidationError("unknown tree kind \"" + kind + "\"");
    if (!j.contains("root") || detail::to_ll(j["root"], "root") != 0)
        throw ValidationError("explicit trees must declare \"root\": 0");
    std::vector<std::pair<VertexId, VertexId>> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw ValidationError("\"edges\" must be an array");
        for (const json& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2)
                throw ValidationError("each edge must be a [u, v] pair");
            edges.emplace_back(detail::to_ll(e[0], "edge endpoint"),
                               detail::to_ll(e[1], "edge endpoint"));
        }
    }
    std::map<VertexId, std::vector<long long>> tails;
    if (j.contains("tail_degrees")) {
        if (!j["tail_degrees"].is_object())
            throw ValidationError("\"tail_degrees\" must map vertex ids to degrees");
        for (const auto& [key, val] : j["tail_degrees"].items()) {
            VertexId v = detail::key_to_vertex(key, "tail_degrees");
            std::vector<long long> cycle;
            if (val.is_array())
                for (const json& d : val) cycle.push_back(detail::to_ll(d, "tail degree"));
            else
                cycle.push_back(detail::to_ll(val, "tail degree"));
            tails[v] = std::move(cycle);
        }
    }
    TreeOptions opts;
    if (j.contains("max_depth")) opts.max_depth = detail::to_ll(j["max_depth"], "max_depth");
    // Core leaves without a growth rule mean the presentation is finite.
    std::set<VertexId> with_children, all;
    for (const auto& [u, v] : edges) {
        with_children.insert(u);
        all.insert(u);
        all.insert(v);
    }
    all.insert(0);
    for (VertexId v : all)
        if (!with_children.count(v) && !tails.count(v)) opts.allow_leaves = true;
    return RootedTree::explicit_tree(edges, tails, opts);
}

// --- symbols ------------------------------------------------------------

inline json affine_tail_to_json(const AffineTail& t) {
    return json{{"from", t.from}, {"a", t.a}, {"b", t.b}};
}

inline AffineTail affine_tail_from_json(const json& j, const std::string& what) {
    detail::reject_unknown_keys(j, {"from", "a", "b"}, what);
    AffineTail t;
    if (!j.contains("from") || !j.contains("a") || !j.contains("b"))
        throw ValidationError(what + " needs \"from\", \"a\" and \"b\"");
    t.from = detail::to_ll(j["from"], what + ".from");
    t.a = detail::to_ll(j["a"], what + ".a");
    t.b = detail::to_ll(j["b"], what + ".b");
    return t;
}

inline json symbol_phi_to_json(const SymbolPhi& phi) {
    json j;
    json table = json::object();
    for (const auto& [u, v] : phi.table()) table[std::to_string(u)] = v;
    j["table"] = table;
    switch (phi.tree()->kind()) {
        case TreeKind::PathN0:
            if (phi.pos_tail()) j["affine_tail"] = affine_tail_to_json(*phi.pos_tail());
            j["increasing"] = phi.increasing();
            break;
        case TreeKind::ZLine:
            j["pos_tail"] = affine_tail_to_json(*phi.pos_tail());
            j["neg_tail"] = affine_tail_to_json(*phi.neg_tail());
            break;
        case TreeKind::Explicit:
            break;
    }
    return j;
}

inline SymbolPhi symbol_phi_from_json(const TreePtr& tree, const json& j) {
    detail::reject_unknown_keys(j, {"table", "affine_tail", "pos_tail", "neg_tail", "increasing"},
                                "symbol");
    std::map<VertexId, VertexId> table;
    if (j.contains("table")) {
        if (!j["table"].is_object()) throw ValidationError("symbol \"table\" must be an object");
        for (const auto& [key, val] : j["table"].items())
            table[detail::key_to_vertex(key, "symbol table")] =
                detail::to_ll(val, "symbol value");
    }
    switch (tree->kind()) {
        case TreeKind::PathN0: {
            for (const char* key : {"pos_tail", "neg_tail"})
                if (j.contains(key))
                    throw ValidationError(std::string("\"") + key +
                                          "\" only applies to the two-sided line");
            std::optional<AffineTail> tail;
            if (j.contains("affine_tail"))
                tail = affine_tail_from_json(j["affine_tail"], "affine_tail");
            bool increasing = false;
            if (j.contains("increasing")) {
                if (!j["increasing"].is_boolean())
                    throw ValidationError("\"increasing\" must be a boolean");
                increasing = j["increasing"].get<bool>();
            }
            return SymbolPhi::path_symbol(std::move(table), tail, increasing);
        }
        case TreeKind::ZLine: {
            if (j.contains("affine_tail") || j.contains("increasing"))
                throw ValidationError("two-sided symbols use \"pos_tail\"/\"neg_tail\" only");
            if (!j.contains("pos_tail") || !j.contains("neg_tail"))
                throw ValidationError("two-sided symbols need both tails");
            return SymbolPhi::zline_symbol(std::move(table),
                                           affine_tail_from_json(j["pos_tail"], "pos_tail"),
                                           affine_tail_from_json(j["neg_tail"], "neg_tail"));
        }
        case TreeKind::Explicit: {
            for (const char* key : {"tail", "pos_tail", "neg_tail", "increasing"})
                if (j.contains(key))
                    throw ValidationError("explicit-tree symbols are plain tables");
            return SymbolPhi::table_symbol(tree, std::move(table));
        }
    }
    throw ValidationError("unreachable tree kind");
}

template <class K>
json symbol_psi_to_json(const SymbolPsi<K>& psi) {
    json core = json::object();
    for (const auto& [v, val] : psi.core()) core[std::to_string(v)] = scalar_to_json(val);
    json j;
    j["core"] = core;
    if (!scalar_traits<K>::is_zero(psi.drift())) j["drift"] = scalar_to_json(psi.drift());
    return j;
}

template <class K>
SymbolPsi<K> symbol_psi_from_json(const TreePtr& tree, const json& j) {
    detail::reject_unknown_keys(j, {"core", "drift"}, "weight symbol");
    if (!j.contains("core") || !j["core"].is_object())
        throw ValidationError("weight symbol needs a \"core\" object");
    std::map<VertexId, K> core;
    for (const auto& [key, val] : j["core"].items())
        core[detail::key_to_vertex(key, "weight core")] =
            scalar_from_json<K>(val, "weight value");
    K drift = scalar_traits<K>::zero();
    if (j.contains("drift")) drift = scalar_from_json<K>(j["drift"], "drift");
    return SymbolPsi<K>(tree, std::move(core), drift);
}

// --- vectors ------------------------------------------------------------

template <class K>
json seqvec_to_json(const SeqVec<K>& x) {
    json j = json::object();
    for (const auto& [v, val] : x.entries()) j[std::to_string(v)] = scalar_to_json(val);
    return j;
}

template <class K>
SeqVec<K> seqvec_from_json(const TreePtr& tree, const json& j) {
    if (!j.is_object()) throw ValidationError("a vector must map vertex ids to values");
    SeqVec<K> x(tree);
    for (const auto& [key, val] : j.items())
        x.set(detail::key_to_vertex(key, "vector"), scalar_from_json<K>(val, "vector value"));
    return x;
}

// --- functions ------------------------------------------------------------

// Core values plus the core-boundary vertices, where the sector constants
// begin. The boundary is derived data; on ingest it is recomputed, and a
// supplied list must match.
template <class K>
json lipfunc_to_json(const LipFunc<K>& f) {
    json core = json::object();
    std::vector<VertexId> boundary;
    for (const auto& [v, val] : f.core()) {
        core[std::to_string(v)] = scalar_to_json(val);
        for (VertexId c : f.tree()->children(v))
            if (!f.core().count(c)) boundary.push_back(c);
    }
    std::sort(boundary.begin(), boundary.end());
    json j;
    j["core"] = core;
    j["boundary"] = boundary;
    return j;
}

template <class K>
LipFunc<K> lipfunc_from_json(const TreePtr& tree, const json& j) {
    detail::reject_unknown_keys(j, {"core", "boundary"}, "function");
    if (!j.contains("core") || !j["core"].is_object())
        throw ValidationError("function needs a \"core\" object");
    std::map<VertexId, K> core;
    for (const auto& [key, val] : j["core"].items())
        core[detail::key_to_vertex(key, "function core")] =
            scalar_from_json<K>(val, "function value");
    LipFunc<K> f(tree, std::move(core));
    if (j.contains("boundary")) {
        json expect = lipfunc_to_json(f)["boundary"];
        if (j["boundary"] != expect)
            throw ValidationError("\"boundary\" does not match the core's boundary");
    }
    return f;
}

// --- matrices -------------------------------------------------------------

template <class K>
std::string matrix_to_csv(const TruncatedMatrix<K>& m) {
    std::ostringstream out;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        for (std::size_t j = 0; j < m.cols.size(); ++j) {
            if (j) out << ',';
            out << scalar_traits<K>::to_string(m.at(i, j));
        }
        out << '\n';
    }
    return out.str();
}

// Coordinate-list export; entry indices are vertex ids, not window offsets.
template <class K>
json matrix_to_json(const TruncatedMatrix<K>& m) {
    json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    json entries = json::array();
    for (const auto& [ij, val] : m.entries)
        entries.push_back(json::array({m.rows[ij.first], m.cols[ij.second],
                                       scalar_to_json(val)}));
    j["entries"] = entries;
    return j;
}

// --- dynamics reports -------------------------------------------------

inline json classification_to_json(const HcClassification& c) {
    json j;
    j["verdict"] = hc_verdict_name(c.verdict);
    json ws = json::object();
    for (const HcWitness& w : c.least_entry) ws[std::to_string(w.j)] = w.n;
    j["witnesses"] = ws;
    json cert;
    cert["reason"] = c.reason;
    if (c.tail_slope) cert["tail_slope"] = *c.tail_slope;
    if (c.pinned_at) cert["pinned_at"] = *c.pinned_at;
    json gaps = json::array();
    for (const HcWitness& w : c.least_entry)
        gaps.push_back(json{{"j", w.j}, {"n", w.n}, {"gap", w.gap_value.str()}});
    cert["entry_gaps"] = gaps;
    j["certificate"] = cert;
    return j;
}

inline json series_to_json(const FhcSeries& s) {
    json terms = json::array();
    for (const FhcTerm& t : s.terms)
        terms.push_back(json{{"block_steps", t.block_steps},
                             {"total_steps", t.total_steps},
                             {"support", json::array({t.supp_lo, t.supp_hi})},
                             {"norm", rational_to_string(t.norm)},
                             {"bound", rational_to_string(t.bound)},
                             {"within_bound", t.within_bound},
                             {"window_matches", t.window_matches},
                             {"disjoint_from_previous", t.disjoint_from_previous}});
    json j;
    j["start"] = s.start;
    j["terms"] = terms;
    j["all_verified"] = s.all_verified;
    return j;
}

// Right-inverse witness report: the annihilation index of the sample
// annihilator at the start coordinate, the block windows, and per-block
// series data.
inline json fhc_witness_to_json(const FhcSeries& s, const AnnihilationReport& ann) {
    json windows = json::array();
    json series = json::array();
    for (const FhcTerm& t : s.terms) {
        windows.push_back(json::array({t.supp_lo, t.supp_hi}));
        series.push_back(json{{"n", t.total_steps},
                              {"support", json::array({t.supp_lo, t.supp_hi})},
                              {"norm", rational_to_string(t.norm)},
                              {"bound", rational_to_string(t.bound)},
                              {"within_bound", t.within_bound},
                              {"window_matches", t.window_matches},
                              {"disjoint_from_previous", t.disjoint_from_previous}});
    }
    json j;
    j["N0"] = ann.n0;
    j["annihilates"] = ann.annihilates;
    j["start"] = s.start;
    j["windows"] = windows;
    j["series"] = series;
    j["all_verified"] = s.all_verified;
    return j;
}

inline json spectral_to_json(const std::vector<SpectralStep>& steps) {
    json arr = json::array();
    for (const SpectralStep& s : steps) {
        json j{{"n", s.n}, {"power_norm", s.power_norm}, {"root", s.root}};
        if (s.exact_root) j["exact_root"] = *s.exact_root;
        arr.push_back(j);
    }
    return arr;
}

template <class K>
json oracle_report_to_json(const OracleReport<K>& r) {
    using T = scalar_traits<K>;
    return json{{"quantity", r.quantity},
                {"formula", T::real_to_string(r.formula_value)},
                {"oracle", T::real_to_string(r.oracle_value)},
                {"agree", r.agree},
                {"depth_used", r.depth_used}};
}

template <class K>
std::string orbit_to_csv(const OrbitRecord<K>& rec) {
    std::ostringstream out;
    out << "step,sup_norm\n";
    for (std::size_t i = 0; i < rec.sup_norms.size(); ++i)
        out << i << ',' << scalar_traits<K>::real_to_string(rec.sup_norms[i]) << '\n';
    return out.str();
}

}  // namespace lipdyn
