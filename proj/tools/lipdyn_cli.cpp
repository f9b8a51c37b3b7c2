// Command-line surface for the lipdyn library: operator norms with oracle
// cross-checks, hypercyclicity classification, matrix windows, extremal
// witnesses, eigenvector residuals, orbit traces, and the pinned
// verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 validation error,
// 3 I/O error. `classify` encodes its verdict: 0 frequently hypercyclic,
// 4 not hypercyclic, 5 unknown.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <lipdyn/lipdyn.hpp>

namespace {

using namespace lipdyn;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNotHypercyclic = 4;
constexpr int kExitUnknownVerdict = 5;

// Inline JSON when the argument starts with '{', a file path otherwise.
json load_spec(const std::string& arg, const std::string& what) {
    if (!arg.empty() && arg.front() == '{') {
        try {
            return json::parse(arg);
        } catch (const json::exception& e) {
            throw ValidationError("invalid inline JSON for " + what + ": " + e.what());
        }
    }
    return read_json_file(arg);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Options shared by every subcommand; each command reads what it needs.
struct Config {
    std::string mode = "exact";
    std::string tol;  // empty: 0 in exact mode, 1e-9 in floating mode
    long long depth = 16;
    long long budget = 64;
    std::string out;
    std::string format;
    std::string tree_spec = R"({"kind":"path_n0"})";
    std::string symbol_spec;
    std::string op = "comp";

    void validate() const {
        if (mode != "exact" && mode != "floating")
            throw ValidationError("--mode must be exact or floating");
        if (depth < 1) throw ValidationError("--depth must be >= 1");
        if (budget < 1) throw ValidationError("--budget must be >= 1");
        if (op != "comp" && op != "mult" && op != "shift")
            throw ValidationError("--op must be comp, mult or shift");
    }

    Rational tol_rational() const {
        if (tol.empty()) return Rational(0);
        Rational r = parse_rational(tol);
        if (r < 0) throw ValidationError("--tol must be >= 0");
        return r;
    }

    double tol_double() const {
        if (tol.empty()) return 1e-9;
        try {
            std::size_t used = 0;
            double d = std::stod(tol, &used);
            if (used != tol.size() || d < 0) throw std::invalid_argument(tol);
            return d;
        } catch (const std::exception&) {
            return rational_to_double(tol_rational());
        }
    }
};

template <class K>
typename scalar_traits<K>::real_type tol_as(const Config& cfg);

template <>
Rational tol_as<RationalComplex>(const Config& cfg) { return cfg.tol_rational(); }

template <>
double tol_as<FloatComplex>(const Config& cfg) { return cfg.tol_double(); }

// Runs f with the scalar type selected by --mode.
template <class F>
int with_mode(const Config& cfg, F&& f) {
    if (cfg.mode == "floating") return f(FloatComplex{});
    return f(RationalComplex{});
}

template <class K>
K scalar_from_strings(const std::string& re, const std::string& im, const Config& cfg) {
    json j;
    if (im.empty())
        j = json(re);
    else
        j = json::array({re, im});
    if (cfg.mode == "floating") {
        // decimal literals are welcome here; route them through stod
        auto parse1 = [](const std::string& s) {
            try {
                std::size_t used = 0;
                double d = std::stod(s, &used);
                if (used == s.size()) return json(d);
            } catch (const std::exception&) {
            }
            return json(s);
        };
        j = im.empty() ? parse1(re) : json::array({parse1(re), parse1(im)});
    }
    return scalar_from_json<K>(j, "scalar option");
}

// --- attaining vertices ----------------------------------------------------

// First vertex (canonical order) whose formula term equals the norm.
VertexId comp_attaining_vertex(const SymbolPhi& phi) {
    const TreePtr& t = phi.tree();
    long long norm = comp_norm(phi);
    if (1 + t->depth(phi.apply(RootedTree::root)) == norm) return RootedTree::root;
    for (VertexId v : t->vertices_to_depth(comp_certified_depth(phi))) {
        if (v == RootedTree::root) continue;
        if (t->dist(phi.apply(v), phi.apply(*t->parent(v))) == norm) return v;
    }
    throw ContractError("no vertex attains the norm inside the certified window");
}

template <class K>
VertexId mult_attaining_vertex(const SymbolPsi<K>& psi) {
    using T = scalar_traits<K>;
    auto norms = mult_norms(psi);
    if (!norms) throw ContractError("the symbol is unbounded");
    if (!(T::abs(psi.at(RootedTree::root)) < norms->lip)) return RootedTree::root;
    const TreePtr& t = psi.tree();
    for (VertexId v : t->vertices_to_depth(mult_certified_depth(psi))) {
        if (v == RootedTree::root) continue;
        VertexId p = *t->parent(v);
        auto term = T::abs(psi.at(v)) +
                    T::real_from_int(t->depth(v)) * T::abs(psi.at(v) - psi.at(p));
        if (!(term < norms->lip)) return v;
    }
    throw ContractError("no vertex attains the norm inside the certified window");
}

VertexId shift_attaining_vertex(const TreePtr& t) {
    auto norm = shift_norm(t);
    if (!norm) throw ContractError("the shift is unbounded on this tree");
    if (2 * t->gamma(RootedTree::root) == *norm) return RootedTree::root;
    for (VertexId v : t->vertices_to_depth(shift_certified_depth(t))) {
        if (v == RootedTree::root) continue;
        long long g = t->gamma(v), gp = t->gamma(*t->parent(v));
        if (g + gp - 1 + std::llabs(g - 1) + t->depth(v) * std::llabs(g - gp) == *norm)
            return v;
    }
    throw ContractError("no vertex attains the norm inside the certified window");
}

// --- witness reports ---------------------------------------------------

template <class K, class Apply>
json witness_report(const Witness<K>& w, Apply&& apply, const Config& cfg) {
    using T = scalar_traits<K>;
    SeqVec<K> image = apply(w.vector);
    auto attained = T::abs(image.at(w.at));
    json j;
    j["at"] = w.at;
    j["claimed"] = T::real_to_string(w.claimed);
    j["sup_norm"] = T::real_to_string(sup_norm(w.vector));
    j["sup_norm_is_one"] =
        T::real_eq(sup_norm(w.vector), T::real_from_int(1), tol_as<K>(cfg));
    j["attained_value"] = T::real_to_string(attained);
    j["attains_claim"] = T::real_eq(attained, w.claimed, tol_as<K>(cfg));
    j["vector"] = seqvec_to_json(w.vector);
    return j;
}

template <class K>
json make_witness(const Config& cfg, const TreePtr& tree, const json& symbol_json,
                  std::optional<VertexId> at) {
    if (cfg.op == "comp") {
        SymbolPhi phi = symbol_phi_from_json(tree, symbol_json);
        VertexId u = at.value_or(comp_attaining_vertex(phi));
        auto w = extremal_witness_comp<K>(phi, u);
        return witness_report<K>(w, [&](const SeqVec<K>& x) { return comp_apply_seq(phi, x); },
                                 cfg);
    }
    if (cfg.op == "mult") {
        SymbolPsi<K> psi = symbol_psi_from_json<K>(tree, symbol_json);
        VertexId u = at.value_or(mult_attaining_vertex(psi));
        auto w = extremal_witness_mult<K>(psi, u);
        return witness_report<K>(w, [&](const SeqVec<K>& x) { return mult_apply_seq(psi, x); },
                                 cfg);
    }
    VertexId u = at.value_or(shift_attaining_vertex(tree));
    auto w = extremal_witness_shift<K>(tree, u);
    return witness_report<K>(w, [](const SeqVec<K>& x) { return shift_apply_seq(x); }, cfg);
}

// --- subcommands ----------------------------------------------------------

int cmd_norm(const Config& cfg, bool with_witness) {
    return with_mode(cfg, [&](auto tag) {
        using K = decltype(tag);
        using T = scalar_traits<K>;
        TreePtr tree = tree_from_json(load_spec(cfg.tree_spec, "tree"));
        json report;
        report["operator"] = cfg.op;
        auto tol = tol_as<K>(cfg);
        bool agree = true;
        if (cfg.op == "comp") {
            if (cfg.symbol_spec.empty()) throw ValidationError("norm --op comp needs --symbol");
            SymbolPhi phi = symbol_phi_from_json(tree, load_spec(cfg.symbol_spec, "symbol"));
            auto r = oracle_comp_norm<K>(phi, tol);
            report["bounded"] = true;
            report["norm"] = T::real_to_string(r.formula_value);
            report["oracle"] = oracle_report_to_json(r);
            agree = r.agree;
        } else if (cfg.op == "mult") {
            if (cfg.symbol_spec.empty()) throw ValidationError("norm --op mult needs --symbol");
            SymbolPsi<K> psi = symbol_psi_from_json<K>(tree, load_spec(cfg.symbol_spec, "symbol"));
            if (!mult_bounded(psi)) {
                report["bounded"] = false;
                report["norm"] = "unbounded";
                emit(cfg.out, dump(report));
                return kExitOk;
            }
            auto [rl, rp] = oracle_mult_norms<K>(psi, tol);
            report["bounded"] = true;
            report["norm"] = T::real_to_string(rl.formula_value);
            report["plus_norm"] = T::real_to_string(rp.formula_value);
            report["oracle"] = oracle_report_to_json(rl);
            report["plus_oracle"] = oracle_report_to_json(rp);
            agree = rl.agree && rp.agree;
        } else {
            auto n = shift_norm(tree);
            if (!n) {
                report["bounded"] = false;
                report["norm"] = "unbounded";
                emit(cfg.out, dump(report));
                return kExitOk;
            }
            auto r = oracle_shift_norm<K>(tree, tol);
            report["bounded"] = true;
            report["norm"] = T::real_to_string(r.formula_value);
            report["oracle"] = oracle_report_to_json(r);
            agree = r.agree;
        }
        if (with_witness)
            report["witness"] = make_witness<K>(
                cfg, tree,
                cfg.op == "shift" ? json::object() : load_spec(cfg.symbol_spec, "symbol"),
                std::nullopt);
        emit(cfg.out, dump(report));
        return agree ? kExitOk : kExitVerifyFail;
    });
}

int cmd_classify(const Config& cfg, long long j_max, long long series_terms,
                 long long series_start) {
    TreePtr tree = tree_from_json(load_spec(cfg.tree_spec, "tree"));
    if (cfg.symbol_spec.empty()) throw ValidationError("classify needs --symbol");
    SymbolPhi phi = symbol_phi_from_json(tree, load_spec(cfg.symbol_spec, "symbol"));
    HcClassification c = classify_hypercyclic(phi, j_max, cfg.budget);
    json report = classification_to_json(c);
    if (series_terms > 0 && c.verdict == HcVerdict::FrequentlyHypercyclic) {
        using K = RationalComplex;
        FhcSeries s = fhc_series_B(phi, series_start, static_cast<int>(series_terms));
        SeqVec<K> sample(tree);
        sample.set(series_start, scalar_traits<K>::one());
        for (VertexId ch : tree->children(series_start))
            sample.set(ch, -scalar_traits<K>::one());
        AnnihilationReport ann = fhc_check_annihilation(phi, sample);
        report["fhc_witness"] = fhc_witness_to_json(s, ann);
    }
    emit(cfg.out, dump(report));
    switch (c.verdict) {
        case HcVerdict::FrequentlyHypercyclic: return kExitOk;
        case HcVerdict::NotHypercyclic: return kExitNotHypercyclic;
        case HcVerdict::Unknown: return kExitUnknownVerdict;
    }
    return kExitUnknownVerdict;
}

int cmd_matrix(const Config& cfg, long long rows) {
    return with_mode(cfg, [&](auto tag) {
        using K = decltype(tag);
        TreePtr tree = tree_from_json(load_spec(cfg.tree_spec, "tree"));
        if (rows < 1) throw ValidationError("--rows must be >= 1");
        TruncatedMatrix<K> m;
        if (cfg.op == "comp") {
            if (cfg.symbol_spec.empty()) throw ValidationError("matrix --op comp needs --symbol");
            m = matrix_truncate(
                comp_operator<K>(symbol_phi_from_json(tree, load_spec(cfg.symbol_spec, "symbol"))),
                rows);
        } else if (cfg.op == "mult") {
            if (cfg.symbol_spec.empty()) throw ValidationError("matrix --op mult needs --symbol");
            m = matrix_truncate(
                mult_operator<K>(
                    symbol_psi_from_json<K>(tree, load_spec(cfg.symbol_spec, "symbol"))),
                rows);
        } else {
            m = matrix_truncate(shift_operator<K>(tree), rows);
        }
        std::string format = cfg.format.empty() ? "csv" : cfg.format;
        if (format == "csv")
            emit(cfg.out, matrix_to_csv(m));
        else if (format == "json")
            emit(cfg.out, dump(matrix_to_json(m)));
        else
            throw ValidationError("--format must be csv or json");
        return kExitOk;
    });
}

int cmd_witness(const Config& cfg, std::optional<VertexId> at) {
    return with_mode(cfg, [&](auto tag) {
        using K = decltype(tag);
        TreePtr tree = tree_from_json(load_spec(cfg.tree_spec, "tree"));
        json symbol = json::object();
        if (cfg.op != "shift") {
            if (cfg.symbol_spec.empty()) throw ValidationError("witness needs --symbol");
            symbol = load_spec(cfg.symbol_spec, "symbol");
        }
        json report = make_witness<K>(cfg, tree, symbol, at);
        emit(cfg.out, dump(report));
        return report["attains_claim"].get<bool>() && report["sup_norm_is_one"].get<bool>()
                   ? kExitOk
                   : kExitVerifyFail;
    });
}

int cmd_eigen(const Config& cfg, const std::string& lambda_re, const std::string& lambda_im,
              long long blocks) {
    return with_mode(cfg, [&](auto tag) {
        using K = decltype(tag);
        using T = scalar_traits<K>;
        K lambda = scalar_from_strings<K>(lambda_re, lambda_im, cfg);
        SymbolPhi phi = cfg.symbol_spec.empty()
                            ? SymbolPhi::path_symbol({}, AffineTail{0, 2, 1}, true)
                            : symbol_phi_from_json(RootedTree::path_n0(),
                                                   load_spec(cfg.symbol_spec, "symbol"));
        SeqVec<K> x = doubling_eigenvector<K>(lambda, blocks);
        EigenResidual r = eigen_residual(phi, lambda, x);
        json report;
        report["lambda"] = scalar_to_json(lambda);
        report["blocks"] = blocks;
        report["support_size"] = x.support_size();
        report["rows_checked"] = r.rows_checked;
        report["residual"] = r.residual;
        report["vector"] = seqvec_to_json(x);
        emit(cfg.out, dump(report));
        double tol = cfg.mode == "floating" ? cfg.tol_double() : rational_to_double(cfg.tol_rational());
        return r.residual <= tol ? kExitOk : kExitVerifyFail;
    });
}

int cmd_orbit(const Config& cfg, const std::string& x0_spec, long long steps,
              const std::string& scale_re, const std::string& scale_im) {
    return with_mode(cfg, [&](auto tag) {
        using K = decltype(tag);
        TreePtr tree = tree_from_json(load_spec(cfg.tree_spec, "tree"));
        if (cfg.symbol_spec.empty()) throw ValidationError("orbit needs --symbol");
        SymbolPhi phi = symbol_phi_from_json(tree, load_spec(cfg.symbol_spec, "symbol"));
        SeqVec<K> x0 = seqvec_from_json<K>(tree, load_spec(x0_spec, "initial vector"));
        K scale = scalar_from_strings<K>(scale_re, scale_im, cfg);
        OrbitRecord<K> rec = orbit_simulate(phi, x0, steps, scale);
        std::string format = cfg.format.empty() ? "csv" : cfg.format;
        if (format == "csv") {
            emit(cfg.out, orbit_to_csv(rec));
        } else if (format == "json") {
            json j;
            json norms = json::array();
            for (const auto& n : rec.sup_norms)
                norms.push_back(scalar_traits<K>::real_to_string(n));
            j["sup_norms"] = norms;
            j["final"] = seqvec_to_json(rec.snapshots.back());
            emit(cfg.out, dump(j));
        } else {
            throw ValidationError("--format must be csv or json");
        }
        return kExitOk;
    });
}

int cmd_verify(const Config& cfg) {
    std::vector<CheckResult> results = run_verification_suite();
    bool all = true;
    json checks = json::array();
    for (const CheckResult& r : results) {
        all = all && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name
                  << (r.detail.empty() ? "" : " (" + r.detail + ")") << "\n";
        checks.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    if (!cfg.out.empty()) {
        using K = RationalComplex;
        json report;
        report["checks"] = checks;
        report["all_pass"] = all;
        // packaged oracle reports for the model operators
        auto doubling = SymbolPhi::path_symbol({}, AffineTail{0, 2, 1}, true);
        json oracles = json::array();
        oracles.push_back(oracle_report_to_json(oracle_comp_norm<K>(doubling)));
        SymbolPsi<K> psi(RootedTree::path_n0(),
                         {{0, scalar_traits<K>::from_int(-3)}});
        auto [ml, mp] = oracle_mult_norms<K>(psi);
        oracles.push_back(oracle_report_to_json(ml));
        oracles.push_back(oracle_report_to_json(mp));
        oracles.push_back(oracle_report_to_json(
            oracle_shift_norm<K>(RootedTree::uniform(2))));
        report["oracles"] = oracles;
        write_text_file(cfg.out, dump(report));
    }
    return all ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lipschitz-space operators on rooted trees: norms, dynamics, oracles"};
    app.require_subcommand(1);

    Config cfg;
    bool with_witness = false;
    long long j_max = 32;
    long long series_terms = 0;
    long long series_start = 1;
    long long rows = 16;
    long long blocks = 8;
    long long steps = 64;
    long long at_vertex = -1;
    bool at_given = false;
    std::string lambda_re = "1", lambda_im;
    std::string scale_re = "1", scale_im;
    std::string x0_spec = R"({"1": 1})";

    auto add_common = [&](CLI::App* sub, bool needs_symbol) {
        sub->add_option("--mode", cfg.mode, "exact or floating")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "agreement tolerance (0 exact, 1e-9 floating)");
        sub->add_option("--depth", cfg.depth, "generic depth bound")->capture_default_str();
        sub->add_option("--budget", cfg.budget, "search budget")->capture_default_str();
        sub->add_option("--out", cfg.out, "output file (stdout if omitted)");
        sub->add_option("--format", cfg.format, "json or csv");
        sub->add_option("--tree", cfg.tree_spec, "tree spec: inline JSON or a file path")
            ->capture_default_str();
        if (needs_symbol)
            sub->add_option("--symbol", cfg.symbol_spec,
                            "symbol spec: inline JSON or a file path");
    };

    CLI::App* norm = app.add_subcommand("norm", "operator norm with oracle cross-check");
    add_common(norm, true);
    norm->add_option("--op", cfg.op, "comp, mult or shift")->capture_default_str();
    norm->add_flag("--witness", with_witness, "include an extremal witness");

    CLI::App* classify = app.add_subcommand("classify", "hypercyclicity verdict");
    add_common(classify, true);
    classify->add_option("--j-max", j_max, "coordinates to certify by search")
        ->capture_default_str();
    classify->add_option("--series-terms", series_terms,
                         "emit the right-inverse block series with this many terms");
    classify->add_option("--series-start", series_start, "start coordinate for the series")
        ->capture_default_str();

    CLI::App* matrix = app.add_subcommand("matrix", "truncated matrix window");
    add_common(matrix, true);
    matrix->add_option("--op", cfg.op, "comp, mult or shift")->capture_default_str();
    matrix->add_option("--rows", rows, "basis rows in the window")->capture_default_str();

    CLI::App* witness = app.add_subcommand("witness", "extremal witness vector");
    add_common(witness, true);
    witness->add_option("--op", cfg.op, "comp, mult or shift")->capture_default_str();
    witness->add_option("--at", at_vertex, "witness vertex (default: a norm-attaining one)");

    CLI::App* eigen = app.add_subcommand("eigen", "doubling-symbol eigenvector residual");
    add_common(eigen, true);
    eigen->add_option("--lambda", lambda_re, "eigenvalue (rational string, or decimal in floating mode)")
        ->capture_default_str();
    eigen->add_option("--lambda-im", lambda_im, "imaginary part of the eigenvalue");
    eigen->add_option("--blocks", blocks, "geometric blocks to build")->capture_default_str();

    CLI::App* orbit = app.add_subcommand("orbit", "orbit of scale * C under iteration");
    add_common(orbit, true);
    orbit->add_option("--x0", x0_spec, "initial vector: inline JSON or a file path")
        ->capture_default_str();
    orbit->add_option("--steps", steps, "iterations to record")->capture_default_str();
    orbit->add_option("--scale", scale_re, "scalar factor per step")->capture_default_str();
    orbit->add_option("--scale-im", scale_im, "imaginary part of the factor");

    CLI::App* verify = app.add_subcommand("verify", "run the pinned verification suite");
    add_common(verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (witness->parsed()) at_given = witness->count("--at") > 0;

    try {
        cfg.validate();
        if (norm->parsed()) return cmd_norm(cfg, with_witness);
        if (classify->parsed()) return cmd_classify(cfg, j_max, series_terms, series_start);
        if (matrix->parsed()) return cmd_matrix(cfg, rows);
        if (witness->parsed())
            return cmd_witness(cfg, at_given ? std::optional<VertexId>(at_vertex) : std::nullopt);
        if (eigen->parsed()) return cmd_eigen(cfg, lambda_re, lambda_im, blocks);
        if (orbit->parsed()) return cmd_orbit(cfg, x0_spec, steps, scale_re, scale_im);
        if (verify->parsed()) return cmd_verify(cfg);
        throw ValidationError("no subcommand selected");
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
