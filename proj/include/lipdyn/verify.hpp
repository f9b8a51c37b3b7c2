#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lipdyn/dynamics.hpp"
#include "lipdyn/matrix.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/oracles.hpp"
#include "lipdyn/serialize.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

// Deterministic pinned self-checks over the whole library, exposed both to
// the command line and to the test suite. Every expected value here is a
// hand-derived constant; nothing is read back from the code under test.

namespace lipdyn {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline void run_check(std::vector<CheckResult>& out, const std::string& name,
                      const std::function<bool(std::string&)>& body) {
    CheckResult r;
    r.name = name;
    try {
        std::string detail;
        r.pass = body(detail);
        r.detail = detail;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(r);
}

}  // namespace detail

inline std::vector<CheckResult> run_verification_suite() {
    using K = RationalComplex;
    using T = scalar_traits<K>;
    std::vector<CheckResult> out;
    auto doubling = SymbolPhi::path_symbol({}, AffineTail{0, 2, 1}, true);
    auto successor = SymbolPhi::path_symbol({}, AffineTail{0, 1, 1}, true);
    TreePtr path = RootedTree::path_n0();

    detail::run_check(out, "inverse isometry is isometric and involutive", [&](std::string& d) {
        SeqVec<K> x(path);
        x.set(0, T::from_rational(Rational(3, 2)));
        x.set(2, T::from_int(-2));
        x.set(5, T::from_rational(Rational(7, 3)));
        LipFunc<K> f = Dinv(x);
        bool ok = lip_norm(f) == sup_norm(x) && D(f) == x && dinv_agrees(x);
        d = "lip norm " + T::real_to_string(lip_norm(f));
        return ok;
    });

    detail::run_check(out, "composition conjugacy on the doubling symbol", [&](std::string& d) {
        SeqVec<K> x(path);
        x.set(1, T::one());
        x.set(3, T::from_rational(Rational(-1, 2)));
        x.set(6, T::from_int(2));
        SeqVec<K> via_functions = D(comp_apply_lip(doubling, Dinv(x)));
        bool ok = via_functions == comp_apply_seq(doubling, x);
        d = "support " + std::to_string(via_functions.support_size());
        return ok;
    });

    detail::run_check(out, "composition norm formula vs row sums", [&](std::string& d) {
        auto rep = oracle_comp_norm<K>(doubling);
        d = "formula " + T::real_to_string(rep.formula_value) + ", oracle " +
            T::real_to_string(rep.oracle_value);
        return rep.agree && rep.formula_value == Rational(2);
    });

    detail::run_check(out, "backward shift norms on path and binary tree", [&](std::string& d) {
        TreePtr binary = RootedTree::uniform(2, TreeOptions{});
        auto on_path = shift_norm(path);
        auto on_binary = shift_norm(binary);
        bool ok = on_path && *on_path == 2 && on_binary && *on_binary == 4;
        ok = ok && oracle_shift_norm<K>(path).agree && oracle_shift_norm<K>(binary).agree;
        d = "path 2, binary 4";
        return ok;
    });

    detail::run_check(out, "constant multiplication symbol norms", [&](std::string& d) {
        SymbolPsi<K> psi(path, {{0, T::from_int(-3)}});
        auto norms = mult_norms(psi);
        auto reps = oracle_mult_norms(psi);
        bool ok = norms && norms->lip == Rational(3) && norms->plus == Rational(6);
        ok = ok && reps.first.agree && reps.second.agree;
        d = "lip 3, root-charged 6";
        return ok;
    });

    detail::run_check(out, "extremal witnesses attain their claims", [&](std::string& d) {
        auto wc = extremal_witness_comp<K>(doubling, 1);
        bool ok = sup_norm(wc.vector) == Rational(1) &&
                  T::abs(comp_apply_seq(doubling, wc.vector).at(1)) == wc.claimed;
        SymbolPsi<K> psi(path, {{0, T::one()},
                                {1, T::from_rational(Rational(1, 2))},
                                {2, T::from_int(2)}});
        auto wm = extremal_witness_mult(psi, 2);
        ok = ok && sup_norm(wm.vector) == Rational(1) &&
             T::abs(mult_apply_seq(psi, wm.vector).at(2)) == wm.claimed;
        TreePtr binary = RootedTree::uniform(2, TreeOptions{});
        auto ws = extremal_witness_shift<K>(binary, 1);
        ok = ok && sup_norm(ws.vector) == Rational(1) &&
             T::abs(shift_apply_seq(ws.vector).at(1)) == ws.claimed;
        d = "composition, multiplication and shift witnesses";
        return ok;
    });

    detail::run_check(out, "hypercyclicity verdicts for the two model symbols",
                      [&](std::string& d) {
                          auto fhc = classify_hypercyclic(doubling);
                          auto not_hc = classify_hypercyclic(successor);
                          d = std::string(hc_verdict_name(fhc.verdict)) + " / " +
                              hc_verdict_name(not_hc.verdict);
                          return fhc.verdict == HcVerdict::FrequentlyHypercyclic &&
                                 not_hc.verdict == HcVerdict::NotHypercyclic;
                      });

    detail::run_check(out, "block series: disjoint windows under geometric bounds",
                      [&](std::string& d) {
                          auto series = fhc_series_B(doubling, 1, 8);
                          d = std::to_string(series.terms.size()) + " terms";
                          return series.all_verified;
                      });

    detail::run_check(out, "the operator is a left inverse of the block map",
                      [&](std::string& d) {
                          RunVec cur{{1, 1, Rational(1)}};
                          for (int i = 0; i < 5; ++i) cur = apply_B_runs(doubling, cur);
                          SeqVec<K> dense = runs_to_seqvec<K>(path, cur);
                          bool ok = comp_power_apply(doubling, 5, dense) ==
                                    SeqVec<K>::basis_e(path, 1);
                          d = "5 inverse steps, support " + std::to_string(dense.support_size());
                          return ok;
                      });

    detail::run_check(out, "annihilator vectors vanish at the predicted power",
                      [&](std::string& d) {
                          auto del0 = SeqVec<K>::basis_del(path, 0);
                          auto del3 = SeqVec<K>::basis_del(path, 3);
                          auto r0 = fhc_check_annihilation(doubling, del0);
                          auto r3 = fhc_check_annihilation(doubling, del3);
                          d = "first vanishing powers " + std::to_string(r0.n0) + " and " +
                              std::to_string(r3.n0);
                          return r0.annihilates && r0.n0 == 1 && r3.annihilates && r3.n0 == 3;
                      });

    detail::run_check(out, "eigenvector of the doubling symbol has zero residual",
                      [&](std::string& d) {
                          K lambda = T::from_rational(Rational(3, 2));
                          auto x = doubling_eigenvector(lambda, 8);
                          auto res = eigen_residual(doubling, lambda, x);
                          d = std::to_string(res.rows_checked) + " rows";
                          return res.residual == 0.0 && res.rows_checked >= 64;
                      });

    detail::run_check(out, "power norms of the doubling symbol double", [&](std::string& d) {
        auto steps = spectral_radius_estimate(doubling, 5);
        bool ok = true;
        long long expect = 2;
        for (const auto& s : steps) {
            ok = ok && s.power_norm == expect && s.exact_root && *s.exact_root == 2;
            expect *= 2;
        }
        d = "norms 2, 4, 8, 16, 32";
        return ok;
    });

    detail::run_check(out, "matrix windows match the displayed patterns", [&](std::string& d) {
        auto m1 = matrix_truncate(comp_operator<K>(successor), 4);
        auto m2 = matrix_truncate(comp_operator<K>(doubling), 4);
        std::string want1 = "1,1,0,0,0\n0,0,1,0,0\n0,0,0,1,0\n0,0,0,0,1\n";
        std::string want2 =
            "1,1,0,0,0,0,0,0\n0,0,1,1,0,0,0,0\n0,0,0,0,1,1,0,0\n0,0,0,0,0,0,1,1\n";
        d = "4-row windows";
        return matrix_to_csv(m1) == want1 && matrix_to_csv(m2) == want2;
    });

    detail::run_check(out, "serialization round trips", [&](std::string& d) {
        TreePtr tree = RootedTree::explicit_tree({{0, 1}, {0, 2}, {2, 3}},
                                                 {{1, {2}}, {3, {1, 2}}}, TreeOptions{});
        TreePtr back = tree_from_json(tree_to_json(tree));
        bool ok = structurally_equal(*tree, *back);
        auto phi_json = symbol_phi_to_json(doubling);
        SymbolPhi phi_back = symbol_phi_from_json(path, phi_json);
        ok = ok && phi_back.pos_tail() && *phi_back.pos_tail() == *doubling.pos_tail() &&
             phi_back.increasing();
        SeqVec<K> x(path);
        x.set(0, T::from_parts(Rational(1, 3), Rational(-2)));
        x.set(4, T::from_int(5));
        ok = ok && seqvec_from_json<K>(path, seqvec_to_json(x)) == x;
        d = "tree, symbol and vector";
        return ok;
    });

    return out;
}

}  // namespace lipdyn
