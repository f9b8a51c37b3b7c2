#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lipdyn/errors.hpp"
#include "lipdyn/matrix.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

// Cross-checks that recompute claimed quantities along an independent route:
// row sums of complete matrix windows, exhaustive sign searches, and a
// parent-chain walk for the inverse isometry. None of these share code with
// the closed-form implementations they audit.

namespace lipdyn {

template <class K>
struct OracleReport {
    std::string quantity;
    typename scalar_traits<K>::real_type formula_value;
    typename scalar_traits<K>::real_type oracle_value;
    bool agree = false;
    long long depth_used = 0;
};

namespace detail {

template <class K>
typename scalar_traits<K>::real_type row_abs_sum(const TruncatedMatrix<K>& m, std::size_t i) {
    using T = scalar_traits<K>;
    typename T::real_type s = T::real_zero();
    for (const auto& [ij, val] : m.entries)
        if (ij.first == i) s = s + T::abs(val);
    return s;
}

template <class K>
OracleReport<K> make_report(std::string quantity,
                            typename scalar_traits<K>::real_type formula,
                            typename scalar_traits<K>::real_type oracle, long long depth,
                            typename scalar_traits<K>::real_type tol) {
    using T = scalar_traits<K>;
    OracleReport<K> r;
    r.quantity = std::move(quantity);
    r.formula_value = formula;
    r.oracle_value = oracle;
    r.agree = T::real_eq(formula, oracle, tol);
    r.depth_used = depth;
    return r;
}

}  // namespace detail

// Largest row sum of absolute values: the sup-to-sup operator norm of the
// window, exact for the full operator once every norm-attaining row is in.
template <class K>
typename scalar_traits<K>::real_type op_norm_rowsum(const TruncatedMatrix<K>& m) {
    using T = scalar_traits<K>;
    typename T::real_type best = T::real_zero();
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto s = detail::row_abs_sum(m, i);
        if (best < s) best = s;
    }
    return best;
}

// Root row sum plus the largest non-root row sum: the operator norm for the
// norm that charges the root coordinate separately.
template <class K>
typename scalar_traits<K>::real_type op_norm_plus_rowsum(const TruncatedMatrix<K>& m) {
    using T = scalar_traits<K>;
    if (m.rows.empty() || m.rows[0] != RootedTree::root)
        throw ContractError("plus-norm row sums need the root row first");
    typename T::real_type best = T::real_zero();
    for (std::size_t i = 1; i < m.rows.size(); ++i) {
        auto s = detail::row_abs_sum(m, i);
        if (best < s) best = s;
    }
    return detail::row_abs_sum(m, 0) + best;
}

// Exhaustive search over sign vectors on the column window. For a matrix
// with real entries this attains the sup norm of the window, with no appeal
// to the row-sum identity. Exponential: refuses more than 20 columns.
template <class K>
typename scalar_traits<K>::real_type op_norm_sign_search(const TruncatedMatrix<K>& m) {
    using T = scalar_traits<K>;
    if (m.cols.size() > 20)
        throw ContractError("sign search over " + std::to_string(m.cols.size()) +
                            " columns is intractable; cap is 20");
    for (const auto& [ij, val] : m.entries)
        if (!T::is_zero(val - T::conj(val)))
            throw ContractError("sign search needs a real matrix");
    typename T::real_type best = T::real_zero();
    std::size_t n = m.cols.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        for (std::size_t i = 0; i < m.rows.size(); ++i) {
            K acc = T::zero();
            for (const auto& [ij, val] : m.entries) {
                if (ij.first != i) continue;
                acc = (mask >> ij.second) & 1 ? acc + val : acc - val;
            }
            auto a = T::abs(acc);
            if (best < a) best = a;
        }
    }
    return best;
}

// Sign-search reading of the root-charged norm: the formula is a sum of two
// separately attained suprema, so each gets its own exhaustive search.
template <class K>
typename scalar_traits<K>::real_type op_norm_plus_sign_search(const TruncatedMatrix<K>& m) {
    using T = scalar_traits<K>;
    if (m.rows.empty() || m.rows[0] != RootedTree::root)
        throw ContractError("plus-norm sign search needs the root row first");
    if (m.cols.size() > 20)
        throw ContractError("sign search over " + std::to_string(m.cols.size()) +
                            " columns is intractable; cap is 20");
    for (const auto& [ij, val] : m.entries)
        if (!T::is_zero(val - T::conj(val)))
            throw ContractError("sign search needs a real matrix");
    std::size_t n = m.cols.size();
    typename T::real_type best_root = T::real_zero(), best_rest = T::real_zero();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        for (std::size_t i = 0; i < m.rows.size(); ++i) {
            K acc = T::zero();
            for (const auto& [ij, val] : m.entries) {
                if (ij.first != i) continue;
                acc = (mask >> ij.second) & 1 ? acc + val : acc - val;
            }
            auto a = T::abs(acc);
            if (i == 0) {
                if (best_root < a) best_root = a;
            } else if (best_rest < a) {
                best_rest = a;
            }
        }
    }
    return best_root + best_rest;
}

// Inverse isometry recomputed by walking parent chains entry by entry, then
// compared against the path-sum implementation. True when they agree on the
// whole support closure.
template <class K>
bool dinv_agrees(const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    const TreePtr& t = x.tree();
    std::set<VertexId> closure;
    for (const auto& [v, val] : x.entries())
        for (VertexId w : t->path_from_root(v)) closure.insert(w);
    closure.insert(RootedTree::root);
    LipFunc<K> f = Dinv(x);
    for (VertexId v : closure) {
        K sum = T::zero();
        VertexId w = v;
        while (true) {
            auto it = x.entries().find(w);
            if (it != x.entries().end()) sum = sum + it->second;
            auto p = t->parent(w);
            if (!p) break;
            w = *p;
        }
        if (!(sum == f(v))) return false;
    }
    return true;
}

// --- packaged norm cross-checks -----------------------------------------

template <class K>
OracleReport<K> oracle_comp_norm(const SymbolPhi& phi,
                                 typename scalar_traits<K>::real_type tol =
                                     scalar_traits<K>::real_zero()) {
    using T = scalar_traits<K>;
    long long d = comp_certified_depth(phi);
    std::size_t rows = phi.tree()->vertices_to_depth(d).size();
    auto m = matrix_truncate(comp_operator<K>(phi), rows);
    return detail::make_report<K>("composition operator norm", T::real_from_int(comp_norm(phi)),
                                  op_norm_rowsum(m), d, tol);
}

template <class K>
std::pair<OracleReport<K>, OracleReport<K>> oracle_mult_norms(
    const SymbolPsi<K>& psi,
    typename scalar_traits<K>::real_type tol = scalar_traits<K>::real_zero()) {
    auto norms = mult_norms(psi);
    if (!norms) throw ContractError("no finite norms to cross-check: symbol is unbounded");
    long long d = mult_certified_depth(psi);
    std::size_t rows = psi.tree()->vertices_to_depth(d).size();
    auto m = matrix_truncate(mult_operator<K>(psi), rows);
    return {detail::make_report<K>("multiplication operator norm", norms->lip,
                                   op_norm_rowsum(m), d, tol),
            detail::make_report<K>("multiplication operator norm (root-charged)", norms->plus,
                                   op_norm_plus_rowsum(m), d, tol)};
}

template <class K>
OracleReport<K> oracle_shift_norm(const TreePtr& t,
                                  typename scalar_traits<K>::real_type tol =
                                      scalar_traits<K>::real_zero()) {
    using T = scalar_traits<K>;
    auto norm = shift_norm(t);
    if (!norm) throw ContractError("no finite norm to cross-check: shift is unbounded");
    long long d = shift_certified_depth(t);
    std::size_t rows = t->vertices_to_depth(d).size();
    auto m = matrix_truncate(shift_operator<K>(t), rows);
    return detail::make_report<K>("backward shift norm", T::real_from_int(*norm),
                                  op_norm_rowsum(m), d, tol);
}

}  // namespace lipdyn
