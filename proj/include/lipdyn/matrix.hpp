#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lipdyn/errors.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

namespace lipdyn {

// Finite window of an operator in the coordinate basis. Rows are complete by
// construction: every column a row functional touches is present, so row
// sums are exact operator data, not truncation artifacts.
template <class K>
struct TruncatedMatrix {
    std::vector<VertexId> rows;
    std::vector<VertexId> cols;
    std::map<std::pair<std::size_t, std::size_t>, K> entries;  // nonzero only

    K at(std::size_t i, std::size_t j) const {
        auto it = entries.find({i, j});
        return it == entries.end() ? scalar_traits<K>::zero() : it->second;
    }

    friend bool operator==(const TruncatedMatrix& a, const TruncatedMatrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
    }
};

// An operator packaged for truncation: how to apply it, and which columns a
// given row functional can touch.
template <class K>
struct SeqOperator {
    std::string name;
    TreePtr tree;
    std::function<SeqVec<K>(const SeqVec<K>&)> apply;
    std::function<std::vector<VertexId>(VertexId)> columns_for_row;
};

template <class K>
SeqOperator<K> comp_operator(SymbolPhi phi) {
    SeqOperator<K> op;
    op.name = "composition";
    op.tree = phi.tree();
    TreePtr t = phi.tree();
    op.apply = [phi](const SeqVec<K>& x) { return comp_apply_seq(phi, x); };
    op.columns_for_row = [phi, t](VertexId v) {
        std::vector<VertexId> cols = t->path_from_root(phi.apply(v));
        if (v != RootedTree::root)
            for (VertexId w : t->path_from_root(phi.apply(*t->parent(v)))) cols.push_back(w);
        return cols;
    };
    return op;
}

template <class K>
SeqOperator<K> mult_operator(SymbolPsi<K> psi) {
    SeqOperator<K> op;
    op.name = "multiplication";
    op.tree = psi.tree();
    TreePtr t = psi.tree();
    op.apply = [psi](const SeqVec<K>& x) { return mult_apply_seq(psi, x); };
    op.columns_for_row = [t](VertexId v) {
        std::vector<VertexId> cols{v};
        if (v != RootedTree::root)
            for (VertexId w : t->path_from_root(*t->parent(v))) cols.push_back(w);
        return cols;
    };
    return op;
}

template <class K>
SeqOperator<K> shift_operator(TreePtr tree) {
    SeqOperator<K> op;
    op.name = "backward shift";
    op.tree = tree;
    TreePtr t = std::move(tree);
    op.apply = [](const SeqVec<K>& x) { return shift_apply_seq(x); };
    op.columns_for_row = [t](VertexId v) {
        std::vector<VertexId> cols{v};
        for (VertexId c : t->children(v)) cols.push_back(c);
        if (v != RootedTree::root) {
            VertexId p = *t->parent(v);
            for (VertexId s : t->children(p)) cols.push_back(s);
            for (VertexId w : t->path_from_root(p)) cols.push_back(w);
        }
        return cols;
    };
    return op;
}

namespace detail {

inline void sort_canonical(const TreePtr& t, std::vector<VertexId>& vs) {
    std::sort(vs.begin(), vs.end(), [&t](VertexId a, VertexId b) {
        long long da = t->depth(a), db = t->depth(b);
        return da != db ? da < db : a < b;
    });
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

}  // namespace detail

// Matrix of the operator on an explicit row set. Columns default to exactly
// the union of the rows' supports; an explicit column list must cover that
// union or the truncation would silently drop row mass.
template <class K>
TruncatedMatrix<K> matrix_truncate_rows(const SeqOperator<K>& op, std::vector<VertexId> rows,
                                        std::optional<std::vector<VertexId>> cols = std::nullopt) {
    TruncatedMatrix<K> m;
    m.rows = std::move(rows);
    for (VertexId v : m.rows) op.tree->require(v);
    std::vector<VertexId> needed;
    for (VertexId v : m.rows)
        for (VertexId w : op.columns_for_row(v)) needed.push_back(w);
    detail::sort_canonical(op.tree, needed);
    if (cols) {
        std::set<VertexId> have(cols->begin(), cols->end());
        for (VertexId w : needed)
            if (!have.count(w))
                throw TruncationError("column list misses vertex " + std::to_string(w) +
                                          "; rows would be incomplete",
                                      static_cast<long long>(needed.size()));
        m.cols = *cols;
        detail::sort_canonical(op.tree, m.cols);
    } else {
        m.cols = needed;
    }
    std::map<VertexId, std::size_t> row_index;
    for (std::size_t i = 0; i < m.rows.size(); ++i) row_index[m.rows[i]] = i;
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
        SeqVec<K> y = op.apply(SeqVec<K>::basis_e(op.tree, m.cols[j]));
        for (const auto& [v, val] : y.entries()) {
            auto it = row_index.find(v);
            if (it != row_index.end()) m.entries[{it->second, j}] = val;
        }
    }
    return m;
}

// The first num_rows basis rows in breadth-first order.
template <class K>
TruncatedMatrix<K> matrix_truncate(const SeqOperator<K>& op, std::size_t num_rows,
                                   std::optional<std::vector<VertexId>> cols = std::nullopt) {
    return matrix_truncate_rows(op, op.tree->first_vertices(num_rows), std::move(cols));
}

// Product of compatible truncations (inner vertex lists must match; the
// result is exact when the left factor's rows are complete over b.rows).
template <class K>
TruncatedMatrix<K> matrix_multiply(const TruncatedMatrix<K>& a, const TruncatedMatrix<K>& b) {
    if (a.cols != b.rows) throw ContractError("inner truncation windows do not match");
    TruncatedMatrix<K> c;
    c.rows = a.rows;
    c.cols = b.cols;
    std::map<std::size_t, std::vector<std::pair<std::size_t, K>>> b_rows;
    for (const auto& [jk, val] : b.entries) b_rows[jk.first].emplace_back(jk.second, val);
    for (const auto& [ij, va] : a.entries) {
        auto it = b_rows.find(ij.second);
        if (it == b_rows.end()) continue;
        for (const auto& [k, vb] : it->second) {
            auto key = std::make_pair(ij.first, k);
            auto slot = c.entries.find(key);
            if (slot == c.entries.end())
                c.entries[key] = va * vb;
            else
                slot->second = slot->second + va * vb;
        }
    }
    for (auto it = c.entries.begin(); it != c.entries.end();)
        it = scalar_traits<K>::is_zero(it->second) ? c.entries.erase(it) : std::next(it);
    return c;
}

// Image of a coordinate vector under the truncated window: exact on vectors
// supported inside the column list (complete rows see all of their mass).
template <class K>
SeqVec<K> matrix_apply(const TruncatedMatrix<K>& m, const SeqVec<K>& x, const TreePtr& tree) {
    std::map<VertexId, std::size_t> col_index;
    for (std::size_t j = 0; j < m.cols.size(); ++j) col_index[m.cols[j]] = j;
    for (const auto& [v, val] : x.entries())
        if (!col_index.count(v))
            throw TruncationError("vector support leaves the column window", tree->depth(v));
    SeqVec<K> y(tree);
    for (const auto& [ij, val] : m.entries) {
        VertexId w = m.cols[ij.second];
        y.add(m.rows[ij.first], val * x.at(w));
    }
    return y;
}

}  // namespace lipdyn
