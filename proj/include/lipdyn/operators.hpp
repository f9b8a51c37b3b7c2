#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lipdyn/errors.hpp"
#include "lipdyn/scalar.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

namespace lipdyn {

// phi(j) = a*j + b on one branch, from |j| >= |from| outward.
struct AffineTail {
    VertexId from = 0;
    long long a = 1;
    long long b = 0;

    friend bool operator==(const AffineTail&, const AffineTail&) = default;
};

// Self-map of the vertex set, presented as a finite table plus affine tails
// (one per unbounded branch). On PathN0 the `increasing` flag certifies
// strict monotonicity together with phi(0) > 0; several dynamical routines
// require it. Tables with no tail are partial symbols: queries past the table
// throw, and global quantities cannot be certified.
class SymbolPhi {
public:
    // PathN0 symbol: table on [0, tail.from) (contiguous), affine beyond.
    static SymbolPhi path_symbol(std::map<VertexId, VertexId> table,
                                 std::optional<AffineTail> tail, bool increasing) {
        SymbolPhi s(RootedTree::path_n0(), std::move(table), tail, std::nullopt);
        if (tail) {
            if (tail->from < 0) throw ValidationError("tail start must be >= 0");
            if (tail->a < 1) throw ValidationError("tail slope must be >= 1");
            for (VertexId j = 0; j < tail->from; ++j)
                if (!s.table_.count(j))
                    throw ValidationError("table must cover 0.." + std::to_string(tail->from - 1));
            for (const auto& [j, v] : s.table_)
                if (j < 0 || j >= tail->from)
                    throw ValidationError("table key " + std::to_string(j) +
                                          " outside [0, tail start)");
        } else {
            VertexId expect = 0;
            for (const auto& [j, v] : s.table_)
                if (j != expect++)
                    throw ValidationError("tailless table must have contiguous keys from 0");
            if (s.table_.empty()) throw ValidationError("empty symbol");
        }
        for (const auto& [j, v] : s.table_)
            if (v < 0) throw ValidationError("symbol value " + std::to_string(v) + " not in N0");
        if (tail && tail->a * tail->from + tail->b < 0)
            throw ValidationError("tail leaves N0");
        if (increasing) s.validate_increasing();
        s.increasing_ = increasing;
        return s;
    }

    // ZLine symbol: affine on each branch beyond the tail starts, table on the
    // finite gap between them. pos applies for j >= pos.from, neg for
    // j <= neg.from.
    static SymbolPhi zline_symbol(std::map<VertexId, VertexId> table, AffineTail pos,
                                  AffineTail neg) {
        SymbolPhi s(RootedTree::z_line(), std::move(table), pos, neg);
        if (neg.from >= pos.from)
            throw ValidationError("negative tail must start below the positive tail");
        for (VertexId j = neg.from + 1; j < pos.from; ++j)
            if (!s.table_.count(j))
                throw ValidationError("table must cover the gap between the tails");
        for (const auto& [j, v] : s.table_)
            if (j <= neg.from || j >= pos.from)
                throw ValidationError("table key " + std::to_string(j) + " overlaps a tail");
        if (pos.a < 1 || neg.a < 1) throw ValidationError("tail slopes must be >= 1");
        return s;
    }

    // Total table on a materialized tree.
    static SymbolPhi table_symbol(TreePtr tree, std::map<VertexId, VertexId> table) {
        if (tree->kind() != TreeKind::Explicit)
            throw ValidationError("table symbols are for explicit trees");
        SymbolPhi s(std::move(tree), std::move(table), std::nullopt, std::nullopt);
        for (const auto& [u, v] : s.table_) {
            s.tree_->require(u);
            s.tree_->require(v);
        }
        return s;
    }

    const TreePtr& tree() const { return tree_; }
    const std::map<VertexId, VertexId>& table() const { return table_; }
    const std::optional<AffineTail>& pos_tail() const { return pos_tail_; }
    const std::optional<AffineTail>& neg_tail() const { return neg_tail_; }
    bool increasing() const { return increasing_; }
    bool assume_l0_bounded() const { return assume_l0_bounded_; }
    void set_assume_l0_bounded(bool b) { assume_l0_bounded_ = b; }

    VertexId apply(VertexId v) const {
        tree_->require(v);
        if (pos_tail_ && v >= pos_tail_->from) {
            if (v > ((1LL << 60) - std::llabs(pos_tail_->b)) / pos_tail_->a)
                throw TruncationError("symbol application leaves the index range", v);
            return pos_tail_->a * v + pos_tail_->b;
        }
        if (neg_tail_ && v <= neg_tail_->from) {
            if (-v > ((1LL << 60) - std::llabs(neg_tail_->b)) / neg_tail_->a)
                throw TruncationError("symbol application leaves the index range", v);
            return neg_tail_->a * v + neg_tail_->b;
        }
        auto it = table_.find(v);
        if (it == table_.end())
            throw TruncationError("symbol has no value at vertex " + std::to_string(v), v);
        return it->second;
    }

    // Tail-aware application on big integers (PathN0 iterates overflow int64).
    BigInt apply_big(const BigInt& j) const {
        if (tree_->kind() != TreeKind::PathN0)
            throw ContractError("big iteration is a PathN0 routine");
        if (pos_tail_ && j >= pos_tail_->from) return BigInt(pos_tail_->a) * j + pos_tail_->b;
        if (j > (1LL << 62)) throw TruncationError("iterate escaped the table", 0);
        return apply(j.convert_to<VertexId>());
    }

    BigInt iterate(VertexId j, long long n) const {
        BigInt v = j;
        for (long long i = 0; i < n; ++i) v = apply_big(v);
        return v;
    }

    // The n-th compositional power as a symbol (PathN0, increasing, with tail).
    SymbolPhi power(long long n) const {
        if (tree_->kind() != TreeKind::PathN0 || !pos_tail_ || !increasing_)
            throw ContractError("symbol powers need an increasing PathN0 symbol with a tail");
        if (n < 1) throw ContractError("power must be >= 1");
        AffineTail t;
        t.from = pos_tail_->from;
        BigInt a(1), b(0);
        for (long long i = 0; i < n; ++i) {
            b = b * pos_tail_->a + pos_tail_->b;
            a *= pos_tail_->a;
        }
        t.a = checked_small(a, "iterated tail slope");
        t.b = checked_small(b, "iterated tail offset");
        std::map<VertexId, VertexId> table;
        for (VertexId j = 0; j < t.from; ++j)
            table[j] = checked_small(iterate(j, n), "iterated symbol value");
        return path_symbol(std::move(table), t, true);
    }

private:
    SymbolPhi(TreePtr tree, std::map<VertexId, VertexId> table, std::optional<AffineTail> pos,
              std::optional<AffineTail> neg)
        : tree_(std::move(tree)), table_(std::move(table)), pos_tail_(pos), neg_tail_(neg) {}

    void validate_increasing() const {
        std::optional<VertexId> prev;
        for (const auto& [j, v] : table_) {
            if (prev && v <= *prev) throw ValidationError("symbol is not strictly increasing");
            prev = v;
        }
        if (pos_tail_) {
            VertexId first = pos_tail_->a * pos_tail_->from + pos_tail_->b;
            if (prev && first <= *prev) throw ValidationError("tail breaks monotonicity");
            if (!prev && first < 1) throw ValidationError("phi(0) must be positive");
        }
        if (!table_.empty() && table_.begin()->second < 1)
            throw ValidationError("phi(0) must be positive");
    }

    static long long checked_small(const BigInt& v, const char* what) {
        if (v > (1LL << 62) || v < -(1LL << 62))
            throw ContractError(std::string(what) + " exceeds the vertex id range");
        return v.convert_to<long long>();
    }

    TreePtr tree_;
    std::map<VertexId, VertexId> table_;
    std::optional<AffineTail> pos_tail_;
    std::optional<AffineTail> neg_tail_;
    bool increasing_ = false;
    bool assume_l0_bounded_ = false;
};

// --- composition -------------------------------------------------------

namespace detail {

// Static bound past which the conjugated composition operator's coordinates
// vanish: both phi(v) and phi(v-) land beyond the support, on one branch.
inline VertexId comp_scan_bound(const SymbolPhi& phi, long long support_depth) {
    VertexId bound = 1;
    for (const auto& [j, v] : phi.table()) bound = std::max(bound, std::llabs(j));
    if (phi.pos_tail())
        bound = std::max({bound, std::llabs(phi.pos_tail()->from),
                          support_depth + std::llabs(phi.pos_tail()->b)});
    if (phi.neg_tail())
        bound = std::max({bound, std::llabs(phi.neg_tail()->from),
                          support_depth + std::llabs(phi.neg_tail()->b)});
    return bound + 2;
}

// Vertices to evaluate when applying a conjugated operator; coordinates
// outside are provably zero (or the table is too short, which throws).
inline std::vector<VertexId> comp_scan_set(const SymbolPhi& phi, long long support_depth) {
    const TreePtr& t = phi.tree();
    std::vector<VertexId> scan;
    switch (t->kind()) {
        case TreeKind::PathN0: {
            if (!phi.pos_tail()) {
                // Partial symbol: sound only when increasing and the table
                // already reaches past the support.
                VertexId last = phi.table().rbegin()->first;
                if (!phi.increasing() || phi.apply(last) < support_depth)
                    throw TruncationError("symbol table too short for this support",
                                          support_depth);
                return t->vertices_to_depth(last);
            }
            return t->vertices_to_depth(comp_scan_bound(phi, support_depth));
        }
        case TreeKind::ZLine:
            return t->vertices_to_depth(comp_scan_bound(phi, support_depth));
        case TreeKind::Explicit:
            for (const auto& [u, v] : phi.table()) scan.push_back(u);
            return scan;
    }
    return scan;
}

}  // namespace detail

// Conjugated composition operator on sequences:
//   root coordinate: path sum of x at phi(root);
//   at v != root:    path sum at phi(v) minus path sum at phi(v-).
// On PathN0 with increasing phi this is the window sum over
// [phi(v-)+1, phi(v)].
template <class K>
SeqVec<K> comp_apply_seq(const SymbolPhi& phi, const SeqVec<K>& x) {
    const TreePtr& t = phi.tree();
    if (!same_tree(x.tree(), t)) throw ContractError("vector and symbol live on different trees");
    SeqVec<K> y(t);
    if (x.empty()) return y;
    for (VertexId v : detail::comp_scan_set(phi, x.support_depth())) {
        K val = x.path_sum(phi.apply(v));
        if (v != RootedTree::root) val = val - x.path_sum(phi.apply(*t->parent(v)));
        y.set(v, val);
    }
    return y;
}

// Composition on the function side: g = f o phi, re-presented on a finite
// core. Supported where the tail structure (or a finite tree) certifies that
// g is sector-constant beyond the computed core.
template <class K>
LipFunc<K> comp_apply_lip(const SymbolPhi& phi, const LipFunc<K>& f) {
    const TreePtr& t = phi.tree();
    if (!same_tree(f.tree(), t)) throw ContractError("function and symbol live on different trees");
    std::map<VertexId, K> core;
    switch (t->kind()) {
        case TreeKind::PathN0:
        case TreeKind::ZLine: {
            long long F = f.core_depth();
            for (VertexId v : detail::comp_scan_set(phi, F)) core[v] = f(phi.apply(v));
            break;
        }
        case TreeKind::Explicit: {
            if (!t->finite())
                throw ContractError(
                    "composition on explicit trees needs a finite tree (total table)");
            for (VertexId v : t->vertices_to_depth(t->materialized_depth()))
                core[v] = f(phi.apply(v));
            break;
        }
    }
    return LipFunc<K>(t, std::move(core));
}

// n-fold composition via iterated window sums (PathN0, increasing, tail);
// falls back to repeated application otherwise.
template <class K>
SeqVec<K> comp_power_apply(const SymbolPhi& phi, long long n, const SeqVec<K>& x) {
    if (n < 0) throw ContractError("negative operator power");
    if (n == 0) return x;
    const TreePtr& t = phi.tree();
    if (t->kind() == TreeKind::PathN0 && phi.increasing() && phi.pos_tail()) {
        // prefix sums over the sorted support
        std::vector<std::pair<VertexId, K>> pref;
        K run = scalar_traits<K>::zero();
        for (const auto& [w, val] : x.entries()) {
            run = run + val;
            pref.emplace_back(w, run);
        }
        auto prefix_up_to = [&](const BigInt& k) {
            K s = scalar_traits<K>::zero();
            for (auto it = pref.rbegin(); it != pref.rend(); ++it)
                if (BigInt(it->first) <= k) return it->second;
            return s;
        };
        SeqVec<K> y(t);
        if (x.empty()) return y;
        BigInt maxsupp = x.entries().rbegin()->first;
        BigInt prev_img(-1);
        for (VertexId j = 0;; ++j) {
            BigInt img = phi.iterate(j, n);
            y.set(j, prefix_up_to(img) - prefix_up_to(prev_img));
            if (prev_img >= maxsupp) break;
            prev_img = img;
        }
        return y;
    }
    SeqVec<K> y = x;
    for (long long i = 0; i < n; ++i) y = comp_apply_seq(phi, y);
    return y;
}

// Certified Lipschitz constant L_phi = sup over non-root v of
// dist(phi(v), phi(v-)). Needs affine tails (or a finite tree) to close the
// sup with a finite scan.
inline long long lipschitz_constant(const SymbolPhi& phi) {
    const TreePtr& t = phi.tree();
    long long best = 0;
    switch (t->kind()) {
        case TreeKind::PathN0:
        case TreeKind::ZLine: {
            if (!phi.pos_tail())
                throw ContractError("Lipschitz constant needs an affine tail");
            for (VertexId v : detail::comp_scan_set(phi, 0)) {
                if (v == RootedTree::root) continue;
                best = std::max(best, t->dist(phi.apply(v), phi.apply(*t->parent(v))));
            }
            best = std::max(best, phi.pos_tail()->a);
            if (phi.neg_tail()) best = std::max(best, phi.neg_tail()->a);
            return best;
        }
        case TreeKind::Explicit: {
            if (!t->finite())
                throw ContractError("Lipschitz constant on explicit trees needs a finite tree");
            for (VertexId v : t->vertices_to_depth(t->materialized_depth())) {
                if (v == RootedTree::root) continue;
                best = std::max(best, t->dist(phi.apply(v), phi.apply(*t->parent(v))));
            }
            return best;
        }
    }
    return best;
}

// Operator norm of the composition operator on the Lipschitz space:
// max{1 + |phi(root)|, L_phi}.
inline long long comp_norm(const SymbolPhi& phi) {
    long long L = lipschitz_constant(phi);
    long long root_term = 1 + phi.tree()->depth(phi.apply(RootedTree::root));
    return std::max(root_term, L);
}

// Rows that certify the norm under the row-sum reading of the truncation.
inline long long comp_certified_depth(const SymbolPhi& phi) {
    if (phi.tree()->kind() == TreeKind::Explicit) return phi.tree()->materialized_depth();
    return detail::comp_scan_bound(phi, 0);
}

// --- multiplication ----------------------------------------------------

// Multiplication symbol: values on a finite down-closed core, constant on
// hanging sectors, plus an optional per-depth drift beyond the core (the
// drift makes unbounded symbols presentable; 0 keeps tails constant).
template <class K>
class SymbolPsi {
public:
    SymbolPsi(TreePtr tree, std::map<VertexId, K> core, K drift = scalar_traits<K>::zero())
        : values_(std::move(tree), std::move(core)), drift_(std::move(drift)) {}

    const TreePtr& tree() const { return values_.tree(); }
    const std::map<VertexId, K>& core() const { return values_.core(); }
    const K& drift() const { return drift_; }
    long long core_depth() const { return values_.core_depth(); }

    K at(VertexId v) const {
        const TreePtr& t = tree();
        t->require(v);
        VertexId w = v;
        while (!core().count(w)) w = *t->parent(w);
        K base = core().at(w);
        if (scalar_traits<K>::is_zero(drift_)) return base;
        long long excess = t->depth(v) - t->depth(w);
        return base + scalar_traits<K>::from_int(excess) * drift_;
    }

private:
    LipFunc<K> values_;  // reuses core validation and closure layout
    K drift_;
};

// Bounded iff sup |psi| and sup |v| |psi(v) - psi(v-)| are both finite. On
// this presentation both reduce to: no drift beyond the core.
template <class K>
bool mult_bounded(const SymbolPsi<K>& psi) {
    bool sup_finite = scalar_traits<K>::is_zero(psi.drift());
    bool jump_finite = scalar_traits<K>::is_zero(psi.drift());
    return sup_finite && jump_finite;
}

namespace detail {

// Vertices where a multiplication coordinate can be nonzero: the support
// plus everywhere the symbol still varies (core and its boundary children).
template <class K>
std::set<VertexId> mult_scan_set(const SymbolPsi<K>& psi, const SeqVec<K>& x) {
    std::set<VertexId> scan;
    for (const auto& [v, val] : x.entries()) scan.insert(v);
    for (const auto& [v, val] : psi.core()) {
        scan.insert(v);
        for (VertexId c : psi.tree()->children(v)) scan.insert(c);
    }
    return scan;
}

}  // namespace detail

// Conjugated multiplication operator:
//   root: psi(root) x_root;
//   at v: psi(v) x_v + (psi(v) - psi(v-)) * (path sum of x at v-).
template <class K>
SeqVec<K> mult_apply_seq(const SymbolPsi<K>& psi, const SeqVec<K>& x) {
    if (!same_tree(x.tree(), psi.tree())) throw ContractError("vector and symbol live on different trees");
    if (!mult_bounded(psi))
        throw ContractError("multiplication by an unbounded symbol leaves the sequence space");
    const TreePtr& t = psi.tree();
    SeqVec<K> y(t);
    for (VertexId v : detail::mult_scan_set(psi, x)) {
        if (v == RootedTree::root) {
            y.set(v, psi.at(v) * x.at(v));
            continue;
        }
        VertexId p = *t->parent(v);
        K val = psi.at(v) * x.at(v) + (psi.at(v) - psi.at(p)) * x.path_sum(p);
        y.set(v, val);
    }
    return y;
}

// Multiplication on the function side: g = psi * f. The product is constant
// on every sector hanging off the union of the two cores, so that union
// presents it.
template <class K>
LipFunc<K> mult_apply_lip(const SymbolPsi<K>& psi, const LipFunc<K>& f) {
    if (!same_tree(f.tree(), psi.tree()))
        throw ContractError("function and symbol live on different trees");
    if (!mult_bounded(psi))
        throw ContractError("multiplication by an unbounded symbol leaves the Lipschitz space");
    std::map<VertexId, K> core;
    for (const auto& [v, val] : psi.core()) core[v] = psi.at(v) * f(v);
    for (const auto& [v, val] : f.core()) core[v] = psi.at(v) * f(v);
    return LipFunc<K>(f.tree(), std::move(core));
}

template <class K>
struct MultNorms {
    typename scalar_traits<K>::real_type lip;   // max{|psi(root)|, S}
    typename scalar_traits<K>::real_type plus;  // |psi(root)| + S
};

// S = sup over non-root v of |psi(v)| + |v| |psi(v) - psi(v-)|, attained on
// the core or its boundary children. nullopt when the symbol is unbounded.
template <class K>
std::optional<MultNorms<K>> mult_norms(const SymbolPsi<K>& psi) {
    using T = scalar_traits<K>;
    using R = typename T::real_type;
    if (!mult_bounded(psi)) return std::nullopt;
    const TreePtr& t = psi.tree();
    std::set<VertexId> scan;
    for (const auto& [v, val] : psi.core()) {
        scan.insert(v);
        for (VertexId c : t->children(v)) scan.insert(c);
    }
    R S = T::real_zero();
    for (VertexId v : scan) {
        if (v == RootedTree::root) continue;
        VertexId p = *t->parent(v);
        R cand = T::abs(psi.at(v)) +
                 T::real_from_int(t->depth(v)) * T::abs(psi.at(v) - psi.at(p));
        if (S < cand) S = cand;
    }
    R root_abs = T::abs(psi.at(RootedTree::root));
    MultNorms<K> out;
    out.lip = std::max(root_abs, S);
    out.plus = root_abs + S;
    return out;
}

inline long long mult_certified_depth_impl(long long core_depth) { return core_depth + 1; }

template <class K>
long long mult_certified_depth(const SymbolPsi<K>& psi) {
    return mult_certified_depth_impl(psi.core_depth());
}

// --- backward shift ----------------------------------------------------

inline bool shift_bounded(const TreePtr& t) { return t->is_homogeneous_by_sectors(); }

namespace detail {

template <class K>
std::set<VertexId> shift_scan_set(const TreePtr& t, const SeqVec<K>& x) {
    std::set<VertexId> scan;
    scan.insert(RootedTree::root);
    for (const auto& [v, val] : x.entries()) {
        scan.insert(v);
        auto p = t->parent(v);
        if (p) {
            scan.insert(*p);
            for (VertexId s : t->children(*p)) scan.insert(s);  // siblings
        }
    }
    // gamma can jump only this close to the root on a homogeneous tree
    auto level = t->homogeneity_level();
    if (level)
        for (VertexId v : t->vertices_to_depth(*level + 1)) scan.insert(v);
    return scan;
}

}  // namespace detail

// Conjugated backward shift:
//   root: gamma(root) x_root + sum over children of the root;
//   at v: sum over Chi(v) - sum over Chi(v-) \ {v} + (gamma(v) - 1) x_v
//         + (gamma(v) - gamma(v-)) * (path sum at v-).
template <class K>
SeqVec<K> shift_apply_seq(const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    const TreePtr& t = x.tree();
    if (!shift_bounded(t))
        throw ContractError("backward shift is unbounded on a non-homogeneous tree");
    SeqVec<K> y(t);
    for (VertexId v : detail::shift_scan_set(t, x)) {
        K val = T::zero();
        for (VertexId c : t->children(v)) val = val + x.at(c);
        if (v == RootedTree::root) {
            val = val + T::from_int(t->gamma(v)) * x.at(v);
        } else {
            VertexId p = *t->parent(v);
            for (VertexId s : t->children(p))
                if (s != v) val = val - x.at(s);
            val = val + T::from_int(t->gamma(v) - 1) * x.at(v);
            long long jump = t->gamma(v) - t->gamma(p);
            if (jump != 0) val = val + T::from_int(jump) * x.path_sum(p);
        }
        y.set(v, val);
    }
    return y;
}

// Backward shift on the function side: g(v) = sum of f over the children of
// v. Beyond the larger of the function core and the homogeneity level, both
// the child count and the child values are sector constants, so a ball of
// that radius presents the image.
template <class K>
LipFunc<K> shift_apply_lip(const LipFunc<K>& f) {
    using T = scalar_traits<K>;
    const TreePtr& t = f.tree();
    if (!shift_bounded(t))
        throw ContractError("backward shift is unbounded on a non-homogeneous tree");
    long long m = std::max(f.core_depth(), *t->homogeneity_level());
    std::map<VertexId, K> core;
    for (VertexId v : t->vertices_to_depth(m)) {
        K sum = T::zero();
        for (VertexId c : t->children(v)) sum = sum + f(c);
        core[v] = sum;
    }
    return LipFunc<K>(t, std::move(core));
}

// max{2 gamma(root), Lambda(T)}; nullopt when Lambda is infinite.
inline std::optional<long long> shift_norm(const TreePtr& t) {
    auto lam = t->lambda();
    if (!lam) return std::nullopt;
    return std::max(2 * t->gamma(RootedTree::root), *lam);
}

inline long long shift_certified_depth(const TreePtr& t) {
    auto level = t->homogeneity_level();
    if (!level) throw ContractError("no certified depth on a non-homogeneous tree");
    return *level + 1;
}

// --- extremal witnesses -------------------------------------------------

// Unit-sup-norm vector x with |op(x)| at `at` equal to `claimed`, the term
// that vertex contributes to the norm formula.
template <class K>
struct Witness {
    SeqVec<K> vector;
    VertexId at;
    typename scalar_traits<K>::real_type claimed;
};

template <class K>
Witness<K> extremal_witness_comp(const SymbolPhi& phi, VertexId u) {
    using T = scalar_traits<K>;
    const TreePtr& t = phi.tree();
    SeqVec<K> x(t);
    typename T::real_type claimed = T::real_zero();
    if (u == RootedTree::root) {
        for (VertexId v : t->path_from_root(phi.apply(u))) x.set(v, T::one());
        claimed = T::real_from_int(1 + t->depth(phi.apply(u)));
    } else {
        VertexPath pu = t->path_from_root(phi.apply(u));
        VertexPath pp = t->path_from_root(phi.apply(*t->parent(u)));
        std::set<VertexId> U(pu.begin(), pu.end()), V(pp.begin(), pp.end());
        for (VertexId v : U)
            if (!V.count(v)) x.set(v, T::one());
        for (VertexId v : V)
            if (!U.count(v)) x.set(v, -T::one());
        claimed = T::real_from_int(t->dist(phi.apply(u), phi.apply(*t->parent(u))));
        // Degenerate term (the two images coincide): every entry cancels, so
        // any unit vector realizes the zero coordinate. The root entry feeds
        // both path sums equally.
        if (x.empty()) x.set(RootedTree::root, T::one());
    }
    return {std::move(x), u, claimed};
}

template <class K>
Witness<K> extremal_witness_mult(const SymbolPsi<K>& psi, VertexId u) {
    using T = scalar_traits<K>;
    const TreePtr& t = psi.tree();
    SeqVec<K> x(t);
    if (u == RootedTree::root) {
        x.set(u, T::one());
        return {std::move(x), u, T::abs(psi.at(u))};
    }
    // Phase-align: lambda * (psi(u) - psi(u-)) = |jump| on the incoming path,
    // and the u entry turns psi(u) x_u into |psi(u)|.
    K d = psi.at(u) - psi.at(*t->parent(u));
    K lambda = T::is_zero(d) ? T::one() : T::conj(d) / T::from_real(T::abs(d));
    for (VertexId v : t->path_from_root(*t->parent(u))) x.set(v, lambda);
    K pu = psi.at(u);
    x.set(u, T::is_zero(pu) ? T::one() : T::conj(pu) / T::from_real(T::abs(pu)));
    typename T::real_type claimed =
        T::abs(pu) + T::real_from_int(t->depth(u)) * T::abs(d);
    return {std::move(x), u, claimed};
}

template <class K>
Witness<K> extremal_witness_shift(const TreePtr& t, VertexId u) {
    using T = scalar_traits<K>;
    SeqVec<K> x(t);
    if (u == RootedTree::root) {
        x.set(u, T::one());
        for (VertexId c : t->children(u)) x.set(c, T::one());
        return {std::move(x), u, T::real_from_int(2 * t->gamma(u))};
    }
    VertexId p = *t->parent(u);
    long long g = t->gamma(u), gp = t->gamma(p);
    K s = T::from_int(g - gp >= 0 ? 1 : -1);
    for (VertexId v : t->path_from_root(p)) x.set(v, s);
    x.set(u, T::from_int(g - 1 >= 0 ? 1 : -1));
    for (VertexId w : t->children(p))
        if (w != u) x.set(w, -T::one());
    for (VertexId w : t->children(u)) x.set(w, T::one());
    long long claimed = g + gp - 1 + std::llabs(g - 1) + t->depth(u) * std::llabs(g - gp);
    return {std::move(x), u, T::real_from_int(claimed)};
}

}  // namespace lipdyn
