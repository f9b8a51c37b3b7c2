#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "lipdyn/errors.hpp"
#include "lipdyn/scalar.hpp"
#include "lipdyn/tree.hpp"

namespace lipdyn {

// Finitely supported sequence indexed by tree vertices. Only nonzero entries
// are stored; value semantics throughout.
template <class K>
class SeqVec {
public:
    explicit SeqVec(TreePtr tree) : tree_(std::move(tree)) {}

    static SeqVec zero(TreePtr tree) { return SeqVec(std::move(tree)); }

    // e^(w): indicator of the single vertex w.
    static SeqVec basis_e(TreePtr tree, VertexId w) {
        SeqVec x(std::move(tree));
        x.set(w, scalar_traits<K>::one());
        return x;
    }

    // del^(w) = e^(w) - sum of e^(u) over children u of w.
    static SeqVec basis_del(TreePtr tree, VertexId w) {
        SeqVec x = basis_e(tree, w);
        for (VertexId u : tree->children(w)) x.set(u, -scalar_traits<K>::one());
        return x;
    }

    const TreePtr& tree() const { return tree_; }
    const std::map<VertexId, K>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }

    K at(VertexId v) const {
        tree_->require(v);
        auto it = entries_.find(v);
        return it == entries_.end() ? scalar_traits<K>::zero() : it->second;
    }

    void set(VertexId v, K value) {
        tree_->require(v);
        if (scalar_traits<K>::is_zero(value))
            entries_.erase(v);
        else
            entries_[v] = std::move(value);
    }

    void add(VertexId v, const K& value) { set(v, at(v) + value); }

    // Max depth over the support; 0 for the zero vector.
    long long support_depth() const {
        long long d = 0;
        for (const auto& [v, val] : entries_) d = std::max(d, tree_->depth(v));
        return d;
    }

    // Sum of entries on the root path of v (v included).
    K path_sum(VertexId v) const {
        tree_->require(v);
        K s = scalar_traits<K>::zero();
        for (const auto& [w, val] : entries_)
            if (tree_->is_ancestor_or_self(w, v)) s = s + val;
        return s;
    }

    friend SeqVec operator+(const SeqVec& a, const SeqVec& b) {
        SeqVec r = a;
        for (const auto& [v, val] : b.entries_) r.add(v, val);
        return r;
    }
    friend SeqVec operator-(const SeqVec& a, const SeqVec& b) {
        SeqVec r = a;
        for (const auto& [v, val] : b.entries_) r.add(v, -val);
        return r;
    }
    friend SeqVec operator*(const K& c, const SeqVec& x) {
        SeqVec r(x.tree_);
        for (const auto& [v, val] : x.entries_) r.set(v, c * val);
        return r;
    }
    friend bool operator==(const SeqVec& a, const SeqVec& b) {
        return a.entries_ == b.entries_;
    }
    friend bool operator!=(const SeqVec& a, const SeqVec& b) { return !(a == b); }

private:
    TreePtr tree_;
    std::map<VertexId, K> entries_;
};

// Lipschitz function presented by its values on a finite down-closed core.
// Beyond the core the function is constant on each hanging sector, equal to
// its value at the deepest core ancestor; evaluation walks up to the core.
template <class K>
class LipFunc {
public:
    LipFunc(TreePtr tree, std::map<VertexId, K> core)
        : tree_(std::move(tree)), core_(std::move(core)) {
        if (!core_.count(RootedTree::root))
            throw ValidationError("function core must contain the root");
        for (const auto& [v, val] : core_) {
            tree_->require(v);
            if (v == RootedTree::root) continue;
            if (!core_.count(*tree_->parent(v)))
                throw ValidationError("function core is not down-closed at vertex " +
                                      std::to_string(v));
        }
    }

    static LipFunc zero(TreePtr tree) { return constant(std::move(tree), scalar_traits<K>::zero()); }

    static LipFunc constant(TreePtr tree, K value) {
        std::map<VertexId, K> core;
        core[RootedTree::root] = std::move(value);
        return LipFunc(std::move(tree), std::move(core));
    }

    // Indicator of the sector rooted at w.
    static LipFunc chi_sector(TreePtr tree, VertexId w) {
        std::map<VertexId, K> core;
        for (VertexId v : tree->path_from_root(w)) core[v] = scalar_traits<K>::zero();
        core[w] = scalar_traits<K>::one();
        return LipFunc(std::move(tree), std::move(core));
    }

    // Indicator of the single vertex w; needs w's children materialized.
    static LipFunc chi_singleton(TreePtr tree, VertexId w) {
        std::map<VertexId, K> core;
        for (VertexId v : tree->path_from_root(w)) core[v] = scalar_traits<K>::zero();
        core[w] = scalar_traits<K>::one();
        for (VertexId u : tree->children(w)) core[u] = scalar_traits<K>::zero();
        return LipFunc(std::move(tree), std::move(core));
    }

    const TreePtr& tree() const { return tree_; }
    const std::map<VertexId, K>& core() const { return core_; }

    long long core_depth() const {
        long long d = 0;
        for (const auto& [v, val] : core_) d = std::max(d, tree_->depth(v));
        return d;
    }

    K operator()(VertexId v) const {
        tree_->require(v);
        VertexId w = v;
        while (!core_.count(w)) w = *tree_->parent(w);
        return core_.at(w);
    }

    friend LipFunc operator+(const LipFunc& a, const LipFunc& b) {
        std::map<VertexId, K> core;
        for (const auto& [v, val] : a.core_) core[v] = val + b(v);
        for (const auto& [v, val] : b.core_)
            if (!core.count(v)) core[v] = a(v) + val;
        return LipFunc(a.tree_, std::move(core));
    }
    friend LipFunc operator-(const LipFunc& a, const LipFunc& b) {
        return a + scalar_traits<K>::from_int(-1) * b;
    }
    friend LipFunc operator*(const K& c, const LipFunc& f) {
        std::map<VertexId, K> core;
        for (const auto& [v, val] : f.core_) core[v] = c * val;
        return LipFunc(f.tree_, std::move(core));
    }

private:
    TreePtr tree_;
    std::map<VertexId, K> core_;
};

// D: f -> (f(root), f(v) - f(v-)). Maps onto finitely supported sequences;
// the result is supported inside the core since hanging sectors are constant.
template <class K>
SeqVec<K> D(const LipFunc<K>& f) {
    SeqVec<K> x(f.tree());
    for (const auto& [v, val] : f.core()) {
        if (v == RootedTree::root)
            x.set(v, val);
        else
            x.set(v, val - f.core().at(*f.tree()->parent(v)));
    }
    return x;
}

// D^{-1}: x -> path-sum function. Core is the down-closure of the support.
template <class K>
LipFunc<K> Dinv(const SeqVec<K>& x) {
    std::map<VertexId, K> core;
    core[RootedTree::root] = scalar_traits<K>::zero();
    for (const auto& [w, val] : x.entries())
        for (VertexId v : x.tree()->path_from_root(w)) core.emplace(v, scalar_traits<K>::zero());
    for (auto& [v, val] : core) val = x.path_sum(v);
    return LipFunc<K>(x.tree(), std::move(core));
}

template <class K>
bool operator==(const LipFunc<K>& a, const LipFunc<K>& b) {
    return D(a) == D(b);  // D is injective
}
template <class K>
bool operator!=(const LipFunc<K>& a, const LipFunc<K>& b) {
    return !(a == b);
}

// --- norms ------------------------------------------------------------

// sup_v |x_v|. Comparisons run on |.|^2 so exact mode never needs an
// irrational modulus unless it is the answer itself.
template <class K>
typename scalar_traits<K>::real_type sup_norm(const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    std::optional<K> best;
    for (const auto& [v, val] : x.entries())
        if (!best || T::abs_less(*best, val)) best = val;
    return best ? T::abs(*best) : T::real_zero();
}

// max{|f(root)|, sup |f(v) - f(v-)|}; the sup lives on the core.
template <class K>
typename scalar_traits<K>::real_type lip_norm(const LipFunc<K>& f) {
    using T = scalar_traits<K>;
    K best = f.core().at(RootedTree::root);
    for (const auto& [v, val] : f.core()) {
        if (v == RootedTree::root) continue;
        K d = val - f.core().at(*f.tree()->parent(v));
        if (T::abs_less(best, d)) best = d;
    }
    return T::abs(best);
}

// |f(root)| + sup |f(v) - f(v-)|.
template <class K>
typename scalar_traits<K>::real_type plus_norm(const LipFunc<K>& f) {
    using T = scalar_traits<K>;
    std::optional<K> best;
    for (const auto& [v, val] : f.core()) {
        if (v == RootedTree::root) continue;
        K d = val - f.core().at(*f.tree()->parent(v));
        if (!best || T::abs_less(*best, d)) best = d;
    }
    typename T::real_type s = T::abs(f.core().at(RootedTree::root));
    return best ? s + T::abs(*best) : s;
}

// --- weights ----------------------------------------------------------

// Positive weight family c_v, presented as a depth rule c_v = base^{|v|}
// with finitely many per-vertex overrides. c_root is forced to be 1.
class Weights {
public:
    explicit Weights(TreePtr tree, Rational base = Rational(1),
                     std::map<VertexId, Rational> overrides = {})
        : tree_(std::move(tree)), base_(std::move(base)), overrides_(std::move(overrides)) {
        if (base_ <= 0) throw ValidationError("weight base must be positive");
        for (const auto& [v, c] : overrides_) {
            tree_->require(v);
            if (c <= 0) throw ValidationError("weights must be positive");
        }
        if (at(RootedTree::root) != 1)
            throw ValidationError("the root weight must equal 1");
    }

    const TreePtr& tree() const { return tree_; }

    Rational at(VertexId v) const {
        auto it = overrides_.find(v);
        if (it != overrides_.end()) return it->second;
        long long d = tree_->depth(v);
        Rational c(1);
        for (long long i = 0; i < d; ++i) c *= base_;
        return c;
    }

private:
    TreePtr tree_;
    Rational base_;
    std::map<VertexId, Rational> overrides_;
};

template <class K>
typename scalar_traits<K>::real_type weight_as(const Weights& w, VertexId v);

template <>
inline Rational weight_as<RationalComplex>(const Weights& w, VertexId v) {
    return w.at(v);
}
template <>
inline double weight_as<FloatComplex>(const Weights& w, VertexId v) {
    return rational_to_double(w.at(v));
}

// sup_v c_v |x_v|.
template <class K>
typename scalar_traits<K>::real_type weighted_sup_norm(const SeqVec<K>& x, const Weights& w) {
    using T = scalar_traits<K>;
    using R = typename T::real_type;
    std::optional<K> best;
    R best_c = T::real_zero();
    R best_q = T::real_zero();
    for (const auto& [v, val] : x.entries()) {
        R c = weight_as<K>(w, v);
        R q = c * c * T::abs_sq(val);
        if (!best || best_q < q) {
            best = val;
            best_c = c;
            best_q = q;
        }
    }
    return best ? best_c * T::abs(*best) : T::real_zero();
}

// max{|f(root)|, sup c_v |f(v) - f(v-)|}.
template <class K>
typename scalar_traits<K>::real_type weighted_lip_norm(const LipFunc<K>& f, const Weights& w) {
    using T = scalar_traits<K>;
    using R = typename T::real_type;
    R best = T::abs(f.core().at(RootedTree::root));
    for (const auto& [v, val] : f.core()) {
        if (v == RootedTree::root) continue;
        K d = val - f.core().at(*f.tree()->parent(v));
        R cand = weight_as<K>(w, v) * T::abs(d);
        if (best < cand) best = cand;
    }
    return best;
}

// |f(root)| + sup c_v |f(v) - f(v-)|.
template <class K>
typename scalar_traits<K>::real_type weighted_plus_norm(const LipFunc<K>& f, const Weights& w) {
    using T = scalar_traits<K>;
    using R = typename T::real_type;
    R best = T::real_zero();
    for (const auto& [v, val] : f.core()) {
        if (v == RootedTree::root) continue;
        K d = val - f.core().at(*f.tree()->parent(v));
        R cand = weight_as<K>(w, v) * T::abs(d);
        if (best < cand) best = cand;
    }
    return T::abs(f.core().at(RootedTree::root)) + best;
}

// --- the annihilation-friendly span -----------------------------------

// Membership in the span of the del^(w): path sums vanish at every vertex of
// depth equal to the support depth. The infinitely many vertices at that depth
// reduce to a finite check: vertices of that depth inside the support closure,
// plus "exit" vertices of the closure whose off-closure subtrees reach it.
template <class K>
bool in_sigma00(const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    if (x.empty()) return true;
    long long s = x.support_depth();
    const TreePtr& t = x.tree();

    std::set<VertexId> closure;
    for (const auto& [w, val] : x.entries())
        for (VertexId v : t->path_from_root(w)) closure.insert(v);

    for (VertexId v : closure) {
        long long d = t->depth(v);
        if (d == s) {
            if (!T::is_zero(x.path_sum(v))) return false;
        } else if (d < s) {
            bool exit_reaches = false;
            if (t->gamma(v) > 0) {
                for (VertexId c : t->children(v)) {
                    if (!closure.count(c) && t->reaches_depth(c, s)) {
                        exit_reaches = true;
                        break;
                    }
                }
            }
            if (exit_reaches && !T::is_zero(x.path_sum(v))) return false;
        }
    }
    return true;
}

}  // namespace lipdyn
