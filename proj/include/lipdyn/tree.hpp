#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lipdyn/errors.hpp"

namespace lipdyn {

using VertexId = long long;

// Vertices on the path from the root to v, root first, v last.
using VertexPath = std::vector<VertexId>;

enum class TreeKind { PathN0, ZLine, Explicit };

inline const char* tree_kind_name(TreeKind k) {
    switch (k) {
        case TreeKind::PathN0: return "path_n0";
        case TreeKind::ZLine: return "z_line";
        case TreeKind::Explicit: return "explicit";
    }
    return "?";
}

struct TreeOptions {
    long long max_depth = 12;        // materialization cap below declared tails
    std::size_t max_vertices = 500000;
    bool allow_leaves = false;       // permit genuinely finite trees (oracle use)
};

// Immutable rooted tree. Root id is always 0. PathN0 and ZLine navigate
// arithmetically and are unbounded; explicit trees are materialized eagerly
// from a finite core plus cyclic branching rules hanging off core leaves, up
// to the configured depth cap. Queries past the cap throw TruncationError
// naming the depth that would be needed.
class RootedTree {
public:
    static constexpr VertexId root = 0;

    // The two arithmetic kinds are stateless, so every caller shares one
    // instance and pointer identity doubles as structural identity.
    static std::shared_ptr<const RootedTree> path_n0() {
        static const std::shared_ptr<const RootedTree> t(new RootedTree(TreeKind::PathN0));
        return t;
    }

    static std::shared_ptr<const RootedTree> z_line() {
        static const std::shared_ptr<const RootedTree> t(new RootedTree(TreeKind::ZLine));
        return t;
    }

    // Finite core given by undirected edges (root must be vertex 0) plus a
    // branching rule per core leaf: the cycle of child counts along every
    // descending path below that leaf. Constant cycles give sector-regular
    // tails; a cycle entry must be >= 1. Core leaves with no rule are only
    // accepted with opts.allow_leaves.
    static std::shared_ptr<const RootedTree> explicit_tree(
        const std::vector<std::pair<VertexId, VertexId>>& edges,
        const std::map<VertexId, std::vector<long long>>& tail_rules, TreeOptions opts = {}) {
        return std::shared_ptr<const RootedTree>(new RootedTree(edges, tail_rules, opts));
    }

    // Regular tree where every vertex has exactly `degree` children.
    static std::shared_ptr<const RootedTree> uniform(long long degree, TreeOptions opts = {}) {
        return explicit_tree({}, {{0, {degree}}}, opts);
    }

    TreeKind kind() const noexcept { return kind_; }

    bool contains(VertexId v) const noexcept {
        switch (kind_) {
            case TreeKind::PathN0: return v >= 0;
            case TreeKind::ZLine: return true;
            case TreeKind::Explicit: return index_.count(v) > 0;
        }
        return false;
    }

    void require(VertexId v) const {
        if (!contains(v))
            throw ValidationError("vertex " + std::to_string(v) + " is not in the tree");
    }

    std::optional<VertexId> parent(VertexId v) const {
        require(v);
        if (v == root) return std::nullopt;
        switch (kind_) {
            case TreeKind::PathN0: return v - 1;
            case TreeKind::ZLine: return v > 0 ? v - 1 : v + 1;
            case TreeKind::Explicit: return rec(v).parent;
        }
        return std::nullopt;
    }

    // Children in ascending id order. Explicit trees throw TruncationError when
    // v sits on the materialization boundary and its children were not built.
    std::vector<VertexId> children(VertexId v) const {
        require(v);
        switch (kind_) {
            case TreeKind::PathN0: return {v + 1};
            case TreeKind::ZLine:
                if (v == 0) return {-1, 1};
                return {v > 0 ? v + 1 : v - 1};
            case TreeKind::Explicit: {
                const VertexRec& r = rec(v);
                if (!r.children_built)
                    throw TruncationError("children of vertex " + std::to_string(v) +
                                              " lie beyond the materialized depth",
                                          r.depth + 1);
                return r.children;
            }
        }
        return {};
    }

    // Branching degree gamma(v). Known for every materialized vertex even when
    // its children were not generated (the tail rule fixes the count).
    long long gamma(VertexId v) const {
        require(v);
        switch (kind_) {
            case TreeKind::PathN0: return 1;
            case TreeKind::ZLine: return v == 0 ? 2 : 1;
            case TreeKind::Explicit: return rec(v).gamma;
        }
        return 0;
    }

    long long depth(VertexId v) const {
        require(v);
        switch (kind_) {
            case TreeKind::PathN0: return v;
            case TreeKind::ZLine: return v < 0 ? -v : v;
            case TreeKind::Explicit: return rec(v).depth;
        }
        return 0;
    }

    // True if u lies on the path from the root to v (u == v included).
    bool is_ancestor_or_self(VertexId u, VertexId v) const {
        require(u);
        require(v);
        switch (kind_) {
            case TreeKind::PathN0: return u <= v;
            case TreeKind::ZLine:
                if (u == 0) return true;
                return (u > 0) == (v > 0) && std::abs(u) <= std::abs(v);
            case TreeKind::Explicit: {
                long long du = rec(u).depth;
                VertexId w = v;
                while (rec(w).depth > du) w = rec(w).parent;
                return w == u;
            }
        }
        return false;
    }

    // Geodesic distance in the tree metric.
    long long dist(VertexId u, VertexId v) const {
        require(u);
        require(v);
        switch (kind_) {
            case TreeKind::PathN0: return u > v ? u - v : v - u;
            case TreeKind::ZLine: {
                if ((u > 0 && v > 0) || (u < 0 && v < 0))
                    return std::abs(std::abs(u) - std::abs(v));
                return std::abs(u) + std::abs(v);
            }
            case TreeKind::Explicit: {
                VertexId a = u, b = v;
                long long da = rec(a).depth, db = rec(b).depth, d = 0;
                while (da > db) { a = rec(a).parent; --da; ++d; }
                while (db > da) { b = rec(b).parent; --db; ++d; }
                while (a != b) { a = rec(a).parent; b = rec(b).parent; d += 2; }
                return d;
            }
        }
        return 0;
    }

    VertexPath path_from_root(VertexId v) const {
        require(v);
        VertexPath p;
        VertexId w = v;
        while (true) {
            p.push_back(w);
            auto par = parent(w);
            if (!par) break;
            w = *par;
        }
        std::reverse(p.begin(), p.end());
        return p;
    }

    // Smallest N such that gamma is constant on every sector rooted at depth N.
    // nullopt when no such level exists (some branching cycle is non-constant).
    std::optional<long long> homogeneity_level() const {
        switch (kind_) {
            case TreeKind::PathN0: return 0;
            case TreeKind::ZLine: return 1;
            case TreeKind::Explicit: return homogeneity_;
        }
        return std::nullopt;
    }

    bool is_homogeneous_by_sectors() const { return homogeneity_level().has_value(); }

    // Lambda(T) = sup over non-root v of
    //   gamma(v) + gamma(v-) - 1 + |gamma(v) - 1| + |v| * |gamma(v) - gamma(v-)|.
    // nullopt means the sup is provably infinite (non-homogeneous presentation:
    // a non-constant cycle repeats gamma jumps at unbounded depths). The sup of
    // the empty set (single-vertex tree) is reported as 0.
    std::optional<long long> lambda() const {
        auto level = homogeneity_level();
        if (!level) return std::nullopt;
        long long scan = *level + 1;
        long long best = 0;
        for (VertexId v : vertices_to_depth(scan)) {
            if (v == root) continue;
            long long g = gamma(v);
            long long gp = gamma(*parent(v));
            long long term = g + gp - 1 + std::llabs(g - 1) + depth(v) * std::llabs(g - gp);
            best = std::max(best, term);
        }
        return best;
    }

    // Genuinely finite tree (no tail rules anywhere).
    bool finite() const {
        return kind_ == TreeKind::Explicit && !recs_[0].infinite_below;
    }

    // True if some descendant of v (v itself included) has depth >= d.
    bool reaches_depth(VertexId v, long long d) const {
        require(v);
        if (depth(v) >= d) return true;
        if (kind_ != TreeKind::Explicit) return true;  // unbounded rays
        const VertexRec& r = rec(v);
        return r.infinite_below || r.max_depth_below >= d;
    }

    // All vertices of depth <= d in breadth-first order.
    std::vector<VertexId> vertices_to_depth(long long d) const {
        std::vector<VertexId> out;
        if (d < 0) return out;
        switch (kind_) {
            case TreeKind::PathN0:
                for (VertexId v = 0; v <= d; ++v) out.push_back(v);
                return out;
            case TreeKind::ZLine:
                out.push_back(0);
                for (VertexId k = 1; k <= d; ++k) {
                    out.push_back(-k);
                    out.push_back(k);
                }
                return out;
            case TreeKind::Explicit: {
                if (!finite() && d > materialized_depth_)
                    throw TruncationError("vertex sweep past the materialized depth", d);
                for (VertexId v : bfs_order_) {
                    if (rec(v).depth > d) break;
                    out.push_back(v);
                }
                return out;
            }
        }
        return out;
    }

    long long materialized_depth() const { return materialized_depth_; }

    // First n vertices in breadth-first order (ties broken by id).
    std::vector<VertexId> first_vertices(std::size_t n) const {
        std::vector<VertexId> out;
        switch (kind_) {
            case TreeKind::PathN0:
                for (VertexId v = 0; v < static_cast<VertexId>(n); ++v) out.push_back(v);
                return out;
            case TreeKind::ZLine:
                for (VertexId k = 0; out.size() < n; ++k) {
                    if (k == 0) {
                        out.push_back(0);
                        continue;
                    }
                    out.push_back(-k);
                    if (out.size() < n) out.push_back(k);
                }
                return out;
            case TreeKind::Explicit: {
                if (n > bfs_order_.size()) {
                    if (!finite())
                        throw TruncationError("enumeration past the materialized region",
                                              static_cast<long long>(n));
                    n = bfs_order_.size();
                }
                out.assign(bfs_order_.begin(), bfs_order_.begin() + n);
                return out;
            }
        }
        return out;
    }

    // Presentation data (serialization, structural comparison).
    const std::vector<std::pair<VertexId, VertexId>>& core_edges() const { return core_edges_; }
    const std::map<VertexId, std::vector<long long>>& tail_rules() const { return tail_rules_; }

    friend bool structurally_equal(const RootedTree& a, const RootedTree& b) {
        return a.kind_ == b.kind_ && a.core_edges_ == b.core_edges_ &&
               a.tail_rules_ == b.tail_rules_;
    }

    friend bool same_tree(const std::shared_ptr<const RootedTree>& a,
                          const std::shared_ptr<const RootedTree>& b) {
        return a == b || structurally_equal(*a, *b);
    }

private:
    struct VertexRec {
        VertexId parent = -1;
        long long depth = 0;
        long long gamma = 0;
        std::vector<VertexId> children;
        bool children_built = false;
        bool infinite_below = false;
        long long max_depth_below = 0;
        // tail bookkeeping: which cycle drives this vertex's branching
        const std::vector<long long>* cycle = nullptr;
        std::size_t phase = 0;
    };

    explicit RootedTree(TreeKind k) : kind_(k) {}

    RootedTree(const std::vector<std::pair<VertexId, VertexId>>& edges,
               const std::map<VertexId, std::vector<long long>>& tail_rules, TreeOptions opts)
        : kind_(TreeKind::Explicit), core_edges_(edges), tail_rules_(tail_rules) {
        build_core(edges, opts);
        validate_tails(tail_rules, opts);
        materialize(opts);
        finish_structure();
    }

    const VertexRec& rec(VertexId v) const { return recs_[index_.at(v)]; }
    VertexRec& rec(VertexId v) { return recs_[index_.at(v)]; }

    void build_core(const std::vector<std::pair<VertexId, VertexId>>& edges, const TreeOptions& opts) {
        std::map<VertexId, std::vector<VertexId>> adj;
        std::set<VertexId> verts;
        verts.insert(root);
        for (auto [u, v] : edges) {
            if (u == v) throw ValidationError("self-loop at vertex " + std::to_string(u));
            adj[u].push_back(v);
            adj[v].push_back(u);
            verts.insert(u);
            verts.insert(v);
        }
        if (verts.size() != edges.size() + 1)
            throw ValidationError("edges do not form a tree (vertex/edge count mismatch)");
        if (verts.size() > opts.max_vertices)
            throw ValidationError("core exceeds the vertex budget");

        // BFS orientation from the root; also fixes breadth-first ids order.
        std::map<VertexId, bool> seen;
        seen[root] = true;
        std::vector<VertexId> frontier{root};
        add_vertex(root, -1, 0);
        while (!frontier.empty()) {
            std::vector<VertexId> next;
            for (VertexId u : frontier) {
                auto it = adj.find(u);
                if (it == adj.end()) continue;
                std::vector<VertexId> kids;
                for (VertexId w : it->second)
                    if (!seen[w]) kids.push_back(w);
                std::sort(kids.begin(), kids.end());
                for (VertexId w : kids) {
                    seen[w] = true;
                    add_vertex(w, u, rec(u).depth + 1);
                    rec(u).children.push_back(w);
                    next.push_back(w);
                }
            }
            frontier = std::move(next);
        }
        if (index_.size() != verts.size())
            throw ValidationError("edges are not connected to the root");
        core_size_ = recs_.size();
        core_depth_ = 0;
        for (const auto& r : recs_) core_depth_ = std::max(core_depth_, r.depth);
    }

    void validate_tails(const std::map<VertexId, std::vector<long long>>& tail_rules,
                        const TreeOptions& opts) {
        for (const auto& [v, cycle] : tail_rules) {
            if (!contains(v))
                throw ValidationError("tail rule on unknown vertex " + std::to_string(v));
            if (!rec(v).children.empty())
                throw ValidationError("tail rule on non-leaf core vertex " + std::to_string(v));
            if (cycle.empty())
                throw ValidationError("empty tail cycle at vertex " + std::to_string(v));
            for (long long d : cycle)
                if (d < 1)
                    throw ValidationError("tail degree < 1 at vertex " + std::to_string(v));
        }
        for (std::size_t i = 0; i < core_size_; ++i) {
            if (!recs_[i].children.empty()) continue;
            VertexId v = bfs_order_[i];
            if (tail_rules.count(v)) continue;
            if (!opts.allow_leaves)
                throw ValidationError("vertex " + std::to_string(v) +
                                      " is a leaf without a tail rule; degree-1 non-root "
                                      "vertices are rejected (set allow_leaves for finite trees)");
        }
    }

    void materialize(const TreeOptions& opts) {
        // Depth cap: always reach two levels past the core so sector structure
        // (homogeneity level, Lambda scan) is decidable from the materialization.
        long long cap = std::max(opts.max_depth, core_depth_ + 2);

        // gamma and cycle wiring for core vertices.
        for (std::size_t i = 0; i < core_size_; ++i) {
            VertexId v = bfs_order_[i];
            auto it = tail_rules_.find(v);
            if (it != tail_rules_.end()) {
                recs_[i].cycle = &it->second;
                recs_[i].phase = 0;
                recs_[i].gamma = it->second[0];
            } else {
                recs_[i].gamma = static_cast<long long>(recs_[i].children.size());
                recs_[i].children_built = true;  // core children are the given ones
            }
        }

        VertexId next_id = 0;
        for (VertexId v : bfs_order_) next_id = std::max(next_id, v);
        ++next_id;

        // Depth-ordered expansion of tails (core leaves may sit at different
        // depths, so a plain FIFO would not be level-ordered). Budget overflow
        // freezes the cap at the current depth; deeper half-built levels are
        // excluded from materialized_depth_ below.
        using Item = std::pair<long long, VertexId>;  // (depth, id)
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> work;
        for (std::size_t i = 0; i < core_size_; ++i)
            if (recs_[i].cycle) work.emplace(recs_[i].depth, bfs_order_[i]);

        while (!work.empty()) {
            auto [d, v] = work.top();
            work.pop();
            if (d >= cap) continue;
            std::size_t idx = index_.at(v);
            std::size_t want = static_cast<std::size_t>(recs_[idx].gamma);
            if (recs_.size() + want > opts.max_vertices) {
                cap = d;
                continue;
            }
            const auto& cycle = *recs_[idx].cycle;
            std::size_t child_phase = (recs_[idx].phase + 1) % cycle.size();
            for (std::size_t c = 0; c < want; ++c) {
                VertexId id = next_id++;
                add_vertex(id, v, d + 1);
                VertexRec& r = recs_.back();
                r.cycle = recs_[idx].cycle;
                r.phase = child_phase;
                r.gamma = cycle[child_phase];
                recs_[idx].children.push_back(id);
                work.emplace(d + 1, id);
            }
            recs_[idx].children_built = true;
        }
    }

    void finish_structure() {
        // Deepest level guaranteed complete: one above the shallowest
        // unexpanded tail vertex, or the full depth for finite trees.
        bool any_unbuilt = false;
        long long min_unbuilt = 0, max_depth = 0;
        for (const auto& r : recs_) {
            max_depth = std::max(max_depth, r.depth);
            if (r.cycle && !r.children_built) {
                min_unbuilt = any_unbuilt ? std::min(min_unbuilt, r.depth) : r.depth;
                any_unbuilt = true;
            }
        }
        materialized_depth_ = any_unbuilt ? min_unbuilt : max_depth;

        // Canonical enumeration: by depth, ties by id.
        std::sort(bfs_order_.begin(), bfs_order_.end(), [this](VertexId a, VertexId b) {
            const VertexRec &ra = recs_[index_.at(a)], &rb = recs_[index_.at(b)];
            return ra.depth != rb.depth ? ra.depth < rb.depth : a < b;
        });
        // children-before-parents pass: reachable depth and finiteness.
        for (std::size_t i = recs_.size(); i-- > 0;) {
            VertexRec& r = recs_[i];
            r.max_depth_below = r.depth;
            if (r.cycle && !r.children_built) r.infinite_below = true;
            for (VertexId c : r.children) {
                const VertexRec& rc = rec(c);
                r.infinite_below = r.infinite_below || rc.infinite_below;
                r.max_depth_below = std::max(r.max_depth_below, rc.max_depth_below);
            }
            if (r.cycle) r.infinite_below = true;  // cycles have degree >= 1 forever
        }

        // Homogeneity: any non-constant cycle repeats a gamma jump at unbounded
        // depths, so no sector level works. Otherwise find, bottom-up, which
        // sectors already have constant gamma; the level is one past the
        // deepest vertex whose sector is not constant.
        for (const auto& [v, cycle] : tail_rules_) {
            (void)v;
            for (long long d : cycle)
                if (d != cycle[0]) {
                    homogeneity_ = std::nullopt;
                    return;
                }
        }
        std::vector<std::optional<long long>> sector_const(recs_.size());
        long long worst = -1;  // depth of deepest non-constant sector
        for (std::size_t i = recs_.size(); i-- > 0;) {
            const VertexRec& r = recs_[i];
            if (r.cycle) {
                sector_const[i] = r.cycle->front();  // constant cycle by now
                continue;
            }
            std::optional<long long> value = r.gamma;
            for (VertexId c : r.children) {
                auto& sc = sector_const[index_.at(c)];
                if (!sc || *sc != r.gamma) { value = std::nullopt; break; }
            }
            sector_const[i] = value;
            if (!value) worst = std::max(worst, r.depth);
        }
        homogeneity_ = worst + 1;
    }

    void add_vertex(VertexId id, VertexId parent, long long depth) {
        if (index_.count(id))
            throw ValidationError("duplicate vertex id " + std::to_string(id));
        index_[id] = recs_.size();
        VertexRec r;
        r.parent = parent;
        r.depth = depth;
        recs_.push_back(std::move(r));
        bfs_order_.push_back(id);
    }

    TreeKind kind_;
    std::vector<std::pair<VertexId, VertexId>> core_edges_;
    std::map<VertexId, std::vector<long long>> tail_rules_;
    std::map<VertexId, std::size_t> index_;
    std::vector<VertexRec> recs_;
    std::vector<VertexId> bfs_order_;  // construction order == BFS order
    std::size_t core_size_ = 0;
    long long core_depth_ = 0;
    long long materialized_depth_ = 0;
    std::optional<long long> homogeneity_ = 0;
};

using TreePtr = std::shared_ptr<const RootedTree>;

}  // namespace lipdyn
