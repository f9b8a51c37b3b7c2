#include <catch2/catch_amalgamated.hpp>

#include <lipdyn/lipdyn.hpp>

#include "support/generators.hpp"

using namespace lipdyn;

TEST_CASE("path over N0: parents, children, depth") {
    TreePtr t = RootedTree::path_n0();
    CHECK(t->kind() == TreeKind::PathN0);
    CHECK_FALSE(t->parent(0).has_value());
    CHECK(*t->parent(7) == 6);
    CHECK(t->children(3) == std::vector<VertexId>{4});
    CHECK(t->gamma(0) == 1);
    CHECK(t->depth(9) == 9);
    CHECK(t->dist(2, 11) == 9);
    CHECK(t->is_ancestor_or_self(4, 4));
    CHECK(t->is_ancestor_or_self(0, 5));
    CHECK_FALSE(t->is_ancestor_or_self(5, 4));
    CHECK(t->path_from_root(3) == VertexPath{0, 1, 2, 3});
    CHECK(t->homogeneity_level() == 0);
    CHECK(t->lambda() == 1);
    CHECK_THROWS_AS(t->require(-1), ValidationError);
}

TEST_CASE("two-sided line: two rays out of the root") {
    TreePtr t = RootedTree::z_line();
    CHECK(t->children(0) == std::vector<VertexId>({-1, 1}));
    CHECK(*t->parent(-3) == -2);
    CHECK(*t->parent(3) == 2);
    CHECK(t->gamma(0) == 2);
    CHECK(t->gamma(5) == 1);
    CHECK(t->depth(-4) == 4);
    CHECK(t->dist(-2, 3) == 5);
    CHECK(t->dist(2, 5) == 3);
    CHECK_FALSE(t->is_ancestor_or_self(-1, 2));
    CHECK(t->homogeneity_level() == 1);
    // gamma drops from 2 to 1 at depth 1, so Lambda picks up the jump there
    CHECK(t->lambda() == 2 + 1 - 1 + 0 + 1 * 1);
    CHECK(t->first_vertices(5) == std::vector<VertexId>({0, -1, 1, -2, 2}));
}

TEST_CASE("explicit trees: construction and validation") {
    // core: 0 -> {1, 2}, 2 -> 3; vertex 1 grows a unary tail, 3 alternates 1, 2
    TreePtr t = RootedTree::explicit_tree({{0, 1}, {0, 2}, {2, 3}},
                                          {{1, {1}}, {3, {1, 2}}}, {});
    CHECK(t->gamma(0) == 2);
    CHECK(t->gamma(1) == 1);
    CHECK(*t->parent(3) == 2);
    CHECK(t->depth(3) == 2);
    CHECK_FALSE(t->finite());

    SECTION("cycles are rejected") {
        CHECK_THROWS_AS(RootedTree::explicit_tree({{0, 1}, {1, 2}, {2, 1}}, {}, {}),
                        ValidationError);
    }
    SECTION("disconnected vertices are rejected") {
        CHECK_THROWS_AS(RootedTree::explicit_tree({{5, 6}}, {}, {}), ValidationError);
    }
    SECTION("leaves need a growth rule unless the tree opts into finiteness") {
        CHECK_THROWS_AS(RootedTree::explicit_tree({{0, 1}}, {}, {}), ValidationError);
        TreeOptions opts;
        opts.allow_leaves = true;
        TreePtr fin = RootedTree::explicit_tree({{0, 1}}, {}, opts);
        CHECK(fin->finite());
        CHECK(fin->gamma(1) == 0);
    }
}

TEST_CASE("uniform trees are homogeneous at the root") {
    TreePtr b = RootedTree::uniform(2);
    CHECK(b->gamma(0) == 2);
    CHECK(b->homogeneity_level() == 0);
    // every non-root vertex: 2 + 2 - 1 + 1 + 0
    CHECK(b->lambda() == 4);
    CHECK(b->vertices_to_depth(2).size() == 7);

    TreePtr u = RootedTree::uniform(3);
    CHECK(u->lambda() == 3 + 3 - 1 + 2);
}

TEST_CASE("alternating growth rule is not homogeneous") {
    TreePtr t = RootedTree::explicit_tree({}, {{0, {1, 2}}}, {});
    CHECK_FALSE(t->is_homogeneous_by_sectors());
    CHECK_FALSE(t->lambda().has_value());
}

TEST_CASE("finite trees settle homogeneity at the deepest leaf mismatch") {
    TreeOptions opts;
    opts.allow_leaves = true;
    // path of length 2 plus a fork: gamma goes 2, 1, 0 down one branch
    TreePtr t = RootedTree::explicit_tree({{0, 1}, {0, 2}, {1, 3}}, {}, opts);
    REQUIRE(t->is_homogeneous_by_sectors());
    auto norm = shift_norm(t);
    REQUIRE(norm.has_value());
    // independent scan of the norm terms over the whole (finite) tree
    long long lam = 0;
    for (VertexId v : t->vertices_to_depth(5)) {
        if (v == RootedTree::root) continue;
        long long g = t->gamma(v), gp = t->gamma(*t->parent(v));
        lam = std::max(lam, g + gp - 1 + std::llabs(g - 1) + t->depth(v) * std::llabs(g - gp));
    }
    CHECK(*norm == std::max(2 * t->gamma(0), lam));
}

TEST_CASE("first_vertices matches breadth-first order") {
    TreePtr p = RootedTree::path_n0();
    CHECK(p->first_vertices(4) == std::vector<VertexId>({0, 1, 2, 3}));

    TreePtr t = RootedTree::explicit_tree({{0, 1}, {0, 2}, {2, 3}},
                                          {{1, {1}}, {3, {1}}}, {});
    auto fv = t->first_vertices(4);
    REQUIRE(fv.size() == 4);
    CHECK(fv[0] == 0);
    CHECK(t->depth(fv[1]) == 1);
    CHECK(t->depth(fv[2]) == 1);
    CHECK(t->depth(fv[3]) == 2);
}

TEST_CASE("structural equality identifies separately built trees") {
    TreePtr a = RootedTree::explicit_tree({{0, 1}}, {{1, {2}}}, {});
    TreePtr b = RootedTree::explicit_tree({{0, 1}}, {{1, {2}}}, {});
    TreePtr c = RootedTree::explicit_tree({{0, 1}}, {{1, {3}}}, {});
    CHECK(same_tree(a, b));
    CHECK_FALSE(same_tree(a, c));
    CHECK(same_tree(RootedTree::path_n0(), RootedTree::path_n0()));
    CHECK_FALSE(same_tree(RootedTree::path_n0(), RootedTree::z_line()));
}

TEST_CASE("random finite trees satisfy basic invariants") {
    auto rng = lipdyn::testgen::make_rng(101);
    for (int i = 0; i < 20; ++i) {
        TreePtr t = lipdyn::testgen::rand_finite_tree(rng);
        REQUIRE(t->finite());
        for (VertexId v : t->vertices_to_depth(6)) {
            if (v == RootedTree::root) continue;
            VertexId p = *t->parent(v);
            CHECK(t->depth(v) == t->depth(p) + 1);
            auto kids = t->children(p);
            CHECK(std::count(kids.begin(), kids.end(), v) == 1);
        }
    }
}

TEST_CASE("random homogeneous trees report a finite level") {
    auto rng = lipdyn::testgen::make_rng(102);
    for (int i = 0; i < 20; ++i) {
        TreePtr t = lipdyn::testgen::rand_homogeneous_tree(rng);
        REQUIRE(t->is_homogeneous_by_sectors());
        long long level = *t->homogeneity_level();
        // gamma is constant from the level on, along every branch
        for (VertexId v : t->vertices_to_depth(level + 3))
            if (t->depth(v) > level) CHECK(t->gamma(v) == t->gamma(*t->parent(v)));
    }
}
