#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include <lipdyn/lipdyn.hpp>

#include "support/generators.hpp"

using namespace lipdyn;
using K = RationalComplex;
using T = scalar_traits<K>;
namespace gen = lipdyn::testgen;

namespace {

SymbolPhi doubling() { return SymbolPhi::path_symbol({}, AffineTail{0, 2, 1}, true); }
SymbolPhi successor() { return SymbolPhi::path_symbol({}, AffineTail{0, 1, 1}, true); }

}  // namespace

TEST_CASE("scalars: exact values travel as integers or p/q strings") {
    CHECK(scalar_from_json<K>(json("3/4"), "x") == T::from_rational(Rational(3, 4)));
    CHECK(scalar_from_json<K>(json(-5), "x") == T::from_int(-5));
    CHECK(scalar_from_json<K>(json::array({1, "1/2"}), "x") == K(Rational(1), Rational(1, 2)));
    CHECK_THROWS_AS(scalar_from_json<K>(json(0.5), "x"), ValidationError);
    CHECK_THROWS_AS(scalar_from_json<K>(json::array({1, 2, 3}), "x"), ValidationError);

    // floating mode accepts plain numbers
    CHECK(scalar_from_json<FloatComplex>(json(0.5), "x") == FloatComplex(0.5, 0.0));

    CHECK(scalar_to_json(T::from_int(7)) == json(7));
    CHECK(scalar_to_json(T::from_rational(Rational(1, 2))) == json("1/2"));
    CHECK(scalar_to_json(K(Rational(0), Rational(1))) == json::array({0, 1}));
}

TEST_CASE("trees round trip through JSON") {
    CHECK(same_tree(tree_from_json(json{{"kind", "path_n0"}}), RootedTree::path_n0()));
    CHECK(same_tree(tree_from_json(json{{"kind", "z_line"}}), RootedTree::z_line()));

    TreePtr t = RootedTree::explicit_tree({{0, 1}, {0, 2}, {1, 3}}, {{2, {2}}, {3, {1, 2}}},
                                          TreeOptions{});
    json j = tree_to_json(t);
    CHECK(j["kind"] == "explicit");
    CHECK(j["root"] == 0);
    CHECK(same_tree(tree_from_json(j), t));

    CHECK_THROWS_AS(tree_from_json(json{{"kind", "path_n0"}, {"edges", json::array()}}),
                    ValidationError);
    CHECK_THROWS_AS(tree_from_json(json{{"kind", "ladder"}}), ValidationError);
    CHECK_THROWS_AS(tree_from_json(json{{"kind", "explicit"}}), ValidationError);
    CHECK_THROWS_AS(tree_from_json(json{{"kind", "path_n0"}, {"typo", 1}}), ValidationError);
}

TEST_CASE("finite explicit presentations infer their leaves") {
    json j{{"kind", "explicit"},
           {"root", 0},
           {"edges", json::array({json::array({0, 1}), json::array({0, 2})})}};
    TreePtr t = tree_from_json(j);
    CHECK(t->finite());
    CHECK(t->children(1).empty());
}

TEST_CASE("path symbols round trip with their affine tail") {
    SymbolPhi phi = SymbolPhi::path_symbol({{0, 2}, {1, 5}}, AffineTail{2, 3, 1}, true);
    json j = symbol_phi_to_json(phi);
    CHECK(j["affine_tail"]["a"] == 3);
    CHECK(j["increasing"] == true);
    SymbolPhi back = symbol_phi_from_json(RootedTree::path_n0(), j);
    CHECK(back.table() == phi.table());
    CHECK(back.pos_tail() == phi.pos_tail());
    CHECK(back.increasing());

    CHECK_THROWS_AS(symbol_phi_from_json(RootedTree::path_n0(), json{{"tail", json::object()}}),
                    ValidationError);
    CHECK_THROWS_AS(
        symbol_phi_from_json(RootedTree::path_n0(),
                             json{{"pos_tail", affine_tail_to_json(AffineTail{0, 1, 1})}}),
        ValidationError);
}

TEST_CASE("two-sided symbols carry both tails") {
    auto rng = gen::make_rng(0x21a);
    SymbolPhi phi = gen::rand_zline_symbol(rng);
    json j = symbol_phi_to_json(phi);
    SymbolPhi back = symbol_phi_from_json(RootedTree::z_line(), j);
    CHECK(back.table() == phi.table());
    CHECK(back.pos_tail() == phi.pos_tail());
    CHECK(back.neg_tail() == phi.neg_tail());

    json bad = j;
    bad.erase("neg_tail");
    CHECK_THROWS_AS(symbol_phi_from_json(RootedTree::z_line(), bad), ValidationError);
    json wrong = j;
    wrong["affine_tail"] = wrong["pos_tail"];
    CHECK_THROWS_AS(symbol_phi_from_json(RootedTree::z_line(), wrong), ValidationError);
}

TEST_CASE("explicit-tree symbols are plain tables") {
    TreePtr t = RootedTree::explicit_tree({{0, 1}, {0, 2}}, {},
                                          TreeOptions{.allow_leaves = true});
    SymbolPhi phi = SymbolPhi::table_symbol(t, {{0, 1}, {1, 0}, {2, 2}});
    json j = symbol_phi_to_json(phi);
    SymbolPhi back = symbol_phi_from_json(t, j);
    CHECK(back.table() == phi.table());
    json bad = j;
    bad["increasing"] = true;
    CHECK_THROWS_AS(symbol_phi_from_json(t, bad), ValidationError);
}

TEST_CASE("weight symbols round trip core and drift") {
    TreePtr t = RootedTree::path_n0();
    SymbolPsi<K> psi(t, {{0, T::from_int(2)}, {1, K(Rational(1), Rational(-1, 3))}},
                     T::from_int(1));
    json j = symbol_psi_to_json(psi);
    SymbolPsi<K> back = symbol_psi_from_json<K>(t, j);
    CHECK(back.core() == psi.core());
    CHECK(back.drift() == psi.drift());

    SymbolPsi<K> flat(t, {{0, T::one()}});
    CHECK_FALSE(symbol_psi_to_json(flat).contains("drift"));
    CHECK_THROWS_AS(symbol_psi_from_json<K>(t, json{{"values", json::object()}}),
                    ValidationError);
}

TEST_CASE("coordinate vectors round trip") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto rng = gen::make_rng(0x77ec + s);
        TreePtr t = s % 2 ? RootedTree::z_line() : RootedTree::path_n0();
        SeqVec<K> x = gen::rand_seqvec<K>(rng, t);
        CHECK(seqvec_from_json<K>(t, seqvec_to_json(x)) == x);
    }
    CHECK_THROWS_AS(seqvec_from_json<K>(RootedTree::path_n0(), json{{"abc", 1}}),
                    ValidationError);
    CHECK_THROWS_AS(seqvec_from_json<K>(RootedTree::path_n0(), json::array()),
                    ValidationError);
}

TEST_CASE("functions round trip with a recomputed boundary") {
    TreePtr t = RootedTree::path_n0();
    SeqVec<K> x(t);
    x.set(0, T::from_int(2));
    x.set(2, T::from_rational(Rational(-1, 2)));
    LipFunc<K> f = Dinv(x);
    json j = lipfunc_to_json(f);
    CHECK(j["boundary"].is_array());
    LipFunc<K> back = lipfunc_from_json<K>(t, j);
    CHECK(back == f);

    json bad = j;
    bad["boundary"] = json::array({99});
    CHECK_THROWS_AS(lipfunc_from_json<K>(t, bad), ValidationError);
    CHECK_THROWS_AS(lipfunc_from_json<K>(t, json{{"core", json::object()}, {"x", 1}}),
                    ValidationError);
}

TEST_CASE("matrix CSV shows the window patterns") {
    auto succ = matrix_truncate(comp_operator<K>(successor()), 4);
    CHECK(matrix_to_csv(succ) ==
          "1,1,0,0,0\n"
          "0,0,1,0,0\n"
          "0,0,0,1,0\n"
          "0,0,0,0,1\n");
    auto dbl = matrix_truncate(comp_operator<K>(doubling()), 4);
    CHECK(matrix_to_csv(dbl) ==
          "1,1,0,0,0,0,0,0\n"
          "0,0,1,1,0,0,0,0\n"
          "0,0,0,0,1,1,0,0\n"
          "0,0,0,0,0,0,1,1\n");
}

TEST_CASE("matrix JSON labels entries by vertex id") {
    auto block = matrix_truncate_rows(comp_operator<K>(doubling()), {0, 5});
    json j = matrix_to_json(block);
    CHECK(j["rows"] == json::array({0, 5}));
    bool saw_10 = false, saw_11 = false;
    for (const json& e : j["entries"]) {
        REQUIRE(e.size() == 3);
        if (e[0] == 5 && e[1] == 10 && e[2] == 1) saw_10 = true;
        if (e[0] == 5 && e[1] == 11 && e[2] == 1) saw_11 = true;
    }
    CHECK(saw_10);
    CHECK(saw_11);
}

TEST_CASE("classification reports carry verdict, witnesses and certificate") {
    json fhc = classification_to_json(classify_hypercyclic(doubling(), 4, 8));
    CHECK(fhc["verdict"] == "frequently-hypercyclic");
    CHECK(fhc["witnesses"]["1"] == 1);
    CHECK(fhc["certificate"]["tail_slope"] == 2);
    CHECK(fhc["certificate"]["reason"].is_string());
    CHECK(fhc["certificate"]["entry_gaps"].is_array());

    json noth = classification_to_json(classify_hypercyclic(successor(), 4, 8));
    CHECK(noth["verdict"] == "not-hypercyclic");
    CHECK(noth["certificate"]["pinned_at"] == 1);
    CHECK(noth["witnesses"].empty());
}

TEST_CASE("right-inverse witness reports expose windows and bounds") {
    FhcSeries s = fhc_series_B(doubling(), 1, 5);
    SeqVec<K> sample = SeqVec<K>::basis_e(RootedTree::path_n0(), 1) -
                       SeqVec<K>::basis_e(RootedTree::path_n0(), 2);
    AnnihilationReport ann = fhc_check_annihilation(doubling(), sample);
    json j = fhc_witness_to_json(s, ann);
    CHECK(j["N0"] == ann.n0);
    CHECK(j["annihilates"] == true);
    CHECK(j["windows"].size() == 5);
    CHECK(j["series"][0]["n"] == 1);
    CHECK(j["series"][0]["support"] == json::array({2, 3}));
    CHECK(j["series"][0]["norm"] == "1/2");
    CHECK(j["all_verified"] == true);

    json plain = series_to_json(s);
    CHECK(plain["terms"].size() == 5);
    CHECK(plain["start"] == 1);
}

TEST_CASE("spectral and oracle reports serialize their fields") {
    json spec = spectral_to_json(spectral_radius_estimate(doubling(), 3));
    REQUIRE(spec.size() == 3);
    CHECK(spec[2]["power_norm"] == 8);
    CHECK(spec[2]["exact_root"] == 2);

    json rep = oracle_report_to_json(oracle_comp_norm<K>(doubling()));
    CHECK(rep["agree"] == true);
    CHECK(rep["formula"] == "2");
    CHECK(rep["oracle"] == "2");
}

TEST_CASE("orbit CSV starts with its header") {
    auto rec = orbit_simulate(doubling(), SeqVec<K>::basis_e(RootedTree::path_n0(), 0), 3,
                              T::one());
    std::string csv = orbit_to_csv(rec);
    CHECK(csv.substr(0, 14) == "step,sup_norm\n");
    CHECK(csv.find("0,1\n") != std::string::npos);
}

TEST_CASE("file IO round trips and fails loudly") {
    std::string path = "serialize_roundtrip.json";
    write_text_file(path, seqvec_to_json(SeqVec<K>::basis_e(RootedTree::path_n0(), 2)).dump());
    json j = read_json_file(path);
    CHECK(j["2"] == 1);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_json_file("does_not_exist_here.json"), IoError);
    write_text_file(path, "{broken");
    CHECK_THROWS_AS(read_json_file(path), IoError);
    std::remove(path.c_str());
}
