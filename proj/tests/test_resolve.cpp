#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cohom/resolve.hpp"
#include "test_util.hpp"

using namespace resolve;
using exactlin::AbelianInvariants;
using exactlin::Int;
using grouppack::make_cyclic;
using grouppack::make_P;
using testutil::coho_dim_Fp;
using testutil::coho_invariants_Z;

TEST_CASE("periodic resolution of a cyclic group") {
    auto r = cyclic_resolution(3, 7);
    CHECK(r->ranks == std::vector<std::size_t>(8, 1));

    // coefficient differentials alternate 0, x3
    for (std::size_t n = 0; n + 1 <= 6; ++n) {
        auto m = r->cochain_matrix(n);
        CHECK(m.get(0, 0) == (n % 2 == 0 ? 0 : 3));
    }

    // Z, 0, C3, 0, C3, 0 in degrees 0..5
    CHECK(coho_invariants_Z(*r, 0) == AbelianInvariants{1, {}});
    for (std::size_t d = 1; d <= 5; ++d) {
        auto inv = coho_invariants_Z(*r, d);
        if (d % 2 == 0)
            CHECK(inv == AbelianInvariants{0, {3}});
        else
            CHECK(inv == AbelianInvariants{0, {}});
    }
}

TEST_CASE("periodic resolution of the trivial group") {
    auto r = cyclic_resolution(1, 6);
    CHECK(coho_invariants_Z(*r, 0) == AbelianInvariants{1, {}});
    for (std::size_t d = 1; d <= 5; ++d)
        CHECK(coho_invariants_Z(*r, d) == AbelianInvariants{0, {}});
}

TEST_CASE("cutoff zero keeps only the augmentation") {
    auto r = cyclic_resolution(3, 0);
    CHECK(r->cutoff == 0);
    CHECK(r->rank(0) == 1);
    CHECK(r->aug_value(r->unit) == 1);
}

TEST_CASE("tensor resolution of two periodic resolutions") {
    auto r = tensor_resolution(cyclic_resolution(3, 9), cyclic_resolution(3, 9));
    for (std::size_t n = 0; n <= 9; ++n) CHECK(r->rank(n) == n + 1);

    // full invariant suite on the whole Z-basis
    r->validate();

    // Kunneth count: dim H^d(C3 x C3; F3) = d + 1
    for (std::size_t d = 0; d <= 8; ++d) CHECK(coho_dim_Fp(*r, d, 3) == d + 1);

    CHECK(coho_invariants_Z(*r, 3) == AbelianInvariants{0, {3}});
    CHECK(coho_invariants_Z(*r, 2) == AbelianInvariants{0, {3, 3}});
    CHECK(coho_invariants_Z(*r, 0) == AbelianInvariants{1, {}});

    CHECK_THROWS(tensor_resolution(cyclic_resolution(3, 3), cyclic_resolution(3, 4)));
}

TEST_CASE("twisted resolution of P(3,3)") {
    auto pieces = testutil::build_P_pieces(3, 3, 6);
    const auto& r = *pieces.res;

    // the twist preserves the tensor ranks: C(d+2, 2)
    for (std::size_t n = 0; n <= 6; ++n)
        CHECK(r.rank(n) == (n + 1) * (n + 2) / 2);

    CHECK(coho_dim_Fp(r, 1, 3) == 2);
    CHECK(coho_invariants_Z(r, 0) == AbelianInvariants{1, {}});
    CHECK(coho_invariants_Z(r, 1) == AbelianInvariants{0, {}});
    CHECK(coho_invariants_Z(r, 2) == AbelianInvariants{0, {3, 3}});
}

TEST_CASE("twisted resolution of P(3,4)") {
    auto pieces = testutil::build_P_pieces(3, 4, 4);
    CHECK(coho_dim_Fp(*pieces.res, 1, 3) == 3);
    CHECK(coho_invariants_Z(*pieces.res, 2) == AbelianInvariants{0, {3, 3, 3}});
}

TEST_CASE("twisted resolution of the metacyclic companion") {
    // M(3,3) along its cyclic maximal subgroup, quotient of order 3
    auto g = grouppack::make_M(3, 3);
    auto nabs = make_cyclic(9);
    auto rn = cyclic_resolution(nabs, 5);
    auto qg = make_cyclic(3);
    auto rq = cyclic_resolution(qg, 5);
    auto inc = grouppack::make_hom(nabs, g, {g->gen(1)});
    auto proj = grouppack::make_hom(g, qg, {qg->gen(0), qg->identity()});
    auto r = perturbed_resolution(rq, rn, inc, proj);
    CHECK(r->rank(4) == 5);
    // abelianization C3 x C3
    CHECK(coho_invariants_Z(*r, 2) == AbelianInvariants{0, {3, 3}});
    CHECK(coho_invariants_Z(*r, 1) == AbelianInvariants{0, {}});
}

TEST_CASE("bar resolution cross-checks the periodic one") {
    auto bar = bar_resolution(make_cyclic(3), 7);
    auto per = cyclic_resolution(3, 7);
    for (std::size_t d = 0; d <= 6; ++d)
        CHECK(coho_invariants_Z(*bar, d) == coho_invariants_Z(*per, d));
}

TEST_CASE("bar resolution of P(3,3) at low degree") {
    auto g = make_P(3, 3);
    auto bar = bar_resolution(g, 3);
    CHECK(bar->rank(3) == 26 * 26 * 26);
    CHECK(coho_invariants_Z(*bar, 0) == AbelianInvariants{1, {}});
    CHECK(coho_invariants_Z(*bar, 1) == AbelianInvariants{0, {}});
    CHECK(coho_invariants_Z(*bar, 2) == AbelianInvariants{0, {3, 3}});
}

TEST_CASE("bar resolution budget guard") {
    CHECK_THROWS(bar_resolution(make_P(3, 3), 4));
    CHECK_THROWS(bar_resolution(make_cyclic(9), 7));
}

TEST_CASE("chain map lifting along the identity") {
    auto r = cyclic_resolution(3, 6);
    auto cm = lift_chain_map(grouppack::identity_hom(r->group), r, r);
    // identity lift acts as the identity on every basis element
    for (std::size_t n = 0; n <= 6; ++n) {
        auto m = cm.collapsed(n);
        CHECK(m.get(0, 0) == 1);
    }
}

TEST_CASE("two lifts of the same map agree on cohomology") {
    auto r = cyclic_resolution(9, 6);
    auto id = grouppack::identity_hom(r->group);
    auto lift1 = lift_chain_map(id, r, r);
    ModuleVec tweak = ModuleVec::basis(r->group->gen(0), 0);
    auto lift2 = lift_chain_map(id, r, r, &tweak);

    bool differ = false;
    for (std::size_t n = 0; n <= 6 && !differ; ++n)
        if (!(lift1.blocks[n] == lift2.blocks[n])) differ = true;
    CHECK(differ);

    // induced maps on cochains agree modulo coboundaries: here cochain ranks
    // are 1 and the collapsed matrices must agree on cocycles; degree-d
    // cocycles are killed or preserved identically
    for (std::size_t d = 0; d <= 5; ++d) {
        auto m1 = lift1.collapsed(d), m2 = lift2.collapsed(d);
        // difference must be a coboundary-inducing matrix: for rank-1 cochain
        // complexes the cocycle spaces are 0 or everything, so check directly
        // on the cohomology invariants by composing with the solver downstream.
        // At this level, the collapse difference composed with any cocycle must
        // be a coboundary; with rank 1 and alternating differentials that means
        // equality in even degrees.
        if (d % 2 == 0) CHECK(m1.get(0, 0) == m2.get(0, 0));
    }
}

TEST_CASE("diagonal approximation has the counit property") {
    auto pieces = testutil::build_P_pieces(3, 3, 4);
    auto r = pieces.res;
    auto diag = diagonal_map(r, 4);
    const auto& sq = *diag.square;

    for (std::size_t n = 0; n <= 4; ++n) {
        for (std::uint32_t bidx = 0; bidx < r->rank(n); ++bidx) {
            const ModuleVec& img = diag.map.blocks[n][bidx];
            ModuleVec left_counit, right_counit;
            for (const auto& [key, c] : img.terms()) {
                auto [i, a, b] = sq.layout.decode(n, zkey_idx(key));
                auto [g1, g2] = sq.group->pair_decode(zkey_elem(key));
                if (i == 0) {
                    Int ev = r->aug_value(static_cast<std::uint32_t>(a));
                    left_counit.add(g2, static_cast<std::uint32_t>(b), c * ev);
                }
                if (i == n) {
                    Int ev = r->aug_value(static_cast<std::uint32_t>(b));
                    right_counit.add(g1, static_cast<std::uint32_t>(a), c * ev);
                }
            }
            CHECK(left_counit == ModuleVec::basis(r->group->identity(), bidx));
            CHECK(right_counit == ModuleVec::basis(r->group->identity(), bidx));
        }
    }
}

TEST_CASE("transfer matrices start from the index") {
    auto pieces = testutil::build_P_pieces(3, 3, 3);
    auto g = pieces.group;
    // subgroup <B, C> = C3 x C3 inside P(3,3)
    auto rsub = tensor_resolution(cyclic_resolution(3, 3), cyclic_resolution(3, 3));
    auto sub = rsub->group;
    auto inc = grouppack::make_hom(
        sub, g,
        {g->gen(1), g->gen(2)});
    auto td = build_transfer(inc, pieces.res, rsub);
    CHECK(td.coset_reps.size() == 3);
    // degree-0 transfer multiplies constants by the index
    CHECK(td.matrices[0].get(0, 0) == 3);
}

TEST_CASE("resolution dump is stable") {
    auto r = cyclic_resolution(2, 2);
    CHECK(r->dump() ==
          "rank 0 1\nrank 1 1\nrank 2 1\n"
          "1 0 0 : -1@0\n1 0 0 : 1@1\n2 0 0 : 1@0\n2 0 0 : 1@1\n");
}
