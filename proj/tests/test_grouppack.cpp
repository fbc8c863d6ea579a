#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cohom/grouppack.hpp"

using namespace grouppack;

namespace {

void check_group_consistency(const PGroupPtr& g, unsigned seed) {
    // every element has a two-sided inverse and the identity is neutral
    for (Elem a = 0; a < g->order(); ++a) {
        Elem ai = g->inv(a);
        CHECK(g->mul(a, ai) == g->identity());
        CHECK(g->mul(ai, a) == g->identity());
        CHECK(g->mul(a, g->identity()) == a);
        CHECK(g->mul(g->identity(), a) == a);
        CHECK(g->from_exponents(g->exponents(a)) == a);
    }
    // associativity on random triples
    std::mt19937 rng(seed);
    std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(g->order() - 1));
    for (int t = 0; t < 1000; ++t) {
        Elem a = pick(rng), b = pick(rng), c = pick(rng);
        CHECK(g->mul(g->mul(a, b), c) == g->mul(a, g->mul(b, c)));
    }
}

}  // namespace

TEST_CASE("P(p,n) groups have the right order and structure") {
    auto p33 = make_P(3, 3);
    CHECK(p33->order() == 27);
    CHECK(p33->derived_subgroup().size() == 3);
    CHECK_FALSE(p33->is_abelian());
    check_group_consistency(p33, 1);

    auto p34 = make_P(3, 4);
    CHECK(p34->order() == 81);
    CHECK(p34->center().size() == 9);
    CHECK(p34->derived_subgroup().size() == 3);
    check_group_consistency(p34, 2);

    CHECK(make_P(5, 3)->order() == 125);

    CHECK_THROWS(make_P(2, 3));
    CHECK_THROWS(make_P(9, 3));
    CHECK_THROWS(make_P(3, 2));
}

TEST_CASE("the centre of P(p,n) contains C and the basic commutator holds") {
    for (long n : {3L, 4L}) {
        auto g = make_P(3, n);
        Elem a = g->gen(0), b = g->gen(1), c = g->gen(2);
        // <C> is central
        for (Elem x : g->subgroup_closure({c})) {
            CHECK(g->mul(x, a) == g->mul(a, x));
            CHECK(g->mul(x, b) == g->mul(b, x));
        }
        // [A,B] = C^{p^{n-3}}
        long s = 1;
        for (long i = 0; i < n - 3; ++i) s *= 3;
        CHECK(g->commutator(a, b) == g->power(c, s));
        CHECK(g->element_order(c) == (n == 3 ? 3 : 9));
    }
}

TEST_CASE("normal forms multiply by collection") {
    auto g = make_P(3, 3);
    Elem a = g->gen(0), b = g->gen(1);
    // B * A collects to A B C^2
    CHECK(g->exponents(g->mul(b, a)) == std::vector<long>{1, 1, 2});
    // C commutes with A
    Elem c = g->gen(2);
    CHECK(g->mul(c, a) == g->mul(a, c));
    CHECK(g->mul(g->identity(), b) == b);
}

TEST_CASE("metacyclic companion groups") {
    auto m33 = make_M(3, 3);
    CHECK(m33->order() == 27);
    check_group_consistency(m33, 3);
    bool has_order9 = false;
    for (Elem x = 0; x < m33->order(); ++x)
        if (m33->element_order(x) == 9) has_order9 = true;
    CHECK(has_order9);
    CHECK(m33->center().size() == 3);
    CHECK_FALSE(m33->is_abelian());

    auto m34 = make_M(3, 4);
    CHECK(m34->order() == 81);
    // the cyclic subgroup generated by A has index p
    CHECK(m34->subgroup_closure({m34->gen(1)}).size() == 27);
    CHECK(m34->element_order(m34->gen(1)) == 27);
    CHECK(m34->center().size() == 9);
}

TEST_CASE("cyclic and elementary abelian constructors") {
    auto c9 = make_cyclic(9);
    CHECK(c9->order() == 9);
    CHECK(c9->is_abelian());
    CHECK(c9->exponent() == 9);

    auto e = make_elem_abelian(3, 2);
    CHECK(e->order() == 9);
    CHECK(e->exponent() == 3);
    check_group_consistency(e, 4);

    CHECK(make_cyclic(1)->order() == 1);
}

TEST_CASE("direct products multiply componentwise") {
    auto e = PGroup::product(make_cyclic(3), make_cyclic(9), "C3xC9");
    CHECK(e->order() == 27);
    CHECK(e->is_abelian());
    check_group_consistency(e, 5);
    Elem x = e->pair_encode(1, 5);
    auto [l, r] = e->pair_decode(x);
    CHECK(l == 1);
    CHECK(r == 5);
}

TEST_CASE("homomorphism validation accepts quotients and automorphisms") {
    auto g = make_P(3, 3);
    auto q = make_elem_abelian(3, 2);

    // quotient map A -> (1,0), B -> (0,1), C -> 0
    GroupHom proj = make_hom(g, q, {q->gen(0), q->gen(1), q->identity()});
    CHECK(proj.surjective());
    CHECK_FALSE(proj.injective());
    CHECK(proj.kernel().size() == 3);

    // A -> B, B -> A, C -> C^-1 is an automorphism: [B,A] = C^-1 holds
    Elem a = g->gen(0), b = g->gen(1), c = g->gen(2);
    CHECK(g->commutator(b, a) == g->inv(c));
    GroupHom theta = make_hom(g, g, {b, a, g->inv(c)});
    CHECK(theta.bijective());

    // A -> B, B -> A, C -> C violates the commutator relation
    CHECK_THROWS(make_hom(g, g, {b, a, c}));
}

TEST_CASE("homomorphisms compose and detect bijectivity") {
    auto g = make_P(3, 3);
    Elem a = g->gen(0), b = g->gen(1), c = g->gen(2);
    GroupHom theta = make_hom(g, g, {b, a, g->inv(c)});
    GroupHom sq = theta.compose(theta);
    for (Elem x = 0; x < g->order(); ++x) CHECK(sq(x) == x);

    // trivial kernel together with equal orders means bijective
    CHECK(theta.kernel().size() == 1);
    CHECK(theta.bijective());

    GroupHom id = identity_hom(g);
    for (std::size_t i = 0; i < g->num_gens(); ++i)
        CHECK(id.gen_images()[i] == g->gen(i));
}

TEST_CASE("group spec strings parse") {
    CHECK(parse_group_spec("P:p=3,n=3")->order() == 27);
    CHECK(parse_group_spec("M:p=3,n=4")->order() == 81);
    CHECK(parse_group_spec("C:9")->order() == 9);
    CHECK(parse_group_spec("E:p=3,rank=2")->order() == 9);
    CHECK_THROWS(parse_group_spec("X:1"));
    CHECK_THROWS(parse_group_spec("P:p=2,n=3"));
}

TEST_CASE("group ring arithmetic") {
    auto g = make_cyclic(3);
    Elem t = g->gen(0);

    GroupRingElem norm;  // 1 + t + t^2
    for (Elem x = 0; x < 3; ++x) norm.add_term(x, 1);
    GroupRingElem tm1;  // t - 1
    tm1.add_term(t, 1);
    tm1.add_term(g->identity(), -1);

    CHECK(norm.aug() == 3);
    CHECK(tm1.aug() == 0);
    CHECK(norm.mul(*g, tm1).empty());  // N * (t-1) = 0 in Z[C3]

    GroupRingElem shifted = norm.left_mul(*g, t);
    CHECK(shifted == norm);

    GRMatrix m(1, 2);
    m.set(0, 0, tm1);
    m.set(0, 1, norm);
    auto aug = m.augmented();
    CHECK(aug.get(0, 0) == 0);
    CHECK(aug.get(0, 1) == 3);
}
