#pragma once

// Shared test-side oracles: cohomology invariants computed straight from
// cochain matrices (independent of the cohomlab implementation), and plumbing
// to assemble the twisted resolution of P(p,n) from its parts.

#include "cohom/exactlin.hpp"
#include "cohom/grouppack.hpp"
#include "cohom/resolve.hpp"

namespace testutil {

using exactlin::AbelianInvariants;
using exactlin::Int;
using exactlin::IntMatrix;

inline AbelianInvariants coho_invariants_Z(const resolve::FreeResolution& r,
                                           std::size_t d) {
    IntMatrix out = r.cochain_matrix(d);  // rank_{d+1} x rank_d
    std::size_t zdim = out.cols() - exactlin::rank(out);
    AbelianInvariants inv;
    if (d == 0) {
        inv.free_rank = zdim;
        return inv;
    }
    IntMatrix in = r.cochain_matrix(d - 1);  // rank_d x rank_{d-1}
    std::size_t brank = 0;
    for (const Int& v : exactlin::smith_diagonal(in)) {
        if (v == 0) continue;
        ++brank;
        if (v > 1) inv.torsion.push_back(v);
    }
    inv.free_rank = zdim - brank;
    return inv;
}

inline std::size_t rank_mod_p(const IntMatrix& m, long p) {
    std::size_t r = 0;
    for (const Int& v : exactlin::smith_diagonal(m))
        if (v != 0 && v % p != 0) ++r;
    return r;
}

inline std::size_t coho_dim_Fp(const resolve::FreeResolution& r, std::size_t d,
                               long p) {
    IntMatrix out = r.cochain_matrix(d);
    std::size_t zdim = out.cols() - rank_mod_p(out, p);
    if (d == 0) return zdim;
    return zdim - rank_mod_p(r.cochain_matrix(d - 1), p);
}

/// The standard pieces behind the twisted resolution of P(p,n): the quotient
/// resolution (tensor of two periodic ones), the central cyclic fiber, and
/// the two linking homomorphisms.
struct PPieces {
    grouppack::PGroupPtr group;
    resolve::ResolutionPtr res;
    resolve::ResolutionPtr quotient_res;
    resolve::ResolutionPtr fiber_res;
    grouppack::GroupHom include_fiber;
    grouppack::GroupHom project;
};

inline PPieces build_P_pieces(long p, long n, std::size_t cutoff) {
    auto g = grouppack::make_P(p, n);
    auto ra = resolve::cyclic_resolution(p, cutoff);
    auto rb = resolve::cyclic_resolution(p, cutoff);
    auto rq = resolve::tensor_resolution(ra, rb);
    auto qg = rq->group;
    long m = 1;
    for (long i = 0; i < n - 2; ++i) m *= p;
    auto nabs = grouppack::make_cyclic(m);
    auto rn = resolve::cyclic_resolution(nabs, cutoff);
    grouppack::GroupHom inc = grouppack::make_hom(nabs, g, {g->gen(2)});
    grouppack::GroupHom proj = grouppack::make_hom(
        g, qg,
        {qg->pair_encode(ra->group->gen(0), rb->group->identity()),
         qg->pair_encode(ra->group->identity(), rb->group->gen(0)),
         qg->identity()});
    auto rg = resolve::perturbed_resolution(rq, rn, inc, proj);
    return PPieces{g, rg, rq, rn, std::move(inc), std::move(proj)};
}

}  // namespace testutil
