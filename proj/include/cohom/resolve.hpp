#pragma once

// Truncated free resolutions of Z over integral group rings: periodic
// resolutions for cyclic groups, Koszul tensor products, twisted tensor
// products along a central-extension style decomposition (differential solved
// degree by degree against the fiber homotopy), and the normalized bar
// resolution as an oracle.  Chain maps between resolutions are lifted through
// contracting homotopies.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cohom/grouppack.hpp"

namespace resolve {

using grouppack::Elem;
using grouppack::GroupHom;
using grouppack::GroupRingElem;
using grouppack::GRMatrix;
using grouppack::PGroup;
using grouppack::PGroupPtr;
using Int = grouppack::Int;

/// Key of a Z-basis element g * b_idx of one degree of a free module.
inline std::uint64_t zkey(Elem g, std::uint32_t idx) {
    return (static_cast<std::uint64_t>(g) << 32) | idx;
}
inline Elem zkey_elem(std::uint64_t k) { return static_cast<Elem>(k >> 32); }
inline std::uint32_t zkey_idx(std::uint64_t k) {
    return static_cast<std::uint32_t>(k & 0xffffffffu);
}

/// Sparse integer combination of Z-basis elements, sorted by key.
class ModuleVec {
public:
    ModuleVec() = default;
    static ModuleVec basis(Elem g, std::uint32_t idx, Int c = 1);

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::pair<std::uint64_t, Int>>& terms() const { return terms_; }

    void add(Elem g, std::uint32_t idx, const Int& c);
    void add_scaled(const ModuleVec& rhs, const Int& c);
    ModuleVec& operator+=(const ModuleVec& rhs);
    ModuleVec scaled(const Int& c) const;
    /// x * this, pushing group coefficients through left multiplication.
    ModuleVec translated(const PGroup& grp, Elem x) const;

    bool operator==(const ModuleVec&) const = default;

    /// Deterministic rebuild from an accumulator.
    static ModuleVec freeze(std::unordered_map<std::uint64_t, Int>&& acc);

private:
    std::vector<std::pair<std::uint64_t, Int>> terms_;
};

/// Bidegree bookkeeping for tensor-shaped bases: degree n splits into blocks
/// with left degree i, right degree n-i.
struct TensorLayout {
    struct Block {
        std::size_t left_deg, start, left_rank, right_rank;
    };
    std::vector<std::vector<Block>> by_degree;

    std::size_t index(std::size_t n, std::size_t left_deg, std::size_t a,
                      std::size_t b) const;
    // returns (left_deg, a, b)
    std::array<std::size_t, 3> decode(std::size_t n, std::size_t idx) const;
};

class FreeResolution;
using ResolutionPtr = std::shared_ptr<const FreeResolution>;

/// Graded free ZG-module with differentials, augmentation, unit section and a
/// Z-linear contracting homotopy, truncated at `cutoff`.
class FreeResolution {
public:
    PGroupPtr group;
    std::string name;
    std::size_t cutoff = 0;
    std::vector<std::size_t> ranks;   // 0..cutoff
    std::vector<GRMatrix> diff;       // diff[n] = d_n for 1 <= n <= cutoff
    GRMatrix augmentation;            // 1 x ranks[0]
    ModuleVec unit;                   // eta(1) in F_0

    std::size_t rank(std::size_t n) const { return ranks.at(n); }

    ModuleVec apply_diff(std::size_t n, Elem g, std::uint32_t idx) const;
    ModuleVec apply_diff(std::size_t n, const ModuleVec& v) const;
    ModuleVec apply_homotopy(std::size_t n, const ModuleVec& v) const;
    Int aug_value(std::uint32_t idx) const;
    Int aug_value(const ModuleVec& v) const;

    /// Integer matrix of the coefficient differential C^{n} -> C^{n+1} for a
    /// trivial module: transpose of the augmented d_{n+1}.
    exactlin::IntMatrix cochain_matrix(std::size_t n) const;

    /// Checks d^2 = 0, the augmentation identities and all homotopy
    /// identities; throws std::runtime_error on the first failure.  The
    /// homotopy identities are checked on every Z-basis element when the
    /// total count is at most `zbasis_limit`, otherwise on a deterministic
    /// subset of group translates (full basis index coverage either way).
    void validate(std::size_t zbasis_limit = SIZE_MAX) const;

    /// Per-degree rank line, then "n row col : coeff@element" entries.
    std::string dump() const;

    // --- homotopy backing ---
    // table mode: htable[n][g * rank + idx]
    std::vector<std::vector<ModuleVec>> htable;
    // tensor mode: lazy Koszul homotopy from the factors
    ResolutionPtr tensor_left, tensor_right;
    TensorLayout layout;  // set for tensor and twisted resolutions

    ModuleVec homotopy_of_basis(std::size_t n, Elem g, std::uint32_t idx) const;

private:
    void validate_homotopy_at(std::size_t n, Elem g, std::uint32_t idx) const;
};

ResolutionPtr cyclic_resolution(PGroupPtr cyclic_group, std::size_t cutoff);
ResolutionPtr cyclic_resolution(long m, std::size_t cutoff);

ResolutionPtr tensor_resolution(ResolutionPtr left, ResolutionPtr right,
                                PGroupPtr product_group = nullptr);

/// Twisted tensor-product resolution for a group G with normal subgroup
/// N (resolved by `fiber` via `include_fiber`) and quotient Q = G/N
/// (resolved by `base`, via `project`).  The differential is d0 + d1 + d2 +
/// ... with dk solved degreewise so the total square is zero; the contracting
/// homotopy comes from the perturbation series over the fiber homotopy.
ResolutionPtr perturbed_resolution(ResolutionPtr base, ResolutionPtr fiber,
                                   const GroupHom& include_fiber,
                                   const GroupHom& project);

/// Normalized bar resolution; throws if (|G|-1)^cutoff exceeds the budget.
ResolutionPtr bar_resolution(PGroupPtr g, std::size_t cutoff,
                             std::size_t rank_budget = 300000);

/// Chain map over a group homomorphism f: blocks[n][idx] is the image of the
/// source basis element, extended f-equivariantly.
struct ChainMap {
    GroupHom f;
    ResolutionPtr src, tgt;
    std::vector<std::vector<ModuleVec>> blocks;

    std::size_t degrees() const { return blocks.size(); }
    ModuleVec apply(std::size_t n, const ModuleVec& v) const;
    /// Trivial-module collapse: matrix with (src_rank x tgt_rank) sending a
    /// degree-n cochain on tgt to its pullback on src.
    exactlin::IntMatrix collapsed(std::size_t n) const;
};

/// Lifts the identity of Z to an f-equivariant chain map src -> tgt through
/// the homotopy of tgt.  Every step is verified to commute with the
/// differentials.  `tweak`, when given, perturbs the degree-0 seed by a
/// boundary, producing a different but homotopic lift.
ChainMap lift_chain_map(const GroupHom& f, ResolutionPtr src, ResolutionPtr tgt,
                        const ModuleVec* tweak = nullptr);

/// Diagonal approximation: R -> R box R over the diagonal embedding, with the
/// square resolution built internally.
struct Diagonal {
    ResolutionPtr square;
    ChainMap map;
};
Diagonal diagonal_map(ResolutionPtr r, std::size_t cutoff);

/// Chain-level transfer data for a finite-index subgroup inclusion: left
/// coset representatives in normal-form enumeration order, a ZH-equivariant
/// comparison map big -> small, and the collapsed per-degree transfer
/// matrices (subgroup cochains -> ambient cochains).
struct TransferData {
    std::vector<Elem> coset_reps;
    std::vector<exactlin::IntMatrix> matrices;  // [n]: rank_G(n) x rank_H(n)
};
TransferData build_transfer(const GroupHom& include, ResolutionPtr big,
                            ResolutionPtr small);

}  // namespace resolve
