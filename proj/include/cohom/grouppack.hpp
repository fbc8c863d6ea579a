#pragma once

// Polycyclic presentations with normal-form arithmetic, homomorphisms, and
// group-ring carriers.  Elements are indices into the lexicographic
// enumeration of normal forms; multiplication is collection from the left,
// cached in a full table for groups small enough to afford one.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cohom/exactlin.hpp"

namespace grouppack {

using Int = exactlin::Int;
using Elem = std::uint32_t;

/// Input presentation: generator i has relative order rel_orders[i]; its
/// rel_orders[i]-th power and the commutators [g_j, g_i] (j > i) are given as
/// normal-form exponent vectors supported on indices > i.
struct PcPresentation {
    std::vector<long> rel_orders;
    std::vector<std::vector<long>> power_words;           // [i] -> word
    std::vector<std::vector<std::vector<long>>> comm_words;  // [j][i] -> word, j > i
};

class PGroup;
using PGroupPtr = std::shared_ptr<const PGroup>;

class PGroup {
public:
    /// Builds, collects and validates a group from a presentation.  Throws if
    /// the presentation is inconsistent.
    static PGroupPtr create(PcPresentation pres, std::string name);

    /// Direct product; element index is lexicographic over (left, right).
    static PGroupPtr product(PGroupPtr left, PGroupPtr right, std::string name);

    const std::string& name() const { return name_; }
    std::size_t order() const { return order_; }
    std::size_t num_gens() const { return rel_orders_.size(); }
    long rel_order(std::size_t i) const { return rel_orders_[i]; }
    const PcPresentation& presentation() const { return pres_; }

    Elem identity() const { return 0; }
    Elem gen(std::size_t i) const;
    Elem mul(Elem a, Elem b) const;
    Elem inv(Elem a) const;
    Elem power(Elem a, long e) const;
    Elem commutator(Elem a, Elem b) const;  // a^-1 b^-1 a b
    long element_order(Elem a) const;

    std::vector<long> exponents(Elem a) const;
    /// Exponent vector with 0 <= e_i < rel_order(i); anything else throws.
    Elem from_exponents(const std::vector<long>& e) const;

    bool is_abelian() const;
    long exponent() const;
    std::vector<Elem> center() const;
    std::vector<Elem> derived_subgroup() const;
    std::vector<Elem> subgroup_closure(const std::vector<Elem>& gens) const;

    /// Product structure, if this group was built as one.
    bool is_product() const { return static_cast<bool>(left_); }
    PGroupPtr product_left() const { return left_; }
    PGroupPtr product_right() const { return right_; }
    Elem pair_encode(Elem a, Elem b) const;
    std::pair<Elem, Elem> pair_decode(Elem ab) const;

private:
    PGroup() = default;
    void init_strides();
    void build_tables();
    void validate() const;

    // collection from the left (used to bootstrap the tables)
    std::vector<long> mul_gen(std::vector<long> x, std::size_t i) const;
    std::vector<long> conj_suffix(const std::vector<long>& x, std::size_t i) const;
    std::vector<long> sub_mul(std::vector<long> a, const std::vector<long>& b,
                              std::size_t lvl) const;

    std::string name_;
    PcPresentation pres_;
    std::vector<long> rel_orders_;
    std::vector<std::size_t> strides_;
    std::size_t order_ = 1;

    // conj_gen_[j][i] = normal form of g_i^-1 g_j g_i, for j > i
    std::vector<std::vector<std::vector<long>>> conj_gen_;

    std::vector<Elem> mul_table_;  // empty when the group is too large
    std::vector<Elem> inv_table_;

    PGroupPtr left_, right_;  // set for products
};

/// Generator-image homomorphism, validated against the source presentation.
class GroupHom {
public:
    GroupHom(PGroupPtr src, PGroupPtr dst, std::vector<Elem> gen_images);

    const PGroupPtr& src() const { return src_; }
    const PGroupPtr& dst() const { return dst_; }
    Elem apply(Elem a) const { return map_[a]; }
    Elem operator()(Elem a) const { return map_[a]; }
    const std::vector<Elem>& gen_images() const { return gen_images_; }

    bool injective() const { return injective_; }
    bool surjective() const { return surjective_; }
    bool bijective() const { return injective_ && surjective_; }
    std::vector<Elem> kernel() const;

    /// this after other: (compose(f))(x) = this(f(x))
    GroupHom compose(const GroupHom& inner) const;

private:
    PGroupPtr src_, dst_;
    std::vector<Elem> gen_images_;
    std::vector<Elem> map_;
    bool injective_ = false, surjective_ = false;
};

PGroupPtr make_P(long p, long n);
PGroupPtr make_M(long p, long n);
PGroupPtr make_cyclic(long m);
PGroupPtr make_elem_abelian(long p, long rank);
GroupHom make_hom(PGroupPtr src, PGroupPtr dst, const std::vector<Elem>& images);
GroupHom identity_hom(PGroupPtr g);
GroupHom diagonal_hom(PGroupPtr g, PGroupPtr gxg);

/// CLI group descriptors: "P:p=3,n=3", "M:p=3,n=4", "C:9", "E:p=3,rank=2".
PGroupPtr parse_group_spec(const std::string& spec);

// ---------------------------------------------------------------------------
// Group-ring carriers.
// ---------------------------------------------------------------------------

/// Formal integer combination of group elements, sorted by element index with
/// no zero coefficients.
struct GroupRingElem {
    std::vector<std::pair<Elem, Int>> terms;

    GroupRingElem() = default;
    static GroupRingElem unit(Elem g, Int coeff = 1);

    bool empty() const { return terms.empty(); }
    void add_term(Elem g, const Int& c);
    GroupRingElem& operator+=(const GroupRingElem& rhs);
    GroupRingElem scaled(const Int& c) const;
    GroupRingElem negated() const;
    GroupRingElem left_mul(const PGroup& g, Elem x) const;       // x * this
    GroupRingElem mul(const PGroup& g, const GroupRingElem& rhs) const;
    GroupRingElem mapped(const PGroup& dst, const GroupHom& f) const;
    Int aug() const;

    bool operator==(const GroupRingElem&) const = default;
};

/// Column-major sparse matrix over the group ring; column j holds the image
/// of the j-th free-module basis element.
struct GRMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<std::pair<std::size_t, GroupRingElem>>> columns;

    GRMatrix() = default;
    GRMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), columns(c) {}

    void set(std::size_t r, std::size_t c, GroupRingElem v);
    const GroupRingElem* get(std::size_t r, std::size_t c) const;
    GRMatrix mul(const PGroup& g, const GRMatrix& rhs) const;
    bool is_zero() const;

    /// Trivial-module functor: every group element goes to 1.
    exactlin::IntMatrix augmented() const;
};

}  // namespace grouppack
