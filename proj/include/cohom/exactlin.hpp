#pragma once

// Exact linear algebra over Z and Z/m: sparse integer matrices, Smith normal
// form, invariant factors, integer solving and kernels mod m.  Everything is
// arbitrary precision (GMP) and deterministic.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace exactlin {

using Int = mpz_class;
using IntVec = std::vector<Int>;

/// Sparse integer matrix keyed by (row, col).  Dimensions are fixed at
/// construction; stored entries are always nonzero.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    static IntMatrix identity(std::size_t n);
    /// Dense construction helper, mostly for tests and small fixtures.
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void set(std::size_t r, std::size_t c, Int v);
    void add(std::size_t r, std::size_t c, const Int& v);
    const Int& get(std::size_t r, std::size_t c) const;

    std::size_t nnz() const { return entries_.size(); }
    bool is_zero() const { return entries_.empty(); }
    const std::map<std::pair<std::size_t, std::size_t>, Int>& entries() const {
        return entries_;
    }

    IntMatrix transpose() const;
    IntMatrix mul(const IntMatrix& rhs) const;
    IntVec apply(const IntVec& x) const;
    IntMatrix reduced_mod(const Int& m) const;

    bool operator==(const IntMatrix& rhs) const = default;

    /// Plain-text dump: "rows cols" header, then one "r c value" line per
    /// stored entry in row-major order.
    std::string dump() const;
    static IntMatrix parse(const std::string& text);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::map<std::pair<std::size_t, std::size_t>, Int> entries_;
};

/// U * M * V = D with U, V unimodular and D diagonal, d1 | d2 | ... | dr > 0
/// followed by zeros.
struct SmithDecomposition {
    IntMatrix u;
    IntMatrix d;
    IntMatrix v;

    std::vector<Int> diagonal() const;
    std::size_t rank() const;
};

/// Isomorphism type of a finitely generated abelian group: free rank plus
/// invariant factors > 1 in divisibility order.
struct AbelianInvariants {
    std::size_t free_rank = 0;
    std::vector<Int> torsion;

    bool operator==(const AbelianInvariants&) const = default;
    Int order() const;  // torsion order; 0 if free part present
    std::string str() const;
};

SmithDecomposition smith_normal_form(const IntMatrix& m);

/// Diagonal of the Smith form only (no transforms); much cheaper on large
/// sparse inputs.
std::vector<Int> smith_diagonal(const IntMatrix& m);

std::size_t rank(const IntMatrix& m);

/// Invariants of Z^ambient_rank / column-span(m).  Throws if m.rows() does
/// not equal ambient_rank.
AbelianInvariants cokernel_invariants(const IntMatrix& m, std::size_t ambient_rank);

/// Deterministic particular solution of M x = b over Z, or nullopt if none.
std::optional<IntVec> solve_integer(const IntMatrix& m, const IntVec& b);

/// Generators of {x : M x = 0 mod modulus}; modulus 0 means the integer
/// kernel (a basis of the saturated kernel lattice).  For prime modulus the
/// generators are linearly independent mod p.
std::vector<IntVec> kernel_basis_mod(const IntMatrix& m, const Int& modulus);

/// Fraction-free determinant (dense Bareiss); intended for small matrices.
Int determinant(const IntMatrix& m);

}  // namespace exactlin
