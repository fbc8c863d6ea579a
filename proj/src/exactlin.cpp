#include "cohom/exactlin.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace exactlin {

namespace {
const Int kZero = 0;
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
    std::size_t nr = rows.size();
    std::size_t nc = nr == 0 ? 0 : rows[0].size();
    IntMatrix m(nr, nc);
    for (std::size_t r = 0; r < nr; ++r) {
        if (rows[r].size() != nc) throw std::invalid_argument("ragged row list");
        for (std::size_t c = 0; c < nc; ++c)
            if (rows[r][c] != 0) m.set(r, c, Int(rows[r][c]));
    }
    return m;
}

void IntMatrix::set(std::size_t r, std::size_t c, Int v) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("IntMatrix::set");
    if (v == 0)
        entries_.erase({r, c});
    else
        entries_[{r, c}] = std::move(v);
}

void IntMatrix::add(std::size_t r, std::size_t c, const Int& v) {
    if (v == 0) return;
    if (r >= rows_ || c >= cols_) throw std::out_of_range("IntMatrix::add");
    auto it = entries_.find({r, c});
    if (it == entries_.end()) {
        entries_.emplace(std::make_pair(r, c), v);
    } else {
        it->second += v;
        if (it->second == 0) entries_.erase(it);
    }
}

const Int& IntMatrix::get(std::size_t r, std::size_t c) const {
    auto it = entries_.find({r, c});
    return it == entries_.end() ? kZero : it->second;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (const auto& [rc, v] : entries_) t.set(rc.second, rc.first, v);
    return t;
}

IntMatrix IntMatrix::mul(const IntMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("IntMatrix::mul shape");
    IntMatrix out(rows_, rhs.cols_);
    for (const auto& [rc, v] : entries_) {
        auto it = rhs.entries_.lower_bound({rc.second, 0});
        for (; it != rhs.entries_.end() && it->first.first == rc.second; ++it)
            out.add(rc.first, it->first.second, v * it->second);
    }
    return out;
}

IntVec IntMatrix::apply(const IntVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("IntMatrix::apply shape");
    IntVec out(rows_, 0);
    for (const auto& [rc, v] : entries_) out[rc.first] += v * x[rc.second];
    return out;
}

IntMatrix IntMatrix::reduced_mod(const Int& m) const {
    if (m <= 0) return *this;
    IntMatrix out(rows_, cols_);
    for (const auto& [rc, v] : entries_) {
        Int r = v % m;
        if (r < 0) r += m;
        if (r != 0) out.set(rc.first, rc.second, r);
    }
    return out;
}

std::string IntMatrix::dump() const {
    std::ostringstream os;
    os << rows_ << ' ' << cols_ << '\n';
    for (const auto& [rc, v] : entries_)
        os << rc.first << ' ' << rc.second << ' ' << v << '\n';
    return os.str();
}

IntMatrix IntMatrix::parse(const std::string& text) {
    std::istringstream is(text);
    std::size_t nr, nc;
    if (!(is >> nr >> nc)) throw std::invalid_argument("bad matrix header");
    IntMatrix m(nr, nc);
    std::size_t r, c;
    std::string v;
    while (is >> r >> c >> v) m.set(r, c, Int(v));
    return m;
}

std::vector<Int> SmithDecomposition::diagonal() const {
    std::size_t n = std::min(d.rows(), d.cols());
    std::vector<Int> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) out[i] = d.get(i, i);
    return out;
}

std::size_t SmithDecomposition::rank() const {
    std::size_t r = 0;
    for (const Int& v : diagonal())
        if (v != 0) ++r;
    return r;
}

Int AbelianInvariants::order() const {
    if (free_rank > 0) return 0;
    Int o = 1;
    for (const Int& t : torsion) o *= t;
    return o;
}

std::string AbelianInvariants::str() const {
    std::ostringstream os;
    bool first = true;
    if (free_rank == 1) {
        os << "Z";
        first = false;
    } else if (free_rank > 1) {
        os << "Z^" << free_rank;
        first = false;
    }
    for (const Int& t : torsion) {
        if (!first) os << " + ";
        os << "Z/" << t;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

// ---------------------------------------------------------------------------
// Smith normal form engine.
//
// Row-major sparse workspace with a column index and a set of current +-1
// entries.  Pivots are chosen with smallest nonzero magnitude, ties broken
// leftmost column then topmost row; since unit entries always win that rule,
// they are tracked in an ordered set so the common case needs no scan.
// ---------------------------------------------------------------------------

namespace {

class SnfWork {
public:
    SnfWork(const IntMatrix& m, bool track)
        : nr_(m.rows()),
          nc_(m.cols()),
          row_(m.rows()),
          col_rows_(m.cols()),
          track_(track) {
        for (const auto& [rc, v] : m.entries()) put(rc.first, rc.second, v);
        if (track_) {
            urow_.resize(nr_);
            vcol_.resize(nc_);
            for (std::size_t i = 0; i < nr_; ++i) urow_[i][i] = 1;
            for (std::size_t j = 0; j < nc_; ++j) vcol_[j][j] = 1;
        }
    }

    void run() {
        std::size_t bound = std::min(nr_, nc_);
        std::size_t t = 0;
        for (; t < bound; ++t) {
            auto pivot = pick(t);
            if (!pivot) break;
            if (pivot->first != t) swap_rows(t, pivot->first);
            if (pivot->second != t) swap_cols(t, pivot->second);
            clear_position(t);
        }
        rank_ = t;
        normalize_signs();
        enforce_divisibility();
    }

    std::vector<Int> diagonal() const {
        std::vector<Int> out(std::min(nr_, nc_), 0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            auto it = row_[i].find(i);
            if (it != row_[i].end()) out[i] = it->second;
        }
        return out;
    }

    std::size_t rank() const { return rank_; }

    IntMatrix matrix() const {
        IntMatrix m(nr_, nc_);
        for (std::size_t r = 0; r < nr_; ++r)
            for (const auto& [c, v] : row_[r]) m.set(r, c, v);
        return m;
    }

    IntMatrix u_matrix() const {
        IntMatrix m(nr_, nr_);
        for (std::size_t r = 0; r < nr_; ++r)
            for (const auto& [c, v] : urow_[r]) m.set(r, c, v);
        return m;
    }

    IntMatrix v_matrix() const {
        IntMatrix m(nc_, nc_);
        for (std::size_t j = 0; j < nc_; ++j)
            for (const auto& [r, v] : vcol_[j]) m.set(r, j, v);
        return m;
    }

private:
    const Int& at(std::size_t r, std::size_t c) const {
        auto it = row_[r].find(c);
        return it == row_[r].end() ? kZero : it->second;
    }

    void put(std::size_t r, std::size_t c, const Int& v) {
        auto it = row_[r].find(c);
        if (it != row_[r].end()) {
            if (abs(it->second) == 1) units_.erase({c, r});
            if (v == 0) {
                row_[r].erase(it);
                col_rows_[c].erase(r);
            } else {
                it->second = v;
                if (abs(v) == 1) units_.insert({c, r});
            }
            return;
        }
        if (v == 0) return;
        row_[r].emplace(c, v);
        col_rows_[c].insert(r);
        if (abs(v) == 1) units_.insert({c, r});
    }

    // row[dst] -= q * row[src]
    void addmul_row(std::size_t dst, std::size_t src, const Int& q) {
        if (q == 0) return;
        for (const auto& [c, v] : row_[src]) put(dst, c, at(dst, c) - q * v);
        if (track_)
            for (const auto& [c, v] : urow_[src]) {
                Int nv = (urow_[dst].count(c) ? urow_[dst][c] : kZero) - q * v;
                if (nv == 0)
                    urow_[dst].erase(c);
                else
                    urow_[dst][c] = nv;
            }
    }

    // col[dst] -= q * col[src]
    void addmul_col(std::size_t dst, std::size_t src, const Int& q) {
        if (q == 0) return;
        std::vector<std::size_t> rows(col_rows_[src].begin(), col_rows_[src].end());
        for (std::size_t r : rows) put(r, dst, at(r, dst) - q * at(r, src));
        if (track_)
            for (const auto& [r, v] : vcol_[src]) {
                Int nv = (vcol_[dst].count(r) ? vcol_[dst][r] : kZero) - q * v;
                if (nv == 0)
                    vcol_[dst].erase(r);
                else
                    vcol_[dst][r] = nv;
            }
    }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (const auto& [c, v] : row_[i]) {
            col_rows_[c].erase(i);
            if (abs(v) == 1) units_.erase({c, i});
        }
        for (const auto& [c, v] : row_[j]) {
            col_rows_[c].erase(j);
            if (abs(v) == 1) units_.erase({c, j});
        }
        std::swap(row_[i], row_[j]);
        for (const auto& [c, v] : row_[i]) {
            col_rows_[c].insert(i);
            if (abs(v) == 1) units_.insert({c, i});
        }
        for (const auto& [c, v] : row_[j]) {
            col_rows_[c].insert(j);
            if (abs(v) == 1) units_.insert({c, j});
        }
        if (track_) std::swap(urow_[i], urow_[j]);
    }

    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::set<std::size_t> rows = col_rows_[i];
        rows.insert(col_rows_[j].begin(), col_rows_[j].end());
        for (std::size_t r : rows) {
            Int vi = at(r, i), vj = at(r, j);
            put(r, i, vj);
            put(r, j, vi);
        }
        if (track_) std::swap(vcol_[i], vcol_[j]);
    }

    void negate_row(std::size_t r) {
        for (auto& [c, v] : row_[r]) v = -v;
        if (track_)
            for (auto& [c, v] : urow_[r]) v = -v;
    }

    // Smallest |value|, leftmost column, then topmost row, within r,c >= t.
    std::optional<std::pair<std::size_t, std::size_t>> pick(std::size_t t) {
        while (!units_.empty()) {
            auto it = units_.begin();
            auto [c, r] = *it;
            if (c < t || r < t) {
                units_.erase(it);
                continue;
            }
            return std::make_pair(r, c);
        }
        bool found = false;
        Int best_v;
        std::size_t best_r = 0, best_c = 0;
        for (std::size_t r = t; r < nr_; ++r)
            for (const auto& [c, v] : row_[r]) {
                if (c < t) continue;
                Int a = abs(v);
                if (!found || a < best_v ||
                    (a == best_v && (c < best_c || (c == best_c && r < best_r)))) {
                    found = true;
                    best_v = a;
                    best_r = r;
                    best_c = c;
                }
            }
        if (!found) return std::nullopt;
        return std::make_pair(best_r, best_c);
    }

    // Reduce until row t and column t hold only the pivot.
    void clear_position(std::size_t t) {
        while (true) {
            // column first
            while (true) {
                std::size_t r = nr_;
                for (std::size_t cand : col_rows_[t])
                    if (cand != t) {
                        r = cand;
                        break;
                    }
                if (r == nr_) break;
                Int d = at(t, t), a = at(r, t), q, rem;
                mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(),
                            d.get_mpz_t());
                addmul_row(r, t, q);
                if (rem != 0) swap_rows(t, r);
            }
            // then row
            while (true) {
                std::size_t c = nc_;
                for (const auto& [cand, v] : row_[t])
                    if (cand != t) {
                        c = cand;
                        break;
                    }
                if (c == nc_) break;
                Int d = at(t, t), a = at(t, c), q, rem;
                mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(),
                            d.get_mpz_t());
                addmul_col(c, t, q);
                if (rem != 0) swap_cols(t, c);
            }
            bool col_clean = col_rows_[t].size() <= 1;
            bool row_clean = row_[t].size() <= 1;
            if (col_clean && row_clean) break;
        }
    }

    void normalize_signs() {
        for (std::size_t i = 0; i < rank_; ++i)
            if (at(i, i) < 0) negate_row(i);
    }

    void enforce_divisibility() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i + 1 < rank_; ++i) {
                Int a = at(i, i), b = at(i + 1, i + 1);
                if (b % a == 0) continue;
                addmul_col(i, i + 1, -1);
                clear_position(i);
                clear_position(i + 1);
                normalize_signs();
                changed = true;
            }
        }
    }

    std::size_t nr_, nc_;
    std::vector<std::map<std::size_t, Int>> row_;
    std::vector<std::set<std::size_t>> col_rows_;
    std::set<std::pair<std::size_t, std::size_t>> units_;
    bool track_;
    std::size_t rank_ = 0;
    std::vector<std::map<std::size_t, Int>> urow_;
    std::vector<std::map<std::size_t, Int>> vcol_;
};

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& m) {
    SnfWork work(m, /*track=*/true);
    work.run();
    return SmithDecomposition{work.u_matrix(), work.matrix(), work.v_matrix()};
}

std::vector<Int> smith_diagonal(const IntMatrix& m) {
    SnfWork work(m, /*track=*/false);
    work.run();
    return work.diagonal();
}

std::size_t rank(const IntMatrix& m) {
    SnfWork work(m, /*track=*/false);
    work.run();
    return work.rank();
}

AbelianInvariants cokernel_invariants(const IntMatrix& m, std::size_t ambient_rank) {
    if (m.rows() != ambient_rank)
        throw std::invalid_argument("cokernel_invariants: ambient rank mismatch");
    AbelianInvariants inv;
    std::size_t r = 0;
    for (const Int& d : smith_diagonal(m)) {
        if (d == 0) continue;
        ++r;
        if (d > 1) inv.torsion.push_back(d);
    }
    inv.free_rank = ambient_rank - r;
    return inv;
}

std::optional<IntVec> solve_integer(const IntMatrix& m, const IntVec& b) {
    if (b.size() != m.rows())
        throw std::invalid_argument("solve_integer: dimension mismatch");
    auto s = smith_normal_form(m);
    IntVec ub = s.u.apply(b);
    auto diag = s.diagonal();
    IntVec y(m.cols(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i < diag.size() && diag[i] != 0) {
            Int q, rem;
            mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), ub[i].get_mpz_t(),
                        diag[i].get_mpz_t());
            if (rem != 0) return std::nullopt;
            y[i] = q;
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    return s.v.apply(y);
}

std::vector<IntVec> kernel_basis_mod(const IntMatrix& m, const Int& modulus) {
    auto s = smith_normal_form(m);
    auto diag = s.diagonal();
    std::size_t r = s.rank();
    std::vector<IntVec> out;
    auto v_column = [&](std::size_t j) {
        IntVec col(m.cols(), 0);
        for (std::size_t i = 0; i < m.cols(); ++i) col[i] = s.v.get(i, j);
        return col;
    };
    if (modulus == 0) {
        for (std::size_t j = r; j < m.cols(); ++j) out.push_back(v_column(j));
        return out;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        Int scale = 1;
        if (j < r) {
            Int g = gcd(diag[j], modulus);
            if (g == 1) continue;  // only the zero class
            scale = modulus / g;
        }
        IntVec col = v_column(j);
        for (Int& v : col) {
            v = (v * scale) % modulus;
            if (v < 0) v += modulus;
        }
        out.push_back(std::move(col));
    }
    return out;
}

Int determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: not square");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    // Bareiss fraction-free elimination on a dense copy.
    std::vector<IntVec> a(n, IntVec(n, 0));
    for (const auto& [rc, v] : m.entries()) a[rc.first][rc.second] = v;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t swap_r = n;
            for (std::size_t r = k + 1; r < n; ++r)
                if (a[r][k] != 0) {
                    swap_r = r;
                    break;
                }
            if (swap_r == n) return 0;
            std::swap(a[k], a[swap_r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

}  // namespace exactlin
