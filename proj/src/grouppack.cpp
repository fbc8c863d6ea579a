#include "cohom/grouppack.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace grouppack {

namespace {

constexpr std::size_t kMulTableLimit = 2048;   // |G| above this => no table
constexpr std::size_t kOrderLimit = 1u << 20;  // hard cap on group order

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

long ipow(long b, long e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PGroup
// ---------------------------------------------------------------------------

PGroupPtr PGroup::create(PcPresentation pres, std::string name) {
    auto g = std::shared_ptr<PGroup>(new PGroup());
    g->name_ = std::move(name);
    g->rel_orders_ = pres.rel_orders;
    std::size_t k = g->rel_orders_.size();
    if (pres.power_words.size() != k) throw std::invalid_argument("power words");
    for (std::size_t i = 0; i < k; ++i) {
        if (g->rel_orders_[i] < 1) throw std::invalid_argument("relative order < 1");
        const auto& w = pres.power_words[i];
        if (w.size() != k) throw std::invalid_argument("power word width");
        for (std::size_t j = 0; j <= i; ++j)
            if (w[j] != 0) throw std::invalid_argument("power word support");
    }
    if (pres.comm_words.size() != k) throw std::invalid_argument("comm words");
    for (std::size_t j = 0; j < k; ++j) {
        if (pres.comm_words[j].size() != j)
            throw std::invalid_argument("comm word shape");
        for (std::size_t i = 0; i < j; ++i) {
            const auto& w = pres.comm_words[j][i];
            if (w.size() != k) throw std::invalid_argument("comm word width");
            for (std::size_t l = 0; l <= i; ++l)
                if (w[l] != 0) throw std::invalid_argument("comm word support");
        }
    }
    g->pres_ = std::move(pres);
    g->init_strides();
    if (g->order_ > kOrderLimit) throw std::invalid_argument("group order too large");

    // conj_gen_[j][i] = normal form of g_j * [g_j, g_i]; computed for
    // descending i so the collection it needs is already available.
    g->conj_gen_.assign(k, {});
    for (std::size_t j = 0; j < k; ++j) g->conj_gen_[j].resize(j);
    for (std::size_t ii = k; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < k; ++j) {
            const auto& cw = g->pres_.comm_words[j][ii];
            std::vector<long> gj(k, 0);
            gj[j] = 1;
            bool trivial = std::all_of(cw.begin(), cw.end(), [](long e) { return e == 0; });
            g->conj_gen_[j][ii] = trivial ? gj : g->sub_mul(gj, cw, ii + 1);
        }
    }

    g->build_tables();
    g->validate();
    return g;
}

PGroupPtr PGroup::product(PGroupPtr left, PGroupPtr right, std::string name) {
    auto g = std::shared_ptr<PGroup>(new PGroup());
    g->name_ = std::move(name);
    std::size_t kl = left->num_gens(), kr = right->num_gens(), k = kl + kr;
    g->rel_orders_.resize(k);
    for (std::size_t i = 0; i < kl; ++i) g->rel_orders_[i] = left->rel_order(i);
    for (std::size_t i = 0; i < kr; ++i) g->rel_orders_[kl + i] = right->rel_order(i);
    g->init_strides();
    if (g->order_ != left->order() * right->order())
        throw std::invalid_argument("product order overflow");

    // concatenated presentation, factors commuting
    auto pad_left = [&](const std::vector<long>& w) {
        std::vector<long> out(k, 0);
        std::copy(w.begin(), w.end(), out.begin());
        return out;
    };
    auto pad_right = [&](const std::vector<long>& w) {
        std::vector<long> out(k, 0);
        std::copy(w.begin(), w.end(), out.begin() + static_cast<long>(kl));
        return out;
    };
    const auto& lp = left->presentation();
    const auto& rp = right->presentation();
    g->pres_.rel_orders = g->rel_orders_;
    g->pres_.power_words.resize(k);
    g->pres_.comm_words.resize(k);
    for (std::size_t i = 0; i < kl; ++i) g->pres_.power_words[i] = pad_left(lp.power_words[i]);
    for (std::size_t i = 0; i < kr; ++i)
        g->pres_.power_words[kl + i] = pad_right(rp.power_words[i]);
    for (std::size_t j = 0; j < k; ++j)
        g->pres_.comm_words[j].assign(j, std::vector<long>(k, 0));
    for (std::size_t j = 0; j < kl; ++j)
        for (std::size_t i = 0; i < j; ++i)
            g->pres_.comm_words[j][i] = pad_left(lp.comm_words[j][i]);
    for (std::size_t j = 0; j < kr; ++j)
        for (std::size_t i = 0; i < j; ++i)
            g->pres_.comm_words[kl + j][kl + i] = pad_right(rp.comm_words[j][i]);

    g->left_ = std::move(left);
    g->right_ = std::move(right);
    g->validate();
    return g;
}

void PGroup::init_strides() {
    std::size_t k = rel_orders_.size();
    strides_.assign(k, 1);
    // lexicographic: last generator varies fastest
    order_ = 1;
    for (std::size_t i = k; i-- > 0;) {
        strides_[i] = order_;
        order_ *= static_cast<std::size_t>(rel_orders_[i]);
    }
}

Elem PGroup::gen(std::size_t i) const {
    if (i >= num_gens()) throw std::out_of_range("generator index");
    if (rel_orders_[i] == 1) return identity();
    return static_cast<Elem>(strides_[i]);
}

std::vector<long> PGroup::exponents(Elem a) const {
    std::vector<long> e(num_gens(), 0);
    std::size_t rest = a;
    for (std::size_t i = 0; i < num_gens(); ++i) {
        e[i] = static_cast<long>(rest / strides_[i]);
        rest %= strides_[i];
    }
    return e;
}

Elem PGroup::from_exponents(const std::vector<long>& e) const {
    if (e.size() != num_gens()) throw std::invalid_argument("exponent width");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < num_gens(); ++i) {
        if (e[i] < 0 || e[i] >= rel_orders_[i])
            throw std::invalid_argument("exponent out of range");
        idx += static_cast<std::size_t>(e[i]) * strides_[i];
    }
    return static_cast<Elem>(idx);
}

// x * g_i, by collection from the left
std::vector<long> PGroup::mul_gen(std::vector<long> x, std::size_t i) const {
    std::size_t k = num_gens();
    bool trivial_suffix = true;
    for (std::size_t j = i + 1; j < k; ++j)
        if (x[j] != 0) trivial_suffix = false;

    std::vector<long> tail(k, 0);
    if (!trivial_suffix) {
        tail = conj_suffix(x, i);
        for (std::size_t j = i + 1; j < k; ++j) x[j] = 0;
    }
    x[i] += 1;
    if (x[i] == rel_orders_[i]) {
        x[i] = 0;
        tail = sub_mul(pres_.power_words[i], tail, i + 1);
    }
    for (std::size_t j = i + 1; j < k; ++j) x[j] = tail[j];
    return x;
}

// conjugate of the suffix (indices > i) of x by g_i
std::vector<long> PGroup::conj_suffix(const std::vector<long>& x, std::size_t i) const {
    std::size_t k = num_gens();
    std::vector<long> res(k, 0);
    for (std::size_t j = i + 1; j < k; ++j) {
        if (x[j] == 0) continue;
        const auto& cg = conj_gen_[j][i];
        bool plain = true;
        for (std::size_t l = 0; l < k; ++l)
            if (cg[l] != (l == j ? 1 : 0)) plain = false;
        if (plain) {
            std::vector<long> w(k, 0);
            w[j] = x[j];
            res = sub_mul(res, w, i + 1);
        } else {
            std::vector<long> powed(k, 0);
            for (long t = 0; t < x[j]; ++t) powed = sub_mul(powed, cg, i + 1);
            res = sub_mul(res, powed, i + 1);
        }
    }
    return res;
}

// product of normal forms supported on indices >= lvl
std::vector<long> PGroup::sub_mul(std::vector<long> a, const std::vector<long>& b,
                                  std::size_t lvl) const {
    for (std::size_t j = lvl; j < num_gens(); ++j)
        for (long t = 0; t < b[j]; ++t) a = mul_gen(a, j);
    return a;
}

void PGroup::build_tables() {
    if (order_ > kMulTableLimit) return;
    std::size_t k = num_gens();

    // x * g_i for every x, then arbitrary products by composing
    std::vector<std::vector<Elem>> genmul(k, std::vector<Elem>(order_));
    for (Elem x = 0; x < order_; ++x)
        for (std::size_t i = 0; i < k; ++i)
            genmul[i][x] = from_exponents(mul_gen(exponents(x), i));

    mul_table_.assign(order_ * order_, 0);
    for (Elem x = 0; x < order_; ++x) {
        for (Elem y = 0; y < order_; ++y) {
            Elem acc = x;
            auto ey = exponents(y);
            for (std::size_t i = 0; i < k; ++i)
                for (long t = 0; t < ey[i]; ++t) acc = genmul[i][acc];
            mul_table_[static_cast<std::size_t>(x) * order_ + y] = acc;
        }
    }

    inv_table_.assign(order_, 0);
    for (Elem x = 0; x < order_; ++x) {
        Elem acc = 0;
        std::size_t e = order_ - 1;  // x^{|G|-1} = x^{-1}
        Elem base = x;
        while (e > 0) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        inv_table_[x] = acc;
    }
}

Elem PGroup::mul(Elem a, Elem b) const {
    if (!mul_table_.empty())
        return mul_table_[static_cast<std::size_t>(a) * order_ + b];
    if (left_) {
        std::size_t ro = right_->order();
        Elem a1 = a / ro, a2 = a % ro, b1 = b / ro, b2 = b % ro;
        return static_cast<Elem>(left_->mul(a1, b1) * ro + right_->mul(a2, b2));
    }
    // slow path: collect
    std::vector<long> acc = exponents(a);
    auto eb = exponents(b);
    for (std::size_t i = 0; i < num_gens(); ++i)
        for (long t = 0; t < eb[i]; ++t) acc = mul_gen(acc, i);
    return from_exponents(acc);
}

Elem PGroup::inv(Elem a) const {
    if (!inv_table_.empty()) return inv_table_[a];
    if (left_) {
        std::size_t ro = right_->order();
        return static_cast<Elem>(left_->inv(a / ro) * ro + right_->inv(a % ro));
    }
    return power(a, static_cast<long>(order_) - 1);
}

Elem PGroup::power(Elem a, long e) const {
    long n = static_cast<long>(order_);
    e %= n;
    if (e < 0) e += n;
    Elem acc = 0, base = a;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

Elem PGroup::commutator(Elem a, Elem b) const {
    return mul(mul(inv(a), inv(b)), mul(a, b));
}

long PGroup::element_order(Elem a) const {
    long o = 1;
    Elem x = a;
    while (x != identity()) {
        x = mul(x, a);
        ++o;
    }
    return o;
}

bool PGroup::is_abelian() const {
    for (std::size_t i = 0; i < num_gens(); ++i)
        for (std::size_t j = i + 1; j < num_gens(); ++j)
            if (mul(gen(i), gen(j)) != mul(gen(j), gen(i))) return false;
    return true;
}

long PGroup::exponent() const {
    long e = 1;
    for (Elem x = 0; x < order_; ++x) e = std::lcm(e, element_order(x));
    return e;
}

std::vector<Elem> PGroup::center() const {
    std::vector<Elem> gens;
    if (left_) {
        for (Elem y = 0; y < order_; ++y) gens.push_back(y);
    } else {
        for (std::size_t i = 0; i < num_gens(); ++i) gens.push_back(gen(i));
    }
    std::vector<Elem> out;
    for (Elem x = 0; x < order_; ++x) {
        bool central = true;
        for (Elem s : gens)
            if (mul(x, s) != mul(s, x)) {
                central = false;
                break;
            }
        if (central) out.push_back(x);
    }
    return out;
}

std::vector<Elem> PGroup::derived_subgroup() const {
    std::vector<Elem> comms;
    for (Elem a = 0; a < order_; ++a)
        for (std::size_t i = 0; i < num_gens(); ++i)
            comms.push_back(commutator(a, gen(i)));
    return subgroup_closure(comms);
}

std::vector<Elem> PGroup::subgroup_closure(const std::vector<Elem>& gens) const {
    std::set<Elem> seen{identity()};
    std::vector<Elem> frontier{identity()};
    while (!frontier.empty()) {
        std::vector<Elem> next;
        for (Elem x : frontier)
            for (Elem s : gens)
                for (Elem y : {mul(x, s), mul(x, inv(s))})
                    if (seen.insert(y).second) next.push_back(y);
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

Elem PGroup::pair_encode(Elem a, Elem b) const {
    if (!left_) throw std::logic_error("not a product group");
    return static_cast<Elem>(static_cast<std::size_t>(a) * right_->order() + b);
}

std::pair<Elem, Elem> PGroup::pair_decode(Elem ab) const {
    if (!left_) throw std::logic_error("not a product group");
    std::size_t ro = right_->order();
    return {static_cast<Elem>(ab / ro), static_cast<Elem>(ab % ro)};
}

void PGroup::validate() const {
    std::size_t k = num_gens();
    // power relations: g_i^{r_i} equals its power word
    for (std::size_t i = 0; i < k; ++i) {
        Elem lhs = power(gen(i), rel_orders_[i]);
        Elem rhs = from_exponents(pres_.power_words[i]);
        if (lhs != rhs) throw std::invalid_argument("inconsistent power relation");
    }
    // commutator relations
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            Elem lhs = commutator(gen(j), gen(i));
            Elem rhs = from_exponents(pres_.comm_words[j][i]);
            if (lhs != rhs) throw std::invalid_argument("inconsistent commutator relation");
        }
    // two-sided inverses
    for (Elem a = 0; a < order_; ++a) {
        Elem ai = inv(a);
        if (mul(a, ai) != identity() || mul(ai, a) != identity())
            throw std::invalid_argument("element without two-sided inverse");
    }
    // associativity spot check, fixed seed for reproducibility
    std::mt19937 rng(0x5eed);
    std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(order_ - 1));
    std::size_t trials = std::min<std::size_t>(1000, order_ * order_);
    for (std::size_t t = 0; t < trials; ++t) {
        Elem a = pick(rng), b = pick(rng), c = pick(rng);
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw std::invalid_argument("collection is not associative");
    }
}

// ---------------------------------------------------------------------------
// GroupHom
// ---------------------------------------------------------------------------

GroupHom::GroupHom(PGroupPtr src, PGroupPtr dst, std::vector<Elem> gen_images)
    : src_(std::move(src)), dst_(std::move(dst)), gen_images_(std::move(gen_images)) {
    std::size_t k = src_->num_gens();
    if (gen_images_.size() != k)
        throw std::invalid_argument("homomorphism needs one image per generator");

    auto eval_word = [&](const std::vector<long>& w) {
        Elem acc = dst_->identity();
        for (std::size_t i = 0; i < k; ++i)
            acc = dst_->mul(acc, dst_->power(gen_images_[i], w[i]));
        return acc;
    };

    const auto& pres = src_->presentation();
    for (std::size_t i = 0; i < k; ++i) {
        Elem lhs = dst_->power(gen_images_[i], src_->rel_order(i));
        if (lhs != eval_word(pres.power_words[i])) {
            std::ostringstream os;
            os << "relation violated: g" << i + 1 << "^" << src_->rel_order(i);
            throw std::invalid_argument(os.str());
        }
    }
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            Elem lhs = dst_->commutator(gen_images_[j], gen_images_[i]);
            if (lhs != eval_word(pres.comm_words[j][i])) {
                std::ostringstream os;
                os << "relation violated: [g" << j + 1 << ",g" << i + 1 << "]";
                throw std::invalid_argument(os.str());
            }
        }

    map_.resize(src_->order());
    std::set<Elem> image;
    for (Elem x = 0; x < src_->order(); ++x) {
        map_[x] = eval_word(src_->exponents(x));
        image.insert(map_[x]);
    }
    injective_ = image.size() == src_->order();
    surjective_ = image.size() == dst_->order();
}

std::vector<Elem> GroupHom::kernel() const {
    std::vector<Elem> out;
    for (Elem x = 0; x < src_->order(); ++x)
        if (map_[x] == dst_->identity()) out.push_back(x);
    return out;
}

GroupHom GroupHom::compose(const GroupHom& inner) const {
    if (inner.dst_ != src_) throw std::invalid_argument("compose: group mismatch");
    std::vector<Elem> images(inner.src_->num_gens());
    for (std::size_t i = 0; i < images.size(); ++i)
        images[i] = map_[inner.gen_images_[i]];
    return GroupHom(inner.src_, dst_, images);
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

PGroupPtr make_P(long p, long n) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("p must be an odd prime");
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    long m = ipow(p, n - 2);
    PcPresentation pres;
    pres.rel_orders = {p, p, m};
    pres.power_words.assign(3, std::vector<long>(3, 0));
    pres.comm_words.assign(3, {});
    pres.comm_words[1] = {std::vector<long>(3, 0)};
    pres.comm_words[2] = {std::vector<long>(3, 0), std::vector<long>(3, 0)};
    // [B, A] = C^{-p^{n-3}}
    pres.comm_words[1][0][2] = m - ipow(p, n - 3);
    std::ostringstream name;
    name << "P(" << p << "," << n << ")";
    return PGroup::create(pres, name.str());
}

PGroupPtr make_M(long p, long n) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("p must be an odd prime");
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    // <A, B | A^{p^{n-1}} = B^p = 1, B A B^-1 = A^{1+p^{n-2}}>, ordered (B, A)
    long ao = ipow(p, n - 1);
    PcPresentation pres;
    pres.rel_orders = {p, ao};
    pres.power_words.assign(2, std::vector<long>(2, 0));
    pres.comm_words.assign(2, {});
    pres.comm_words[1] = {std::vector<long>(2, 0)};
    // [A, B] = A^{-p^{n-2}}
    pres.comm_words[1][0][1] = ao - ipow(p, n - 2);
    std::ostringstream name;
    name << "M(" << p << "," << n << ")";
    return PGroup::create(pres, name.str());
}

PGroupPtr make_cyclic(long m) {
    if (m < 1) throw std::invalid_argument("cyclic order must be positive");
    PcPresentation pres;
    pres.rel_orders = {m};
    pres.power_words = {{0}};
    pres.comm_words = {{}};
    std::ostringstream name;
    name << "C" << m;
    return PGroup::create(pres, name.str());
}

PGroupPtr make_elem_abelian(long p, long rank) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (rank < 1) throw std::invalid_argument("rank must be positive");
    std::size_t k = static_cast<std::size_t>(rank);
    PcPresentation pres;
    pres.rel_orders.assign(k, p);
    pres.power_words.assign(k, std::vector<long>(k, 0));
    pres.comm_words.assign(k, {});
    for (std::size_t j = 0; j < k; ++j)
        pres.comm_words[j].assign(j, std::vector<long>(k, 0));
    std::ostringstream name;
    name << "C" << p << "^" << rank;
    return PGroup::create(pres, name.str());
}

GroupHom make_hom(PGroupPtr src, PGroupPtr dst, const std::vector<Elem>& images) {
    return GroupHom(std::move(src), std::move(dst), images);
}

GroupHom identity_hom(PGroupPtr g) {
    std::vector<Elem> images(g->num_gens());
    for (std::size_t i = 0; i < images.size(); ++i) images[i] = g->gen(i);
    PGroupPtr dst = g;
    return GroupHom(std::move(g), std::move(dst), images);
}

GroupHom diagonal_hom(PGroupPtr g, PGroupPtr gxg) {
    std::vector<Elem> images(g->num_gens());
    for (std::size_t i = 0; i < images.size(); ++i)
        images[i] = gxg->pair_encode(g->gen(i), g->gen(i));
    return GroupHom(std::move(g), std::move(gxg), images);
}

PGroupPtr parse_group_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad group spec: " + spec);
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);

    auto get_param = [&](const std::string& key) {
        auto pos = rest.find(key + "=");
        if (pos == std::string::npos)
            throw std::invalid_argument("group spec missing " + key + ": " + spec);
        return std::stol(rest.substr(pos + key.size() + 1));
    };

    if (kind == "P") return make_P(get_param("p"), get_param("n"));
    if (kind == "M") return make_M(get_param("p"), get_param("n"));
    if (kind == "C") return make_cyclic(std::stol(rest));
    if (kind == "E") return make_elem_abelian(get_param("p"), get_param("rank"));
    throw std::invalid_argument("unknown group kind: " + spec);
}

// ---------------------------------------------------------------------------
// Group ring
// ---------------------------------------------------------------------------

GroupRingElem GroupRingElem::unit(Elem g, Int coeff) {
    GroupRingElem e;
    if (coeff != 0) e.terms.emplace_back(g, std::move(coeff));
    return e;
}

void GroupRingElem::add_term(Elem g, const Int& c) {
    if (c == 0) return;
    auto it = std::lower_bound(terms.begin(), terms.end(), g,
                               [](const auto& t, Elem v) { return t.first < v; });
    if (it != terms.end() && it->first == g) {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    } else {
        terms.insert(it, {g, c});
    }
}

GroupRingElem& GroupRingElem::operator+=(const GroupRingElem& rhs) {
    for (const auto& [g, c] : rhs.terms) add_term(g, c);
    return *this;
}

GroupRingElem GroupRingElem::scaled(const Int& c) const {
    GroupRingElem out;
    if (c == 0) return out;
    out.terms.reserve(terms.size());
    for (const auto& [g, v] : terms) out.terms.emplace_back(g, v * c);
    return out;
}

GroupRingElem GroupRingElem::negated() const { return scaled(-1); }

GroupRingElem GroupRingElem::left_mul(const PGroup& grp, Elem x) const {
    GroupRingElem out;
    for (const auto& [g, c] : terms) out.add_term(grp.mul(x, g), c);
    return out;
}

GroupRingElem GroupRingElem::mul(const PGroup& grp, const GroupRingElem& rhs) const {
    GroupRingElem out;
    for (const auto& [g, c] : terms)
        for (const auto& [h, d] : rhs.terms) out.add_term(grp.mul(g, h), c * d);
    return out;
}

GroupRingElem GroupRingElem::mapped(const PGroup& dst, const GroupHom& f) const {
    GroupRingElem out;
    (void)dst;
    for (const auto& [g, c] : terms) out.add_term(f.apply(g), c);
    return out;
}

Int GroupRingElem::aug() const {
    Int s = 0;
    for (const auto& [g, c] : terms) s += c;
    return s;
}

void GRMatrix::set(std::size_t r, std::size_t c, GroupRingElem v) {
    if (r >= rows || c >= cols) throw std::out_of_range("GRMatrix::set");
    auto& col = columns[c];
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const auto& e, std::size_t v2) { return e.first < v2; });
    if (it != col.end() && it->first == r) {
        if (v.empty())
            col.erase(it);
        else
            it->second = std::move(v);
    } else if (!v.empty()) {
        col.insert(it, {r, std::move(v)});
    }
}

const GroupRingElem* GRMatrix::get(std::size_t r, std::size_t c) const {
    const auto& col = columns[c];
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const auto& e, std::size_t v) { return e.first < v; });
    if (it != col.end() && it->first == r) return &it->second;
    return nullptr;
}

GRMatrix GRMatrix::mul(const PGroup& g, const GRMatrix& rhs) const {
    if (cols != rhs.rows) throw std::invalid_argument("GRMatrix::mul shape");
    GRMatrix out(rows, rhs.cols);
    for (std::size_t j = 0; j < rhs.cols; ++j) {
        std::map<std::size_t, GroupRingElem> acc;
        for (const auto& [k, b] : rhs.columns[j])
            for (const auto& [r, a] : columns[k]) acc[r] += a.mul(g, b);
        for (auto& [r, e] : acc)
            if (!e.empty()) out.set(r, j, std::move(e));
    }
    return out;
}

bool GRMatrix::is_zero() const {
    for (const auto& col : columns)
        if (!col.empty()) return false;
    return true;
}

exactlin::IntMatrix GRMatrix::augmented() const {
    exactlin::IntMatrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (const auto& [r, e] : columns[c]) {
            Int a = e.aug();
            if (a != 0) m.set(r, c, a);
        }
    return m;
}

}  // namespace grouppack
