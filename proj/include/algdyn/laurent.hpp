#pragma once

// Sparse Laurent polynomials in up to three variables, with exact integer
// (GMP) coefficients or complex ball coefficients.  All values are immutable
// after construction; every operation here is a pure function.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace algdyn {

constexpr int kMaxArity = 3;

// ---------------------------------------------------------------------------
// Exponent vectors

// Lattice exponent of a monomial u1^e0 * u2^e1 * u3^e2.  Unused slots stay
// zero, so lexicographic comparison of the full array is the canonical total
// order for every arity.
struct Exponents {
    std::array<int, kMaxArity> e{0, 0, 0};

    Exponents() = default;
    Exponents(int a) : e{a, 0, 0} {}
    Exponents(int a, int b) : e{a, b, 0} {}
    Exponents(int a, int b, int c) : e{a, b, c} {}

    int operator[](int i) const { return e[static_cast<size_t>(i)]; }
    int& operator[](int i) { return e[static_cast<size_t>(i)]; }

    friend bool operator==(const Exponents&, const Exponents&) = default;
    friend auto operator<=>(const Exponents& a, const Exponents& b) = default;

    Exponents operator+(const Exponents& o) const {
        return Exponents{e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2]};
    }
};

// ---------------------------------------------------------------------------
// Complex balls

// Complex value with an outward error radius.  Radii only ever grow under
// arithmetic (super-additive propagation, plus a rounding slack of a few ulp).
template <typename Real>
struct BallT {
    std::complex<Real> v{};
    Real r{0};

    BallT() = default;
    BallT(std::complex<Real> value) : v(value) {}
    BallT(std::complex<Real> value, Real radius) : v(value), r(radius) {}
    explicit BallT(Real x) : v(x) {}

    Real mag() const { return std::abs(v); }

    static Real slack(const std::complex<Real>& z) {
        return std::abs(z) * std::numeric_limits<Real>::epsilon() * 4;
    }

    BallT operator+(const BallT& o) const {
        std::complex<Real> s = v + o.v;
        return BallT{s, r + o.r + slack(s)};
    }
    BallT operator-(const BallT& o) const {
        std::complex<Real> s = v - o.v;
        return BallT{s, r + o.r + slack(s)};
    }
    BallT operator*(const BallT& o) const {
        std::complex<Real> p = v * o.v;
        return BallT{p, mag() * o.r + o.mag() * r + r * o.r + slack(p)};
    }
    BallT operator-() const { return BallT{-v, r}; }

    bool contains_zero() const { return mag() <= r; }
};

using Ball = BallT<double>;

// z^k for signed k; requires a ball not containing zero when k < 0.
template <typename Real>
BallT<Real> ball_pow(const BallT<Real>& b, long k) {
    if (k == 0) return BallT<Real>{std::complex<Real>(1)};
    BallT<Real> base = b;
    if (k < 0) {
        // 1/b with outward radius  r/(|v|(|v|-r))
        Real m = b.mag();
        if (m <= b.r)
            throw std::domain_error("ball_pow: inverting a ball that straddles zero");
        std::complex<Real> inv = std::complex<Real>(1) / b.v;
        base = BallT<Real>{inv, b.r / (m * (m - b.r)) + BallT<Real>::slack(inv)};
        k = -k;
    }
    BallT<Real> acc{std::complex<Real>(1)};
    while (k > 0) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Coefficient traits

template <typename C>
struct CoeffOps;

template <>
struct CoeffOps<mpz_class> {
    static bool is_zero(const mpz_class& c) { return c == 0; }
};

template <typename Real>
struct CoeffOps<BallT<Real>> {
    static bool is_zero(const BallT<Real>& c) { return c.v == std::complex<Real>(0) && c.r == 0; }
};

// ---------------------------------------------------------------------------
// The polynomial

class poly_error : public std::runtime_error {
public:
    explicit poly_error(const std::string& what) : std::runtime_error(what) {}
};

template <typename Coeff>
class LaurentPoly {
public:
    using coeff_type = Coeff;
    using term_map = std::map<Exponents, Coeff>;

    explicit LaurentPoly(int arity = 1) : arity_(check_arity(arity)) {}

    LaurentPoly(int arity, term_map terms) : arity_(check_arity(arity)) {
        for (auto& [e, c] : terms)
            if (!CoeffOps<Coeff>::is_zero(c)) terms_.emplace(e, std::move(c));
    }

    static LaurentPoly monomial(int arity, Exponents e, Coeff c) {
        LaurentPoly p(arity);
        if (!CoeffOps<Coeff>::is_zero(c)) p.terms_.emplace(e, std::move(c));
        return p;
    }
    static LaurentPoly constant(int arity, Coeff c) {
        return monomial(arity, Exponents{}, std::move(c));
    }

    int arity() const { return arity_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    const term_map& terms() const { return terms_; }

    bool is_monomial() const { return terms_.size() == 1; }

    const Coeff* coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? nullptr : &it->second;
    }

    LaurentPoly operator+(const LaurentPoly& o) const {
        require_same_arity(o);
        LaurentPoly out(arity_);
        out.terms_ = terms_;
        for (const auto& [e, c] : o.terms_) out.add_term(e, c);
        return out;
    }

    LaurentPoly operator-() const {
        LaurentPoly out(arity_);
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
        return out;
    }

    LaurentPoly operator-(const LaurentPoly& o) const { return *this + (-o); }

    LaurentPoly operator*(const LaurentPoly& o) const {
        require_same_arity(o);
        LaurentPoly out(arity_);
        for (const auto& [ea, ca] : terms_)
            for (const auto& [eb, cb] : o.terms_) out.add_term(ea + eb, ca * cb);
        return out;
    }

    LaurentPoly operator*(const Coeff& s) const {
        LaurentPoly out(arity_);
        for (const auto& [e, c] : terms_) {
            Coeff p = c * s;
            if (!CoeffOps<Coeff>::is_zero(p)) out.terms_.emplace(e, std::move(p));
        }
        return out;
    }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.arity_ == b.arity_ && a.terms_ == b.terms_;
    }

    // Shift by a monomial: p * u^e.
    LaurentPoly shifted(const Exponents& e) const {
        LaurentPoly out(arity_);
        for (const auto& [e0, c] : terms_) out.terms_.emplace(e0 + e, c);
        return out;
    }

    // Exponent range of one variable over the support.
    std::pair<int, int> exponent_range(int var) const {
        if (terms_.empty()) throw poly_error("exponent_range: zero polynomial");
        int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
        for (const auto& [e, c] : terms_) {
            lo = std::min(lo, e[var]);
            hi = std::max(hi, e[var]);
        }
        return {lo, hi};
    }

    int degree_span(int var) const {
        auto [lo, hi] = exponent_range(var);
        return hi - lo;
    }

    void add_term(const Exponents& e, const Coeff& c) {
        if (CoeffOps<Coeff>::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second = it->second + c;
            if (CoeffOps<Coeff>::is_zero(it->second)) terms_.erase(it);
        }
    }

private:
    static int check_arity(int d) {
        if (d < 1 || d > kMaxArity) throw poly_error("arity must be 1, 2 or 3");
        return d;
    }
    void require_same_arity(const LaurentPoly& o) const {
        if (arity_ != o.arity_) throw poly_error("arity mismatch in ring operation");
    }

    int arity_;
    term_map terms_;
};

using IntLaurentPoly = LaurentPoly<mpz_class>;
template <typename Real>
using CxLaurentPolyT = LaurentPoly<BallT<Real>>;
using CxLaurentPoly = CxLaurentPolyT<double>;

// ---------------------------------------------------------------------------
// Integer-specific helpers

inline mpz_class content(const IntLaurentPoly& p) {
    mpz_class g = 0;
    for (const auto& [e, c] : p.terms()) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;  // 0 for the zero polynomial
}

inline IntLaurentPoly primitive_part(const IntLaurentPoly& p) {
    mpz_class g = content(p);
    if (g <= 1) return p;
    IntLaurentPoly::term_map out;
    for (const auto& [e, c] : p.terms()) out.emplace(e, c / g);
    return IntLaurentPoly(p.arity(), std::move(out));
}

// Normalized form used as a canonical key: primitive, minimal exponent 0 in
// every variable, first (lexicographically smallest) coefficient positive.
inline IntLaurentPoly canonical_primitive(const IntLaurentPoly& p) {
    if (p.is_zero()) return p;
    IntLaurentPoly q = primitive_part(p);
    Exponents shift;
    for (int v = 0; v < p.arity(); ++v) shift[v] = -q.exponent_range(v).first;
    q = q.shifted(shift);
    if (q.terms().begin()->second < 0) q = -q;
    return q;
}

// Exact conversions

template <typename Real>
long double to_long_double(const mpz_class& z);

inline long double mpz_to_long_double(const mpz_class& z) {
    // limb-by-limb accumulation keeps the full 64-bit long double mantissa
    size_t n = mpz_size(z.get_mpz_t());
    long double x = 0;
    const long double base = std::ldexp(1.0L, GMP_NUMB_BITS);
    for (size_t i = n; i-- > 0;)
        x = x * base + static_cast<long double>(mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i)));
    return mpz_sgn(z.get_mpz_t()) < 0 ? -x : x;
}

template <typename Real = double>
CxLaurentPolyT<Real> to_complex(const IntLaurentPoly& p) {
    typename CxLaurentPolyT<Real>::term_map out;
    for (const auto& [e, c] : p.terms()) {
        long double x = mpz_to_long_double(c);
        std::complex<Real> v(static_cast<Real>(x), 0);
        Real r = std::abs(static_cast<Real>(x - static_cast<long double>(static_cast<Real>(x))));
        out.emplace(e, BallT<Real>{v, r});
    }
    return CxLaurentPolyT<Real>(p.arity(), std::move(out));
}

// ---------------------------------------------------------------------------
// Parsing

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& text, int arity) : s_(text), arity_(arity) {}

    IntLaurentPoly run() {
        choose_variable_mapping();
        IntLaurentPoly p = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    // Variables are u1..u9 in the source text.  Indices <= arity map to their
    // slot; a polynomial written in a single foreign variable (the paper's g
    // lives in u3) is accepted at arity 1 with that variable as the sole slot.
    void choose_variable_mapping() {
        std::array<bool, 10> used{};
        for (size_t i = 0; i + 1 < s_.size(); ++i)
            if (s_[i] == 'u' && std::isdigit(static_cast<unsigned char>(s_[i + 1])))
                used[static_cast<size_t>(s_[i + 1] - '0')] = true;
        int distinct = 0, single = 0;
        for (int d = 1; d <= 9; ++d)
            if (used[static_cast<size_t>(d)]) {
                ++distinct;
                single = d;
            }
        if (arity_ == 1 && distinct == 1 && single > 1) alias_ = single;
    }

    int var_slot(int index, size_t at) const {
        if (index == alias_) return 0;
        if (index < 1 || index > arity_)
            throw parse_error("variable u" + std::to_string(index) + " exceeds arity " +
                                  std::to_string(arity_),
                              at);
        return index - 1;
    }

    mpz_class parse_int() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer");
        return mpz_class(s_.substr(start, pos_ - start));
    }

    long parse_signed_int() {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer exponent");
        long v = std::stol(s_.substr(start, pos_ - start));
        return neg ? -v : v;
    }

    bool starts_factor(char c) const {
        return std::isdigit(static_cast<unsigned char>(c)) || c == 'u' || c == '(';
    }

    IntLaurentPoly parse_factor() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            IntLaurentPoly inner = parse_expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (c == 'u') {
            size_t at = pos_;
            ++pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw parse_error("expected variable index after 'u'", pos_);
            int index = s_[pos_] - '0';
            if (index == 0) throw parse_error("variable index must be at least 1", pos_);
            ++pos_;
            int slot = var_slot(index, at);
            long exp = 1;
            if (peek() == '^') {
                ++pos_;
                exp = parse_signed_int();
            }
            Exponents e;
            e[slot] = static_cast<int>(exp);
            return IntLaurentPoly::monomial(arity_, e, 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return IntLaurentPoly::constant(arity_, parse_int());
        }
        fail("expected integer, variable or '('");
    }

    IntLaurentPoly parse_term() {
        IntLaurentPoly p = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                p = p * parse_factor();
            } else if (starts_factor(c)) {  // implicit multiplication, e.g. 2u1
                p = p * parse_factor();
            } else {
                return p;
            }
        }
    }

    IntLaurentPoly parse_expr() {
        IntLaurentPoly p(arity_);
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        } else if (peek() == '+') {
            ++pos_;
        }
        IntLaurentPoly t = parse_term();
        p = neg ? p - t : p + t;
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                IntLaurentPoly next = parse_term();
                p = (c == '+') ? p + next : p - next;
            } else {
                return p;
            }
        }
    }

    const std::string& s_;
    size_t pos_ = 0;
    int arity_;
    int alias_ = -1;
};

}  // namespace detail

inline IntLaurentPoly parse_poly(const std::string& text, int arity) {
    return detail::PolyParser(text, arity).run();
}

// Canonical text form: terms in lexicographic exponent order with explicit
// signs, `u1^2*u2^-1` style monomials.
inline std::string format_poly(const IntLaurentPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        bool neg = c < 0;
        mpz_class a = neg ? mpz_class(-c) : c;
        if (first) {
            if (neg) out << "-";
            first = false;
        } else {
            out << (neg ? " - " : " + ");
        }
        std::string mono;
        for (int v = 0; v < p.arity(); ++v) {
            if (e[v] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "u" + std::to_string(v + 1);
            if (e[v] != 1) mono += "^" + std::to_string(e[v]);
        }
        if (mono.empty()) {
            out << a.get_str();
        } else {
            if (a != 1) out << a.get_str() << "*";
            out << mono;
        }
    }
    return out.str();
}

template <typename P>
std::ostream& operator<<(std::ostream& os, const LaurentPoly<P>& p);

inline std::ostream& operator<<(std::ostream& os, const IntLaurentPoly& p) {
    return os << format_poly(p);
}

// ---------------------------------------------------------------------------
// Newton polygon (arity 2)

struct NewtonPolytope {
    // extreme points of the support, counterclockwise, starting at the
    // lexicographic minimum
    std::vector<std::array<int, 2>> vertices;

    friend bool operator==(const NewtonPolytope&, const NewtonPolytope&) = default;
};

template <typename Coeff>
NewtonPolytope newton_polygon(const LaurentPoly<Coeff>& p) {
    if (p.arity() != 2) throw poly_error("newton_polygon expects arity 2");
    if (p.is_zero()) throw poly_error("newton_polygon of the zero polynomial");

    std::vector<std::array<int, 2>> pts;
    pts.reserve(p.term_count());
    for (const auto& [e, c] : p.terms()) pts.push_back({e[0], e[1]});
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    if (pts.size() == 1) return NewtonPolytope{{pts[0]}};

    auto cross = [](const std::array<int, 2>& o, const std::array<int, 2>& a,
                    const std::array<int, 2>& b) -> long {
        return static_cast<long>(a[0] - o[0]) * (b[1] - o[1]) -
               static_cast<long>(a[1] - o[1]) * (b[0] - o[0]);
    };

    // monotone chain; strict turns only, so collinear points are dropped
    std::vector<std::array<int, 2>> hull;
    for (const auto& q : pts) {  // lower
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), q) <= 0)
            hull.pop_back();
        hull.push_back(q);
    }
    size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();  // first point repeated

    // monotone chain emits CCW starting at the sorted minimum, which is the
    // lexicographic minimum already
    return NewtonPolytope{std::move(hull)};
}

// ---------------------------------------------------------------------------
// Monomial coordinate changes (arity 2)

// 2x2 integer matrix given by rows; used both as a planar lattice basis and
// as a monomial substitution.
struct Mat2 {
    std::array<std::array<long, 2>, 2> row{};

    Mat2() = default;
    Mat2(long a, long b, long c, long d) : row{{{a, b}, {c, d}}} {}

    long det() const { return row[0][0] * row[1][1] - row[0][1] * row[1][0]; }

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

// Rewrites p(u) in coordinates w with u-exponent a*b1 + b*b2 -> w1^a w2^b.
// Every exponent of p must lie in the lattice spanned by the rows of `basis`.
template <typename Coeff>
LaurentPoly<Coeff> reexpress_on_lattice(const LaurentPoly<Coeff>& p, const Mat2& basis) {
    if (p.arity() != 2) throw poly_error("reexpress_on_lattice expects arity 2");
    long d = basis.det();
    if (d == 0) throw poly_error("reexpress_on_lattice: singular basis");

    typename LaurentPoly<Coeff>::term_map out;
    for (const auto& [e, c] : p.terms()) {
        // solve (a,b) * basis = e
        long na = static_cast<long>(e[0]) * basis.row[1][1] - static_cast<long>(e[1]) * basis.row[1][0];
        long nb = static_cast<long>(e[1]) * basis.row[0][0] - static_cast<long>(e[0]) * basis.row[0][1];
        if (na % d != 0 || nb % d != 0)
            throw poly_error("exponent (" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
                             ") lies outside the lattice");
        out.emplace(Exponents{static_cast<int>(na / d), static_cast<int>(nb / d)}, c);
    }
    return LaurentPoly<Coeff>(2, std::move(out));
}

// ---------------------------------------------------------------------------
// Twists and specializations

// Multiplies variable `var` by the scalar `s`: coefficients pick up s^e.
template <typename Real>
CxLaurentPolyT<Real> twist(const CxLaurentPolyT<Real>& p, int var, const BallT<Real>& s) {
    if (var < 0 || var >= p.arity()) throw poly_error("twist: variable out of range");
    if (s.contains_zero()) throw poly_error("twist: zero twist scalar");
    typename CxLaurentPolyT<Real>::term_map out;
    for (const auto& [e, c] : p.terms()) out.emplace(e, c * ball_pow(s, e[var]));
    return CxLaurentPolyT<Real>(p.arity(), std::move(out));
}

inline CxLaurentPoly twist(const IntLaurentPoly& p, int var, const Ball& s) {
    return twist(to_complex(p), var, s);
}

// Substitutes `value` for variable `var`, reducing the arity by one.
template <typename Real>
CxLaurentPolyT<Real> specialize(const CxLaurentPolyT<Real>& p, int var, const BallT<Real>& value) {
    if (var < 0 || var >= p.arity()) throw poly_error("specialize: variable out of range");
    if (p.arity() == 1) throw poly_error("specialize: arity would drop to zero");
    if (value.contains_zero()) {
        bool has_neg = false;
        for (const auto& [e, c] : p.terms()) has_neg |= e[var] < 0;
        if (has_neg) throw poly_error("specialize: zero value with negative exponent");
    }
    CxLaurentPolyT<Real> out(p.arity() - 1);
    for (const auto& [e, c] : p.terms()) {
        Exponents f;
        int k = 0;
        for (int v = 0; v < p.arity(); ++v)
            if (v != var) f[k++] = e[v];
        out.add_term(f, c * ball_pow(value, e[var]));
    }
    return out;
}

inline CxLaurentPoly specialize(const IntLaurentPoly& p, int var, const Ball& value) {
    return specialize(to_complex(p), var, value);
}

// Evaluation at a point (all variables at once).
template <typename Real>
BallT<Real> evaluate(const CxLaurentPolyT<Real>& p, const std::array<BallT<Real>, kMaxArity>& x) {
    BallT<Real> acc{};
    for (const auto& [e, c] : p.terms()) {
        BallT<Real> t = c;
        for (int v = 0; v < p.arity(); ++v)
            if (e[v] != 0) t = t * ball_pow(x[static_cast<size_t>(v)], e[v]);
        acc = acc + t;
    }
    return acc;
}

template <typename Real>
BallT<Real> evaluate(const IntLaurentPoly& p, const std::array<BallT<Real>, kMaxArity>& x) {
    return evaluate(to_complex<Real>(p), x);
}

}  // namespace algdyn
