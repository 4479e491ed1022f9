#pragma once

// Mahler measures and sublattice entropies.
//
// The one-variable measure is exact Jensen: log|lead| + sum log+ |root|.
// The two-variable measure iterates: uniform midpoint quadrature over the
// outer circle (variable w1), exact Jensen in the inner variable at every
// node, doubling the node count until successive estimates agree.  The
// reported quadrature error is heuristic (log+ kinks where inner roots cross
// the unit circle keep it from being a bound) and is flagged as such.
//
// For a Generic rank-two sublattice the sub-action entropy is
//     log M( prod_{zeta: g(zeta)=0} Fbar(w1, w3 * zeta^{-m3}) ),
// the Mahler measure of the exact complex twisted product of the norm-product
// relation Fbar.  The clearing constant |g(0)|^{m3 j} enters only the integer
// normal form produced by g_twisted_relation, not the entropy.

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <variant>

#include "algdyn/classify.hpp"
#include "algdyn/lattice.hpp"
#include "algdyn/laurent.hpp"
#include "algdyn/roots.hpp"

namespace algdyn {

struct QuadratureConfig {
    int initial_nodes = 256;
    int max_depth = 8;
    double tolerance = 1e-7;

    void validate() const {
        if (initial_nodes < 16) throw std::invalid_argument("quadrature: nodes must be >= 16");
        if (max_depth < 0 || max_depth > 24)
            throw std::invalid_argument("quadrature: depth out of range");
        if (!(tolerance > 0)) throw std::invalid_argument("quadrature: tolerance must be > 0");
    }
};

struct MahlerValue {
    double value = 0;
    double error = 0;
    bool heuristic = false;  // true when a quadrature convergence estimate is involved
    bool converged = true;   // false only when max_depth was exhausted
};

class entropy_error : public poly_error {
public:
    using poly_error::poly_error;
};

// ---------------------------------------------------------------------------
// Jensen (one variable)

namespace detail {

constexpr long double kTwoPi = 6.28318530717958647692528676655900577L;

inline double log_plus(double x) { return x > 1 ? std::log(x) : 0.0; }

struct JensenOut {
    long double value = 0;
    long double error = 0;
};

// log|lead| + sum log+|root| with outward error from root radii and the lead
// coefficient ball.
template <typename R>
JensenOut jensen_from_dense(const DenseCoeffsT<R>& q, double root_target,
                            const std::vector<std::complex<R>>* warm = nullptr,
                            std::vector<std::complex<R>>* roots_out = nullptr) {
    // Strip end coefficients that are zero up to their ball radius.  Origin
    // zeros contribute nothing to log M; a vanishing top coefficient sends a
    // root to infinity whose log+ cancels the lost log|lead| in the limit, so
    // dropping it costs only the (accumulated) perturbation below.
    JensenOut out;
    size_t lo = 0, hi = q.c.size();
    auto negligible = [&](size_t k) {
        return std::abs(q.c[k]) <= 64 * q.rad[k] + std::numeric_limits<R>::min();
    };
    while (hi - lo > 1 && negligible(hi - 1)) {
        out.error += static_cast<long double>(
            (std::abs(q.c[hi - 1]) + q.rad[hi - 1]) /
            std::max(std::abs(q.c[hi - 2]) - q.rad[hi - 2], std::numeric_limits<R>::min()));
        --hi;
    }
    while (hi - lo > 1 && negligible(lo)) {
        out.error += static_cast<long double>(
            (std::abs(q.c[lo]) + q.rad[lo]) /
            std::max(std::abs(q.c[lo + 1]) - q.rad[lo + 1], std::numeric_limits<R>::min()));
        ++lo;
    }
    if (hi - lo == 1 && negligible(lo)) throw entropy_error("mahler: zero polynomial slice");

    DenseCoeffsT<R> trimmed;
    const DenseCoeffsT<R>* t = &q;
    if (lo != 0 || hi != q.c.size()) {
        trimmed.c.assign(q.c.begin() + static_cast<long>(lo), q.c.begin() + static_cast<long>(hi));
        trimmed.rad.assign(q.rad.begin() + static_cast<long>(lo),
                           q.rad.begin() + static_cast<long>(hi));
        t = &trimmed;
    }

    R lead = std::abs(t->c.back());
    R lead_rad = t->rad.back();
    if (lead <= lead_rad)
        throw entropy_error("mahler: leading coefficient is not separated from zero");
    out.value = std::log(lead);
    out.error += std::log1p(lead_rad / (lead - lead_rad));

    if (t->c.size() > 1) {
        RootResult rr = solve_dense(*t, 0, root_target, warm);
        if (roots_out) {
            roots_out->clear();
            for (const auto& rb : rr.roots) roots_out->push_back(std::complex<R>(rb.z));
        }
        for (const auto& rb : rr.roots) {
            double m = std::abs(rb.z);
            out.value += log_plus(m);
            double up = log_plus(m + rb.radius);
            double dn = log_plus(std::max(m - rb.radius, 0.0));
            out.error += up - dn;
        }
    } else if (roots_out) {
        roots_out->clear();
    }
    return out;
}

}  // namespace detail

// Exact-formula path for a univariate Laurent polynomial; no quadrature.
template <typename Coeff>
MahlerValue mahler_1d_jensen(const LaurentPoly<Coeff>& p, double root_target = 1e-12) {
    int origin = 0;
    detail::DenseCoeffs q = detail::dense_from_poly<long double>(p, &origin);
    detail::JensenOut j = detail::jensen_from_dense(q, root_target);
    return MahlerValue{static_cast<double>(j.value), static_cast<double>(j.error), false, true};
}

// Midpoint Riemann sum of log|p| on the unit circle; oracle-grade only.
template <typename Coeff>
double riemann_1d(const LaurentPoly<Coeff>& p, long resolution) {
    int origin = 0;
    detail::DenseCoeffs q = detail::dense_from_poly<long double>(p, &origin);
    long double acc = 0, comp = 0;
    long used = 0;
    for (long i = 0; i < resolution; ++i) {
        long double t = (static_cast<long double>(i) + 0.5L) / resolution;
        detail::cld z(std::cos(detail::kTwoPi * t), std::sin(detail::kTwoPi * t));
        long double m = std::abs(detail::eval_poly(q.c, z));
        if (m < 1e-14L) continue;  // integrable log singularity
        long double term = std::log(m) - comp;
        long double next = acc + term;
        comp = (next - acc) - term;
        acc = next;
        ++used;
    }
    return static_cast<double>(acc / std::max(used, 1L));
}

// ---------------------------------------------------------------------------
// Two-variable Mahler measure

namespace detail {

template <typename Real>
struct SliceView {
    // terms grouped by the inner (w2) exponent: inner_exp -> list of
    // (outer exponent, coefficient)
    int jmin = 0;
    std::vector<std::vector<std::pair<int, BallT<Real>>>> groups;

    explicit SliceView(const CxLaurentPolyT<Real>& p) {
        auto [lo, hi] = p.exponent_range(1);
        jmin = lo;
        groups.assign(static_cast<size_t>(hi - lo + 1), {});
        for (const auto& [e, c] : p.terms())
            groups[static_cast<size_t>(e[1] - jmin)].emplace_back(e[0], c);
    }

    // dense inner coefficients at w1 = e(t); powers from the angle directly,
    // so large outer exponents lose no accuracy
    template <typename R>
    void at_into(long double t, DenseCoeffsT<R>& q) const {
        q.c.assign(groups.size(), std::complex<R>(0));
        q.rad.assign(groups.size(), 0);
        const R eps = std::numeric_limits<R>::epsilon();
        for (size_t j = 0; j < groups.size(); ++j) {
            for (const auto& [e1, c] : groups[j]) {
                long double a = t * e1;
                a -= std::floor(a);
                R angle = static_cast<R>(kTwoPi * a);
                std::complex<R> ph(std::cos(angle), std::sin(angle));
                std::complex<R> cv(static_cast<R>(c.v.real()), static_cast<R>(c.v.imag()));
                q.c[j] += cv * ph;
                q.rad[j] += static_cast<R>(c.r) + 4 * eps * std::abs(cv);
            }
            q.rad[j] += 4 * eps * std::abs(q.c[j]);
        }
    }
};

}  // namespace detail

// Iterated Mahler measure: outer quadrature in w1, inner Jensen in the other
// variable.  Refines by node doubling until successive estimates differ by
// less than cfg.tolerance; non-convergence returns the best estimate flagged.
template <typename Real>
MahlerValue mahler_2d(const CxLaurentPolyT<Real>& p, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (p.arity() != 2) throw entropy_error("mahler_2d expects arity 2");
    if (p.is_zero()) throw entropy_error("mahler_2d of the zero polynomial");

    if (p.is_monomial()) {
        const auto& c = p.terms().begin()->second;
        if (c.contains_zero()) throw entropy_error("mahler_2d: monomial straddles zero");
        double m = c.mag();
        return MahlerValue{std::log(m), static_cast<double>(std::log1p(c.r / (m - c.r))), false,
                           true};
    }

    detail::SliceView<Real> view(p);

    long double prev = 0, prev_err = 0, last_diff = 0;
    bool have_prev = false;
    long nodes = cfg.initial_nodes;
    for (int depth = 0; depth <= cfg.max_depth; ++depth, nodes *= 2) {
        // Outer nodes evaluate in parallel over fixed 256-node chunks (the
        // warm-start chain restarts at each chunk boundary), then sum in
        // fixed index order, so the result is independent of scheduling and
        // thread count.
        struct NodeOut {
            long double value = 0, error = 0;
            bool used = false;
        };
        std::vector<NodeOut> per_node(static_cast<size_t>(nodes));
        const long chunk = 256;
        const long nchunks = (nodes + chunk - 1) / chunk;

        auto run_chunk = [&](long c) {
            std::vector<std::complex<double>> warm, tmp;
            detail::DenseCoeffsT<double> q;
            long end = std::min((c + 1) * chunk, nodes);
            for (long i = c * chunk; i < end; ++i) {
                long double t = (static_cast<long double>(i) + 0.5L) / nodes;
                view.at_into(t, q);
                bool degenerate = true;
                for (size_t k = 0; k < q.c.size(); ++k)
                    degenerate &= std::abs(q.c[k]) <= q.rad[k] + 1e-300;
                if (degenerate) continue;  // measure-zero slice, skip
                const std::vector<std::complex<double>>* w =
                    (!warm.empty() && warm.size() + 1 == q.c.size()) ? &warm : nullptr;
                try {
                    detail::JensenOut j = detail::jensen_from_dense(q, 1e-11, w, &tmp);
                    std::swap(warm, tmp);
                    per_node[static_cast<size_t>(i)] = NodeOut{j.value, j.error, true};
                } catch (const entropy_error&) {
                    warm.clear();  // slice degenerated mid-check: skip the node
                }
            }
        };

        unsigned hw = std::thread::hardware_concurrency();
        long nthreads = std::min<long>(hw ? hw : 1, nchunks);
        if (nthreads <= 1) {
            for (long c = 0; c < nchunks; ++c) run_chunk(c);
        } else {
            std::atomic<long> next_chunk{0};
            std::vector<std::exception_ptr> errors(static_cast<size_t>(nthreads));
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(nthreads));
            for (long t = 0; t < nthreads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        for (;;) {
                            long c = next_chunk.fetch_add(1);
                            if (c >= nchunks) break;
                            run_chunk(c);
                        }
                    } catch (...) {
                        errors[static_cast<size_t>(t)] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        long double acc = 0, comp = 0, errs = 0;
        long used = 0;
        for (const NodeOut& n : per_node) {
            if (!n.used) continue;
            long double term = n.value - comp;
            long double next = acc + term;
            comp = (next - acc) - term;
            acc = next;
            errs += n.error;
            ++used;
        }
        if (used == 0) throw entropy_error("mahler_2d: every quadrature node degenerated");
        long double est = acc / used;
        long double err = errs / used;
        if (have_prev) {
            last_diff = std::abs(est - prev);
            if (last_diff < cfg.tolerance)
                return MahlerValue{static_cast<double>(est),
                                   static_cast<double>(last_diff + err), true, true};
        }
        prev = est;
        prev_err = err;
        have_prev = true;
    }
    // max_depth exhausted: best estimate with the last difference as error
    return MahlerValue{static_cast<double>(prev), static_cast<double>(last_diff + prev_err),
                       true, false};
}

inline MahlerValue mahler_2d(const IntLaurentPoly& p, const QuadratureConfig& cfg = {}) {
    return mahler_2d(to_complex<long double>(p), cfg);
}

// Brute-force cross-check: plain Riemann double sum of log|p| on a uniform
// torus grid, skipping near-zero nodes.  Loose tolerance by construction.
template <typename Real>
double direct_double_integral_oracle(const CxLaurentPolyT<Real>& p, long resolution) {
    if (p.arity() != 2) throw entropy_error("oracle expects arity 2");
    if (p.is_zero()) throw entropy_error("oracle of the zero polynomial");
    detail::SliceView<Real> view(p);
    detail::DenseCoeffsT<double> q;
    long double acc = 0, comp = 0;
    long used = 0;
    for (long i = 0; i < resolution; ++i) {
        long double t = (static_cast<long double>(i) + 0.5L) / resolution;
        view.at_into(t, q);
        for (long k = 0; k < resolution; ++k) {
            double s = (static_cast<double>(k) + 0.5) / resolution;
            std::complex<double> z(std::cos(2 * M_PI * s), std::sin(2 * M_PI * s));
            double m = std::abs(detail::eval_poly(q.c, z));
            if (m < 1e-14) continue;
            long double term = std::log(m) - comp;
            long double next = acc + term;
            comp = (next - acc) - term;
            acc = next;
            ++used;
        }
    }
    return static_cast<double>(acc / std::max(used, 1L));
}

inline double direct_double_integral_oracle(const IntLaurentPoly& p, long resolution) {
    return direct_double_integral_oracle(to_complex<long double>(p), resolution);
}

// ---------------------------------------------------------------------------
// Norm product

namespace detail {

template <typename Real>
CxLaurentPolyT<Real> char_twisted(const IntLaurentPoly& f, const TorsionPoint& w) {
    typename CxLaurentPolyT<Real>::term_map out;
    for (const auto& [e, c] : f.terms()) {
        long num = w.i * e[0] + w.j * e[1];
        long r = ((num % w.k) + w.k) % w.k;
        long double a = kTwoPi * static_cast<long double>(r) / static_cast<long double>(w.k);
        std::complex<Real> ph(static_cast<Real>(std::cos(a)), static_cast<Real>(std::sin(a)));
        long double x = mpz_to_long_double(c);
        BallT<Real> coeff{std::complex<Real>(static_cast<Real>(x), 0),
                          static_cast<Real>(std::abs(x) * 1e-18L)};
        out.emplace(e, coeff * BallT<Real>{ph, static_cast<Real>(4e-19L)});
    }
    return CxLaurentPolyT<Real>(2, std::move(out));
}

// nearest-integer rounding with the residual (|center - round| + radius)
inline std::pair<IntLaurentPoly, double> round_to_int(const CxLaurentPolyT<long double>& p) {
    IntLaurentPoly::term_map out;
    double residual = 0;
    for (const auto& [e, c] : p.terms()) {
        long double re = c.v.real();
        long double im = c.v.imag();
        long double rounded = std::floor(re + 0.5L);
        residual = std::max(residual,
                            static_cast<double>(std::abs(re - rounded) + std::abs(im) + c.r));
        if (rounded != 0) {
            mpz_class z;
            if (std::abs(rounded) < 9e18L) {
                z = mpz_class(static_cast<long>(rounded));
            } else {
                char buf[64];
                snprintf(buf, sizeof buf, "%.0Lf", rounded);
                z = mpz_class(buf);
            }
            out.emplace(e, z);
        }
    }
    return {IntLaurentPoly(2, std::move(out)), residual};
}

}  // namespace detail

// Full norm: prod over the dual torsion points of f(w1*u1, w2*u2), re-expressed
// in the sublattice coordinates.  Integer by Galois stability; rounding is
// residual-checked and the result is re-evaluated at random torus points.
inline IntLaurentPoly norm_product(const IntLaurentPoly& f, const PlanarLattice& L) {
    if (f.is_zero() || f.arity() != 2) throw entropy_error("norm_product expects nonzero arity 2");
    if (L.index < 1) throw entropy_error("norm_product: index must be >= 1");

    auto torsion = dual_torsion_points(L);
    CxLaurentPolyT<long double> prod =
        CxLaurentPolyT<long double>::constant(2, BallT<long double>{std::complex<long double>(1)});
    for (const auto& w : torsion) prod = prod * detail::char_twisted<long double>(f, w);

    auto [rounded, residual] = detail::round_to_int(prod);
    if (residual >= 1e-6)
        throw entropy_error("norm_product: rounding residual " + std::to_string(residual) +
                            " exceeds 1e-6");

    IntLaurentPoly reexpressed = [&] {
        try {
            return reexpress_on_lattice(rounded, L.rows);
        } catch (const poly_error& e) {
            throw entropy_error(std::string("norm_product: support not contained in the "
                                            "lattice (logic error): ") +
                                e.what());
        }
    }();

    // spot re-evaluation at 8 deterministic pseudo-random torus points
    std::mt19937 rng(0x6d61686cU);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int s = 0; s < 8; ++s) {
        long double t1 = uni(rng), t2 = uni(rng);
        std::array<BallT<long double>, kMaxArity> u{};
        u[0] = BallT<long double>{std::complex<long double>(std::cos(detail::kTwoPi * t1),
                                                            std::sin(detail::kTwoPi * t1))};
        u[1] = BallT<long double>{std::complex<long double>(std::cos(detail::kTwoPi * t2),
                                                            std::sin(detail::kTwoPi * t2))};
        BallT<long double> direct = evaluate(prod, u);
        std::array<BallT<long double>, kMaxArity> wv{};
        auto upow = [&](long e1, long e2) {
            return ball_pow(u[0], e1) * ball_pow(u[1], e2);
        };
        wv[0] = upow(L.rows.row[0][0], L.rows.row[0][1]);
        wv[1] = upow(L.rows.row[1][0], L.rows.row[1][1]);
        BallT<long double> via_w = evaluate(to_complex<long double>(reexpressed), wv);
        if (std::abs(direct.v - via_w.v) > 1e-6L * (1 + std::abs(direct.v)))
            throw entropy_error("norm_product: spot re-evaluation mismatch");
    }
    return reexpressed;
}

// ---------------------------------------------------------------------------
// g-twisted relation

namespace detail {

// prod over the roots of g (with multiplicity) of Fbar(w1, w3 * zeta^{-m3}),
// optionally with each twist scaled by extra (the |g(0)|^{m3} clearing).
inline CxLaurentPolyT<long double> twisted_product(const IntLaurentPoly& fbar,
                                                   const RootResult& groots, long m3,
                                                   long double extra_scale) {
    CxLaurentPolyT<long double> base = to_complex<long double>(fbar);
    CxLaurentPolyT<long double> prod =
        CxLaurentPolyT<long double>::constant(2, BallT<long double>{std::complex<long double>(1)});
    for (const auto& rb : groots.roots) {
        BallT<long double> zeta{std::complex<long double>(rb.z.real(), rb.z.imag()),
                                static_cast<long double>(rb.radius)};
        BallT<long double> tw = ball_pow(zeta, -m3);
        tw = tw * BallT<long double>{std::complex<long double>(extra_scale)};
        prod = prod * twist(base, 1, tw);
    }
    return prod;
}

}  // namespace detail

// Integer normal form of the twisted relation: Fbar is normalized to minimal
// w3-exponent 0, the w3^j coefficient is cleared by |g(0)|^{m3 j}, and the
// content is divided out.  (Equivalently: substitute w3 -> |g(0)|^{m3} w3 in
// the complex product and round.)
inline IntLaurentPoly g_twisted_relation(const IntLaurentPoly& fbar, const IntLaurentPoly& g,
                                         long m3) {
    if (fbar.is_zero() || fbar.arity() != 2)
        throw entropy_error("g_twisted_relation expects nonzero arity-2 Fbar");
    if (m3 < 1) throw entropy_error("g_twisted_relation: m3 must be a positive integer");
    const mpz_class* g0p = g.coeff(Exponents{0});
    if (!g0p || *g0p == 0)
        throw entropy_error("g_twisted_relation: g(0) must be nonzero");
    long double g0 = std::abs(mpz_to_long_double(*g0p));

    RootResult groots = univariate_roots(g, 1e-12);

    auto [lo2, hi2] = fbar.exponent_range(1);
    IntLaurentPoly f0 = fbar.shifted(Exponents{0, -lo2});

    long double scale = std::pow(g0, static_cast<long double>(m3));
    CxLaurentPolyT<long double> prod = detail::twisted_product(f0, groots, m3, scale);
    auto [rounded, residual] = detail::round_to_int(prod);
    if (residual >= 1e-6)
        throw entropy_error("g_twisted_relation: rounding residual " + std::to_string(residual) +
                            " exceeds 1e-6");
    return primitive_part(rounded);
}

// ---------------------------------------------------------------------------
// Sublattice entropy

enum class EntropyVariant { Finite, MultipleOfLogMahlerG, PlanarStructural };

inline const char* variant_name(EntropyVariant v) {
    switch (v) {
        case EntropyVariant::Finite: return "finite";
        case EntropyVariant::MultipleOfLogMahlerG: return "multiple-of-logM(g)";
        case EntropyVariant::PlanarStructural: return "planar-structural";
    }
    return "?";
}

struct EntropyResult {
    EntropyVariant variant = EntropyVariant::Finite;
    MahlerValue value{};        // Finite value, or the log M(g) base (axis case)
    std::string geometry_key;   // canonical lattice descriptor (axis case)
    IntLaurentPoly f_key{2};    // canonical primitive f (axis + planar comparisons)
};

inline EntropyResult sublattice_entropy(const SystemPresentation& sys, const SublatticeBasis& L,
                                        const QuadratureConfig& cfg = {}) {
    validate_presentation(sys);
    LatticeCase lc = classify_lattice(L);

    EntropyResult out;
    out.f_key = canonical_primitive(sys.f);

    switch (lc.tag) {
        case LatticeTag::Planar:
            out.variant = EntropyVariant::PlanarStructural;
            return out;
        case LatticeTag::AxisDegenerate:
            out.variant = EntropyVariant::MultipleOfLogMahlerG;
            out.value = mahler_1d_jensen(sys.g);
            out.geometry_key = lc.canonical.str();
            return out;
        case LatticeTag::Generic:
            break;
    }

    PlanarLattice proj = planar_projection(lc);
    IntLaurentPoly fbar = [&] {
        try {
            return norm_product(sys.f, proj);
        } catch (const std::exception& e) {
            throw entropy_error(std::string("sublattice_entropy: norm product stage failed: ") +
                                e.what());
        }
    }();
    long m3 = lc.m[2];
    RootResult groots = [&] {
        try {
            return univariate_roots(sys.g, 1e-12);
        } catch (const std::exception& e) {
            throw entropy_error(std::string("sublattice_entropy: root stage failed: ") + e.what());
        }
    }();
    CxLaurentPolyT<long double> twisted = detail::twisted_product(fbar, groots, m3, 1.0L);
    try {
        out.variant = EntropyVariant::Finite;
        out.value = mahler_2d(twisted, cfg);
    } catch (const std::exception& e) {
        throw entropy_error(std::string("sublattice_entropy: quadrature stage failed: ") +
                            e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Completely positive entropy evidence

struct CpeEvidence {
    bool cpe = false;
    double value = 0;   // the tested log M
    std::string what;   // which quantity was tested
};

// Kronecker dichotomy: log M vanishes exactly for (+-) products of cyclotomic
// polynomials and monomials, so any sub-action entropy above the cutoff
// certifies completely positive entropy for that sublattice.  The cutoff
// default sits far below Lehmer's 0.162... yet far above quadrature noise.
inline CpeEvidence is_cpe_sublattice(const SystemPresentation& sys, const SublatticeBasis& L,
                                     const QuadratureConfig& cfg = {}, double delta = 1e-4) {
    LatticeCase lc = classify_lattice(L);
    CpeEvidence ev;
    switch (lc.tag) {
        case LatticeTag::Planar: {
            MahlerValue m = mahler_2d(sys.f, cfg);
            ev.value = m.value;
            ev.what = "log M(f)";
            break;
        }
        case LatticeTag::AxisDegenerate: {
            MahlerValue m = mahler_1d_jensen(sys.g);
            ev.value = m.value;
            ev.what = "log M(g)";
            break;
        }
        case LatticeTag::Generic: {
            EntropyResult r = sublattice_entropy(sys, L, cfg);
            ev.value = r.value.value;
            ev.what = "sub-action entropy";
            break;
        }
    }
    ev.cpe = ev.value > delta;
    return ev;
}

// ---------------------------------------------------------------------------
// Z^2-entropy equivalence

enum class RowVerdict { Equal, Distinct, StructuralEqual, Inconclusive };
enum class OverallVerdict { Equivalent, Distinct, Inconclusive };

inline const char* verdict_name(RowVerdict v) {
    switch (v) {
        case RowVerdict::Equal: return "equal";
        case RowVerdict::Distinct: return "distinct";
        case RowVerdict::StructuralEqual: return "structural-equal";
        case RowVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline const char* verdict_name(OverallVerdict v) {
    switch (v) {
        case OverallVerdict::Equivalent: return "equivalent";
        case OverallVerdict::Distinct: return "distinct";
        case OverallVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct EquivalenceRow {
    SublatticeBasis lattice;
    EntropyResult r1, r2;
    RowVerdict verdict = RowVerdict::Inconclusive;
    std::string note;
};

struct EquivalenceReport {
    std::vector<EquivalenceRow> rows;
    OverallVerdict overall = OverallVerdict::Inconclusive;
};

inline RowVerdict compare_results(const EntropyResult& a, const EntropyResult& b, double tol) {
    if (a.variant != b.variant) return RowVerdict::Inconclusive;  // incomparable
    switch (a.variant) {
        case EntropyVariant::Finite: {
            double diff = std::abs(a.value.value - b.value.value);
            double slack = tol + a.value.error + b.value.error;
            double band = 1e-12 * std::max({1.0, std::abs(a.value.value),
                                            std::abs(b.value.value)});
            if (std::abs(diff - slack) <= band) return RowVerdict::Inconclusive;  // boundary tie
            return diff < slack ? RowVerdict::Equal : RowVerdict::Distinct;
        }
        case EntropyVariant::MultipleOfLogMahlerG: {
            bool same_geom = a.geometry_key == b.geometry_key;
            bool same_f = a.f_key == b.f_key;
            double diff = std::abs(a.value.value - b.value.value);
            bool base_close = diff <= tol + a.value.error + b.value.error;
            if (same_geom && same_f && base_close) return RowVerdict::StructuralEqual;
            return RowVerdict::Inconclusive;  // unknown multiplicative factor
        }
        case EntropyVariant::PlanarStructural:
            return a.f_key == b.f_key ? RowVerdict::StructuralEqual : RowVerdict::Inconclusive;
    }
    return RowVerdict::Inconclusive;
}

inline EquivalenceReport entropy_equivalent(const SystemPresentation& sys1,
                                            const SystemPresentation& sys2,
                                            const std::vector<SublatticeBasis>& family,
                                            const QuadratureConfig& cfg = {}, double tol = 1e-7) {
    EquivalenceReport rep;
    bool any_distinct = false, all_ok = true;
    for (const auto& L : family) {
        EquivalenceRow row;
        row.lattice = normal_form(L);
        try {
            row.r1 = sublattice_entropy(sys1, row.lattice, cfg);
            row.r2 = sublattice_entropy(sys2, row.lattice, cfg);
            row.verdict = compare_results(row.r1, row.r2, tol);
        } catch (const std::exception& e) {
            row.verdict = RowVerdict::Inconclusive;
            row.note = e.what();
        }
        any_distinct |= row.verdict == RowVerdict::Distinct;
        all_ok &= row.verdict == RowVerdict::Equal || row.verdict == RowVerdict::StructuralEqual;
        rep.rows.push_back(std::move(row));
    }
    rep.overall = any_distinct     ? OverallVerdict::Distinct
                  : all_ok         ? OverallVerdict::Equivalent
                                   : OverallVerdict::Inconclusive;
    if (rep.rows.empty()) rep.overall = OverallVerdict::Inconclusive;
    return rep;
}

}  // namespace algdyn
