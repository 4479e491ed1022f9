#pragma once

// ET classification (Expanding g, Triangular f), Eisenstein irreducibility,
// the structural zero-entropy report, and per-exponent mixing certificates
// obtained by evaluating u^n - 1 at explicit variety points.

#include <optional>
#include <string>
#include <vector>

#include "algdyn/laurent.hpp"
#include "algdyn/lattice.hpp"
#include "algdyn/roots.hpp"

namespace algdyn {

// A named pair (f, g) presenting the module R3 / <f(u1,u2), g(u3)>.
struct SystemPresentation {
    std::string name;
    IntLaurentPoly f{2};
    IntLaurentPoly g{1};
};

inline void validate_presentation(const SystemPresentation& sys) {
    if (sys.f.is_zero() || sys.f.arity() != 2)
        throw poly_error("presentation: f must be a nonzero polynomial in u1, u2");
    if (sys.g.is_zero() || sys.g.arity() != 1)
        throw poly_error("presentation: g must be a nonzero polynomial in u3");
    if (sys.g.exponent_range(0).first < 0)
        throw poly_error("presentation: g must be an ordinary polynomial (no negative exponents)");
}

inline SystemPresentation make_system(std::string name, const std::string& f_text,
                                      const std::string& g_text) {
    SystemPresentation sys{std::move(name), parse_poly(f_text, 2), parse_poly(g_text, 1)};
    validate_presentation(sys);
    return sys;
}

// ---------------------------------------------------------------------------
// E and T checks

struct ExpandingResult {
    bool expanding = false;
    double margin = 0;  // min |root| - 1, pessimistic under the root radii
};

// True iff g is monic and every root is certifiably outside the closed unit
// disc.  Radii small enough to pin a root *onto* the circle count as not
// expanding; genuinely coarse certifications are an error.
inline ExpandingResult is_expanding(const IntLaurentPoly& g) {
    if (g.is_zero() || g.arity() != 1) throw poly_error("is_expanding expects a nonzero univariate");
    auto [lo, hi] = g.exponent_range(0);
    bool monic = (*g.coeff(Exponents{hi}) == 1);

    RootResult roots = univariate_roots(g);
    double margin = std::numeric_limits<double>::infinity();
    bool all_outside = true;
    if (roots.origin_multiplicity > 0) {
        all_outside = false;
        margin = -1;
    }
    for (const auto& rb : roots.roots) {
        double m = std::abs(rb.z);
        margin = std::min(margin, m - rb.radius - 1);
        if (m - rb.radius > 1) continue;
        if (m + rb.radius <= 1 || rb.radius <= 1e-9) {
            all_outside = false;  // inside, or pinned onto the circle
        } else {
            throw root_error("root certification too coarse to decide |z|>1 near " +
                             std::to_string(m) + " (radius " + std::to_string(rb.radius) + ")");
        }
    }
    if (roots.roots.empty() && roots.origin_multiplicity == 0) {
        // constant polynomial: no zeros, vacuously expanding iff monic means g == 1
        margin = std::numeric_limits<double>::infinity();
    }
    return ExpandingResult{monic && all_outside, margin};
}

struct TriangularResult {
    bool triangular = false;
    long a = 0;  // corner size when triangular
};

// Newton polygon equal to the triangle {(0,0),(a,0),(0,a)} with +-1 corners.
inline TriangularResult is_triangular(const IntLaurentPoly& f) {
    if (f.is_zero() || f.arity() != 2) throw poly_error("is_triangular expects nonzero arity 2");
    NewtonPolytope np = newton_polygon(f);
    if (np.vertices.size() != 3) return {};
    long a = np.vertices[1][0];
    if (a <= 0) return {};
    if (np.vertices != std::vector<std::array<int, 2>>{
                           {0, 0}, {static_cast<int>(a), 0}, {0, static_cast<int>(a)}})
        return {};
    for (Exponents corner : {Exponents{0, 0}, Exponents{static_cast<int>(a), 0},
                             Exponents{0, static_cast<int>(a)}}) {
        const mpz_class* c = f.coeff(corner);
        if (!c || (*c != 1 && *c != -1)) return {};
    }
    return TriangularResult{true, a};
}

struct ETReport {
    bool is_expanding = false;
    double margin = 0;
    bool is_triangular = false;
    long corner_a = 0;
    bool is_et = false;
    std::vector<std::string> diagnostics;
};

inline ETReport is_ET(const SystemPresentation& sys) {
    validate_presentation(sys);
    ETReport rep;
    ExpandingResult e = is_expanding(sys.g);
    rep.is_expanding = e.expanding;
    rep.margin = e.margin;
    if (!e.expanding) {
        auto [lo, hi] = sys.g.exponent_range(0);
        if (*sys.g.coeff(Exponents{hi}) != 1)
            rep.diagnostics.push_back("g is not monic");
        if (e.margin <= 0)
            rep.diagnostics.push_back("g has a zero inside or on the unit circle");
    }
    TriangularResult t = is_triangular(sys.f);
    rep.is_triangular = t.triangular;
    rep.corner_a = t.a;
    if (!t.triangular)
        rep.diagnostics.push_back(
            "the Newton polygon of f is not a corner triangle with +-1 corner coefficients");
    rep.is_et = rep.is_expanding && rep.is_triangular;
    return rep;
}

// ---------------------------------------------------------------------------
// Eisenstein's criterion

inline bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline bool eisenstein(const IntLaurentPoly& g, long p) {
    if (!is_prime(p)) throw std::invalid_argument("eisenstein: p = " + std::to_string(p) +
                                                  " is not prime");
    if (g.is_zero() || g.arity() != 1 || g.exponent_range(0).first < 0)
        throw poly_error("eisenstein expects an ordinary integer polynomial");
    auto [lo, hi] = g.exponent_range(0);
    mpz_class P = p;
    for (int k = 0; k <= hi; ++k) {
        const mpz_class* c = g.coeff(Exponents{k});
        mpz_class v = c ? *c : mpz_class(0);
        if (k == hi) {
            if (v % P == 0) return false;
        } else if (v % P != 0) {
            return false;
        }
        if (k == 0 && v % (P * P) == 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Structural zero entropy of the full Z^3-action

struct ZeroEntropyReport {
    std::string statement;
};

inline ZeroEntropyReport zero_entropy_report(const SystemPresentation& sys) {
    validate_presentation(sys);
    bool f_const = sys.f.degree_span(0) == 0 && sys.f.degree_span(1) == 0;
    bool g_const = sys.g.degree_span(0) == 0;
    if (f_const || g_const)
        throw poly_error("zero_entropy_report: needs two independent nonconstant relations");
    return ZeroEntropyReport{
        "the full Z^3-action has zero entropy: its defining ideal contains the two "
        "independent nonconstant relations f = " +
        format_poly(sys.f) + " and g = " + format_poly(sys.g) +
        ", so the ideal is not principal"};
}

// ---------------------------------------------------------------------------
// Mixing certificates

enum class MixingStatus { Certified, Inconclusive };

struct MixingEntry {
    Vec3 n{};
    MixingStatus status = MixingStatus::Inconclusive;
    // witness variety point (x1, x2, zeta) and the certified |u^n - 1| value
    std::complex<double> x1{}, x2{}, zeta{};
    double x2_radius = 0, zeta_radius = 0;
    double value = 0;  // |u^n - 1| at the witness
    double error = 0;  // propagated bound; Certified means value - error > 0
};

struct MixingReport {
    long bound = 0;
    std::vector<MixingEntry> entries;
    bool all_certified = false;
};

namespace detail {

struct VarietySample {
    Ball x1, x2;
    double zeta_unused = 0;
};

inline std::vector<std::pair<Ball, Ball>> variety_samples(const SystemPresentation& sys) {
    // deterministic circle grid: radii near 1, 64 angles each
    static constexpr double kRadii[] = {1.0, 1.1, 0.9};
    static constexpr int kAngles = 64;
    std::vector<std::pair<Ball, Ball>> out;
    for (double r : kRadii) {
        for (int k = 0; k < kAngles; ++k) {
            long double th = 2.0L * 3.14159265358979323846264338327950288L * k / kAngles;
            std::complex<double> x1(static_cast<double>(r * std::cos(th)),
                                    static_cast<double>(r * std::sin(th)));
            CxLaurentPoly fx = specialize(sys.f, 0, Ball{x1});
            bool degenerate = true;
            for (const auto& [e, c] : fx.terms())
                degenerate &= c.mag() <= c.r + 1e-14;
            if (degenerate || fx.is_zero()) continue;  // skip: f(x1,.) vanished
            RootResult roots = univariate_roots(fx, 1e-9);
            for (const auto& rb : roots.roots)
                out.emplace_back(Ball{x1}, Ball{rb.z, rb.radius});
        }
    }
    return out;
}

}  // namespace detail

// For each nonzero n with |n_i| <= bound, looks for a variety point where
// |u^n - 1| certifiably exceeds its error bound.  Never claims membership:
// exponents with no certifying sample are reported Inconclusive.
inline MixingReport mixing_sweep(const SystemPresentation& sys, long bound,
                                 long sample_budget = std::numeric_limits<long>::max()) {
    ETReport et = is_ET(sys);
    if (!et.is_et) throw poly_error("mixing_sweep: system is not ET");
    if (bound < 1) throw std::invalid_argument("mixing_sweep: bound must be >= 1");

    RootResult groots = univariate_roots(sys.g, 1e-12);
    auto samples = detail::variety_samples(sys);

    MixingReport rep;
    rep.bound = bound;
    rep.all_certified = true;
    for (long n1 = -bound; n1 <= bound; ++n1)
        for (long n2 = -bound; n2 <= bound; ++n2)
            for (long n3 = -bound; n3 <= bound; ++n3) {
                if (n1 == 0 && n2 == 0 && n3 == 0) continue;
                MixingEntry entry;
                entry.n = Vec3{n1, n2, n3};
                long budget = sample_budget;
                for (const auto& [x1, x2] : samples) {
                    if (entry.status == MixingStatus::Certified) break;
                    for (const auto& zr : groots.roots) {
                        if (budget-- <= 0) break;
                        Ball zeta{zr.z, zr.radius};
                        if ((n2 < 0 && x2.contains_zero()) || (n3 < 0 && zeta.contains_zero()))
                            continue;
                        Ball v = ball_pow(x1, n1) * ball_pow(x2, n2) * ball_pow(zeta, n3);
                        double value = std::abs(v.v - std::complex<double>(1));
                        if (value - v.r > 0) {
                            entry.status = MixingStatus::Certified;
                            entry.x1 = x1.v;
                            entry.x2 = x2.v;
                            entry.x2_radius = x2.r;
                            entry.zeta = zeta.v;
                            entry.zeta_radius = zeta.r;
                            entry.value = value;
                            entry.error = v.r;
                            break;
                        }
                    }
                    if (budget <= 0) break;
                }
                rep.all_certified &= entry.status == MixingStatus::Certified;
                rep.entries.push_back(entry);
            }
    return rep;
}

// Re-checks a certified entry at extended precision: polishes the witness
// roots in long double and re-evaluates |u^n - 1|.  Returns (value, bound).
inline std::pair<double, double> reverify_witness(const SystemPresentation& sys,
                                                  const MixingEntry& entry) {
    using cld = detail::cld;
    auto polish = [](const std::vector<cld>& coeffs, cld z0) {
        detail::DenseCoeffs q;
        q.c = coeffs;
        q.rad.assign(coeffs.size(), 0);
        std::vector<cld> z{z0};
        detail::newton_polish(q, z);
        cld d;
        cld p = detail::eval_poly(q.c, z[0], &d);
        long double rad = std::abs(d) > 0 ? static_cast<long double>(coeffs.size() - 1) *
                                                std::abs(p) / std::abs(d)
                                          : 1e-9L;
        return std::pair<cld, long double>(z[0], rad);
    };

    // zeta from g
    auto [glo, ghi] = sys.g.exponent_range(0);
    std::vector<cld> gc(static_cast<size_t>(ghi) + 1, cld(0));
    for (const auto& [e, c] : sys.g.terms()) gc[static_cast<size_t>(e[0])] = mpz_to_long_double(c);
    auto [zeta, zrad] = polish(gc, cld(entry.zeta));

    // x2 from f(x1, .)
    cld x1(entry.x1);
    auto [flo, fhi] = sys.f.exponent_range(1);
    std::vector<cld> fc(static_cast<size_t>(fhi - flo) + 1, cld(0));
    for (const auto& [e, c] : sys.f.terms()) {
        cld p = std::pow(x1, e[0]);
        fc[static_cast<size_t>(e[1] - flo)] += mpz_to_long_double(c) * p;
    }
    auto [x2, xrad] = polish(fc, cld(entry.x2));

    cld v = std::pow(x1, static_cast<long double>(entry.n[0])) *
            std::pow(x2, static_cast<long double>(entry.n[1])) *
            std::pow(zeta, static_cast<long double>(entry.n[2]));
    long double value = std::abs(v - cld(1));
    // first-order propagation of the polished radii through the powers
    long double rel = std::abs(static_cast<long double>(entry.n[1])) * xrad /
                          std::max(std::abs(x2), 1e-300L) +
                      std::abs(static_cast<long double>(entry.n[2])) * zrad /
                          std::max(std::abs(zeta), 1e-300L);
    long double err = 2 * std::abs(v) * rel + 1e-16L;
    return {static_cast<double>(value), static_cast<double>(err)};
}

}  // namespace algdyn
