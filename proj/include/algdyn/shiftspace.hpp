#pragma once

// Finite-window realization of an ET system as torus-valued configurations:
// every placement of the f-stencil (horizontal) and the g-stencil (vertical)
// whose support fits in the window must sum to 0 mod 1.  The solver sweeps
// bottom-up in u3 via the monic g and row-by-row in u2 via the +-1 corner of
// f; whatever the sweep does not reach is the free set.
//
// Also: the lexicographic future/present region calculators and the two
// counting formulas used at scale N.

#include <cmath>
#include <map>
#include <vector>

#include "algdyn/classify.hpp"

namespace algdyn {

struct WindowDims {
    long L1 = 0, L2 = 0, L3 = 0;
    long cells() const { return L1 * L2 * L3; }
    bool inside(const Vec3& p) const {
        return 0 <= p[0] && p[0] < L1 && 0 <= p[1] && p[1] < L2 && 0 <= p[2] && p[2] < L3;
    }
    size_t flat(const Vec3& p) const {
        return static_cast<size_t>(p[0] + L1 * (p[1] + L2 * p[2]));
    }
};

struct WindowConfigSpace {
    WindowDims dims;
    SystemPresentation system;
    long corner_a = 0;  // triangle size of f
    long gdeg = 0;      // degree of g
    std::vector<Vec3> f_placements;  // stencil base points, all heights
    std::vector<Vec3> g_placements;  // base points along u3
    std::vector<Vec3> free_set;      // seed coordinates, lex order
};

struct WindowConfig {
    WindowDims dims;
    std::vector<double> values;  // torus values in [0,1)

    double at(const Vec3& p) const { return values[dims.flat(p)]; }
};

inline double mod1(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? 0.0 : y;
}

// distance to 0 in R/Z
inline double circle_dist(double x) {
    double y = mod1(x);
    return std::min(y, 1.0 - y);
}

inline WindowConfigSpace build_window(const SystemPresentation& sys, const WindowDims& dims) {
    ETReport et = is_ET(sys);
    if (!et.is_et) throw poly_error("build_window: system is not ET");
    long a = et.corner_a;
    long s = sys.g.exponent_range(0).second;
    if (dims.L1 <= a || dims.L2 <= a || dims.L3 <= s)
        throw poly_error("build_window: window smaller than a stencil");

    WindowConfigSpace sp;
    sp.dims = dims;
    sp.system = sys;
    sp.corner_a = a;
    sp.gdeg = s;
    for (long z = 0; z < dims.L3; ++z)
        for (long y = 0; y + a < dims.L2; ++y)
            for (long x = 0; x + a < dims.L1; ++x) sp.f_placements.push_back(Vec3{x, y, z});
    for (long z = 0; z + s < dims.L3; ++z)
        for (long y = 0; y < dims.L2; ++y)
            for (long x = 0; x < dims.L1; ++x) sp.g_placements.push_back(Vec3{x, y, z});
    // the sweep determines, on levels below deg g, the cells with y >= a and
    // x small enough for a full stencil; everything else is free
    for (long z = 0; z < s; ++z)
        for (long y = 0; y < dims.L2; ++y)
            for (long x = 0; x < dims.L1; ++x)
                if (y < a || x > dims.L1 - 1 - a) sp.free_set.push_back(Vec3{x, y, z});
    return sp;
}

namespace detail {

inline double stencil_residual_f(const WindowConfigSpace& sp, const WindowConfig& cfg,
                                 const Vec3& base) {
    double acc = 0;
    for (const auto& [e, c] : sp.system.f.terms())
        acc += c.get_d() * cfg.at(Vec3{base[0] + e[0], base[1] + e[1], base[2]});
    return circle_dist(acc);
}

inline double stencil_residual_g(const WindowConfigSpace& sp, const WindowConfig& cfg,
                                 const Vec3& base) {
    double acc = 0;
    for (const auto& [e, c] : sp.system.g.terms())
        acc += c.get_d() * cfg.at(Vec3{base[0], base[1], base[2] + e[0]});
    return circle_dist(acc);
}

}  // namespace detail

inline double verify_window(const WindowConfigSpace& sp, const WindowConfig& cfg) {
    double worst = 0;
    for (const auto& b : sp.f_placements)
        worst = std::max(worst, detail::stencil_residual_f(sp, cfg, b));
    for (const auto& b : sp.g_placements)
        worst = std::max(worst, detail::stencil_residual_g(sp, cfg, b));
    return worst;
}

// Deterministic solve from seed values on the free set.  Fails loudly if an
// over-determined stencil ends up inconsistent.
inline WindowConfig complete_window(const WindowConfigSpace& sp,
                                    const std::map<Vec3, double>& seeds) {
    if (seeds.size() != sp.free_set.size())
        throw poly_error("complete_window: expected " + std::to_string(sp.free_set.size()) +
                         " seed values, got " + std::to_string(seeds.size()));
    WindowConfig cfg;
    cfg.dims = sp.dims;
    cfg.values.assign(static_cast<size_t>(sp.dims.cells()), 0.0);

    for (const auto& p : sp.free_set) {
        auto it = seeds.find(p);
        if (it == seeds.end())
            throw poly_error("complete_window: missing seed at (" + std::to_string(p[0]) + "," +
                             std::to_string(p[1]) + "," + std::to_string(p[2]) + ")");
        if (!(it->second >= 0.0 && it->second < 1.0))
            throw poly_error("complete_window: seed values must lie in [0,1)");
        cfg.values[sp.dims.flat(p)] = it->second;
    }

    long a = sp.corner_a;
    const mpz_class* corner = sp.system.f.coeff(Exponents{0, static_cast<int>(a)});
    double corner_c = corner->get_d();  // +-1 by the ET check

    // levels below deg g: solve the f-corner row by row
    for (long z = 0; z < sp.gdeg; ++z)
        for (long y = a; y < sp.dims.L2; ++y)
            for (long x = 0; x + a < sp.dims.L1; ++x) {
                double acc = 0;
                for (const auto& [e, c] : sp.system.f.terms()) {
                    if (e[0] == 0 && e[1] == a) continue;
                    acc += c.get_d() * cfg.at(Vec3{x + e[0], y - a + e[1], z});
                }
                cfg.values[sp.dims.flat(Vec3{x, y, z})] = mod1(-acc / corner_c);
            }

    // upper levels: monic g solves forward in u3
    for (long z = sp.gdeg; z < sp.dims.L3; ++z)
        for (long y = 0; y < sp.dims.L2; ++y)
            for (long x = 0; x < sp.dims.L1; ++x) {
                double acc = 0;
                for (const auto& [e, c] : sp.system.g.terms()) {
                    if (e[0] == sp.gdeg) continue;
                    acc += c.get_d() * cfg.at(Vec3{x, y, z - sp.gdeg + e[0]});
                }
                cfg.values[sp.dims.flat(Vec3{x, y, z})] = mod1(-acc);
            }

    // every stencil the sweep did not solve directly is an over-determination
    for (const auto& b : sp.f_placements) {
        double r = detail::stencil_residual_f(sp, cfg, b);
        if (r >= 1e-9)
            throw poly_error("complete_window: inconsistent f-stencil at (" +
                             std::to_string(b[0]) + "," + std::to_string(b[1]) + "," +
                             std::to_string(b[2]) + "), residual " + std::to_string(r));
    }
    for (const auto& b : sp.g_placements) {
        double r = detail::stencil_residual_g(sp, cfg, b);
        if (r >= 1e-9)
            throw poly_error("complete_window: inconsistent g-stencil at (" +
                             std::to_string(b[0]) + "," + std::to_string(b[1]) + "," +
                             std::to_string(b[2]) + "), residual " + std::to_string(r));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Lexicographic future / present regions (scale N)

enum class Region { InS, InU, Neither };

// S_N = {m2 >= 0, m3 >= N} u {m2 >= N};  U_N = the N x N slab over the
// m1-axis.  S_1 is the paper's S and U_1 its present line.
inline bool in_region_S(long N, const Vec3& m) {
    return (m[1] >= 0 && m[2] >= N) || m[1] >= N;
}

inline bool in_region_U(long N, const Vec3& m) {
    return 0 <= m[1] && m[1] < N && 0 <= m[2] && m[2] < N;
}

inline Region region_membership(long N, const Vec3& point) {
    if (N < 1) throw std::invalid_argument("region_membership: N must be >= 1");
    if (in_region_S(N, point)) return Region::InS;
    if (in_region_U(N, point)) return Region::InU;
    return Region::Neither;
}

// (2 M N log K, N^2 h): the box-counting bound and the scaled entropy.
inline std::pair<double, double> section4_bounds(long M, long N, long K, double h) {
    if (N < 1 || M >= N) throw std::invalid_argument("section4_bounds: need 1 <= M < N");
    if (K < 2) throw std::invalid_argument("section4_bounds: need K >= 2");
    if (h < 0) throw std::invalid_argument("section4_bounds: need h >= 0");
    return {2.0 * M * N * std::log(static_cast<double>(K)), static_cast<double>(N) * N * h};
}

}  // namespace algdyn
