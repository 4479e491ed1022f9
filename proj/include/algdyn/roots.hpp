#pragma once

// Univariate complex root finding with certified error radii.
//
// Strategy: companion-matrix eigenvalues (Eigen) as the initial guess, Newton
// refinement, then an a-posteriori radius per root.  Both radius bounds used
// here are unconditional: every polynomial has a zero within n*|p(z)/p'(z)|
// of z, and within (|p(z)|/|lead|)^(1/n).  Coefficient ball radii widen the
// bound accordingly.
//
// The machinery is generic over the working scalar: the public operation
// refines in long double (the 1e-12 radius contract), while the Mahler
// quadrature instantiates the double-precision variant and folds the coarser
// radii into its per-node error accounting.  A warm-start Ehrlich-Aberth
// refiner serves callers that solve a slowly varying family of polynomials.

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "algdyn/laurent.hpp"

namespace algdyn {

struct RootBall {
    std::complex<double> z;
    double radius;
};

struct RootResult {
    std::vector<RootBall> roots;           // deg(p) entries, clusters encode multiplicity
    int origin_multiplicity = 0;           // zeros at the origin deflated beforehand
    double max_radius = 0;
    bool reached_target = true;

    // Enforces the certified-radius contract of the public operation.
    const RootResult& require(double target) const {
        if (!reached_target)
            throw poly_error("root refinement reached radius " + std::to_string(max_radius) +
                             " > requested " + std::to_string(target));
        return *this;
    }
};

class root_error : public poly_error {
public:
    using poly_error::poly_error;
};

namespace detail {

using cld = std::complex<long double>;

template <typename R>
struct DenseCoeffsT {
    std::vector<std::complex<R>> c;  // ascending degree, c.back() != 0
    std::vector<R> rad;
};

using DenseCoeffs = DenseCoeffsT<long double>;

template <typename R>
std::complex<R> eval_poly(const std::vector<std::complex<R>>& c, std::complex<R> z,
                          std::complex<R>* dp = nullptr) {
    std::complex<R> p = 0, d = 0;
    for (size_t i = c.size(); i-- > 0;) {
        d = d * z + p;
        p = p * z + c[i];
    }
    if (dp) *dp = d;
    return p;
}

// bound on |eval error| + coefficient uncertainty at z
template <typename R>
R eval_noise(const DenseCoeffsT<R>& q, std::complex<R> z) {
    const R eps = std::numeric_limits<R>::epsilon();
    R az = std::abs(z), zp = 1, acc = 0;
    for (size_t i = 0; i < q.c.size(); ++i) {
        acc += (q.rad[i] + 4 * eps * std::abs(q.c[i])) * zp;
        zp *= az;
    }
    return acc + std::numeric_limits<R>::min();
}

template <typename R>
std::vector<std::complex<R>> companion_roots(const DenseCoeffsT<R>& q) {
    const int n = static_cast<int>(q.c.size()) - 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    std::complex<double> lead(static_cast<double>(q.c.back().real()),
                              static_cast<double>(q.c.back().imag()));
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) m(i + 1, i) = 1.0;
        std::complex<double> ci(static_cast<double>(q.c[static_cast<size_t>(i)].real()),
                                static_cast<double>(q.c[static_cast<size_t>(i)].imag()));
        m(i, n - 1) = -ci / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    std::vector<std::complex<R>> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = std::complex<R>(es.eigenvalues()[i]);
    return out;
}

template <typename R>
void newton_polish(const DenseCoeffsT<R>& q, std::vector<std::complex<R>>& z) {
    const R stop = 4 * std::numeric_limits<R>::epsilon();
    for (auto& zi : z) {
        R prev = std::numeric_limits<R>::infinity();
        for (int it = 0; it < 48; ++it) {
            std::complex<R> d;
            std::complex<R> p = eval_poly(q.c, zi, &d);
            if (std::abs(d) == 0) break;
            std::complex<R> step = p / d;
            R len = std::abs(step);
            if (it > 0 && len * 2 >= prev) break;  // stagnated at the rounding floor
            zi -= step;
            prev = len;
            if (len <= stop * (1 + std::abs(zi))) break;
        }
    }
}

// One Ehrlich-Aberth sweep; returns the largest correction applied.
template <typename R>
R aberth_sweep(const DenseCoeffsT<R>& q, std::vector<std::complex<R>>& z) {
    R worst = 0;
    const size_t n = z.size();
    for (size_t i = 0; i < n; ++i) {
        std::complex<R> d;
        std::complex<R> p = eval_poly(q.c, z[i], &d);
        if (std::abs(p) == 0) continue;
        std::complex<R> newton = (std::abs(d) > 0) ? p / d : std::complex<R>(0);
        std::complex<R> sum = 0;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            std::complex<R> diff = z[i] - z[j];
            if (std::abs(diff) > 0) sum += std::complex<R>(1) / diff;
        }
        std::complex<R> denom = std::complex<R>(1) - newton * sum;
        std::complex<R> step =
            (std::abs(denom) > std::numeric_limits<R>::min() * 16) ? newton / denom : newton;
        z[i] -= step;
        worst = std::max(worst, std::abs(step));
    }
    return worst;
}

template <typename R>
RootResult finish(const DenseCoeffsT<R>& q, std::vector<std::complex<R>>& z, int origin_mult,
                  double target) {
    const int n = static_cast<int>(q.c.size()) - 1;
    RootResult out;
    out.origin_multiplicity = origin_mult;
    out.roots.reserve(z.size());
    R lead_lo = std::abs(q.c.back()) - q.rad.back();
    for (const std::complex<R>& zi : z) {
        std::complex<R> d;
        std::complex<R> p = eval_poly(q.c, zi, &d);
        R num = std::abs(p) + eval_noise(q, zi);
        R r = std::numeric_limits<R>::infinity();
        if (std::abs(d) > 0) r = static_cast<R>(n) * num / std::abs(d);
        if (lead_lo > 0) r = std::min(r, std::pow(num / lead_lo, R(1) / static_cast<R>(n)));
        double radius = static_cast<double>(r) * 1.0000001 + 1e-300;
        out.roots.push_back({std::complex<double>(static_cast<double>(zi.real()),
                                                  static_cast<double>(zi.imag())),
                             radius});
        out.max_radius = std::max(out.max_radius, radius);
    }
    out.reached_target = out.max_radius <= target;
    return out;
}

// Spot-check that lead * prod(z - root) reproduces p off the root set.  The
// tolerance widens with the certified radii: clustered multiple roots are
// only locatable to eps^(1/m), and their radii say so.
template <typename R>
void product_check(const DenseCoeffsT<R>& q, const std::vector<RootBall>& roots) {
    for (int k = 0; k < 4; ++k) {
        R theta = static_cast<R>(2.39996322972865332L) * (k + 1);  // fixed irrational angles
        std::complex<R> s(static_cast<R>(1.5) * std::cos(theta),
                          static_cast<R>(1.5) * std::sin(theta));
        std::complex<R> prod = q.c.back();
        R lo = 1, hi = 1;
        for (const RootBall& rb : roots) {
            std::complex<R> diff = s - std::complex<R>(rb.z);
            prod *= diff;
            lo *= std::abs(diff);
            hi *= std::abs(diff) + static_cast<R>(rb.radius);
        }
        R radius_slack = std::abs(q.c.back()) * (hi - lo);
        std::complex<R> p = eval_poly(q.c, s);
        R scale = 0, sp = 1;
        for (size_t i = 0; i < q.c.size(); ++i) {
            scale += (std::abs(q.c[i]) + q.rad[i]) * sp;
            sp *= static_cast<R>(1.5);
        }
        if (std::abs(prod - p) > static_cast<R>(1e-6) * scale + radius_slack +
                                     16 * eval_noise(q, s))
            throw root_error("root set fails the product re-evaluation check");
    }
}

template <typename R>
RootResult solve_dense(const DenseCoeffsT<R>& q, int origin_mult, double target,
                       const std::vector<std::complex<R>>* warm = nullptr) {
    const int n = static_cast<int>(q.c.size()) - 1;
    RootResult out;
    out.origin_multiplicity = origin_mult;
    if (n <= 0) return out;

    std::vector<std::complex<R>> z;
    if (n == 1) {
        z = {-q.c[0] / q.c[1]};
    } else if (n == 2) {
        // numerically stable quadratic formula
        std::complex<R> a = q.c[2], b = q.c[1], c0 = q.c[0];
        std::complex<R> disc = std::sqrt(b * b - std::complex<R>(4) * a * c0);
        std::complex<R> qq = (std::real(std::conj(b) * disc) >= 0)
                                 ? -(b + disc) / std::complex<R>(2)
                                 : -(b - disc) / std::complex<R>(2);
        if (std::abs(qq) > 0) {
            z = {qq / a, c0 / qq};
        } else {
            z = {std::sqrt(-c0 / a), -std::sqrt(-c0 / a)};
        }
        newton_polish(q, z);
    } else {
        bool warmed = false;
        if (warm && static_cast<int>(warm->size()) == n) {
            z = *warm;
            R w = 0, scale = 1;
            for (const auto& zi : z) scale = std::max(scale, std::abs(zi));
            const R done = 8 * std::numeric_limits<R>::epsilon() * scale;
            for (int sweep = 0; sweep < 12; ++sweep) {
                w = aberth_sweep(q, z);
                if (w <= done) break;
            }
            warmed = w <= static_cast<R>(1e-10) * scale;
        }
        if (!warmed) {
            z = companion_roots(q);
            R scale = 1;
            for (const auto& zi : z) scale = std::max(scale, std::abs(zi));
            const R done = 8 * std::numeric_limits<R>::epsilon() * scale;
            for (int sweep = 0; sweep < 8; ++sweep)
                if (aberth_sweep(q, z) <= done) break;
        }
        newton_polish(q, z);
    }
    return finish(q, z, origin_mult, target);
}

template <typename R, typename Coeff>
DenseCoeffsT<R> dense_from_poly(const LaurentPoly<Coeff>& p, int* origin_mult) {
    if (p.arity() != 1) throw poly_error("univariate_roots expects arity 1");
    if (p.is_zero()) throw poly_error("univariate_roots of the zero polynomial");
    auto [lo, hi] = p.exponent_range(0);
    // Laurent normalization: factor out u^lo; only lo > 0 contributes origin zeros
    *origin_mult = std::max(lo, 0);
    DenseCoeffsT<R> q;
    q.c.assign(static_cast<size_t>(hi - lo + 1), std::complex<R>(0));
    q.rad.assign(q.c.size(), 0);
    for (const auto& [e, c] : p.terms()) {
        size_t k = static_cast<size_t>(e[0] - lo);
        if constexpr (std::is_same_v<Coeff, mpz_class>) {
            long double x = mpz_to_long_double(c);
            q.c[k] = std::complex<R>(static_cast<R>(x), 0);
            q.rad[k] = static_cast<R>(std::abs(x - static_cast<long double>(static_cast<R>(x))));
        } else {
            q.c[k] = std::complex<R>(static_cast<R>(c.v.real()), static_cast<R>(c.v.imag()));
            q.rad[k] = static_cast<R>(c.r);
        }
    }
    return q;
}

}  // namespace detail

// Roots (with multiplicity) of a univariate Laurent polynomial after
// deflating the monomial factor.  Radii are certified against the exact
// coefficients (integer input) or the coefficient balls (complex input).
template <typename Coeff>
RootResult univariate_roots(const LaurentPoly<Coeff>& p, double target_radius = 1e-12) {
    int origin = 0;
    detail::DenseCoeffs q = detail::dense_from_poly<long double>(p, &origin);
    RootResult res = detail::solve_dense(q, origin, target_radius);
    if (!res.roots.empty()) detail::product_check(q, res.roots);
    return res;
}

}  // namespace algdyn
