#pragma once

// Rank-two subgroups of Z^3: Hermite normal forms, the planar / axis /
// generic case analysis, planar sublattice data (index, Smith form, dual
// torsion points) and enumeration for equivalence sweeps.

#include <array>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "algdyn/laurent.hpp"

namespace algdyn {

using Vec3 = std::array<long, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(long s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline bool is_zero(const Vec3& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

class lattice_error : public std::runtime_error {
public:
    explicit lattice_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// SublatticeBasis: canonical (row Hermite normal form) basis of a rank-two
// subgroup.  Two bases span the same subgroup iff they normalize identically.

struct SublatticeBasis {
    std::array<Vec3, 2> rows{};

    friend bool operator==(const SublatticeBasis&, const SublatticeBasis&) = default;
    friend auto operator<=>(const SublatticeBasis&, const SublatticeBasis&) = default;

    std::string str() const {
        auto row = [](const Vec3& v) {
            return std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]);
        };
        return row(rows[0]) + ";" + row(rows[1]);
    }
};

inline bool rank_two(const Vec3& a, const Vec3& b) {
    long m01 = a[0] * b[1] - a[1] * b[0];
    long m02 = a[0] * b[2] - a[2] * b[0];
    long m12 = a[1] * b[2] - a[2] * b[1];
    return m01 != 0 || m02 != 0 || m12 != 0;
}

// Row-style Hermite normal form of a 2x3 integer matrix of rank two:
// pivots positive, zero below pivots, entries above a pivot reduced into
// [0, pivot).  Idempotent and unique per subgroup.
inline SublatticeBasis normal_form(const Vec3& r1, const Vec3& r2) {
    if (!rank_two(r1, r2)) throw lattice_error("normal_form: rows have rank < 2");
    std::array<Vec3, 2> r{r1, r2};

    int prow = 0;
    for (int col = 0; col < 3 && prow < 2; ++col) {
        // euclidean elimination within this column, rows prow..1
        for (;;) {
            int nz = -1;
            for (int i = prow; i < 2; ++i)
                if (r[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                    if (nz == -1 ||
                        std::abs(r[static_cast<size_t>(i)][static_cast<size_t>(col)]) <
                            std::abs(r[static_cast<size_t>(nz)][static_cast<size_t>(col)]))
                        nz = i;
                }
            if (nz == -1) break;            // column is zero from prow down
            std::swap(r[static_cast<size_t>(prow)], r[static_cast<size_t>(nz)]);
            bool again = false;
            for (int i = prow + 1; i < 2; ++i) {
                long& x = r[static_cast<size_t>(i)][static_cast<size_t>(col)];
                if (x == 0) continue;
                long q = x / r[static_cast<size_t>(prow)][static_cast<size_t>(col)];
                r[static_cast<size_t>(i)] =
                    r[static_cast<size_t>(i)] + (-q) * r[static_cast<size_t>(prow)];
                again |= r[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0;
            }
            if (!again) break;
        }
        if (r[static_cast<size_t>(prow)][static_cast<size_t>(col)] == 0) continue;
        if (r[static_cast<size_t>(prow)][static_cast<size_t>(col)] < 0)
            r[static_cast<size_t>(prow)] = -r[static_cast<size_t>(prow)];
        long pivot = r[static_cast<size_t>(prow)][static_cast<size_t>(col)];
        for (int i = 0; i < prow; ++i) {
            long x = r[static_cast<size_t>(i)][static_cast<size_t>(col)];
            long q = x / pivot;
            if (x - q * pivot < 0) q -= 1;  // floor division
            r[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] + (-q) * r[static_cast<size_t>(prow)];
        }
        ++prow;
    }
    return SublatticeBasis{r};
}

inline SublatticeBasis normal_form(const SublatticeBasis& b) {
    return normal_form(b.rows[0], b.rows[1]);
}

// ---------------------------------------------------------------------------
// Case analysis

enum class LatticeTag { Planar, AxisDegenerate, Generic };

struct LatticeCase {
    LatticeTag tag;
    SublatticeBasis canonical;  // HNF of the input subgroup
    // Generic: {n, m} is an exact basis, n3 = 0, m3 >= 1
    Vec3 n{};
    Vec3 m{};
    // AxisDegenerate: the primitive e3-multiple contained in the subgroup
    Vec3 axis{};
};

namespace detail {

inline long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return std::abs(a);
    }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

}  // namespace detail

inline LatticeCase classify_lattice(const SublatticeBasis& basis) {
    SublatticeBasis nf = normal_form(basis);
    const Vec3& r1 = nf.rows[0];
    const Vec3& r2 = nf.rows[1];

    LatticeCase out;
    out.canonical = nf;

    if (r1[2] == 0 && r2[2] == 0) {
        out.tag = LatticeTag::Planar;
        return out;
    }

    long det2 = r1[0] * r2[1] - r1[1] * r2[0];
    if (det2 == 0) {
        // the projection to the u1,u2-plane has rank one, so the subgroup
        // meets the u3-axis
        long a = r2[0] != 0 ? r2[0] : r2[1];
        long b = -(r1[0] != 0 ? r1[0] : r1[1]);
        if (r1[0] == 0 && r1[1] == 0) {
            a = 1;
            b = 0;
        } else if (r2[0] == 0 && r2[1] == 0) {
            a = 0;
            b = 1;
        } else {
            long g = std::gcd(std::abs(a), std::abs(b));
            a /= g;
            b /= g;
        }
        Vec3 axis = a * r1 + b * r2;
        if (axis[0] != 0 || axis[1] != 0 || axis[2] == 0)
            throw lattice_error("classify_lattice: internal axis computation failed");
        if (axis[2] < 0) axis = -axis;
        out.tag = LatticeTag::AxisDegenerate;
        out.axis = axis;
        return out;
    }

    // generic: n generates the intersection with the plane, m completes an
    // exact basis with m3 > 0
    long t1 = r1[2], t2 = r2[2];
    long g = std::gcd(std::abs(t1), std::abs(t2));
    long a = t2 / g, b = -t1 / g;
    Vec3 n = a * r1 + b * r2;
    if (n[2] != 0 || is_zero(n))
        throw lattice_error("classify_lattice: internal n computation failed");
    if (n[0] < 0 || (n[0] == 0 && n[1] < 0)) {
        n = -n;
        a = -a;
        b = -b;
    }
    long c, d;
    detail::ext_gcd(a, b, c, d);  // a*c' + b*d' = 1 with signs folded in
    // want det [[a,b],[c,d]] = a*d - b*c = 1
    {
        long x, y;
        long gg = detail::ext_gcd(a, b, x, y);
        (void)gg;  // == 1, (a,b) primitive
        c = -y;
        d = x;
    }
    Vec3 m = c * r1 + d * r2;
    if (m[2] == 0) throw lattice_error("classify_lattice: internal m computation failed");
    if (m[2] < 0) m = -m;

    out.tag = LatticeTag::Generic;
    out.n = n;
    out.m = m;
    return out;
}

// ---------------------------------------------------------------------------
// Planar sublattices of Z^2

struct PlanarLattice {
    Mat2 rows;
    long index = 1;  // order of Z^2 / L
};

inline PlanarLattice planar_projection(const LatticeCase& lc) {
    if (lc.tag != LatticeTag::Generic)
        throw lattice_error("planar_projection expects a Generic lattice case");
    Mat2 rows(lc.n[0], lc.n[1], lc.m[0], lc.m[1]);
    long det = rows.det();
    if (det == 0) throw lattice_error("planar_projection: degenerate projection");
    return PlanarLattice{rows, std::labs(det)};
}

// A k-th root-of-unity pair (e(i/k), e(j/k)), kept as exponent fractions so
// character identities can be tested exactly.
struct TorsionPoint {
    long i = 0, j = 0, k = 1;

    bool pow_is_one(long e1, long e2) const { return ((i * e1 + j * e2) % k + k) % k == 0; }

    Ball omega1() const { return phase(i); }
    Ball omega2() const { return phase(j); }

    Ball phase(long num) const {
        long r = ((num % k) + k) % k;
        long double t = 2.0L * 3.14159265358979323846264338327950288L *
                        static_cast<long double>(r) / static_cast<long double>(k);
        std::complex<double> v(static_cast<double>(std::cos(t)), static_cast<double>(std::sin(t)));
        return Ball{v, 4e-17};
    }
};

// The character group of Z^2 / L: exactly `index` points, (1,1) included.
inline std::vector<TorsionPoint> dual_torsion_points(const PlanarLattice& L) {
    long k = L.index;
    std::vector<TorsionPoint> out;
    out.reserve(static_cast<size_t>(k));
    for (long i = 0; i < k; ++i)
        for (long j = 0; j < k; ++j) {
            bool ok = ((L.rows.row[0][0] * i + L.rows.row[0][1] * j) % k == 0) &&
                      ((L.rows.row[1][0] * i + L.rows.row[1][1] * j) % k == 0);
            if (ok) out.push_back(TorsionPoint{i, j, k});
        }
    if (static_cast<long>(out.size()) != k)
        throw lattice_error("dual_torsion_points: expected exactly index-many characters");
    return out;
}

// ---------------------------------------------------------------------------
// Smith normal form of a 2x2 integer matrix: A = U * D * V with U, V
// unimodular and D = diag(d1, d2), d1 | d2, both positive.

struct SmithForm {
    Mat2 U, D, V;
};

inline SmithForm smith_normal_form(const Mat2& A) {
    if (A.det() == 0) throw lattice_error("smith_normal_form: singular matrix");
    Mat2 U(1, 0, 0, 1), V(1, 0, 0, 1), D = A;

    auto row_sub = [&](int dst, int src, long q) {  // D.row[dst] -= q*D.row[src]
        for (int j = 0; j < 2; ++j) D.row[dst][j] -= q * D.row[src][j];
        for (int i = 0; i < 2; ++i) U.row[i][src] += q * U.row[i][dst];
    };
    auto col_sub = [&](int dst, int src, long q) {
        for (int i = 0; i < 2; ++i) D.row[i][dst] -= q * D.row[i][src];
        for (int j = 0; j < 2; ++j) V.row[src][j] += q * V.row[dst][j];
    };
    auto row_swap = [&] {
        std::swap(D.row[0], D.row[1]);
        for (int i = 0; i < 2; ++i) std::swap(U.row[i][0], U.row[i][1]);
    };
    auto col_swap = [&] {
        for (int i = 0; i < 2; ++i) std::swap(D.row[i][0], D.row[i][1]);
        std::swap(V.row[0], V.row[1]);
    };
    auto row_neg = [&](int i) {
        D.row[i][0] = -D.row[i][0];
        D.row[i][1] = -D.row[i][1];
        U.row[0][i] = -U.row[0][i];
        U.row[1][i] = -U.row[1][i];
    };
    auto col_neg = [&](int j) {
        D.row[0][j] = -D.row[0][j];
        D.row[1][j] = -D.row[1][j];
        V.row[j][0] = -V.row[j][0];
        V.row[j][1] = -V.row[j][1];
    };

    for (int guard = 0; guard < 256; ++guard) {
        if (D.row[0][0] == 0) {
            if (D.row[1][0] != 0)
                row_swap();
            else
                col_swap();
            continue;
        }
        if (D.row[1][0] % D.row[0][0] != 0) {
            row_sub(1, 0, D.row[1][0] / D.row[0][0]);
            row_swap();
            continue;
        }
        if (D.row[1][0] != 0) row_sub(1, 0, D.row[1][0] / D.row[0][0]);
        if (D.row[0][1] % D.row[0][0] != 0) {
            col_sub(1, 0, D.row[0][1] / D.row[0][0]);
            col_swap();
            continue;
        }
        if (D.row[0][1] != 0) col_sub(1, 0, D.row[0][1] / D.row[0][0]);
        if (D.row[1][1] % D.row[0][0] != 0) {
            col_sub(0, 1, -1);  // pull d2 into column 0 to force divisibility
            continue;
        }
        break;
    }
    if (D.row[0][0] < 0) row_neg(0);
    if (D.row[1][1] < 0) row_neg(1);
    if (D.row[0][1] != 0 || D.row[1][0] != 0 || D.row[1][1] % D.row[0][0] != 0)
        throw lattice_error("smith_normal_form: reduction failed");
    (void)col_neg;
    return SmithForm{U, D, V};
}

// ---------------------------------------------------------------------------
// Enumeration

// All distinct rank-two subgroups admitting a basis with entries in [-B, B],
// deduplicated by normal form, in deterministic (sorted) order.
inline std::vector<SublatticeBasis> enumerate_sublattices(long B) {
    if (B < 1) throw lattice_error("enumerate_sublattices: bound must be >= 1");
    std::vector<Vec3> vs;
    for (long x = -B; x <= B; ++x)
        for (long y = -B; y <= B; ++y)
            for (long z = -B; z <= B; ++z) {
                Vec3 v{x, y, z};
                if (is_zero(v)) continue;
                // one representative per +-pair
                if (v[0] < 0 || (v[0] == 0 && (v[1] < 0 || (v[1] == 0 && v[2] < 0)))) continue;
                vs.push_back(v);
            }
    std::set<SublatticeBasis> seen;
    for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j)
            if (rank_two(vs[i], vs[j])) seen.insert(normal_form(vs[i], vs[j]));
    return std::vector<SublatticeBasis>(seen.begin(), seen.end());
}

// CLI syntax "a,b,c;d,e,f" -> two basis rows.
inline SublatticeBasis parse_lattice(const std::string& text) {
    std::array<Vec3, 2> rows{};
    size_t pos = 0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 3; ++c) {
            size_t used = 0;
            try {
                rows[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                    std::stol(text.substr(pos), &used);
            } catch (const std::exception&) {
                throw lattice_error("bad lattice syntax, expected \"a,b,c;d,e,f\": " + text);
            }
            pos += used;
            bool last = (r == 1 && c == 2);
            char expect = (c == 2) ? ';' : ',';
            if (!last) {
                if (pos >= text.size() || text[pos] != expect)
                    throw lattice_error("bad lattice syntax, expected \"a,b,c;d,e,f\": " + text);
                ++pos;
            }
        }
    }
    if (pos != text.size())
        throw lattice_error("bad lattice syntax, trailing characters: " + text);
    return normal_form(rows[0], rows[1]);
}

}  // namespace algdyn
