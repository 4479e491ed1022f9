#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "algdyn/lattice.hpp"

using namespace algdyn;

namespace {

// Independent membership test: is v in the subgroup spanned by r1, r2?
// Solves the 2x3 system exactly via a nonzero minor, then verifies all
// coordinates and integrality.  Deliberately avoids the HNF code path.
bool member(const Vec3& v, const Vec3& r1, const Vec3& r2) {
    for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = c1 + 1; c2 < 3; ++c2) {
            long det = r1[c1] * r2[c2] - r1[c2] * r2[c1];
            if (det == 0) continue;
            long na = v[c1] * r2[c2] - v[c2] * r2[c1];
            long nb = r1[c1] * v[c2] - r1[c2] * v[c1];
            if (na % det != 0 || nb % det != 0) return false;
            long a = na / det, b = nb / det;
            Vec3 w = a * r1 + b * r2;
            return w == v;
        }
    return false;
}

bool same_subgroup(const std::array<Vec3, 2>& x, const std::array<Vec3, 2>& y) {
    return member(x[0], y[0], y[1]) && member(x[1], y[0], y[1]) &&
           member(y[0], x[0], x[1]) && member(y[1], x[0], x[1]);
}

Vec3 rand_vec(std::mt19937& rng, long B) {
    std::uniform_int_distribution<long> d(-B, B);
    return Vec3{d(rng), d(rng), d(rng)};
}

}  // namespace

TEST_CASE("normal_form: spec examples") {
    auto a = normal_form(Vec3{1, 0, 0}, Vec3{0, 1, -1});
    auto b = normal_form(Vec3{0, 1, -1}, Vec3{1, 0, 0});
    REQUIRE(a == b);
    REQUIRE(a.rows[0] == Vec3{1, 0, 0});
    REQUIRE(a.rows[1] == Vec3{0, 1, -1});

    auto c = normal_form(Vec3{2, 0, 0}, Vec3{1, 1, 0});
    REQUIRE(c.rows[0] == Vec3{1, 1, 0});
    REQUIRE(c.rows[1] == Vec3{0, 2, 0});
    REQUIRE(normal_form(c) == c);  // idempotent

    REQUIRE_THROWS_AS(normal_form(Vec3{1, 2, 3}, Vec3{2, 4, 6}), lattice_error);
}

TEST_CASE("normal_form is a subgroup invariant") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<long> uni(-2, 2);
    int done = 0;
    while (done < 100) {
        Vec3 r1 = rand_vec(rng, 3), r2 = rand_vec(rng, 3);
        if (!rank_two(r1, r2)) continue;
        ++done;
        // random unimodular recombination
        long k = uni(rng);
        Vec3 s1 = r1 + k * r2;
        Vec3 s2 = r2;
        if (uni(rng) > 0) std::swap(s1, s2);
        if (uni(rng) > 0) s1 = -s1;
        auto nf1 = normal_form(r1, r2);
        auto nf2 = normal_form(s1, s2);
        REQUIRE(nf1 == nf2);
        REQUIRE(same_subgroup(nf1.rows, {r1, r2}));
    }
}

TEST_CASE("classify_lattice: spec examples") {
    auto planar = classify_lattice(normal_form(Vec3{1, 0, 0}, Vec3{0, 1, 0}));
    REQUIRE(planar.tag == LatticeTag::Planar);

    auto axis = classify_lattice(normal_form(Vec3{1, 1, 0}, Vec3{0, 0, 1}));
    REQUIRE(axis.tag == LatticeTag::AxisDegenerate);
    REQUIRE(axis.axis == Vec3{0, 0, 1});

    auto gen = classify_lattice(normal_form(Vec3{1, 0, 0}, Vec3{0, 1, -1}));
    REQUIRE(gen.tag == LatticeTag::Generic);
    REQUIRE(gen.n == Vec3{1, 0, 0});
    REQUIRE(gen.m == Vec3{0, -1, 1});
}

TEST_CASE("classify_lattice: basis independence and the generic contract") {
    std::mt19937 rng(29);
    std::uniform_int_distribution<long> uni(-2, 2);
    int done = 0;
    while (done < 120) {
        Vec3 r1 = rand_vec(rng, 3), r2 = rand_vec(rng, 3);
        if (!rank_two(r1, r2)) continue;
        ++done;
        auto base = classify_lattice(normal_form(r1, r2));
        Vec3 s1 = r1 + uni(rng) * r2, s2 = r2;
        if (uni(rng) > 0) std::swap(s1, s2);
        auto other = classify_lattice(normal_form(s1, s2));
        REQUIRE(base.tag == other.tag);
        if (base.tag == LatticeTag::Generic) {
            REQUIRE(base.n == other.n);
            REQUIRE(base.m == other.m);
            REQUIRE(base.n[2] == 0);
            REQUIRE(base.m[2] >= 1);
            // {n, m} generates the subgroup exactly
            REQUIRE(normal_form(base.n, base.m) == base.canonical);
            // n generates the full intersection with the plane: n primitive
            long g = std::gcd(std::abs(base.n[0]), std::abs(base.n[1]));
            Vec3 half{base.n[0] / g, base.n[1] / g, 0};
            if (g > 1) REQUIRE(!member(half, base.canonical.rows[0], base.canonical.rows[1]));
        } else if (base.tag == LatticeTag::AxisDegenerate) {
            REQUIRE(base.axis == other.axis);
            REQUIRE(member(base.axis, r1, r2));
        }
    }
}

TEST_CASE("planar_projection: spec examples") {
    auto pr = [](Vec3 n, Vec3 m) {
        LatticeCase lc;
        lc.tag = LatticeTag::Generic;
        lc.n = n;
        lc.m = m;
        return planar_projection(lc);
    };
    auto a = pr({1, 0, 0}, {0, -1, 1});
    REQUIRE(a.rows == Mat2(1, 0, 0, -1));
    REQUIRE(a.index == 1);
    auto b = pr({2, 0, 0}, {0, 1, 1});
    REQUIRE(b.rows == Mat2(2, 0, 0, 1));
    REQUIRE(b.index == 2);
    auto c = pr({1, 1, 0}, {1, -1, 2});
    REQUIRE(c.rows == Mat2(1, 1, 1, -1));
    REQUIRE(c.index == 2);
}

TEST_CASE("dual_torsion_points: spec examples and exactness") {
    auto four = dual_torsion_points(PlanarLattice{Mat2(2, 0, 0, 2), 4});
    REQUIRE(four.size() == 4);
    for (const auto& t : four) {
        auto w1 = t.omega1().v, w2 = t.omega2().v;
        REQUIRE_THAT(std::abs(w1.real()), Catch::Matchers::WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(std::abs(w2.real()), Catch::Matchers::WithinAbs(1.0, 1e-15));
    }

    auto full = dual_torsion_points(PlanarLattice{Mat2(1, 0, 0, 1), 1});
    REQUIRE(full.size() == 1);
    REQUIRE(full[0].pow_is_one(5, -3));

    auto two = dual_torsion_points(PlanarLattice{Mat2(1, 1, 1, -1), 2});
    REQUIRE(two.size() == 2);
    // characters are trivial on (1,1) and (1,-1): exact identities
    for (const auto& t : two) {
        REQUIRE(t.pow_is_one(1, 1));
        REQUIRE(t.pow_is_one(1, -1));
    }
    // and the nontrivial one is (-1,-1)
    bool has_minus = false;
    for (const auto& t : two)
        has_minus |= (t.omega1().v.real() < -0.5 && t.omega2().v.real() < -0.5);
    REQUIRE(has_minus);
}

TEST_CASE("smith_normal_form: spec examples and properties") {
    auto id = smith_normal_form(Mat2(1, 0, 0, 1));
    REQUIRE(id.D == Mat2(1, 0, 0, 1));

    auto diag = smith_normal_form(Mat2(2, 0, 0, 2));
    REQUIRE(diag.D == Mat2(2, 0, 0, 2));

    auto pm = smith_normal_form(Mat2(1, 1, 1, -1));
    REQUIRE(pm.D == Mat2(1, 0, 0, 2));

    std::mt19937 rng(31);
    std::uniform_int_distribution<long> uni(-9, 9);
    int done = 0;
    while (done < 200) {
        Mat2 A(uni(rng), uni(rng), uni(rng), uni(rng));
        if (A.det() == 0) continue;
        ++done;
        auto s = smith_normal_form(A);
        REQUIRE(std::labs(s.U.det()) == 1);
        REQUIRE(std::labs(s.V.det()) == 1);
        REQUIRE(s.D.row[0][1] == 0);
        REQUIRE(s.D.row[1][0] == 0);
        REQUIRE(s.D.row[0][0] > 0);
        REQUIRE(s.D.row[1][1] % s.D.row[0][0] == 0);
        REQUIRE(s.D.row[0][0] * s.D.row[1][1] == std::labs(A.det()));
        // U * D * V == A
        Mat2 UD(0, 0, 0, 0), UDV(0, 0, 0, 0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) UD.row[i][j] += s.U.row[i][k] * s.D.row[k][j];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) UDV.row[i][j] += UD.row[i][k] * s.V.row[k][j];
        REQUIRE(UDV == A);
    }
}

TEST_CASE("enumerate_sublattices: members, dedup, reference count") {
    auto all = enumerate_sublattices(1);

    auto contains = [&](Vec3 a, Vec3 b) {
        return std::find(all.begin(), all.end(), normal_form(a, b)) != all.end();
    };
    REQUIRE(contains({1, 0, 0}, {0, 1, 0}));
    REQUIRE(contains({1, 0, 0}, {0, 0, 1}));
    REQUIRE(contains({0, 1, 0}, {0, 0, 1}));
    REQUIRE(contains({1, 0, 0}, {0, 1, -1}));

    // no duplicates: normal forms pairwise distinct
    for (size_t i = 0; i + 1 < all.size(); ++i) REQUIRE(all[i] < all[i + 1]);

    // independent brute-force reference: dedup by mutual membership
    std::vector<std::array<Vec3, 2>> reps;
    std::vector<Vec3> vs;
    for (long x = -1; x <= 1; ++x)
        for (long y = -1; y <= 1; ++y)
            for (long z = -1; z <= 1; ++z)
                if (!(x == 0 && y == 0 && z == 0)) vs.push_back(Vec3{x, y, z});
    for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j) {
            if (!rank_two(vs[i], vs[j])) continue;
            std::array<Vec3, 2> cand{vs[i], vs[j]};
            bool fresh = true;
            for (const auto& r : reps)
                if (same_subgroup(cand, r)) {
                    fresh = false;
                    break;
                }
            if (fresh) reps.push_back(cand);
        }
    REQUIRE(all.size() == reps.size());

    // determinism
    REQUIRE(enumerate_sublattices(1) == all);
}

TEST_CASE("parse_lattice round trip") {
    auto b = parse_lattice("1,0,0;0,1,-1");
    REQUIRE(b == normal_form(Vec3{1, 0, 0}, Vec3{0, 1, -1}));
    REQUIRE(b.str() == "1,0,0;0,1,-1");
    REQUIRE_THROWS_AS(parse_lattice("1,0;0,1"), lattice_error);
    REQUIRE_THROWS_AS(parse_lattice("1,0,0;0,0,0"), lattice_error);
    REQUIRE_THROWS_AS(parse_lattice("1,0,0;0,1,-1;x"), lattice_error);
}
