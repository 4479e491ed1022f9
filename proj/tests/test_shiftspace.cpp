#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "algdyn/shiftspace.hpp"

using namespace algdyn;

namespace {

const SystemPresentation kHelmet = make_system("helmet", "1+u1+u2", "u3-2");

std::map<Vec3, double> random_seeds(const WindowConfigSpace& sp, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::map<Vec3, double> out;
    for (const auto& p : sp.free_set) out[p] = uni(rng);
    return out;
}

// relation matrix over R: one row per stencil placement
Eigen::MatrixXd relation_matrix(const WindowConfigSpace& sp) {
    long rows = static_cast<long>(sp.f_placements.size() + sp.g_placements.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, sp.dims.cells());
    long r = 0;
    for (const auto& b : sp.f_placements) {
        for (const auto& [e, c] : sp.system.f.terms())
            m(r, static_cast<long>(sp.dims.flat(Vec3{b[0] + e[0], b[1] + e[1], b[2]}))) +=
                c.get_d();
        ++r;
    }
    for (const auto& b : sp.g_placements) {
        for (const auto& [e, c] : sp.system.g.terms())
            m(r, static_cast<long>(sp.dims.flat(Vec3{b[0], b[1], b[2] + e[0]}))) += c.get_d();
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("build_window: placement counts and free set") {
    auto sp = build_window(kHelmet, WindowDims{4, 4, 3});
    REQUIRE(sp.f_placements.size() == 27);
    REQUIRE(sp.g_placements.size() == 32);
    REQUIRE(sp.free_set.size() == 7);  // bottom row plus right column, level 0

    REQUIRE_THROWS_AS(build_window(kHelmet, WindowDims{1, 4, 3}), poly_error);
    REQUIRE_THROWS_AS(build_window(make_system("bad", "1+u1+u1*u2", "u3-2"), WindowDims{4, 4, 3}),
                      poly_error);
}

TEST_CASE("free set size equals the corank of the relation matrix") {
    for (auto dims : {WindowDims{3, 3, 2}, WindowDims{4, 3, 3}, WindowDims{3, 4, 2}}) {
        auto sp = build_window(kHelmet, dims);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(relation_matrix(sp));
        lu.setThreshold(1e-9);
        REQUIRE(sp.dims.cells() - lu.rank() == static_cast<long>(sp.free_set.size()));
    }
    // and for a degree-2 g
    auto sp2 = build_window(make_system("m1", "1+u1+u2", "u3^2+2*u3+10"), WindowDims{3, 3, 3});
    Eigen::FullPivLU<Eigen::MatrixXd> lu2(relation_matrix(sp2));
    lu2.setThreshold(1e-9);
    REQUIRE(sp2.dims.cells() - lu2.rank() == static_cast<long>(sp2.free_set.size()));
}

TEST_CASE("complete_window: spec examples") {
    auto sp = build_window(kHelmet, WindowDims{2, 2, 2});

    // all-zero seeds give the zero configuration
    std::map<Vec3, double> zero;
    for (const auto& p : sp.free_set) zero[p] = 0.0;
    auto zcfg = complete_window(sp, zero);
    for (double v : zcfg.values) REQUIRE(v == 0.0);

    // doubling relation: x_{n+e3} = 2 x_n
    auto seeds = zero;
    seeds[Vec3{0, 0, 0}] = 0.25;
    REQUIRE(seeds.count(Vec3{0, 0, 0}) == 1);  // (0,0,0) is free in this window
    auto cfg = complete_window(sp, seeds);
    REQUIRE_THAT(cfg.at(Vec3{0, 0, 1}), Catch::Matchers::WithinAbs(0.5, 1e-12));

    // f-relation: x_{(0,1,0)} = -(x_{(0,0,0)} + x_{(1,0,0)}) mod 1
    auto sp3 = build_window(kHelmet, WindowDims{3, 3, 2});
    std::map<Vec3, double> s3;
    for (const auto& p : sp3.free_set) s3[p] = 0.0;
    s3[Vec3{0, 0, 0}] = 0.1;
    s3[Vec3{1, 0, 0}] = 0.2;
    auto cfg3 = complete_window(sp3, s3);
    REQUIRE_THAT(cfg3.at(Vec3{0, 1, 0}), Catch::Matchers::WithinAbs(0.7, 1e-12));

    REQUIRE_THROWS_AS(complete_window(sp, std::map<Vec3, double>{}), poly_error);
}

TEST_CASE("complete_window: residuals vanish, random config does not") {
    auto sp = build_window(kHelmet, WindowDims{10, 10, 6});
    auto cfg = complete_window(sp, random_seeds(sp, 99));
    REQUIRE(verify_window(sp, cfg) < 1e-9);

    // a random (non-completed) configuration generically violates stencils
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    WindowConfig noise;
    noise.dims = sp.dims;
    noise.values.resize(static_cast<size_t>(sp.dims.cells()));
    for (auto& v : noise.values) v = uni(rng);
    REQUIRE(verify_window(sp, noise) > 0.01);
}

TEST_CASE("complete_window is a homomorphism in the seeds") {
    auto sp = build_window(kHelmet, WindowDims{6, 5, 4});
    auto s1 = random_seeds(sp, 1), s2 = random_seeds(sp, 2);
    std::map<Vec3, double> sum;
    for (const auto& p : sp.free_set) sum[p] = mod1(s1[p] + s2[p]);
    auto c1 = complete_window(sp, s1);
    auto c2 = complete_window(sp, s2);
    auto cs = complete_window(sp, sum);
    for (size_t i = 0; i < cs.values.size(); ++i)
        REQUIRE(circle_dist(cs.values[i] - c1.values[i] - c2.values[i]) < 1e-9);
}

TEST_CASE("completion commutes with the e1 shift on the common interior") {
    auto sp = build_window(kHelmet, WindowDims{7, 5, 3});
    auto cfg = complete_window(sp, random_seeds(sp, 11));

    // seed the one-narrower window with the shifted configuration; completing
    // must reproduce the shift everywhere
    auto sub = build_window(kHelmet, WindowDims{6, 5, 3});
    std::map<Vec3, double> shifted;
    for (const auto& p : sub.free_set) shifted[p] = cfg.at(Vec3{p[0] + 1, p[1], p[2]});
    auto cfg2 = complete_window(sub, shifted);
    for (long z = 0; z < sub.dims.L3; ++z)
        for (long y = 0; y < sub.dims.L2; ++y)
            for (long x = 0; x < sub.dims.L1; ++x)
                REQUIRE(circle_dist(cfg2.at(Vec3{x, y, z}) - cfg.at(Vec3{x + 1, y, z})) < 1e-9);
}

TEST_CASE("iterating the g-relation gives x_{n+k e3} = 2^k x_n") {
    auto sp = build_window(kHelmet, WindowDims{2, 2, 21});
    auto seeds = random_seeds(sp, 21);
    auto cfg = complete_window(sp, seeds);
    double x0 = cfg.at(Vec3{0, 0, 0});
    double pow2 = 1;
    for (long k = 1; k <= 20; ++k) {
        pow2 *= 2;
        REQUIRE(circle_dist(cfg.at(Vec3{0, 0, k}) - pow2 * x0) < 1e-9);
    }
}

TEST_CASE("region membership: spec examples and nesting") {
    REQUIRE(region_membership(1, Vec3{0, 0, 1}) == Region::InS);
    REQUIRE(region_membership(1, Vec3{5, 0, 0}) == Region::InU);
    REQUIRE(!in_region_S(1, Vec3{5, 0, 0}));
    REQUIRE(region_membership(1, Vec3{0, -1, 0}) == Region::Neither);
    REQUIRE(region_membership(3, Vec3{-2, 1, 1}) == Region::InU);

    // S_N shrinks and U_N grows as N increases
    for (long M = 1; M < 4; ++M)
        for (long N = M + 1; N <= 4; ++N)
            for (long x = -3; x <= 3; ++x)
                for (long y = -6; y <= 6; ++y)
                    for (long z = -6; z <= 6; ++z) {
                        Vec3 p{x, y, z};
                        if (in_region_S(N, p)) REQUIRE(in_region_S(M, p));
                        if (in_region_U(M, p)) REQUIRE(in_region_U(N, p));
                    }
}

TEST_CASE("section4_bounds: formula evaluation") {
    auto [count, scaled] = section4_bounds(2, 8, 3, std::log(2.0));
    REQUIRE_THAT(count, Catch::Matchers::WithinAbs(32 * std::log(3.0), 1e-12));
    REQUIRE_THAT(scaled, Catch::Matchers::WithinAbs(64 * std::log(2.0), 1e-12));
    REQUIRE_THROWS_AS(section4_bounds(8, 8, 3, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(section4_bounds(1, 2, 1, 1.0), std::invalid_argument);
}
