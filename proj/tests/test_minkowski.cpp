#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "idealclock/minkowski.hpp"
#include "idealclock/errors.hpp"

using namespace idealclock;

namespace {

// Independent oracle: contract the Levi-Civita symbol over all index
// quadruples with explicitly lowered components.
FourVector pseudovector_by_permutation_sum(const FourVector& p, const FourVector& k,
                                           const FourVector& q) {
    auto lowered = [](const FourVector& v, int mu) { return mu == 0 ? v[mu] : -v[mu]; };
    auto eps = [](const std::array<int, 4>& idx) {
        int sign = 1;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                if (idx[i] == idx[j]) return 0;
                if (idx[i] > idx[j]) sign = -sign;
            }
        return sign;
    };
    FourVector w;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            for (int rho = 0; rho < 4; ++rho)
                for (int si = 0; si < 4; ++si) {
                    const int s = eps({mu, nu, rho, si});
                    if (s == 0) continue;
                    w[mu] += s * lowered(p, nu) * lowered(k, rho) * lowered(q, si);
                }
    return w;
}

FourVector random_vector(std::mt19937_64& rng, double scale = 2.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return FourVector{u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("metric contraction uses timelike-positive signature") {
    const FourVector a{1.0, 2.0, 3.0, 4.0};
    const FourVector b{5.0, 6.0, 7.0, 8.0};
    CHECK(dot(a, b) == 5.0 - 12.0 - 21.0 - 32.0);
    CHECK(dot(a, a) == 1.0 - 4.0 - 9.0 - 16.0);
}

TEST_CASE("four vector arithmetic") {
    FourVector a{1, 2, 3, 4};
    const FourVector b{4, 3, 2, 1};
    CHECK(max_abs(a + b - FourVector{5, 5, 5, 5}) == 0.0);
    CHECK(max_abs(2.0 * a - FourVector{2, 4, 6, 8}) == 0.0);
    CHECK(max_abs(-a + a) == 0.0);
    a += b;
    a *= 0.2;
    CHECK(max_abs(a - FourVector{1, 1, 1, 1}) == 0.0);
    CHECK(is_finite(a));
    a[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(is_finite(a));
}

TEST_CASE("pseudovector matches the permutation-sum oracle") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const FourVector p = random_vector(rng);
        const FourVector k = random_vector(rng);
        const FourVector q = random_vector(rng);
        const FourVector w = mathisson(p, k, q);
        const FourVector oracle = pseudovector_by_permutation_sum(p, k, q);
        CHECK(max_abs(w - oracle) <= 1e-12 * (1.0 + max_abs(oracle)));
    }
}

TEST_CASE("pseudovector of the reference triple") {
    const FourVector w = mathisson({1, 0, 0, 0}, {1, 1, 0, 0}, {0, 0, 0.5, 0});
    CHECK(max_abs(w - FourVector{0, 0, 0, -0.5}) == 0.0);
    CHECK(dot(w, w) == -0.25);
}

TEST_CASE("pseudovector is orthogonal to its arguments and fully antisymmetric") {
    std::mt19937_64 rng(102);
    for (int trial = 0; trial < 50; ++trial) {
        const FourVector p = random_vector(rng);
        const FourVector k = random_vector(rng);
        const FourVector q = random_vector(rng);
        const FourVector w = mathisson(p, k, q);
        const double scale = 1.0 + max_abs(w) * (max_abs(p) + max_abs(k) + max_abs(q));
        CHECK(std::abs(dot(w, p)) <= 1e-12 * scale);
        CHECK(std::abs(dot(w, k)) <= 1e-12 * scale);
        CHECK(std::abs(dot(w, q)) <= 1e-12 * scale);
        CHECK(max_abs(mathisson(k, p, q) + w) <= 1e-12 * (1.0 + max_abs(w)));
        CHECK(max_abs(mathisson(p, q, k) + w) <= 1e-12 * (1.0 + max_abs(w)));
    }
}

TEST_CASE("boosts and rotations satisfy the group metric condition") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> chi(-0.25, 0.25);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 3> n{gauss(rng), gauss(rng), gauss(rng)};
        const LorentzTransform L =
            boost(chi(rng), n) * rotation(angle(rng), {gauss(rng), gauss(rng), gauss(rng)});
        CHECK(orthonormality_defect(L) <= 1e-13);
        const FourVector a = random_vector(rng);
        const FourVector b = random_vector(rng);
        CHECK(std::abs(dot(apply(L, a), apply(L, b)) - dot(a, b)) <=
              1e-12 * (1.0 + std::abs(dot(a, b))));
    }
}

TEST_CASE("rotation turns the first axis toward the second about the third") {
    const LorentzTransform R = rotation(std::numbers::pi_v<double> / 2.0, {0.0, 0.0, 1.0});
    const FourVector ex{0, 1, 0, 0};
    CHECK(max_abs(apply(R, ex) - FourVector{0, 0, 1, 0}) <= 1e-15);
}

TEST_CASE("boost of the rest vector gives the textbook components") {
    const double chi = 0.7;
    const LorentzTransform B = boost(chi, {1.0, 0.0, 0.0});
    const FourVector rest{1, 0, 0, 0};
    const FourVector moved = apply(B, rest);
    CHECK(std::abs(moved[0] - std::cosh(chi)) <= 1e-15);
    CHECK(std::abs(moved[1] - std::sinh(chi)) <= 1e-15);
    CHECK(max_abs(apply(B, {0, 0, 1, 0}) - FourVector{0, 0, 1, 0}) == 0.0);
}

TEST_CASE("zero rotation axis is rejected") {
    CHECK_THROWS_AS(boost(0.5, {0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(rotation(0.5, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("pseudovector transforms as a vector under proper transforms") {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> chi(-0.25, 0.25);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 50; ++trial) {
        const LorentzTransform L = boost(chi(rng), {gauss(rng), gauss(rng), gauss(rng)}) *
                                   rotation(angle(rng), {gauss(rng), gauss(rng), gauss(rng)});
        const FourVector p = random_vector(rng);
        const FourVector k = random_vector(rng);
        const FourVector q = random_vector(rng);
        const FourVector lhs = mathisson(apply(L, p), apply(L, k), apply(L, q));
        const FourVector rhs = apply(L, mathisson(p, k, q));
        CHECK(max_abs(lhs - rhs) <= 1e-11 * (1.0 + max_abs(rhs)));
    }
}

TEST_CASE("projective points reject the zero pair and expose the pole") {
    CHECK_THROWS_AS(ProjectivePoint(0.0, 0.0), std::invalid_argument);
    const ProjectivePoint finite{std::complex<double>(3.0, 4.0), 2.0};
    CHECK_FALSE(finite.at_infinity());
    CHECK(std::abs(finite.affine() - std::complex<double>(1.5, 2.0)) == 0.0);
    const ProjectivePoint pole{1.0, 0.0};
    CHECK(pole.at_infinity());
    CHECK(projectively_equal(finite, ProjectivePoint{std::complex<double>(30.0, 40.0), 20.0}));
    CHECK_FALSE(projectively_equal(finite, pole));
}

namespace {

// Independent oracle: project the unit spatial direction of a null ray from
// the sphere's north pole, then invert the projection.
std::complex<double> sphere_chart(const FourVector& k) {
    const double v1 = k[1] / k[0], v2 = k[2] / k[0], v3 = k[3] / k[0];
    return {v1 / (1.0 - v3), v2 / (1.0 - v3)};
}

std::array<double, 3> sphere_point(const std::complex<double>& z) {
    const double n = std::norm(z);
    return {2.0 * z.real() / (1.0 + n), 2.0 * z.imag() / (1.0 + n), (n - 1.0) / (1.0 + n)};
}

FourVector random_null(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    double a = gauss(rng), b = gauss(rng), c = gauss(rng);
    const double n = std::sqrt(a * a + b * b + c * c);
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    const double s = mag(rng);
    return FourVector{s, s * a / n, s * b / n, s * c / n};
}

}  // namespace

TEST_CASE("stereographic image matches the sphere-projection oracle") {
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 100; ++trial) {
        const FourVector k = random_null(rng);
        const ProjectivePoint z = stereographic(k);
        if (z.at_infinity()) continue;
        const std::complex<double> oracle = sphere_chart(k);
        CHECK(std::abs(z.affine() - oracle) <= 1e-11 * (1.0 + std::abs(oracle)));
        const auto v = sphere_point(z.affine());
        CHECK(std::abs(v[0] - k[1] / k[0]) <= 1e-12);
        CHECK(std::abs(v[1] - k[2] / k[0]) <= 1e-12);
        CHECK(std::abs(v[2] - k[3] / k[0]) <= 1e-12);
    }
}

TEST_CASE("stereographic pins of the axis directions") {
    const ProjectivePoint south = stereographic({1, 0, 0, -1});
    CHECK_FALSE(south.at_infinity());
    CHECK(std::abs(south.affine()) == 0.0);
    CHECK(stereographic({1, 0, 0, 1}).at_infinity());
    const ProjectivePoint equator = stereographic({1, 1, 0, 0});
    CHECK(std::abs(equator.affine() - std::complex<double>(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("stereographic rejects non-null and past directions") {
    CHECK_THROWS_AS(stereographic({1, 0, 0, 0}), constraint_violation);
    CHECK_THROWS_AS(stereographic({-1, 1, 0, 0}), constraint_violation);
}

TEST_CASE("cross ratio normalization and degeneracies") {
    const ProjectivePoint zero{0.0, 1.0};
    const ProjectivePoint one{1.0, 1.0};
    const ProjectivePoint inf{1.0, 0.0};
    const std::complex<double> lam(0.3, -1.2);
    const ProjectivePoint z{lam, 1.0};
    CHECK(std::abs(cross_ratio(z, one, zero, inf) - lam) <= 1e-15);
    CHECK(std::abs(cross_ratio(z, z, zero, inf) - 1.0) <= 1e-15);
    CHECK(std::abs(cross_ratio(z, one, inf, inf) - 1.0) <= 1e-15);
    CHECK_THROWS_AS(cross_ratio(zero, one, zero, inf), degenerate_configuration);
    CHECK_THROWS_AS(cross_ratio(z, inf, zero, inf), degenerate_configuration);
}

TEST_CASE("cross ratio equals the three-point Moebius normal form") {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::complex<double> a(u(rng), u(rng)), b(u(rng), u(rng));
        const std::complex<double> c(u(rng), u(rng)), d(u(rng), u(rng));
        if (std::abs(a - c) < 0.1 || std::abs(a - d) < 0.1 || std::abs(b - c) < 0.1 ||
            std::abs(b - d) < 0.1 || std::abs(b - a) < 0.1 || std::abs(c - d) < 0.1)
            continue;
        // The unique map sending (b, c, d) to (1, 0, infinity).
        const MobiusMap M(b - d, -c * (b - d), b - c, -d * (b - c));
        const ProjectivePoint image = M(ProjectivePoint{a, 1.0});
        const std::complex<double> cr =
            cross_ratio({a, 1.0}, {b, 1.0}, {c, 1.0}, {d, 1.0});
        CHECK(std::abs(image.affine() - cr) <= 1e-10 * (1.0 + std::abs(cr)));
        CHECK(std::abs(M(ProjectivePoint{b, 1.0}).affine() - 1.0) <= 1e-10);
    }
}

TEST_CASE("cross ratio is invariant under Moebius maps and rescaling") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::complex<double> va(u(rng), u(rng)), vb(u(rng), u(rng));
        const std::complex<double> vc(u(rng), u(rng)), vd(u(rng), u(rng));
        if (std::abs(va - vc) < 0.1 || std::abs(va - vd) < 0.1 || std::abs(vb - vc) < 0.1 ||
            std::abs(vb - vd) < 0.1)
            continue;
        MobiusMap M;
        try {
            M = MobiusMap({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
        } catch (const std::invalid_argument&) {
            continue;
        }
        const ProjectivePoint a{va, 1.0}, b{vb, 1.0}, c{vc, 1.0}, d{vd, 1.0};
        const std::complex<double> before = cross_ratio(a, b, c, d);
        std::complex<double> after;
        try {
            after = cross_ratio(M(a), M(b), M(c), M(d));
        } catch (const degenerate_configuration&) {
            continue;
        }
        CHECK(std::abs(after - before) <= 1e-9 * (1.0 + std::abs(before)));
        const ProjectivePoint a2{va * std::complex<double>(0.0, 3.0),
                                 std::complex<double>(0.0, 3.0)};
        CHECK(std::abs(cross_ratio(a2, b, c, d) - before) <= 1e-12 * (1.0 + std::abs(before)));
    }
}

TEST_CASE("Moebius composition matches sequential application") {
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const MobiusMap A({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {1.0, 0.0});
    const MobiusMap B({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {1.0, 0.0});
    const ProjectivePoint z{std::complex<double>(0.4, -0.3), 1.0};
    const ProjectivePoint once = compose(A, B)(z);
    const ProjectivePoint twice = A(B(z));
    CHECK(projectively_equal(once, twice, 1e-12));
    CHECK_THROWS_AS(MobiusMap(1.0, 2.0, 2.0, 4.0), std::invalid_argument);
}
