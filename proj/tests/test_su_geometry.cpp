#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "zmap/ergodic.hpp"
#include "zmap/su_geometry.hpp"

using namespace zmap;

namespace {

constexpr double pi = std::numbers::pi;

// Spin-1 rotation about y, written out from the spin-1 matrices J_y = (1/sqrt2) [[0,-i,0],[i,0,-i],[0,i,0]].
Matrix3 spin1_ry(double theta) {
    Matrix3 jy;
    const double r = 1.0 / std::sqrt(2.0);
    jy(0, 1) = cplx(0, -r);
    jy(1, 0) = cplx(0, r);
    jy(1, 2) = cplx(0, -r);
    jy(2, 1) = cplx(0, r);
    return herm_exp(jy, theta).matrix();
}

} // namespace

TEST(GeometricAngles, ValidatesAndWraps) {
    EXPECT_THROW(GeometricAngles(-0.1, 0.0), InvalidArgument);
    EXPECT_THROW(GeometricAngles(pi + 1e-9, 0.0), InvalidArgument);
    EXPECT_THROW(GeometricAngles(1.0, std::nan("")), InvalidArgument);
    EXPECT_NEAR(GeometricAngles(1.0, 3 * pi / 2).phi(), -pi / 2, 1e-15);
}

TEST(CycleOperator, SpinHalfKnownValues) {
    const auto u = su2_cycle_operator(GeometricAngles(pi, 0.0)).matrix();
    EXPECT_NEAR(std::abs(u(0, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(0, 1) + 1.0), 0.0, 1e-15);
    const auto v = su2_cycle_operator(GeometricAngles(0.0, 0.3)).matrix();
    EXPECT_NEAR(std::abs(v(0, 0) - std::polar(1.0, -0.3)), 0.0, 1e-15);
}

TEST(CycleOperator, SpinOneIsRotationTimesPhases) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
    for (int i = 0; i < 200; ++i) {
        const GeometricAngles a(th(rng), ph(rng));
        const Vec<3> d{std::polar(1.0, -a.phi()), 1.0, std::polar(1.0, a.phi())};
        const Matrix3 oracle = spin1_ry(a.theta()) * Matrix3::diagonal(d);
        EXPECT_LT(frobenius_norm(su3_cycle_operator(a).matrix() - oracle), 1e-12);
    }
}

TEST(CycleOperator, UnitaryAndDeterminant) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
    for (int i = 0; i < 1000; ++i) {
        const GeometricAngles a(th(rng), ph(rng));
        const auto u2 = su2_cycle_operator(a);
        const auto u3 = su3_cycle_operator(a);
        EXPECT_LE(u2.defect(), 1e-12);
        EXPECT_LE(u3.defect(), 1e-12);
        EXPECT_NEAR(std::abs(determinant(u2.matrix()) - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(determinant(u3.matrix()) - 1.0), 0.0, 1e-12);
    }
}

TEST(CycleOperator, TraceIdentity) {
    // tr U3 = (tr U2 at phi/2)^2 - 1, the character relation between spin 1/2 and spin 1.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
    for (int i = 0; i < 1000; ++i) {
        const double t = th(rng), p = ph(rng);
        const cplx t2 = trace(su2_cycle_operator(GeometricAngles(t, 0.5 * p)).matrix());
        const cplx t3 = trace(su3_cycle_operator(GeometricAngles(t, p)).matrix());
        EXPECT_NEAR(std::abs(t3 - (t2 * t2 - 1.0)), 0.0, 1e-12);
        const double direct = 0.5 * (1 + std::cos(t)) * 2 * std::cos(p) + std::cos(t);
        EXPECT_NEAR(std::abs(t3 - direct), 0.0, 1e-12);
    }
}

TEST(CycleOperator, SpinOneSpectrumIsRotation) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> th(0.2, 3.0), ph(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const GeometricAngles a(th(rng), ph(rng));
        const double alpha = rotation_angle(Spin::One, a);
        const auto es = unitary_eigensystem(su3_cycle_operator(a));
        std::vector<double> expect{wrap_phase(-alpha), 0.0, wrap_phase(alpha)};
        std::sort(expect.begin(), expect.end());
        if (es.phases.size() != 3) continue; // alpha near 0 or 2 pi
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(circular_distance(es.phases[k], expect[k]), 0.0, 1e-10);
    }
}

TEST(Extraction, RoundTrip) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> th(1e-6, pi - 1e-6), ph(-pi, pi);
    for (int i = 0; i < 10000; ++i) {
        const GeometricAngles a(th(rng), ph(rng));
        const auto u = su2_cycle_operator(a);
        const auto ex = extract_angles(u);
        EXPECT_NEAR(ex.angles.theta(), a.theta(), 1e-12);
        EXPECT_NEAR(circular_distance(ex.angles.phi(), a.phi()), 0.0, 1e-12);
        EXPECT_LT(ex.residual, 1e-12);
    }
}

TEST(Extraction, ThetaPiUsesLowerLeftPhase) {
    const auto ex = extract_angles(su2_cycle_operator(GeometricAngles(pi, 0.7)));
    EXPECT_NEAR(ex.angles.theta(), pi, 1e-15);
    EXPECT_NEAR(ex.angles.phi(), 0.7, 1e-12);
    EXPECT_LT(ex.residual, 1e-12);
}

TEST(Extraction, ResidualFlagsForeignMatrix) {
    Matrix2 m;
    m(0, 0) = cplx(0, 1);
    m(1, 1) = cplx(0, 1); // i I is not of the cycle form
    EXPECT_GT(extract_angles(Unitary2(m)).residual, 1.0);
}

TEST(AxisAngle, MatchesClosedForms) {
    const GeometricAngles a(1.1, 0.4);
    const auto ax = axis_angle_of(su2_cycle_operator(a));
    EXPECT_NEAR(std::cos(0.5 * ax.alpha), std::cos(0.55) * std::cos(0.4), 1e-12);
    EXPECT_NEAR(0.5 * std::pow(std::sin(ax.polar), 2), pg_closed_form_spin_half(a), 1e-12);
}

TEST(Labels, RoundTrip) {
    for (Spin s : {Spin::Half, Spin::One})
        for (int l = 0; l < spin_dim(s); ++l) EXPECT_EQ(level_index(s, level_label(s, l)), l);
    EXPECT_EQ(level_index(Spin::One, "1"), 0);
    EXPECT_THROW(level_index(Spin::Half, "0"), InvalidArgument);
}
