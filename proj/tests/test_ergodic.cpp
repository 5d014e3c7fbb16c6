#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "zmap/ergodic.hpp"

using namespace zmap;

namespace {

constexpr double pi = std::numbers::pi;

// Long Cesaro average by explicit powers, accumulated in long double.
template <int N>
std::array<double, N> brute_average(const Matrix<N>& u, int init, long n) {
    Vec<N> psi{};
    psi[init] = 1.0;
    std::array<long double, N> acc{};
    for (long j = 0; j < n; ++j) {
        psi = u * psi;
        for (int l = 0; l < N; ++l) acc[l] += std::norm(psi[l]);
    }
    std::array<double, N> out{};
    for (int l = 0; l < N; ++l) out[l] = static_cast<double>(acc[l] / n);
    return out;
}

} // namespace

TEST(ClosedForm, SpinHalfValue) {
    // 0.5 * 0.5 / (1 - 0.5 cos^2 0.5)
    const double expect = 0.25 / (1.0 - 0.5 * std::pow(std::cos(0.5), 2));
    EXPECT_NEAR(pg_closed_form_spin_half(GeometricAngles(pi / 2, 0.5)), expect, 1e-15);
    EXPECT_NEAR(expect, 0.406554025881195, 1e-14);
}

TEST(ClosedForm, SpinOneValue) {
    const auto p = pg_closed_form_spin1(GeometricAngles(pi / 2, 1.0));
    const double r = 0.5 / (1.0 - 0.5 * std::pow(std::cos(0.5), 2));
    EXPECT_NEAR(p.p_minus1, 0.375 * r * r, 1e-15);
    EXPECT_NEAR(p.p_minus1, 0.247929263940311, 1e-13);
    EXPECT_NEAR(p.p_zero, 0.317249523881768, 1e-13);
    EXPECT_NEAR(p.p_minus1 + p.p_zero + p.p_plus1, 1.0, 1e-15);
}

TEST(ClosedForm, ThetaPiLimit) {
    const auto p = pg_closed_form_spin1(GeometricAngles(pi, 1.234));
    EXPECT_NEAR(p.p_minus1, 0.375, 1e-12);
    EXPECT_NEAR(p.p_zero, 0.25, 1e-12);
    EXPECT_NEAR(p.p_plus1, 0.375, 1e-12);
}

TEST(ClosedForm, ThetaZeroIsNoPumping) {
    EXPECT_EQ(pg_closed_form_spin_half(GeometricAngles(0.0, 0.0)), 0.0);
    EXPECT_EQ(pg_closed_form_spin1(GeometricAngles(0.0, 0.0)).p_minus1, 0.0);
}

TEST(ClosedForm, PeriodicityInPhi) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.1, 3.0), ph(-pi, 0.0);
    for (int i = 0; i < 500; ++i) {
        const double t = th(rng), p = ph(rng);
        EXPECT_NEAR(pg_closed_form_spin_half(GeometricAngles(t, p)),
                    pg_closed_form_spin_half(GeometricAngles(t, p + pi)), 1e-12);
    }
    // Spin 1 has period 2 pi only.
    EXPECT_GT(std::abs(pg_closed_form_spin1(GeometricAngles(1.0, 0.0)).p_minus1 -
                       pg_closed_form_spin1(GeometricAngles(1.0, pi)).p_minus1),
              0.1);
}

TEST(DiagonalEnsemble, MatchesClosedFormOffResonance) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> th(0.1, 3.04), ph(-3.0, 3.0);
    int checked = 0;
    while (checked < 500) {
        const GeometricAngles a(th(rng), ph(rng));
        if (is_resonant(Spin::One, a) || is_resonant(Spin::Half, a)) continue;
        ++checked;
        EXPECT_NEAR(diagonal_ensemble(su3_cycle_operator(a), 0)[2], pg_closed_form_spin1(a).p_minus1, 1e-9);
        EXPECT_NEAR(diagonal_ensemble(su3_cycle_operator(a), 0)[1], pg_closed_form_spin1(a).p_zero, 1e-9);
        EXPECT_NEAR(diagonal_ensemble(su2_cycle_operator(a), 0)[1], pg_closed_form_spin_half(a), 1e-9);
    }
}

TEST(DiagonalEnsemble, MatchesBruteForceAverage) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> th(0.3, 2.8), ph(-3.0, 3.0);
    int checked = 0;
    while (checked < 20) {
        const GeometricAngles a(th(rng), ph(rng));
        if (is_resonant(Spin::One, a) || is_resonant(Spin::Half, a)) continue;
        ++checked;
        const auto u3 = su3_cycle_operator(a);
        const auto b3 = brute_average(u3.matrix(), 0, 400000);
        const auto d3 = diagonal_ensemble(u3, 0);
        for (int l = 0; l < 3; ++l) EXPECT_NEAR(d3[l], b3[l], 2e-4);
        const auto u2 = su2_cycle_operator(a);
        EXPECT_NEAR(diagonal_ensemble(u2, 0)[1], brute_average(u2.matrix(), 0, 400000)[1], 2e-4);
    }
}

TEST(DiagonalEnsemble, ResonantDiscontinuityAtThetaPi) {
    const auto at_pi = diagonal_ensemble(su3_cycle_operator(GeometricAngles(pi, 0.4)), 0);
    EXPECT_NEAR(at_pi[2], 0.5, 1e-12);
    EXPECT_NEAR(at_pi[1], 0.0, 1e-12);
    const auto near_pi = diagonal_ensemble(su3_cycle_operator(GeometricAngles(pi - 1e-3, 0.4)), 0);
    EXPECT_NEAR(near_pi[2], 0.375, 1e-3);
    EXPECT_NEAR(near_pi[1], 0.25, 1e-3);
}

TEST(DiagonalEnsemble, RejectsBadLevel) {
    EXPECT_THROW(diagonal_ensemble(Unitary2::identity(), 2), DimensionMismatch);
    EXPECT_THROW(iterated_average(Unitary3::identity(), -1, 10), DimensionMismatch);
    EXPECT_THROW(iterated_average(Unitary3::identity(), 0, 0), InvalidArgument);
}

TEST(IteratedAverage, MatchesBruteForce) {
    const auto u = su3_cycle_operator(GeometricAngles(1.3, 0.7));
    const auto it = iterated_average(u, 0, 137);
    const auto b = brute_average(u.matrix(), 0, 137);
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(it[l], b[l], 1e-13);
    EXPECT_EQ(it.n_cycles, 137);
}

TEST(IteratedAverage, PeriodTwoOrbitAtThetaPi) {
    // The cycle swaps |+1> and |-1> up to phases, so half the time is spent in each.
    const auto u = su3_cycle_operator(GeometricAngles(pi, 0.0));
    EXPECT_NEAR(iterated_average(u, 0, 100)[2], 0.5, 1e-14);
    EXPECT_NEAR(iterated_average(u, 0, 101)[2], 51.0 / 101.0, 1e-14);
}

TEST(IteratedAverage, CesaroConvergence) {
    const GeometricAngles a(2.0, 0.5);
    ASSERT_FALSE(is_resonant(Spin::One, a));
    const auto u = su3_cycle_operator(a);
    const double limit = diagonal_ensemble(u, 0)[2];
    double prev = 1.0;
    for (long n : {100L, 1000L, 10000L, 100000L}) {
        const double err = std::abs(iterated_average(u, 0, n)[2] - limit);
        EXPECT_LT(err, 5.0 / static_cast<double>(n));
        EXPECT_LE(err, prev);
        prev = err;
    }
}

TEST(Resonance, FlagsRationalRotations) {
    // alpha = pi exactly: cos(T/2) cos(P) = 0
    EXPECT_TRUE(is_resonant(Spin::Half, GeometricAngles(pi, 0.3)));
    EXPECT_TRUE(is_resonant(Spin::Half, GeometricAngles(1.0, pi / 2)));
    // alpha / pi = 0.649 (spin 1) and 0.686 (spin 1/2): clear of every p / q with q <= 8
    const GeometricAngles a(2.0, 0.5);
    const double alpha = rotation_angle(Spin::One, a);
    EXPECT_NEAR(std::cos(0.5 * alpha), std::cos(1.0) * std::cos(0.25), 1e-14);
    EXPECT_FALSE(is_resonant(Spin::One, a));
    EXPECT_FALSE(is_resonant(Spin::Half, a));
    EXPECT_TRUE(is_resonant(Spin::One, GeometricAngles(1.7, 0.9))); // alpha / pi = 0.595, near 3/5
}

TEST(PumpingGrid, DeterministicAcrossWorkers) {
    const auto th = linspace(0.1, 3.0, 17);
    const auto ph = linspace(-3.0, 3.0, 13);
    const auto ref = pumping_grid(Spin::One, 2, th, ph, PumpingMethod::diagonal(), 1);
    for (int w : {2, 4, 16}) {
        const auto r = pumping_grid(Spin::One, 2, th, ph, PumpingMethod::diagonal(), w);
        EXPECT_EQ(r.values, ref.values);
        EXPECT_EQ(r.resonant, ref.resonant);
    }
    EXPECT_EQ(ref.values.size(), th.size() * ph.size());
    EXPECT_DOUBLE_EQ(ref.at(3, 5), pumping_value(Spin::One, 2, GeometricAngles(th[3], ph[5]), PumpingMethod::diagonal()));
    EXPECT_THROW(pumping_grid(Spin::Half, 2, th, ph, PumpingMethod::closed()), DimensionMismatch);
}

TEST(PumpingMethod, Names) {
    EXPECT_EQ(PumpingMethod::iterated(100).name(), "IteratedN(100)");
    EXPECT_EQ(PumpingMethod::diagonal().name(), "DiagonalEnsemble");
    EXPECT_EQ(PumpingMethod::closed().name(), "ClosedForm");
}

TEST(Dephasing, SpreadVanishesAtThetaPi) {
    const auto phis = linspace(-pi, pi, 401);
    for (int ch : {0, 1, 2}) EXPECT_EQ(dephasing_scan(Spin::One, ch, pi, phis).spread, 0.0);
    const auto near = dephasing_scan(Spin::One, 2, 3.1, phis);
    EXPECT_LE(near.spread / near.mean, 2e-3);
    double prev = 2.0;
    for (double t : {1.0, 1.8, 2.4, 2.9, 3.1}) {
        const double s = dephasing_scan(Spin::One, 2, t, phis).spread;
        EXPECT_LT(s, prev);
        prev = s;
    }
}
