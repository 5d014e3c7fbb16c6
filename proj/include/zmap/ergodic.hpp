#pragma once
//
// Long-time pumping averages of a repeated cycle operator: the finite-n
// Cesaro average, its exact n -> infinity limit (diagonal ensemble over the
// merged spectral projectors), and the closed forms valid off resonance.
//

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zmap/parallel.hpp"
#include "zmap/smallmat.hpp"
#include "zmap/su_geometry.hpp"

namespace zmap {

/// Number of cycles in an average; std::nullopt means the infinite-time limit.
using CycleCount = std::optional<long>;
inline constexpr CycleCount kInfiniteCycles = std::nullopt;

struct PopulationDistribution {
    Spin species = Spin::Half;
    std::vector<double> probabilities; // ordered as the species' levels
    CycleCount n_cycles = kInfiniteCycles;

    double operator[](int level) const { return probabilities.at(static_cast<std::size_t>(level)); }
};

template <int N>
constexpr Spin spin_of_dim() {
    static_assert(N == 2 || N == 3);
    return N == 2 ? Spin::Half : Spin::One;
}

/// (1/n) sum_{j=1..n} |<l| U^j |initial>|^2, by repeated application to the state.
template <int N>
PopulationDistribution iterated_average(const Unitary<N>& u, int initial_level, long n) {
    if (initial_level < 0 || initial_level >= N) {
        throw DimensionMismatch("iterated_average: initial level " + std::to_string(initial_level) +
                                " outside a " + std::to_string(N) + "-level space");
    }
    if (n < 1) throw InvalidArgument("iterated_average: n must be >= 1");

    Vec<N> psi{};
    psi[initial_level] = 1.0;
    std::array<double, N> acc{};
    for (long j = 0; j < n; ++j) {
        psi = u.matrix() * psi;
        for (int l = 0; l < N; ++l) acc[l] += std::norm(psi[l]);
    }
    PopulationDistribution out{spin_of_dim<N>(), std::vector<double>(N), n};
    for (int l = 0; l < N; ++l) out.probabilities[l] = acc[l] / static_cast<double>(n);
    return out;
}

/// Infinite-time average sum_k |<l| P_k |initial>|^2 over the merged
/// spectral projectors of U.
template <int N>
PopulationDistribution diagonal_ensemble(const Unitary<N>& u, int initial_level,
                                         double merge_tol = kDefaultMergeTol) {
    if (initial_level < 0 || initial_level >= N) {
        throw DimensionMismatch("diagonal_ensemble: initial level " + std::to_string(initial_level) +
                                " outside a " + std::to_string(N) + "-level space");
    }
    const auto es = unitary_eigensystem(u, merge_tol);
    PopulationDistribution out{spin_of_dim<N>(), std::vector<double>(N, 0.0), kInfiniteCycles};
    for (const auto& p : es.projectors)
        for (int l = 0; l < N; ++l) out.probabilities[l] += std::norm(p(l, initial_level));
    return out;
}

struct Spin1Populations {
    double p_minus1;
    double p_zero;
    double p_plus1;
};

/// Closed-form infinite-time populations for spin 1 starting from |1,+1>.
inline Spin1Populations pg_closed_form_spin1(const GeometricAngles& a) {
    if (a.theta() == 0.0) return {0.0, 0.0, 1.0};
    const double s2 = std::pow(std::sin(0.5 * a.theta()), 2);
    const double c2 = std::pow(std::cos(0.5 * a.theta()), 2);
    const double d = 1.0 - c2 * std::pow(std::cos(0.5 * a.phi()), 2);
    const double ratio = s2 / d;
    const double p_minus1 = 0.375 * ratio * ratio;
    const double p_zero = ratio - 0.75 * ratio * ratio;
    return {p_minus1, p_zero, 1.0 - p_minus1 - p_zero};
}

/// Closed-form infinite-time spin-flip probability for spin 1/2 starting from
/// |1/2,+1/2>: (1/2) sin^2 of the polar angle of the rotation axis.
inline double pg_closed_form_spin_half(const GeometricAngles& a) {
    if (a.theta() == 0.0) return 0.0;
    const double s2 = std::pow(std::sin(0.5 * a.theta()), 2);
    const double c2 = std::pow(std::cos(0.5 * a.theta()), 2);
    return 0.5 * s2 / (1.0 - c2 * std::pow(std::cos(a.phi()), 2));
}

/// Closed form for any level of either species.
inline double pg_closed_form(Spin s, int level, const GeometricAngles& a) {
    if (level < 0 || level >= spin_dim(s)) throw DimensionMismatch("pg_closed_form: level out of range");
    if (s == Spin::Half) {
        const double flip = pg_closed_form_spin_half(a);
        return level == 1 ? flip : 1.0 - flip;
    }
    const auto p = pg_closed_form_spin1(a);
    return level == 0 ? p.p_plus1 : (level == 1 ? p.p_zero : p.p_minus1);
}

/// Rotation angle alpha in [0, 2pi] of the cycle operator, read off the
/// underlying SU(2) element: cos(alpha/2) = cos(T/2) cos(P) for spin 1/2 and
/// cos(T/2) cos(P/2) for spin 1.
inline double rotation_angle(Spin s, const GeometricAngles& a) {
    const double phi = s == Spin::Half ? a.phi() : 0.5 * a.phi();
    return 2.0 * std::acos(std::clamp(std::cos(0.5 * a.theta()) * std::cos(phi), -1.0, 1.0));
}

inline constexpr double kResonanceWindow = 0.05;
inline constexpr int kResonanceMaxDenominator = 8;

/// True when the rotation angle lies within `window` of pi*p/q for some q <= max_q.
/// On that set the orbit closure of {U^j} is finite or nearly so and the
/// closed forms stop describing finite-n averages.
inline bool is_resonant(Spin s, const GeometricAngles& a, double window = kResonanceWindow,
                        int max_q = kResonanceMaxDenominator) {
    const double alpha = rotation_angle(s, a);
    for (int q = 1; q <= max_q; ++q)
        for (int p = 0; p <= 2 * q; ++p)
            if (std::abs(alpha - std::numbers::pi * p / q) < window) return true;
    return false;
}

enum class PumpingMethodKind { IteratedN, DiagonalEnsemble, ClosedForm };

struct PumpingMethod {
    PumpingMethodKind kind = PumpingMethodKind::ClosedForm;
    long n = 100; // only for IteratedN

    static PumpingMethod iterated(long n) { return {PumpingMethodKind::IteratedN, n}; }
    static PumpingMethod diagonal() { return {PumpingMethodKind::DiagonalEnsemble, 0}; }
    static PumpingMethod closed() { return {PumpingMethodKind::ClosedForm, 0}; }

    std::string name() const {
        switch (kind) {
        case PumpingMethodKind::IteratedN: return "IteratedN(" + std::to_string(n) + ")";
        case PumpingMethodKind::DiagonalEnsemble: return "DiagonalEnsemble";
        case PumpingMethodKind::ClosedForm: return "ClosedForm";
        }
        return {};
    }
};

/// Population of `channel` after starting in the top level, for one cell.
inline double pumping_value(Spin s, int channel, const GeometricAngles& a, const PumpingMethod& m) {
    switch (m.kind) {
    case PumpingMethodKind::ClosedForm:
        return pg_closed_form(s, channel, a);
    case PumpingMethodKind::DiagonalEnsemble:
        return s == Spin::Half ? diagonal_ensemble(su2_cycle_operator(a), 0)[channel]
                               : diagonal_ensemble(su3_cycle_operator(a), 0)[channel];
    case PumpingMethodKind::IteratedN:
        return s == Spin::Half ? iterated_average(su2_cycle_operator(a), 0, m.n)[channel]
                               : iterated_average(su3_cycle_operator(a), 0, m.n)[channel];
    }
    return 0.0;
}

struct PumpingGridResult {
    Spin species = Spin::Half;
    int channel = 1;
    PumpingMethod method;
    std::vector<double> theta_grid;
    std::vector<double> phi_grid;
    std::vector<double> values;   // row-major, theta index outer
    std::vector<char> resonant;   // same layout; 1 where is_resonant

    double at(std::size_t i_theta, std::size_t i_phi) const { return values.at(i_theta * phi_grid.size() + i_phi); }
    bool resonant_at(std::size_t i_theta, std::size_t i_phi) const {
        return resonant.at(i_theta * phi_grid.size() + i_phi) != 0;
    }
};

/// Evaluates a pumping channel on the Cartesian product theta_grid x phi_grid.
inline PumpingGridResult pumping_grid(Spin s, int channel, const std::vector<double>& theta_grid,
                                      const std::vector<double>& phi_grid, const PumpingMethod& method,
                                      int workers = 1) {
    if (theta_grid.empty() || phi_grid.empty()) throw InvalidArgument("pumping_grid: empty grid");
    if (channel < 0 || channel >= spin_dim(s)) throw DimensionMismatch("pumping_grid: channel out of range");

    PumpingGridResult r{s, channel, method, theta_grid, phi_grid, {}, {}};
    const std::size_t nphi = phi_grid.size();
    const auto cells = parallel_map(theta_grid.size() * nphi, workers, [&](std::size_t idx) {
        const GeometricAngles a(theta_grid[idx / nphi], phi_grid[idx % nphi]);
        return std::pair<double, char>{pumping_value(s, channel, a, method), is_resonant(s, a) ? 1 : 0};
    });
    r.values.reserve(cells.size());
    r.resonant.reserve(cells.size());
    for (const auto& [v, res] : cells) {
        r.values.push_back(v);
        r.resonant.push_back(res);
    }
    return r;
}

struct DephasingScan {
    double mean;
    double spread; // max - min over the phi grid
};

/// Closed-form channel value along a line of constant theta.
inline DephasingScan dephasing_scan(Spin s, int channel, double theta, const std::vector<double>& phi_grid) {
    if (phi_grid.empty()) throw InvalidArgument("dephasing_scan: empty phi grid");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (double phi : phi_grid) {
        const double v = pg_closed_form(s, channel, GeometricAngles(theta, phi));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    return {sum / static_cast<double>(phi_grid.size()), hi - lo};
}

/// n evenly spaced points from lo to hi inclusive (n == 1 gives lo).
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

} // namespace zmap
