#pragma once
//
// Two-band crystal driven by a phonon that modulates the site energy:
//
//   H(k, t) = c_H [[-eps(t) - cos k, -i sin k], [i sin k, eps(t) + cos k]],
//   eps(t)  = eps0 + A_ph sin(2 pi t / tau_ph).
//
// One drive period is integrated with an exponential-midpoint (Trotter)
// product; the resulting cycle operator is expressed in the band basis of
// H(k, eps0) and handed to the spin-1/2 machinery.
//

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "zmap/constants.hpp"
#include "zmap/ergodic.hpp"
#include "zmap/parallel.hpp"
#include "zmap/smallmat.hpp"
#include "zmap/su_geometry.hpp"

namespace zmap {

struct BandCycleSpec {
    double c_h = 0.5;       // eV
    double eps0 = -1.0;     // dimensionless site energy
    double a_ph = 0.3;      // dimensionless phonon amplitude
    double tau_ph = 1e-12;  // s
    double k = 0.5;         // crystal momentum

    void validate() const {
        if (!(std::isfinite(c_h) && c_h > 0.0)) throw InvalidArgument("band spec: c_H must be > 0");
        if (!(std::isfinite(tau_ph) && tau_ph > 0.0)) throw InvalidArgument("band spec: tau_ph must be > 0");
        if (!std::isfinite(eps0) || !std::isfinite(a_ph) || !std::isfinite(k))
            throw InvalidArgument("band spec: non-finite parameter");
    }
};

enum class TrotterScheme { Midpoint };

struct TrotterConfig {
    long steps_per_cycle = 200000;
    TrotterScheme scheme = TrotterScheme::Midpoint;

    void validate() const {
        if (steps_per_cycle < 100) throw InvalidArgument("trotter: steps_per_cycle must be >= 100");
    }
};

inline Matrix2 band_hamiltonian(double k, double eps, double c_h) {
    const double d = eps + std::cos(k);
    const double s = std::sin(k);
    Matrix2 h;
    h(0, 0) = -c_h * d;
    h(0, 1) = cplx(0.0, -c_h * s);
    h(1, 0) = cplx(0.0, c_h * s);
    h(1, 1) = c_h * d;
    return h;
}

inline double phonon_epsilon(double t, const BandCycleSpec& spec) {
    return spec.eps0 + spec.a_ph * std::sin(2.0 * std::numbers::pi * t / spec.tau_ph);
}

/// sin(2 pi (j + 1/2) / N) at the step midpoints; shared by every k of a sweep.
class DriveTable {
  public:
    explicit DriveTable(long steps) : samples_(static_cast<std::size_t>(steps)) {
        for (long j = 0; j < steps; ++j)
            samples_[static_cast<std::size_t>(j)] =
                std::sin(2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(steps));
    }
    long steps() const { return static_cast<long>(samples_.size()); }
    double operator[](long j) const { return samples_[static_cast<std::size_t>(j)]; }

  private:
    std::vector<double> samples_;
};

namespace detail {

struct CycleIntegration {
    Matrix2 u;
    double gap_min; // eV
};

// U = M_N ... M_1 with M_j = exp(-i H(k, eps(t_j + dt/2)) dt / hbar).
// Plain real arithmetic in the loop: this is the hot path of every sweep.
inline CycleIntegration integrate_cycle(const BandCycleSpec& spec, const DriveTable& drive) {
    const long n = drive.steps();
    const double dt_over_hbar = spec.tau_ph / static_cast<double>(n) / PhysicalConstants::hbar_ev;
    const double cos_k = std::cos(spec.k);
    const double hy = spec.c_h * std::sin(spec.k);

    // U = [[a, b], [c, d]] stored as real/imag pairs.
    double ar = 1, ai = 0, br = 0, bi = 0, cr = 0, ci = 0, dr = 1, di = 0;
    double r_min = std::numeric_limits<double>::infinity();
    for (long j = 0; j < n; ++j) {
        const double hz = -spec.c_h * (spec.eps0 + spec.a_ph * drive[j] + cos_k);
        const double r = std::sqrt(hz * hz + hy * hy);
        r_min = std::min(r_min, r);
        const double phase = r * dt_over_hbar;
        const double co = std::cos(phase);
        const double si = r > 0.0 ? std::sin(phase) / r : 0.0;
        // M = [[co - i si hz, -si hy], [si hy, co + i si hz]]
        const double mz = si * hz;
        const double my = si * hy;
        const double na_r = co * ar + mz * ai - my * cr;
        const double na_i = co * ai - mz * ar - my * ci;
        const double nb_r = co * br + mz * bi - my * dr;
        const double nb_i = co * bi - mz * br - my * di;
        const double nc_r = my * ar + co * cr - mz * ci;
        const double nc_i = my * ai + co * ci + mz * cr;
        const double nd_r = my * br + co * dr - mz * di;
        const double nd_i = my * bi + co * di + mz * dr;
        ar = na_r, ai = na_i, br = nb_r, bi = nb_i, cr = nc_r, ci = nc_i, dr = nd_r, di = nd_i;
    }
    Matrix2 u;
    u(0, 0) = {ar, ai};
    u(0, 1) = {br, bi};
    u(1, 0) = {cr, ci};
    u(1, 1) = {dr, di};
    return {u, 2.0 * r_min};
}

} // namespace detail

/// One-period evolution operator in the orbital basis.
inline Unitary2 trotter_cycle_operator(const BandCycleSpec& spec, const TrotterConfig& cfg) {
    spec.validate();
    cfg.validate();
    return Unitary2(detail::integrate_cycle(spec, DriveTable(cfg.steps_per_cycle)).u, kIntegratedUnitaryTol);
}

/// Orthonormal eigenbasis of a traceless Hermitian 2x2 matrix, columns ordered
/// (lower, upper). The lower vector has a real non-negative first component
/// and the pair has unit determinant.
inline Matrix2 ordered_eigenbasis(const Matrix2& h) {
    const double a = 0.5 * (h(0, 0) - h(1, 1)).real();
    const cplx b = h(0, 1);
    const double r = std::hypot(a, std::abs(b));
    cplx x;
    cplx y;
    if (a <= 0.0) {
        x = r - a;
        y = -std::conj(b);
    } else {
        x = b;
        y = -(a + r);
    }
    const double nrm = std::hypot(std::abs(x), std::abs(y));
    x /= nrm;
    y /= nrm;
    if (std::abs(x) > 0.0) {
        const cplx g = std::conj(x) / std::abs(x);
        x *= g;
        y *= g;
    }
    Matrix2 v;
    v(0, 0) = x;
    v(1, 0) = y;
    v(0, 1) = -std::conj(y);
    v(1, 1) = std::conj(x);
    return v;
}

/// |eps + cos k| + |sin k| at or below this counts as a closed gap.
inline constexpr double kGapClosedTol = 1e-12;

struct BandBasis {
    Matrix2 vectors;
    bool degenerate_start = false;
};

/// Band basis at the start of the cycle: eigenvectors of H(k, eps0), lower band
/// first. If H(k, eps0) is degenerate, the Hamiltonian at the first Trotter
/// midpoint is used instead; GapClosedAtStart is thrown when that one is
/// degenerate too.
inline BandBasis band_basis(const BandCycleSpec& spec, const DriveTable& drive) {
    const double s = std::abs(std::sin(spec.k));
    const double gap0 = std::abs(spec.eps0 + std::cos(spec.k)) + s;
    if (gap0 > kGapClosedTol) return {ordered_eigenbasis(band_hamiltonian(spec.k, spec.eps0, spec.c_h)), false};

    const double eps1 = spec.eps0 + spec.a_ph * drive[0];
    if (std::abs(eps1 + std::cos(spec.k)) + s > kGapClosedTol)
        return {ordered_eigenbasis(band_hamiltonian(spec.k, eps1, spec.c_h)), true};

    throw GapClosedAtStart("band basis undefined: H(k, eps0) is degenerate at k = " + std::to_string(spec.k) +
                           ", eps0 = " + std::to_string(spec.eps0));
}

struct BandPumpingResult {
    double p_g = 0.0;
    GeometricAngles angles;
    double residual = 0.0;
    double gap_min = 0.0; // eV
    bool degenerate_start = false;
    Unitary2 band_operator = Unitary2::identity();
};

/// Inter-band pumping out of the lower band after n cycles (or the infinite-time limit).
inline BandPumpingResult band_pumping(const BandCycleSpec& spec, const DriveTable& drive, CycleCount n_cycles) {
    spec.validate();
    const BandBasis basis = band_basis(spec, drive);
    const auto cycle = detail::integrate_cycle(spec, drive);
    const Unitary2 u(adjoint(basis.vectors) * cycle.u * basis.vectors, kIntegratedUnitaryTol);

    BandPumpingResult r;
    r.p_g = n_cycles ? iterated_average(u, 0, *n_cycles)[1] : diagonal_ensemble(u, 0)[1];
    const auto ex = extract_angles(u);
    r.angles = ex.angles;
    r.residual = ex.residual;
    r.gap_min = cycle.gap_min;
    r.degenerate_start = basis.degenerate_start;
    r.band_operator = u;
    return r;
}

inline BandPumpingResult band_pumping(const BandCycleSpec& spec, const TrotterConfig& cfg, CycleCount n_cycles) {
    cfg.validate();
    return band_pumping(spec, DriveTable(cfg.steps_per_cycle), n_cycles);
}

/// Uniform crystal-momentum grid with spacing 2 pi / n, k_i = 2 pi (i - floor(n/2)) / n.
/// Odd n gives a grid symmetric about k = 0 inside (-pi, pi); even n includes -pi.
struct KGrid {
    std::vector<double> points;

    static KGrid uniform(std::size_t n) {
        KGrid g;
        g.points.resize(n);
        const auto half = static_cast<long>(n / 2);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = 2.0 * std::numbers::pi * static_cast<double>(static_cast<long>(i) - half) /
                          static_cast<double>(n);
        return g;
    }
    std::size_t size() const { return points.size(); }
};

enum class RowStatus { Ok, DegenerateStart, GapClosed };

inline std::string_view status_name(RowStatus s) {
    switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::DegenerateStart: return "degenerate_start";
    case RowStatus::GapClosed: return "gap_closed";
    }
    return "?";
}

struct KSweepRow {
    double k = 0.0;
    double theta = std::numeric_limits<double>::quiet_NaN();
    double phi = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    double p_g = std::numeric_limits<double>::quiet_NaN();
    double gap_min = std::numeric_limits<double>::quiet_NaN();
    RowStatus status = RowStatus::Ok;

    bool valid() const { return status != RowStatus::GapClosed; }
};

inline KSweepRow sweep_row(const BandCycleSpec& spec, const DriveTable& drive, CycleCount n_cycles) {
    KSweepRow row;
    row.k = spec.k;
    try {
        const auto r = band_pumping(spec, drive, n_cycles);
        row.theta = r.angles.theta();
        row.phi = r.angles.phi();
        row.residual = r.residual;
        row.p_g = r.p_g;
        row.gap_min = r.gap_min;
        row.status = r.degenerate_start ? RowStatus::DegenerateStart : RowStatus::Ok;
    } catch (const GapClosedAtStart&) {
        row.status = RowStatus::GapClosed;
    }
    return row;
}

/// p_G across a k grid; `spec.k` is ignored. Rows follow the grid order.
inline std::vector<KSweepRow> bz_sweep(const BandCycleSpec& spec, const TrotterConfig& cfg, const KGrid& grid,
                                       CycleCount n_cycles, int workers = 1) {
    spec.validate();
    cfg.validate();
    const DriveTable drive(cfg.steps_per_cycle);
    return parallel_map(grid.size(), workers, [&](std::size_t i) {
        BandCycleSpec s = spec;
        s.k = grid.points[i];
        return sweep_row(s, drive, n_cycles);
    });
}

struct BiasRow {
    double eps0 = 0.0;
    double p_total = 0.0; // mean p_G over the non-skipped k points
    int skipped = 0;
};

/// Total pumping as a function of the static site energy; `spec.eps0` and
/// `spec.k` are ignored.
inline std::vector<BiasRow> bias_sweep(const BandCycleSpec& spec, const TrotterConfig& cfg,
                                       const std::vector<double>& eps0_grid, const KGrid& k_grid,
                                       CycleCount n_cycles, int workers = 1) {
    if (eps0_grid.empty() || k_grid.size() == 0) throw InvalidArgument("bias_sweep: empty grid");
    spec.validate();
    cfg.validate();
    const DriveTable drive(cfg.steps_per_cycle);
    const std::size_t nk = k_grid.size();
    const auto rows = parallel_map(eps0_grid.size() * nk, workers, [&](std::size_t idx) {
        BandCycleSpec s = spec;
        s.eps0 = eps0_grid[idx / nk];
        s.k = k_grid.points[idx % nk];
        return sweep_row(s, drive, n_cycles);
    });

    std::vector<BiasRow> out;
    for (std::size_t e = 0; e < eps0_grid.size(); ++e) {
        BiasRow b{eps0_grid[e], 0.0, 0};
        double sum = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            const auto& row = rows[e * nk + i];
            if (row.valid()) {
                sum += row.p_g;
            } else {
                ++b.skipped;
            }
        }
        const auto used = static_cast<double>(nk) - b.skipped;
        b.p_total = used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep analysis

/// Indices of strict interior local maxima of p_G with k in (k_lo, k_hi).
inline std::vector<std::size_t> interior_maxima(const std::vector<KSweepRow>& rows, double k_lo, double k_hi) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!(r.k > k_lo && r.k < k_hi)) continue;
        if (!rows[i - 1].valid() || !r.valid() || !rows[i + 1].valid()) continue;
        if (r.p_g > rows[i - 1].p_g && r.p_g > rows[i + 1].p_g) out.push_back(i);
    }
    return out;
}

/// k positions where the wrapped phase passes through 0 between adjacent
/// rows (linear interpolation). Sign flips across the +-pi branch cut are
/// not crossings.
inline std::vector<double> phi_zero_crossings(const std::vector<KSweepRow>& rows) {
    std::vector<double> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].valid()) continue;
        if (rows[i].phi == 0.0) {
            out.push_back(rows[i].k);
            continue;
        }
        if (i + 1 >= rows.size() || !rows[i + 1].valid()) continue;
        const double a = rows[i].phi;
        const double b = rows[i + 1].phi;
        if (a * b < 0.0 && std::abs(a - b) < std::numbers::pi) {
            out.push_back(rows[i].k + (rows[i + 1].k - rows[i].k) * a / (a - b));
        }
    }
    return out;
}

struct RefinedPeak {
    double k;
    double p_g;
};

/// Zooms onto the largest p_G in [k_center - half_width, k_center + half_width]
/// by repeated dense scans, each round narrowing to two sample spacings
/// around the best point.
inline RefinedPeak refine_peak(const BandCycleSpec& spec, const TrotterConfig& cfg, double k_center,
                               double half_width, CycleCount n_cycles, int points = 41, int rounds = 4,
                               int workers = 1) {
    cfg.validate();
    const DriveTable drive(cfg.steps_per_cycle);
    RefinedPeak best{k_center, -1.0};
    double lo = k_center - half_width;
    double hi = k_center + half_width;
    for (int round = 0; round < rounds; ++round) {
        const auto ks = linspace(lo, hi, static_cast<std::size_t>(points));
        const auto ps = parallel_map(ks.size(), workers, [&](std::size_t i) {
            BandCycleSpec s = spec;
            s.k = ks[i];
            const auto row = sweep_row(s, drive, n_cycles);
            return row.valid() ? row.p_g : -1.0;
        });
        for (std::size_t i = 0; i < ks.size(); ++i)
            if (ps[i] > best.p_g) best = {ks[i], ps[i]};
        const double step = (hi - lo) / (points - 1);
        lo = best.k - 2.0 * step;
        hi = best.k + 2.0 * step;
    }
    return best;
}

/// Number of times the extracted phase Phi(k) passes a multiple of 2 pi for
/// k in [k_lo, k_hi].
///
/// Phi is dominated by the dynamical phase, whose k-slope is bounded by
/// tau_ph c_H max|eps(t)| / hbar. The k interval is sampled so that this bound
/// allows at most pi/4 of phase per step; increments that still exceed pi/2
/// (nonadiabatic region, Theta near pi) are bisected up to `max_depth`.
inline long count_phi_crossings(const BandCycleSpec& spec, const TrotterConfig& cfg, double k_lo, double k_hi,
                                int workers = 1, std::size_t min_intervals = 100, int max_depth = 12) {
    spec.validate();
    cfg.validate();
    if (!(k_hi > k_lo)) throw InvalidArgument("count_phi_crossings: empty k interval");
    const DriveTable drive(cfg.steps_per_cycle);
    auto phi_at = [&](double k) {
        BandCycleSpec s = spec;
        s.k = k;
        const BandBasis basis = band_basis(s, drive);
        const auto cycle = detail::integrate_cycle(s, drive);
        return extract_angles(Unitary2(adjoint(basis.vectors) * cycle.u * basis.vectors)).angles.phi();
    };

    constexpr double pi = std::numbers::pi;
    const double slope =
        spec.tau_ph * spec.c_h * (std::abs(spec.eps0) + std::abs(spec.a_ph)) / PhysicalConstants::hbar_ev;
    const auto intervals =
        std::max(min_intervals, static_cast<std::size_t>(std::ceil((k_hi - k_lo) * slope / (0.25 * pi))));
    const auto ks = linspace(k_lo, k_hi, intervals + 1);
    const auto phis = parallel_map(ks.size(), workers, [&](std::size_t i) { return phi_at(ks[i]); });

    auto increment = [&](auto&& self, double a, double pa, double b, double pb, int depth) -> double {
        const double d = wrap_phase(pb - pa);
        if (depth >= max_depth || std::abs(d) <= 0.5 * pi) return d;
        const double m = 0.5 * (a + b);
        const double pm = phi_at(m);
        return self(self, a, pa, m, pm, depth + 1) + self(self, m, pm, b, pb, depth + 1);
    };
    const auto incs = parallel_map(ks.size() - 1, workers, [&](std::size_t i) {
        return increment(increment, ks[i], phis[i], ks[i + 1], phis[i + 1], 0);
    });

    constexpr double two_pi = 2.0 * pi;
    long crossings = phis[0] == 0.0 ? 1 : 0;
    double u = phis[0];
    for (double inc : incs) {
        const double v = u + inc;
        // integers m with 2 pi m in (min(u, v), max(u, v)]
        crossings += static_cast<long>(std::floor(std::max(u, v) / two_pi) - std::floor(std::min(u, v) / two_pi));
        u = v;
    }
    return crossings;
}

} // namespace zmap
