#pragma once
//
// Magnetic-resonance proposal: the drive frequency f sets the geometric phase
// through Phi = c (1/f - 1/f0) with c = mu_B B / hbar.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "zmap/constants.hpp"
#include "zmap/ergodic.hpp"
#include "zmap/su_geometry.hpp"

namespace zmap {

struct ResonanceProposal {
    double b_bar = 0.01; // T
    double f0 = 1e7;     // Hz, where Phi = 0
    std::vector<double> f_grid = default_f_grid();
    std::vector<double> theta_list;

    /// 2000 log-spaced frequencies in [2, 50] MHz.
    static std::vector<double> default_f_grid() { return log_grid(2e6, 5e7, 2000); }

    static std::vector<double> log_grid(double lo, double hi, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            v[i] = lo * std::pow(hi / lo, t);
        }
        if (n > 1) v.back() = hi;
        return v;
    }

    void validate() const {
        if (!(std::isfinite(b_bar) && b_bar > 0.0)) throw InvalidArgument("resonance: B_bar must be > 0");
        if (!(std::isfinite(f0) && f0 > 0.0)) throw InvalidArgument("resonance: f0 must be > 0");
        for (double f : f_grid)
            if (!(std::isfinite(f) && f > 0.0)) throw InvalidArgument("resonance: frequencies must be > 0");
    }
};

/// c = mu_B B / hbar in rad/s.
inline double phase_coefficient(const ResonanceProposal& p) {
    return PhysicalConstants::mu_b * p.b_bar / PhysicalConstants::hbar;
}

struct FrequencyPhase {
    double phi;     // wrapped into (-pi, pi]
    double phi_raw; // unwrapped
};

inline FrequencyPhase phi_of_frequency(double f, const ResonanceProposal& p) {
    if (!(f > 0.0)) throw InvalidArgument("phi_of_frequency: f must be > 0");
    const double raw = phase_coefficient(p) * (1.0 / f - 1.0 / p.f0);
    return {wrap_phase(raw), raw};
}

struct OscillationPoint {
    double f;
    double phi_raw;
    double p_g;
};

/// Closed-form p_G of `channel` along the frequency grid at fixed theta. Both
/// species receive the same Phi(f).
inline std::vector<OscillationPoint> oscillation_curve(Spin species, double theta, const ResonanceProposal& p,
                                                       int channel) {
    if (p.f_grid.empty()) throw InvalidArgument("oscillation_curve: empty frequency grid");
    std::vector<OscillationPoint> out;
    out.reserve(p.f_grid.size());
    for (double f : p.f_grid) {
        const auto ph = phi_of_frequency(f, p);
        out.push_back({f, ph.phi_raw, pg_closed_form(species, channel, GeometricAngles(theta, ph.phi))});
    }
    return out;
}

/// Mean distance in phi_raw between consecutive strict local maxima of p_G,
/// or NaN with fewer than two maxima.
inline double mean_peak_spacing(std::vector<OscillationPoint> curve) {
    std::sort(curve.begin(), curve.end(),
              [](const OscillationPoint& a, const OscillationPoint& b) { return a.phi_raw < b.phi_raw; });
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i)
        if (curve[i].p_g > curve[i - 1].p_g && curve[i].p_g > curve[i + 1].p_g) peaks.push_back(curve[i].phi_raw);
    if (peaks.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

struct ValidityCheck {
    double ratio; // h f_max / (2 mu_B B)
    bool ok;      // ratio < 0.1
};

/// The pumping picture needs the drive quantum h f well below the Zeeman
/// splitting 2 mu_B B.
inline ValidityCheck validity_check(const ResonanceProposal& p) {
    double f_max = 0.0;
    for (double f : p.f_grid) f_max = std::max(f_max, f);
    const double ratio = PhysicalConstants::h * f_max / (2.0 * PhysicalConstants::mu_b * p.b_bar);
    return {ratio, ratio < 0.1};
}

} // namespace zmap
