#pragma once
//
// Geometric coordinates (Theta, Phi) of a cycle operator and the maps between
// them and explicit 2x2 / 3x3 unitaries.
//

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "zmap/smallmat.hpp"

namespace zmap {

/// A point of the geometric sphere: polar angle theta in [0, pi] and the
/// periodic phase phi in (-pi, pi].
class GeometricAngles {
  public:
    GeometricAngles() = default;

    /// Throws InvalidArgument for theta outside [0, pi] or non-finite input;
    /// phi is wrapped.
    GeometricAngles(double theta, double phi) : theta_(theta), phi_(wrap_phase(phi)) {
        if (!std::isfinite(theta) || !std::isfinite(phi) || theta < 0.0 || theta > std::numbers::pi) {
            throw InvalidArgument("GeometricAngles: theta must lie in [0, pi], got " + std::to_string(theta));
        }
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }

  private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

enum class Spin { Half, One };

/// Hilbert-space dimension of a spin species.
constexpr int spin_dim(Spin s) { return s == Spin::Half ? 2 : 3; }

/// Level labels in row order: (+1/2, -1/2) or (+1, 0, -1).
inline std::string_view level_label(Spin s, int level) {
    static constexpr std::array<std::string_view, 2> half{"+1/2", "-1/2"};
    static constexpr std::array<std::string_view, 3> one{"+1", "0", "-1"};
    if (level < 0 || level >= spin_dim(s)) throw InvalidArgument("level index out of range");
    return s == Spin::Half ? half[level] : one[level];
}

/// Parses a level label ("+1/2", "-1/2", "1", "+1", "0", "-1") for species `s`.
inline int level_index(Spin s, std::string_view label) {
    if (!label.empty() && label.front() == '+') label.remove_prefix(1);
    if (s == Spin::Half) {
        if (label == "1/2") return 0;
        if (label == "-1/2") return 1;
    } else {
        if (label == "1") return 0;
        if (label == "0") return 1;
        if (label == "-1") return 2;
    }
    throw InvalidArgument("unknown level '" + std::string(label) + "' for this spin species");
}

inline std::string_view spin_name(Spin s) { return s == Spin::Half ? "half" : "one"; }

/// Lowest s_z level, the channel measured by the pumping observables.
constexpr int lowest_level(Spin s) { return spin_dim(s) - 1; }

/// Cycle operator for spin 1/2:
///   [[cos(T/2) e^{-iP}, -sin(T/2) e^{iP}], [sin(T/2) e^{-iP}, cos(T/2) e^{iP}]].
inline Unitary2 su2_cycle_operator(const GeometricAngles& a) {
    const double c = std::cos(0.5 * a.theta());
    const double s = std::sin(0.5 * a.theta());
    const cplx em = std::polar(1.0, -a.phi());
    const cplx ep = std::polar(1.0, a.phi());
    Matrix2 u;
    u(0, 0) = c * em;
    u(0, 1) = -s * ep;
    u(1, 0) = s * em;
    u(1, 1) = c * ep;
    return Unitary2(u, kAnalyticUnitaryTol);
}

/// Cycle operator for spin 1: the spin-1 rotation by theta about y applied
/// after diag(e^{-iP}, 1, e^{iP}).
inline Unitary3 su3_cycle_operator(const GeometricAngles& a) {
    const double c = std::cos(a.theta());
    const double s = std::sin(a.theta());
    const double r = std::numbers::sqrt2 / 2.0;
    const cplx em = std::polar(1.0, -a.phi());
    const cplx ep = std::polar(1.0, a.phi());
    Matrix3 u;
    u(0, 0) = 0.5 * em * (1.0 + c);
    u(0, 1) = -r * s;
    u(0, 2) = 0.5 * ep * (1.0 - c);
    u(1, 0) = r * em * s;
    u(1, 1) = c;
    // The (2,3) entry carries sin(theta); with sin(phi) the matrix is not unitary.
    u(1, 2) = -r * ep * s;
    u(2, 0) = 0.5 * em * (1.0 - c);
    u(2, 1) = r * s;
    u(2, 2) = 0.5 * ep * (1.0 + c);
    return Unitary3(u, kAnalyticUnitaryTol);
}

struct ExtractionResult {
    GeometricAngles angles;
    double residual = 0.0; // ||U - su2_cycle_operator(angles)||_F
};

/// Reads (theta, phi) off a 2x2 unitary assuming the spin-1/2 cycle form.
/// Never throws on a unitary input: `residual` measures how far the matrix is
/// from that two-parameter family.
inline ExtractionResult extract_angles(const Unitary2& u) {
    const Matrix2& m = u.matrix();
    const double theta = std::clamp(2.0 * std::atan2(std::abs(m(1, 0)), std::abs(m(0, 0))), 0.0, std::numbers::pi);
    const double phi = std::abs(m(0, 0)) > 1e-12 ? -std::arg(m(0, 0)) : -std::arg(m(1, 0));
    GeometricAngles angles(theta, phi);
    return {angles, frobenius_norm(m - su2_cycle_operator(angles).matrix())};
}

/// SU(2) element written as a0 I - i avec.sigma, with avec = sin(alpha/2) axis.
struct AxisAngle {
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    double alpha = 0.0; // [0, 2pi]
    double a0 = 1.0;
    std::array<double, 3> avec{0.0, 0.0, 0.0};
    double polar = 0.0; // polar angle of axis
};

/// Axis-angle form of a 2x2 unitary after dividing out sqrt(det U).
inline AxisAngle axis_angle_of(const Unitary2& u) {
    Matrix2 m = u.matrix();
    m *= 1.0 / std::sqrt(determinant(m));

    AxisAngle out;
    out.a0 = 0.5 * (m(0, 0) + m(1, 1)).real();
    out.avec = {-0.5 * (m(0, 1) + m(1, 0)).imag(), 0.5 * (m(1, 0) - m(0, 1)).real(),
                0.5 * (m(1, 1) - m(0, 0)).imag()};
    out.alpha = 2.0 * std::acos(std::clamp(out.a0, -1.0, 1.0));
    const double n = std::hypot(out.avec[0], out.avec[1], out.avec[2]);
    if (n > 1e-12) {
        out.axis = {out.avec[0] / n, out.avec[1] / n, out.avec[2] / n};
        out.polar = std::acos(std::clamp(out.avec[2] / n, -1.0, 1.0));
    }
    return out;
}

} // namespace zmap
