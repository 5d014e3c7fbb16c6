#pragma once
//
// Dense complex linear algebra for the two fixed dimensions used throughout
// the library (2x2 and 3x3). Everything is a value type; nothing allocates
// except the containers returned by the eigen-decomposition.
//

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "zmap/errors.hpp"

namespace zmap {

using cplx = std::complex<double>;

template <int N>
concept SmallDim = (N == 2 || N == 3);

template <int N>
    requires SmallDim<N>
using Vec = std::array<cplx, N>;

/// Row-major N x N complex matrix.
template <int N>
    requires SmallDim<N>
struct Matrix {
    static constexpr int dim = N;
    std::array<cplx, N * N> entries{};

    constexpr cplx& operator()(int r, int c) { return entries[r * N + c]; }
    constexpr const cplx& operator()(int r, int c) const { return entries[r * N + c]; }

    static constexpr Matrix identity() {
        Matrix m;
        for (int i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }
    static constexpr Matrix zero() { return Matrix{}; }
    static Matrix diagonal(const Vec<N>& d) {
        Matrix m;
        for (int i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    Matrix& operator+=(const Matrix& o) {
        for (int i = 0; i < N * N; ++i) entries[i] += o.entries[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (int i = 0; i < N * N; ++i) entries[i] -= o.entries[i];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& e : entries) e *= s;
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix c;
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                const cplx aik = a(i, k);
                for (int j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec<N> operator*(const Matrix& a, const Vec<N>& v) {
        Vec<N> out{};
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) out[i] += a(i, j) * v[j];
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

using Matrix2 = Matrix<2>;
using Matrix3 = Matrix<3>;

template <int N>
Matrix<N> adjoint(const Matrix<N>& m) {
    Matrix<N> out;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out(i, j) = std::conj(m(j, i));
    return out;
}

template <int N>
cplx trace(const Matrix<N>& m) {
    cplx t = 0.0;
    for (int i = 0; i < N; ++i) t += m(i, i);
    return t;
}

template <int N>
cplx determinant(const Matrix<N>& m) {
    if constexpr (N == 2) {
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    } else {
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
}

template <int N>
double frobenius_norm(const Matrix<N>& m) {
    double s = 0.0;
    for (const auto& e : m.entries) s += std::norm(e);
    return std::sqrt(s);
}

template <int N>
bool all_finite(const Matrix<N>& m) {
    return std::all_of(m.entries.begin(), m.entries.end(), [](const cplx& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

/// ||M^dagger M - I||_F
template <int N>
double unitarity_defect(const Matrix<N>& m) {
    return frobenius_norm(adjoint(m) * m - Matrix<N>::identity());
}

/// ||M - M^dagger||_F
template <int N>
double hermiticity_defect(const Matrix<N>& m) {
    return frobenius_norm(m - adjoint(m));
}

/// Outer product v w^dagger.
template <int N>
Matrix<N> outer(const Vec<N>& v, const Vec<N>& w) {
    Matrix<N> m;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = v[i] * std::conj(w[j]);
    return m;
}

/// Unitarity tolerance for operators built from closed-form expressions.
inline constexpr double kAnalyticUnitaryTol = 1e-10;
/// Unitarity tolerance for operators produced by time integration.
inline constexpr double kIntegratedUnitaryTol = 1e-8;

/// A unitary matrix together with its measured defect ||U^dagger U - I||_F.
template <int N>
    requires SmallDim<N>
class Unitary {
  public:
    /// Throws NotUnitary when the defect exceeds `tol` or an entry is not finite.
    explicit Unitary(const Matrix<N>& m, double tol = kIntegratedUnitaryTol)
        : matrix_(m), defect_(unitarity_defect(m)) {
        if (!all_finite(m) || !(defect_ <= tol)) {
            std::ostringstream os;
            os << "matrix is not unitary: defect " << defect_ << " exceeds " << tol;
            throw NotUnitary(os.str());
        }
    }

    static Unitary identity() { return Unitary(Matrix<N>::identity()); }

    const Matrix<N>& matrix() const { return matrix_; }
    double defect() const { return defect_; }
    static constexpr int dim() { return N; }

  private:
    Matrix<N> matrix_;
    double defect_;
};

using Unitary2 = Unitary<2>;
using Unitary3 = Unitary<3>;

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(x, two_pi); // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

/// Distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
    return std::abs(wrap_phase(a - b));
}

namespace detail {

// Givens rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
struct Givens {
    double c;
    cplx s;
};

inline Givens make_givens(cplx a, cplx b) {
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {1.0, 0.0};
    if (abs_a == 0.0) return {0.0, 1.0};
    const double nrm = std::hypot(abs_a, abs_b);
    return {abs_a / nrm, (a / abs_a) * std::conj(b) / nrm};
}

// Rows p, q of m <- G applied from the left.
template <int N>
void rotate_rows(Matrix<N>& m, int p, int q, const Givens& g) {
    for (int j = 0; j < N; ++j) {
        const cplx x = m(p, j);
        const cplx y = m(q, j);
        m(p, j) = g.c * x + g.s * y;
        m(q, j) = -std::conj(g.s) * x + g.c * y;
    }
}

// Columns p, q of m <- m G^dagger.
template <int N>
void rotate_cols(Matrix<N>& m, int p, int q, const Givens& g) {
    for (int i = 0; i < N; ++i) {
        const cplx x = m(i, p);
        const cplx y = m(i, q);
        m(i, p) = g.c * x + std::conj(g.s) * y;
        m(i, q) = -g.s * x + g.c * y;
    }
}

template <int N>
struct Schur {
    Matrix<N> triangular; // Z^dagger A Z
    Matrix<N> vectors;    // Z
};

// Complex Schur decomposition by Wilkinson-shifted QR on the Hessenberg form.
// For normal input the triangular factor is diagonal to roundoff and the
// Schur vectors are an orthonormal eigenbasis.
template <int N>
Schur<N> schur(Matrix<N> a, int max_iterations_per_eigenvalue = 100) {
    Matrix<N> z = Matrix<N>::identity();
    if constexpr (N == 3) {
        const Givens g = make_givens(a(1, 0), a(2, 0));
        rotate_rows(a, 1, 2, g);
        rotate_cols(a, 1, 2, g);
        rotate_cols(z, 1, 2, g);
        a(2, 0) = 0.0;
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int hi = N - 1;
    int iter = 0;
    while (hi > 0) {
        int l = hi;
        while (l > 0) {
            const double scale = std::abs(a(l, l)) + std::abs(a(l - 1, l - 1));
            if (std::abs(a(l, l - 1)) <= eps * (scale > 0.0 ? scale : 1.0)) {
                a(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > max_iterations_per_eigenvalue) {
            throw ConvergenceFailure("Schur QR iteration did not converge");
        }

        // Wilkinson shift from the trailing 2x2 block of the active window.
        const cplx p = a(hi - 1, hi - 1);
        const cplx q = a(hi, hi);
        // sqrt(((p - q)/2)^2 + bc) rather than sqrt(tr^2/4 - det): the latter
        // cancels when the two eigenvalues nearly coincide.
        const cplx half_diff = 0.5 * (p - q);
        const cplx disc = std::sqrt(half_diff * half_diff + a(hi - 1, hi) * a(hi, hi - 1));
        const cplx mid = 0.5 * (p + q);
        const cplx mu1 = mid + disc;
        const cplx mu2 = mid - disc;
        cplx mu = std::abs(mu1 - q) < std::abs(mu2 - q) ? mu1 : mu2;
        if (iter % 11 == 10) {
            // exceptional shift to break cycles
            mu = q + cplx(0.75 * std::abs(a(hi, hi - 1)), 0.5 * std::abs(a(hi, hi - 1)));
        }

        for (int i = 0; i < N; ++i) a(i, i) -= mu;
        std::array<Givens, N> rots{};
        for (int k = l; k < hi; ++k) {
            rots[k] = make_givens(a(k, k), a(k + 1, k));
            rotate_rows(a, k, k + 1, rots[k]);
            a(k + 1, k) = 0.0;
        }
        for (int k = l; k < hi; ++k) {
            rotate_cols(a, k, k + 1, rots[k]);
            rotate_cols(z, k, k + 1, rots[k]);
        }
        for (int i = 0; i < N; ++i) a(i, i) += mu;
    }
    return {a, z};
}

} // namespace detail

/// exp(-i * scale * H) for Hermitian H.
///
/// The 2x2 case uses the Pauli decomposition H = h0 I + h.sigma; the 3x3 case
/// goes through an orthonormal eigenbasis of H.
template <int N>
Unitary<N> herm_exp(const Matrix<N>& h, double scale) {
    if (!(hermiticity_defect(h) <= 1e-10)) {
        throw NonHermitianInput("herm_exp: input is not Hermitian");
    }
    if constexpr (N == 2) {
        const double h0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
        const double hx = 0.5 * (h(0, 1) + h(1, 0)).real();
        const double hy = 0.5 * (h(1, 0) - h(0, 1)).imag();
        const double hz = 0.5 * (h(0, 0).real() - h(1, 1).real());
        const double r = std::sqrt(hx * hx + hy * hy + hz * hz);
        const double c = std::cos(scale * r);
        const double s = r > 0.0 ? std::sin(scale * r) / r : 0.0;
        const cplx g = std::polar(1.0, -scale * h0);
        const cplx mi(0.0, -1.0);
        Matrix<2> u;
        u(0, 0) = g * (c + mi * s * hz);
        u(1, 1) = g * (c - mi * s * hz);
        u(0, 1) = g * (mi * s * cplx(hx, -hy));
        u(1, 0) = g * (mi * s * cplx(hx, hy));
        return Unitary<2>(u, kAnalyticUnitaryTol);
    } else {
        const auto [t, z] = detail::schur(h);
        Vec<N> phases{};
        for (int i = 0; i < N; ++i) phases[i] = std::polar(1.0, -scale * t(i, i).real());
        return Unitary<N>(z * Matrix<N>::diagonal(phases) * adjoint(z), kAnalyticUnitaryTol);
    }
}

/// Spectral form U = sum_k exp(i phase_k) P_k with degenerate eigenvalues merged.
template <int N>
struct EigenSystem {
    std::vector<double> phases;         // ascending, in (-pi, pi]
    std::vector<Matrix<N>> projectors;  // Hermitian, idempotent, mutually orthogonal
    std::vector<int> multiplicities;    // rank of each projector

    Matrix<N> reconstruct() const {
        Matrix<N> m;
        for (std::size_t k = 0; k < phases.size(); ++k) m += std::polar(1.0, phases[k]) * projectors[k];
        return m;
    }
};

inline constexpr double kDefaultMergeTol = 1e-9;

/// Eigen-decomposition of a unitary. Eigenphases within `merge_tol` of each
/// other (distance measured on the circle) share one projector.
template <int N>
EigenSystem<N> unitary_eigensystem(const Unitary<N>& u, double merge_tol = kDefaultMergeTol) {
    if (!(merge_tol > 0.0)) throw InvalidArgument("unitary_eigensystem: merge_tol must be positive");

    const auto [t, z] = detail::schur(u.matrix());

    struct Eig {
        double phase;
        Vec<N> vec;
    };
    std::array<Eig, N> eig;
    for (int i = 0; i < N; ++i) {
        eig[i].phase = wrap_phase(std::arg(t(i, i)));
        for (int r = 0; r < N; ++r) eig[i].vec[r] = z(r, i);
    }
    std::sort(eig.begin(), eig.end(), [](const Eig& a, const Eig& b) { return a.phase < b.phase; });

    // Chain clustering along the sorted phases, then close the circle.
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < N; ++i) {
        if (!clusters.empty() && circular_distance(eig[i].phase, eig[clusters.back().back()].phase) < merge_tol) {
            clusters.back().push_back(i);
        } else {
            clusters.push_back({i});
        }
    }
    if (clusters.size() > 1 &&
        circular_distance(eig[clusters.front().front()].phase, eig[clusters.back().back()].phase) < merge_tol) {
        auto& last = clusters.back();
        last.insert(last.end(), clusters.front().begin(), clusters.front().end());
        clusters.erase(clusters.begin());
    }

    struct Group {
        double phase;
        Matrix<N> projector;
        int multiplicity;
    };
    std::vector<Group> groups;
    for (const auto& cl : clusters) {
        cplx mean = 0.0;
        Matrix<N> p;
        for (int i : cl) {
            mean += std::polar(1.0, eig[i].phase);
            p += outer<N>(eig[i].vec, eig[i].vec);
        }
        groups.push_back({wrap_phase(std::arg(mean)), p, static_cast<int>(cl.size())});
    }
    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.phase < b.phase; });

    EigenSystem<N> es;
    for (auto& g : groups) {
        es.phases.push_back(g.phase);
        es.projectors.push_back(g.projector);
        es.multiplicities.push_back(g.multiplicity);
    }
    return es;
}

} // namespace zmap
