#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "idealclock/errors.hpp"

namespace idealclock {

/**
 * Contravariant four-vector with metric signature (+,-,-,-).
 * Components are stored in the order (t, x, y, z); geometric units c = 1.
 */
struct FourVector {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    FourVector() = default;
    FourVector(double t, double x, double y, double z) : c{t, x, y, z} {}

    double& operator[](int mu) { return c[static_cast<std::size_t>(mu)]; }
    double operator[](int mu) const { return c[static_cast<std::size_t>(mu)]; }

    FourVector& operator+=(const FourVector& o) {
        for (int mu = 0; mu < 4; ++mu) c[mu] += o.c[mu];
        return *this;
    }
    FourVector& operator-=(const FourVector& o) {
        for (int mu = 0; mu < 4; ++mu) c[mu] -= o.c[mu];
        return *this;
    }
    FourVector& operator*=(double s) {
        for (double& v : c) v *= s;
        return *this;
    }
};

inline FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
inline FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
inline FourVector operator*(double s, FourVector v) { return v *= s; }
inline FourVector operator*(FourVector v, double s) { return v *= s; }
inline FourVector operator/(FourVector v, double s) { return v *= 1.0 / s; }
inline FourVector operator-(const FourVector& v) {
    return FourVector{-v[0], -v[1], -v[2], -v[3]};
}

/** Minkowski inner product a^mu eta_{mu nu} b^nu. */
inline double dot(const FourVector& a, const FourVector& b) {
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

inline bool is_finite(const FourVector& v) {
    for (double x : v.c)
        if (!std::isfinite(x)) return false;
    return true;
}

/** Largest absolute component, a convenient overall scale. */
inline double max_abs(const FourVector& v) {
    double m = 0.0;
    for (double x : v.c) m = std::max(m, std::abs(x));
    return m;
}

namespace detail {

inline std::array<double, 4> lower(const FourVector& v) {
    return {v[0], -v[1], -v[2], -v[3]};
}

}  // namespace detail

/**
 * Pauli-Lubanski style pseudovector w^mu = eps^{mu nu rho sigma} p_nu k_rho Pi_sigma
 * with the convention eps^{0123} = +1 and indices lowered by the metric.
 * Evaluated by cofactor expansion of the 3x4 matrix of lowered components.
 */
inline FourVector mathisson(const FourVector& p, const FourVector& k, const FourVector& pi) {
    const auto a = detail::lower(p);
    const auto b = detail::lower(k);
    const auto d = detail::lower(pi);
    auto minor3 = [&](int i, int j, int l) {
        return a[i] * (b[j] * d[l] - b[l] * d[j]) - a[j] * (b[i] * d[l] - b[l] * d[i]) +
               a[l] * (b[i] * d[j] - b[j] * d[i]);
    };
    return FourVector{minor3(1, 2, 3), -minor3(0, 2, 3), minor3(0, 1, 3), -minor3(0, 1, 2)};
}

/**
 * General Lorentz transformation as a 4x4 matrix acting on contravariant
 * components. Built from boosts and spatial rotations; composition is matrix
 * multiplication, so a product of valid factors satisfies L^T eta L = eta to
 * rounding accuracy.
 */
struct LorentzTransform {
    std::array<std::array<double, 4>, 4> a{};

    static LorentzTransform identity() {
        LorentzTransform L;
        for (int i = 0; i < 4; ++i) L.a[i][i] = 1.0;
        return L;
    }
};

inline FourVector apply(const LorentzTransform& L, const FourVector& v) {
    FourVector out;
    for (int mu = 0; mu < 4; ++mu) {
        double s = 0.0;
        for (int nu = 0; nu < 4; ++nu) s += L.a[mu][nu] * v[nu];
        out[mu] = s;
    }
    return out;
}

inline LorentzTransform operator*(const LorentzTransform& A, const LorentzTransform& B) {
    LorentzTransform C;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += A.a[i][k] * B.a[k][j];
            C.a[i][j] = s;
        }
    return C;
}

namespace detail {

inline std::array<double, 3> unit3(const std::array<double, 3>& axis) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n == 0.0) throw std::invalid_argument("axis must be a nonzero spatial direction");
    return {axis[0] / n, axis[1] / n, axis[2] / n};
}

}  // namespace detail

/** Pure boost with the given rapidity along the (normalized) spatial axis. */
inline LorentzTransform boost(double rapidity, const std::array<double, 3>& axis) {
    const auto n = detail::unit3(axis);
    const double ch = std::cosh(rapidity);
    const double sh = std::sinh(rapidity);
    LorentzTransform L = LorentzTransform::identity();
    L.a[0][0] = ch;
    for (int i = 0; i < 3; ++i) {
        L.a[0][i + 1] = sh * n[i];
        L.a[i + 1][0] = sh * n[i];
        for (int j = 0; j < 3; ++j) L.a[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + (ch - 1.0) * n[i] * n[j];
    }
    return L;
}

/** Spatial rotation by the given angle about the (normalized) axis. */
inline LorentzTransform rotation(double angle, const std::array<double, 3>& axis) {
    const auto n = detail::unit3(axis);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    LorentzTransform L = LorentzTransform::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double eps = 0.0;  // eps_{ijk} n_k
            const int k = 3 - i - j;
            if (i != j && k >= 0 && k <= 2) eps = ((j - i + 3) % 3 == 1 ? 1.0 : -1.0) * n[k];
            L.a[i + 1][j + 1] = c * (i == j ? 1.0 : 0.0) + (1.0 - c) * n[i] * n[j] - s * eps;
        }
    return L;
}

/** Largest entry of L^T eta L - eta, zero for an exact Lorentz matrix. */
inline double orthonormality_defect(const LorentzTransform& L) {
    static constexpr double eta[4] = {1.0, -1.0, -1.0, -1.0};
    double worst = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double s = 0.0;
            for (int al = 0; al < 4; ++al) s += L.a[al][mu] * eta[al] * L.a[al][nu];
            const double target = (mu == nu) ? eta[mu] : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    return worst;
}

/**
 * Point of the complex projective line in homogeneous coordinates (alpha : beta).
 * Both components zero is not a point and is rejected.
 */
struct ProjectivePoint {
    std::complex<double> alpha{0.0, 0.0};
    std::complex<double> beta{0.0, 0.0};

    ProjectivePoint() = default;
    ProjectivePoint(std::complex<double> a, std::complex<double> b) : alpha(a), beta(b) {
        if (std::abs(a) == 0.0 && std::abs(b) == 0.0)
            throw std::invalid_argument("projective point needs a nonzero coordinate");
    }

    double norm() const { return std::sqrt(std::norm(alpha) + std::norm(beta)); }
    bool at_infinity(double tol = 1e-12) const { return std::abs(beta) <= tol * norm(); }

    /** Affine coordinate alpha/beta; infinite at the pole. */
    std::complex<double> affine() const { return alpha / beta; }
};

namespace detail {

inline std::complex<double> proj_det(const ProjectivePoint& u, const ProjectivePoint& v) {
    return u.alpha * v.beta - v.alpha * u.beta;
}

}  // namespace detail

inline bool projectively_equal(const ProjectivePoint& u, const ProjectivePoint& v,
                               double tol = 1e-10) {
    return std::abs(detail::proj_det(u, v)) <= tol * u.norm() * v.norm();
}

/**
 * Stereographic image of a future null direction on the celestial sphere,
 * projected from the north pole. Both charts (k1 + i k2 : k0 - k3) and
 * (k0 + k3 : k1 - i k2) describe the same point for null k; the better
 * conditioned one is returned.
 */
inline ProjectivePoint stereographic(const FourVector& k) {
    if (k[0] <= 0.0) throw constraint_violation("stereographic: direction must be future-pointing");
    if (std::abs(dot(k, k)) > 1e-9 * k[0] * k[0])
        throw constraint_violation("stereographic: direction must be null");
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> a1 = k[1] + i * k[2], b1 = k[0] - k[3];
    const std::complex<double> a2 = k[0] + k[3], b2 = k[1] - i * k[2];
    if (std::norm(a1) + std::norm(b1) >= std::norm(a2) + std::norm(b2))
        return ProjectivePoint(a1, b1);
    return ProjectivePoint(a2, b2);
}

/**
 * Cross-ratio ((a-c)(b-d)) / ((a-d)(b-c)) in homogeneous coordinates.
 * Finite and well defined when none of the pairs {a,c}, {a,d}, {b,c}, {b,d}
 * coincide; equals 1 whenever a = b or c = d.
 */
inline std::complex<double> cross_ratio(const ProjectivePoint& a, const ProjectivePoint& b,
                                        const ProjectivePoint& c, const ProjectivePoint& d) {
    const double tol = 1e-12;
    if (projectively_equal(a, c, tol) || projectively_equal(a, d, tol) ||
        projectively_equal(b, c, tol) || projectively_equal(b, d, tol))
        throw degenerate_configuration("cross_ratio: coincident point pair");
    using detail::proj_det;
    return (proj_det(a, c) * proj_det(b, d)) / (proj_det(a, d) * proj_det(b, c));
}

/**
 * Fractional linear map of the projective line, given by an invertible
 * complex 2x2 matrix acting on homogeneous coordinates.
 */
struct MobiusMap {
    std::complex<double> m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};

    MobiusMap() = default;
    MobiusMap(std::complex<double> a, std::complex<double> b, std::complex<double> c,
              std::complex<double> d)
        : m00(a), m01(b), m10(c), m11(d) {
        const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
        if (std::abs(a * d - b * c) <= 1e-14 * scale * scale)
            throw std::invalid_argument("mobius map must be invertible");
    }

    ProjectivePoint operator()(const ProjectivePoint& z) const {
        return ProjectivePoint(m00 * z.alpha + m01 * z.beta, m10 * z.alpha + m11 * z.beta);
    }
};

inline MobiusMap compose(const MobiusMap& A, const MobiusMap& B) {
    return MobiusMap(A.m00 * B.m00 + A.m01 * B.m10, A.m00 * B.m01 + A.m01 * B.m11,
                     A.m10 * B.m00 + A.m11 * B.m10, A.m10 * B.m01 + A.m11 * B.m11);
}

}  // namespace idealclock
