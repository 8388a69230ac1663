#pragma once

// The map T(x, y, z) = (y, z, x^2 + b), its iterates, the reduced 1D map
// H(u) = u^2 + b shared by all three coordinate strands, and Jacobians.

#include <sdmap/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace sdmap {

/// Orbits leaving the ball max(|x|, |y|, |z|) <= R are divergent.
inline constexpr double kDefaultEscapeRadius = 4.0;

struct Params {
    double b = 0.0;

    explicit Params(double b_) : b(b_) {
        if (!std::isfinite(b)) throw Error(Errc::invalid_argument, "parameter b must be finite");
    }
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    double sup_norm() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }

    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double sup_distance(const Point3& a, const Point3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

/// Lexicographic (x, y, z) order.
inline bool lex_less(const Point3& a, const Point3& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> a{};

    static Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
    static Mat3 diagonal(double d0, double d1, double d2) { return Mat3{{d0, 0, 0, 0, d1, 0, 0, 0, d2}}; }

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }

    double det() const {
        const auto& m = a;
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    double trace() const { return a[0] + a[4] + a[8]; }

    bool is_upper_triangular() const { return a[3] == 0.0 && a[6] == 0.0 && a[7] == 0.0; }
    bool is_lower_triangular() const { return a[1] == 0.0 && a[2] == 0.0 && a[5] == 0.0; }

    friend Mat3 operator*(const Mat3& l, const Mat3& r) {
        Mat3 out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += l(i, k) * r(k, j);
                out(i, j) = s;
            }
        return out;
    }

    friend bool operator==(const Mat3&, const Mat3&) = default;
};

inline double max_abs_diff(const Mat3& l, const Mat3& r) {
    double m = 0.0;
    for (std::size_t i = 0; i < 9; ++i) m = std::max(m, std::abs(l.a[i] - r.a[i]));
    return m;
}

/// H(u) = u^2 + b. F and G share the formula since the outer factors are identities.
inline double h1d(double u, const Params& params) { return u * u + params.b; }

inline double h1d_n(double u, const Params& params, int n) {
    for (int i = 0; i < n; ++i) u = h1d(u, params);
    return u;
}

inline Point3 apply_T(const Point3& p, const Params& params) {
    Point3 q{p.y, p.z, p.x * p.x + params.b};
    if (!q.finite()) throw Error(Errc::overflow, "T produced a non-finite state");
    return q;
}

enum class IterationMode {
    composition,  ///< n-fold application of T
    decoupled,    ///< T^{3k} = (H^k, H^k, H^k) coordinate-wise, then 0-2 single steps
};

inline Point3 apply_T_n(Point3 p, const Params& params, std::int64_t n,
                        IterationMode mode = IterationMode::composition) {
    if (n < 0) throw Error(Errc::invalid_argument, "iterate count must be nonnegative");
    if (mode == IterationMode::decoupled) {
        const std::int64_t k = n / 3;
        for (std::int64_t i = 0; i < k; ++i) {
            p = Point3{h1d(p.x, params), h1d(p.y, params), h1d(p.z, params)};
            if (!p.finite()) throw Error(Errc::overflow, "T^3 produced a non-finite state");
        }
        n -= 3 * k;
    }
    for (std::int64_t i = 0; i < n; ++i) p = apply_T(p, params);
    return p;
}

/// Jacobian of T at p: rows (0,1,0), (0,0,1), (2x,0,0). Determinant is 2x.
inline Mat3 jacobian_T(const Point3& p) { return Mat3{{0, 1, 0, 0, 0, 1, 2.0 * p.x, 0, 0}}; }

/// Product J(p_{n-1}) ... J(p_1) J(p_0) along consecutive states.
inline Mat3 jacobian_product(const std::vector<Point3>& states) {
    Mat3 m = Mat3::identity();
    for (const auto& p : states) m = jacobian_T(p) * m;
    return m;
}

/// Records `n` consecutive states after `transient` unrecorded steps.
/// Throws DivergedError with the number of applications of T after which the
/// state first left the escape ball (0 if p0 itself is outside).
inline std::vector<Point3> orbit(const Point3& p0, const Params& params, std::size_t n,
                                 std::size_t transient = 0,
                                 double escape_radius = kDefaultEscapeRadius) {
    if (n == 0) throw Error(Errc::invalid_argument, "orbit length must be positive");
    if (!p0.finite()) throw Error(Errc::invalid_argument, "initial state must be finite");
    std::vector<Point3> out;
    out.reserve(n);
    Point3 p = p0;
    const std::size_t total = transient + n;
    for (std::size_t step = 0; step < total; ++step) {
        if (!(p.sup_norm() <= escape_radius)) throw DivergedError(step);
        if (step >= transient) out.push_back(p);
        if (step + 1 < total) {
            p = Point3{p.y, p.z, p.x * p.x + params.b};
        }
    }
    return out;
}

} // namespace sdmap
