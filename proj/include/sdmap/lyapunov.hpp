#pragma once

// Lyapunov spectrum of T by tangent-space QR re-orthonormalization, and the
// exponent of the reduced map H.

#include <sdmap/error.hpp>
#include <sdmap/map_core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace sdmap {

/// Logs of |R_ii| and |2x| are taken after flooring the argument here.
inline constexpr double kLogFloor = 1e-300;

struct LyapunovOptions {
    std::size_t n_iter = 1'000'000;
    std::size_t transient = 10'000;
    /// Steps between re-orthonormalizations.
    std::size_t reorth_every = 1;
    double escape_radius = kDefaultEscapeRadius;
};

/// Exponents per application of T, natural log, sorted descending.
struct LyapunovResult {
    std::array<double, 3> exponents{};
    std::size_t n_used = 0;
    std::size_t transient = 0;
    Point3 p0;
};

namespace detail {

/// Modified Gram-Schmidt on the columns of m; returns |R_ii| and overwrites m with Q.
inline std::array<double, 3> orthonormalize(Mat3& m) {
    std::array<double, 3> diag{};
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < 3; ++i) dot += m(i, k) * m(i, j);
            for (int i = 0; i < 3; ++i) m(i, j) -= dot * m(i, k);
        }
        double norm = 0.0;
        for (int i = 0; i < 3; ++i) norm += m(i, j) * m(i, j);
        norm = std::sqrt(norm);
        diag[static_cast<std::size_t>(j)] = norm;
        if (norm > kLogFloor) {
            for (int i = 0; i < 3; ++i) m(i, j) /= norm;
        } else {
            // Collapsed direction: restart it from any unit vector orthogonal to the others.
            for (int e = 0; e < 3; ++e) {
                double v[3] = {0, 0, 0};
                v[e] = 1.0;
                for (int k = 0; k < j; ++k) {
                    double dot = 0.0;
                    for (int i = 0; i < 3; ++i) dot += m(i, k) * v[i];
                    for (int i = 0; i < 3; ++i) v[i] -= dot * m(i, k);
                }
                const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                if (nv > 0.5) {
                    for (int i = 0; i < 3; ++i) m(i, j) = v[i] / nv;
                    break;
                }
            }
        }
    }
    return diag;
}

} // namespace detail

inline LyapunovResult lyapunov_spectrum(const Point3& p0, const Params& params, const LyapunovOptions& opt = {}) {
    if (opt.n_iter == 0) throw Error(Errc::invalid_argument, "n_iter must be positive");
    if (opt.reorth_every == 0) throw Error(Errc::invalid_argument, "reorth_every must be positive");
    Point3 p = p0;
    std::size_t step = 0;
    const auto advance = [&] {
        if (!(p.sup_norm() <= opt.escape_radius)) throw DivergedError(step);
        p = Point3{p.y, p.z, p.x * p.x + params.b};
        ++step;
    };
    for (std::size_t i = 0; i < opt.transient; ++i) advance();

    Mat3 q = Mat3::identity();
    std::array<double, 3> sums{};
    for (std::size_t i = 0; i < opt.n_iter; ++i) {
        q = jacobian_T(p) * q;
        advance();
        if ((i + 1) % opt.reorth_every == 0 || i + 1 == opt.n_iter) {
            const auto r = detail::orthonormalize(q);
            for (std::size_t k = 0; k < 3; ++k) sums[k] += std::log(std::max(r[k], kLogFloor));
        }
    }
    if (!(p.sup_norm() <= opt.escape_radius)) throw DivergedError(step);

    LyapunovResult out;
    for (std::size_t k = 0; k < 3; ++k) out.exponents[k] = sums[k] / static_cast<double>(opt.n_iter);
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    out.n_used = opt.n_iter;
    out.transient = opt.transient;
    out.p0 = p0;
    return out;
}

struct Lyapunov1DResult {
    double exponent = 0.0;
    /// The orbit hit the critical point 0 (log argument floored).
    bool superstable = false;
};

/// Average of ln|2x| along the orbit of H.
inline Lyapunov1DResult lyapunov_1d(double x0, const Params& params, std::size_t n_iter = 1'000'000,
                                    std::size_t transient = 10'000,
                                    double escape_radius = kDefaultEscapeRadius) {
    if (n_iter == 0) throw Error(Errc::invalid_argument, "n_iter must be positive");
    double x = x0;
    std::size_t step = 0;
    const auto check = [&] {
        if (!(std::abs(x) <= escape_radius)) throw DivergedError(step);
    };
    for (; step < transient; ++step) {
        check();
        x = x * x + params.b;
    }
    Lyapunov1DResult out;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_iter; ++i, ++step) {
        check();
        const double a = std::abs(2.0 * x);
        if (a < kLogFloor) out.superstable = true;
        sum += std::log(std::max(a, kLogFloor));
        x = x * x + params.b;
    }
    out.exponent = sum / static_cast<double>(n_iter);
    return out;
}

} // namespace sdmap
