#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anytime/errors.hpp"
#include "anytime/plant.hpp"
#include "anytime/smallmat.hpp"

// Set-membership estimation: the modulo lattice quantizer, the hypercuboidal
// filter (axis-aligned boxes, exact containment), and the ellipsoidal filter
// built on the minimum-volume covering ellipsoid of an ellipsoid-slab
// intersection. Quantizer bins are left-closed right-open.
namespace anytime::estimation {

using smallmat::Mat;
using smallmat::Vec;

struct Interval {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

struct QuantizerSpec {
    double delta = 1.0;       // bin width
    std::int64_t levels = 2;  // bin count, a power of two

    void validate() const {
        if (delta <= 0.0) throw std::invalid_argument("QuantizerSpec: delta > 0");
        if (levels < 2 || (levels & (levels - 1)) != 0)
            throw std::invalid_argument("QuantizerSpec: levels must be a power of 2");
    }
};

// Q(y) = floor(y / delta) mod levels.
inline std::int64_t quantize(const QuantizerSpec& q, double y) {
    q.validate();
    const auto j = static_cast<std::int64_t>(std::floor(y / q.delta));
    return ((j % q.levels) + q.levels) % q.levels;
}

// Returns the unique bin [j delta, (j+1) delta) with j = index (mod levels)
// that intersects the prediction interval. The interval must be no wider
// than delta * levels; otherwise the unwrap is ambiguous.
inline Interval dequantize(const QuantizerSpec& q, std::int64_t index,
                           const Interval& prediction) {
    q.validate();
    if (index < 0 || index >= q.levels)
        throw std::invalid_argument("dequantize: index out of range");
    const double span = q.delta * static_cast<double>(q.levels);
    if (prediction.width() > span * (1.0 + 1e-9))
        throw quantizer_overflow_error(
            "dequantize: prediction interval wider than the unwrap window");
    // The prediction interval is treated as closed; a bin meets it when
    // [j delta, (j+1) delta) overlaps [lo, hi] in more than direction.
    const auto j0 = static_cast<std::int64_t>(std::floor(prediction.lo / q.delta));
    const std::int64_t r0 = ((j0 % q.levels) + q.levels) % q.levels;
    std::int64_t j = j0 + ((index - r0 + q.levels) % q.levels);
    const double slack = 1e-9 * q.delta;
    if (static_cast<double>(j) * q.delta > prediction.hi + slack)
        throw quantizer_overflow_error(
            "dequantize: no bin with this residue meets the prediction interval");
    if (static_cast<double>(j + q.levels) * q.delta < prediction.hi - slack)
        throw quantizer_overflow_error(
            "dequantize: two bins with this residue meet the prediction interval");
    return {static_cast<double>(j) * q.delta,
            static_cast<double>(j + 1) * q.delta};
}

// --- Hypercuboidal filter -------------------------------------------------

struct Hypercuboid {
    Vec lo, hi;

    std::size_t dim() const { return lo.size(); }
    Vec center() const {
        Vec c(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }
    Vec widths() const {
        Vec w(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) w[i] = hi[i] - lo[i];
        return w;
    }
    bool contains(const Vec& x, double tol = 0.0) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    }
};

// Propagates the box through x' = F x + G u + w by interval arithmetic; the
// widths obey Delta' = |F| Delta + W 1.
inline Hypercuboid hypercuboid_time_update(const Hypercuboid& h, const Mat& f,
                                           const Vec& gu, double w) {
    const std::size_t m = h.dim();
    Hypercuboid out;
    out.lo.assign(m, 0.0);
    out.hi.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double lo = gu[i] - 0.5 * w, hi = gu[i] + 0.5 * w;
        for (std::size_t j = 0; j < m; ++j) {
            const double fij = f(i, j);
            if (fij >= 0.0) { lo += fij * h.lo[j]; hi += fij * h.hi[j]; }
            else            { lo += fij * h.hi[j]; hi += fij * h.lo[j]; }
        }
        out.lo[i] = lo;
        out.hi[i] = hi;
    }
    return out;
}

// Intersects coordinate `coord` with bin (+-) V/2; other coordinates keep
// their intervals. An empty intersection cannot happen with correct decoding.
inline Hypercuboid hypercuboid_measurement_update(Hypercuboid h,
                                                  const Interval& bin,
                                                  double v_bound, int coord) {
    const auto c = static_cast<std::size_t>(coord);
    const double lo = std::max(h.lo[c], bin.lo - 0.5 * v_bound);
    const double hi = std::min(h.hi[c], bin.hi + 0.5 * v_bound);
    if (lo > hi + 1e-9 * (1.0 + std::abs(lo)))
        throw internal_corruption_error(
            "hypercuboid_measurement_update: empty intersection");
    h.lo[c] = lo;
    h.hi[c] = std::max(lo, hi);
    return h;
}

// Width recursion of the scalar-measurement filter: the measurement pins the
// first coordinate to delta + V, the time update applies |F| and adds W.
inline Vec delta_recursion_step(const plant::CanonicalPlant& p, Vec delta,
                                double q_delta) {
    delta[0] = q_delta + p.V;
    const Mat fbar = smallmat::abs_matrix(p.F);
    Vec next = fbar * delta;
    for (auto& x : next) x += p.W;
    return next;
}

struct SteadyState {
    Vec delta_tu;             // fixed point of the width recursion
    std::int64_t min_levels;  // smallest power of two satisfying the unwrap
    double asymptotic_ratio;  // lim_{delta->inf} Delta^{(1)} / delta
};

// Closed form Delta_tu = (delta+V) L_u a + W L_u 1 where (L_u x)_i is the
// tail sum over j >= i, plus the unwrap sizing over the whole transient.
inline SteadyState steady_state_delta(const plant::CanonicalPlant& p,
                                      double q_delta, double v_bound,
                                      double w_bound) {
    if (p.q != 1)
        throw std::invalid_argument("steady_state_delta: scalar-measurement only");
    const auto& a = p.blocks[0];
    const std::size_t m = a.size();
    SteadyState out;
    out.delta_tu.assign(m, 0.0);
    double tail = 0.0;
    for (std::size_t i = m; i-- > 0;) {
        tail += std::abs(a[i]);
        out.delta_tu[i] =
            (q_delta + v_bound) * tail + w_bound * static_cast<double>(m - i);
    }
    out.asymptotic_ratio = tail;  // sum of |a_i|

    // Transient from a zero-width start; the first coordinate peaks at the
    // fixed point within m steps.
    plant::CanonicalPlant tmp = p;
    tmp.V = v_bound;
    tmp.W = w_bound;
    Vec d(m, 0.0);
    double peak = 0.0;
    for (std::size_t t = 0; t <= m; ++t) {
        peak = std::max(peak, d[0]);
        d = delta_recursion_step(tmp, d, q_delta);
    }
    peak = std::max(peak, d[0]);
    std::int64_t levels = 2;
    while (static_cast<double>(levels) * q_delta < peak + v_bound) levels <<= 1;
    out.min_levels = levels;
    return out;
}

// --- Ellipsoidal filter -----------------------------------------------------

struct Ellipsoid {
    Mat P;  // symmetric positive semidefinite shape matrix
    Vec c;  // center

    // (x - c)^T P^{-1} (x - c); containment means <= 1.
    double quad_form(const Vec& x) const {
        Vec d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - c[i];
        const Vec y = smallmat::solve(P, d);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += d[i] * y[i];
        return s;
    }
};

// F P F^T accumulates a tiny antisymmetric floating-point residue that the
// recursion would amplify by ~|F|^2 per step; fold it back every update.
inline void symmetrize(Mat& p) {
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double v = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = v;
            p(j, i) = v;
        }
}

struct SlabUpdate {
    Ellipsoid e;
    double xi = 0.0, a = 1.0, b = 1.0;  // reported for analysis/tests
};

// Minimum-volume ellipsoid covering the intersection of E(P, c) with the slab
// gamma sqrt(h^T P h) <= <h, x - c> <= delta_s sqrt(h^T P h). The three cases
// follow the closed form; inputs with |delta_s| < |gamma| are handled by the
// reflection x -> -x.
inline SlabUpdate min_volume_ellipsoid_slab(const Ellipsoid& e, const Vec& h,
                                            double gamma, double delta_s) {
    const std::size_t m = e.c.size();
    if (m < 2)
        throw std::invalid_argument("min_volume_ellipsoid_slab: need m >= 2");
    double hnorm = 0.0;
    for (double x : h) hnorm += x * x;
    if (hnorm == 0.0)
        throw std::invalid_argument("min_volume_ellipsoid_slab: zero direction");

    gamma = std::max(gamma, -1.0);
    delta_s = std::min(delta_s, 1.0);
    if (gamma > delta_s)
        throw internal_corruption_error(
            "min_volume_ellipsoid_slab: slab does not meet the ellipsoid");

    const bool reflect = std::abs(delta_s) < std::abs(gamma);
    const double g = reflect ? -delta_s : gamma;
    const double d = reflect ? -gamma : delta_s;
    const double md = static_cast<double>(m);

    double xi = 0.0, a = 1.0, b = 1.0;
    if (g * d < -1.0 / md) {
        // Case 1: the slab is too wide to shrink anything.
    } else if (std::abs(g + d) < 1e-14) {
        // Case 2: symmetric slab.
        a = md * d * d;
        b = md * (1.0 - d * d) / (md - 1.0);
    } else {
        // Case 3: general slab.
        const double disc = md * md * (d * d - g * g) * (d * d - g * g) +
                            4.0 * (1.0 - g * g) * (1.0 - d * d);
        xi = (md * (g + d) * (g + d) + 2.0 * (1.0 + g * d) - std::sqrt(disc)) /
             (2.0 * (md + 1.0) * (g + d));
        a = md * (xi - g) * (d - xi);
        b = (a - a * g * g) / (a - (xi - g) * (xi - g));
    }

    // P h and h^T P h for the rank-one correction.
    Vec ph(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) ph[i] += e.P(i, j) * h[j];
    double hph = 0.0;
    for (std::size_t i = 0; i < m; ++i) hph += h[i] * ph[i];
    if (hph <= 0.0)
        throw std::invalid_argument(
            "min_volume_ellipsoid_slab: P degenerate along h");

    SlabUpdate out;
    out.xi = reflect ? -xi : xi;
    out.a = a;
    out.b = b;
    out.e.P = Mat(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out.e.P(i, j) = b * e.P(i, j) - (b - a) * ph[i] * ph[j] / hph;
    symmetrize(out.e.P);
    out.e.c = e.c;
    const double scale = out.xi / std::sqrt(hph);
    for (std::size_t i = 0; i < m; ++i) out.e.c[i] += scale * ph[i];
    return out;
}

// Time update P' = (1+eps') F P F^T + (1 + 1/eps') (m W^2 / 4) I. The noise
// term covers the W-hypercube (it is contained in the ball of radius
// sqrt(m) W/2), so containment is preserved for every F.
inline Ellipsoid ellipsoid_time_update(const Ellipsoid& e, const Mat& f,
                                       const Vec& gu, double w_bound,
                                       double eps_prime) {
    if (eps_prime <= 0.0)
        throw std::invalid_argument("ellipsoid_time_update: eps' > 0");
    const std::size_t m = e.c.size();
    Ellipsoid out;
    out.P = (f * e.P * f.transpose()).scaled(1.0 + eps_prime);
    const double noise = (1.0 + 1.0 / eps_prime) *
                         (static_cast<double>(m) * w_bound * w_bound / 4.0);
    for (std::size_t i = 0; i < m; ++i) out.P(i, i) += noise;
    symmetrize(out.P);
    out.c = f * e.c;
    for (std::size_t i = 0; i < m; ++i) out.c[i] += gu[i];
    return out;
}

// Measurement update along coordinate `coord`: normalizes the quantizer bin
// (widened by the measurement-noise bound) into slab bounds and applies the
// minimum-volume covering ellipsoid. b_t <= m/(m-1) always holds.
inline SlabUpdate ellipsoid_measurement_update(const Ellipsoid& e,
                                               const Interval& bin,
                                               double v_bound, int coord) {
    const auto ci = static_cast<std::size_t>(coord);
    const double p11 = e.P(ci, ci);
    if (p11 <= 0.0) {
#ifdef ANYTIME_DEBUG_ELLIPSOID
        std::fprintf(stderr, "DEGEN p11=%.12g P=[%g %g %g; %g %g %g; %g %g %g]\n",
                     p11, e.P(0,0), e.P(0,1), e.P(0,2), e.P(1,0), e.P(1,1),
                     e.P(1,2), e.P(2,0), e.P(2,1), e.P(2,2));
#endif
        throw internal_corruption_error(
            "ellipsoid_measurement_update: degenerate leading variance");
    }
    const double s = std::sqrt(p11);
    double gamma = (bin.lo - 0.5 * v_bound - e.c[ci]) / s;
    double delta_s = (bin.hi + 0.5 * v_bound - e.c[ci]) / s;
    if (gamma > 1.0 || delta_s < -1.0)
        throw internal_corruption_error(
            "ellipsoid_measurement_update: bin disjoint from the ellipsoid");
    Vec h(e.c.size(), 0.0);
    h[ci] = 1.0;
    SlabUpdate up = min_volume_ellipsoid_slab(e, h, gamma, delta_s);
    const double md = static_cast<double>(e.c.size());
    if (up.b > md / (md - 1.0) + 1e-9)
        throw internal_corruption_error(
            "ellipsoid_measurement_update: b_t bound violated");
    return up;
}

// Diagonal upper-bound recursion for the ellipsoid filter, matching the
// implemented time update's noise inflation.
inline Vec ellipsoid_bound_recursion_step(const plant::CanonicalPlant& p,
                                          Vec delta_e, double q_delta,
                                          double eps_prime) {
    const std::size_t m = delta_e.size();
    const double theta = std::sqrt(static_cast<double>(m) / (m - 1.0));
    Vec mu = delta_e;
    mu[0] = q_delta + p.V;
    for (std::size_t i = 1; i < m; ++i) mu[i] *= theta;
    const Mat fbar = smallmat::abs_matrix(p.F);
    Vec next = fbar * mu;
    const double scale = std::sqrt(1.0 + eps_prime);
    const double noise = std::sqrt((1.0 + 1.0 / eps_prime) * m) * p.W / 2.0;
    for (auto& x : next) x = scale * x + noise;
    return next;
}

}  // namespace anytime::estimation
