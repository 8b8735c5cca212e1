#pragma once

#include <cmath>
#include <stdexcept>

#include "anytime/estimation.hpp"
#include "anytime/sim.hpp"
#include "anytime/smallmat.hpp"

// Ready-made closed-loop configurations: a cart-stick balancer (inverted
// pendulum on a cart, 0.1 s sampling) stabilized through a rate-1/3 code,
// and a 3-dimensional plant used to explore the trade-off between quantizer
// resolution and decoding reliability.
namespace anytime::presets {

using smallmat::Mat;
using smallmat::Vec;

// Smallest quantizer bin width for which the modulo/innovation window covers
// the steady-state first-coordinate uncertainty, times a safety margin.
// Unambiguous unwrap needs one spare bin: delta*(levels-1) >= Delta + V.
inline double size_cuboid_delta(const plant::CanonicalPlant& p,
                                std::int64_t levels, double margin) {
    double coeff_sum = 0.0;
    for (double a : p.blocks[0]) coeff_sum += std::abs(a);
    const double lv = static_cast<double>(levels) - 1.0;
    if (lv <= coeff_sum)
        throw std::invalid_argument("size_cuboid_delta: rate below the bound");
    // (levels-1)*delta >= Delta_tu^(1) + V with Delta_tu^(1) = (delta+V)S + W*m.
    const double base = (p.V * coeff_sum + p.W * p.m_x + p.V) / (lv - coeff_sum);
    return margin * base;
}

// Bin width for the ellipsoidal filter: iterate the diagonal upper-bound
// recursion to its fixed point and require the window to cover 2*Delta_e + V.
inline double size_ellipsoid_delta(const plant::CanonicalPlant& p,
                                   std::int64_t levels, double eps_prime,
                                   double margin) {
    const double lv = static_cast<double>(levels) - 1.0;
    auto window_needed = [&](double delta) {
        Vec d(static_cast<std::size_t>(p.m_x), 0.0);
        for (int i = 0; i < 400; ++i)
            d = estimation::ellipsoid_bound_recursion_step(p, d, delta, eps_prime);
        return 2.0 * d[0] + p.V;
    };
    double lo = 1e-9, hi = 1.0;
    while (window_needed(hi) > lv * hi) {
        hi *= 2.0;
        if (hi > 1e9)
            throw std::invalid_argument(
                "size_ellipsoid_delta: rate below the ellipsoid bound");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (window_needed(mid) > lv * mid) lo = mid;
        else hi = mid;
    }
    return margin * hi;
}

// Cart-stick balancer, sampled at 0.1 s: state (stick angle, stick angular
// velocity, cart velocity). Simulated in observer canonical coordinates; the
// physical gain K is mapped through the observability transform.
inline sim::LoopConfig cart_stick_config(
    thresholds::FilterKind filter = thresholds::FilterKind::Hypercuboid,
    std::uint64_t seed = 0, std::int64_t horizon = 500, int k = 5, int n = 15,
    double eps = 0.3) {
    const Mat f_raw(3, 3,
                    {1.161, 0.105, 0.0,
                     3.3, 1.161, 0.002,
                     -3.265, -0.160, 0.979});
    const Mat g_raw(3, 1, {-0.003, -0.068, 0.859});
    const Mat h_raw(1, 3, {10.0, 0.0, 0.0});
    const Mat k_raw(1, 3, {-81.55, -14.37, -0.04});

    const Vec a = smallmat::char_poly(f_raw);
    const Mat f_canon = smallmat::companion_from_coeffs(a);
    const Mat h_canon(1, 3, {1.0, 0.0, 0.0});

    // T = Oo^{-1} O maps physical coordinates to canonical ones.
    auto obs_matrix = [](const Mat& h, const Mat& f) {
        Mat o(3, 3);
        Mat row = h;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) o(static_cast<std::size_t>(r),
                                          static_cast<std::size_t>(c)) =
                row(0, static_cast<std::size_t>(c));
            row = row * f;
        }
        return o;
    };
    const Mat t = smallmat::inverse(obs_matrix(h_canon, f_canon)) *
                  obs_matrix(h_raw, f_raw);
    const Mat t_inv = smallmat::inverse(t);

    plant::CanonicalPlant p =
        plant::plant_from_coeffs(a, t * g_raw, k_raw * t_inv, 0.05, 0.05);

    sim::LoopConfig cfg;
    cfg.plant = std::move(p);
    cfg.filter = filter;
    cfg.n = n;
    cfg.k = k;
    cfg.depth = static_cast<int>(horizon);
    cfg.chan = {channel::Kind::BEC, eps, 1};
    cfg.horizon = horizon;
    cfg.feedback = {32, 16};
    cfg.timing = sim::ControlTiming::Filtered;
    cfg.observer_knows_control = false;
    cfg.eps_prime = 0.1;
    cfg.process_noise = {sim::NoiseKind::TruncatedGaussian, 0.1, 0.025};
    cfg.measurement_noise = {sim::NoiseKind::TruncatedGaussian, 0.1, 0.025};
    cfg.x0 = {0.0, 0.0, 0.0};
    cfg.init_halfwidth = {0.0, 0.0, 0.0};
    cfg.init_p0 = 0.01;
    cfg.seed = seed;

    estimation::QuantizerSpec q;
    q.levels = std::int64_t{1} << k;
    q.delta = filter == thresholds::FilterKind::Hypercuboid
                  ? size_cuboid_delta(cfg.plant, q.levels, 1.35)
                  : size_ellipsoid_delta(cfg.plant, q.levels, cfg.eps_prime, 1.35);
    cfg.quantizers = {q};
    return cfg;
}

// 3-dimensional trade-off example: eigenvalues {2, -0.5, 0.5}, identity input
// matrix, truncated N(0,1) noise. The observer has access to the control
// inputs, so innovation bins are used, and the control is predictive:
// u_t = -F x_hat(t | t-1). (Plain -x_hat would leave F - I unstable with
// spectral radius 1.5 and cannot stabilize this plant.)
inline sim::LoopConfig example2_config(int k, std::uint64_t seed = 0,
                                       std::int64_t horizon = 100, int n = 15,
                                       double eps = 0.3) {
    const std::vector<double> a{-2.0, -0.25, 0.5};
    const Mat f = smallmat::companion_from_coeffs(a);
    plant::CanonicalPlant p =
        plant::plant_from_coeffs(a, Mat::identity(3), f, 5.0, 5.0);

    sim::LoopConfig cfg;
    cfg.plant = std::move(p);
    cfg.filter = thresholds::FilterKind::Hypercuboid;
    cfg.n = n;
    cfg.k = k;
    cfg.depth = static_cast<int>(horizon);
    cfg.chan = {channel::Kind::BEC, eps, 1};
    cfg.horizon = horizon;
    cfg.feedback = {32, 16};
    cfg.timing = sim::ControlTiming::Predicted;
    cfg.observer_knows_control = true;
    cfg.process_noise = {sim::NoiseKind::TruncatedGaussian, 1.0, 2.5};
    cfg.measurement_noise = {sim::NoiseKind::TruncatedGaussian, 1.0, 2.5};
    cfg.x0 = {0.0, 0.0, 0.0};
    cfg.init_halfwidth = {0.0, 0.0, 0.0};
    cfg.seed = seed;

    estimation::QuantizerSpec q;
    q.levels = std::int64_t{1} << k;
    q.delta = size_cuboid_delta(cfg.plant, q.levels, 1.2);
    cfg.quantizers = {q};
    return cfg;
}

}  // namespace anytime::presets
