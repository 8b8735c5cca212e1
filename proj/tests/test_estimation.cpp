#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "anytime/estimation.hpp"
#include "anytime/presets.hpp"

using namespace anytime;
using namespace anytime::estimation;
using smallmat::Mat;
using smallmat::Vec;

namespace {

// Grid-search oracle for the m = 2, P = I, h = e1 case: minimal-area
// axis-aligned ellipse centered on the x-axis covering the disk-slab
// intersection. For fixed center the search over (1/A, 1/B) is a sweep of
// linear constraints from boundary samples.
double grid_min_area(double g, double d) {
    std::vector<std::pair<double, double>> pts;
    const int narc = 400;
    for (int i = 0; i <= narc; ++i) {
        const double x = g + (d - g) * i / narc;
        pts.emplace_back(x, std::sqrt(std::max(0.0, 1.0 - x * x)));
    }
    for (int i = 0; i <= 40; ++i) {
        pts.emplace_back(g, std::sqrt(std::max(0.0, 1.0 - g * g)) * i / 40);
        pts.emplace_back(d, std::sqrt(std::max(0.0, 1.0 - d * d)) * i / 40);
    }
    auto area_for_center = [&](double x0) {
        double umax = 1e300;
        for (const auto& [x, y] : pts) {
            const double alpha = (x - x0) * (x - x0);
            if (y * y < 1e-14 && alpha > 1e-300)
                umax = std::min(umax, 1.0 / alpha);
        }
        if (umax > 1e250) umax = 1e6;
        double best_uv = 0.0;
        const int grid = 2000;
        for (int i = 1; i <= grid; ++i) {
            const double u = umax * i / grid;
            double v = 1e300;
            for (const auto& [x, y] : pts) {
                const double beta = y * y;
                if (beta < 1e-14) continue;
                v = std::min(v, (1.0 - (x - x0) * (x - x0) * u) / beta);
            }
            if (v > 0) best_uv = std::max(best_uv, u * v);
        }
        return best_uv > 0 ? M_PI / std::sqrt(best_uv) : 1e300;
    };
    double lo = g, hi = d, best = 1e300;
    for (int round = 0; round < 3; ++round) {
        const int nx = 60;
        const double step = (hi - lo) / nx;
        double bx = lo;
        best = 1e300;
        for (int i = 0; i <= nx; ++i) {
            const double a = area_for_center(lo + step * i);
            if (a < best) { best = a; bx = lo + step * i; }
        }
        lo = std::max(g, bx - 2 * step);
        hi = std::min(d, bx + 2 * step);
    }
    return best;
}

Ellipsoid unit_disk() {
    Ellipsoid e;
    e.P = Mat::identity(2);
    e.c = {0.0, 0.0};
    return e;
}

}  // namespace

TEST_CASE("modulo quantizer arithmetic") {
    const QuantizerSpec q{1.0, 4};
    CHECK(quantize(q, 5.3) == 1);
    const auto bin = dequantize(q, 1, {4.0, 8.0});
    CHECK(bin.lo == Catch::Approx(5.0));
    CHECK(bin.hi == Catch::Approx(6.0));

    // Left-closed bins: exact multiples land in their own bin.
    CHECK(quantize(q, 2.0) == 2);
    CHECK(quantize(q, -0.5) == 3);
    CHECK(quantize(q, -1.0) == 3);
    CHECK(quantize(q, -4.0) == 0);
}

TEST_CASE("unwrap recovers the bin containing the measurement") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    // One spare bin guarantees a unique unwrap: width <= delta*(levels-1).
    std::uniform_real_distribution<double> width(0.1, 7.0 / 8.0);
    const QuantizerSpec q{0.7, 8};
    const double span = q.delta * 8;
    for (int trial = 0; trial < 10000; ++trial) {
        const double y = u(rng);
        const double w = span * width(rng);
        std::uniform_real_distribution<double> off(0.0, w);
        const double lo = y - off(rng);
        const auto bin = dequantize(q, quantize(q, y), {lo, lo + w});
        REQUIRE(y >= bin.lo);
        REQUIRE(y < bin.hi);
        REQUIRE(bin.hi - bin.lo == Catch::Approx(q.delta));
    }
    // A window of exactly delta*levels can meet two bins with the same
    // residue; that ambiguity is an explicit overflow, not a wrong bin.
    CHECK_THROWS_AS(dequantize(q, 4, {-2.6, -2.6 + span}),
                    quantizer_overflow_error);
}

TEST_CASE("ambiguous unwrap is an explicit overflow error") {
    const QuantizerSpec q{1.0, 4};
    CHECK_THROWS_AS(dequantize(q, 1, {0.0, 4.5}), quantizer_overflow_error);
    // No bin with the residue inside a narrow window.
    CHECK_THROWS_AS(dequantize(q, 3, {0.0, 0.5}), quantizer_overflow_error);
    CHECK_THROWS_AS(quantize({0.0, 4}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(quantize({1.0, 3}, 1.0), std::invalid_argument);
}

TEST_CASE("hypercuboid time update: identity and noise-only cases") {
    Hypercuboid h{{-1.0, 0.5}, {2.0, 1.5}};
    const auto same = hypercuboid_time_update(h, Mat::identity(2), {0.0, 0.0}, 0.0);
    CHECK(same.lo == h.lo);
    CHECK(same.hi == h.hi);

    // Degenerate box through the cart-stick canonical |F|: widths become W.
    const auto cart = presets::cart_stick_config().plant;
    Hypercuboid point{{0.3, -0.2, 0.1}, {0.3, -0.2, 0.1}};
    const auto out = hypercuboid_time_update(point, cart.F, {0.0, 0.0, 0.0}, 0.05);
    for (int i = 0; i < 3; ++i)
        CHECK(out.hi[static_cast<std::size_t>(i)] -
                  out.lo[static_cast<std::size_t>(i)] ==
              Catch::Approx(0.05).margin(1e-12));
}

TEST_CASE("interval propagation contains the true trajectory") {
    // Stable companion plant driven by bounded noise and known inputs.
    const auto p = plant::plant_from_coeffs({-0.4, 0.2, -0.1}, Mat(3, 1),
                                            Mat(1, 3), 0.2, 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> un(-0.099, 0.099);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    Vec x{0.1, -0.2, 0.05};
    Hypercuboid h{{0.1, -0.2, 0.05}, {0.1, -0.2, 0.05}};
    for (int t = 0; t < 1000; ++t) {
        const Vec gu = p.G * Vec{uu(rng)};
        h = hypercuboid_time_update(h, p.F, gu, p.W);
        Vec xn = p.F * x;
        for (int i = 0; i < 3; ++i)
            xn[static_cast<std::size_t>(i)] +=
                gu[static_cast<std::size_t>(i)] + un(rng);
        x = xn;
        REQUIRE(h.contains(x));
    }
}

TEST_CASE("measurement update intersects and never widens") {
    Hypercuboid h{{-2.0, -1.0}, {2.0, 1.0}};
    const auto same = hypercuboid_measurement_update(h, {-2.5, 2.5}, 1.0, 0);
    CHECK(same.lo[0] == Catch::Approx(-2.0));
    CHECK(same.hi[0] == Catch::Approx(2.0));
    CHECK(same.lo[1] == h.lo[1]);

    const auto cut = hypercuboid_measurement_update(h, {0.2, 0.7}, 0.2, 0);
    CHECK(cut.lo[0] == Catch::Approx(0.1));
    CHECK(cut.hi[0] == Catch::Approx(0.8));

    CHECK_THROWS_AS(hypercuboid_measurement_update(h, {5.0, 6.0}, 0.1, 0),
                    internal_corruption_error);
}

TEST_CASE("width recursion reaches the closed form in exactly m_x steps") {
    const std::vector<double> a{-3.3, 3.27, -0.98};
    const auto p = plant::plant_from_coeffs(a, Mat(3, 1), Mat(1, 3), 0.05, 0.05);
    const double qd = 0.04;
    const auto ss = steady_state_delta(p, qd, p.V, p.W);

    Vec d{13.7, 5.2, 8.9};  // arbitrary start
    for (int t = 0; t < 3; ++t) d = delta_recursion_step(p, d, qd);
    for (int i = 0; i < 3; ++i)
        REQUIRE(std::abs(d[static_cast<std::size_t>(i)] -
                         ss.delta_tu[static_cast<std::size_t>(i)]) < 1e-9);
    // And it is a fixed point afterwards.
    const Vec d2 = delta_recursion_step(p, d, qd);
    for (int i = 0; i < 3; ++i)
        REQUIRE(std::abs(d2[static_cast<std::size_t>(i)] -
                         d[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("steady state: scalar specialization and asymptotic ratio") {
    const auto p1 = plant::plant_from_coeffs({-1.7}, Mat(1, 1), Mat(1, 1), 0.3, 0.1);
    const auto s1 = steady_state_delta(p1, 0.5, p1.V, p1.W);
    CHECK(s1.delta_tu[0] == Catch::Approx((0.5 + 0.1) * 1.7 + 0.3));

    const std::vector<double> a{-3.3, 3.27, -0.98};
    const auto p = plant::plant_from_coeffs(a, Mat(3, 1), Mat(1, 3), 0.05, 0.05);
    CHECK(steady_state_delta(p, 1.0, p.V, p.W).asymptotic_ratio ==
          Catch::Approx(7.55));
    const double big = 1e9;
    CHECK(steady_state_delta(p, big, p.V, p.W).delta_tu[0] / big ==
          Catch::Approx(7.55).margin(1e-6));

    // The closed form equals the fixed point found by iteration.
    Vec d{0.0, 0.0, 0.0};
    for (int t = 0; t < 50; ++t) d = delta_recursion_step(p, d, 0.7);
    const auto ss = steady_state_delta(p, 0.7, p.V, p.W);
    for (int i = 0; i < 3; ++i)
        CHECK(d[static_cast<std::size_t>(i)] ==
              Catch::Approx(ss.delta_tu[static_cast<std::size_t>(i)]).margin(1e-9));

    // Sizing: the reported level count satisfies the unwrap margin.
    CHECK(static_cast<double>(ss.min_levels) * 0.7 >= ss.delta_tu[0] + p.V);
    CHECK((ss.min_levels & (ss.min_levels - 1)) == 0);
}

TEST_CASE("covering ellipsoid: no-information slabs return the input") {
    const auto e = unit_disk();
    for (auto [g, d] : {std::pair{-1.0, 1.0}, {-0.9, 0.8}, {-0.7, 0.9}}) {
        // gamma * delta < -1/m = -0.5 in all three cases.
        const auto up = min_volume_ellipsoid_slab(e, {1.0, 0.0}, g, d);
        CHECK(up.a == 1.0);
        CHECK(up.b == 1.0);
        CHECK(up.xi == 0.0);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(up.e.P(i, j) == e.P(i, j));
    }
}

TEST_CASE("covering ellipsoid: symmetric slabs use the closed pair") {
    // gamma*delta must stay above -1/m = -1/2, i.e. d < sqrt(1/2).
    const auto e = unit_disk();
    for (double d : {0.3, 0.5, 0.65}) {
        const auto up = min_volume_ellipsoid_slab(e, {1.0, 0.0}, -d, d);
        CHECK(up.xi == 0.0);
        CHECK(up.a == Catch::Approx(2.0 * d * d));
        CHECK(up.b == Catch::Approx(2.0 * (1.0 - d * d) / 1.0));
    }
}

TEST_CASE("covering ellipsoid matches the grid-search minimum area") {
    const auto e = unit_disk();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    int tested = 0;
    while (tested < 8) {
        double g = u(rng), d = u(rng);
        if (g > d) std::swap(g, d);
        if (g * d < -0.5 || d - g < 0.05) continue;
        const auto up = min_volume_ellipsoid_slab(e, {1.0, 0.0}, g, d);
        const double det =
            up.e.P(0, 0) * up.e.P(1, 1) - up.e.P(0, 1) * up.e.P(1, 0);
        const double area = M_PI * std::sqrt(std::max(0.0, det));
        const double oracle = grid_min_area(g, d);
        INFO("slab [" << g << ", " << d << "]");
        CHECK(std::abs(area - oracle) / oracle < 0.01);
        ++tested;
    }
}

TEST_CASE("covering ellipsoid contains the intersection") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double g = u(rng), d = u(rng);
        if (g > d) std::swap(g, d);
        if (d - g < 0.02) continue;
        const auto e = unit_disk();
        const auto up = min_volume_ellipsoid_slab(e, {1.0, 0.0}, g, d);
        CHECK(up.xi >= g - 1e-12);
        CHECK(up.xi <= d + 1e-12);
        CHECK(up.b <= 2.0 + 1e-9);  // m/(m-1)
        int inside = 0;
        std::uniform_real_distribution<double> ud(-1.0, 1.0);
        while (inside < 2000) {
            const double x = ud(rng), y = ud(rng);
            if (x * x + y * y > 1.0 || x < g || x > d) continue;
            ++inside;
            REQUIRE(up.e.quad_form({x, y}) <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("reflected slabs are handled through x -> -x") {
    const auto e = unit_disk();
    // |delta| < |gamma|: reflection path.
    const auto up = min_volume_ellipsoid_slab(e, {1.0, 0.0}, -0.9, -0.2);
    const auto mirror = min_volume_ellipsoid_slab(e, {1.0, 0.0}, 0.2, 0.9);
    CHECK(up.a == Catch::Approx(mirror.a));
    CHECK(up.b == Catch::Approx(mirror.b));
    CHECK(up.xi == Catch::Approx(-mirror.xi));
    CHECK(up.e.c[0] == Catch::Approx(-mirror.e.c[0]));
}

TEST_CASE("general shape matrices keep containment") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Ellipsoid e;
    e.P = Mat(3, 3, {2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.5});
    e.c = {0.4, -0.2, 0.1};
    const auto up = ellipsoid_measurement_update(e, {0.1, 0.9}, 0.2, 0);
    // Sample points of the ellipsoid inside the slab; all must stay covered.
    int inside = 0;
    while (inside < 3000) {
        Vec x{e.c[0] + 2.0 * u(rng), e.c[1] + 1.5 * u(rng), e.c[2] + u(rng)};
        if (e.quad_form(x) > 1.0) continue;
        if (x[0] < 0.0 || x[0] > 1.0) continue;  // bin widened by V/2
        ++inside;
        REQUIRE(up.e.quad_form(x) <= 1.0 + 1e-6);
    }
    CHECK_THROWS_AS(ellipsoid_measurement_update(e, {9.0, 9.5}, 0.1, 0),
                    internal_corruption_error);
}

TEST_CASE("ellipsoid time update: near-identity limit and containment") {
    Ellipsoid e;
    e.P = Mat(2, 2, {1.0, 0.2, 0.2, 0.8});
    e.c = {0.1, -0.3};
    const auto out = ellipsoid_time_update(e, Mat::identity(2), {0.0, 0.0},
                                           0.0, 1e-8);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(out.P(i, j) == Catch::Approx(e.P(i, j)).margin(1e-7));

    // Noise inflation covers the W-hypercube: x' = F x + w stays inside.
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Mat f(2, 2, {1.1, 0.4, -0.3, 0.7});
    const double w_bound = 0.4;
    const auto out2 = ellipsoid_time_update(e, f, {0.0, 0.0}, w_bound, 0.25);
    for (int trial = 0; trial < 5000; ++trial) {
        // Point on or in the input ellipsoid via rejection.
        Vec x{e.c[0] + 1.2 * u(rng), e.c[1] + 1.2 * u(rng)};
        if (e.quad_form(x) > 1.0) continue;
        const Vec fx = f * x;
        const Vec moved{fx[0] + 0.5 * w_bound * u(rng),
                        fx[1] + 0.5 * w_bound * u(rng)};
        REQUIRE(out2.quad_form(moved) <= 1.0 + 1e-9);
    }
}

TEST_CASE("diagonal bound recursion dominates the filter variances") {
    // Clean closed loop on the cart-stick plant: quantized measurements every
    // step, stabilizing gain, no channel. sqrt(P_ii) must stay below the
    // bound recursion driven with the same eps'.
    auto cfg = presets::cart_stick_config(thresholds::FilterKind::Ellipsoid);
    const auto& p = cfg.plant;
    const auto& q = cfg.quantizers[0];
    const double eps_prime = cfg.eps_prime;

    Ellipsoid e;
    e.P = Mat(3, 3);
    for (int i = 0; i < 3; ++i) e.P(static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(i)) = cfg.init_p0;
    e.c = {0.0, 0.0, 0.0};
    Vec delta_e{std::sqrt(cfg.init_p0), std::sqrt(cfg.init_p0),
                std::sqrt(cfg.init_p0)};

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> noise(-0.024, 0.024);
    Vec x{0.0, 0.0, 0.0};
    for (int t = 0; t < 300; ++t) {
        const double y = x[0] + noise(rng);
        const double s = std::sqrt(e.P(0, 0));
        const auto bin =
            dequantize(q, quantize(q, y),
                       {e.c[0] - s - 0.5 * p.V, e.c[0] + s + 0.5 * p.V});
        e = ellipsoid_measurement_update(e, bin, p.V, 0).e;

        const Vec kx = p.K * e.c;
        const Vec u{-kx[0]};
        const Vec gu = p.G * u;
        e = ellipsoid_time_update(e, p.F, gu, p.W, eps_prime);
        delta_e = ellipsoid_bound_recursion_step(p, delta_e, q.delta, eps_prime);

        Vec xn = p.F * x;
        for (int i = 0; i < 3; ++i)
            xn[static_cast<std::size_t>(i)] +=
                gu[static_cast<std::size_t>(i)] + noise(rng);
        x = xn;

        for (int i = 0; i < 3; ++i)
            REQUIRE(std::sqrt(e.P(static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(i))) <=
                    delta_e[static_cast<std::size_t>(i)] + 1e-9);
        REQUIRE(e.quad_form(x) <= 1.0 + 1e-6);
    }
}
