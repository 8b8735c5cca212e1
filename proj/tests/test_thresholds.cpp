#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "anytime/presets.hpp"
#include "anytime/thresholds.hpp"

using namespace anytime;
using namespace anytime::thresholds;
using channel::ChannelSpec;
using channel::Kind;
using smallmat::Mat;

namespace {
const ChannelSpec bec03{Kind::BEC, 0.3, 1};
const ChannelSpec bec015{Kind::BEC, 0.15, 1};
const ChannelSpec bsc005{Kind::BSC, 0.05, 1};
}  // namespace

TEST_CASE("binary entropy and its inverse") {
    CHECK(binary_entropy(0.5) == Catch::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(inv_binary_entropy(1.0) == Catch::Approx(0.5).margin(1e-10));
    CHECK(inv_binary_entropy(0.0) == Catch::Approx(0.0).margin(1e-10));
    CHECK(inv_binary_entropy(0.7793) == Catch::Approx(0.2308).margin(1e-4));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(inv_binary_entropy(1.1), std::invalid_argument);

    // H o H^{-1} = identity on a grid.
    for (int i = 0; i <= 100; ++i) {
        const double y = i / 100.0;
        CHECK(binary_entropy(inv_binary_entropy(y)) ==
              Catch::Approx(y).margin(1e-10));
    }
}

TEST_CASE("Bernoulli KL divergence") {
    CHECK(kl_bernoulli(0.37, 0.37) == Catch::Approx(0.0).margin(1e-14));
    CHECK(kl_bernoulli(0.0, 0.5) == Catch::Approx(1.0));
    CHECK(kl_bernoulli(0.3, 0.5) == Catch::Approx(0.11871).margin(1e-5));
    CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(kl_bernoulli(0.3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kl_bernoulli(0.3, 1.0), std::invalid_argument);
}

TEST_CASE("ensemble distance thresholds") {
    const auto t = toeplitz_distance_thresholds(0.5, 0.5);
    REQUIRE(t.feasible);
    CHECK(t.alpha_sup == Catch::Approx(0.11003).margin(1e-4));
    CHECK(t.theta_inf == Catch::Approx(1.27155).margin(1e-4));

    // theta* identity at p = 1/2: theta_inf = log2(1/(2^{1-R}-1)).
    for (double r : {0.2, 1.0 / 3.0, 0.5, 0.7}) {
        const auto tr = toeplitz_distance_thresholds(r, 0.5);
        CHECK(tr.theta_inf ==
              Catch::Approx(std::log2(1.0 / (std::pow(2.0, 1.0 - r) - 1.0)))
                  .margin(1e-12));
    }

    // p and 1-p give the same thresholds.
    const auto a = toeplitz_distance_thresholds(0.4, 0.3);
    const auto b = toeplitz_distance_thresholds(0.4, 0.7);
    CHECK(a.alpha_sup == Catch::Approx(b.alpha_sup).margin(1e-12));
    CHECK(a.theta_inf == Catch::Approx(b.theta_inf).margin(1e-12));

    // R -> 1 at p = 1/2 drives the entropy argument (and alpha_sup) to zero;
    // R = 1 itself is outside the domain.
    const auto near_one = toeplitz_distance_thresholds(1.0 - 1e-9, 0.5);
    REQUIRE(near_one.feasible);
    CHECK(near_one.alpha_sup < 1e-4);
    CHECK_THROWS_AS(toeplitz_distance_thresholds(1.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("union-bound rate and exponent bounds") {
    CHECK(max_rate(0.3) == Catch::Approx(0.62149).margin(1e-4));
    CHECK(max_rate(1e-9) == Catch::Approx(1.0).margin(1e-8));

    const auto b = corollary_bec_bounds(1.0 / 3.0, 0.3);
    REQUIRE(b.feasible);
    // Independent evaluation of the closed form.
    const double expect = inv_binary_entropy(2.0 / 3.0) *
                          (std::log2(1.0 / 0.3) +
                           std::log2(std::pow(2.0, 2.0 / 3.0) - 1.0));
    CHECK(b.beta_sup == Catch::Approx(expect).margin(1e-10));
    CHECK(b.beta_sup == Catch::Approx(0.168626).margin(1e-4));

    CHECK_FALSE(corollary_bec_bounds(0.63, 0.3).feasible);
}

TEST_CASE("random coding exponent values and endpoints") {
    const auto e7 = random_coding_exponent(bec03, 7.0 / 15.0);
    REQUIRE(e7.feasible);
    CHECK(15.0 * e7.value == Catch::Approx(2.32).margin(0.01));
    const auto e8 = random_coding_exponent(bec03, 8.0 / 15.0);
    CHECK(15.0 * e8.value == Catch::Approx(1.32).margin(0.01));

    for (const auto& spec : {bec03, bsc005}) {
        const auto at_cap = random_coding_exponent(spec, channel::capacity(spec));
        CHECK_FALSE(at_cap.feasible);
        CHECK(at_cap.value == 0.0);
        const auto at_zero = random_coding_exponent(spec, 0.0);
        CHECK(at_zero.value ==
              Catch::Approx(gallager_e0(spec, 1.0)).margin(1e-9));
    }
}

TEST_CASE("E_r is nonincreasing and convex on a grid") {
    for (const auto& spec : {bec015, bsc005}) {
        const double cap = channel::capacity(spec);
        std::vector<double> vals;
        for (int i = 0; i < 60; ++i)
            vals.push_back(
                random_coding_exponent(spec, cap * i / 60.0).value);
        for (std::size_t i = 1; i < vals.size(); ++i)
            CHECK(vals[i] <= vals[i - 1] + 1e-12);
        for (std::size_t i = 1; i + 1 < vals.size(); ++i)
            CHECK(vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-9);
    }
}

TEST_CASE("improved exponent dominates the random-coding exponent") {
    for (const auto& spec : {bec015, bsc005}) {
        const double cap = channel::capacity(spec);
        const double zeta = channel::bhattacharyya(spec);
        const double breakpoint = improved_breakpoint(zeta);
        for (int i = 0; i < 100; ++i) {
            const double r = cap * i / 100.0;
            const double ez = improved_exponent(spec, r);
            const double er = random_coding_exponent(spec, r).value;
            REQUIRE(ez >= er - 1e-12);
            if (r < breakpoint - 0.01) REQUIRE(ez > er + 1e-9);
        }
        // Continuity at the breakpoint.
        const double left = inv_binary_entropy(1.0 - breakpoint) *
                            std::log2(1.0 / zeta);
        const double right = random_coding_exponent(spec, breakpoint).value;
        CHECK(left == Catch::Approx(right).margin(1e-6));
    }
}

TEST_CASE("improved exponent endpoints") {
    const double zeta = 0.3;
    CHECK(improved_exponent(bec03, 0.0) ==
          Catch::Approx(0.5 * std::log2(1.0 / zeta)).margin(1e-9));
    CHECK(15.0 * improved_exponent(bec03, 1.0 / 3.0) ==
          Catch::Approx(4.32).margin(0.01));
    CHECK_THROWS_AS(improved_exponent(bec03, 0.7), std::invalid_argument);
}

TEST_CASE("spectral radius: diagonal, cart-stick, known-root oracle") {
    Mat d(3, 3);
    d(0, 0) = -2.5;
    d(1, 1) = 1.0;
    d(2, 2) = 0.25;
    CHECK(spectral_radius(d) == Catch::Approx(2.5).margin(1e-8));

    const Mat f_raw(3, 3,
                    {1.161, 0.105, 0.0,
                     3.3, 1.161, 0.002,
                     -3.265, -0.160, 0.979});
    const auto roots = smallmat::poly_roots(smallmat::char_poly(f_raw));
    std::vector<double> mags;
    for (const auto& z : roots) mags.push_back(std::abs(z));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    CHECK(mags[0] == Catch::Approx(1.75).margin(0.01));
    CHECK(mags[1] == Catch::Approx(0.98).margin(0.01));
    CHECK(mags[2] == Catch::Approx(0.57).margin(0.01));

    // Matrices with known eigenvalues: S diag S^{-1} for random well-scaled S.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> eig{u(rng), u(rng), u(rng), u(rng), u(rng)};
        Mat s(5, 5);
        for (;;) {
            for (std::size_t i = 0; i < 5; ++i)
                for (std::size_t j = 0; j < 5; ++j)
                    s(i, j) = u(rng) + (i == j ? 3.0 : 0.0);
            try {
                (void)smallmat::inverse(s);
                break;
            } catch (const std::invalid_argument&) {}
        }
        Mat diag(5, 5);
        double want = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            diag(i, i) = eig[i];
            want = std::max(want, std::abs(eig[i]));
        }
        const Mat m = s * diag * smallmat::inverse(s);
        CHECK(spectral_radius(m) == Catch::Approx(want).margin(1e-6 * (1 + want)));
    }
}

TEST_CASE("rho(F) <= rho(|F|) on random matrices") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Mat m(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = u(rng);
        REQUIRE(spectral_radius(m) <=
                spectral_radius(abs_matrix(m)) * (1.0 + 1e-8) + 1e-9);
    }
}

TEST_CASE("sufficient budgets reproduce the worked examples") {
    const auto cart = presets::cart_stick_config().plant;
    const auto bc = sufficient_budget(cart, FilterKind::Hypercuboid, 15);
    CHECK(15.0 * bc.beta == Catch::Approx(4.1035).margin(0.01));
    CHECK(15.0 * bc.rate == Catch::Approx(std::log2(3.3 + 3.27 + 0.98)).margin(0.01));

    const auto ex2 = presets::example2_config(5).plant;
    CHECK(spectral_radius(abs_matrix(ex2.F)) == Catch::Approx(2.215).margin(0.005));
    const auto b2 = sufficient_budget(ex2, FilterKind::Hypercuboid, 15);
    CHECK(15.0 * b2.beta == Catch::Approx(2.29).margin(0.01));

    const auto be = sufficient_budget(cart, FilterKind::Ellipsoid, 15);
    CHECK(15.0 * be.beta ==
          Catch::Approx(2.0 * std::log2(1.7487)).margin(0.01));
    CHECK(be.rate < bc.rate + 1.0);  // ellipsoid pays rate for a smaller exponent
    CHECK(be.beta < bc.beta);
}

TEST_CASE("single-block vector plants reduce to the scalar theorem") {
    const std::vector<double> a{-2.0, -0.25, 0.5};
    const auto scalar = plant::plant_from_coeffs(a, Mat(3, 1), Mat(1, 3), 0, 0);
    const auto vec =
        plant::plant_from_blocks({a}, Mat(3, 1), Mat(1, 3), 0, 0);
    for (auto kind : {FilterKind::Hypercuboid, FilterKind::Ellipsoid}) {
        const auto bs = sufficient_budget(scalar, kind, 15);
        const auto bv = sufficient_budget(vec, kind, 15);
        CHECK(bs.rate == Catch::Approx(bv.rate).margin(1e-12));
        CHECK(bs.beta == Catch::Approx(bv.beta).margin(1e-12));
    }
}

TEST_CASE("vector budgets sum per-block rate terms") {
    const std::vector<std::vector<double>> blocks{{-2.0, 1.0}, {0.3}};
    const auto p = plant::plant_from_blocks(blocks, Mat(3, 1), Mat(1, 3), 0, 0);
    const auto b = sufficient_budget(p, FilterKind::Hypercuboid, 10);
    // Block 1 contributes log2(3), block 2 contributes max(0, log2 0.3) = 0.
    CHECK(10.0 * b.rate == Catch::Approx(std::log2(3.0)).margin(1e-9));
    CHECK_THROWS_AS(
        sufficient_budget(plant::plant_from_coeffs({-2.0}, Mat(1, 1), Mat(1, 1), 0, 0),
                          FilterKind::Ellipsoid, 10),
        std::invalid_argument);
}

TEST_CASE("limiting case converges to the closed-form asymptote") {
    const auto lc = limiting_case({2.0, 0.5}, 1);
    CHECK(lc.rate_star == Catch::Approx(1.0));
    CHECK(lc.beta_star == Catch::Approx(2.0));
    const auto lc2 = limiting_case({2.0, 1.5}, 1);
    CHECK(lc2.rate_star == Catch::Approx(std::log2(3.0)).margin(1e-9));
    CHECK(lc2.beta_star == Catch::Approx(2.0));

    double prev_r = 1e300, prev_b = 1e300;
    for (int n : {1, 2, 4, 8, 16}) {
        const auto l = limiting_case({2.0, 0.5}, n);
        CHECK(l.rate_n > l.rate_star);
        CHECK(l.rate_n < prev_r);
        CHECK(l.beta_n > l.beta_star - 1e-9);
        CHECK(l.beta_n < prev_b);
        prev_r = l.rate_n;
        prev_b = l.beta_n;
    }
    CHECK(prev_r == Catch::Approx(1.0).margin(1e-3));
    CHECK(prev_b == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("root bound from the coefficient formula") {
    CHECK(fujiwara_bound({-1.7}) == Catch::Approx(1.7));

    // cart-stick characteristic polynomial: bound must clear the top root.
    CHECK(fujiwara_bound({-3.3, 3.27, -0.98}) >= 1.75);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<double> roots{u(rng), u(rng), u(rng)};
        const auto coeffs = smallmat::poly_from_real_roots(roots);
        double top = 0.0;
        for (double r : roots) top = std::max(top, std::abs(r));
        REQUIRE(fujiwara_bound(coeffs) >= top - 1e-9);
    }
}

TEST_CASE("scalar stabilizable eigenvalue magnitude") {
    // Bisection against a dense grid search over R.
    const double eta = 2.0;
    const double mine = scalar_stabilizable_mu(bec03, eta);
    double grid_best = 0.0;
    const double cap = channel::capacity(bec03);
    for (int i = 1; i < 200000; ++i) {
        const double r = cap * i / 200000.0;
        if (r >= cap) break;
        grid_best = std::max(
            grid_best, std::min(r, improved_exponent(bec03, r) / eta));
    }
    CHECK(std::log2(mine) == Catch::Approx(grid_best).margin(1e-4));

    // Less erasure means a larger stabilizable eigenvalue.
    CHECK(scalar_stabilizable_mu({Kind::BEC, 0.1, 1}, 2.0) >
          scalar_stabilizable_mu({Kind::BEC, 0.2, 1}, 2.0));

    // Monotone toward the noiseless limit log2|mu| -> C = 1.
    double prev = 0.0;
    for (double eps : {0.3, 0.1, 1e-3, 1e-9}) {
        const double v = std::log2(scalar_stabilizable_mu({Kind::BEC, eps, 1}, 2.0));
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev > 0.7);

    // Monotone nonincreasing in epsilon and in eta.
    double prev_eps = 1e300;
    for (double eps : {0.05, 0.1, 0.2, 0.3, 0.4}) {
        const double v = scalar_stabilizable_mu({Kind::BEC, eps, 1}, 2.0);
        CHECK(v <= prev_eps + 1e-12);
        prev_eps = v;
    }
    double prev_eta = 1e300;
    for (double eta2 : {1.0, 2.0, 4.0, 8.0}) {
        const double v = scalar_stabilizable_mu(bec03, eta2);
        CHECK(v <= prev_eta + 1e-12);
        prev_eta = v;
    }
}

TEST_CASE("vector region membership") {
    // Stable tuples are always stabilizable.
    CHECK(region_check({0.5, 0.9}, bec03, 2.0));
    // A mildly unstable pair over a good channel.
    CHECK(region_check({1.1, 1.05}, {Kind::BEC, 0.05, 1}, 2.0));
    // Far beyond capacity is not.
    CHECK_FALSE(region_check({8.0, 4.0}, bec03, 2.0));
    // Ordering: whatever BEC(0.2) can stabilize, BEC(0.1) also can.
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.8, 1.6);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> mu{u(rng), u(rng)};
        if (region_check(mu, {Kind::BEC, 0.2, 1}, 2.0))
            CHECK(region_check(mu, {Kind::BEC, 0.1, 1}, 2.0));
    }
}
