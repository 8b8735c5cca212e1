#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "anytime/channel.hpp"
#include "anytime/errors.hpp"
#include "anytime/plant.hpp"
#include "anytime/smallmat.hpp"

// Closed-form and optimization-based rate/exponent computations: distance
// thresholds for the Bernoulli code ensemble, the random-coding exponent and
// its minimum-distance improvement, sufficient (rate, exponent) budgets for
// the two set-membership filters, the encode-every-n-steps limit, and the
// stabilizable eigenvalue region. All logarithms are base 2; exponents are
// per channel use (multiply by n for per-plant-step values).
namespace anytime::thresholds {

inline double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("binary_entropy: x outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Smaller root of H(x) = y, found by bisection on [0, 1/2] to 1e-12.
inline double inv_binary_entropy(double y) {
    if (y < 0.0 || y > 1.0)
        throw std::invalid_argument("inv_binary_entropy: y outside [0,1]");
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < y) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double kl_bernoulli(double x, double y) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("kl_bernoulli: bad x");
    if (y <= 0.0 || y >= 1.0) {
        if (x == y) return 0.0;
        throw std::invalid_argument("kl_bernoulli: y in {0,1} with x != y");
    }
    double s = 0.0;
    if (x > 0.0) s += x * std::log2(x / y);
    if (x < 1.0) s += (1.0 - x) * std::log2((1.0 - x) / (1.0 - y));
    return s;
}

struct DistanceThresholds {
    bool feasible = false;
    double alpha_sup = 0.0;  // open upper bound on the distance slope
    double theta_inf = 0.0;  // open lower bound on the multiplicity exponent
};

// Ensemble distance thresholds: alpha < H^{-1}(1 - R log(1/(1-pbar))) and
// theta > -log[(1-pbar)^{-(1-R)} - 1], with pbar = min(p, 1-p).
inline DistanceThresholds toeplitz_distance_thresholds(double r, double p) {
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("toeplitz_distance_thresholds: 0 < R < 1");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("toeplitz_distance_thresholds: 0 < p < 1");
    const double pbar = std::min(p, 1.0 - p);
    DistanceThresholds t;
    const double arg = 1.0 - r * std::log2(1.0 / (1.0 - pbar));
    if (arg <= 0.0) return t;  // infeasible
    t.feasible = true;
    t.alpha_sup = inv_binary_entropy(arg);
    t.theta_inf = -std::log2(std::pow(1.0 - pbar, -(1.0 - r)) - 1.0);
    return t;
}

// Rate bound R < 1 - log2(1 + zeta) for the p = 1/2 ensemble over a channel
// with Bhattacharyya parameter zeta.
inline double max_rate(double zeta) {
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("max_rate: 0 < zeta < 1");
    return 1.0 - std::log2(1.0 + zeta);
}

struct BecBounds {
    bool feasible = false;
    double beta_sup = 0.0;  // open upper bound on the exponent per channel use
};

// beta < H^{-1}(1-R) (log(1/zeta) + log(2^{1-R} - 1)), valid for R below the
// rate bound.
inline BecBounds corollary_bec_bounds(double r, double zeta) {
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("corollary_bec_bounds: 0 < zeta < 1");
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("corollary_bec_bounds: 0 < R < 1");
    BecBounds b;
    if (r >= max_rate(zeta)) return b;  // infeasible
    b.feasible = true;
    b.beta_sup = inv_binary_entropy(1.0 - r) *
                 (std::log2(1.0 / zeta) + std::log2(std::pow(2.0, 1.0 - r) - 1.0));
    return b;
}

// Gallager E_0 with the input distribution fixed to uniform (optimal for
// binary-input output-symmetric channels).
inline double gallager_e0(const channel::ChannelSpec& spec, double rho) {
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("gallager_e0: rho outside [0,1]");
    const double eps = spec.epsilon;
    if (spec.kind == channel::Kind::BEC)
        return -std::log2(std::pow(2.0, -rho) * (1.0 - eps) + eps);
    const double e = 1.0 / (1.0 + rho);
    return rho - (1.0 + rho) *
                     std::log2(std::pow(1.0 - eps, e) + std::pow(eps, e));
}

struct Exponent {
    double value = 0.0;
    bool feasible = false;  // false when R >= capacity
};

namespace detail {
// Golden-section maximization of a concave function on [0, 1].
template <typename F>
double golden_max(F f, double tol = 1e-10) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return std::max({f(x), f(0.0), f(1.0)});
}
}  // namespace detail

// Random-coding exponent E_r(R) = max_{rho in [0,1]} E_0(rho) - rho R.
inline Exponent random_coding_exponent(const channel::ChannelSpec& spec,
                                       double r) {
    if (r < 0.0) throw std::invalid_argument("random_coding_exponent: R >= 0");
    Exponent e;
    if (r >= channel::capacity(spec)) return e;  // zero exponent, flagged
    e.feasible = true;
    e.value = detail::golden_max(
        [&](double rho) { return gallager_e0(spec, rho) - rho * r; });
    e.value = std::max(0.0, e.value);
    return e;
}

// Breakpoint 1 - H(zeta / (1 + zeta)) below which the minimum-distance bound
// beats the random-coding exponent.
inline double improved_breakpoint(double zeta) {
    return 1.0 - binary_entropy(zeta / (1.0 + zeta));
}

// E_zeta(R): H^{-1}(1-R) log(1/zeta) below the breakpoint, E_r(R) above it.
inline double improved_exponent(const channel::ChannelSpec& spec, double r) {
    const double zeta = channel::bhattacharyya(spec);
    const double cap = channel::capacity(spec);
    if (r < 0.0 || r >= cap)
        throw std::invalid_argument("improved_exponent: need 0 <= R < C");
    if (r <= improved_breakpoint(zeta))
        return inv_binary_entropy(1.0 - r) * std::log2(1.0 / zeta);
    return random_coding_exponent(spec, r).value;
}

using smallmat::abs_matrix;
using smallmat::spectral_radius;

enum class FilterKind { Hypercuboid, Ellipsoid };

struct AnytimeBudget {
    double rate = 0.0;  // strict lower bound on R, per channel use
    double beta = 0.0;  // strict lower bound on beta, per channel use
    int d_o = 1;
    double eta = 1.0;  // prefactor, reported only
};

// Sufficient (R, beta) lower bounds for stabilizing the plant with the given
// filter and n channel uses per measurement. Vector plants sum per-block rate
// terms; the hypercuboid exponent uses rho(|F|), the ellipsoid one rho(F).
inline AnytimeBudget sufficient_budget(const plant::CanonicalPlant& p,
                                       FilterKind filter, int n) {
    if (n < 1) throw std::invalid_argument("sufficient_budget: n >= 1");
    if (filter == FilterKind::Ellipsoid && p.m_x < 2)
        throw std::invalid_argument(
            "sufficient_budget: ellipsoid filter requires m_x >= 2");

    const double rho_f = spectral_radius(p.F);
    const double rho_fbar = spectral_radius(abs_matrix(p.F));
    if (rho_f > rho_fbar * (1.0 + 1e-9) + 1e-12)
        throw internal_corruption_error(
            "sufficient_budget: rho(F) > rho(|F|)");

    AnytimeBudget b;
    const double theta =
        p.m_x >= 2 ? std::sqrt(static_cast<double>(p.m_x) / (p.m_x - 1)) : 1.0;

    double rate_bits = 0.0;
    for (const auto& blk : p.blocks) {
        double term = 0.0;
        if (filter == FilterKind::Hypercuboid) {
            for (double a : blk) term += std::abs(a);
        } else {
            double pow_theta = 1.0;
            for (double a : blk) {
                term += std::abs(a) * pow_theta;
                pow_theta *= theta;
            }
            term *= std::sqrt(static_cast<double>(p.m_x));
        }
        const double lg = std::log2(term);
        rate_bits += p.q > 1 ? std::max(0.0, lg) : lg;
    }
    b.rate = rate_bits / n;
    b.beta = 2.0 *
             std::log2(filter == FilterKind::Hypercuboid ? rho_fbar : rho_f) / n;
    return b;
}

struct LimitingCase {
    double rate_n = 0.0;       // hypercuboid rate bound at this n
    double beta_n = 0.0;       // hypercuboid exponent bound at this n
    double rate_star = 0.0;    // sum over unstable modes of log2 |mu_i|
    double beta_star = 0.0;    // 2 log2 max_i |mu_i|
};

// Encoding once every n steps works with the plant F^n: build the companion
// plant for eigenvalues mu_i^n and evaluate the sufficient budget at n.
inline LimitingCase limiting_case(const std::vector<double>& mu, int n) {
    if (mu.empty()) throw std::invalid_argument("limiting_case: empty mu");
    for (double m : mu)
        if (m == 0.0) throw std::invalid_argument("limiting_case: |mu_i| > 0");
    std::vector<double> roots;
    roots.reserve(mu.size());
    for (double m : mu) roots.push_back(std::pow(m, n));
    const auto coeffs = smallmat::poly_from_real_roots(roots);
    const auto pl = plant::plant_from_coeffs(
        coeffs, smallmat::Mat(coeffs.size(), 1), smallmat::Mat(1, coeffs.size()),
        0.0, 0.0);
    const auto budget = sufficient_budget(pl, FilterKind::Hypercuboid, n);
    LimitingCase lc;
    lc.rate_n = budget.rate;
    lc.beta_n = budget.beta;
    for (double m : mu)
        if (std::abs(m) > 1.0) lc.rate_star += std::log2(std::abs(m));
    double mx = 0.0;
    for (double m : mu) mx = std::max(mx, std::abs(m));
    lc.beta_star = 2.0 * std::log2(mx);
    return lc;
}

// K(f) = 2 max{|c_1|, |c_2|^{1/2}, ..., |c_{m-1}|^{1/(m-1)}, |c_m/2|^{1/m}}
// for the monic polynomial z^m + c_1 z^{m-1} + ... + c_m. Bounds every root.
inline double fujiwara_bound(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("fujiwara_bound: empty");
    const std::size_t m = coeffs.size();
    double best = std::pow(std::abs(coeffs[m - 1]) / 2.0, 1.0 / m);
    for (std::size_t i = 0; i + 1 < m; ++i)
        best = std::max(best, std::pow(std::abs(coeffs[i]), 1.0 / (i + 1)));
    const double bound = 2.0 * best;
    if (smallmat::max_root_magnitude(coeffs) > bound * (1.0 + 1e-9) + 1e-12)
        throw internal_corruption_error("fujiwara_bound: bound violated");
    return bound;
}

// Largest stabilizable scalar eigenvalue magnitude for the eta-th moment:
// log2 |mu_max| = sup_{R < C} min{R, E_zeta(R)/eta}, located by bisection on
// the crossing of the increasing and decreasing branches.
inline double scalar_stabilizable_mu(const channel::ChannelSpec& spec,
                                     double eta) {
    if (eta < 1.0) throw std::invalid_argument("scalar_stabilizable_mu: eta >= 1");
    const double cap = channel::capacity(spec);
    if (cap <= 0.0) return 1.0;  // nothing unstable is stabilizable
    auto g = [&](double r) { return improved_exponent(spec, r) / eta - r; };
    double lo = 1e-12, hi = cap - 1e-12;
    if (g(lo) <= 0.0) return std::pow(2.0, lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return std::pow(2.0, 0.5 * (lo + hi));
}

// Vector region: exists R < C with sum_{|mu_i|>1} log2 |mu_i| < R and
// eta * log2 max_i |mu_i| < E_zeta(R).
inline bool region_check(const std::vector<double>& mu,
                         const channel::ChannelSpec& spec, double eta) {
    if (eta < 1.0) throw std::invalid_argument("region_check: eta >= 1");
    const double cap = channel::capacity(spec);
    double r_lo = 0.0, mx = 0.0;
    for (double m : mu) {
        if (std::abs(m) > 1.0) r_lo += std::log2(std::abs(m));
        mx = std::max(mx, std::abs(m));
    }
    if (r_lo >= cap) return false;
    const double need = eta * std::log2(mx);
    const double r_test = std::min(r_lo + 1e-9, cap - 1e-12);
    return improved_exponent(spec, r_test) > need;
}

}  // namespace anytime::thresholds
