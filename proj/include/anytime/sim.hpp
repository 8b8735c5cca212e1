#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "anytime/channel.hpp"
#include "anytime/code.hpp"
#include "anytime/decoder.hpp"
#include "anytime/errors.hpp"
#include "anytime/estimation.hpp"
#include "anytime/plant.hpp"
#include "anytime/thresholds.hpp"
#include "anytime/util.hpp"

// Closed-loop plant / observer / encoder / channel / decoder / controller
// simulation, Monte-Carlo reliability estimation, and the rate/exponent
// trade-off sweep. Trials are independent given their derived seeds, so the
// harness can run them on worker threads and merge results by trial index.
namespace anytime::sim {

using smallmat::Mat;
using smallmat::Vec;

enum class ControlTiming { Filtered, Predicted };
enum class NoiseKind { TruncatedGaussian, Uniform };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::TruncatedGaussian;
    double sigma = 1.0;
    double bound = 0.0;  // |draw| < bound, strictly

    double draw(std::mt19937_64& rng) const {
        if (bound <= 0.0) return 0.0;
        if (kind == NoiseKind::Uniform) {
            std::uniform_real_distribution<double> u(-bound, bound);
            return u(rng);
        }
        std::normal_distribution<double> g(0.0, sigma);
        for (;;) {
            const double x = g(rng);
            if (std::abs(x) < bound) return x;
        }
    }
};

struct LoopConfig {
    plant::CanonicalPlant plant;
    thresholds::FilterKind filter = thresholds::FilterKind::Hypercuboid;
    std::vector<estimation::QuantizerSpec> quantizers;  // one per output block
    ControlTiming timing = ControlTiming::Filtered;
    bool observer_knows_control = false;  // true switches to innovation bins
    double eps_prime = 0.1;               // ellipsoid time-update parameter

    int n = 15, k = 5;
    double ensemble_p = 0.5;
    int depth = 0;  // 0 = horizon
    const code::ToeplitzCode* external_code = nullptr;

    channel::ChannelSpec chan{channel::Kind::BEC, 0.3, 1};
    std::int64_t horizon = 100;
    decode::FeedbackScheme feedback{};

    NoiseSpec process_noise, measurement_noise;
    Vec x0;
    Vec init_halfwidth;     // hypercuboid initial box half-widths
    double init_p0 = 0.01;  // ellipsoid initial shape: P0 = init_p0 * I

    std::uint64_t seed = 0;
    double divergence_threshold = 1e6;
    bool check_invariants = true;
};

struct StepLog {
    double x_norm = 0.0;
    double u_norm = 0.0;
    std::int64_t delay = 0;
    int erasures = 0;
    int resolved_count = 0;
};

struct TrialRecord {
    std::vector<StepLog> steps;
    bool diverged = false;
    std::string divergence_reason;
    double lqr_cost = 0.0;  // (1/2T) sum (|x|^2 + |u|^2); inf when diverged
    double max_x_norm = 0.0;
    std::int64_t steps_completed = 0;
    bool gain_warning = false;  // rho(F - G K) >= 1
};

namespace detail {

inline std::vector<int> bits_per_block(
    const std::vector<estimation::QuantizerSpec>& qs) {
    std::vector<int> bits;
    for (const auto& q : qs) {
        int b = 0;
        while ((std::int64_t{1} << b) < q.levels) ++b;
        bits.push_back(b);
    }
    return bits;
}

inline gf2::BitVec pack_indices(const std::vector<std::int64_t>& idx,
                                const std::vector<int>& bits, int k) {
    gf2::BitVec b(static_cast<std::size_t>(k));
    int off = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (int j = 0; j < bits[i]; ++j)
            b.set(static_cast<std::size_t>(off + j), (idx[i] >> j) & 1);
        off += bits[i];
    }
    return b;
}

inline std::vector<std::int64_t> unpack_indices(const gf2::BitVec& b,
                                                const std::vector<int>& bits) {
    std::vector<std::int64_t> idx(bits.size(), 0);
    int off = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        for (int j = 0; j < bits[i]; ++j)
            if (b.get(static_cast<std::size_t>(off + j)))
                idx[i] |= std::int64_t{1} << j;
        off += bits[i];
    }
    return idx;
}

}  // namespace detail

// Set-membership state shared by the controller-side estimator and the
// observer-side replica. The base state tracks the earliest instant whose
// message has not been fully consumed; it alternates between a prediction
// stage (pre-measurement) and a measured stage (waiting for that instant's
// control input before the time update). Estimates propagate the base
// forward with pure time updates; pending instants contribute nothing.
class ReplayEstimator {
public:
    ReplayEstimator(const LoopConfig& cfg, const std::vector<Vec>* u_history)
        : cfg_(&cfg), u_(u_history) {
        const auto m = static_cast<std::size_t>(cfg.plant.m_x);
        box_.lo.assign(m, 0.0);
        box_.hi.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double hw =
                i < cfg.init_halfwidth.size() ? cfg.init_halfwidth[i] : 0.0;
            box_.lo[i] = cfg.x0[i] - hw;
            box_.hi[i] = cfg.x0[i] + hw;
        }
        ell_.P = Mat(m, m);
        for (std::size_t i = 0; i < m; ++i) ell_.P(i, i) = cfg.init_p0;
        ell_.c = cfg.x0;
        bits_ = detail::bits_per_block(cfg.quantizers);
    }

    std::int64_t base_instant() const { return p_; }

    // Consume resolved messages up to `prefix`, as far as the recorded
    // control inputs allow.
    void consume(const std::vector<gf2::BitVec>& messages, std::int64_t prefix) {
        for (;;) {
            if (measured_) {
                if (static_cast<std::int64_t>(u_->size()) > p_) {
                    time_update(box_, ell_, (*u_)[static_cast<std::size_t>(p_)]);
                    ++p_;
                    measured_ = false;
                } else {
                    break;
                }
            } else if (p_ < prefix) {
                apply_measurement(messages[static_cast<std::size_t>(p_)]);
                measured_ = true;
            } else {
                break;
            }
        }
    }

    // Innovation-window index for a measured output (observer side).
    // Requires the base to be the prediction for the current instant.
    std::int64_t index_for_measurement(int blk, double y) const {
        const auto& q = cfg_->quantizers[static_cast<std::size_t>(blk)];
        if (!cfg_->observer_knows_control)
            return estimation::quantize(q, y);
        const double winlo = y_window(blk).mid() -
                             0.5 * q.delta * static_cast<double>(q.levels);
        const auto idx =
            static_cast<std::int64_t>(std::floor((y - winlo) / q.delta));
        if (idx < 0 || idx >= q.levels)
            throw quantizer_overflow_error(
                "innovation quantizer: measurement escaped the window");
        return idx;
    }

    // State estimate (set center) for instant t >= base. `filtered` returns
    // the post-measurement state when instant t has been consumed.
    Vec estimate(std::int64_t t, bool filtered) const {
        if (filtered && measured_ && p_ == t)
            return cfg_->filter == thresholds::FilterKind::Hypercuboid
                       ? box_.center()
                       : ell_.c;
        estimation::Hypercuboid b = box_;
        estimation::Ellipsoid e = ell_;
        propagate_tail(b, e, t);
        return cfg_->filter == thresholds::FilterKind::Hypercuboid ? b.center()
                                                                   : e.c;
    }

    // Current uncertainty set at instant t, for containment checks.
    void state_at(std::int64_t t, estimation::Hypercuboid& b,
                  estimation::Ellipsoid& e) const {
        b = box_;
        e = ell_;
        if (measured_ && p_ == t) return;
        propagate_tail(b, e, t);
    }

private:
    // Prediction interval for output block `blk` at the base instant.
    estimation::Interval y_window(int blk) const {
        const int coord =
            cfg_->plant.leading_indices()[static_cast<std::size_t>(blk)];
        const auto c = static_cast<std::size_t>(coord);
        if (cfg_->filter == thresholds::FilterKind::Hypercuboid)
            return {box_.lo[c] - 0.5 * cfg_->plant.V,
                    box_.hi[c] + 0.5 * cfg_->plant.V};
        const double s = std::sqrt(std::max(0.0, ell_.P(c, c)));
        return {ell_.c[c] - s - 0.5 * cfg_->plant.V,
                ell_.c[c] + s + 0.5 * cfg_->plant.V};
    }

    // The y bin encoded by `index` at the base instant: modulo unwrap from
    // the prediction interval, or the innovation window.
    estimation::Interval bin_for_index(int blk, std::int64_t index) const {
        const auto& q = cfg_->quantizers[static_cast<std::size_t>(blk)];
        if (!cfg_->observer_knows_control)
            return estimation::dequantize(q, index, y_window(blk));
        const double winlo = y_window(blk).mid() -
                             0.5 * q.delta * static_cast<double>(q.levels);
        return {winlo + q.delta * static_cast<double>(index),
                winlo + q.delta * static_cast<double>(index + 1)};
    }

    void apply_measurement(const gf2::BitVec& message) {
        const auto idx = detail::unpack_indices(message, bits_);
        const auto leading = cfg_->plant.leading_indices();
        for (std::size_t blk = 0; blk < idx.size(); ++blk) {
            const estimation::Interval bin =
                bin_for_index(static_cast<int>(blk), idx[blk]);
            if (cfg_->filter == thresholds::FilterKind::Hypercuboid)
                box_ = estimation::hypercuboid_measurement_update(
                    box_, bin, cfg_->plant.V, leading[blk]);
            else
                ell_ = estimation::ellipsoid_measurement_update(
                           ell_, bin, cfg_->plant.V, leading[blk])
                           .e;
        }
    }

    void time_update(estimation::Hypercuboid& b, estimation::Ellipsoid& e,
                     const Vec& u) const {
        const Vec gu = cfg_->plant.G * u;
        if (cfg_->filter == thresholds::FilterKind::Hypercuboid)
            b = estimation::hypercuboid_time_update(b, cfg_->plant.F, gu,
                                                    cfg_->plant.W);
        else
            e = estimation::ellipsoid_time_update(e, cfg_->plant.F, gu,
                                                  cfg_->plant.W, cfg_->eps_prime);
    }

    void propagate_tail(estimation::Hypercuboid& b, estimation::Ellipsoid& e,
                        std::int64_t t) const {
        std::int64_t tau = p_;
        if (measured_) {
            time_update(b, e, (*u_)[static_cast<std::size_t>(tau)]);
            ++tau;
        }
        for (; tau < t; ++tau)
            time_update(b, e, (*u_)[static_cast<std::size_t>(tau)]);
    }

    const LoopConfig* cfg_;
    const std::vector<Vec>* u_;
    std::vector<int> bits_;
    estimation::Hypercuboid box_;
    estimation::Ellipsoid ell_;
    bool measured_ = false;
    std::int64_t p_ = 0;
};

inline TrialRecord run_closed_loop(const LoopConfig& cfg) {
    const auto& p = cfg.plant;
    const int m = p.m_x;
    if (static_cast<int>(cfg.x0.size()) != m)
        throw std::invalid_argument("run_closed_loop: x0 dimension mismatch");
    {
        int total_bits = 0;
        for (int b : detail::bits_per_block(cfg.quantizers)) total_bits += b;
        if (total_bits != cfg.k)
            throw std::invalid_argument(
                "run_closed_loop: quantizer levels inconsistent with k");
    }

    const int depth = cfg.depth > 0 ? cfg.depth : static_cast<int>(cfg.horizon);
    std::optional<code::ToeplitzCode> owned;
    const code::ToeplitzCode* cw = cfg.external_code;
    if (!cw) {
        owned = code::sample_toeplitz(cfg.n, cfg.k, cfg.ensemble_p, depth,
                                      derive_seed(cfg.seed, 11));
        cw = &*owned;
    }

    auto chan_rng = make_rng(derive_seed(cfg.seed, 12));
    auto w_rng = make_rng(derive_seed(cfg.seed, 13));
    auto v_rng = make_rng(derive_seed(cfg.seed, 14));

    code::EncoderState encoder(*cw);
    decode::Decoder decoder(*cw, cfg.feedback);

    std::vector<Vec> u_history;
    u_history.reserve(static_cast<std::size_t>(cfg.horizon));
    ReplayEstimator estimator(cfg, &u_history);
    std::optional<ReplayEstimator> observer;
    if (cfg.observer_knows_control) observer.emplace(cfg, &u_history);

    TrialRecord rec;
    rec.gain_warning =
        smallmat::spectral_radius(p.F - p.G * p.K) >= 1.0 - 1e-12;

    const auto leading = p.leading_indices();
    const auto bits = detail::bits_per_block(cfg.quantizers);

    Vec x = cfg.x0;
    std::vector<gf2::BitVec> truth_msgs;
    std::vector<gf2::BitVec> truth_words;
    std::deque<std::pair<std::int64_t, std::int64_t>> truncations;

    double cost = 0.0;

    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        try {
            Vec u(static_cast<std::size_t>(p.K.rows()), 0.0);
            if (cfg.timing == ControlTiming::Predicted) {
                const Vec xe = estimator.estimate(t, false);
                const Vec kx = p.K * xe;
                for (std::size_t i = 0; i < u.size(); ++i) u[i] = -kx[i];
            }

            std::vector<std::int64_t> indices;
            for (std::size_t blk = 0; blk < leading.size(); ++blk) {
                const double v = cfg.measurement_noise.draw(v_rng);
                const double y =
                    x[static_cast<std::size_t>(leading[blk])] + v;
                const ReplayEstimator& side = observer ? *observer : estimator;
                indices.push_back(
                    side.index_for_measurement(static_cast<int>(blk), y));
            }
            const gf2::BitVec b = detail::pack_indices(indices, bits, cfg.k);
            truth_msgs.push_back(b);

            while (!truncations.empty() && truncations.front().first <= t) {
                encoder.truncate_memory(truncations.front().second);
                truncations.pop_front();
            }
            const gf2::BitVec c = encoder.encode_step(b);
            truth_words.push_back(c);

            const auto z = channel::transmit(cfg.chan, c, chan_rng);
            const std::int64_t prev_prefix = decoder.message_prefix();
            const auto out = decoder.step(z);

            if (cfg.check_invariants) {
                for (const auto& rb : out.newly_resolved)
                    if (rb.value !=
                        truth_words[static_cast<std::size_t>(rb.t)].get(
                            static_cast<std::size_t>(rb.pos)))
                        throw internal_corruption_error(
                            "resolved codeword bit differs from ground truth");
                for (std::int64_t j = prev_prefix; j < out.message_prefix; ++j)
                    if (!(decoder.messages()[static_cast<std::size_t>(j)] ==
                          truth_msgs[static_cast<std::size_t>(j)]))
                        throw internal_corruption_error(
                            "resolved message differs from ground truth");
            }

            estimator.consume(decoder.messages(), out.message_prefix);

            if (cfg.timing == ControlTiming::Filtered) {
                const Vec xe = estimator.estimate(t, true);
                const Vec kx = p.K * xe;
                for (std::size_t i = 0; i < u.size(); ++i) u[i] = -kx[i];
            }
            u_history.push_back(u);

            if (observer) observer->consume(truth_msgs, t + 1);

            if (out.feedback_cutoff)
                truncations.emplace_back(t + 1 + cfg.feedback.latency,
                                         *out.feedback_cutoff);

            if (cfg.check_invariants) {
                estimation::Hypercuboid hb;
                estimation::Ellipsoid he;
                estimator.state_at(t, hb, he);
                if (cfg.filter == thresholds::FilterKind::Hypercuboid) {
                    if (!hb.contains(x))
                        throw internal_corruption_error(
                            "hypercuboid containment violated");
                } else if (he.quad_form(x) > 1.0 + 1e-6) {
                    throw internal_corruption_error(
                        "ellipsoid containment violated");
                }
            }

            StepLog log;
            log.x_norm = smallmat::norm2(x);
            log.u_norm = smallmat::norm2(u);
            log.delay = out.earliest_unresolved_delay;
            log.erasures = out.erasures;
            log.resolved_count = static_cast<int>(out.newly_resolved.size());
            rec.steps.push_back(log);
            rec.max_x_norm = std::max(rec.max_x_norm, log.x_norm);
            cost += log.x_norm * log.x_norm + log.u_norm * log.u_norm;
            rec.steps_completed = t + 1;

            if (log.x_norm > cfg.divergence_threshold) {
                rec.diverged = true;
                rec.divergence_reason = "state norm exceeded threshold";
                break;
            }

            const Vec gu = p.G * u;
            Vec xn = p.F * x;
            for (int i = 0; i < m; ++i)
                xn[static_cast<std::size_t>(i)] +=
                    gu[static_cast<std::size_t>(i)] +
                    cfg.process_noise.draw(w_rng);
            x = std::move(xn);
        } catch (const quantizer_overflow_error& e) {
            rec.diverged = true;
            rec.divergence_reason = e.what();
            break;
        }
    }
    rec.lqr_cost = rec.diverged
                       ? std::numeric_limits<double>::infinity()
                       : cost / (2.0 * static_cast<double>(cfg.horizon));
    return rec;
}

// --- Reliability estimation -------------------------------------------------

struct ReliabilityTable {
    std::int64_t t_ref = 0;
    std::int64_t trials = 0;
    std::vector<std::int64_t> counts;  // counts[d] = trials with delay d
    double slope = 0.0;                // log2 Phat vs d least-squares slope
    double r2 = 0.0;
    bool slope_defined = false;
    std::vector<int> fitted_delays;
};

// Runs `trials` independent encode/transmit/decode chains with random
// messages and tallies the earliest-unresolved delay at time t_ref. Every
// resolved bit is compared against ground truth.
inline ReliabilityTable reliability_estimate(const code::ToeplitzCode& cw,
                                             const channel::ChannelSpec& chan,
                                             std::int64_t t_ref,
                                             std::int64_t trials,
                                             std::uint64_t seed, int jobs = 1,
                                             std::int64_t min_events = 30) {
    if (trials < 1000)
        throw std::invalid_argument(
            "reliability_estimate: need at least 1000 trials for a usable table");
    if (t_ref > cw.depth)
        throw std::invalid_argument("reliability_estimate: t_ref exceeds depth");

    ReliabilityTable table;
    table.t_ref = t_ref;
    table.trials = trials;
    table.counts.assign(static_cast<std::size_t>(t_ref) + 1, 0);

    auto run_trial = [&](std::int64_t trial) {
        auto msg_rng =
            make_rng(derive_seed(seed, 21, static_cast<std::uint64_t>(trial)));
        auto chan_rng =
            make_rng(derive_seed(seed, 22, static_cast<std::uint64_t>(trial)));
        code::EncoderState enc(cw);
        decode::Decoder dec(cw);
        std::vector<gf2::BitVec> truth;
        std::int64_t delay = 0;
        std::uniform_int_distribution<std::uint64_t> ub(0, (1ULL << cw.k) - 1);
        for (std::int64_t t = 0; t < t_ref; ++t) {
            gf2::BitVec b(static_cast<std::size_t>(cw.k));
            const std::uint64_t bitsv = ub(msg_rng);
            for (int j = 0; j < cw.k; ++j)
                b.set(static_cast<std::size_t>(j), (bitsv >> j) & 1ULL);
            const gf2::BitVec c = enc.encode_step(b);
            truth.push_back(c);
            const auto out = dec.step(channel::transmit(chan, c, chan_rng));
            for (const auto& rb : out.newly_resolved)
                if (rb.value != truth[static_cast<std::size_t>(rb.t)].get(
                                    static_cast<std::size_t>(rb.pos)))
                    throw internal_corruption_error(
                        "reliability_estimate: resolved bit differs from truth");
            delay = out.earliest_unresolved_delay;
        }
        return delay;
    };

    if (jobs <= 1) {
        for (std::int64_t trial = 0; trial < trials; ++trial)
            ++table.counts[static_cast<std::size_t>(run_trial(trial))];
    } else {
        std::vector<std::vector<std::int64_t>> partial(
            static_cast<std::size_t>(jobs),
            std::vector<std::int64_t>(static_cast<std::size_t>(t_ref) + 1, 0));
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs; ++w) {
            threads.emplace_back([&, w]() {
                for (std::int64_t trial = w; trial < trials; trial += jobs)
                    ++partial[static_cast<std::size_t>(w)]
                             [static_cast<std::size_t>(run_trial(trial))];
            });
        }
        for (auto& th : threads) th.join();
        for (const auto& part : partial)
            for (std::size_t d = 0; d < part.size(); ++d)
                table.counts[d] += part[d];
    }

    std::vector<double> xs, ys;
    for (std::size_t d = 1; d < table.counts.size(); ++d) {
        if (table.counts[d] >= min_events) {
            xs.push_back(static_cast<double>(d));
            ys.push_back(std::log2(static_cast<double>(table.counts[d]) /
                                   static_cast<double>(trials)));
            table.fitted_delays.push_back(static_cast<int>(d));
        }
    }
    if (xs.size() >= 2) {
        const auto np = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double denom = np * sxx - sx * sx;
        if (denom > 0) {
            table.slope = (np * sxy - sx * sy) / denom;
            const double intercept = (sy - table.slope * sx) / np;
            double ss_res = 0, ss_tot = 0;
            const double ybar = sy / np;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double fit = table.slope * xs[i] + intercept;
                ss_res += (ys[i] - fit) * (ys[i] - fit);
                ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
            }
            table.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
            table.slope_defined = true;
        }
    }
    return table;
}

// --- Rate/exponent trade-off sweep -------------------------------------------

struct SweepCell {
    int k = 0;
    std::vector<double> costs;  // non-diverged LQR costs, sorted
    double median = 0.0;
    std::int64_t diverged = 0;
    std::int64_t total = 0;
};

using ConfigFactory = std::function<LoopConfig(
    int k, const code::ToeplitzCode* cw, std::uint64_t seed)>;

// For each k: sample `codes_per_k` codes from the ensemble, run
// `runs_per_code` trials each, and aggregate the LQR-cost distribution.
// Diverged trials are counted, not averaged into the median.
inline std::vector<SweepCell> experiment_lqr_sweep(
    const ConfigFactory& factory, const std::vector<int>& ks, int n, double p,
    int depth, int codes_per_k, int runs_per_code, std::uint64_t seed,
    int jobs = 1) {
    std::vector<SweepCell> cells;
    for (const int k : ks) {
        SweepCell cell;
        cell.k = k;
        cell.total = static_cast<std::int64_t>(codes_per_k) * runs_per_code;
        std::vector<double> costs(
            static_cast<std::size_t>(codes_per_k * runs_per_code),
            std::numeric_limits<double>::infinity());

        auto run_code = [&](int ci) {
            const auto cw = code::sample_toeplitz(
                n, k, p, depth,
                derive_seed(seed, 31 + static_cast<std::uint64_t>(k),
                            static_cast<std::uint64_t>(ci)));
            for (int ri = 0; ri < runs_per_code; ++ri) {
                LoopConfig cfg = factory(
                    k, &cw,
                    derive_seed(seed, 77 + static_cast<std::uint64_t>(k),
                                static_cast<std::uint64_t>(ci) * 1000003ULL +
                                    static_cast<std::uint64_t>(ri)));
                const TrialRecord rec = run_closed_loop(cfg);
                costs[static_cast<std::size_t>(ci * runs_per_code + ri)] =
                    rec.diverged ? std::numeric_limits<double>::infinity()
                                 : rec.lqr_cost;
            }
        };

        if (jobs <= 1) {
            for (int ci = 0; ci < codes_per_k; ++ci) run_code(ci);
        } else {
            std::vector<std::thread> threads;
            for (int w = 0; w < jobs; ++w) {
                threads.emplace_back([&, w]() {
                    for (int ci = w; ci < codes_per_k; ci += jobs) run_code(ci);
                });
            }
            for (auto& th : threads) th.join();
        }

        for (double c : costs) {
            if (std::isinf(c)) ++cell.diverged;
            else cell.costs.push_back(c);
        }
        std::sort(cell.costs.begin(), cell.costs.end());
        cell.median = cell.costs.empty()
                          ? std::numeric_limits<double>::infinity()
                          : cell.costs[cell.costs.size() / 2];
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace anytime::sim
