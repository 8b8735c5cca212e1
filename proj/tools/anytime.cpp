// Command-line front end: code sampling, threshold tables, closed-loop
// simulation, reliability estimation, and the rate/exponent sweep. Every
// command with a --seed is bit-reproducible; long runs emit a manifest before
// they start. Exit codes: 0 ok, 1 usage error, 2 diverged-trial fraction
// above --fail-threshold, 3 internal invariant failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anytime/channel.hpp"
#include "anytime/code.hpp"
#include "anytime/decoder.hpp"
#include "anytime/errors.hpp"
#include "anytime/estimation.hpp"
#include "anytime/io.hpp"
#include "anytime/presets.hpp"
#include "anytime/sim.hpp"
#include "anytime/thresholds.hpp"

namespace {

using namespace anytime;

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_prefix = "anytime_run";
    double fail_threshold = 0.0;
    bool svg = false;
};

// Flat key-value run configuration: one "key value" (or key=value) pair per
// line, '#' comments. Explicit command-line flags override file entries.
std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& c : line)
            if (c == '=') c = ' ';
        std::istringstream ls(line);
        std::string key, value;
        if (ls >> key >> value) kv[key] = value;
    }
    return kv;
}

template <typename T>
void config_override(const std::map<std::string, std::string>& kv,
                     const std::string& key, const CLI::Option* flag, T& out) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if (flag && flag->count() > 0) return;  // explicit flags win
    std::istringstream ss(it->second);
    if (!(ss >> out))
        throw CLI::ValidationError("--config", "bad value for " + key);
}

std::string fmt(double v) { return io::fmt_double(v); }

code::ToeplitzCode load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--code", "cannot open " + path);
    return code::load(in);
}

int cmd_sample_code(int n, int k, double p, int depth, std::uint64_t seed,
                    const std::string& out) {
    const auto cw = code::sample_toeplitz(n, k, p, depth, seed);
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + out);
    code::save(cw, os);
    std::printf("wrote %s\n", out.c_str());
    std::printf("H_1: %d x %d, blocks: %d, rate R = %s\n", cw.nbar, cw.n,
                cw.depth, fmt(cw.rate()).c_str());
    return 0;
}

int cmd_thresholds_er(const channel::ChannelSpec& chan, double rate, int n) {
    const auto er = thresholds::random_coding_exponent(chan, rate);
    const double ez = rate < channel::capacity(chan)
                          ? thresholds::improved_exponent(chan, rate)
                          : 0.0;
    std::printf("channel capacity C = %s, Bhattacharyya zeta = %s\n",
                fmt(channel::capacity(chan)).c_str(),
                fmt(channel::bhattacharyya(chan)).c_str());
    if (!er.feasible) {
        std::printf("R = %s >= C: INFEASIBLE (zero exponent)\n", fmt(rate).c_str());
        return 0;
    }
    std::printf("E_r(R)    per channel use = %s, per plant step n*E_r = %s\n",
                fmt(er.value).c_str(), fmt(n * er.value).c_str());
    std::printf("E_zeta(R) per channel use = %s, per plant step n*E_zeta = %s\n",
                fmt(ez).c_str(), fmt(n * ez).c_str());
    return 0;
}

int cmd_thresholds_toeplitz(double rate, double p) {
    const auto t = thresholds::toeplitz_distance_thresholds(rate, p);
    if (!t.feasible) {
        std::printf("R = %s, p = %s: INFEASIBLE\n", fmt(rate).c_str(),
                    fmt(p).c_str());
        return 0;
    }
    std::printf("alpha_sup = %s, theta_inf = %s\n", fmt(t.alpha_sup).c_str(),
                fmt(t.theta_inf).c_str());
    return 0;
}

int cmd_thresholds_bec(double rate, const channel::ChannelSpec& chan) {
    const double zeta = channel::bhattacharyya(chan);
    std::printf("rate bound R_sup = %s\n", fmt(thresholds::max_rate(zeta)).c_str());
    const auto b = thresholds::corollary_bec_bounds(rate, zeta);
    if (!b.feasible)
        std::printf("R = %s: INFEASIBLE (above the rate bound)\n", fmt(rate).c_str());
    else
        std::printf("beta_sup per channel use = %s\n", fmt(b.beta_sup).c_str());
    return 0;
}

plant::CanonicalPlant plant_from_cli(const std::string& preset,
                                     const std::vector<double>& coeffs) {
    if (preset == "cart-stick")
        return presets::cart_stick_config().plant;
    if (preset == "example2")
        return presets::example2_config(5).plant;
    if (!coeffs.empty())
        return plant::plant_from_coeffs(coeffs,
                                        smallmat::Mat(coeffs.size(), 1),
                                        smallmat::Mat(1, coeffs.size()), 0, 0);
    throw CLI::ValidationError("plant", "need --preset or --a coefficients");
}

int cmd_thresholds_plant(const std::string& preset,
                         const std::vector<double>& coeffs,
                         const std::string& filter, int n) {
    const auto p = plant_from_cli(preset, coeffs);
    const auto kind = filter == "ellipsoid"
                          ? thresholds::FilterKind::Ellipsoid
                          : thresholds::FilterKind::Hypercuboid;
    const auto b = thresholds::sufficient_budget(p, kind, n);
    std::printf("filter = %s, n = %d\n",
                kind == thresholds::FilterKind::Ellipsoid ? "ellipsoid"
                                                          : "hypercuboid",
                n);
    std::printf("R  per channel use = %s, per plant step nR  = %s bits\n",
                fmt(b.rate).c_str(), fmt(n * b.rate).c_str());
    std::printf("beta per channel use = %s, per plant step n*beta = %s\n",
                fmt(b.beta).c_str(), fmt(n * b.beta).c_str());
    std::printf("rho(F) = %s, rho(|F|) = %s\n",
                fmt(thresholds::spectral_radius(p.F)).c_str(),
                fmt(thresholds::spectral_radius(thresholds::abs_matrix(p.F))).c_str());
    return 0;
}

int cmd_thresholds_limiting(const std::vector<double>& mu,
                            const std::vector<int>& ns) {
    std::printf("n,R_n,beta_n\n");
    for (int n : ns) {
        const auto lc = thresholds::limiting_case(mu, n);
        std::printf("%d,%s,%s\n", n, fmt(lc.rate_n).c_str(),
                    fmt(lc.beta_n).c_str());
    }
    const auto lc = thresholds::limiting_case(mu, 1);
    std::printf("asymptote: R* = %s, beta* = %s\n", fmt(lc.rate_star).c_str(),
                fmt(lc.beta_star).c_str());
    return 0;
}

int cmd_thresholds_region(const channel::ChannelSpec& chan, double eta,
                          bool sweep, const std::vector<double>& mu,
                          const std::string& out) {
    if (sweep) {
        io::CsvWriter csv(out, {"epsilon", "mu_max"});
        for (int i = 1; i < 50; ++i) {
            channel::ChannelSpec c = chan;
            c.epsilon = i / 50.0 * (chan.kind == channel::Kind::BSC ? 0.5 : 1.0);
            if (channel::capacity(c) <= 0.01) break;
            csv.write_row(std::vector<double>{
                c.epsilon, thresholds::scalar_stabilizable_mu(c, eta)});
        }
        std::printf("wrote %s\n", out.c_str());
        return 0;
    }
    if (!mu.empty()) {
        const bool ok = thresholds::region_check(mu, chan, eta);
        std::printf("region check: %s\n", ok ? "STABILIZABLE" : "NOT STABILIZABLE");
        return 0;
    }
    std::printf("|mu_max| = %s\n",
                fmt(thresholds::scalar_stabilizable_mu(chan, eta)).c_str());
    return 0;
}

sim::LoopConfig config_from_preset(const std::string& preset,
                                   const std::string& filter, int k,
                                   std::int64_t horizon, double eps,
                                   std::uint64_t seed) {
    const auto kind = filter == "ellipsoid"
                          ? thresholds::FilterKind::Ellipsoid
                          : thresholds::FilterKind::Hypercuboid;
    if (preset == "cart-stick")
        return presets::cart_stick_config(kind, seed, horizon, k, 15, eps);
    if (preset == "example2")
        return presets::example2_config(k, seed, horizon, 15, eps);
    throw CLI::ValidationError("--preset", "unknown preset " + preset);
}

int cmd_simulate(const std::string& preset, const std::string& filter, int k,
                 std::int64_t horizon, double eps, int trials,
                 bool decoder_trace, const CommonOpts& common) {
    const std::string manifest_path = common.out_prefix + ".manifest.txt";
    const std::string traj_path = common.out_prefix + ".trajectory.csv";
    const std::string summary_path = common.out_prefix + ".summary.csv";
    const std::string trace_path = common.out_prefix + ".decoder_trace.csv";
    const std::string svg_path = common.out_prefix + ".trajectory.svg";

    io::Manifest man;
    man.command = "simulate";
    man.version = kVersion;
    man.config = {{"preset", preset},
                  {"filter", filter},
                  {"k", std::to_string(k)},
                  {"horizon", std::to_string(horizon)},
                  {"epsilon", fmt(eps)},
                  {"trials", std::to_string(trials)},
                  {"seed", std::to_string(common.seed)}};
    man.outputs = {traj_path, summary_path};
    if (decoder_trace) man.outputs.push_back(trace_path);
    if (common.svg) man.outputs.push_back(svg_path);
    man.write(manifest_path);

    io::CsvWriter traj(traj_path, {"trial", "t", "x_norm", "u_norm", "delay"});
    io::CsvWriter summary(summary_path,
                          {"trial", "lqr_cost", "max_x_norm", "diverged",
                           "steps_completed"});
    std::optional<io::CsvWriter> trace;
    if (decoder_trace)
        trace.emplace(trace_path, std::vector<std::string>{
                                      "t", "erasures", "earliest_pending_delay",
                                      "resolved_count"});
    io::Series series{"x_norm", {}};
    std::int64_t diverged = 0;
    for (int trial = 0; trial < trials; ++trial) {
        auto cfg = config_from_preset(preset, filter, k, horizon, eps,
                                      derive_seed(common.seed, 5,
                                                  static_cast<std::uint64_t>(trial)));
        const auto rec = sim::run_closed_loop(cfg);
        for (std::size_t t = 0; t < rec.steps.size(); ++t) {
            traj.write_row(std::vector<double>{
                static_cast<double>(trial), static_cast<double>(t),
                rec.steps[t].x_norm, rec.steps[t].u_norm,
                static_cast<double>(rec.steps[t].delay)});
            if (trial == 0) {
                series.points.emplace_back(static_cast<double>(t),
                                           rec.steps[t].x_norm);
                if (trace)
                    trace->write_row(std::vector<double>{
                        static_cast<double>(t),
                        static_cast<double>(rec.steps[t].erasures),
                        static_cast<double>(rec.steps[t].delay),
                        static_cast<double>(rec.steps[t].resolved_count)});
            }
        }
        summary.write_row(std::vector<std::string>{
            std::to_string(trial), fmt(rec.lqr_cost), fmt(rec.max_x_norm),
            rec.diverged ? "1" : "0", std::to_string(rec.steps_completed)});
        if (rec.diverged) ++diverged;
        if (rec.gain_warning)
            std::fprintf(stderr, "warning: rho(F - G K) >= 1 for this preset\n");
    }
    if (common.svg) io::svg_line_plot(svg_path, {series}, "state norm vs t");
    std::printf("trials: %d, diverged: %lld\n", trials,
                static_cast<long long>(diverged));
    const double frac = trials > 0 ? static_cast<double>(diverged) / trials : 0.0;
    return frac > common.fail_threshold ? 2 : 0;
}

int cmd_reliability(const std::string& code_path, int n, int k, int depth,
                    std::uint64_t code_seed, const channel::ChannelSpec& chan,
                    std::int64_t t_ref, std::int64_t trials,
                    const CommonOpts& common) {
    code::ToeplitzCode cw;
    if (!code_path.empty()) {
        cw = load_code_file(code_path);
    } else {
        cw = code::sample_toeplitz(
            n, k, 0.5, depth > 0 ? depth : static_cast<int>(t_ref) + 1,
            code_seed);
    }
    if (cw.depth < t_ref)
        throw CLI::ValidationError("--t", "code depth below reference time");

    const std::string manifest_path = common.out_prefix + ".manifest.txt";
    const std::string table_path = common.out_prefix + ".reliability.csv";
    const std::string svg_path = common.out_prefix + ".reliability.svg";
    io::Manifest man;
    man.command = "reliability";
    man.version = kVersion;
    man.config = {{"n", std::to_string(cw.n)},
                  {"k", std::to_string(cw.k)},
                  {"channel_epsilon", fmt(chan.epsilon)},
                  {"t_ref", std::to_string(t_ref)},
                  {"trials", std::to_string(trials)},
                  {"seed", std::to_string(common.seed)}};
    man.outputs = {table_path};
    if (common.svg) man.outputs.push_back(svg_path);
    man.write(manifest_path);

    const auto table = sim::reliability_estimate(cw, chan, t_ref, trials,
                                                 common.seed, common.jobs);
    io::CsvWriter csv(table_path, {"d", "count", "p_hat", "log2_p_hat"});
    io::Series series{"log2 P(d)", {}};
    for (std::size_t d = 0; d < table.counts.size(); ++d) {
        if (table.counts[d] == 0) continue;
        const double p = static_cast<double>(table.counts[d]) /
                         static_cast<double>(table.trials);
        csv.write_row(std::vector<double>{static_cast<double>(d),
                                          static_cast<double>(table.counts[d]),
                                          p, std::log2(p)});
        if (d >= 1) series.points.emplace_back(static_cast<double>(d), std::log2(p));
    }
    if (common.svg) io::svg_line_plot(svg_path, {series}, "log2 P vs delay");

    std::printf("wrote %s\n", table_path.c_str());
    if (table.slope_defined) {
        std::printf("fitted slope = %s per step (R^2 = %s) over %zu delays\n",
                    fmt(table.slope).c_str(), fmt(table.r2).c_str(),
                    table.fitted_delays.size());
        const auto er = thresholds::random_coding_exponent(chan, cw.rate());
        std::printf("reference: n*E_r(R) = %s per step (ensemble existence "
                    "value, reported for comparison)\n",
                    fmt(cw.n * er.value).c_str());
    } else {
        std::printf("slope undefined: too few delay events\n");
    }
    return 0;
}

int cmd_sweep(const std::vector<int>& ks, int codes, int runs,
              std::int64_t horizon, double eps, const CommonOpts& common) {
    const std::string manifest_path = common.out_prefix + ".manifest.txt";
    const std::string cdf_path = common.out_prefix + ".cdf.csv";
    const std::string median_path = common.out_prefix + ".medians.csv";
    const std::string svg_path = common.out_prefix + ".cdf.svg";
    io::Manifest man;
    man.command = "sweep";
    man.version = kVersion;
    {
        std::ostringstream kss;
        for (std::size_t i = 0; i < ks.size(); ++i)
            kss << (i ? "," : "") << ks[i];
        man.config = {{"k_values", kss.str()},
                      {"codes_per_k", std::to_string(codes)},
                      {"runs_per_code", std::to_string(runs)},
                      {"horizon", std::to_string(horizon)},
                      {"epsilon", fmt(eps)},
                      {"seed", std::to_string(common.seed)}};
    }
    man.outputs = {cdf_path, median_path};
    if (common.svg) man.outputs.push_back(svg_path);
    man.write(manifest_path);

    auto factory = [&](int k, const code::ToeplitzCode* cw, std::uint64_t seed) {
        auto cfg = presets::example2_config(k, seed, horizon, 15, eps);
        cfg.external_code = cw;
        cfg.seed = seed;
        return cfg;
    };
    const auto cells = sim::experiment_lqr_sweep(
        factory, ks, 15, 0.5, static_cast<int>(horizon), codes, runs,
        common.seed, common.jobs);

    io::CsvWriter cdf(cdf_path, {"k", "cost", "cdf"});
    io::CsvWriter medians(median_path, {"k", "median_cost", "diverged", "total"});
    std::vector<io::Series> series;
    std::int64_t total_diverged = 0, total = 0;
    for (const auto& cell : cells) {
        io::Series s{"k=" + std::to_string(cell.k), {}};
        for (std::size_t i = 0; i < cell.costs.size(); ++i) {
            const double cdfv = static_cast<double>(i + 1) /
                                static_cast<double>(cell.total);
            cdf.write_row(std::vector<double>{static_cast<double>(cell.k),
                                              cell.costs[i], cdfv});
            s.points.emplace_back(cell.costs[i], cdfv);
        }
        series.push_back(std::move(s));
        medians.write_row(std::vector<std::string>{
            std::to_string(cell.k), fmt(cell.median),
            std::to_string(cell.diverged), std::to_string(cell.total)});
        std::printf("k=%d median=%s diverged=%lld/%lld\n", cell.k,
                    fmt(cell.median).c_str(),
                    static_cast<long long>(cell.diverged),
                    static_cast<long long>(cell.total));
        total_diverged += cell.diverged;
        total += cell.total;
    }
    if (common.svg) io::svg_line_plot(svg_path, series, "LQR cost CDF");
    const double frac =
        total > 0 ? static_cast<double>(total_diverged) / total : 0.0;
    return frac > common.fail_threshold ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime: causal linear codes over erasure channels and "
                 "closed-loop control through them"};
    app.require_subcommand(1);

    try {
        // sample-code
        auto* sc = app.add_subcommand("sample-code",
                                      "sample a time-invariant code and write it");
        int sc_n = 15, sc_k = 5, sc_depth = 64;
        double sc_p = 0.5;
        std::uint64_t sc_seed = 0;
        std::string sc_out = "code.txt";
        sc->add_option("--n", sc_n, "coded bits per step");
        sc->add_option("--k", sc_k, "message bits per step");
        sc->add_option("--p", sc_p, "ensemble Bernoulli parameter");
        sc->add_option("--depth", sc_depth, "stored blocks");
        sc->add_option("--seed", sc_seed, "RNG seed")->required();
        sc->add_option("--out", sc_out, "output file");

        // thresholds
        auto* th = app.add_subcommand("thresholds", "rate/exponent computations");
        th->require_subcommand(1);
        std::string th_chan = "bec:0.3";
        double th_rate = 0.5, th_p = 0.5, th_eta = 2.0;
        int th_n = 15;
        std::string th_preset, th_filter = "hypercuboid", th_out = "region.csv";
        std::vector<double> th_coeffs, th_mu;
        std::vector<int> th_ns{1, 2, 4, 8, 16};
        bool th_sweep = false;

        auto* th_er = th->add_subcommand("er", "random-coding and improved exponents");
        th_er->add_option("--channel", th_chan, "bec:eps or bsc:eps");
        th_er->add_option("--rate", th_rate, "code rate R")->required();
        th_er->add_option("--n", th_n, "channel uses per step");

        auto* th_tz = th->add_subcommand("toeplitz", "ensemble distance thresholds");
        th_tz->add_option("--rate", th_rate)->required();
        th_tz->add_option("--p", th_p, "Bernoulli parameter");

        auto* th_bec = th->add_subcommand("bec-bounds", "rate/exponent bounds from the union-bound corollary");
        th_bec->add_option("--rate", th_rate)->required();
        th_bec->add_option("--channel", th_chan);

        auto* th_pl = th->add_subcommand("plant", "sufficient (R, beta) for a plant");
        th_pl->add_option("--preset", th_preset, "cart-stick or example2");
        th_pl->add_option("--a", th_coeffs, "companion coefficients a_1..a_m")->delimiter(',');
        th_pl->add_option("--filter", th_filter, "hypercuboid or ellipsoid");
        th_pl->add_option("--n", th_n);

        auto* th_lim = th->add_subcommand("limiting", "encode-every-n-steps limit");
        th_lim->add_option("--mu", th_mu, "eigenvalue magnitudes")->required()->delimiter(',');
        th_lim->add_option("--n-sweep", th_ns, "values of n")->delimiter(',');

        auto* th_reg = th->add_subcommand("region", "stabilizable eigenvalue region");
        th_reg->add_option("--channel", th_chan);
        th_reg->add_option("--eta", th_eta, "moment order");
        th_reg->add_flag("--sweep", th_sweep, "emit CSV over epsilon");
        th_reg->add_option("--mu", th_mu, "check a specific eigenvalue tuple")->delimiter(',');
        th_reg->add_option("--out", th_out, "CSV path for --sweep");

        // simulate / reliability / sweep
        CommonOpts common;
        auto add_common = [&](CLI::App* cmd, bool seed_required = true) {
            auto* opt = cmd->add_option("--seed", common.seed, "master seed");
            if (seed_required) opt->required();
            cmd->add_option("--jobs", common.jobs, "worker threads");
            cmd->add_option("--out-prefix", common.out_prefix, "output file prefix");
            cmd->add_option("--fail-threshold", common.fail_threshold,
                            "diverged fraction above which exit code is 2");
            cmd->add_flag("--svg", common.svg, "also write SVG plots");
        };

        auto* si = app.add_subcommand("simulate", "closed-loop simulation");
        std::string si_preset = "cart-stick", si_filter = "hypercuboid";
        std::string si_config;
        int si_k = 5, si_trials = 1;
        std::int64_t si_horizon = 500;
        double si_eps = 0.3;
        bool si_trace = false;
        si->add_option("--config", si_config, "key-value config file");
        auto* o_preset = si->add_option("--preset", si_preset, "cart-stick or example2");
        auto* o_filter = si->add_option("--filter", si_filter, "hypercuboid or ellipsoid");
        auto* o_k = si->add_option("--k", si_k, "message bits per step");
        auto* o_horizon = si->add_option("--horizon", si_horizon);
        auto* o_eps = si->add_option("--epsilon", si_eps, "erasure probability");
        auto* o_trials = si->add_option("--trials", si_trials);
        si->add_flag("--decoder-trace", si_trace,
                     "emit a per-step decoder CSV for the first trial");
        add_common(si);

        auto* re = app.add_subcommand("reliability", "Monte-Carlo delay table");
        std::string re_code;
        int re_n = 15, re_k = 5, re_depth = 0;
        std::uint64_t re_code_seed = 1;
        std::string re_chan = "bec:0.3";
        std::int64_t re_t = 100, re_trials = 10000;
        re->add_option("--code", re_code, "code file (else sampled)");
        re->add_option("--n", re_n);
        re->add_option("--k", re_k);
        re->add_option("--depth", re_depth);
        re->add_option("--code-seed", re_code_seed);
        re->add_option("--channel", re_chan);
        re->add_option("--t", re_t, "reference decode time");
        re->add_option("--trials", re_trials);
        add_common(re);

        auto* sw = app.add_subcommand("sweep", "LQR cost vs k trade-off sweep");
        std::vector<int> sw_ks{3, 4, 5, 6, 7};
        int sw_codes = 50, sw_runs = 10;
        std::int64_t sw_horizon = 100;
        double sw_eps = 0.3;
        std::string sw_preset = "example2";
        sw->add_option("--preset", sw_preset)->check(CLI::IsMember({"example2"}));
        sw->add_option("--k", sw_ks, "k values")->delimiter(',');
        sw->add_option("--codes", sw_codes, "codes per k");
        sw->add_option("--runs", sw_runs, "runs per code");
        sw->add_option("--horizon", sw_horizon);
        sw->add_option("--epsilon", sw_eps);
        add_common(sw);

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 1;  // usage errors are exit 1
        }

        if (sc->parsed()) {
            if (!(sc_k > 0 && sc_k < sc_n)) {
                std::fprintf(stderr, "error: need 0 < k < n (R must be < 1)\n");
                return 1;
            }
            return cmd_sample_code(sc_n, sc_k, sc_p, sc_depth, sc_seed, sc_out);
        }
        if (th->parsed()) {
            if (th_er->parsed())
                return cmd_thresholds_er(channel::parse_channel(th_chan), th_rate, th_n);
            if (th_tz->parsed()) return cmd_thresholds_toeplitz(th_rate, th_p);
            if (th_bec->parsed())
                return cmd_thresholds_bec(th_rate, channel::parse_channel(th_chan));
            if (th_pl->parsed())
                return cmd_thresholds_plant(th_preset, th_coeffs, th_filter, th_n);
            if (th_lim->parsed()) return cmd_thresholds_limiting(th_mu, th_ns);
            if (th_reg->parsed())
                return cmd_thresholds_region(channel::parse_channel(th_chan),
                                             th_eta, th_sweep, th_mu, th_out);
        }
        if (si->parsed()) {
            if (!si_config.empty()) {
                const auto kv = load_config_file(si_config);
                config_override(kv, "preset", o_preset, si_preset);
                config_override(kv, "filter", o_filter, si_filter);
                config_override(kv, "k", o_k, si_k);
                config_override(kv, "horizon", o_horizon, si_horizon);
                config_override(kv, "epsilon", o_eps, si_eps);
                config_override(kv, "trials", o_trials, si_trials);
            }
            return cmd_simulate(si_preset, si_filter, si_k, si_horizon, si_eps,
                                si_trials, si_trace, common);
        }
        if (re->parsed())
            return cmd_reliability(re_code, re_n, re_k, re_depth, re_code_seed,
                                   channel::parse_channel(re_chan), re_t,
                                   re_trials, common);
        if (sw->parsed())
            return cmd_sweep(sw_ks, sw_codes, sw_runs, sw_horizon, sw_eps, common);
        return 1;
    } catch (const CLI::Error& e) {
        return app.exit(e) ? 1 : 1;
    } catch (const anytime::internal_corruption_error& e) {
        std::fprintf(stderr, "internal invariant failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
