#pragma once

#include <cstdint>
#include <cstdio>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anytime/errors.hpp"
#include "anytime/gf2.hpp"
#include "anytime/util.hpp"

// The time-invariant causal linear code: parity-check blocks H_1..H_D sampled
// from the Bernoulli ensemble (H_1 fixed full rank), derived generator blocks
// G_1..G_D, a streaming encoder with feedback-driven memory truncation, and
// exhaustive delay-distance analysis for small instances.
namespace anytime::code {

// Exhaustive weight enumeration is 2^(k*d); refuse beyond this.
inline constexpr int kEnumerationBudgetBits = 22;

struct ToeplitzCode {
    int n = 0;      // coded bits per step
    int k = 0;      // message bits per step
    int nbar = 0;   // n - k parity bits per step
    int depth = 0;  // number of stored blocks D
    double p = 0.5; // ensemble Bernoulli parameter
    std::uint64_t seed = 0;

    std::vector<gf2::BitMatrix> H;  // H[i] is H_{i+1}, nbar x n
    std::vector<gf2::BitMatrix> G;  // G[i] is G_{i+1}, n x k

    // Column caches for the streaming encoder / decoder hot paths.
    std::vector<std::vector<gf2::BitVec>> Hcol;  // [i][pos] -> nbar-bit column
    std::vector<std::vector<gf2::BitVec>> Gcol;  // [i][j]   -> n-bit column
    gf2::BitMatrix g1_left_inv;                  // k x n, g1_left_inv * G_1 = I_k

    double rate() const { return static_cast<double>(k) / n; }

    void build_caches() {
        Hcol.assign(H.size(), {});
        for (std::size_t i = 0; i < H.size(); ++i) {
            Hcol[i].reserve(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) Hcol[i].push_back(H[i].col(j));
        }
        Gcol.assign(G.size(), {});
        for (std::size_t i = 0; i < G.size(); ++i) {
            Gcol[i].reserve(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j) Gcol[i].push_back(G[i].col(j));
        }
        // Left inverse of G_1: row r solves G_1^T y = e_r (canonical solve).
        const gf2::BitMatrix g1t = G[0].transpose();
        g1_left_inv = gf2::BitMatrix(k, n);
        for (int r = 0; r < k; ++r) {
            gf2::BitVec e(static_cast<std::size_t>(k));
            e.set(static_cast<std::size_t>(r), true);
            const auto sol = gf2::solve(g1t, e);
            if (sol.kind == gf2::SolveKind::Inconsistent)
                throw internal_corruption_error("G_1 lost full column rank");
            for (int j = 0; j < n; ++j)
                g1_left_inv.set(r, j, sol.x.get(static_cast<std::size_t>(j)));
        }
    }
};

// Derives generator blocks from parity blocks: G_1 spans null(H_1) and, for
// tau >= 2, H_1 G_tau = sum_{i=2..tau} H_i G_{tau-i+1}, solved column by
// column with the canonical (free variables zero) solve. The block-Toeplitz
// orthogonality sum_{i=1..tau} H_i G_{tau-i+1} = 0 then holds to full depth.
inline std::vector<gf2::BitMatrix> derive_generator(
    const std::vector<gf2::BitMatrix>& h) {
    if (h.empty()) throw std::invalid_argument("derive_generator: no blocks");
    const std::size_t nbar = h[0].rows();
    const std::size_t n = h[0].cols();
    const std::size_t k = n - nbar;
    const auto ech = gf2::row_echelon(h[0]);
    if (ech.rank != nbar)
        throw std::invalid_argument("derive_generator: H_1 not full rank");

    std::vector<gf2::BitMatrix> g(h.size(), gf2::BitMatrix(n, k));

    // Null-space basis of H_1 in canonical order (one vector per free column).
    std::vector<bool> is_pivot(n, false);
    for (auto p : ech.pivots) is_pivot[p] = true;
    std::size_t col = 0;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        g[0].set(f, col, true);
        for (std::size_t pi = 0; pi < ech.pivots.size(); ++pi)
            if (ech.mat.get(pi, f)) g[0].set(ech.pivots[pi], col, true);
        ++col;
    }

    for (std::size_t tau = 1; tau < h.size(); ++tau) {
        // rhs = sum_{i=2..tau+1} H_i G_{tau-i+2}  (0-based: h[j] g[tau-j])
        gf2::BitMatrix rhs(nbar, k);
        for (std::size_t j = 1; j <= tau; ++j) {
            const gf2::BitMatrix t = h[j].mul(g[tau - j]);
            for (std::size_t r = 0; r < nbar; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    if (t.get(r, c)) rhs.set(r, c, !rhs.get(r, c));
        }
        for (std::size_t c = 0; c < k; ++c) {
            const auto sol = gf2::solve(h[0], rhs.col(c));
            if (sol.kind == gf2::SolveKind::Inconsistent)
                throw internal_corruption_error(
                    "derive_generator: inconsistent system for full-rank H_1");
            for (std::size_t r = 0; r < n; ++r)
                g[tau].set(r, c, sol.x.get(r));
        }
    }
    return g;
}

// Samples from the time-invariant ensemble: H_1 = [I | 0] and the entries of
// H_2..H_D i.i.d. Bernoulli(p) from the seeded engine.
inline ToeplitzCode sample_toeplitz(int n, int k, double p, int depth,
                                    std::uint64_t seed) {
    if (!(k > 0 && k < n))
        throw std::invalid_argument("sample_toeplitz: need 0 < k < n");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("sample_toeplitz: need 0 < p < 1");
    if (depth < 1) throw std::invalid_argument("sample_toeplitz: depth >= 1");

    ToeplitzCode code;
    code.n = n;
    code.k = k;
    code.nbar = n - k;
    code.depth = depth;
    code.p = p;
    code.seed = seed;

    gf2::BitMatrix h1(code.nbar, n);
    for (int i = 0; i < code.nbar; ++i) h1.set(i, i, true);
    code.H.push_back(std::move(h1));

    auto rng = make_rng(seed);
    for (int tau = 1; tau < depth; ++tau)
        code.H.push_back(gf2::BitMatrix::random(code.nbar, n, p, rng));

    code.G = derive_generator(code.H);
    code.build_caches();
    return code;
}

// Streaming encoder. Retains the message window [cutoff, t); the window is
// bounded by depth D, and exceeding it without truncation is an error.
class EncoderState {
public:
    explicit EncoderState(const ToeplitzCode& code) : code_(&code) {}

    std::int64_t time() const { return t_; }
    std::int64_t cutoff() const { return cutoff_; }

    gf2::BitVec encode_step(const gf2::BitVec& b) {
        if (static_cast<int>(b.size()) != code_->k)
            throw std::invalid_argument("encode_step: message must have k bits");
        window_.push_back(b);
        const std::int64_t window = t_ - cutoff_ + 1;
        if (window > code_->depth)
            throw budget_exceeded_error(
                "encode_step: message history exceeds code depth; "
                "truncate_memory required");
        gf2::BitVec c(static_cast<std::size_t>(code_->n));
        for (std::int64_t j = cutoff_; j <= t_; ++j) {
            const auto& bj = window_[static_cast<std::size_t>(j - cutoff_)];
            const auto& cols = code_->Gcol[static_cast<std::size_t>(t_ - j)];
            bj.for_each_set([&](std::size_t bit) { c.xor_with(cols[bit]); });
        }
        ++t_;
        return c;
    }

    // Drops all messages before cutoff_time; later outputs depend only on
    // b_{cutoff_time}..b_t.
    void truncate_memory(std::int64_t cutoff_time) {
        if (cutoff_time > t_)
            throw std::invalid_argument("truncate_memory: cutoff in the future");
        while (cutoff_ < cutoff_time) {
            if (!window_.empty()) window_.pop_front();
            ++cutoff_;
        }
    }

private:
    const ToeplitzCode* code_;
    std::int64_t t_ = 0;       // next step index
    std::int64_t cutoff_ = 0;  // earliest retained message index
    std::deque<gf2::BitVec> window_;
};

// Stateless encoding of a full message prefix (oracle/analysis path).
inline std::vector<gf2::BitVec> encode_sequence(
    const ToeplitzCode& code, const std::vector<gf2::BitVec>& msgs) {
    std::vector<gf2::BitVec> out;
    out.reserve(msgs.size());
    for (std::size_t t = 0; t < msgs.size(); ++t) {
        gf2::BitVec c(static_cast<std::size_t>(code.n));
        for (std::size_t j = (t + 1 > static_cast<std::size_t>(code.depth)
                                  ? t + 1 - static_cast<std::size_t>(code.depth)
                                  : 0);
             j <= t; ++j) {
            const auto& cols = code.Gcol[t - j];
            msgs[j].for_each_set([&](std::size_t bit) { c.xor_with(cols[bit]); });
        }
        out.push_back(std::move(c));
    }
    return out;
}

struct DistanceReport {
    int d = 0;
    int w_min = 0;
    std::map<int, std::uint64_t> weight_counts;  // weight -> codeword count
};

// Exhaustively enumerates the delay-d codebook (messages with b_1 != 0) and
// tallies codeword Hamming weights. Refuses when k*d exceeds the budget.
inline DistanceReport weight_distribution(const ToeplitzCode& code, int d) {
    if (d < 1) throw std::invalid_argument("weight_distribution: d >= 1");
    if (d > code.depth)
        throw std::invalid_argument("weight_distribution: d exceeds code depth");
    const long long bits = static_cast<long long>(code.k) * d;
    if (bits > kEnumerationBudgetBits)
        throw budget_exceeded_error(
            "weight_distribution: k*d = " + std::to_string(bits) +
            " exceeds enumeration budget of " +
            std::to_string(kEnumerationBudgetBits) + " bits");

    DistanceReport rep;
    rep.d = d;
    const std::uint64_t total = 1ULL << bits;
    const std::uint64_t first_mask = (1ULL << code.k) - 1;
    std::vector<gf2::BitVec> msgs(static_cast<std::size_t>(d),
                                  gf2::BitVec(static_cast<std::size_t>(code.k)));
    int wmin = code.n * d + 1;
    for (std::uint64_t m = 1; m < total; ++m) {
        if ((m & first_mask) == 0) continue;  // b_1 must be nonzero
        for (int t = 0; t < d; ++t)
            for (int b = 0; b < code.k; ++b)
                msgs[static_cast<std::size_t>(t)].set(
                    static_cast<std::size_t>(b), (m >> (t * code.k + b)) & 1ULL);
        int w = 0;
        for (const auto& c : encode_sequence(code, msgs))
            w += static_cast<int>(c.popcount());
        ++rep.weight_counts[w];
        wmin = std::min(wmin, w);
    }
    rep.w_min = wmin;
    return rep;
}

// True iff for all d_o <= d <= d_max the delay-d codebook satisfies
// w_min(d) >= alpha*n*d and N_{w,d} <= 2^(theta_w * w) for every weight w.
inline bool check_anytime_distance(const ToeplitzCode& code, double alpha,
                                   double theta_w, int d_o, int d_max) {
    for (int d = d_o; d <= d_max; ++d) {
        const DistanceReport rep = weight_distribution(code, d);
        if (rep.w_min < alpha * code.n * d) return false;
        for (const auto& [w, count] : rep.weight_counts)
            if (std::log2(static_cast<double>(count)) > theta_w * w + 1e-12)
                return false;
    }
    return true;
}

// Plain-text serialization: header "n k p depth seed", then hex rows of each
// H block. Generator blocks are re-derived on load; round-trips are exact.
inline void save(const ToeplitzCode& code, std::ostream& os) {
    char pbuf[64];
    std::snprintf(pbuf, sizeof pbuf, "%.17g", code.p);
    os << code.n << ' ' << code.k << ' ' << pbuf << ' ' << code.depth << ' '
       << code.seed << '\n';
    for (const auto& h : code.H)
        for (std::size_t r = 0; r < h.rows(); ++r) os << h.row_hex(r) << '\n';
}

inline ToeplitzCode load(std::istream& is) {
    ToeplitzCode code;
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("code load: missing header");
    std::istringstream hdr(line);
    if (!(hdr >> code.n >> code.k >> code.p >> code.depth >> code.seed))
        throw std::invalid_argument("code load: malformed header");
    if (!(code.k > 0 && code.k < code.n && code.depth >= 1))
        throw std::invalid_argument("code load: invalid dimensions");
    code.nbar = code.n - code.k;
    for (int i = 0; i < code.depth; ++i) {
        gf2::BitMatrix h(static_cast<std::size_t>(code.nbar),
                         static_cast<std::size_t>(code.n));
        for (int r = 0; r < code.nbar; ++r) {
            if (!std::getline(is, line))
                throw std::invalid_argument("code load: truncated file");
            h.set_row_hex(static_cast<std::size_t>(r), line);
        }
        code.H.push_back(std::move(h));
    }
    code.G = derive_generator(code.H);
    code.build_caches();
    return code;
}

}  // namespace anytime::code
