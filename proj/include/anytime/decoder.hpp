#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "anytime/channel.hpp"
#include "anytime/code.hpp"
#include "anytime/errors.hpp"
#include "anytime/gf2.hpp"

// Online ML erasure decoding. Each step ingests one instant of channel
// output, folds the unerased bits into per-instant syndrome accumulators and
// re-eliminates the active system over the still-pending erased bits. The
// partition sweep over candidate delays collapses into one elimination: a
// pending bit is determined exactly when its pivot row is a singleton, and
// the surviving delay is the oldest undetermined unknown. Resolution is
// write-once; over an erasure channel a resolved bit can never be wrong.
//
// Feedback truncation: the decoder periodically reports a cutoff (delivered
// to the encoder after a fixed latency) and mirrors the schedule itself.
// Internally it decodes a virtual untruncated codeword v = c + legacy, where
// legacy is the contribution of dropped messages; those are always resolved
// before they are dropped, so v is computable and satisfies every parity row.
namespace anytime::decode {

struct FeedbackScheme {
    std::int64_t period = 0;   // 2T; 0 disables feedback
    std::int64_t latency = 0;  // T, steps until the encoder applies the cutoff
};

struct ResolvedBit {
    std::int64_t t;
    int pos;
    bool value;  // codeword bit (after legacy correction)
};

struct StepOutcome {
    std::int64_t t = 0;  // instants ingested so far
    int erasures = 0;
    std::int64_t earliest_unresolved_delay = 0;  // 0 when fully resolved
    std::vector<ResolvedBit> newly_resolved;
    std::int64_t message_prefix = 0;  // instants with resolved messages
    std::optional<std::int64_t> feedback_cutoff;
    std::uint64_t elimination_ops = 0;  // row-xor count this step
};

class Decoder {
public:
    explicit Decoder(const code::ToeplitzCode& c, FeedbackScheme fb = {})
        : code_(&c), fb_(fb) {}

    std::int64_t time() const { return t_; }
    std::int64_t earliest_pending() const { return earliest_pending_; }
    std::int64_t message_prefix() const {
        return static_cast<std::int64_t>(messages_.size());
    }
    const std::vector<gf2::BitVec>& messages() const { return messages_; }
    std::uint64_t total_elimination_ops() const { return total_ops_; }

    bool bit_known(std::int64_t t, int pos) const {
        return instants_[static_cast<std::size_t>(t)].known.get(
            static_cast<std::size_t>(pos));
    }
    // Transmitted-codeword bit value (legacy correction undone).
    bool codeword_bit(std::int64_t t, int pos) const {
        const auto& inst = instants_[static_cast<std::size_t>(t)];
        return inst.v.get(static_cast<std::size_t>(pos)) ^
               inst.legacy.get(static_cast<std::size_t>(pos));
    }

    StepOutcome step(const std::vector<channel::ErasureSymbol>& z) {
        const int n = code_->n;
        const int nbar = code_->nbar;
        if (static_cast<int>(z.size()) != n)
            throw std::invalid_argument("Decoder::step: expected n symbols");
        if (t_ >= code_->depth)
            throw std::invalid_argument(
                "Decoder::step: horizon exceeds code depth");

        const std::int64_t tau = t_;
        StepOutcome out;

        // Cutoff in effect for this instant's encoding.
        while (next_activation_ < schedule_.size() &&
               schedule_[next_activation_].first <= tau)
            applied_cutoff_ = schedule_[next_activation_++].second;

        Instant inst;
        inst.v = gf2::BitVec(static_cast<std::size_t>(n));
        inst.known = gf2::BitVec(static_cast<std::size_t>(n));
        inst.legacy = gf2::BitVec(static_cast<std::size_t>(n));
        inst.acc = gf2::BitVec(static_cast<std::size_t>(nbar));

        for (std::int64_t j = 0; j < applied_cutoff_; ++j) {
            const auto& cols = code_->Gcol[static_cast<std::size_t>(tau - j)];
            messages_[static_cast<std::size_t>(j)].for_each_set(
                [&](std::size_t bit) { inst.legacy.xor_with(cols[bit]); });
        }

        for (int pos = 0; pos < n; ++pos) {
            if (z[static_cast<std::size_t>(pos)] == channel::ErasureSymbol::Erased) {
                ++inst.pending;
                ++out.erasures;
            } else {
                const bool bit =
                    z[static_cast<std::size_t>(pos)] == channel::ErasureSymbol::One;
                inst.known.set(static_cast<std::size_t>(pos), true);
                inst.v.set(static_cast<std::size_t>(pos),
                           bit ^ inst.legacy.get(static_cast<std::size_t>(pos)));
            }
        }
        instants_.push_back(std::move(inst));

        // Syndrome accumulator for this row block: contributions of every
        // currently known v bit in the window.
        auto& acc = instants_.back().acc;
        for (std::int64_t tp = 0; tp <= tau; ++tp) {
            const auto& cols = code_->Hcol[static_cast<std::size_t>(tau - tp)];
            instants_[static_cast<std::size_t>(tp)].v.for_each_set(
                [&](std::size_t bit) { acc.xor_with(cols[bit]); });
        }

        ++t_;

        if (earliest_pending_ < t_) eliminate(out);

        while (earliest_pending_ < t_ &&
               instants_[static_cast<std::size_t>(earliest_pending_)].pending == 0)
            ++earliest_pending_;

        resolve_messages();

        if (fb_.period > 0 && t_ % fb_.period == 0) {
            const std::int64_t cutoff = earliest_pending_ - 1;
            if (cutoff >= 1 && cutoff > last_emitted_cutoff_) {
                last_emitted_cutoff_ = cutoff;
                schedule_.emplace_back(t_ + fb_.latency, cutoff);
                out.feedback_cutoff = cutoff;
            }
        }

        out.t = t_;
        out.earliest_unresolved_delay = t_ - earliest_pending_;
        out.message_prefix = message_prefix();
        total_ops_ += out.elimination_ops;
        return out;
    }

private:
    struct Instant {
        gf2::BitVec v;       // virtual codeword bits (zero where pending)
        gf2::BitVec known;   // per-bit known mask
        gf2::BitVec legacy;  // dropped-message contribution at this instant
        gf2::BitVec acc;     // row-block syndrome over known v bits
        int pending = 0;
    };

    void eliminate(StepOutcome& out) {
        const int n = code_->n;
        const int nbar = code_->nbar;
        const std::int64_t ep = earliest_pending_;
        const std::int64_t span = t_ - ep;

        std::vector<std::pair<std::int64_t, int>> unknowns;
        for (std::int64_t tp = ep; tp < t_; ++tp) {
            const auto& inst = instants_[static_cast<std::size_t>(tp)];
            if (inst.pending == 0) continue;
            for (int pos = 0; pos < n; ++pos)
                if (!inst.known.get(static_cast<std::size_t>(pos)))
                    unknowns.emplace_back(tp, pos);
        }
        const std::size_t u = unknowns.size();
        if (u == 0) return;

        gf2::BitMatrix sys(static_cast<std::size_t>(span * nbar), u + 1);
        for (std::int64_t tr = ep; tr < t_; ++tr) {
            const std::size_t base =
                static_cast<std::size_t>((tr - ep) * nbar);
            for (std::size_t ui = 0; ui < u; ++ui) {
                const auto [tu, pos] = unknowns[ui];
                if (tu > tr) break;  // unknowns sorted by time
                code_->Hcol[static_cast<std::size_t>(tr - tu)]
                          [static_cast<std::size_t>(pos)]
                    .for_each_set([&](std::size_t r) { sys.set(base + r, ui, true); });
            }
            instants_[static_cast<std::size_t>(tr)].acc.for_each_set(
                [&](std::size_t r) { sys.set(base + r, u, true); });
        }

        gf2::Echelon ech = gf2::row_echelon(std::move(sys), u);
        out.elimination_ops += ech.row_ops;

        for (std::size_t i = ech.rank; i < ech.mat.rows(); ++i)
            if (ech.mat.get(i, u))
                throw internal_corruption_error(
                    "Decoder: inconsistent erasure system");

        // A pivot unknown is determined iff its row involves no other unknown.
        std::vector<char> determined(u, 0);
        std::vector<char> value(u, 0);
        std::vector<std::size_t> pivot_of(u, SIZE_MAX);
        for (std::size_t pi = 0; pi < ech.pivots.size(); ++pi)
            pivot_of[ech.pivots[pi]] = pi;
        for (std::size_t ui = 0; ui < u; ++ui) {
            const std::size_t pi = pivot_of[ui];
            if (pi == SIZE_MAX) continue;
            const bool rhs = ech.mat.get(pi, u);
            if (ech.mat.row_popcount(pi) - (rhs ? 1u : 0u) == 1u) {
                determined[ui] = 1;
                value[ui] = rhs ? 1 : 0;
            }
        }

        std::int64_t surviving_delay = 0;
        for (std::size_t ui = 0; ui < u; ++ui)
            if (!determined[ui])
                surviving_delay =
                    std::max(surviving_delay, t_ - unknowns[ui].first);

        for (std::size_t ui = 0; ui < u; ++ui) {
            const auto [tu, pos] = unknowns[ui];
            if (t_ - tu <= surviving_delay) continue;
            apply_resolution(tu, pos, value[ui] != 0);
            out.newly_resolved.push_back(
                {tu, pos, codeword_bit(tu, pos)});
        }
    }

    void apply_resolution(std::int64_t tu, int pos, bool v) {
        auto& inst = instants_[static_cast<std::size_t>(tu)];
        if (inst.known.get(static_cast<std::size_t>(pos)))
            throw internal_corruption_error("Decoder: write-once violation");
        inst.known.set(static_cast<std::size_t>(pos), true);
        inst.v.set(static_cast<std::size_t>(pos), v);
        --inst.pending;
        if (v) {
            for (std::int64_t tr = tu; tr < t_; ++tr)
                instants_[static_cast<std::size_t>(tr)].acc.xor_with(
                    code_->Hcol[static_cast<std::size_t>(tr - tu)]
                               [static_cast<std::size_t>(pos)]);
        }
    }

    // Inverts the code map on the fully-known prefix by back-substitution:
    // G_1 b_t = v_t - sum_{i>=2} G_i b_{t-i+1}, via the cached left inverse.
    void resolve_messages() {
        while (message_prefix() < earliest_pending_) {
            const std::int64_t tm = message_prefix();
            gf2::BitVec rhs = instants_[static_cast<std::size_t>(tm)].v;
            for (std::int64_t j = 0; j < tm; ++j) {
                const auto& cols = code_->Gcol[static_cast<std::size_t>(tm - j)];
                messages_[static_cast<std::size_t>(j)].for_each_set(
                    [&](std::size_t bit) { rhs.xor_with(cols[bit]); });
            }
            messages_.push_back(code_->g1_left_inv.mul(rhs));
        }
    }

    const code::ToeplitzCode* code_;
    FeedbackScheme fb_;
    std::vector<Instant> instants_;
    std::vector<gf2::BitVec> messages_;
    std::int64_t t_ = 0;
    std::int64_t earliest_pending_ = 0;
    std::int64_t applied_cutoff_ = 0;
    std::int64_t last_emitted_cutoff_ = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> schedule_;
    std::size_t next_activation_ = 0;
    std::uint64_t total_ops_ = 0;
};

}  // namespace anytime::decode
