#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anytime/gf2.hpp"

// Memoryless erasure channel models (bit and packet granularity) plus the
// Bhattacharyya parameter and Shannon capacity used by the threshold math.
// BSC exists only as a parameter source; it has no transmit path here.
namespace anytime::channel {

enum class ErasureSymbol : std::uint8_t { Zero = 0, One = 1, Erased = 2 };

enum class Kind { BEC, BSC };

struct ChannelSpec {
    Kind kind = Kind::BEC;
    double epsilon = 0.0;  // erasure / crossover probability, in [0, 1)
    int packet_len = 1;    // bits per packet; 1 = bit mode

    void validate() const {
        if (epsilon < 0.0 || epsilon >= 1.0)
            throw std::invalid_argument("ChannelSpec: epsilon must be in [0,1)");
        if (packet_len < 1)
            throw std::invalid_argument("ChannelSpec: packet_len must be >= 1");
    }
};

// Parses "bec:0.3" or "bsc:0.05", with an optional ":L" packet suffix.
inline ChannelSpec parse_channel(const std::string& s) {
    ChannelSpec spec;
    const auto c1 = s.find(':');
    if (c1 == std::string::npos)
        throw std::invalid_argument("channel spec must look like bec:0.3");
    const std::string kind = s.substr(0, c1);
    if (kind == "bec" || kind == "BEC") spec.kind = Kind::BEC;
    else if (kind == "bsc" || kind == "BSC") spec.kind = Kind::BSC;
    else throw std::invalid_argument("unknown channel kind: " + kind);
    const auto c2 = s.find(':', c1 + 1);
    spec.epsilon = std::stod(s.substr(c1 + 1, c2 == std::string::npos
                                                   ? std::string::npos
                                                   : c2 - c1 - 1));
    if (c2 != std::string::npos) spec.packet_len = std::stoi(s.substr(c2 + 1));
    spec.validate();
    return spec;
}

// Each bit (or whole packet) is independently erased with probability epsilon;
// values pass through unaltered. Packet mode erases all-or-none within each
// block of packet_len consecutive bits.
inline std::vector<ErasureSymbol> transmit(const ChannelSpec& spec,
                                           const gf2::BitVec& c,
                                           std::mt19937_64& rng) {
    spec.validate();
    if (spec.kind != Kind::BEC)
        throw std::invalid_argument("transmit: only the BEC has a transmit path");
    const std::size_t n = c.size();
    if (spec.packet_len > 1 && n % static_cast<std::size_t>(spec.packet_len) != 0)
        throw std::invalid_argument("transmit: packet_len must divide n");
    std::vector<ErasureSymbol> out(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t l = static_cast<std::size_t>(spec.packet_len);
    for (std::size_t p = 0; p < n; p += l) {
        const bool erased = u(rng) < spec.epsilon;
        for (std::size_t j = p; j < p + l; ++j)
            out[j] = erased ? ErasureSymbol::Erased
                            : (c.get(j) ? ErasureSymbol::One : ErasureSymbol::Zero);
    }
    return out;
}

inline double binary_entropy_impl(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// zeta = sum_z sqrt(p(z|1) p(z|0)); epsilon for the BEC, 2 sqrt(eps(1-eps))
// for the BSC.
inline double bhattacharyya(const ChannelSpec& spec) {
    spec.validate();
    return spec.kind == Kind::BEC ? spec.epsilon
                                  : 2.0 * std::sqrt(spec.epsilon * (1.0 - spec.epsilon));
}

inline double capacity(const ChannelSpec& spec) {
    spec.validate();
    return spec.kind == Kind::BEC ? 1.0 - spec.epsilon
                                  : 1.0 - binary_entropy_impl(spec.epsilon);
}

}  // namespace anytime::channel
