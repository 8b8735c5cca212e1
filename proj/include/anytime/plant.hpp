#pragma once

#include <stdexcept>
#include <vector>

#include "anytime/smallmat.hpp"

// Plant descriptions in observer (block-)canonical form: the coefficient rows
// a_{i,1..l_i} determine the diagonal companion blocks, measurements read the
// leading coordinate of each block, and W/V bound the noise sup-norms (times
// two). Vector-measurement inputs must already be block-canonical.
namespace anytime::plant {

struct CanonicalPlant {
    // Signed coefficients of the monic block polynomials; one row per output.
    std::vector<std::vector<double>> blocks;
    smallmat::Mat F;  // m_x x m_x, block lower triangular canonical form
    smallmat::Mat G;  // m_x x m_u
    smallmat::Mat H;  // q x m_x, block-diagonal leading-coordinate rows
    smallmat::Mat K;  // m_u x m_x controller gain (u = -K x_hat)
    double W = 0.0;   // process-noise bound: |w_i| < W/2
    double V = 0.0;   // measurement-noise bound: |v_i| < V/2

    int m_x = 0;
    int q = 1;                     // number of measured outputs
    std::vector<int> block_sizes;  // l_i, sum = m_x

    // Index of the leading (measured) coordinate of each block.
    std::vector<int> leading_indices() const {
        std::vector<int> idx;
        int off = 0;
        for (int l : block_sizes) {
            idx.push_back(off);
            off += l;
        }
        return idx;
    }
};

// Scalar-measurement plant from companion coefficients a_1..a_m (signed).
inline CanonicalPlant plant_from_coeffs(const std::vector<double>& a,
                                        smallmat::Mat g, smallmat::Mat k,
                                        double w, double v) {
    CanonicalPlant p;
    p.blocks = {a};
    p.m_x = static_cast<int>(a.size());
    p.q = 1;
    p.block_sizes = {p.m_x};
    p.F = smallmat::companion_from_coeffs(a);
    p.H = smallmat::Mat(1, static_cast<std::size_t>(p.m_x));
    p.H(0, 0) = 1.0;
    p.G = std::move(g);
    p.K = std::move(k);
    p.W = w;
    p.V = v;
    if (p.G.rows() != static_cast<std::size_t>(p.m_x))
        throw std::invalid_argument("plant_from_coeffs: G row count");
    return p;
}

// Block-canonical plant. `couplings` optionally fills the strictly lower
// block triangle; diagonal blocks are companion forms of the given rows.
inline CanonicalPlant plant_from_blocks(
    const std::vector<std::vector<double>>& blocks, smallmat::Mat g,
    smallmat::Mat k, double w, double v,
    const smallmat::Mat* couplings = nullptr) {
    CanonicalPlant p;
    p.blocks = blocks;
    p.q = static_cast<int>(blocks.size());
    p.m_x = 0;
    for (const auto& b : blocks) {
        p.block_sizes.push_back(static_cast<int>(b.size()));
        p.m_x += static_cast<int>(b.size());
    }
    const auto sz = static_cast<std::size_t>(p.m_x);
    p.F = smallmat::Mat(sz, sz);
    p.H = smallmat::Mat(static_cast<std::size_t>(p.q), sz);
    int off = 0;
    for (int i = 0; i < p.q; ++i) {
        const auto& a = blocks[static_cast<std::size_t>(i)];
        const int l = static_cast<int>(a.size());
        for (int r = 0; r < l; ++r) {
            p.F(static_cast<std::size_t>(off + r), static_cast<std::size_t>(off)) =
                -a[static_cast<std::size_t>(r)];
            if (r + 1 < l)
                p.F(static_cast<std::size_t>(off + r),
                    static_cast<std::size_t>(off + r + 1)) = 1.0;
        }
        p.H(static_cast<std::size_t>(i), static_cast<std::size_t>(off)) = 1.0;
        off += l;
    }
    if (couplings) {
        // Only strictly-lower block positions may be populated.
        int roff = 0;
        for (int i = 0; i < p.q; ++i) {
            int coff = 0;
            for (int j = 0; j < p.q; ++j) {
                if (j > i) { coff += p.block_sizes[static_cast<std::size_t>(j)]; continue; }
                if (j < i) {
                    for (int r = 0; r < p.block_sizes[static_cast<std::size_t>(i)]; ++r)
                        for (int c = 0; c < p.block_sizes[static_cast<std::size_t>(j)]; ++c)
                            p.F(static_cast<std::size_t>(roff + r),
                                static_cast<std::size_t>(coff + c)) =
                                (*couplings)(static_cast<std::size_t>(roff + r),
                                             static_cast<std::size_t>(coff + c));
                }
                coff += p.block_sizes[static_cast<std::size_t>(j)];
            }
            roff += p.block_sizes[static_cast<std::size_t>(i)];
        }
    }
    p.G = std::move(g);
    p.K = std::move(k);
    p.W = w;
    p.V = v;
    return p;
}

}  // namespace anytime::plant
