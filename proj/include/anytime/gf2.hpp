#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anytime/errors.hpp"

// Dense GF(2) linear algebra: packed bit vectors/matrices with rank, reduced
// row echelon form, linear-system solving and left annihilators. Pivoting is
// deterministic (lowest index first) so every derived object is reproducible.
namespace anytime::gf2 {

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_(words(n), 0) {}

    static std::size_t words(std::size_t n) { return (n + 63) / 64; }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(std::size_t i, bool v) {
        const std::uint64_t m = 1ULL << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= 1ULL << (i & 63); }

    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    void xor_with(const BitVec& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const {
        for (auto w : w_) if (w) return true;
        return false;
    }

    // Visits the index of every set bit in increasing order.
    template <typename F>
    void for_each_set(F&& f) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t w = w_[wi];
            while (w) {
                const int b = std::countr_zero(w);
                f(wi * 64 + static_cast<std::size_t>(b));
                w &= w - 1;
            }
        }
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.n_ == b.n_ && a.w_ == b.w_;
    }

    const std::vector<std::uint64_t>& raw() const { return w_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_(BitVec::words(cols)), data_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    // Entries i.i.d. Bernoulli(p) from the given engine, row-major order.
    static BitMatrix random(std::size_t rows, std::size_t cols, double p,
                            std::mt19937_64& rng) {
        BitMatrix m(rows, cols);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                if (u(rng) < p) m.set(i, j, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t i, std::size_t j) const {
        return (data_[i * wpr_ + (j >> 6)] >> (j & 63)) & 1ULL;
    }
    void set(std::size_t i, std::size_t j, bool v) {
        const std::uint64_t m = 1ULL << (j & 63);
        if (v) data_[i * wpr_ + (j >> 6)] |= m;
        else data_[i * wpr_ + (j >> 6)] &= ~m;
    }

    void xor_row_into(std::size_t src, std::size_t dst) {
        const std::uint64_t* s = &data_[src * wpr_];
        std::uint64_t* d = &data_[dst * wpr_];
        for (std::size_t w = 0; w < wpr_; ++w) d[w] ^= s[w];
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < wpr_; ++w)
            std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
    }

    bool row_is_zero(std::size_t i) const {
        for (std::size_t w = 0; w < wpr_; ++w)
            if (data_[i * wpr_ + w]) return false;
        return true;
    }
    std::size_t row_popcount(std::size_t i) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < wpr_; ++w)
            c += static_cast<std::size_t>(std::popcount(data_[i * wpr_ + w]));
        return c;
    }

    BitVec row(std::size_t i) const {
        BitVec v(cols_);
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j)) v.set(j, true);
        return v;
    }
    BitVec col(std::size_t j) const {
        BitVec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (get(i, j)) v.set(i, true);
        return v;
    }

    BitMatrix mul(const BitMatrix& other) const {
        if (cols_ != other.rows_)
            throw std::invalid_argument("BitMatrix::mul: dimension mismatch");
        BitMatrix out(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t kk = 0; kk < cols_; ++kk) {
                if (!get(i, kk)) continue;
                const std::uint64_t* s = &other.data_[kk * other.wpr_];
                std::uint64_t* d = &out.data_[i * out.wpr_];
                for (std::size_t w = 0; w < out.wpr_; ++w) d[w] ^= s[w];
            }
        }
        return out;
    }

    BitVec mul(const BitVec& x) const {
        if (cols_ != x.size())
            throw std::invalid_argument("BitMatrix::mul: vector length mismatch");
        BitVec out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::uint64_t acc = 0;
            const std::uint64_t* r = &data_[i * wpr_];
            const auto& xw = x.raw();
            for (std::size_t w = 0; w < wpr_; ++w) acc ^= r[w] & xw[w];
            out.set(i, std::popcount(acc) & 1);
        }
        return out;
    }

    BitMatrix transpose() const {
        BitMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (get(i, j)) out.set(j, i, true);
        return out;
    }

    bool is_zero() const {
        for (auto w : data_) if (w) return false;
        return true;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    // Hex encoding of one row, 4 columns per digit, column 0 in the high bit
    // of the first digit. Used by the plain-text code file format.
    std::string row_hex(std::size_t i) const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        s.reserve((cols_ + 3) / 4);
        for (std::size_t j = 0; j < cols_; j += 4) {
            int d = 0;
            for (std::size_t b = 0; b < 4 && j + b < cols_; ++b)
                if (get(i, j + b)) d |= 1 << (3 - b);
            s.push_back(digits[d]);
        }
        return s;
    }
    void set_row_hex(std::size_t i, const std::string& s) {
        if (s.size() != (cols_ + 3) / 4)
            throw std::invalid_argument("BitMatrix::set_row_hex: bad length");
        for (std::size_t j = 0; j < cols_; ++j) {
            const char c = s[j / 4];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else throw std::invalid_argument("BitMatrix::set_row_hex: bad digit");
            set(i, j, (d >> (3 - (j % 4))) & 1);
        }
    }

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> data_;
};

struct Echelon {
    BitMatrix mat;                    // reduced row echelon form
    std::vector<std::size_t> pivots;  // strictly increasing pivot columns
    std::size_t rank = 0;
    std::size_t row_ops = 0;          // row-xor count, for complexity accounting
};

// Reduced row echelon form with lowest-index pivoting. `limit_cols` restricts
// pivot selection to the leading columns (used for augmented systems).
inline Echelon row_echelon(BitMatrix m, std::size_t limit_cols = SIZE_MAX) {
    Echelon e;
    const std::size_t rows = m.rows();
    const std::size_t pcols = std::min(m.cols(), limit_cols);
    std::size_t r = 0;
    for (std::size_t c = 0; c < pcols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m.get(i, c)) { piv = i; break; }
        if (piv == rows) continue;
        m.swap_rows(r, piv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r && m.get(i, c)) {
                m.xor_row_into(r, i);
                ++e.row_ops;
            }
        }
        e.pivots.push_back(c);
        ++r;
    }
    e.rank = r;
    e.mat = std::move(m);
    return e;
}

inline std::size_t rank(const BitMatrix& m) { return row_echelon(m).rank; }

enum class SolveKind { Unique, Underdetermined, Inconsistent };

struct Solution {
    SolveKind kind = SolveKind::Inconsistent;
    BitVec x;                        // particular solution, free variables = 0
    std::vector<BitVec> null_basis;  // canonical basis of null(A)
};

// Solves A x = b over GF(2). Canonical representative: free variables zero.
inline Solution solve(const BitMatrix& a, const BitVec& b) {
    if (a.rows() != b.size())
        throw std::invalid_argument("gf2::solve: rhs length mismatch");
    const std::size_t n = a.cols();
    BitMatrix aug(a.rows(), n + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (a.get(i, j)) aug.set(i, j, true);
        if (b.get(i)) aug.set(i, n, true);
    }
    Echelon e = row_echelon(std::move(aug), n);

    Solution s;
    for (std::size_t i = e.rank; i < a.rows(); ++i)
        if (e.mat.get(i, n)) { s.kind = SolveKind::Inconsistent; return s; }

    s.x = BitVec(n);
    for (std::size_t pi = 0; pi < e.pivots.size(); ++pi)
        s.x.set(e.pivots[pi], e.mat.get(pi, n));

    std::vector<bool> is_pivot(n, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        BitVec v(n);
        v.set(f, true);
        for (std::size_t pi = 0; pi < e.pivots.size(); ++pi)
            if (e.mat.get(pi, f)) v.set(e.pivots[pi], true);
        s.null_basis.push_back(std::move(v));
    }
    s.kind = s.null_basis.empty() ? SolveKind::Unique : SolveKind::Underdetermined;
    return s;
}

// Returns N with N*M = 0, rows(N) = rows(M) - rank(M), rank(N) = rows(N);
// the rows of N span the left null space of M.
inline BitMatrix left_annihilator(const BitMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    BitMatrix aug(rows, cols + rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j)
            if (m.get(i, j)) aug.set(i, j, true);
        aug.set(i, cols + i, true);
    }
    Echelon e = row_echelon(std::move(aug), cols);
    BitMatrix out(rows - e.rank, rows);
    for (std::size_t i = e.rank; i < rows; ++i)
        for (std::size_t j = 0; j < rows; ++j)
            if (e.mat.get(i, cols + j)) out.set(i - e.rank, j, true);
    return out;
}

}  // namespace anytime::gf2
