#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "anytime/errors.hpp"

// Small dense real matrices (plant dimensions are single digits) plus the
// polynomial machinery needed for spectral radii: characteristic polynomial
// via Faddeev-LeVerrier and root finding via Durand-Kerner with Newton polish.
namespace anytime::smallmat {

using Vec = std::vector<double>;

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
    Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> vals)
        : rows_(rows), cols_(cols), a_(vals) {
        if (a_.size() != rows * cols)
            throw std::invalid_argument("Mat: initializer size mismatch");
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat::mul: shape");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }
    Vec operator*(const Vec& x) const {
        if (cols_ != x.size()) throw std::invalid_argument("Mat::mul: vec length");
        Vec r(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * x[j];
        return r;
    }
    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }
    Mat scaled(double s) const {
        Mat r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }
    Mat transpose() const {
        Mat r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    double trace() const {
        double t = 0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }
    double max_abs() const {
        double m = 0;
        for (auto v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec a_;
};

inline Mat abs_matrix(const Mat& m) {
    Mat r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = std::abs(m(i, j));
    return r;
}

// Gauss-Jordan inverse with partial pivoting. Throws on (near-)singular input.
inline Mat inverse(Mat m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
    const std::size_t n = m.rows();
    Mat inv = Mat::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(m(i, c)) > std::abs(m(piv, c))) piv = i;
        if (std::abs(m(piv, c)) < 1e-14)
            throw std::invalid_argument("inverse: singular matrix");
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(m(c, j), m(piv, j));
            std::swap(inv(c, j), inv(piv, j));
        }
        const double d = m(c, c);
        for (std::size_t j = 0; j < n; ++j) { m(c, j) /= d; inv(c, j) /= d; }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = m(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) -= f * m(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

inline Vec solve(const Mat& a, const Vec& b) {
    Mat inv = inverse(a);
    return inv * b;
}

// Monic characteristic polynomial coefficients (c_1..c_n) of a square matrix:
// det(zI - M) = z^n + c_1 z^{n-1} + ... + c_n. Faddeev-LeVerrier recursion.
inline Vec char_poly(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("char_poly: not square");
    const std::size_t n = m.rows();
    Vec c(n, 0.0);
    Mat mk = m;  // M * B_{k-1}, with B_0 = I
    for (std::size_t k = 1; k <= n; ++k) {
        c[k - 1] = -mk.trace() / static_cast<double>(k);
        if (k == n) break;
        Mat bk = mk;
        for (std::size_t i = 0; i < n; ++i) bk(i, i) += c[k - 1];
        mk = m * bk;
    }
    return c;
}

// All roots of the monic polynomial z^n + c_1 z^{n-1} + ... + c_n.
// Durand-Kerner iteration followed by a few Newton steps per root.
inline std::vector<std::complex<double>> poly_roots(const Vec& coeffs) {
    using cd = std::complex<double>;
    const std::size_t n = coeffs.size();
    if (n == 0) return {};
    auto eval = [&](cd z) {
        cd p(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) p = p * z + coeffs[i];
        return p;
    };
    auto eval_d = [&](cd z) {
        cd p(1.0, 0.0), dp(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            dp = dp * z + p;
            p = p * z + coeffs[i];
        }
        return std::make_pair(p, dp);
    };
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        radius = std::max(radius, std::pow(std::abs(coeffs[i]), 1.0 / (i + 1)));
    radius = std::max(1.0, 2.0 * radius);

    std::vector<cd> r(n);
    const cd seed(0.4, 0.9);
    cd acc(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        acc *= seed;
        r[i] = radius * acc / std::abs(acc) * (0.3 + 0.7 * (i + 1.0) / n);
    }

    for (int iter = 0; iter < 2000; ++iter) {
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (r[i] - r[j]);
            if (std::abs(denom) < 1e-300) { denom = cd(1e-300, 0.0); }
            const cd step = eval(r[i]) / denom;
            r[i] -= step;
            delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-14 * radius) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (int it = 0; it < 30; ++it) {
            auto [p, dp] = eval_d(r[i]);
            if (std::abs(dp) < 1e-300) break;
            const cd step = p / dp;
            r[i] -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(r[i]))) break;
        }
    }
    // Residual guard: |p(r)| relative to the largest term magnitude.
    for (const auto& root : r) {
        const double ar = std::abs(root);
        double scale = std::pow(ar, static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            scale = std::max(scale, std::abs(coeffs[i]) *
                                        std::pow(ar, static_cast<double>(n - 1 - i)));
        if (std::abs(eval(root)) > 1e-6 * std::max(1.0, scale))
            throw std::runtime_error("poly_roots: iteration did not converge");
    }
    return r;
}

inline double max_root_magnitude(const Vec& coeffs) {
    double m = 0.0;
    for (const auto& z : poly_roots(coeffs)) m = std::max(m, std::abs(z));
    return m;
}

// Spectral radius via characteristic-polynomial roots. For every input it
// also checks rho(M) <= rho(|M|), which holds for all real matrices.
inline double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: not square");
    if (m.rows() == 0) return 0.0;
    const double rho = max_root_magnitude(char_poly(m));
    bool nonneg = true;
    for (std::size_t i = 0; i < m.rows() && nonneg; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) < 0.0) { nonneg = false; break; }
    if (!nonneg) {
        const double rho_abs = max_root_magnitude(char_poly(abs_matrix(m)));
        if (rho > rho_abs * (1.0 + 1e-8) + 1e-12)
            throw internal_corruption_error(
                "spectral_radius: rho(M) > rho(|M|), numerical failure");
    }
    return rho;
}

// Observer canonical-form companion matrix for the monic polynomial
// z^m + a_1 z^{m-1} + ... + a_m: first column -a_i, ones above the diagonal.
inline Mat companion_from_coeffs(const Vec& a) {
    const std::size_t m = a.size();
    Mat f(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        f(i, 0) = -a[i];
        if (i + 1 < m) f(i, i + 1) = 1.0;
    }
    return f;
}

// Monic coefficients of prod_i (z - r_i) for real roots r_i.
inline Vec poly_from_real_roots(const Vec& roots) {
    Vec c{};  // coefficients a_1..a_k so far (degree k poly)
    for (double r : roots) {
        Vec nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) nc[i] += c[i];
        nc[0] -= r;
        for (std::size_t i = 0; i < c.size(); ++i) nc[i + 1] -= r * c[i];
        c = std::move(nc);
    }
    return c;
}

inline double norm2(const Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
inline double norm_inf(const Vec& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace anytime::smallmat
