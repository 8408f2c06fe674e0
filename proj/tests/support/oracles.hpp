#pragma once

// Independent reference computations for tests. Nothing here calls the library's tensor code:
// indices are decoded digit by digit and spectra come straight from Eigen.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;

inline std::vector<int> digits(long idx, const std::vector<int> &dims) {
    std::vector<int> out(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = static_cast<int>(idx % dims[k]);
        idx /= dims[k];
    }
    return out;
}

inline long index_of(const std::vector<int> &d, const std::vector<int> &dims) {
    long idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        idx = idx * dims[k] + d[k];
    }
    return idx;
}

inline Matrix partial_transpose(const Matrix &m, const std::vector<int> &dims, const std::vector<bool> &mask) {
    Matrix out(m.rows(), m.cols());
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c) {
            auto dr = digits(r, dims);
            auto dc = digits(c, dims);
            for (std::size_t k = 0; k < dims.size(); ++k) {
                if (mask[k]) {
                    std::swap(dr[k], dc[k]);
                }
            }
            out(index_of(dr, dims), index_of(dc, dims)) = m(r, c);
        }
    }
    return out;
}

inline Matrix partial_trace(const Matrix &m, const std::vector<int> &dims, const std::vector<bool> &traced) {
    std::vector<int> kept;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!traced[k]) {
            kept.push_back(dims[k]);
        }
    }
    long side = 1;
    for (int d : kept) {
        side *= d;
    }
    Matrix out = Matrix::Zero(side, side);
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c) {
            const auto dr = digits(r, dims);
            const auto dc = digits(c, dims);
            bool diag = true;
            std::vector<int> kr;
            std::vector<int> kc;
            for (std::size_t k = 0; k < dims.size(); ++k) {
                if (traced[k]) {
                    diag = diag && dr[k] == dc[k];
                } else {
                    kr.push_back(dr[k]);
                    kc.push_back(dc[k]);
                }
            }
            if (diag) {
                out(index_of(kr, kept), index_of(kc, kept)) += m(r, c);
            }
        }
    }
    return out;
}

inline Eigen::VectorXd eigenvalues(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix &m) {
    return eigenvalues(m).minCoeff();
}

inline double trace_norm(const Matrix &m) {
    return eigenvalues(m).cwiseAbs().sum();
}

// S(a || b) in bits, log taken on the support of b; assumes supp(a) is inside supp(b).
inline double relative_entropy_bits(const Matrix &a, const Matrix &b) {
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a);
    Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
    double s = 0.0;
    for (long i = 0; i < ea.eigenvalues().size(); ++i) {
        const double l = ea.eigenvalues()(i);
        if (l > 1e-14) {
            s += l * std::log2(l);
        }
    }
    Eigen::VectorXd logb(eb.eigenvalues().size());
    for (long i = 0; i < logb.size(); ++i) {
        const double l = eb.eigenvalues()(i);
        logb(i) = l > 1e-14 ? std::log2(l) : 0.0;
    }
    const Matrix logm = eb.eigenvectors() * logb.cast<std::complex<double>>().asDiagonal() * eb.eigenvectors().adjoint();
    s -= (a * logm).trace().real();
    return s;
}

inline Matrix ket_bra(const Eigen::VectorXcd &v) {
    return v * v.adjoint();
}

}  // namespace oracle
