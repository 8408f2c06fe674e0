#include "qproc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qproc/error.hpp"
#include "qproc/kernels.hpp"

namespace qproc {

namespace {

std::vector<std::size_t> dims_of(const LabelList &labels) {
    std::vector<std::size_t> dims;
    dims.reserve(labels.size());
    for (const auto &l : labels) {
        dims.push_back(static_cast<std::size_t>(l.dim));
    }
    return dims;
}

std::vector<char> mask_of(const LabeledOperator &a, const LabelList &over) {
    std::vector<char> mask(a.rank(), 0);
    for (const auto &l : over) {
        auto pos = a.position(l);
        if (!pos) {
            throw Error(ErrorCode::LabelNotFound, to_string(l) + " not in " + to_string(a.labels()));
        }
        mask[*pos] = 1;
    }
    return mask;
}

double safe_log2(double x) {
    return std::log2(x);
}

}  // namespace

LabeledOperator tensor_product(const LabeledOperator &a, const LabeledOperator &b) {
    LabelList labels = a.labels();
    for (const auto &l : b.labels()) {
        if (a.has_label(l)) {
            throw Error(ErrorCode::DuplicateLabel, "tensor_product operands share " + to_string(l));
        }
        labels.push_back(l);
    }
    return LabeledOperator(std::move(labels), kernels::omp::kron(a.matrix(), b.matrix()));
}

LabeledOperator partial_trace(const LabeledOperator &a, const LabelList &over) {
    auto mask = mask_of(a, over);
    LabelList kept;
    for (std::size_t i = 0; i < a.rank(); ++i) {
        if (!mask[i]) {
            kept.push_back(a.labels()[i]);
        }
    }
    if (over.empty()) {
        return a;
    }
    auto dims = dims_of(a.labels());
    return LabeledOperator(std::move(kept), kernels::omp::partial_trace(a.matrix(), dims, mask));
}

LabeledOperator partial_transpose(const LabeledOperator &a, const LabelList &over) {
    auto mask = mask_of(a, over);
    if (over.empty()) {
        return a;
    }
    auto dims = dims_of(a.labels());
    return LabeledOperator(a.labels(), kernels::omp::partial_transpose(a.matrix(), dims, mask));
}

LabeledOperator permute(const LabeledOperator &a, const LabelList &order) {
    if (order.size() != a.rank()) {
        throw Error(ErrorCode::BadPermutation, to_string(order) + " is not a permutation of " + to_string(a.labels()));
    }
    std::vector<std::size_t> perm;
    perm.reserve(order.size());
    std::set<std::size_t> used;
    for (const auto &l : order) {
        auto pos = a.position(l);
        if (!pos || !used.insert(*pos).second) {
            throw Error(ErrorCode::BadPermutation,
                        to_string(order) + " is not a permutation of " + to_string(a.labels()));
        }
        perm.push_back(*pos);
    }
    if (order == a.labels()) {
        return a;
    }
    auto dims = dims_of(a.labels());
    return LabeledOperator(order, kernels::omp::permute(a.matrix(), dims, perm));
}

LabeledOperator permute_like(const LabeledOperator &a, const LabeledOperator &like) {
    return permute(a, like.labels());
}

double hermiticity_defect(const Matrix &a) {
    return (a - a.adjoint()).norm();
}

bool is_hermitian(const Matrix &a, const Tolerances &tol) {
    return hermiticity_defect(a) <= tol.hermiticity * std::max(a.norm(), 1e-300);
}

EigenSystem hermitian_eigen(const Matrix &a, const Tolerances &tol) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "hermitian_eigen needs a square matrix");
    }
    if (!is_hermitian(a, tol) && a.norm() > 0.0) {
        throw Error(ErrorCode::NotHermitian, "||a - a^dag||_F = " + std::to_string(hermiticity_defect(a)) +
                                                 " exceeds tolerance relative to ||a||_F = " +
                                                 std::to_string(a.norm()));
    }
    Matrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem hermitian_eigen(const LabeledOperator &a, const Tolerances &tol) {
    return hermitian_eigen(a.matrix(), tol);
}

double frobenius_norm(const LabeledOperator &a) {
    return a.matrix().norm();
}

double min_eigenvalue(const LabeledOperator &a, const Tolerances &tol) {
    return hermitian_eigen(a, tol).values(0);
}

bool is_psd(const LabeledOperator &a, const Tolerances &tol) {
    if (!is_hermitian(a.matrix(), tol)) {
        return false;
    }
    auto es = hermitian_eigen(a, tol);
    const double lmax = std::max(es.values(es.values.size() - 1), 0.0);
    return es.values(0) >= -tol.psd * lmax;
}

double trace_norm(const Matrix &a) {
    if (a.size() == 0) {
        return 0.0;
    }
    if (is_hermitian(a, Tolerances{.hermiticity = 1e-14})) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().sum();
    }
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double trace_norm(const LabeledOperator &a) {
    return trace_norm(a.matrix());
}

double trace_distance(const LabeledOperator &a, const LabeledOperator &b) {
    return trace_norm(a - b);
}

double relative_entropy(const LabeledOperator &a, const LabeledOperator &b, const Tolerances &tol) {
    if (std::multiset<SpaceLabel>(a.labels().begin(), a.labels().end()) !=
        std::multiset<SpaceLabel>(b.labels().begin(), b.labels().end())) {
        throw Error(ErrorCode::LabelMismatch, to_string(a.labels()) + " vs " + to_string(b.labels()));
    }
    const LabeledOperator bb = permute_like(b, a);
    if (a.matrix() == bb.matrix()) {
        return 0.0;
    }
    auto ea = hermitian_eigen(a, tol);
    auto eb = hermitian_eigen(bb, tol);
    const double amax = std::max(ea.values.maxCoeff(), 0.0);
    const double bmax = std::max(eb.values.maxCoeff(), 0.0);
    if (ea.values(0) < -tol.psd * amax) {
        throw Error(ErrorCode::NotPSD, "relative_entropy first argument has eigenvalue " +
                                           std::to_string(ea.values(0)));
    }
    if (eb.values(0) < -tol.psd * bmax) {
        throw Error(ErrorCode::NotPSD, "relative_entropy second argument has eigenvalue " +
                                           std::to_string(eb.values(0)));
    }
    const double acut = tol.spectral_cutoff * amax;
    const double bcut = tol.spectral_cutoff * bmax;

    double a_log_a = 0.0;
    for (Eigen::Index i = 0; i < ea.values.size(); ++i) {
        const double l = ea.values(i);
        if (l > acut) {
            a_log_a += l * safe_log2(l);
        }
    }
    // Diagonal of a in the eigenbasis of b.
    Eigen::VectorXd w = (eb.vectors.adjoint() * a.matrix() * eb.vectors).diagonal().real();
    double leak = 0.0;
    double a_log_b = 0.0;
    for (Eigen::Index j = 0; j < eb.values.size(); ++j) {
        if (eb.values(j) > bcut) {
            a_log_b += w(j) * safe_log2(eb.values(j));
        } else {
            leak += w(j);
        }
    }
    if (leak > tol.psd * std::max(amax, 1e-300)) {
        return kInfinity;
    }
    double s = a_log_a - a_log_b;
    // Klein: equal traces give s >= 0; clip eigensolver round-off only.
    const double ta = a.trace().real(), tb = bb.trace().real();
    if (std::abs(ta - tb) <= 1e-12 * std::max(std::abs(ta), 1.0) && s < 0.0 && s > -1e-12) {
        s = 0.0;
    }
    return s;
}

LabeledOperator pseudo_inverse_sqrt(const LabeledOperator &a, const Tolerances &tol) {
    auto es = hermitian_eigen(a, tol);
    const double lmax = std::max(es.values.maxCoeff(), 0.0);
    if (es.values(0) < -tol.psd * lmax) {
        throw Error(ErrorCode::NotPSD, "pseudo_inverse_sqrt of operator with eigenvalue " +
                                           std::to_string(es.values(0)));
    }
    Eigen::VectorXd f = es.values.unaryExpr([&](double l) { return l > tol.spectral_cutoff * lmax ? 1.0 / std::sqrt(l) : 0.0; });
    return LabeledOperator(a.labels(), es.vectors * f.cast<cdouble>().asDiagonal() * es.vectors.adjoint());
}

LabeledOperator psd_sqrt(const LabeledOperator &a, const Tolerances &tol) {
    auto es = hermitian_eigen(a, tol);
    const double lmax = std::max(es.values.maxCoeff(), 0.0);
    if (es.values(0) < -tol.psd * lmax) {
        throw Error(ErrorCode::NotPSD, "psd_sqrt of operator with eigenvalue " + std::to_string(es.values(0)));
    }
    Eigen::VectorXd f = es.values.unaryExpr([](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
    return LabeledOperator(a.labels(), es.vectors * f.cast<cdouble>().asDiagonal() * es.vectors.adjoint());
}

LabeledOperator support_projector(const LabeledOperator &a, const Tolerances &tol) {
    auto es = hermitian_eigen(a, tol);
    const double lmax = std::max(es.values.maxCoeff(), 0.0);
    Eigen::VectorXd f = es.values.unaryExpr([&](double l) { return l > tol.spectral_cutoff * lmax ? 1.0 : 0.0; });
    return LabeledOperator(a.labels(), es.vectors * f.cast<cdouble>().asDiagonal() * es.vectors.adjoint());
}

}  // namespace qproc
