#pragma once

#include <limits>
#include <vector>

#include "qproc/labeled_operator.hpp"
#include "qproc/tolerances.hpp"

namespace qproc {

/// Kronecker product; result labels are a.labels() ++ b.labels().
LabeledOperator tensor_product(const LabeledOperator &a, const LabeledOperator &b);

/// Traces out `over`; the remaining labels keep their relative order.
LabeledOperator partial_trace(const LabeledOperator &a, const LabelList &over);

/// Transposes only the indices carried by `over`.
LabeledOperator partial_transpose(const LabeledOperator &a, const LabelList &over);

/// Re-indexes `a` so that its labels appear in `order` (a permutation of a.labels()).
LabeledOperator permute(const LabeledOperator &a, const LabelList &order);

/// Reorders `a` to match the label order of `like` (same label set required).
LabeledOperator permute_like(const LabeledOperator &a, const LabeledOperator &like);

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // columns are eigenvectors
};

EigenSystem hermitian_eigen(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);
EigenSystem hermitian_eigen(const Matrix &a, const Tolerances &tol = kDefaultTolerances);

double frobenius_norm(const LabeledOperator &a);
double hermiticity_defect(const Matrix &a);
bool is_hermitian(const Matrix &a, const Tolerances &tol = kDefaultTolerances);
bool is_psd(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);
double min_eigenvalue(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);

/// Sum of singular values.
double trace_norm(const LabeledOperator &a);
double trace_norm(const Matrix &a);

/// Trace-norm distance ||a - b||_1 after aligning b's label order to a's.
double trace_distance(const LabeledOperator &a, const LabeledOperator &b);

/// tr[a (log2 a - log2 b)] on supp(a); +infinity when supp(a) is not inside supp(b).
double relative_entropy(const LabeledOperator &a, const LabeledOperator &b,
                        const Tolerances &tol = kDefaultTolerances);

/// Moore-Penrose pseudo-inverse of a^{1/2}: sum over lambda > cutoff of lambda^{-1/2}|v><v|.
LabeledOperator pseudo_inverse_sqrt(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);

/// Principal square root of a PSD operator (negative noise eigenvalues clipped to 0).
LabeledOperator psd_sqrt(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);

/// Orthogonal projector onto the support of a PSD operator.
LabeledOperator support_projector(const LabeledOperator &a, const Tolerances &tol = kDefaultTolerances);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace qproc
