#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "qproc/space_label.hpp"

namespace qproc {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense complex square matrix whose row and column index is a mixed-radix number over
/// `labels()`, leftmost label most significant (the Kronecker convention).
///
/// Values are immutable after construction; every operation returns a new operator.
class LabeledOperator {
  public:
    /// 1x1 operator holding the scalar 1 on no wires.
    LabeledOperator();

    /// Throws DuplicateLabel for repeated labels and DimensionMismatch when the matrix is
    /// not square of side total_dim(labels).
    LabeledOperator(LabelList labels, Matrix matrix);

    static LabeledOperator scalar(cdouble value);
    static LabeledOperator identity(LabelList labels);
    static LabeledOperator zero(LabelList labels);

    const LabelList &labels() const noexcept {
        return labels_;
    }
    const Matrix &matrix() const noexcept {
        return matrix_;
    }
    std::size_t dim() const noexcept {
        return static_cast<std::size_t>(matrix_.rows());
    }
    std::size_t rank() const noexcept {
        return labels_.size();
    }

    bool has_label(const SpaceLabel &label) const;
    std::optional<std::size_t> position(const SpaceLabel &label) const;

    cdouble trace() const {
        return matrix_.trace();
    }
    cdouble operator()(std::size_t row, std::size_t col) const {
        return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    /// Same matrix on a relabelled wire list (dimensions must agree position-wise).
    LabeledOperator relabeled(LabelList labels) const;

    LabeledOperator adjoint() const;

    friend LabeledOperator operator+(const LabeledOperator &a, const LabeledOperator &b);
    friend LabeledOperator operator-(const LabeledOperator &a, const LabeledOperator &b);
    friend LabeledOperator operator*(cdouble s, const LabeledOperator &a);
    friend LabeledOperator operator*(double s, const LabeledOperator &a);

  private:
    LabelList labels_;
    Matrix matrix_;
};

}  // namespace qproc
