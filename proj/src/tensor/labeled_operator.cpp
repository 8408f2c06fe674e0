#include "qproc/labeled_operator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "qproc/error.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::LabelNotFound: return "LabelNotFound";
        case ErrorCode::LabelMismatch: return "LabelMismatch";
        case ErrorCode::BadPermutation: return "BadPermutation";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NotAState: return "NotAState";
        case ErrorCode::NotCptp: return "NotCptp";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::InvalidPovm: return "InvalidPovm";
        case ErrorCode::InvalidInstrument: return "InvalidInstrument";
        case ErrorCode::BadWeights: return "BadWeights";
        case ErrorCode::ComponentNotMemoryless: return "ComponentNotMemoryless";
        case ErrorCode::NotCausal: return "NotCausal";
        case ErrorCode::NotCptpSlice: return "NotCptpSlice";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::UnknownName: return "UnknownName";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DimensionOverflow: return "DimensionOverflow";
        case ErrorCode::SolverUnavailable: return "SolverUnavailable";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

std::string to_string(const SpaceLabel &label) {
    std::string s;
    if (label.role == Role::environment) {
        s += 'E';
    } else if (label.role == Role::ancilla) {
        s += 'A';
    }
    s += std::to_string(label.time);
    s += label.port == Port::input ? 'i' : 'o';
    return s;
}

std::string to_string(const LabelList &labels) {
    std::string s = "[";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += to_string(labels[i]);
    }
    return s + "]";
}

std::ostream &operator<<(std::ostream &out, const SpaceLabel &label) {
    return out << to_string(label) << "(d=" << label.dim << ")";
}

std::size_t total_dim(const LabelList &labels) {
    std::size_t d = 1;
    for (const auto &l : labels) {
        d *= static_cast<std::size_t>(l.dim);
    }
    return d;
}

LabeledOperator::LabeledOperator() : matrix_(Matrix::Ones(1, 1)) {
}

LabeledOperator::LabeledOperator(LabelList labels, Matrix matrix)
    : labels_(std::move(labels)), matrix_(std::move(matrix)) {
    std::set<SpaceLabel> seen;
    for (const auto &l : labels_) {
        if (l.dim < 1) {
            throw Error(ErrorCode::DimensionMismatch, "label " + to_string(l) + " has dim < 1");
        }
        if (!seen.insert(l).second) {
            throw Error(ErrorCode::DuplicateLabel, "label " + to_string(l) + " repeated in " + to_string(labels_));
        }
    }
    const auto d = static_cast<Eigen::Index>(total_dim(labels_));
    if (matrix_.rows() != d || matrix_.cols() != d) {
        std::ostringstream msg;
        msg << "matrix is " << matrix_.rows() << "x" << matrix_.cols() << " but labels " << to_string(labels_)
            << " need side " << d;
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
}

LabeledOperator LabeledOperator::scalar(cdouble value) {
    return LabeledOperator({}, Matrix::Constant(1, 1, value));
}

LabeledOperator LabeledOperator::identity(LabelList labels) {
    const auto d = static_cast<Eigen::Index>(total_dim(labels));
    return LabeledOperator(std::move(labels), Matrix::Identity(d, d));
}

LabeledOperator LabeledOperator::zero(LabelList labels) {
    const auto d = static_cast<Eigen::Index>(total_dim(labels));
    return LabeledOperator(std::move(labels), Matrix::Zero(d, d));
}

bool LabeledOperator::has_label(const SpaceLabel &label) const {
    return position(label).has_value();
}

std::optional<std::size_t> LabeledOperator::position(const SpaceLabel &label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

LabeledOperator LabeledOperator::relabeled(LabelList labels) const {
    if (labels.size() != labels_.size()) {
        throw Error(ErrorCode::LabelMismatch, "relabel " + to_string(labels_) + " -> " + to_string(labels));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].dim != labels_[i].dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "relabel " + to_string(labels_[i]) + " -> " + to_string(labels[i]));
        }
    }
    return LabeledOperator(std::move(labels), matrix_);
}

LabeledOperator LabeledOperator::adjoint() const {
    return LabeledOperator(labels_, matrix_.adjoint());
}

namespace {

Matrix aligned_matrix(const LabeledOperator &a, const LabeledOperator &b) {
    if (a.labels() == b.labels()) {
        return b.matrix();
    }
    try {
        return permute(b, a.labels()).matrix();
    } catch (const Error &) {
        throw Error(ErrorCode::LabelMismatch, to_string(a.labels()) + " vs " + to_string(b.labels()));
    }
}

}  // namespace

LabeledOperator operator+(const LabeledOperator &a, const LabeledOperator &b) {
    return LabeledOperator(a.labels_, a.matrix_ + aligned_matrix(a, b));
}

LabeledOperator operator-(const LabeledOperator &a, const LabeledOperator &b) {
    return LabeledOperator(a.labels_, a.matrix_ - aligned_matrix(a, b));
}

LabeledOperator operator*(cdouble s, const LabeledOperator &a) {
    return LabeledOperator(a.labels_, s * a.matrix_);
}

LabeledOperator operator*(double s, const LabeledOperator &a) {
    return LabeledOperator(a.labels_, s * a.matrix_);
}

}  // namespace qproc
