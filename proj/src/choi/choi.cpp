#include "qproc/choi.hpp"

#include <algorithm>

#include "qproc/error.hpp"
#include "qproc/kernels.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

namespace {

bool same_wire(const SpaceLabel &a, const SpaceLabel &b) {
    return a.time == b.time && a.port == b.port && a.role == b.role;
}

bool contains(const LabelList &labels, const SpaceLabel &l) {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
}

void require_state(const LabeledOperator &rho, const Tolerances &tol, const char *what) {
    if (!is_state(rho, tol)) {
        throw Error(ErrorCode::NotAState, std::string(what) + " on " + to_string(rho.labels()) +
                                              " is not a unit-trace PSD operator");
    }
}

}  // namespace

ChoiChannel choi_identity(const SpaceLabel &in, const SpaceLabel &out) {
    if (in.dim != out.dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "identity channel " + to_string(in) + " -> " + to_string(out) + " changes dimension");
    }
    return choi_unitary(Matrix::Identity(in.dim, in.dim), LabelList{in}, LabelList{out});
}

ChoiChannel choi_unitary(const Matrix &u, const LabelList &in, const LabelList &out, const Tolerances &tol) {
    const auto din = static_cast<Eigen::Index>(total_dim(in));
    const auto dout = static_cast<Eigen::Index>(total_dim(out));
    if (din != dout || u.rows() != dout || u.cols() != din) {
        throw Error(ErrorCode::DimensionMismatch, "unitary of shape " + std::to_string(u.rows()) + "x" +
                                                      std::to_string(u.cols()) + " between " + to_string(in) +
                                                      " and " + to_string(out));
    }
    const double defect = (u.adjoint() * u - Matrix::Identity(din, din)).norm();
    if (defect > tol.unitarity) {
        throw Error(ErrorCode::NotUnitary, "||U^dag U - 1||_F = " + std::to_string(defect));
    }
    // |U>> = sum_i |i> (x) U|i>
    Eigen::VectorXcd v(din * dout);
    for (Eigen::Index i = 0; i < din; ++i) {
        v.segment(i * dout, dout) = u.col(i);
    }
    LabelList labels = in;
    labels.insert(labels.end(), out.begin(), out.end());
    return {LabeledOperator(std::move(labels), v * v.adjoint()), in, out};
}

ChoiChannel choi_unitary(const Matrix &u, const SpaceLabel &in, const SpaceLabel &out, const Tolerances &tol) {
    return choi_unitary(u, LabelList{in}, LabelList{out}, tol);
}

ChoiChannel choi_trace_map(const LabelList &in) {
    return {LabeledOperator::identity(in), in, {}};
}

ChoiChannel choi_trace_and_prepare(const LabeledOperator &sigma, const LabelList &in, const Tolerances &tol) {
    require_state(sigma, tol, "prepared state");
    return {tensor_product(sigma, LabeledOperator::identity(in)), in, sigma.labels()};
}

ChoiChannel choi_ebc(const std::vector<LabeledOperator> &states, const Povm &povm, const Tolerances &tol) {
    if (states.size() != povm.elements.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(states.size()) + " states for " +
                                                   std::to_string(povm.elements.size()) + " POVM elements");
    }
    if (states.empty()) {
        throw Error(ErrorCode::LengthMismatch, "measure-and-prepare channel needs at least one outcome");
    }
    validate_povm(povm, tol);
    LabeledOperator sum;
    for (std::size_t x = 0; x < states.size(); ++x) {
        require_state(states[x], tol, "prepared state");
        auto term = tensor_product(states[x], povm.elements[x]);
        sum = x == 0 ? term : sum + term;
    }
    return {std::move(sum), povm.elements.front().labels(), states.front().labels()};
}

LabeledOperator link_product(const LabeledOperator &a, const LabeledOperator &b) {
    LabelList shared, a_only, b_only;
    for (const auto &l : a.labels()) {
        if (b.has_label(l)) {
            shared.push_back(l);
        } else {
            a_only.push_back(l);
        }
    }
    for (const auto &l : b.labels()) {
        if (!a.has_label(l)) {
            b_only.push_back(l);
        }
    }
    for (const auto &x : a_only) {
        for (const auto &y : b_only) {
            if (same_wire(x, y)) {
                throw Error(ErrorCode::DimensionMismatch, "wire " + to_string(x) + " has dimension " +
                                                              std::to_string(x.dim) + " in one operand and " +
                                                              std::to_string(y.dim) + " in the other");
            }
        }
    }
    if (shared.empty()) {
        return tensor_product(a, b);
    }
    LabelList a_order = a_only;
    a_order.insert(a_order.end(), shared.begin(), shared.end());
    LabelList b_order = shared;
    b_order.insert(b_order.end(), b_only.begin(), b_only.end());
    const auto ap = permute(a, a_order);
    const auto bp = permute(b, b_order);

    const std::size_t da = total_dim(a_only), ds = total_dim(shared), db = total_dim(b_only);
    // R(a b, a' b') = sum_{t,s} A(a t, a' s) B(t b, s b') is a matrix product after realignment.
    const Matrix a2 = kernels::omp::realign(ap.matrix(), da, ds);
    const Matrix b2 = kernels::omp::realign(bp.matrix(), ds, db);
    const Matrix r2 = a2 * b2;
    LabelList labels = a_only;
    labels.insert(labels.end(), b_only.begin(), b_only.end());
    return LabeledOperator(std::move(labels), kernels::omp::unrealign(r2, da, db));
}

void validate_povm(const Povm &povm, const Tolerances &tol) {
    if (povm.elements.empty()) {
        throw Error(ErrorCode::InvalidPovm, "POVM has no elements");
    }
    const auto &labels = povm.elements.front().labels();
    LabeledOperator sum = LabeledOperator::zero(labels);
    for (std::size_t x = 0; x < povm.elements.size(); ++x) {
        const auto &m = povm.elements[x];
        if (std::is_permutation(m.labels().begin(), m.labels().end(), labels.begin(), labels.end()) == false) {
            throw Error(ErrorCode::InvalidPovm, "POVM element " + std::to_string(x) + " lives on " +
                                                    to_string(m.labels()) + ", expected " + to_string(labels));
        }
        if (!is_psd(m, tol)) {
            throw Error(ErrorCode::InvalidPovm, "POVM element " + std::to_string(x) + " is not PSD");
        }
        sum = sum + m;
    }
    const double defect = trace_norm(sum - LabeledOperator::identity(labels));
    if (defect > tol.residual * static_cast<double>(total_dim(labels))) {
        throw Error(ErrorCode::InvalidPovm, "POVM elements sum to identity only within " + std::to_string(defect));
    }
}

bool is_state(const LabeledOperator &rho, const Tolerances &tol) {
    return std::abs(rho.trace() - cdouble(1.0)) <= tol.residual && is_psd(rho, tol);
}

double tp_defect(const ChoiChannel &ch) {
    const auto reduced = partial_trace(ch.op, ch.output_labels);
    return trace_norm(reduced - LabeledOperator::identity(ch.input_labels));
}

bool is_cptp(const ChoiChannel &ch, const Tolerances &tol) {
    for (const auto &l : ch.op.labels()) {
        if (!contains(ch.input_labels, l) && !contains(ch.output_labels, l)) {
            return false;
        }
    }
    return is_psd(ch.op, tol) &&
           tp_defect(ch) <= tol.residual * static_cast<double>(std::max<std::size_t>(total_dim(ch.input_labels), 1));
}

}  // namespace qproc
