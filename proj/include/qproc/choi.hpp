#pragma once

#include <vector>

#include "qproc/labeled_operator.hpp"
#include "qproc/tolerances.hpp"

namespace qproc {

/// Choi operator of a map from `input_labels` to `output_labels`. The wires of `op` are the
/// union of the two lists, in whatever order the constructor produced.
struct ChoiChannel {
    LabeledOperator op;
    LabelList input_labels;
    LabelList output_labels;
};

/// Measurement effects in Choi form: an effect E appears as its transpose, so that the
/// outcome probability on a state rho is the full contraction rho * M = tr(rho^T M) = tr(rho E).
/// For effects that are real in the computational basis the two forms coincide.
struct Povm {
    std::vector<LabeledOperator> elements;
};

/// sum_ij |i><j| (x) |i><j| on [in, out].
ChoiChannel choi_identity(const SpaceLabel &in, const SpaceLabel &out);

/// sum_ij |i><j| (x) U|i><j|U^dag on in ++ out. Throws NotUnitary when ||U^dag U - 1||_F > tol.
ChoiChannel choi_unitary(const Matrix &u, const LabelList &in, const LabelList &out,
                         const Tolerances &tol = kDefaultTolerances);
ChoiChannel choi_unitary(const Matrix &u, const SpaceLabel &in, const SpaceLabel &out,
                         const Tolerances &tol = kDefaultTolerances);

/// Identity operator on the input wires: the Choi operator of the trace.
ChoiChannel choi_trace_map(const LabelList &in);

/// sigma (x) 1_in. sigma must be a state (NotAState otherwise); its labels are the outputs.
ChoiChannel choi_trace_and_prepare(const LabeledOperator &sigma, const LabelList &in,
                                   const Tolerances &tol = kDefaultTolerances);

/// Measure-and-prepare channel sum_x sigma_x (x) M_x. All states share one label list (the
/// outputs), all POVM elements another (the inputs).
ChoiChannel choi_ebc(const std::vector<LabeledOperator> &states, const Povm &povm,
                     const Tolerances &tol = kDefaultTolerances);

/// A * B: contraction with partial transpose over the labels the operands share, tensor
/// product over the rest. Result labels: a's unshared ++ b's unshared.
/// Labels that agree in time, port and role but not in dimension throw DimensionMismatch.
LabeledOperator link_product(const LabeledOperator &a, const LabeledOperator &b);

/// Throws InvalidPovm unless every element is PSD and they sum to the identity.
void validate_povm(const Povm &povm, const Tolerances &tol = kDefaultTolerances);

/// PSD with unit trace.
bool is_state(const LabeledOperator &rho, const Tolerances &tol = kDefaultTolerances);

/// ||tr_out(op) - 1_in||_1.
double tp_defect(const ChoiChannel &ch);

/// PSD op and tp_defect <= tol.residual * d_in.
bool is_cptp(const ChoiChannel &ch, const Tolerances &tol = kDefaultTolerances);

}  // namespace qproc
