#pragma once

#include <map>
#include <vector>

#include "qproc/choi.hpp"
#include "qproc/labeled_operator.hpp"
#include "qproc/tolerances.hpp"

namespace qproc {

/// Sorts labels into the canonical process order: time descending, output before input at
/// equal time, then role. For system wires this is (N^i, N-1^o, N-1^i, ..., 1^o, 1^i).
LabelList canonical_order(LabelList labels);

/// Choi operator of an N-time process on system wires 1^i..N^i and 1^o..N-1^o, stored in
/// canonical order. Construction checks the wire structure only; causality is checked by
/// validate_causality.
class ProcessTensor {
  public:
    /// Throws LabelMismatch unless the labels are exactly the system wires of an N >= 2 process.
    explicit ProcessTensor(const LabeledOperator &op);

    const LabeledOperator &op() const noexcept {
        return op_;
    }
    int n_times() const noexcept {
        return n_times_;
    }
    /// k^i for 1 <= k <= N.
    const SpaceLabel &input(int k) const;
    /// k^o for 1 <= k < N.
    const SpaceLabel &output(int k) const;
    /// Product of all output dimensions, which is the trace of a valid process.
    double output_dim_product() const;

  private:
    LabeledOperator op_;
    int n_times_ = 0;
};

/// The wires {k^i, k-1^o} of the channel entering time k (k >= 2), or {1^i} for k = 1.
LabelList channel_group(const ProcessTensor &p, int k);

struct CausalityReport {
    /// residuals[k - 2] = ||tr_{k^i} C_{k:1} - 1_{k-1^o} (x) C_{k-1:1}||_1 for k = 2..N.
    std::vector<double> residuals;
    double max_residual = 0.0;
    /// tr C_{1:1}
    double final_trace = 0.0;
    /// Reduced processes C_{k:1}, index k - 1.
    std::vector<LabeledOperator> reduced;
    bool psd = false;
    bool pass = false;
};

CausalityReport validate_causality(const ProcessTensor &p, const Tolerances &tol = kDefaultTolerances);

struct Instrument {
    std::vector<ChoiChannel> ops;
};

struct StateEnsemble {
    std::vector<LabeledOperator> members;
};

/// Throws InvalidInstrument unless every element is PSD and the sum is CPTP.
void validate_instrument(const Instrument &inst, const Tolerances &tol = kDefaultTolerances);
/// Throws InvalidInstrument unless every member is PSD and the traces sum to one.
void validate_ensemble(const StateEnsemble &ens, const Tolerances &tol = kDefaultTolerances);

using History = std::vector<int>;

/// Classical-memory process in conditional-instrument form. Outcome x_1 labels the root
/// ensemble on 1^i. For a history h = (x_1..x_j), 1 <= j <= N-2, instruments[h] maps j^o to
/// j+1^i with outcome x_{j+1}. finals[(x_1..x_{N-1})] is a CPTP channel N-1^o -> N^i.
struct ConditionalInstrumentTree {
    int n_times = 0;
    StateEnsemble root;
    std::map<History, Instrument> instruments;
    std::map<History, ChoiChannel> finals;
};

/// Measure-and-prepare channel kept in decomposed form (needed for conditional extraction).
struct MeasurePrepare {
    std::vector<LabeledOperator> states;
    Povm povm;

    ChoiChannel channel(const Tolerances &tol = kDefaultTolerances) const;
};

/// One system-environment unitary of a dilation. For step j it maps (S_{j^o}, E_{j^o}) to
/// (S_{j+1^i}, E_{j+1^i}); the system factor is the most significant index.
struct DilationStep {
    Matrix unitary;
    int sys_in = 1;
    int env_in = 1;
    int sys_out = 1;
    int env_out = 1;
};

/// Unitary circuit with the environment carried forward unchanged. `initial` lives on
/// {1^i, E1i}. N = steps.size() + 1.
ProcessTensor build_qm(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                       const Tolerances &tol = kDefaultTolerances);

/// As build_qm, with the environment discarded and env_preps[j-1] (on E_{j^o}) prepared at
/// every time j = 1..N-1.
ProcessTensor build_memoryless_dilated(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                                       const std::vector<LabeledOperator> &env_preps,
                                       const Tolerances &tol = kDefaultTolerances);

/// L_{N:N-1} (x) ... (x) L_{2:1} (x) rho_1. channels[j-1] maps j^o -> j+1^i.
ProcessTensor build_memoryless_product(const std::vector<ChoiChannel> &channels, const LabeledOperator &rho1,
                                       const Tolerances &tol = kDefaultTolerances);

/// As build_qm, with ebcs[j-1] (E_{j^i} -> E_{j^o}) applied to the environment at every time.
ProcessTensor build_cm_dilated(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                               const std::vector<MeasurePrepare> &ebcs, const Tolerances &tol = kDefaultTolerances);

/// Sum over histories of final (x) ... (x) instrument elements (x) root member.
ProcessTensor build_cm_conditional(const ConditionalInstrumentTree &tree, const Tolerances &tol = kDefaultTolerances);

ConditionalInstrumentTree cm_dilated_to_conditional(const LabeledOperator &initial,
                                                    const std::vector<DilationStep> &steps,
                                                    const std::vector<MeasurePrepare> &ebcs,
                                                    const Tolerances &tol = kDefaultTolerances);

/// Convex combination of memoryless processes.
ProcessTensor build_mm(const std::vector<double> &weights, const std::vector<ProcessTensor> &components,
                       const Tolerances &tol = kDefaultTolerances);

/// sum_x p_x channel_factors[x][N-2] (x) ... (x) channel_factors[x][0] (x) rho_factors[x], where
/// channel_factors[x][j-1] lives on {j+1^i, j^o}. Factors are only required to be PSD; the
/// sum must be a causal process (NotCausal otherwise).
ProcessTensor build_sep(const std::vector<double> &weights,
                        const std::vector<std::vector<LabeledOperator>> &channel_factors,
                        const std::vector<LabeledOperator> &rho_factors, const Tolerances &tol = kDefaultTolerances);

/// Tree whose process is q A + (1-q) B: b's root outcomes are shifted past a's.
ConditionalInstrumentTree convex_combine_cm(double q, const ConditionalInstrumentTree &a,
                                            const ConditionalInstrumentTree &b);

}  // namespace qproc
