#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qproc/choi.hpp"
#include "qproc/processes.hpp"
#include "qproc/tolerances.hpp"

namespace qproc {

struct NonsignallingReport {
    /// residuals[k - 2] = ||tr_{k^i} C - 1_{k-1^o}/d (x) tr_{k^i k-1^o} C||_1 for k = 2..N.
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool pass = false;
};

NonsignallingReport check_nonsignalling(const ProcessTensor &p, const Tolerances &tol = kDefaultTolerances);

struct SignallingWitness {
    LabeledOperator output_a;
    LabeledOperator output_b;
    /// Half the trace norm of the difference.
    double distance = 0.0;
};

/// Discards every input but the last, feeds `fixed_outputs[k]` (maximally mixed if absent) into
/// k^o for k != from_time and each probe into from_time^o, and returns the two states on N^i.
SignallingWitness signalling_witness(const ProcessTensor &p, int from_time, const std::pair<Matrix, Matrix> &probes,
                                     const std::map<int, Matrix> &fixed_outputs = {},
                                     const Tolerances &tol = kDefaultTolerances);

/// Product of the single-channel marginals of p, normalised so every factor is CPTP (or a state).
ProcessTensor memoryless_marginal_product(const ProcessTensor &p);

/// S(C/tr C || C~/tr C) in bits, where C~ is the marginal product. +infinity on support mismatch.
double memory_measure(const ProcessTensor &p, const Tolerances &tol = kDefaultTolerances);

struct PptCut {
    /// Wires whose indices are transposed.
    LabelList side;
    double min_eigenvalue = 0.0;
};

struct PptReport {
    std::vector<PptCut> cuts;
    double min_eigenvalue = 0.0;
    bool pass = false;
};

/// Partial-transpose spectra over cuts made of whole channel groups: each group against the
/// rest, and every past | future split.
PptReport ppt_bipartitions(const ProcessTensor &p, const Tolerances &tol = kDefaultTolerances);

/// Auxiliary wire used by two-time dilations.
SpaceLabel ancilla_label(int dim);

struct CanonicalDilation {
    /// Pure state on {1i, A1i}.
    LabeledOperator xi;
    /// Channel {A1i, 1o} -> {2i}.
    ChoiChannel eta;
    /// ||xi * eta - C||_1
    double reconstruction_residual = 0.0;
    /// ||tr_{2i} eta - 1_{1o} (x) Pi||_1 with Pi the support projector of rho_1.
    double channel_defect = 0.0;
    /// Minimum partial-transpose eigenvalue of eta across {2i, 1o} | A1i.
    double eta_ppt_min_eigenvalue = 0.0;
    bool rank_deficient = false;
};

/// Two-time process as a pure initial state linked with a channel. BadParams unless N = 2.
CanonicalDilation two_time_canonical_dilation(const ProcessTensor &p, const Tolerances &tol = kDefaultTolerances);

/// Two-time mixed-memoryless decomposition: C = sum_x p_x L_x (x) rho_x.
struct MmDecomposition {
    std::vector<double> weights;
    std::vector<LabeledOperator> states;  // on 1i
    std::vector<ChoiChannel> channels;    // 1o -> 2i
};

/// rho_SEP = sum_x p_x rho_x (x) |x><x|_A on {1i, A1i} and D = sum_x |x><x|_A (x) L_x.
struct SepDilation {
    LabeledOperator sep_state;
    LabeledOperator dilation;
};

/// An explicit separable decomposition sum_x p_x rho_x (x) env_x of an initial state.
struct SepDecomposition {
    std::vector<double> weights;
    std::vector<LabeledOperator> system_states;  // on 1i
    std::vector<LabeledOperator> env_states;     // on A1i
};

SepDilation mm_to_initial_sep(const MmDecomposition &mm, const Tolerances &tol = kDefaultTolerances);

/// L_x = env_x * D, each checked CPTP (NotCptpSlice otherwise).
MmDecomposition initial_sep_to_mm(const SepDecomposition &sep, const LabeledOperator &dilation,
                                  const Tolerances &tol = kDefaultTolerances);

/// Two-time process sum_x p_x L_x (x) rho_x.
ProcessTensor mm_process(const MmDecomposition &mm, const Tolerances &tol = kDefaultTolerances);

struct OnAverageReport {
    /// Largest trace distance between future operators under different past probes.
    double max_deviation = 0.0;
    bool pass = false;
};

/// Inserts trace-and-prepare channels at time j (1 < j < N) and checks that what reaches times
/// after j no longer depends on the states fed into earlier outputs.
OnAverageReport memoryless_on_average_check(const ProcessTensor &p, int j, const Tolerances &tol = kDefaultTolerances,
                                            unsigned long long seed = 1);

enum class ExtensionStatus { feasible, infeasible, solver_limit };

struct ExtensionResult {
    ExtensionStatus status = ExtensionStatus::solver_limit;
    /// For infeasible: the verified Farkas margin (negative); for feasible: constraint residual.
    double value = 0.0;
    std::string detail;
};

/// Searches for a k-copy symmetric extension of C / tr C on the copies of `side`.
/// Throws SolverUnavailable (k >= 2, no backend) and NumericalFailure.
ExtensionResult k_extension_feasibility(const ProcessTensor &p, const LabelList &side, int k,
                                        const Tolerances &tol = kDefaultTolerances, double solver_tolerance = 1e-8);

enum class ProcessClass { M, MM, CM, SEP, NS, QM };
enum class Verdict { pass, pass_by_construction, fail, inconclusive };

std::string_view to_string(ProcessClass c);
std::string_view to_string(Verdict v);
std::optional<ProcessClass> parse_process_class(std::string_view name);

inline bool passes(Verdict v) {
    return v == Verdict::pass || v == Verdict::pass_by_construction;
}

struct ProbeRequest {
    int from_time = 1;
    std::pair<Matrix, Matrix> probes;
};

struct ClassifyOptions {
    Tolerances tol = kDefaultTolerances;
    /// The class the process was built in, if known.
    std::optional<ProcessClass> hint;
    std::vector<ProbeRequest> probes;
    /// k-extension level for the SEP test; 0 or 1 skips it.
    int kext_level = 0;
};

struct ClassificationReport {
    int n_times = 0;
    std::vector<int> dims;
    std::map<ProcessClass, Verdict> verdicts;
    std::map<std::string, double> witnesses;
    Tolerances tolerances;
    std::vector<std::string> notes;

    CausalityReport causality;
    NonsignallingReport nonsignalling;
    PptReport ppt;
    double memory_measure_bits = 0.0;
    double memoryless_gap = 0.0;
    double normalization = 1.0;
    std::vector<SignallingWitness> signalling;
    std::optional<CanonicalDilation> dilation;
    std::optional<ExtensionResult> extension;

    std::string to_json() const;
    std::string to_text() const;
};

ClassificationReport classify(const ProcessTensor &p, const ClassifyOptions &options = {});

}  // namespace qproc
