#include "qproc/processes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qproc/classify.hpp"
#include "qproc/error.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

namespace {

bool same_label_set(const LabelList &a, const LabelList &b) {
    return std::is_permutation(a.begin(), a.end(), b.begin(), b.end());
}

void require_state(const LabeledOperator &rho, const Tolerances &tol, const std::string &what) {
    if (!is_state(rho, tol)) {
        throw Error(ErrorCode::NotAState, what + " on " + to_string(rho.labels()) + " is not a unit-trace PSD operator");
    }
}

void require_weights(const std::vector<double> &weights, std::size_t n) {
    if (weights.size() != n) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(weights.size()) + " weights for " + std::to_string(n) + " components");
    }
    if (weights.empty()) {
        throw Error(ErrorCode::BadWeights, "no weights");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::BadWeights, "weight " + std::to_string(w) + " is not a probability");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadWeights, "weights sum to " + std::to_string(sum));
    }
}

// Label order of a system-environment unitary step j.
ChoiChannel step_channel(const DilationStep &s, int j, const Tolerances &tol) {
    return choi_unitary(s.unitary, LabelList{sys_out(j, s.sys_in), env_out(j, s.env_in)},
                        LabelList{sys_in(j + 1, s.sys_out), env_in(j + 1, s.env_out)}, tol);
}

int initial_env_dim(const LabeledOperator &initial) {
    if (initial.rank() != 2 || initial.labels()[0].role == initial.labels()[1].role) {
        throw Error(ErrorCode::LabelMismatch, "initial system-environment state must live on {1i, E1i}, got " +
                                                  to_string(initial.labels()));
    }
    for (const auto &l : initial.labels()) {
        if (l.time != 1 || l.port != Port::input || l.role == Role::ancilla) {
            throw Error(ErrorCode::LabelMismatch, "initial system-environment state must live on {1i, E1i}, got " +
                                                      to_string(initial.labels()));
        }
    }
    const auto &e = initial.labels()[0].role == Role::environment ? initial.labels()[0] : initial.labels()[1];
    return e.dim;
}

void require_env_channel(const ChoiChannel &ch, int j, int d_in, int d_out) {
    if (ch.input_labels != LabelList{env_in(j, d_in)} || ch.output_labels != LabelList{env_out(j, d_out)}) {
        throw Error(ErrorCode::DimensionMismatch, "environment channel at time " + std::to_string(j) + " maps " +
                                                      to_string(ch.input_labels) + " -> " +
                                                      to_string(ch.output_labels) + ", expected E" +
                                                      std::to_string(j) + "i(d=" + std::to_string(d_in) + ") -> E" +
                                                      std::to_string(j) + "o(d=" + std::to_string(d_out) + ")");
    }
}

// rho_SE * E_1 * U_1 * E_2 * U_2 ... * U_{N-1} * 1_{E_N}.
ProcessTensor evaluate_dilation(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                                const std::vector<ChoiChannel> &env_channels, const Tolerances &tol) {
    if (steps.empty()) {
        throw Error(ErrorCode::BadParams, "a process needs at least one unitary step (N >= 2)");
    }
    require_state(initial, tol, "initial system-environment state");
    int d_env = initial_env_dim(initial);
    LabeledOperator c = initial;
    for (std::size_t idx = 0; idx < steps.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        const auto &s = steps[idx];
        require_env_channel(env_channels[idx], j, d_env, s.env_in);
        c = link_product(c, env_channels[idx].op);
        c = link_product(c, step_channel(s, j, tol).op);
        d_env = s.env_out;
    }
    const int n = static_cast<int>(steps.size()) + 1;
    c = link_product(c, choi_trace_map({env_in(n, d_env)}).op);
    return ProcessTensor(c);
}

void require_system_channel(const ChoiChannel &ch, int j) {
    const bool ok = ch.input_labels.size() == 1 && ch.output_labels.size() == 1 &&
                    ch.input_labels[0] == sys_out(j, ch.input_labels[0].dim) &&
                    ch.output_labels[0] == sys_in(j + 1, ch.output_labels[0].dim);
    if (!ok) {
        throw Error(ErrorCode::LabelMismatch, "channel " + std::to_string(j) + " maps " + to_string(ch.input_labels) +
                                                  " -> " + to_string(ch.output_labels) + ", expected " +
                                                  std::to_string(j) + "o -> " + std::to_string(j + 1) + "i");
    }
}

}  // namespace

LabelList canonical_order(LabelList labels) {
    std::stable_sort(labels.begin(), labels.end(), [](const SpaceLabel &a, const SpaceLabel &b) {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        if (a.port != b.port) {
            return a.port == Port::output;
        }
        return a.role < b.role;
    });
    return labels;
}

ProcessTensor::ProcessTensor(const LabeledOperator &op) {
    const auto order = canonical_order(op.labels());
    int n = 0;
    for (const auto &l : order) {
        if (l.role != Role::system) {
            throw Error(ErrorCode::LabelMismatch, "process wire " + to_string(l) + " is not a system wire");
        }
        n = std::max(n, l.time);
    }
    bool ok = n >= 2 && static_cast<int>(order.size()) == 2 * n - 1;
    for (std::size_t i = 0; ok && i < order.size(); ++i) {
        // canonical position i: N^i, N-1^o, N-1^i, ...
        const int time = n - static_cast<int>((i + 1) / 2);
        const Port port = i % 2 == 0 ? Port::input : Port::output;
        ok = order[i].time == time && order[i].port == port;
    }
    if (!ok) {
        throw Error(ErrorCode::LabelMismatch, to_string(op.labels()) + " are not the wires of an N-time process");
    }
    op_ = permute(op, order);
    n_times_ = n;
}

const SpaceLabel &ProcessTensor::input(int k) const {
    if (k < 1 || k > n_times_) {
        throw Error(ErrorCode::LabelNotFound, "no input wire at time " + std::to_string(k));
    }
    return op_.labels()[static_cast<std::size_t>(2 * (n_times_ - k))];
}

const SpaceLabel &ProcessTensor::output(int k) const {
    if (k < 1 || k >= n_times_) {
        throw Error(ErrorCode::LabelNotFound, "no output wire at time " + std::to_string(k));
    }
    return op_.labels()[static_cast<std::size_t>(2 * (n_times_ - k) - 1)];
}

double ProcessTensor::output_dim_product() const {
    double d = 1.0;
    for (int k = 1; k < n_times_; ++k) {
        d *= output(k).dim;
    }
    return d;
}

LabelList channel_group(const ProcessTensor &p, int k) {
    if (k == 1) {
        return {p.input(1)};
    }
    return {p.input(k), p.output(k - 1)};
}

CausalityReport validate_causality(const ProcessTensor &p, const Tolerances &tol) {
    CausalityReport report;
    const int n = p.n_times();
    report.reduced.resize(static_cast<std::size_t>(n));
    report.residuals.resize(static_cast<std::size_t>(n - 1));
    report.psd = is_psd(p.op(), tol);
    LabeledOperator c = p.op();
    report.reduced[static_cast<std::size_t>(n - 1)] = c;
    for (int k = n; k >= 2; --k) {
        const auto t = partial_trace(c, {p.input(k)});
        const auto out = p.output(k - 1);
        const auto prev = (1.0 / out.dim) * partial_trace(t, {out});
        const auto expected = tensor_product(LabeledOperator::identity({out}), prev);
        report.residuals[static_cast<std::size_t>(k - 2)] = trace_distance(t, expected);
        report.reduced[static_cast<std::size_t>(k - 2)] = prev;
        c = prev;
    }
    report.final_trace = c.trace().real();
    report.max_residual = report.residuals.empty()
                              ? 0.0
                              : *std::max_element(report.residuals.begin(), report.residuals.end());
    report.pass = report.psd && report.max_residual <= tol.residual &&
                  std::abs(c.trace() - cdouble(1.0)) <= tol.residual;
    return report;
}

void validate_instrument(const Instrument &inst, const Tolerances &tol) {
    if (inst.ops.empty()) {
        throw Error(ErrorCode::InvalidInstrument, "instrument has no elements");
    }
    const auto &first = inst.ops.front();
    LabeledOperator sum = LabeledOperator::zero(first.op.labels());
    for (std::size_t x = 0; x < inst.ops.size(); ++x) {
        const auto &e = inst.ops[x];
        if (e.input_labels != first.input_labels || e.output_labels != first.output_labels) {
            throw Error(ErrorCode::InvalidInstrument, "instrument element " + std::to_string(x) + " acts on different wires");
        }
        if (!is_psd(e.op, tol)) {
            throw Error(ErrorCode::InvalidInstrument, "instrument element " + std::to_string(x) + " is not PSD");
        }
        sum = sum + e.op;
    }
    const ChoiChannel total{sum, first.input_labels, first.output_labels};
    const double defect = tp_defect(total);
    if (defect > tol.residual * static_cast<double>(total_dim(first.input_labels))) {
        throw Error(ErrorCode::InvalidInstrument, "instrument sums to a map with trace-preservation defect " +
                                                      std::to_string(defect));
    }
}

void validate_ensemble(const StateEnsemble &ens, const Tolerances &tol) {
    if (ens.members.empty()) {
        throw Error(ErrorCode::InvalidInstrument, "state ensemble is empty");
    }
    cdouble total = 0.0;
    for (std::size_t x = 0; x < ens.members.size(); ++x) {
        if (ens.members[x].labels() != ens.members.front().labels() || !is_psd(ens.members[x], tol)) {
            throw Error(ErrorCode::InvalidInstrument, "ensemble member " + std::to_string(x) + " is not PSD on " +
                                                          to_string(ens.members.front().labels()));
        }
        total += ens.members[x].trace();
    }
    if (std::abs(total - cdouble(1.0)) > tol.residual) {
        throw Error(ErrorCode::InvalidInstrument, "ensemble traces sum to " + std::to_string(total.real()));
    }
}

ChoiChannel MeasurePrepare::channel(const Tolerances &tol) const {
    return choi_ebc(states, povm, tol);
}

ProcessTensor build_qm(const LabeledOperator &initial, const std::vector<DilationStep> &steps, const Tolerances &tol) {
    std::vector<ChoiChannel> env;
    int d_env = steps.empty() ? 1 : initial_env_dim(initial);
    for (std::size_t idx = 0; idx < steps.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        env.push_back(choi_identity(env_in(j, d_env), env_out(j, steps[idx].env_in)));
        d_env = steps[idx].env_out;
    }
    return evaluate_dilation(initial, steps, env, tol);
}

ProcessTensor build_memoryless_dilated(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                                       const std::vector<LabeledOperator> &env_preps, const Tolerances &tol) {
    if (env_preps.size() != steps.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(env_preps.size()) + " environment preparations for " +
                                                   std::to_string(steps.size()) + " steps");
    }
    std::vector<ChoiChannel> env;
    int d_env = steps.empty() ? 1 : initial_env_dim(initial);
    for (std::size_t idx = 0; idx < steps.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        env.push_back(choi_trace_and_prepare(env_preps[idx], {env_in(j, d_env)}, tol));
        d_env = steps[idx].env_out;
    }
    return evaluate_dilation(initial, steps, env, tol);
}

ProcessTensor build_cm_dilated(const LabeledOperator &initial, const std::vector<DilationStep> &steps,
                               const std::vector<MeasurePrepare> &ebcs, const Tolerances &tol) {
    if (ebcs.size() != steps.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(ebcs.size()) + " environment channels for " +
                                                   std::to_string(steps.size()) + " steps");
    }
    std::vector<ChoiChannel> env;
    for (const auto &e : ebcs) {
        env.push_back(e.channel(tol));
    }
    return evaluate_dilation(initial, steps, env, tol);
}

ProcessTensor build_memoryless_product(const std::vector<ChoiChannel> &channels, const LabeledOperator &rho1,
                                       const Tolerances &tol) {
    if (channels.empty()) {
        throw Error(ErrorCode::BadParams, "a process needs at least one channel (N >= 2)");
    }
    if (rho1.rank() != 1 || rho1.labels()[0] != sys_in(1, rho1.labels()[0].dim)) {
        throw Error(ErrorCode::LabelMismatch, "initial state must live on 1i, got " + to_string(rho1.labels()));
    }
    require_state(rho1, tol, "initial state");
    LabeledOperator c = rho1;
    for (std::size_t idx = 0; idx < channels.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        require_system_channel(channels[idx], j);
        if (!is_cptp(channels[idx], tol)) {
            throw Error(ErrorCode::NotCptp, "channel " + std::to_string(j) + "o -> " + std::to_string(j + 1) +
                                                "i is not CPTP");
        }
        c = tensor_product(channels[idx].op, c);
    }
    return ProcessTensor(c);
}

ConditionalInstrumentTree cm_dilated_to_conditional(const LabeledOperator &initial,
                                                    const std::vector<DilationStep> &steps,
                                                    const std::vector<MeasurePrepare> &ebcs, const Tolerances &tol) {
    if (steps.empty()) {
        throw Error(ErrorCode::BadParams, "a process needs at least one unitary step (N >= 2)");
    }
    if (ebcs.size() != steps.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(ebcs.size()) + " environment channels for " +
                                                   std::to_string(steps.size()) + " steps");
    }
    require_state(initial, tol, "initial system-environment state");
    const int n = static_cast<int>(steps.size()) + 1;
    int d_env = initial_env_dim(initial);
    std::vector<ChoiChannel> us;
    for (std::size_t idx = 0; idx < steps.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        require_env_channel(ebcs[idx].channel(tol), j, d_env, steps[idx].env_in);
        us.push_back(step_channel(steps[idx], j, tol));
        d_env = steps[idx].env_out;
    }

    ConditionalInstrumentTree tree;
    tree.n_times = n;
    for (const auto &m : ebcs[0].povm.elements) {
        tree.root.members.push_back(link_product(m, initial));
    }

    // L^(x_{j+1}|x_j) depends on the history only through x_j, so build one instrument per
    // outcome of EBC j and share it across histories.
    std::vector<std::vector<Instrument>> by_outcome(steps.size());
    std::vector<std::vector<ChoiChannel>> finals_by_outcome(1);
    for (std::size_t idx = 0; idx + 1 < steps.size(); ++idx) {
        const int j = static_cast<int>(idx) + 1;
        for (const auto &sigma : ebcs[idx].states) {
            const auto evolved = link_product(us[idx].op, sigma);
            Instrument inst;
            for (const auto &m : ebcs[idx + 1].povm.elements) {
                inst.ops.push_back({link_product(m, evolved), {sys_out(j, steps[idx].sys_in)},
                                    {sys_in(j + 1, steps[idx].sys_out)}});
            }
            by_outcome[idx].push_back(std::move(inst));
        }
    }
    const std::size_t last = steps.size() - 1;
    const auto trace_env = choi_trace_map({env_in(n, steps[last].env_out)}).op;
    for (const auto &sigma : ebcs[last].states) {
        finals_by_outcome[0].push_back({link_product(trace_env, link_product(us[last].op, sigma)),
                                        {sys_out(n - 1, steps[last].sys_in)},
                                        {sys_in(n, steps[last].sys_out)}});
    }

    // Enumerate histories x_{1:j} breadth first.
    std::vector<History> frontier;
    for (int x = 0; x < static_cast<int>(tree.root.members.size()); ++x) {
        frontier.push_back({x});
    }
    for (std::size_t idx = 0; idx + 1 < steps.size(); ++idx) {
        std::vector<History> next;
        for (const auto &h : frontier) {
            const auto &inst = by_outcome[idx][static_cast<std::size_t>(h.back())];
            tree.instruments[h] = inst;
            for (int x = 0; x < static_cast<int>(inst.ops.size()); ++x) {
                auto g = h;
                g.push_back(x);
                next.push_back(std::move(g));
            }
        }
        frontier = std::move(next);
    }
    for (const auto &h : frontier) {
        tree.finals[h] = finals_by_outcome[0][static_cast<std::size_t>(h.back())];
    }
    return tree;
}

namespace {

LabeledOperator tree_operator(const ConditionalInstrumentTree &tree, const History &h, const Tolerances &tol) {
    const int n = tree.n_times;
    if (static_cast<int>(h.size()) == n - 1) {
        auto it = tree.finals.find(h);
        if (it == tree.finals.end()) {
            throw Error(ErrorCode::InvalidInstrument, "no final channel for history of length " + std::to_string(h.size()));
        }
        if (!is_cptp(it->second, tol)) {
            throw Error(ErrorCode::InvalidInstrument, "final channel for a history is not CPTP");
        }
        require_system_channel(it->second, n - 1);
        return it->second.op;
    }
    auto it = tree.instruments.find(h);
    if (it == tree.instruments.end()) {
        throw Error(ErrorCode::InvalidInstrument, "no instrument for history of length " + std::to_string(h.size()));
    }
    validate_instrument(it->second, tol);
    const int j = static_cast<int>(h.size());
    LabeledOperator sum;
    for (std::size_t x = 0; x < it->second.ops.size(); ++x) {
        const auto &e = it->second.ops[x];
        require_system_channel(e, j);
        auto g = h;
        g.push_back(static_cast<int>(x));
        auto term = tensor_product(tree_operator(tree, g, tol), e.op);
        sum = x == 0 ? term : sum + term;
    }
    return sum;
}

}  // namespace

ProcessTensor build_cm_conditional(const ConditionalInstrumentTree &tree, const Tolerances &tol) {
    if (tree.n_times < 2) {
        throw Error(ErrorCode::BadParams, "a process needs N >= 2");
    }
    validate_ensemble(tree.root, tol);
    const auto &l = tree.root.members.front().labels();
    if (l.size() != 1 || l[0] != sys_in(1, l[0].dim)) {
        throw Error(ErrorCode::LabelMismatch, "root ensemble must live on 1i, got " + to_string(l));
    }
    LabeledOperator sum;
    for (std::size_t x = 0; x < tree.root.members.size(); ++x) {
        auto term = tensor_product(tree_operator(tree, {static_cast<int>(x)}, tol), tree.root.members[x]);
        sum = x == 0 ? term : sum + term;
    }
    return ProcessTensor(sum);
}

ProcessTensor build_mm(const std::vector<double> &weights, const std::vector<ProcessTensor> &components,
                       const Tolerances &tol) {
    require_weights(weights, components.size());
    const auto &labels = components.front().op().labels();
    LabeledOperator sum = LabeledOperator::zero(labels);
    for (std::size_t x = 0; x < components.size(); ++x) {
        const auto &c = components[x];
        if (c.op().labels() != labels) {
            throw Error(ErrorCode::DimensionMismatch, "component " + std::to_string(x) + " lives on " +
                                                          to_string(c.op().labels()) + ", expected " + to_string(labels));
        }
        const double gap = trace_distance(c.op(), memoryless_marginal_product(c).op());
        if (gap > tol.memoryless) {
            throw Error(ErrorCode::ComponentNotMemoryless, "component " + std::to_string(x) +
                                                               " differs from its marginal product by " +
                                                               std::to_string(gap));
        }
        sum = sum + weights[x] * c.op();
    }
    return ProcessTensor(sum);
}

ProcessTensor build_sep(const std::vector<double> &weights, const std::vector<std::vector<LabeledOperator>> &channel_factors,
                        const std::vector<LabeledOperator> &rho_factors, const Tolerances &tol) {
    if (channel_factors.size() != rho_factors.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(channel_factors.size()) + " channel factor lists for " +
                                                   std::to_string(rho_factors.size()) + " initial factors");
    }
    require_weights(weights, rho_factors.size());
    LabeledOperator sum;
    for (std::size_t x = 0; x < rho_factors.size(); ++x) {
        if (channel_factors[x].size() != channel_factors.front().size() || channel_factors[x].empty()) {
            throw Error(ErrorCode::LengthMismatch, "term " + std::to_string(x) + " has " +
                                                       std::to_string(channel_factors[x].size()) + " channel factors");
        }
        if (!is_psd(rho_factors[x], tol)) {
            throw Error(ErrorCode::NotPSD, "initial factor " + std::to_string(x) + " is not PSD");
        }
        LabeledOperator term = rho_factors[x];
        for (std::size_t k = 0; k < channel_factors[x].size(); ++k) {
            if (!is_psd(channel_factors[x][k], tol)) {
                throw Error(ErrorCode::NotPSD, "channel factor " + std::to_string(k) + " of term " +
                                                   std::to_string(x) + " is not PSD");
            }
            term = tensor_product(channel_factors[x][k], term);
        }
        term = weights[x] * term;
        sum = x == 0 ? term : sum + term;
    }
    ProcessTensor p(sum);
    const auto report = validate_causality(p, tol);
    if (!report.pass) {
        throw Error(ErrorCode::NotCausal, "assembled operator violates causality: max residual " +
                                              std::to_string(report.max_residual) + ", final trace " +
                                              std::to_string(report.final_trace));
    }
    return p;
}

ConditionalInstrumentTree convex_combine_cm(double q, const ConditionalInstrumentTree &a,
                                            const ConditionalInstrumentTree &b) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorCode::BadWeights, "mixing weight " + std::to_string(q) + " is not in [0, 1]");
    }
    if (a.n_times != b.n_times || a.root.members.empty() || b.root.members.empty() ||
        a.root.members.front().labels() != b.root.members.front().labels()) {
        throw Error(ErrorCode::DimensionMismatch, "trees describe processes on different wires");
    }
    if (!a.finals.empty() && !b.finals.empty() &&
        !same_label_set(a.finals.begin()->second.op.labels(), b.finals.begin()->second.op.labels())) {
        throw Error(ErrorCode::DimensionMismatch, "trees end on different wires");
    }
    ConditionalInstrumentTree out;
    out.n_times = a.n_times;
    for (const auto &m : a.root.members) {
        out.root.members.push_back(q * m);
    }
    for (const auto &m : b.root.members) {
        out.root.members.push_back((1.0 - q) * m);
    }
    const int offset = static_cast<int>(a.root.members.size());
    auto shifted = [offset](History h) {
        h.front() += offset;
        return h;
    };
    out.instruments = a.instruments;
    out.finals = a.finals;
    for (const auto &[h, inst] : b.instruments) {
        out.instruments[shifted(h)] = inst;
    }
    for (const auto &[h, ch] : b.finals) {
        out.finals[shifted(h)] = ch;
    }
    return out;
}

}  // namespace qproc
