#include "qproc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qproc/error.hpp"
#include "qproc/kernels.hpp"
#include "qproc/random.hpp"
#include "qproc/sdp.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

namespace {

LabelList without(const LabelList &all, const LabelList &remove) {
    LabelList out;
    for (const auto &l : all) {
        if (std::find(remove.begin(), remove.end(), l) == remove.end()) {
            out.push_back(l);
        }
    }
    return out;
}

LabeledOperator state_on(const SpaceLabel &label, const Matrix &m, const Tolerances &tol) {
    if (m.rows() != label.dim || m.cols() != label.dim) {
        throw Error(ErrorCode::DimensionMismatch, "state of side " + std::to_string(m.rows()) + " fed into " +
                                                      to_string(label) + " of dimension " + std::to_string(label.dim));
    }
    LabeledOperator rho({label}, m);
    if (!is_state(rho, tol)) {
        throw Error(ErrorCode::NotAState, "operator fed into " + to_string(label) + " is not a unit-trace PSD state");
    }
    return rho;
}

LabeledOperator maximally_mixed(const SpaceLabel &label) {
    return (1.0 / label.dim) * LabeledOperator::identity({label});
}

// Probe family on a d-dimensional wire: |0>, |d-1>, uniform superposition, (|0> + i|1>)/sqrt2,
// and one seeded random pure state.
std::vector<Matrix> probe_states(int d, Rng &rng) {
    std::vector<Eigen::VectorXcd> vecs;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v(0) = 1.0;
    vecs.push_back(v);
    if (d > 1) {
        v.setZero();
        v(d - 1) = 1.0;
        vecs.push_back(v);
        vecs.push_back(Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
        v.setZero();
        v(0) = std::numbers::sqrt2 / 2.0;
        v(1) = cdouble(0.0, std::numbers::sqrt2 / 2.0);
        vecs.push_back(v);
        vecs.push_back(random_pure_vector(d, rng));
    }
    std::vector<Matrix> out;
    for (const auto &x : vecs) {
        out.push_back(x * x.adjoint());
    }
    return out;
}

double lambda_max(const LabeledOperator &a) {
    return std::max(hermitian_eigen(a).values.maxCoeff(), 0.0);
}

}  // namespace

NonsignallingReport check_nonsignalling(const ProcessTensor &p, const Tolerances &tol) {
    NonsignallingReport report;
    for (int k = 2; k <= p.n_times(); ++k) {
        const auto out = p.output(k - 1);
        const auto t = partial_trace(p.op(), {p.input(k)});
        const auto rhs = tensor_product((1.0 / out.dim) * LabeledOperator::identity({out}), partial_trace(t, {out}));
        report.residuals.push_back(trace_distance(t, rhs));
    }
    report.max_residual = report.residuals.empty() ? 0.0 : *std::max_element(report.residuals.begin(), report.residuals.end());
    report.pass = report.max_residual <= tol.residual;
    return report;
}

SignallingWitness signalling_witness(const ProcessTensor &p, int from_time, const std::pair<Matrix, Matrix> &probes,
                                     const std::map<int, Matrix> &fixed_outputs, const Tolerances &tol) {
    const int n = p.n_times();
    const auto probe_wire = p.output(from_time);
    for (const auto &[k, m] : fixed_outputs) {
        if (k == from_time) {
            throw Error(ErrorCode::BadParams, "time " + std::to_string(k) + " is both probed and fixed");
        }
        p.output(k);
    }
    LabeledOperator reduced = p.op();
    for (int k = 1; k < n; ++k) {
        reduced = link_product(reduced, LabeledOperator::identity({p.input(k)}));
        if (k == from_time) {
            continue;
        }
        auto it = fixed_outputs.find(k);
        const auto rho = it == fixed_outputs.end() ? maximally_mixed(p.output(k)) : state_on(p.output(k), it->second, tol);
        reduced = link_product(reduced, rho);
    }
    SignallingWitness w;
    w.output_a = link_product(reduced, state_on(probe_wire, probes.first, tol));
    w.output_b = link_product(reduced, state_on(probe_wire, probes.second, tol));
    w.distance = 0.5 * trace_distance(w.output_a, w.output_b);
    return w;
}

ProcessTensor memoryless_marginal_product(const ProcessTensor &p) {
    const int n = p.n_times();
    const auto &all = p.op().labels();
    LabeledOperator product;
    for (int k = n; k >= 1; --k) {
        const auto group = channel_group(p, k);
        double norm = 1.0;
        for (int j = 1; j < n; ++j) {
            if (j != k - 1) {
                norm *= p.output(j).dim;
            }
        }
        const auto marginal = (1.0 / norm) * partial_trace(p.op(), without(all, group));
        product = k == n ? marginal : tensor_product(product, marginal);
    }
    return ProcessTensor(product);
}

double memory_measure(const ProcessTensor &p, const Tolerances &tol) {
    const double tr = p.op().trace().real();
    const auto tilde = memoryless_marginal_product(p);
    return relative_entropy((1.0 / tr) * p.op(), (1.0 / tr) * tilde.op(), tol);
}

PptReport ppt_bipartitions(const ProcessTensor &p, const Tolerances &tol) {
    const int n = p.n_times();
    const unsigned full = (1u << n) - 1u;
    std::vector<unsigned> masks;
    std::set<unsigned> seen;
    auto add = [&](unsigned mask) {
        const unsigned key = std::min(mask, full ^ mask);
        if (key != 0 && seen.insert(key).second) {
            masks.push_back(mask);
        }
    };
    // bit k-1 stands for channel group k
    for (int k = n; k >= 1; --k) {
        add(1u << (k - 1));
    }
    for (int m = 1; m < n; ++m) {
        add((1u << m) - 1u);
    }
    PptReport report;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (unsigned mask : masks) {
        PptCut cut;
        for (int k = n; k >= 1; --k) {
            if (mask & (1u << (k - 1))) {
                const auto g = channel_group(p, k);
                cut.side.insert(cut.side.end(), g.begin(), g.end());
            }
        }
        cut.min_eigenvalue = min_eigenvalue(partial_transpose(p.op(), cut.side), tol);
        report.min_eigenvalue = std::min(report.min_eigenvalue, cut.min_eigenvalue);
        report.cuts.push_back(std::move(cut));
    }
    report.pass = report.min_eigenvalue >= -tol.psd * std::max(lambda_max(p.op()), 1.0);
    return report;
}

SpaceLabel ancilla_label(int dim) {
    return {1, Port::input, Role::ancilla, dim};
}

CanonicalDilation two_time_canonical_dilation(const ProcessTensor &p, const Tolerances &tol) {
    if (p.n_times() != 2) {
        throw Error(ErrorCode::BadParams, "canonical dilation is defined for two-time processes only");
    }
    const auto in1 = p.input(1), out1 = p.output(1), in2 = p.input(2);
    const auto a = ancilla_label(in1.dim);
    const auto rho = (1.0 / out1.dim) * partial_trace(p.op(), {in2, out1});
    const auto root = psd_sqrt(rho, tol);
    const auto inv_root = pseudo_inverse_sqrt(rho, tol);
    const auto support = support_projector(rho, tol);

    CanonicalDilation out;
    out.rank_deficient = support.trace().real() < in1.dim - 0.5;

    const auto phi = choi_identity(in1, a).op;  // labels [1i, A]
    const Matrix r = tensor_product(root, LabeledOperator::identity({a})).matrix();
    out.xi = LabeledOperator(phi.labels(), r * phi.matrix() * r);

    // p.op() is in canonical order [2i, 1o, 1i].
    const Matrix s = tensor_product(LabeledOperator::identity({in2, out1}), inv_root).matrix();
    const LabeledOperator eta({in2, out1, a}, s * p.op().matrix() * s);
    out.eta = {eta, {a, out1}, {in2}};

    out.reconstruction_residual = trace_distance(p.op(), link_product(out.xi, eta));
    const auto expected = tensor_product(LabeledOperator::identity({out1}), support.relabeled({a}));
    out.channel_defect = trace_distance(partial_trace(eta, {in2}), expected);
    out.eta_ppt_min_eigenvalue = min_eigenvalue(partial_transpose(eta, {a}), tol);
    return out;
}

namespace {

void check_weights(const std::vector<double> &w, std::size_t n) {
    if (w.size() != n || n == 0) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(w.size()) + " weights for " + std::to_string(n) + " terms");
    }
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) {
            throw Error(ErrorCode::BadWeights, "negative weight " + std::to_string(x));
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadWeights, "weights sum to " + std::to_string(sum));
    }
}

LabeledOperator flag(int x, const SpaceLabel &a) {
    Matrix m = Matrix::Zero(a.dim, a.dim);
    m(x, x) = 1.0;
    return LabeledOperator({a}, m);
}

}  // namespace

SepDilation mm_to_initial_sep(const MmDecomposition &mm, const Tolerances &tol) {
    const auto n = mm.weights.size();
    check_weights(mm.weights, n);
    if (mm.states.size() != n || mm.channels.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "decomposition lists differ in length");
    }
    const auto a = ancilla_label(static_cast<int>(n));
    SepDilation out;
    for (std::size_t x = 0; x < n; ++x) {
        if (!is_state(mm.states[x], tol)) {
            throw Error(ErrorCode::NotAState, "component state " + std::to_string(x) + " is not a state");
        }
        if (!is_cptp(mm.channels[x], tol)) {
            throw Error(ErrorCode::NotCptp, "component channel " + std::to_string(x) + " is not CPTP");
        }
        const auto f = flag(static_cast<int>(x), a);
        auto s = mm.weights[x] * tensor_product(mm.states[x], f);
        auto d = tensor_product(f, mm.channels[x].op);
        out.sep_state = x == 0 ? s : out.sep_state + s;
        out.dilation = x == 0 ? d : out.dilation + d;
    }
    return out;
}

MmDecomposition initial_sep_to_mm(const SepDecomposition &sep, const LabeledOperator &dilation, const Tolerances &tol) {
    const auto n = sep.weights.size();
    check_weights(sep.weights, n);
    if (sep.system_states.size() != n || sep.env_states.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "decomposition lists differ in length");
    }
    MmDecomposition out;
    out.weights = sep.weights;
    for (std::size_t x = 0; x < n; ++x) {
        if (!is_state(sep.system_states[x], tol) || !is_state(sep.env_states[x], tol)) {
            throw Error(ErrorCode::NotAState, "separable term " + std::to_string(x) + " is not a product of states");
        }
        for (const auto &l : sep.env_states[x].labels()) {
            if (!dilation.has_label(l)) {
                throw Error(ErrorCode::LabelMismatch, "dilation channel has no wire " + to_string(l));
            }
        }
        const auto l = link_product(sep.env_states[x], dilation);
        ChoiChannel ch{l, {}, {}};
        for (const auto &w : l.labels()) {
            (w.port == Port::output ? ch.input_labels : ch.output_labels).push_back(w);
        }
        if (!is_cptp(ch, tol)) {
            throw Error(ErrorCode::NotCptpSlice, "slice " + std::to_string(x) + " of the dilation is not CPTP (defect " +
                                                     std::to_string(tp_defect(ch)) + ")");
        }
        out.states.push_back(sep.system_states[x]);
        out.channels.push_back(std::move(ch));
    }
    return out;
}

ProcessTensor mm_process(const MmDecomposition &mm, const Tolerances &tol) {
    std::vector<ProcessTensor> components;
    for (std::size_t x = 0; x < mm.channels.size(); ++x) {
        components.push_back(build_memoryless_product({mm.channels[x]}, mm.states.at(x), tol));
    }
    return build_mm(mm.weights, components, tol);
}

OnAverageReport memoryless_on_average_check(const ProcessTensor &p, int j, const Tolerances &tol,
                                            unsigned long long seed) {
    const int n = p.n_times();
    if (j <= 1 || j >= n) {
        throw Error(ErrorCode::BadParams, "causal break time must satisfy 1 < j < N");
    }
    Rng rng(seed);
    OnAverageReport report;
    const auto sigmas = probe_states(p.output(j).dim, rng);
    for (const auto &sigma : sigmas) {
        // Trace-and-prepare at j, then discard every earlier input.
        LabeledOperator base = link_product(p.op(), LabeledOperator({p.output(j)}, sigma));
        base = link_product(base, LabeledOperator::identity({p.input(j)}));
        for (int k = 1; k < j; ++k) {
            base = link_product(base, LabeledOperator::identity({p.input(k)}));
        }
        auto feed = [&](const std::map<int, Matrix> &states) {
            LabeledOperator f = base;
            for (int k = 1; k < j; ++k) {
                auto it = states.find(k);
                f = link_product(f, it == states.end() ? maximally_mixed(p.output(k))
                                                      : LabeledOperator({p.output(k)}, it->second));
            }
            return f;
        };
        const auto reference = feed({});
        const double scale = std::max(1.0, reference.trace().real());
        // Vary each earlier output alone, then all of them together.
        for (int k = 1; k < j; ++k) {
            for (const auto &q : probe_states(p.output(k).dim, rng)) {
                report.max_deviation = std::max(report.max_deviation, trace_distance(feed({{k, q}}), reference) / scale);
            }
        }
        if (j > 2) {
            const auto qs = probe_states(p.output(1).dim, rng);
            for (std::size_t i = 0; i < qs.size(); ++i) {
                std::map<int, Matrix> all;
                for (int k = 1; k < j; ++k) {
                    all[k] = probe_states(p.output(k).dim, rng)[i % qs.size()];
                }
                report.max_deviation = std::max(report.max_deviation, trace_distance(feed(all), reference) / scale);
            }
        }
    }
    report.pass = report.max_deviation <= tol.residual;
    return report;
}

namespace {

// Hermitian basis functional value of a basis element for row/col pair (r, c).
// kind 0: diagonal or symmetric real part; kind 1: antisymmetric imaginary part.
Matrix hermitian_basis(Eigen::Index n, Eigen::Index r, Eigen::Index c, int kind) {
    Matrix h = Matrix::Zero(n, n);
    if (r == c) {
        h(r, r) = 1.0;
    } else if (kind == 0) {
        h(r, c) = h(c, r) = std::numbers::sqrt2 / 2.0;
    } else {
        h(r, c) = cdouble(0.0, -std::numbers::sqrt2 / 2.0);
        h(c, r) = cdouble(0.0, std::numbers::sqrt2 / 2.0);
    }
    return h;
}

}  // namespace

ExtensionResult k_extension_feasibility(const ProcessTensor &p, const LabelList &side, int k, const Tolerances &tol,
                                        double solver_tolerance) {
    if (k < 1) {
        throw Error(ErrorCode::BadParams, "extension level must be at least 1");
    }
    const auto &all = p.op().labels();
    for (const auto &l : side) {
        if (!p.op().has_label(l)) {
            throw Error(ErrorCode::LabelNotFound, to_string(l) + " is not a wire of the process");
        }
    }
    const auto rest = without(all, side);
    if (side.empty() || rest.empty()) {
        throw Error(ErrorCode::BadParams, "cut must split the wires into two non-empty sides");
    }
    LabelList order = rest;
    order.insert(order.end(), side.begin(), side.end());
    const auto rho = (1.0 / p.op().trace().real()) * permute(p.op(), order);

    ExtensionResult result;
    if (k == 1) {
        const bool psd = is_psd(rho, tol);
        result.status = psd ? ExtensionStatus::feasible : ExtensionStatus::infeasible;
        result.detail = psd ? "the state itself is a 1-extension" : "operator is not PSD";
        return result;
    }
    if (!sdp::registered_backend()) {
        throw Error(ErrorCode::SolverUnavailable, "k-extension needs a conic backend");
    }
    const auto da = static_cast<Eigen::Index>(total_dim(rest));
    const auto db = static_cast<Eigen::Index>(total_dim(side));
    Eigen::Index n = da;
    for (int c = 0; c < k; ++c) {
        n *= db;
    }
    constexpr Eigen::Index kMaxSide = 32;
    if (n > kMaxSide) {
        result.status = ExtensionStatus::solver_limit;
        result.detail = "extension side " + std::to_string(n) + " exceeds the supported " + std::to_string(kMaxSide);
        return result;
    }

    sdp::SdpFeasibility problem;
    problem.block_dims = {static_cast<int>(n)};
    problem.trace_bound = 1.0;
    problem.description = std::to_string(k) + "-copy symmetric extension of a " + std::to_string(da) + "x" +
                          std::to_string(db) + " cut";

    // Marginal: tr_{B2..Bk} X = rho.
    const Eigen::Index m = da * db;
    const Eigen::Index tail = n / m;
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = r; c < m; ++c) {
            for (int kind = 0; kind < (r == c ? 1 : 2); ++kind) {
                const Matrix h = hermitian_basis(m, r, c, kind);
                const double target = (h * rho.matrix()).trace().real();
                problem.constraints.push_back({{kernels::omp::kron(h, Matrix::Identity(tail, tail))}, target});
            }
        }
    }
    // Symmetry under exchanging copy 1 with copy i: tr[(H - P H P^T) X] = 0 for a Hermitian basis.
    for (int i = 2; i <= k; ++i) {
        // pi[x]: index with the digits of copies 1 and i exchanged.
        std::vector<Eigen::Index> pi(static_cast<std::size_t>(n));
        for (Eigen::Index x = 0; x < n; ++x) {
            std::vector<Eigen::Index> digits(static_cast<std::size_t>(k));
            Eigen::Index rem = x;
            for (int c = k - 1; c >= 0; --c) {
                digits[static_cast<std::size_t>(c)] = rem % db;
                rem /= db;
            }
            std::swap(digits[0], digits[static_cast<std::size_t>(i - 1)]);
            Eigen::Index y = rem;
            for (auto d : digits) {
                y = y * db + d;
            }
            pi[static_cast<std::size_t>(x)] = y;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = r; c < n; ++c) {
                for (int kind = 0; kind < (r == c ? 1 : 2); ++kind) {
                    const Matrix f = hermitian_basis(n, r, c, kind);
                    Matrix g(n, n);
                    for (Eigen::Index b = 0; b < n; ++b) {
                        for (Eigen::Index a = 0; a < n; ++a) {
                            g(pi[static_cast<std::size_t>(a)], pi[static_cast<std::size_t>(b)]) = f(a, b);
                        }
                    }
                    if ((f - g).norm() > 1e-12) {
                        problem.constraints.push_back({{f - g}, 0.0});
                    }
                }
            }
        }
    }

    const auto solved = sdp::solve_feasibility(problem, solver_tolerance);
    result.detail = solved.detail + " after " + std::to_string(solved.iterations) + " iterations";
    switch (solved.status) {
        case sdp::Status::feasible: {
            const auto check = sdp::check_witness(problem, solved.witness);
            if (check.min_eigenvalue < -10.0 * solver_tolerance ||
                check.max_constraint_residual > 10.0 * solver_tolerance) {
                throw Error(ErrorCode::NumericalFailure, "extension witness failed re-validation (min eigenvalue " +
                                                             std::to_string(check.min_eigenvalue) + ", residual " +
                                                             std::to_string(check.max_constraint_residual) + ")");
            }
            result.status = ExtensionStatus::feasible;
            result.value = check.max_constraint_residual;
            break;
        }
        case sdp::Status::infeasible: {
            const double margin = sdp::certificate_margin(problem, solved.dual);
            if (!(margin < 0.0)) {
                throw Error(ErrorCode::NumericalFailure,
                            "infeasibility certificate failed re-validation (margin " + std::to_string(margin) + ")");
            }
            result.status = ExtensionStatus::infeasible;
            result.value = margin;
            break;
        }
        case sdp::Status::unknown:
            result.status = ExtensionStatus::solver_limit;
            break;
    }
    return result;
}

}  // namespace qproc
