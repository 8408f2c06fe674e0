#include "qproc/zoo.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include <json.hpp>

#include "qproc/classify.hpp"
#include "qproc/error.hpp"
#include "qproc/random.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

namespace {

LabeledOperator projector(const SpaceLabel &label, int i) {
    Matrix m = Matrix::Zero(label.dim, label.dim);
    m(i, i) = 1.0;
    return LabeledOperator({label}, m);
}

MeasurePrepare dephasing(const SpaceLabel &in, const SpaceLabel &out) {
    MeasurePrepare mp;
    for (int x = 0; x < in.dim; ++x) {
        mp.povm.elements.push_back(projector(in, x));
        mp.states.push_back(projector(out, x));
    }
    return mp;
}

Matrix pauli_x() {
    Matrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    return x;
}

void check_side(int n_times, int d) {
    if (n_times < 2 || d < 1) {
        throw Error(ErrorCode::BadParams, "need N >= 2 and d >= 1");
    }
    double side = 1.0;
    for (int i = 0; i < 2 * n_times - 1; ++i) {
        side *= d;
    }
    if (side > static_cast<double>(kMaxMatrixSide)) {
        throw Error(ErrorCode::DimensionOverflow, "process side " + std::to_string(side) + " exceeds " +
                                                      std::to_string(kMaxMatrixSide));
    }
}

std::vector<double> random_weights(int n, Rng &rng) {
    std::vector<double> w;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w.push_back(0.1 + rng.uniform());
        sum += w.back();
    }
    for (auto &x : w) {
        x /= sum;
    }
    return w;
}

LabeledOperator random_se_state(int d, int de, Rng &rng) {
    return random_state({sys_in(1, d), env_in(1, de)}, rng);
}

// Flattens a conditional-instrument tree into separable factors: one term per history.
ProcessTensor sep_from_tree(const ConditionalInstrumentTree &tree) {
    std::vector<std::vector<LabeledOperator>> channels;
    std::vector<LabeledOperator> rhos;
    for (const auto &[h, final] : tree.finals) {
        std::vector<LabeledOperator> factors;
        for (std::size_t j = 1; j < h.size(); ++j) {
            History prefix(h.begin(), h.begin() + static_cast<long>(j));
            factors.push_back(tree.instruments.at(prefix).ops.at(static_cast<std::size_t>(h[j])).op);
        }
        factors.push_back(final.op);
        channels.push_back(std::move(factors));
        rhos.push_back(tree.root.members.at(static_cast<std::size_t>(h.front())));
    }
    const double terms = static_cast<double>(rhos.size());
    std::vector<double> weights(rhos.size(), 1.0 / terms);
    for (auto &r : rhos) {
        r = terms * r;
    }
    return build_sep(weights, channels, rhos);
}

}  // namespace

ProcessTensor fig3_process() {
    return fig3_process(0.5 * LabeledOperator::identity({sys_in(1, 2)}));
}

ProcessTensor fig3_process(const LabeledOperator &rho1) {
    if (rho1.labels() != LabelList{sys_in(1, 2)}) {
        throw Error(ErrorCode::LabelMismatch, "initial state must live on a qubit 1i");
    }
    const auto initial = tensor_product(rho1, projector(env_in(1, 2), 0));
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    // system (first factor) flipped when the environment reads 1
    Matrix cnot = Matrix::Zero(4, 4);
    Matrix p0 = Matrix::Zero(2, 2);
    Matrix p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    cnot = Eigen::kroneckerProduct(Matrix::Identity(2, 2), p0).eval() + Eigen::kroneckerProduct(pauli_x(), p1).eval();
    const std::vector<DilationStep> steps = {{swap, 2, 2, 2, 2}, {cnot, 2, 2, 2, 2}};
    const std::vector<MeasurePrepare> ebcs = {dephasing(env_in(1, 2), env_out(1, 2)),
                                              dephasing(env_in(2, 2), env_out(2, 2))};
    return build_cm_dilated(initial, steps, ebcs);
}

ProcessTensor guerin_process() {
    // terms |abc> on (2i, 1o, 1i): 000, 101, +1+, -1-
    const double h = std::numbers::sqrt2 / 2.0;
    const std::vector<std::pair<Eigen::Vector2cd, Eigen::Vector2cd>> ac = {
        {Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 0)},
        {Eigen::Vector2cd(0, 1), Eigen::Vector2cd(0, 1)},
        {Eigen::Vector2cd(h, h), Eigen::Vector2cd(h, h)},
        {Eigen::Vector2cd(h, -h), Eigen::Vector2cd(h, -h)},
    };
    const int bs[] = {0, 0, 1, 1};
    std::vector<std::vector<LabeledOperator>> channels;
    std::vector<LabeledOperator> rhos;
    for (std::size_t t = 0; t < ac.size(); ++t) {
        Eigen::Vector2cd b = Eigen::Vector2cd::Zero();
        b(bs[t]) = 1.0;
        Eigen::VectorXcd ab(4);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                ab(2 * i + j) = ac[t].first(i) * b(j);
            }
        }
        channels.push_back({LabeledOperator({sys_in(2, 2), sys_out(1, 2)}, 2.0 * ab * ab.adjoint())});
        rhos.emplace_back(LabelList{sys_in(1, 2)}, ac[t].second * ac[t].second.adjoint());
    }
    return build_sep(std::vector<double>(4, 0.25), channels, rhos);
}

ProcessTensor common_cause(const Matrix &state, int n_times, int d) {
    check_side(n_times, d);
    LabelList ins;
    LabelList outs;
    for (int t = n_times; t >= 1; --t) {
        ins.push_back(sys_in(t, d));
        if (t < n_times) {
            outs.push_back(sys_out(t, d));
        }
    }
    if (state.rows() != static_cast<long>(total_dim(ins)) || state.cols() != state.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "common-cause state has the wrong size");
    }
    const LabeledOperator rho(ins, state);
    if (!is_state(rho)) {
        throw Error(ErrorCode::NotAState, "common-cause state is not a density operator");
    }
    return ProcessTensor(tensor_product(rho, LabeledOperator::identity(outs)));
}

ProcessTensor ghz_common_cause(int n_times) {
    check_side(n_times, 2);
    const long side = 1L << n_times;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(side);
    v(0) = v(side - 1) = std::numbers::sqrt2 / 2.0;
    return common_cause(v * v.adjoint(), n_times, 2);
}

ProcessTensor trivial_identity(int n_times, int d) {
    check_side(n_times, d);
    std::vector<ChoiChannel> channels;
    for (int j = 1; j < n_times; ++j) {
        channels.push_back(choi_identity(sys_out(j, d), sys_in(j + 1, d)));
    }
    return build_memoryless_product(channels, projector(sys_in(1, d), 0));
}

ProcessTensor random_process(std::string_view cls, int n_times, int d, std::uint64_t seed) {
    check_side(n_times, d);
    Rng rng(seed);
    const int de = 2;
    if (cls == "M") {
        return random_memoryless(n_times, d, rng);
    }
    if (cls == "MM") {
        const auto w = random_weights(2, rng);
        std::vector<ProcessTensor> parts;
        for (std::size_t i = 0; i < w.size(); ++i) {
            parts.push_back(random_memoryless(n_times, d, rng));
        }
        return build_mm(w, parts);
    }
    if (cls == "CM" || cls == "SEP") {
        const auto initial = random_se_state(d, de, rng);
        const auto steps = random_steps(n_times, d, de, rng);
        std::vector<MeasurePrepare> ebcs;
        for (int j = 1; j < n_times; ++j) {
            ebcs.push_back(random_measure_prepare(env_in(j, de), env_out(j, de), 2, rng));
        }
        if (cls == "CM") {
            return build_cm_dilated(initial, steps, ebcs);
        }
        return sep_from_tree(cm_dilated_to_conditional(initial, steps, ebcs));
    }
    if (cls == "QM") {
        return build_qm(random_se_state(d, de, rng), random_steps(n_times, d, de, rng));
    }
    throw Error(ErrorCode::BadParams, "unknown process class '" + std::string(cls) + "'");
}

// ---- file format ----

namespace {

void append_double(std::string &out, double x) {
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::BadParams, "non-finite matrix entry cannot be serialized");
    }
    if (x == 0.0 && std::signbit(x)) {
        out += "-0.0";
        return;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

std::string_view port_name(Port p) {
    return p == Port::input ? "input" : "output";
}

std::string_view role_name(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::environment: return "environment";
        case Role::ancilla: return "ancilla";
    }
    return "system";
}

[[noreturn]] void parse_fail(const std::string &what) {
    throw Error(ErrorCode::ParseError, what);
}

const nlohmann::json &field(const nlohmann::json &obj, const char *key) {
    if (!obj.is_object() || !obj.contains(key)) {
        parse_fail(std::string("missing field '") + key + "'");
    }
    return obj.at(key);
}

int int_field(const nlohmann::json &obj, const char *key) {
    const auto &v = field(obj, key);
    if (!v.is_number_integer()) {
        parse_fail(std::string("field '") + key + "' must be an integer");
    }
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        parse_fail(std::string("field '") + key + "' out of range");
    }
    return static_cast<int>(x);
}

std::string string_field(const nlohmann::json &obj, const char *key) {
    const auto &v = field(obj, key);
    if (!v.is_string()) {
        parse_fail(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

double number_of(const nlohmann::json &v) {
    if (!v.is_number()) {
        parse_fail("matrix entries must be numbers");
    }
    return v.get<double>();
}

}  // namespace

std::string serialize(const ProcessFile &file) {
    const auto &labels = file.op.labels();
    const auto &m = file.op.matrix();
    std::string out = "{\n  \"format_version\": " + std::to_string(file.format_version) + ",\n  \"labels\": [";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto &l = labels[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"time\": " + std::to_string(l.time) + ", \"port\": \"" + std::string(port_name(l.port)) +
               "\", \"role\": \"" + std::string(role_name(l.role)) + "\", \"dim\": " + std::to_string(l.dim) + "}";
    }
    out += labels.empty() ? "],\n" : "\n  ],\n";
    out += "  \"matrix\": [";
    for (long r = 0; r < m.rows(); ++r) {
        out += r ? ",\n    [" : "\n    [";
        for (long c = 0; c < m.cols(); ++c) {
            out += c ? ", [" : "[";
            append_double(out, m(r, c).real());
            out += ", ";
            append_double(out, m(r, c).imag());
            out += "]";
        }
        out += "]";
    }
    out += "\n  ],\n  \"metadata\": {";
    bool first = true;
    for (const auto &[k, v] : file.metadata) {
        out += first ? "\n    " : ",\n    ";
        out += nlohmann::json(k).dump() + ": " + nlohmann::json(v).dump();
        first = false;
    }
    out += first ? "}\n}\n" : "\n  }\n}\n";
    return out;
}

ProcessFile deserialize(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::ParseError, "malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!j.is_object()) {
        parse_fail("top level must be an object");
    }
    ProcessFile file;
    file.format_version = int_field(j, "format_version");
    if (file.format_version != 1) {
        parse_fail("unsupported format_version " + std::to_string(file.format_version));
    }

    const auto &jl = field(j, "labels");
    if (!jl.is_array()) {
        parse_fail("'labels' must be an array");
    }
    LabelList labels;
    std::size_t side = 1;
    for (const auto &e : jl) {
        SpaceLabel l;
        l.time = int_field(e, "time");
        const auto port = string_field(e, "port");
        if (port == "input") {
            l.port = Port::input;
        } else if (port == "output") {
            l.port = Port::output;
        } else {
            parse_fail("unknown port '" + port + "'");
        }
        const auto role = string_field(e, "role");
        if (role == "system") {
            l.role = Role::system;
        } else if (role == "environment") {
            l.role = Role::environment;
        } else if (role == "ancilla") {
            l.role = Role::ancilla;
        } else {
            parse_fail("unknown role '" + role + "'");
        }
        l.dim = int_field(e, "dim");
        if (l.dim < 1) {
            parse_fail("label dimension must be positive");
        }
        if (static_cast<std::size_t>(l.dim) > kMaxMatrixSide || side * static_cast<std::size_t>(l.dim) > kMaxMatrixSide) {
            throw Error(ErrorCode::DimensionOverflow,
                        "matrix side exceeds the supported maximum of " + std::to_string(kMaxMatrixSide));
        }
        side *= static_cast<std::size_t>(l.dim);
        labels.push_back(l);
    }

    const auto &jm = field(j, "matrix");
    if (!jm.is_array() || jm.size() != side) {
        parse_fail("'matrix' must have " + std::to_string(side) + " rows");
    }
    Matrix m(static_cast<long>(side), static_cast<long>(side));
    for (std::size_t r = 0; r < side; ++r) {
        const auto &row = jm[r];
        if (!row.is_array() || row.size() != side) {
            parse_fail("matrix row " + std::to_string(r) + " must have " + std::to_string(side) + " entries");
        }
        for (std::size_t c = 0; c < side; ++c) {
            const auto &e = row[c];
            if (!e.is_array() || e.size() != 2) {
                parse_fail("matrix entries must be [re, im] pairs");
            }
            m(static_cast<long>(r), static_cast<long>(c)) = cdouble(number_of(e[0]), number_of(e[1]));
        }
    }
    try {
        file.op = LabeledOperator(labels, m);
    } catch (const Error &e) {
        parse_fail(std::string("invalid labels: ") + e.what());
    }

    if (j.contains("metadata")) {
        const auto &md = j.at("metadata");
        if (!md.is_object()) {
            parse_fail("'metadata' must be an object");
        }
        for (const auto &[k, v] : md.items()) {
            if (!v.is_string()) {
                parse_fail("metadata value for '" + k + "' must be a string");
            }
            file.metadata[k] = v.get<std::string>();
        }
    }
    return file;
}

}  // namespace qproc
