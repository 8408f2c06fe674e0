// qproc: build, classify and round-trip process files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qproc/classify.hpp"
#include "qproc/error.hpp"
#include "qproc/sdp.hpp"
#include "qproc/tensor.hpp"
#include "qproc/zoo.hpp"

namespace {

using namespace qproc;

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::BadParams, "cannot write '" + path + "'");
    }
    out << text;
}

Tolerances tolerances_from(std::optional<double> flag) {
    Tolerances tol = kDefaultTolerances;
    std::optional<double> t = flag;
    if (!t) {
        if (const char *env = std::getenv("QPROC_TOLERANCE")) {
            char *end = nullptr;
            const double v = std::strtod(env, &end);
            if (end == env || *end != '\0' || !(v > 0.0)) {
                throw Error(ErrorCode::BadParams, "QPROC_TOLERANCE must be a positive number");
            }
            t = v;
        }
    }
    if (t) {
        if (!(*t > 0.0)) {
            throw Error(ErrorCode::BadParams, "tolerance must be positive");
        }
        tol.residual = *t;
        tol.memoryless = *t;
    }
    return tol;
}

struct BuildArgs {
    std::string name;
    int n = 3;
    int d = 2;
    std::string cls = "MM";
    std::uint64_t seed = 0;
    std::string state;
    std::string output;
};

ProcessFile run_build(const BuildArgs &a) {
    ProcessFile f;
    f.metadata["name"] = a.name;
    std::optional<ProcessTensor> p;
    if (a.name == "fig3") {
        p = fig3_process();
        f.metadata["construction"] = "CM";
    } else if (a.name == "guerin") {
        p = guerin_process();
        f.metadata["construction"] = "SEP";
    } else if (a.name == "common_cause") {
        if (a.state.empty()) {
            throw Error(ErrorCode::BadParams, "common_cause needs --state <file>");
        }
        const auto st = deserialize(read_file(a.state));
        p = common_cause(st.op.matrix(), a.n, a.d);
        f.metadata["n_times"] = std::to_string(a.n);
        f.metadata["d"] = std::to_string(a.d);
    } else if (a.name == "trivial_identity") {
        p = trivial_identity(a.n, a.d);
        f.metadata["construction"] = "M";
        f.metadata["n_times"] = std::to_string(a.n);
        f.metadata["d"] = std::to_string(a.d);
    } else if (a.name == "random") {
        p = random_process(a.cls, a.n, a.d, a.seed);
        f.metadata["construction"] = a.cls;
        f.metadata["n_times"] = std::to_string(a.n);
        f.metadata["d"] = std::to_string(a.d);
        f.metadata["seed"] = std::to_string(a.seed);
    } else {
        throw Error(ErrorCode::UnknownName, "unknown process '" + a.name + "'");
    }
    if (!validate_causality(*p).pass) {
        throw Error(ErrorCode::NotCausal, "built process fails the causality check");
    }
    f.op = p->op();
    return f;
}

struct ClassifyArgs {
    std::string file;
    bool json = false;
    std::optional<double> tolerance;
    std::vector<std::string> probes;
    int probe_time = 1;
    std::string hint;
    int kext = 0;
    std::string solver = "dr";
};

Matrix load_probe(const std::string &path) {
    return deserialize(read_file(path)).op.matrix();
}

int run_classify(const ClassifyArgs &a) {
    const auto file = deserialize(read_file(a.file));
    ClassifyOptions opt;
    opt.tol = tolerances_from(a.tolerance);
    opt.kext_level = a.kext;

    std::string hint = a.hint;
    if (hint.empty()) {
        auto it = file.metadata.find("construction");
        if (it != file.metadata.end()) {
            hint = it->second;
        }
    }
    if (!hint.empty() && hint != "none") {
        opt.hint = parse_process_class(hint);
        if (!opt.hint) {
            throw Error(ErrorCode::BadParams, "unknown class hint '" + hint + "'");
        }
    }
    if (!a.probes.empty()) {
        if (a.probes.size() != 2) {
            throw Error(ErrorCode::BadParams, "--probe must be given exactly twice");
        }
        opt.probes.push_back({a.probe_time, {load_probe(a.probes[0]), load_probe(a.probes[1])}});
    }
    if (a.solver == "dr") {
        sdp::register_backend(sdp::make_douglas_rachford_backend());
    } else if (a.solver != "none") {
        throw Error(ErrorCode::BadParams, "unknown solver '" + a.solver + "'");
    }

    const ProcessTensor p(file.op);
    const auto report = classify(p, opt);
    std::cout << (a.json ? report.to_json() + "\n" : report.to_text());
    return report.causality.pass ? 0 : kExitInvalid;
}

int run_roundtrip(const std::string &path, const std::string &output) {
    const auto text = read_file(path);
    auto file = deserialize(text);
    const auto order = canonical_order(file.op.labels());
    file.op = permute(file.op, order);
    const auto out = serialize(file);
    write_output(output, out);
    if (out == text) {
        std::cerr << "roundtrip: identical\n";
    } else {
        std::cerr << "roundtrip: rewritten in canonical form\n";
    }
    return 0;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::SolverUnavailable: return kExitSolver;
        case ErrorCode::BadParams:
        case ErrorCode::UnknownName: return kExitUsage;
        default: return kExitInvalid;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Build, classify and serialize multi-time quantum processes"};
    app.require_subcommand(1);

    BuildArgs build;
    auto *b = app.add_subcommand("build", "write a named process file");
    b->add_option("name", build.name, "fig3 | guerin | common_cause | trivial_identity | random")->required();
    b->add_option("--n", build.n, "number of times")->capture_default_str();
    b->add_option("--d", build.d, "system dimension per wire")->capture_default_str();
    b->add_option("--class", build.cls, "class for random: M, MM, CM, SEP, QM")->capture_default_str();
    b->add_option("--seed", build.seed, "seed for random")->capture_default_str();
    b->add_option("--state", build.state, "state file for common_cause");
    b->add_option("-o,--output", build.output, "output path (default stdout)");

    ClassifyArgs cls;
    auto *c = app.add_subcommand("classify", "classify a process file");
    c->add_option("file", cls.file)->required();
    c->add_flag("--json", cls.json, "machine-readable report");
    c->add_option("--tolerance", cls.tolerance, "residual tolerance (also QPROC_TOLERANCE)");
    c->add_option("--probe", cls.probes, "probe state file; give twice")->allow_extra_args(false)->take_all();
    c->add_option("--probe-time", cls.probe_time, "time whose output receives the probes")->capture_default_str();
    c->add_option("--hint", cls.hint, "construction class, overrides file metadata; 'none' to ignore");
    c->add_option("--kext", cls.kext, "k-extension level for the SEP test (0 = off)")->capture_default_str();
    c->add_option("--solver", cls.solver, "dr or none")->capture_default_str();

    std::string rt_file;
    std::string rt_out;
    auto *r = app.add_subcommand("roundtrip", "import, canonicalize and re-export a process file");
    r->add_option("file", rt_file)->required();
    r->add_option("-o,--output", rt_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (b->parsed()) {
            write_output(build.output, serialize(run_build(build)));
            return 0;
        }
        if (c->parsed()) {
            return run_classify(cls);
        }
        return run_roundtrip(rt_file, rt_out);
    } catch (const Error &e) {
        std::cerr << "qproc: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "qproc: " << e.what() << "\n";
        return kExitInvalid;
    }
}
