#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qproc/classify.hpp"
#include "qproc/error.hpp"
#include "qproc/sdp.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

std::string_view to_string(ProcessClass c) {
    switch (c) {
        case ProcessClass::M: return "M";
        case ProcessClass::MM: return "MM";
        case ProcessClass::CM: return "CM";
        case ProcessClass::SEP: return "SEP";
        case ProcessClass::NS: return "NS";
        case ProcessClass::QM: return "QM";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::pass_by_construction: return "pass-by-construction";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<ProcessClass> parse_process_class(std::string_view name) {
    for (auto c : {ProcessClass::M, ProcessClass::MM, ProcessClass::CM, ProcessClass::SEP, ProcessClass::NS,
                   ProcessClass::QM}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

namespace {

// Strict inclusions M < MM < CM < SEP < QM, M < MM < NS < QM.
const std::vector<std::pair<ProcessClass, ProcessClass>> &inclusions() {
    static const std::vector<std::pair<ProcessClass, ProcessClass>> edges = {
        {ProcessClass::M, ProcessClass::MM},   {ProcessClass::MM, ProcessClass::CM}, {ProcessClass::CM, ProcessClass::SEP},
        {ProcessClass::SEP, ProcessClass::QM}, {ProcessClass::MM, ProcessClass::NS}, {ProcessClass::NS, ProcessClass::QM},
    };
    return edges;
}

bool included_in(ProcessClass small, ProcessClass big) {
    if (small == big) {
        return true;
    }
    for (const auto &[a, b] : inclusions()) {
        if (a == small && included_in(b, big)) {
            return true;
        }
    }
    return false;
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

}  // namespace

ClassificationReport classify(const ProcessTensor &p, const ClassifyOptions &options) {
    const auto &tol = options.tol;
    ClassificationReport r;
    r.n_times = p.n_times();
    for (const auto &l : p.op().labels()) {
        r.dims.push_back(l.dim);
    }
    r.tolerances = tol;
    r.normalization = p.op().trace().real();

    auto &v = r.verdicts;
    auto note = [&](std::string s) { r.notes.push_back(std::move(s)); };

    r.causality = validate_causality(p, tol);
    r.witnesses["causality_max_residual"] = r.causality.max_residual;
    r.witnesses["causality_final_trace"] = r.causality.final_trace;
    if (!r.causality.pass) {
        for (auto c : {ProcessClass::M, ProcessClass::MM, ProcessClass::CM, ProcessClass::SEP, ProcessClass::NS,
                       ProcessClass::QM}) {
            v[c] = Verdict::fail;
        }
        note(r.causality.psd ? "operator violates the causality chain" : "operator is not positive semidefinite");
        return r;
    }
    v[ProcessClass::QM] = Verdict::pass;

    r.nonsignalling = check_nonsignalling(p, tol);
    for (std::size_t i = 0; i < r.nonsignalling.residuals.size(); ++i) {
        r.witnesses["ns_residual_k" + std::to_string(i + 2)] = r.nonsignalling.residuals[i];
    }
    v[ProcessClass::NS] = r.nonsignalling.pass ? Verdict::pass : Verdict::fail;

    const auto tilde = memoryless_marginal_product(p);
    r.memoryless_gap = trace_distance(p.op(), tilde.op());
    r.memory_measure_bits = memory_measure(p, tol);
    r.witnesses["memoryless_gap"] = r.memoryless_gap;
    r.witnesses["memory_measure_bits"] = r.memory_measure_bits;
    const bool memoryless = r.memoryless_gap <= tol.memoryless;
    v[ProcessClass::M] = memoryless ? Verdict::pass : Verdict::fail;

    r.ppt = ppt_bipartitions(p, tol);
    r.witnesses["ppt_min_eigenvalue"] = r.ppt.min_eigenvalue;

    // Signalling from j^o to N^i is allowed for MM when j = N-1; only longer jumps count.
    double signalling = 0.0;
    for (const auto &req : options.probes) {
        r.signalling.push_back(signalling_witness(p, req.from_time, req.probes, {}, tol));
        r.witnesses["signalling_distance_" + std::to_string(req.from_time) + "o"] = r.signalling.back().distance;
        if (req.from_time + 1 < p.n_times()) {
            signalling = std::max(signalling, r.signalling.back().distance);
        }
    }

    if (p.n_times() == 2) {
        r.dilation = two_time_canonical_dilation(p, tol);
        r.witnesses["dilation_residual"] = r.dilation->reconstruction_residual;
        r.witnesses["dilation_channel_defect"] = r.dilation->channel_defect;
        if (r.dilation->rank_deficient) {
            note("initial marginal is rank deficient; dilation used the pseudo-inverse on its support");
        }
    }

    bool sep_failed = !r.ppt.pass;
    if (sep_failed) {
        note("negative partial transpose (" + fmt(r.ppt.min_eigenvalue) + ") rules out SEP, hence CM and MM");
    }
    if (options.kext_level >= 2) {
        // Only the SEP-relevant cut with the smallest extended side is tried.
        const auto side = channel_group(p, 1);
        r.extension = k_extension_feasibility(p, side, options.kext_level, tol);
        r.witnesses["kext_value"] = r.extension->value;
        if (r.extension->status == ExtensionStatus::infeasible) {
            sep_failed = true;
            note("no " + std::to_string(options.kext_level) + "-copy symmetric extension exists across 1i | rest");
        } else if (r.extension->status == ExtensionStatus::solver_limit) {
            note("k-extension test inconclusive: " + r.extension->detail);
        }
    }

    const auto hint = options.hint;
    auto hinted = [&](ProcessClass c) { return hint && included_in(*hint, c); };
    if (memoryless) {
        note("the marginal product reproduces the process, an explicit memoryless decomposition");
    }

    // SEP
    if (sep_failed) {
        v[ProcessClass::SEP] = Verdict::fail;
    } else if (memoryless || hinted(ProcessClass::SEP)) {
        v[ProcessClass::SEP] = Verdict::pass_by_construction;
    } else {
        v[ProcessClass::SEP] = Verdict::inconclusive;
        note("SEP not decided: PPT-consistent on every enumerated cut");
    }

    // CM: settled only by a construction or by a SEP witness.
    if (sep_failed) {
        v[ProcessClass::CM] = Verdict::fail;
    } else if (memoryless || hinted(ProcessClass::CM)) {
        v[ProcessClass::CM] = Verdict::pass_by_construction;
    } else if (p.n_times() == 2 && hinted(ProcessClass::MM)) {
        v[ProcessClass::CM] = Verdict::pass_by_construction;
    } else {
        v[ProcessClass::CM] = Verdict::inconclusive;
        note("CM membership is not decidable from the Choi operator alone; a realisation or a SEP witness is needed");
    }

    // MM: fails on NS violation, observed signalling or a SEP witness.
    const bool signals = signalling > tol.residual;
    if (!r.nonsignalling.pass || signals || sep_failed) {
        v[ProcessClass::MM] = Verdict::fail;
        if (!r.nonsignalling.pass) {
            note("non-signalling residual " + fmt(r.nonsignalling.max_residual) + " rules out MM");
        }
        if (signals) {
            note("signalling witness distance " + fmt(signalling) + " rules out MM");
        }
    } else if (memoryless || hinted(ProcessClass::MM)) {
        v[ProcessClass::MM] = Verdict::pass_by_construction;
    } else if (p.n_times() == 2 && hinted(ProcessClass::CM)) {
        // two-time classical memory processes are mixtures of memoryless ones
        v[ProcessClass::MM] = Verdict::pass_by_construction;
    } else {
        v[ProcessClass::MM] = Verdict::inconclusive;
    }

    if (hint) {
        const auto hv = v[*hint];
        if (hv == Verdict::fail) {
            note("construction hint " + std::string(to_string(*hint)) + " is contradicted by a witness");
        }
    }

    // A pass for a class must not coexist with a fail for a superset; witnesses win over hints.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &[small, big] : inclusions()) {
            if (passes(v[small]) && v[big] == Verdict::fail) {
                v[small] = Verdict::fail;
                note(std::string(to_string(small)) + " downgraded: superset " + std::string(to_string(big)) + " failed");
                changed = true;
            }
        }
    }
    return r;
}

namespace {

nlohmann::json number(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

std::string label_json_name(const SpaceLabel &l) {
    return to_string(l);
}

}  // namespace

std::string ClassificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["n_times"] = n_times;
    j["dims"] = dims;
    nlohmann::ordered_json verdict_json;
    for (const auto &[c, verdict] : verdicts) {
        verdict_json[std::string(to_string(c))] = std::string(to_string(verdict));
    }
    j["verdicts"] = verdict_json;
    nlohmann::ordered_json w;
    for (const auto &[k, x] : witnesses) {
        w[k] = number(x);
    }
    j["witnesses"] = w;
    j["ppt_cuts"] = nlohmann::json::array();
    for (const auto &cut : ppt.cuts) {
        nlohmann::ordered_json c;
        std::vector<std::string> names;
        for (const auto &l : cut.side) {
            names.push_back(label_json_name(l));
        }
        c["transposed"] = names;
        c["min_eigenvalue"] = number(cut.min_eigenvalue);
        j["ppt_cuts"].push_back(c);
    }
    j["tolerances"] = {{"hermiticity", tolerances.hermiticity}, {"psd", tolerances.psd},
                       {"spectral_cutoff", tolerances.spectral_cutoff}, {"residual", tolerances.residual},
                       {"memoryless", tolerances.memoryless}};
    j["entropy_log_base"] = 2;
    j["normalization"] = number(normalization);
    j["notes"] = notes;
    return j.dump(2);
}

std::string ClassificationReport::to_text() const {
    std::ostringstream out;
    out << "process: N = " << n_times << ", dims [";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out << (i ? " " : "") << dims[i];
    }
    out << "], trace " << fmt(normalization) << "\n";
    for (auto c : {ProcessClass::M, ProcessClass::MM, ProcessClass::CM, ProcessClass::SEP, ProcessClass::NS,
                   ProcessClass::QM}) {
        auto it = verdicts.find(c);
        if (it != verdicts.end()) {
            out << "  " << to_string(c) << ": " << to_string(it->second) << "\n";
        }
    }
    out << "witnesses:\n";
    for (const auto &[k, x] : witnesses) {
        out << "  " << k << " = " << fmt(x) << "\n";
    }
    for (const auto &cut : ppt.cuts) {
        out << "  ppt " << to_string(cut.side) << " min eigenvalue " << fmt(cut.min_eigenvalue) << "\n";
    }
    for (const auto &s : notes) {
        out << "note: " << s << "\n";
    }
    return out.str();
}

}  // namespace qproc
