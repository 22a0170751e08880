// json_report.hpp
//
// JSON views of protocol and circuit reports. Key order is fixed by
// construction and the payload carries no timestamps, so identical inputs
// serialize to identical bytes.

#pragma once

#include "hyperconc/dsl.hpp"
#include "hyperconc/protocols.hpp"

#include <json.hpp>

#include <sstream>

namespace hyperconc {

using ordered_json = nlohmann::ordered_json;

inline const char* to_string(DetectorModel m) {
    return m == DetectorModel::THRESHOLD ? "threshold" : "pnr";
}

inline ordered_json to_json(const StateParams& p) {
    ordered_json j;
    j["alpha2"] = std::norm(p.alpha);
    j["beta2"] = std::norm(p.beta);
    j["delta2"] = std::norm(p.delta);
    j["eta2"] = std::norm(p.eta);
    auto phase = [](Complex c) { return c == Complex(0.0) ? 0.0 : std::arg(c); };
    if (phase(p.alpha) != 0.0 || phase(p.beta) != 0.0 || phase(p.delta) != 0.0 ||
        phase(p.eta) != 0.0) {
        j["phase_alpha"] = phase(p.alpha);
        j["phase_beta"] = phase(p.beta);
        j["phase_delta"] = phase(p.delta);
        j["phase_eta"] = phase(p.eta);
    }
    return j;
}

inline ordered_json to_json(const std::vector<StageProbability>& stages) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : stages) {
        ordered_json j;
        j["label"] = s.label;
        j["probability"] = s.probability;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline ordered_json to_json(const OutcomeRecord& rec) {
    ordered_json j;
    j["pattern"] = rec.pattern;
    j["probability"] = rec.probability;
    j["in_window"] = rec.in_window;
    j["successful_weight"] = rec.successful_weight();
    ordered_json branches = ordered_json::array();
    for (const auto& b : rec.branches) {
        ordered_json bj;
        bj["weight"] = b.weight;
        bj["successful"] = b.successful;
        if (!b.target_id.empty()) {
            bj["target"] = b.target_id;
            bj["fidelity"] = b.fidelity;
        }
        bj["state"] = to_string(b.state);
        branches.push_back(std::move(bj));
    }
    j["branches"] = std::move(branches);
    return j;
}

inline ordered_json to_json(const std::vector<OutcomeRecord>& outcomes) {
    ordered_json arr = ordered_json::array();
    for (const auto& rec : outcomes) arr.push_back(to_json(rec));
    return arr;
}

inline ordered_json to_json(const MixtureSummary& mix) {
    ordered_json j;
    j["model"] = to_string(mix.model);
    j["accepted_weight"] = mix.accepted_weight;
    ordered_json comps = ordered_json::array();
    for (const auto& e : mix.entries) {
        ordered_json c;
        c["kept_photons"] = e.kept_photons;
        c["description"] = e.description;
        c["weight"] = e.weight;
        c["normalized_weight"] = e.normalized_weight;
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    return j;
}

inline ordered_json to_json(const ProtocolReport& r) {
    ordered_json j;
    j["protocol"] = protocol_name(r.protocol);
    j["n_parties"] = r.n_parties;
    if (r.protocol == ProtocolId::SCHEME1_SIMPLE || r.protocol == ProtocolId::SCHEME1_IMPROVED ||
        r.protocol == ProtocolId::SCHEME1_GHZ)
        j["spm"] = r.spm == SpmVariant::SIMPLE ? "simple" : "improved";
    j["detectors"] = to_string(r.detectors);
    j["params"] = to_json(r.params);
    j["success_probability"] = r.success_probability;
    j["closed_form_success"] = r.closed_form_success;
    ordered_json cf;
    cf["p0"] = r.closed_form.p0;
    cf["p1"] = r.closed_form.p1;
    cf["p2"] = r.closed_form.p2;
    cf["f0"] = r.closed_form.f0;
    cf["f1"] = r.closed_form.f1;
    cf["f2"] = r.closed_form.f2;
    j["closed_form"] = std::move(cf);
    j["stage_probabilities"] = to_json(r.stage_probabilities);
    j["outcomes"] = to_json(r.outcomes);
    if (r.failure_breakdown) j["failure_breakdown"] = to_json(*r.failure_breakdown);
    return j;
}

inline ordered_json to_json(const EngineReport& r) {
    ordered_json j;
    j["success_probability"] = r.success_probability;
    j["kept_weight"] = r.kept_weight;
    j["stage_probabilities"] = to_json(r.stage_probabilities);
    j["outcomes"] = to_json(r.outcomes);
    return j;
}

// Human-oriented one-screen summary.
inline std::string to_text(const ProtocolReport& r) {
    std::ostringstream os;
    os << "protocol:            " << protocol_name(r.protocol) << " (N=" << r.n_parties << ")\n";
    os << "success probability: " << format_amplitude(r.success_probability) << "\n";
    os << "closed form:         " << format_amplitude(r.closed_form_success) << "\n";
    for (const auto& s : r.stage_probabilities)
        os << "stage " << s.label << ": " << format_amplitude(s.probability) << "\n";
    os << "outcomes: " << r.outcomes.size() << "\n";
    for (const auto& rec : r.outcomes) {
        os << "  [" << rec.pattern << "] p=" << format_amplitude(rec.probability);
        if (!rec.in_window) os << " (outside window)";
        for (const auto& b : rec.branches)
            if (b.successful) os << " -> " << b.target_id;
        os << "\n";
    }
    if (r.failure_breakdown) {
        os << "threshold acceptance breakdown:\n";
        for (const auto& e : r.failure_breakdown->entries)
            os << "  " << e.description << ": " << format_amplitude(e.weight) << "\n";
    }
    return os.str();
}

// Flat CSV of the outcome table: one row per branch.
inline std::string to_csv(const ProtocolReport& r) {
    std::string csv = "pattern,probability,in_window,branch_weight,successful,target,fidelity\n";
    char buf[256];
    for (const auto& rec : r.outcomes) {
        for (const auto& b : rec.branches) {
            std::snprintf(buf, sizeof buf, "\"%s\",%.12g,%d,%.12g,%d,%s,%.12g\n",
                          rec.pattern.c_str(), rec.probability, rec.in_window ? 1 : 0, b.weight,
                          b.successful ? 1 : 0, b.target_id.empty() ? "none" : b.target_id.c_str(),
                          b.fidelity);
            csv += buf;
        }
    }
    return csv;
}

}  // namespace hyperconc
