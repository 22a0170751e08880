// pipeline.hpp
//
// A protocol run is a pipeline: mode transforms interleaved with
// post-selection gates, followed by an optional detection stage. The
// executor propagates the state exactly, enumerates outcomes, splits every
// conditional state into its occupied-path branches, and classifies each
// branch against the four maximally hyperentangled targets compatible with
// the branch's own slot support. Both the shipped protocols and elaborated
// circuit files run through this engine.

#pragma once

#include "hyperconc/analysis.hpp"
#include "hyperconc/elements.hpp"
#include "hyperconc/fock.hpp"
#include "hyperconc/measurement.hpp"

#include <variant>

namespace hyperconc {

struct TransformStage {
    ModeTransform transform;
    std::string label;
};

struct OnePhotonStage {
    std::set<PathLabel> paths;
    std::string label;
};

struct SlotWindowStage {
    std::vector<std::pair<PathLabel, std::set<int>>> windows;
    std::string label;
};

using Stage = std::variant<TransformStage, OnePhotonStage, SlotWindowStage>;

struct Pipeline {
    std::vector<Stage> stages;
    DetectionSpec detection;  // empty `monitored` means no detection stage

    void add(ModeTransform t, std::string label = {}) {
        if (label.empty()) label = t.name();
        stages.push_back(TransformStage{std::move(t), std::move(label)});
    }
    void add_one_photon(std::set<PathLabel> paths, std::string label) {
        stages.push_back(OnePhotonStage{std::move(paths), std::move(label)});
    }
    void add_slot_window(std::vector<std::pair<PathLabel, std::set<int>>> windows,
                         std::string label) {
        stages.push_back(SlotWindowStage{std::move(windows), std::move(label)});
    }
};

struct StageProbability {
    std::string label;
    double probability = 1.0;
};

// One occupied-path branch of an outcome's conditional state, classified.
struct ClassifiedBranch {
    double weight = 0.0;  // relative to the outcome; branch weights sum to 1
    PhotonicState state;
    bool successful = false;
    std::string target_id;  // psi_pp / psi_pm / psi_mp / psi_mm, or empty
    double fidelity = 0.0;
};

struct OutcomeRecord {
    std::string pattern;
    double probability = 0.0;  // absolute: includes earlier post-selection weights
    bool in_window = true;
    std::vector<ClassifiedBranch> branches;

    double successful_weight() const {  // relative to the outcome
        double w = 0.0;
        for (const auto& b : branches)
            if (b.successful) w += b.weight;
        return w;
    }
};

struct EngineReport {
    std::vector<StageProbability> stage_probabilities;
    double kept_weight = 1.0;  // product of all post-selection stage probabilities
    PhotonicState pre_detection_state;
    std::vector<OutcomeRecord> outcomes;
    double success_probability = 0.0;
};

inline const char* target_id(int sign_pol, int sign_time) {
    if (sign_pol > 0) return sign_time > 0 ? "psi_pp" : "psi_pm";
    return sign_time > 0 ? "psi_mp" : "psi_mm";
}

// Fidelity-maximizing target among explicit candidates.
inline std::pair<std::string, double> classify_output(
    const PhotonicState& state, const std::vector<std::pair<std::string, PhotonicState>>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("classify_output: empty candidate set");
    std::string best_id;
    double best = -1.0;
    for (const auto& [id, target] : candidates) {
        const double f = fidelity(state, target);
        if (f > best) {
            best = f;
            best_id = id;
        }
    }
    return {best_id, best};
}

namespace detail {

// The four sign choices of the maximally hyperentangled state over the
// branch's occupied paths, with per-path slot pairs read off the branch's
// own support. Returns nothing when the branch cannot host such a target
// (wrong photon pattern or slot support).
inline std::vector<std::pair<std::string, PhotonicState>> auto_targets(const PhotonicState& branch) {
    auto paths_set = branch.paths();
    if (paths_set.size() < 2) return {};
    std::vector<PathLabel> paths(paths_set.begin(), paths_set.end());
    for (const auto& [cfg, amp] : branch.terms())
        for (const auto& p : paths)
            if (cfg.photons_on_path(p) != 1) return {};
    SlotMap slot_map;
    for (const auto& p : paths) {
        auto slots = branch.slots_on_path(p);
        if (slots.size() != 2) return {};
        slot_map[p] = SlotPair{*slots.begin(), *std::next(slots.begin())};
    }
    std::vector<std::pair<std::string, PhotonicState>> targets;
    for (int sp : {+1, -1})
        for (int st : {+1, -1})
            targets.emplace_back(target_id(sp, st), target_state(sp, st, paths, slot_map));
    return targets;
}

inline std::vector<ClassifiedBranch> classify_conditional(const PhotonicState& conditional,
                                                          bool eligible) {
    // split by occupied-path set; a branch selecting which paths hold the
    // photons is itself a post-selectable event
    std::map<std::set<PathLabel>, PhotonicState::TermMap> groups;
    for (const auto& [cfg, amp] : conditional.terms()) {
        std::set<PathLabel> occupied;
        for (const auto& [m, c] : cfg.occupations()) occupied.insert(m.path);
        groups[occupied][cfg] += amp;
    }
    std::vector<ClassifiedBranch> branches;
    for (auto& [paths, terms] : groups) {
        ClassifiedBranch b;
        PhotonicState raw{std::move(terms)};
        b.weight = raw.norm_squared();
        b.state = normalize(raw).state;
        if (eligible) {
            auto targets = auto_targets(b.state);
            if (!targets.empty()) {
                auto [id, f] = classify_output(b.state, targets);
                b.target_id = id;
                b.fidelity = f;
                b.successful = f >= 1.0 - 1e-12;
            }
        }
        branches.push_back(std::move(b));
    }
    return branches;
}

}  // namespace detail

inline EngineReport run_pipeline(const PhotonicState& initial, const Pipeline& pipeline) {
    EngineReport report;
    PhotonicState state = normalize(initial).state;

    for (const auto& stage : pipeline.stages) {
        if (state.empty()) break;
        if (const auto* t = std::get_if<TransformStage>(&stage)) {
            state = apply(state, t->transform);
        } else if (const auto* ps = std::get_if<OnePhotonStage>(&stage)) {
            auto sel = postselect_one_photon_per_path(state, ps->paths);
            report.stage_probabilities.push_back({ps->label, sel.probability});
            report.kept_weight *= sel.probability;
            if (!sel.conditional) return report;  // empty branch: success stays 0
            state = *sel.conditional;
        } else if (const auto* sw = std::get_if<SlotWindowStage>(&stage)) {
            double stage_prob = 1.0;
            for (const auto& [path, kept] : sw->windows) {
                auto sel = postselect_slot_window(state, path, kept);
                stage_prob *= sel.probability;
                if (!sel.conditional) {
                    report.stage_probabilities.push_back({sw->label, 0.0});
                    report.kept_weight = 0.0;
                    return report;
                }
                state = *sel.conditional;
            }
            report.stage_probabilities.push_back({sw->label, stage_prob});
            report.kept_weight *= stage_prob;
        }
    }
    report.pre_detection_state = state;
    if (state.empty()) return report;

    if (pipeline.detection.monitored.empty()) {
        // no detection: the final state itself is the single outcome
        OutcomeRecord rec;
        rec.pattern = "none";
        rec.probability = report.kept_weight;
        rec.branches = detail::classify_conditional(state, true);
        report.success_probability = rec.probability * rec.successful_weight();
        report.outcomes.push_back(std::move(rec));
        return report;
    }

    auto outcomes = enumerate_outcomes(state, pipeline.detection);
    for (const auto& out : outcomes) {
        OutcomeRecord rec;
        rec.pattern = render_pattern(out.pattern, pipeline.detection);
        rec.probability = report.kept_weight * out.probability;
        rec.in_window = out.in_window;
        for (const auto& comp : out.components) {
            auto branches = detail::classify_conditional(comp.conditional, out.in_window);
            const double comp_frac = comp.weight / out.probability;
            for (auto& b : branches) {
                b.weight *= comp_frac;
                rec.branches.push_back(std::move(b));
            }
        }
        report.success_probability += rec.probability * rec.successful_weight();
        report.outcomes.push_back(std::move(rec));
    }
    return report;
}

}  // namespace hyperconc
