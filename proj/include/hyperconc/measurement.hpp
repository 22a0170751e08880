// measurement.hpp
//
// Exhaustive enumeration of detection outcomes with click-pattern
// conditioning. Detection is time-resolved on a slot grid; the diagonal
// polarization basis is realized by PBS routing at 45 degrees onto the
// +/- detector axes. Threshold detectors merge number-resolved outcomes
// by click pattern, which is what turns failure branches into the
// classical mixtures analyzed by the threshold-vs-number-resolving
// comparison.

#pragma once

#include "hyperconc/elements.hpp"
#include "hyperconc/fock.hpp"

#include <optional>

namespace hyperconc {

enum class DetectorModel { THRESHOLD, NUMBER_RESOLVING };
enum class MeasurementBasis { HV, DIAG };

// One monitored spatial path. An empty slot window means every slot is
// inside the window; otherwise photons arriving outside the listed slots
// mark the outcome as out-of-window (still enumerated, never successful).
struct MonitoredPath {
    PathLabel path;
    MeasurementBasis basis = MeasurementBasis::HV;
    std::set<int> window;

    bool slot_in_window(int slot) const { return window.empty() || window.count(slot) != 0; }
};

struct DetectionSpec {
    std::vector<MonitoredPath> monitored;
    DetectorModel model = DetectorModel::NUMBER_RESOLVING;

    const MonitoredPath* find(const PathLabel& p) const {
        for (const auto& m : monitored)
            if (m.path == p) return &m;
        return nullptr;
    }
};

// Detector address: one output port of the measurement basis on one path,
// gated to one slot. `plus_axis` means H for the HV basis and + for the
// diagonal basis.
struct DetectorKey {
    PathLabel path;
    bool plus_axis = true;
    int slot = 0;

    friend auto operator<=>(const DetectorKey&, const DetectorKey&) = default;
};

using ClickPattern = std::map<DetectorKey, int>;

inline std::string to_string(const DetectorKey& k, MeasurementBasis basis) {
    const char axis = basis == MeasurementBasis::DIAG ? (k.plus_axis ? '+' : '-')
                                                      : (k.plus_axis ? 'H' : 'V');
    return std::string(1, axis) + "@" + k.path + ":" + std::to_string(k.slot);
}

// One pure branch of an outcome. For number-resolving detection every
// outcome has exactly one component; threshold merging can put orthogonal
// branches behind a single click pattern, giving a classical ensemble.
struct OutcomeComponent {
    double weight = 0.0;  // event probability of this pure branch
    PhotonicState conditional;  // normalized state on the surviving paths
};

struct DetectionOutcome {
    ClickPattern pattern;
    double probability = 0.0;
    bool in_window = true;
    std::vector<OutcomeComponent> components;

    bool is_pure() const { return components.size() == 1; }

    const PhotonicState& conditional_state() const {
        if (!is_pure())
            throw std::logic_error("outcome is a classical mixture; inspect components");
        return components.front().conditional;
    }
};

inline std::string render_pattern(const ClickPattern& pattern, const DetectionSpec& spec) {
    if (pattern.empty()) return "vac";
    std::string s;
    for (const auto& [key, count] : pattern) {
        if (!s.empty()) s += ", ";
        if (count > 1) s += std::to_string(count) + "x";
        const auto* mon = spec.find(key.path);
        s += to_string(key, mon ? mon->basis : MeasurementBasis::HV);
    }
    return s;
}

namespace detail {

// Basis change sending the +/- axes onto the H/V labels; identical to PBS
// routing at 45 degrees with the two output ports folded onto the
// polarization labels of the same path.
inline ModeTransform diag_axis_rotation(const PathLabel& path) {
    return ModeTransform(
        "diag_axes", {path}, [=](const Mode& m) -> ModeTransform::Image {
            const double sign = (m.pol == Polarization::H) ? 1.0 : -1.0;
            return {{Mode{path, Polarization::H, m.slot}, kInvSqrt2},
                    {Mode{path, Polarization::V, m.slot}, sign * kInvSqrt2}};
        });
}

}  // namespace detail

// Enumerates the exhaustive, disjoint set of detection outcomes of `spec`
// on a normalized state. Probabilities sum to 1 within 1e-10 (checked).
inline std::vector<DetectionOutcome> enumerate_outcomes(const PhotonicState& state,
                                                        const DetectionSpec& spec) {
    if (std::abs(state.norm_squared() - 1.0) > kNormTolerance)
        throw std::invalid_argument("enumerate_outcomes expects a normalized state");
    std::set<PathLabel> monitored_paths;
    for (const auto& m : spec.monitored) {
        if (!monitored_paths.insert(m.path).second)
            throw std::invalid_argument("path '" + m.path + "' monitored twice");
    }
    auto support = state.paths();
    for (const auto& m : spec.monitored)
        if (!support.count(m.path))
            throw std::invalid_argument("monitored path '" + m.path + "' carries no photons");

    // route diagonal-basis paths onto their detector axes
    PhotonicState rotated = state;
    for (const auto& m : spec.monitored)
        if (m.basis == MeasurementBasis::DIAG)
            rotated = apply(rotated, detail::diag_axis_rotation(m.path));

    // group amplitudes by the monitored part of each configuration
    std::map<OccupationConfig, PhotonicState::TermMap> groups;
    for (const auto& [cfg, amp] : rotated.terms()) {
        auto [mon, rest] = cfg.split_by_paths(monitored_paths);
        groups[mon][rest] += amp;
    }

    auto pattern_of = [](const OccupationConfig& mon, bool number_resolved) {
        ClickPattern p;
        for (const auto& [mode, count] : mon.occupations())
            p[DetectorKey{mode.path, mode.pol == Polarization::H, mode.slot}] =
                number_resolved ? count : 1;
        return p;
    };

    const bool number_resolved = spec.model == DetectorModel::NUMBER_RESOLVING;
    std::map<ClickPattern, DetectionOutcome> merged;
    for (auto& [mon, terms] : groups) {
        PhotonicState branch{std::move(terms)};
        const double weight = branch.norm_squared();
        if (weight < kAmplitudeTolerance * kAmplitudeTolerance) continue;
        bool in_window = true;
        for (const auto& [mode, count] : mon.occupations()) {
            const auto* mp = spec.find(mode.path);
            if (mp && !mp->slot_in_window(mode.slot)) in_window = false;
        }
        auto pattern = pattern_of(mon, number_resolved);
        auto& out = merged[pattern];
        out.pattern = std::move(pattern);
        out.probability += weight;
        out.in_window = out.components.empty() ? in_window : (out.in_window && in_window);
        out.components.push_back({weight, normalize(branch).state});
    }

    std::vector<DetectionOutcome> outcomes;
    outcomes.reserve(merged.size());
    double total = 0.0;
    for (auto& [pattern, out] : merged) {
        total += out.probability;
        outcomes.push_back(std::move(out));
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw invariant_error("detection outcome probabilities sum to " + std::to_string(total));
    return outcomes;
}

// --- post-selection ---------------------------------------------------------

struct Postselection {
    double probability = 0.0;
    std::optional<PhotonicState> conditional;  // absent when the kept branch is empty
};

// Keeps configurations holding exactly one photon (any polarization, any
// slot) in each of the listed paths.
inline Postselection postselect_one_photon_per_path(const PhotonicState& state,
                                                    const std::set<PathLabel>& paths) {
    PhotonicState::TermMap kept;
    for (const auto& [cfg, amp] : state.terms()) {
        bool ok = true;
        for (const auto& p : paths)
            if (cfg.photons_on_path(p) != 1) {
                ok = false;
                break;
            }
        if (ok) kept[cfg] = amp;
    }
    PhotonicState branch{std::move(kept)};
    const double prob = branch.norm_squared();
    if (branch.empty()) return {0.0, std::nullopt};
    return {prob, normalize(branch).state};
}

// Keeps configurations whose photons on `path` all lie in `kept_slots`.
// Configurations with no photon on the path pass the gate.
inline Postselection postselect_slot_window(const PhotonicState& state, const PathLabel& path,
                                            const std::set<int>& kept_slots) {
    PhotonicState::TermMap kept;
    for (const auto& [cfg, amp] : state.terms()) {
        bool ok = true;
        for (const auto& [mode, count] : cfg.occupations())
            if (mode.path == path && !kept_slots.count(mode.slot)) {
                ok = false;
                break;
            }
        if (ok) kept[cfg] = amp;
    }
    PhotonicState branch{std::move(kept)};
    const double prob = branch.norm_squared();
    if (branch.empty()) return {0.0, std::nullopt};
    return {prob, normalize(branch).state};
}

// --- threshold-detector failure analysis ------------------------------------

// One detector bank per party; a party registers when any detector in its
// bank clicks.
struct DetectorBank {
    std::string party;
    std::vector<PathLabel> paths;
};

struct MixtureComponent {
    double weight = 0.0;       // unnormalized event probability
    int kept_photons = 0;      // photons left on the kept paths
    std::string description;   // vacuum | n_photon | success
    std::vector<OutcomeComponent> branches;
};

// Classical mixture mistaken for success when every party's threshold
// detector bank clicks. Weights are reported unnormalized (event
// probabilities); `normalized_weight` divides by the accepted total.
struct MixtureReport {
    std::vector<MixtureComponent> components;  // ordered by kept photon count
    double accepted_weight = 0.0;

    double weight_for(int kept_photons) const {
        for (const auto& c : components)
            if (c.kept_photons == kept_photons) return c.weight;
        return 0.0;
    }

    double normalized_weight(int kept_photons) const {
        return accepted_weight > 0.0 ? weight_for(kept_photons) / accepted_weight : 0.0;
    }
};

inline MixtureReport assemble_threshold_mixture(const std::vector<DetectionOutcome>& outcomes,
                                                const std::vector<DetectorBank>& banks,
                                                const std::set<PathLabel>& kept_paths) {
    auto bank_clicked = [](const DetectionOutcome& out, const DetectorBank& bank) {
        for (const auto& [key, count] : out.pattern)
            if (count > 0)
                for (const auto& p : bank.paths)
                    if (key.path == p) return true;
        return false;
    };

    std::map<int, MixtureComponent> by_count;
    double accepted = 0.0;
    const int full = static_cast<int>(kept_paths.size());
    for (const auto& out : outcomes) {
        bool all_clicked = true;
        for (const auto& bank : banks)
            if (!bank_clicked(out, bank)) {
                all_clicked = false;
                break;
            }
        if (!all_clicked) continue;  // rejected: some party saw nothing
        accepted += out.probability;
        for (const auto& comp : out.components) {
            const int kept = comp.conditional.photon_count();
            auto& mc = by_count[kept];
            mc.kept_photons = kept;
            mc.weight += comp.weight;
            mc.branches.push_back(comp);
        }
    }

    MixtureReport report;
    report.accepted_weight = accepted;
    for (auto& [count, mc] : by_count) {
        mc.description = count == 0 ? "vacuum"
                         : count == full ? "success"
                                         : std::to_string(count) + "_photon";
        report.components.push_back(std::move(mc));
    }
    return report;
}

}  // namespace hyperconc
