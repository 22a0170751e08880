// protocols.hpp
//
// The shipped concentration procedures, wired from the element library and
// run through the shared pipeline engine.
//
// Scheme 1 (unknown parameters, two identical copies): a polarization
// parity check at Alice's station, a time-bin parity check at Bob's
// (Pockels cells converting slot parity into polarization parity around a
// PBS), post-selection on one photon per checked port, then a single-photon
// measurement of every party's second photon in the diagonal basis. The
// simple measurement succeeds only on middle-slot arrivals; the improved
// one re-encodes the slot into polarization and port labels first and
// succeeds deterministically.
//
// Scheme 2 (known parameters, one copy, one operating party): a wave plate
// diverts the polarization excess into a rejected port, then an unbalanced
// beam splitter, Pockels cells, a PBS and polarization-routed delay lines
// fold the time-bin excess into the middle slot, which a time gate rejects.
// A final 50:50 splitter merges the two surviving spatial modes; each
// output port carries one of the maximally hyperentangled targets.

#pragma once

#include "hyperconc/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>
#include <thread>

namespace hyperconc {

enum class ProtocolId { SCHEME1_SIMPLE, SCHEME1_IMPROVED, SCHEME2, SCHEME1_GHZ, SCHEME2_GHZ };
enum class SpmVariant { SIMPLE, IMPROVED };

inline std::string protocol_name(ProtocolId id) {
    switch (id) {
        case ProtocolId::SCHEME1_SIMPLE: return "scheme1-simple";
        case ProtocolId::SCHEME1_IMPROVED: return "scheme1-improved";
        case ProtocolId::SCHEME2: return "scheme2";
        case ProtocolId::SCHEME1_GHZ: return "scheme1-ghz";
        case ProtocolId::SCHEME2_GHZ: return "scheme2-ghz";
    }
    return "?";
}

struct MixtureSummary {
    DetectorModel model = DetectorModel::THRESHOLD;
    double accepted_weight = 0.0;
    // kept-photon count -> unnormalized event weight, with a description
    struct Entry {
        int kept_photons = 0;
        std::string description;
        double weight = 0.0;
        double normalized_weight = 0.0;
    };
    std::vector<Entry> entries;

    double weight_for(int kept) const {
        for (const auto& e : entries)
            if (e.kept_photons == kept) return e.weight;
        return 0.0;
    }
};

struct ProtocolReport {
    ProtocolId protocol = ProtocolId::SCHEME1_SIMPLE;
    int n_parties = 2;
    StateParams params;
    SpmVariant spm = SpmVariant::SIMPLE;
    DetectorModel detectors = DetectorModel::NUMBER_RESOLVING;
    double success_probability = 0.0;
    double closed_form_success = 0.0;  // the closed formula this configuration is expected to reach
    ClosedFormReport closed_form;
    std::vector<StageProbability> stage_probabilities;
    std::vector<OutcomeRecord> outcomes;
    std::optional<MixtureSummary> failure_breakdown;

    void check_against_closed_form() const {
        if (std::abs(success_probability - closed_form_success) > 1e-9)
            throw invariant_error("simulated success " + std::to_string(success_probability) +
                                  " disagrees with closed form " +
                                  std::to_string(closed_form_success));
    }
};

namespace detail {

inline std::vector<std::string> party_names(int n) {
    if (n < 2) throw std::invalid_argument("protocols need at least 2 parties");
    // outcome enumeration grows as 4^N for the two-copy scheme
    if (n > 8) throw std::invalid_argument("more than 8 parties is outside desk scale");
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.emplace_back(1, char('A' + i));
    return names;
}

}  // namespace detail

// --- scheme 1 ----------------------------------------------------------------

struct Scheme1Setup {
    Pipeline pipeline;           // parity stage + post-selection + measurement optics
    Pipeline mixture_pipeline;   // same optics without the one-photon gate
    PhotonicState initial;
    std::vector<DetectorBank> banks;
    std::set<PathLabel> kept_paths;
};

inline Scheme1Setup scheme1_setup(const StateParams& params, SpmVariant spm, int n_parties) {
    params.validate();
    const auto parties = detail::party_names(n_parties);
    std::vector<PathLabel> copy1, copy2;
    for (const auto& p : parties) {
        copy1.push_back(p + "1");
        copy2.push_back(p + "2");
    }

    Scheme1Setup setup;
    // second copy carries the polarization and time-bin flips (H<->V, S<->L)
    setup.initial = tensor(build_ghz(params, copy1), build_ghz(params.flipped(), copy2));

    Pipeline& pipe = setup.pipeline;
    // Alice: polarization parity check. Port a2 collects {H from A1, V from A2}
    // and feeds her measurement; a2 ends up with both photons exactly on the
    // odd-parity polarization terms.
    pipe.add(pbs_hv("A1", "A2", "a2", "a1"), "pbs_a");
    // Bob: slot-L Pockels cells on both inputs turn time parity into
    // polarization parity; the PBS compares it; the cell on b1 undoes the flip
    // on the kept photon.
    pipe.add(pockels("B1", {1}), "pc_l(B1)");
    pipe.add(pockels("B2", {1}), "pc_l(B2)");
    pipe.add(pbs_hv("B1", "B2", "b2", "b1"), "pbs_b");
    pipe.add(pockels("b1", {1}), "pc_l(b1)");

    std::vector<PathLabel> measured{"a2", "b2"};
    setup.kept_paths = {"a1", "b1"};
    for (int i = 2; i < n_parties; ++i) {
        measured.push_back(parties[i] + "2");
        setup.kept_paths.insert(parties[i] + "1");
    }

    std::set<PathLabel> parity_ports{"a1", "a2", "b1", "b2"};
    pipe.add_one_photon(parity_ports, "parity");

    // single-photon measurement of every party's second photon
    pipe.detection.model = DetectorModel::NUMBER_RESOLVING;
    for (const auto& m : measured) {
        DetectorBank bank{m, {}};
        if (spm == SpmVariant::SIMPLE) {
            pipe.add(plain_ui(m), "ui(" + m + ")");
            pipe.detection.monitored.push_back({m, MeasurementBasis::DIAG, {1}});
            bank.paths = {m};
        } else {
            pipe.add(tb_converter(m, m + "u", m + "d"), "tb(" + m + ")");
            pipe.add(bs50(m + "u", m + "d", m + "u", m + "d"), "bs(" + m + ")");
            pipe.detection.monitored.push_back({m + "u", MeasurementBasis::DIAG, {1}});
            pipe.detection.monitored.push_back({m + "d", MeasurementBasis::DIAG, {1}});
            bank.paths = {m + "u", m + "d"};
        }
        setup.banks.push_back(std::move(bank));
    }

    // threshold-failure variant: same optics, no parity post-selection,
    // detectors ungated in time
    Pipeline& mix = setup.mixture_pipeline;
    for (const auto& stage : pipe.stages)
        if (!std::holds_alternative<OnePhotonStage>(stage)) mix.stages.push_back(stage);
    mix.detection.model = DetectorModel::THRESHOLD;
    for (const auto& mon : pipe.detection.monitored)
        mix.detection.monitored.push_back({mon.path, mon.basis, {}});
    return setup;
}

inline ProtocolReport run_scheme1(const StateParams& params, SpmVariant spm, int n_parties = 2,
                                  DetectorModel detectors = DetectorModel::NUMBER_RESOLVING) {
    auto setup = scheme1_setup(params, spm, n_parties);
    auto engine = run_pipeline(setup.initial, setup.pipeline);

    ProtocolReport report;
    report.protocol = n_parties > 2 ? ProtocolId::SCHEME1_GHZ
                      : spm == SpmVariant::SIMPLE ? ProtocolId::SCHEME1_SIMPLE
                                                  : ProtocolId::SCHEME1_IMPROVED;
    report.n_parties = n_parties;
    report.params = params;
    report.spm = spm;
    report.detectors = detectors;
    report.closed_form = closed_forms(params);
    report.stage_probabilities = std::move(engine.stage_probabilities);
    report.outcomes = std::move(engine.outcomes);
    report.success_probability = engine.success_probability;
    // improved measurement succeeds on every pattern; the simple one needs
    // every party's photon in the middle slot, halving the odds per party
    report.closed_form_success = spm == SpmVariant::IMPROVED
                                     ? report.closed_form.p1
                                     : report.closed_form.p1 / double(1 << n_parties);

    // failure analysis: run the same optics without the parity gate and ask
    // what clicking detectors would accept
    PhotonicState mix_state = normalize(setup.initial).state;
    for (const auto& stage : setup.mixture_pipeline.stages)
        if (const auto* t = std::get_if<TransformStage>(&stage)) mix_state = apply(mix_state, t->transform);
    auto mix_outcomes = enumerate_outcomes(mix_state, setup.mixture_pipeline.detection);
    auto mixture = assemble_threshold_mixture(mix_outcomes, setup.banks, setup.kept_paths);

    MixtureSummary summary;
    summary.model = detectors;
    summary.accepted_weight = mixture.accepted_weight;
    for (const auto& comp : mixture.components) {
        if (detectors == DetectorModel::NUMBER_RESOLVING && comp.kept_photons != n_parties)
            continue;  // number resolution rejects everything but the full class
        summary.entries.push_back({comp.kept_photons, comp.description, comp.weight,
                                   mixture.accepted_weight > 0.0 ? comp.weight / mixture.accepted_weight
                                                                 : 0.0});
    }
    if (detectors == DetectorModel::NUMBER_RESOLVING && !summary.entries.empty())
        summary.accepted_weight = summary.entries.front().weight;
    report.failure_breakdown = std::move(summary);

    report.check_against_closed_form();
    return report;
}

// --- scheme 2 ----------------------------------------------------------------

// Arm assignment of the two polarization-routed delay lines. The default is
// the one that folds exactly the middle-slot components out; swapping it is
// exposed for sensitivity runs and is not expected to reach the closed form.
struct Scheme2Config {
    int n_parties = 2;
    int operating_party = 0;
    Polarization arm1_long = Polarization::H;
    Polarization arm2_long = Polarization::V;

    bool canonical_arms() const {
        return arm1_long == Polarization::H && arm2_long == Polarization::V;
    }
};

inline ProtocolReport run_scheme2(const StateParams& params, const Scheme2Config& config) {
    params.validate();
    if (!params.is_real_nonnegative())
        throw std::invalid_argument(
            "scheme 2 needs real non-negative parameters; phases cannot be split off by the wave "
            "plate");
    if (std::abs(params.alpha) < std::abs(params.beta))
        throw std::invalid_argument(
            "scheme 2 assumes |alpha| >= |beta|; swap the H/V roles of the input state");
    const int n_parties = config.n_parties;
    const int operating_party = config.operating_party;
    const auto parties = detail::party_names(n_parties);
    if (operating_party < 0 || operating_party >= n_parties)
        throw std::invalid_argument("operating party out of range");
    const std::string& x = parties[operating_party];

    Pipeline pipe;
    const double theta = std::acos(std::abs(params.beta) / std::abs(params.alpha));
    // stage 1: parameter splitting in polarization
    pipe.add(pbs_hv(x, x + ".in2", x + ".h", x + ".v"), "split");
    pipe.add(waveplate(x + ".h", theta), "r_plate");
    pipe.add(pbs_hv(x + ".h", x + ".v", x + ".m", x + ".3"), "merge");
    pipe.add_one_photon({x + ".m"}, "parameter_splitting");
    // stage 2: time-bin concentration
    pipe.add(ubs(std::abs(params.delta), std::abs(params.eta), x + ".m", x + ".1", x + ".2"), "ubs");
    pipe.add(pockels(x + ".1", {0}), "pc_s");
    pipe.add(pockels(x + ".2", {1}), "pc_l");
    pipe.add(pbs_hv(x + ".1", x + ".2", x + ".1", x + ".2"), "pbs");
    pipe.add(pol_routed_delay(x + ".1", config.arm1_long), "ui_1");
    pipe.add(pol_routed_delay(x + ".2", config.arm2_long), "ui_2");
    pipe.add_slot_window({{x + ".1", {0, 2}}, {x + ".2", {0, 2}}}, "time_gate");
    pipe.add(bs50(x + ".1", x + ".2", x + ".o1", x + ".o2"), "bs_out");

    auto initial = build_ghz(params, std::vector<PathLabel>(parties.begin(), parties.end()));
    auto engine = run_pipeline(initial, pipe);

    ProtocolReport report;
    report.protocol = n_parties > 2 ? ProtocolId::SCHEME2_GHZ : ProtocolId::SCHEME2;
    report.n_parties = n_parties;
    report.params = params;
    report.detectors = DetectorModel::NUMBER_RESOLVING;
    report.closed_form = closed_forms(params);
    report.closed_form_success = report.closed_form.p2;
    report.stage_probabilities = std::move(engine.stage_probabilities);
    report.outcomes = std::move(engine.outcomes);
    report.success_probability = engine.success_probability;
    if (config.canonical_arms()) report.check_against_closed_form();
    return report;
}

inline ProtocolReport run_scheme2(const StateParams& params, int n_parties = 2,
                                  int operating_party = 0) {
    Scheme2Config config;
    config.n_parties = n_parties;
    config.operating_party = operating_party;
    return run_scheme2(params, config);
}

// --- parameter sweep ---------------------------------------------------------

struct SweepRow {
    std::string param;
    double beta2 = 0.0;
    double success_sim = 0.0;
    double success_formula = 0.0;
    std::string protocol;
};

inline int sweep_thread_cap() {
    if (const char* env = std::getenv("HYPERCONC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Success probabilities over the special family |alpha| = |delta|,
// |beta| = |eta|, on the abscissa |beta|^2 in (0, 1/2]. Each grid point runs
// the full enumeration next to the closed formula. Rows come back ordered by
// abscissa then protocol, whatever the thread schedule.
inline std::vector<SweepRow> sweep_special(int steps, bool scheme1 = true, bool scheme2 = true) {
    if (steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
    std::vector<double> grid;
    for (int j = 1; j <= steps; ++j) grid.push_back(0.5 * j / steps);

    std::vector<std::vector<SweepRow>> per_point(grid.size());
    const int n_threads = std::min<int>(sweep_thread_cap(), static_cast<int>(grid.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
            const double b2 = grid[i];
            auto params = StateParams::from_squares(1.0 - b2, 1.0 - b2);
            auto& rows = per_point[i];
            if (scheme1) {
                auto r = run_scheme1(params, SpmVariant::IMPROVED);
                rows.push_back({"special", b2, r.success_probability, r.closed_form.p1,
                                "scheme1-improved"});
            }
            if (scheme2) {
                auto r = run_scheme2(params);
                rows.push_back({"special", b2, r.success_probability, r.closed_form.p2, "scheme2"});
            }
        }
    };
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<SweepRow> rows;
    for (auto& pr : per_point)
        for (auto& r : pr) rows.push_back(std::move(r));
    return rows;
}

// Explicit grid of (alpha2, delta2) points. Scheme-2 rows violating the
// |alpha| >= |beta| assumption are marked in the param column, not fatal.
inline std::vector<SweepRow> sweep_grid(const std::vector<std::pair<double, double>>& points,
                                        bool scheme1 = true, bool scheme2 = true) {
    std::vector<SweepRow> rows;
    for (const auto& [a2, d2] : points) {
        auto params = StateParams::from_squares(a2, d2);
        const double b2 = 1.0 - a2;
        if (scheme1) {
            auto r = run_scheme1(params, SpmVariant::IMPROVED);
            rows.push_back({"grid", b2, r.success_probability, r.closed_form.p1,
                            "scheme1-improved"});
        }
        if (scheme2) {
            if (a2 < b2) {
                rows.push_back({"grid-precondition-violated", b2,
                                std::numeric_limits<double>::quiet_NaN(), closed_forms(params).p2,
                                "scheme2"});
            } else {
                auto r = run_scheme2(params);
                rows.push_back({"grid", b2, r.success_probability, r.closed_form.p2, "scheme2"});
            }
        }
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "param,beta2,success_sim,success_formula,protocol\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%s\n", r.param.c_str(), r.beta2,
                      r.success_sim, r.success_formula, r.protocol.c_str());
        csv += buf;
    }
    return csv;
}

}  // namespace hyperconc
