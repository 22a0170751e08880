// Command-line frontend: run shipped protocols, sweep the special-state
// family, and execute circuit files.
//
// Exit codes: 0 success, 2 input validation, 3 circuit-file failure,
// 4 internal invariant breach.

#include "hyperconc/json_report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDsl = 3;
constexpr int kExitInvariant = 4;

void write_out(const std::string& payload, const std::string& path) {
    if (path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
    f << payload;
}

struct RunOptions {
    std::string protocol;
    double alpha2 = -1.0;
    double beta2 = -1.0;
    double delta2 = -1.0;
    double eta2 = -1.0;
    double phase_alpha = 0.0, phase_beta = 0.0, phase_delta = 0.0, phase_eta = 0.0;
    int n = 2;
    std::string detectors = "pnr";
    std::string format = "json";
    std::string out;
};

hyperconc::StateParams params_from(const RunOptions& opt) {
    using hyperconc::Complex;
    const double a2 = opt.alpha2;
    const double b2 = opt.beta2 >= 0.0 ? opt.beta2 : 1.0 - a2;
    const double d2 = opt.delta2;
    const double e2 = opt.eta2 >= 0.0 ? opt.eta2 : 1.0 - d2;
    if (a2 < 0.0 || a2 > 1.0 || d2 < 0.0 || d2 > 1.0)
        throw std::invalid_argument("alpha2 and delta2 must lie in [0,1]");
    if (std::abs(a2 + b2 - 1.0) > 1e-9)
        throw std::invalid_argument("alpha2 + beta2 must equal 1");
    if (std::abs(d2 + e2 - 1.0) > 1e-9)
        throw std::invalid_argument("delta2 + eta2 must equal 1");
    hyperconc::StateParams p{std::sqrt(a2), std::sqrt(b2), std::sqrt(d2), std::sqrt(e2)};
    p.alpha *= std::polar(1.0, opt.phase_alpha);
    p.beta *= std::polar(1.0, opt.phase_beta);
    p.delta *= std::polar(1.0, opt.phase_delta);
    p.eta *= std::polar(1.0, opt.phase_eta);
    return p;
}

int do_run(const RunOptions& opt) {
    using namespace hyperconc;
    auto params = params_from(opt);
    const DetectorModel model =
        opt.detectors == "threshold" ? DetectorModel::THRESHOLD : DetectorModel::NUMBER_RESOLVING;

    ProtocolReport report;
    if (opt.protocol == "scheme1-simple")
        report = run_scheme1(params, SpmVariant::SIMPLE, opt.n, model);
    else if (opt.protocol == "scheme1-improved")
        report = run_scheme1(params, SpmVariant::IMPROVED, opt.n, model);
    else if (opt.protocol == "scheme2")
        report = run_scheme2(params, opt.n);
    else
        throw std::invalid_argument("unknown protocol '" + opt.protocol + "'");

    std::string payload;
    if (opt.format == "json")
        payload = to_json(report).dump(2) + "\n";
    else if (opt.format == "csv")
        payload = to_csv(report);
    else
        payload = to_text(report);
    write_out(payload, opt.out);
    return kExitOk;
}

int do_sweep(int steps, const std::string& protocols, const std::string& out) {
    using namespace hyperconc;
    const bool s1 = protocols == "both" || protocols == "scheme1";
    const bool s2 = protocols == "both" || protocols == "scheme2";
    if (!s1 && !s2) throw std::invalid_argument("protocols must be both, scheme1 or scheme2");
    auto rows = sweep_special(steps, s1, s2);
    write_out(sweep_csv(rows), out);
    return kExitOk;
}

int do_circuit(const std::string& file, const std::vector<std::string>& binds,
               const std::string& detectors, const std::string& format, const std::string& out) {
    using namespace hyperconc;
    std::ifstream f(file);
    if (!f) {
        std::cerr << "error: cannot read circuit file '" << file << "'\n";
        return kExitDsl;
    }
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    dsl::Env env;
    for (const auto& b : binds) {
        const auto eq = b.find('=');
        double value = 0.0;
        try {
            if (eq == std::string::npos) throw std::invalid_argument("");
            value = std::stod(b.substr(eq + 1));
        } catch (...) {
            throw std::invalid_argument("malformed --bind '" + b + "', expected name=value");
        }
        env[b.substr(0, eq)] = value;
    }

    const DetectorModel model =
        detectors == "threshold" ? DetectorModel::THRESHOLD : DetectorModel::NUMBER_RESOLVING;
    auto run = dsl::run_circuit(text, env, model);
    for (const auto& d : run.diagnostics) std::cerr << file << ": " << dsl::to_string(d) << "\n";
    if (!run.ok) return kExitDsl;

    std::string payload;
    if (format == "json")
        payload = to_json(run.report).dump(2) + "\n";
    else {
        std::ostringstream os;
        os << "success probability: " << format_amplitude(run.report.success_probability) << "\n";
        for (const auto& s : run.report.stage_probabilities)
            os << "stage " << s.label << ": " << format_amplitude(s.probability) << "\n";
        for (const auto& rec : run.report.outcomes) {
            os << "  [" << rec.pattern << "] p=" << format_amplitude(rec.probability) << "\n";
        }
        payload = os.str();
    }
    write_out(payload, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact linear-optics runs of two hyperentanglement concentration protocols"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run a shipped protocol");
    run->add_option("--protocol", run_opt.protocol, "scheme1-simple | scheme1-improved | scheme2")
        ->required();
    run->add_option("--alpha2", run_opt.alpha2, "|alpha|^2 of the polarization pair")->required();
    run->add_option("--beta2", run_opt.beta2, "|beta|^2 (default: 1 - alpha2)");
    run->add_option("--delta2", run_opt.delta2, "|delta|^2 of the time-bin pair")->required();
    run->add_option("--eta2", run_opt.eta2, "|eta|^2 (default: 1 - delta2)");
    run->add_option("--phase-alpha", run_opt.phase_alpha, "phase of alpha in radians");
    run->add_option("--phase-beta", run_opt.phase_beta, "phase of beta in radians");
    run->add_option("--phase-delta", run_opt.phase_delta, "phase of delta in radians");
    run->add_option("--phase-eta", run_opt.phase_eta, "phase of eta in radians");
    run->add_option("--n", run_opt.n, "number of parties (GHZ size)")->check(CLI::Range(2, 8));
    run->add_option("--detectors", run_opt.detectors, "threshold | pnr")
        ->check(CLI::IsMember({"threshold", "pnr"}));
    run->add_option("--format", run_opt.format, "json | csv | text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    run->add_option("--out", run_opt.out, "output file (default: stdout)");

    int sweep_steps = 51;
    std::string sweep_protocols = "both";
    std::string sweep_out;
    bool sweep_special_flag = false;
    auto* sweep = app.add_subcommand("sweep", "success probabilities over the special family");
    sweep->add_flag("--special", sweep_special_flag,
                    "|alpha|=|delta|, |beta|=|eta| family on |beta|^2 in (0, 1/2]");
    sweep->add_option("--steps", sweep_steps, "grid points")->check(CLI::Range(2, 100000));
    sweep->add_option("--protocols", sweep_protocols, "both | scheme1 | scheme2");
    sweep->add_option("--out", sweep_out, "output CSV file (default: stdout)");

    std::string circuit_file;
    std::vector<std::string> circuit_binds;
    std::string circuit_detectors = "pnr";
    std::string circuit_format = "json";
    std::string circuit_out;
    auto* circuit = app.add_subcommand("circuit", "work with circuit files");
    auto* circuit_run = circuit->add_subcommand("run", "execute a .hqc circuit file");
    circuit_run->add_option("file", circuit_file, "circuit file")->required();
    circuit_run->add_option("--bind", circuit_binds, "parameter binding name=value");
    circuit_run->add_option("--detectors", circuit_detectors, "threshold | pnr")
        ->check(CLI::IsMember({"threshold", "pnr"}));
    circuit_run->add_option("--format", circuit_format, "json | text")
        ->check(CLI::IsMember({"json", "text"}));
    circuit_run->add_option("--out", circuit_out, "output file (default: stdout)");
    circuit->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (run->parsed()) return do_run(run_opt);
        if (sweep->parsed()) {
            if (!sweep_special_flag)
                throw std::invalid_argument("only the --special family sweep is available");
            return do_sweep(sweep_steps, sweep_protocols, sweep_out);
        }
        if (circuit->parsed())
            return do_circuit(circuit_file, circuit_binds, circuit_detectors, circuit_format,
                              circuit_out);
    } catch (const hyperconc::invariant_error& e) {
        std::cerr << "invariant breach: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
