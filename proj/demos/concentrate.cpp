// Minimal library walkthrough: build a partially hyperentangled pair, run
// both concentration protocols on it, and print what comes out.

#include "hyperconc/analysis.hpp"
#include "hyperconc/protocols.hpp"

#include <iostream>

int main() {
    using namespace hyperconc;

    auto params = StateParams::from_squares(0.8, 0.6);
    auto pair = build_hyper_pair(params, "A", "B");
    std::cout << "input state:\n" << to_string(pair) << "\n\n";

    auto pol = schmidt_per_dof(pair, {"A"}, {"B"}, Dof::POLARIZATION);
    std::cout << "polarization Schmidt coefficients: " << pol.coefficients[0] << ", "
              << pol.coefficients[1] << "\n\n";

    auto improved = run_scheme1(params, SpmVariant::IMPROVED);
    std::cout << "two-copy scheme, improved measurement: success = "
              << improved.success_probability << " (formula " << improved.closed_form.p1 << ")\n";

    auto known = run_scheme2(params);
    std::cout << "known-parameter scheme: success = " << known.success_probability << " (formula "
              << known.closed_form.p2 << ")\n\n";

    const auto& branch = known.outcomes.front().branches.front();
    std::cout << "one concentrated output (" << branch.target_id << "):\n"
              << to_string(branch.state) << "\n";
    return 0;
}
