#include "test_support.hpp"

#include "hyperconc/analysis.hpp"
#include "hyperconc/elements.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hyperconc;
using namespace hyperconc::testing;

namespace {
SlotMap identity_slots(std::initializer_list<PathLabel> paths) {
    SlotMap m;
    for (const auto& p : paths) m[p] = {0, 1};
    return m;
}
}  // namespace

TEST_CASE("fidelity basics") {
    auto pp = target_state(+1, +1, {"A", "B"}, identity_slots({"A", "B"}));
    auto mm = target_state(-1, -1, {"A", "B"}, identity_slots({"A", "B"}));
    CHECK(close(fidelity(pp, pp), 1.0));
    CHECK(close(fidelity(pp, mm), 0.0));

    // partially entangled pair against the all-plus target:
    // |<psi_pp|phi>|^2 = |(alpha+beta)(delta+eta)/2|^2
    auto p = StateParams::from_squares(0.8, 0.6);
    auto phi = build_hyper_pair(p, "A", "B");
    const double expected =
        std::norm((p.alpha + p.beta) * (p.delta + p.eta) * 0.5);
    CHECK(close(fidelity(phi, pp), expected));
    CHECK(close(expected, 0.8909081537009721, 1e-12));

    CHECK(close(fidelity(pp, mm), fidelity(mm, pp)));
    CHECK(close(fidelity(phi.scaled(std::polar(1.0, 1.3)), pp), expected));

    auto other = target_state(+1, +1, {"A", "C"}, identity_slots({"A", "C"}));
    CHECK_THROWS_AS(fidelity(pp, other), std::invalid_argument);
}

TEST_CASE("schmidt coefficients per degree of freedom") {
    auto p = StateParams::from_squares(0.8, 0.6);
    auto phi = build_hyper_pair(p, "A", "B");

    auto pol = schmidt_per_dof(phi, {"A"}, {"B"}, Dof::POLARIZATION);
    REQUIRE(pol.coefficients.size() == 2);
    CHECK(close(pol.coefficients[0], std::sqrt(0.8), 1e-10));
    CHECK(close(pol.coefficients[1], std::sqrt(0.2), 1e-10));

    auto time = schmidt_per_dof(phi, {"A"}, {"B"}, Dof::TIME_BIN);
    CHECK(close(time.coefficients[0], std::sqrt(0.6), 1e-10));
    CHECK(close(time.coefficients[1], std::sqrt(0.4), 1e-10));

    auto pp = target_state(+1, +1, {"A", "B"}, identity_slots({"A", "B"}));
    for (auto dof : {Dof::POLARIZATION, Dof::TIME_BIN}) {
        auto r = schmidt_per_dof(pp, {"A"}, {"B"}, dof);
        CHECK(close(r.coefficients[0], kInvSqrt2, 1e-10));
        CHECK(close(r.coefficients[1], kInvSqrt2, 1e-10));
    }

    auto product = build_hyper_pair({1.0, 0.0, 1.0, 0.0}, "A", "B");
    auto r = schmidt_per_dof(product, {"A"}, {"B"}, Dof::POLARIZATION);
    CHECK(close(r.coefficients[0], 1.0, 1e-10));
    CHECK(close(r.coefficients[1], 0.0, 1e-10));
}

TEST_CASE("schmidt coefficients ignore local unitaries") {
    Rng rng(17);
    auto p = StateParams::from_squares(0.65, 0.35);
    auto phi = build_hyper_pair(p, "A", "B");
    for (int i = 0; i < 8; ++i) {
        auto rotated = apply(apply(phi, waveplate("A", rng.uniform(0.0, 3.1))),
                             waveplate("B", rng.uniform(0.0, 3.1)));
        auto r = schmidt_per_dof(normalize(rotated).state, {"A"}, {"B"}, Dof::POLARIZATION);
        CHECK(close(r.coefficients[0], std::sqrt(0.65), 1e-9));
        CHECK(close(r.coefficients[1], std::sqrt(0.35), 1e-9));
    }
}

TEST_CASE("non-factorizable states are rejected") {
    // polarization correlated with time: no pol x time product structure
    PhotonicState::TermMap t;
    t[cfg({mode("A", 'H', 0), mode("B", 'H', 0)})] = kInvSqrt2;
    t[cfg({mode("A", 'V', 1), mode("B", 'V', 1)})] = kInvSqrt2;
    PhotonicState broken{std::move(t)};
    CHECK_THROWS_AS(schmidt_per_dof(broken, {"A"}, {"B"}, Dof::POLARIZATION),
                    std::invalid_argument);
}

TEST_CASE("three-party GHZ bipartitions are maximally mixed per party") {
    auto pp = target_state(+1, +1, {"A", "B", "C"}, identity_slots({"A", "B", "C"}));
    for (auto dof : {Dof::POLARIZATION, Dof::TIME_BIN}) {
        auto one_vs_rest = schmidt_per_dof(pp, {"A"}, {"B", "C"}, dof);
        CHECK(close(one_vs_rest.coefficients[0], kInvSqrt2, 1e-10));
        CHECK(close(one_vs_rest.coefficients[1], kInvSqrt2, 1e-10));
    }
}

TEST_CASE("closed forms evaluate the tabulated expressions") {
    auto r = closed_forms(StateParams::from_squares(0.8, 0.6));
    CHECK(close(r.p0, 0.0384));
    CHECK(close(r.p1, 0.1536));
    CHECK(close(r.p2, 0.192));
    CHECK(close(r.f0, 0.1536));
    CHECK(close(r.f1, 0.416));
    CHECK(close(r.f2, r.p1));

    auto sym = closed_forms(StateParams::from_squares(0.5, 0.5));
    CHECK(close(sym.p0, 1.0 / 16.0));
    CHECK(close(sym.p1, 0.25));
    CHECK(close(sym.p2, 0.5));
    CHECK(close(sym.f0, 1.0 / 16.0));
    CHECK(close(sym.f1, 0.25));
    CHECK(close(sym.f2, 0.25));

    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        auto p = rng.params();
        auto c = closed_forms(p);
        CHECK(close(c.p1, 4.0 * c.p0));
        CHECK(c.p0 >= 0.0);
        CHECK(c.p2 <= 1.0);
    }
}
