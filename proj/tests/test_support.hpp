// Shared helpers for the test suites: tolerant comparisons and hand-rolled
// random generators for states, parameters and elements.

#pragma once

#include "hyperconc/elements.hpp"
#include "hyperconc/fock.hpp"

#include <random>

namespace hyperconc::testing {

inline bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline Mode mode(const std::string& path, char pol, int slot) {
    return Mode{path, pol == 'H' ? Polarization::H : Polarization::V, slot};
}

inline OccupationConfig cfg(std::initializer_list<Mode> modes) {
    std::vector<std::pair<Mode, int>> occ;
    for (const auto& m : modes) occ.emplace_back(m, 1);
    return OccupationConfig(std::move(occ));
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }

    Complex amplitude() {
        return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
    }

    // valid normalized parameters; real non-negative unless phases requested
    StateParams params(bool with_phases = false) {
        const double a2 = uniform(0.05, 0.95);
        const double d2 = uniform(0.05, 0.95);
        StateParams p = StateParams::from_squares(a2, d2);
        if (with_phases) {
            auto rot = [&](Complex v) { return v * std::polar(1.0, uniform(0.0, 6.283185307)); };
            p.alpha = rot(p.alpha);
            p.beta = rot(p.beta);
            p.delta = rot(p.delta);
            p.eta = rot(p.eta);
        }
        return p;
    }

    // random normalized state: <= max_photons photons spread over a small
    // path/pol/slot universe, a handful of superposed configurations
    PhotonicState state(int max_photons = 4, int n_paths = 3, int n_slots = 3, int n_terms = 5) {
        const int photons = 1 + pick(max_photons);
        PhotonicState::TermMap terms;
        for (int t = 0; t < n_terms; ++t) {
            OccupationConfig c;
            for (int k = 0; k < photons; ++k) {
                Mode m{"p" + std::to_string(pick(n_paths)),
                       pick(2) == 0 ? Polarization::H : Polarization::V, pick(n_slots)};
                c = c.with_added(m);
            }
            terms[c] += amplitude();
        }
        PhotonicState s{std::move(terms)};
        return normalize(s).state;
    }
};

}  // namespace hyperconc::testing
