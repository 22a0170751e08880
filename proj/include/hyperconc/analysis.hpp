// analysis.hpp
//
// Entanglement and agreement metrics: state fidelity, per-degree-of-freedom
// Schmidt coefficients across a party bipartition, and the closed-form
// success probabilities used as cross-checks against brute-force runs.

#pragma once

#include "hyperconc/fock.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace hyperconc {

// |<target|state>|^2 for normalized states sharing a path set.
inline double fidelity(const PhotonicState& state, const PhotonicState& target) {
    if (std::abs(state.norm_squared() - 1.0) > kNormTolerance ||
        std::abs(target.norm_squared() - 1.0) > kNormTolerance)
        throw std::invalid_argument("fidelity expects normalized states");
    if (state.paths() != target.paths())
        throw std::invalid_argument("fidelity: states live on different path sets");
    return std::norm(inner_product(target, state));
}

enum class Dof { POLARIZATION, TIME_BIN };

struct SchmidtReport {
    Dof dof = Dof::POLARIZATION;
    std::vector<PathLabel> left;
    std::vector<PathLabel> right;
    std::vector<double> coefficients;  // descending, sum of squares = 1
};

namespace detail {

// Per-path local bases discovered from the state's support. Each path must
// hold exactly one photon in every configuration.
struct LocalBases {
    std::vector<PathLabel> paths;
    std::map<PathLabel, std::vector<int>> slots;  // sorted distinct slots per path

    std::size_t pol_dim() const { return std::size_t(1) << paths.size(); }
    std::size_t time_dim() const {
        std::size_t d = 1;
        for (const auto& p : paths) d *= slots.at(p).size();
        return d;
    }
};

inline LocalBases discover_bases(const PhotonicState& state) {
    LocalBases b;
    auto paths = state.paths();
    b.paths.assign(paths.begin(), paths.end());
    for (const auto& [cfg, amp] : state.terms()) {
        for (const auto& p : b.paths)
            if (cfg.photons_on_path(p) != 1)
                throw std::invalid_argument("per-DOF analysis needs exactly one photon on path '" + p +
                                            "'");
    }
    for (const auto& p : b.paths) {
        auto s = state.slots_on_path(p);
        b.slots[p] = std::vector<int>(s.begin(), s.end());
    }
    return b;
}

// Amplitude matrix M[pol index][time index] of a one-photon-per-path state.
inline Eigen::MatrixXcd dof_matrix(const PhotonicState& state, const LocalBases& b) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index(b.pol_dim()), Eigen::Index(b.time_dim()));
    for (const auto& [cfg, amp] : state.terms()) {
        std::size_t pol_idx = 0, time_idx = 0;
        for (const auto& p : b.paths) {
            const Mode* mode = nullptr;
            for (const auto& [mm, c] : cfg.occupations())
                if (mm.path == p) mode = &mm;
            pol_idx = pol_idx * 2 + (mode->pol == Polarization::V ? 1 : 0);
            const auto& slots = b.slots.at(p);
            const auto it = std::find(slots.begin(), slots.end(), mode->slot);
            time_idx = time_idx * slots.size() + std::size_t(it - slots.begin());
        }
        m(Eigen::Index(pol_idx), Eigen::Index(time_idx)) = amp;
    }
    return m;
}

inline std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + svd.singularValues().size());
    return sv;
}

}  // namespace detail

// Checks that the state factorizes into a polarization part and a time part
// (rank-1 as a pol x time tensor, residual below 1e-10) and returns the two
// factors as coefficient vectors.
struct DofFactors {
    detail::LocalBases bases;
    Eigen::VectorXcd pol;   // over {H,V}^N, path-major
    Eigen::VectorXcd time;  // over the per-path slot bases, path-major
};

inline DofFactors factor_dofs(const PhotonicState& state) {
    if (std::abs(state.norm_squared() - 1.0) > kNormTolerance)
        throw std::invalid_argument("factor_dofs expects a normalized state");
    auto bases = detail::discover_bases(state);
    Eigen::MatrixXcd m = detail::dof_matrix(state, bases);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double residual_sq = 0.0;
    for (Eigen::Index i = 1; i < sv.size(); ++i) residual_sq += sv(i) * sv(i);
    if (std::sqrt(residual_sq) > 1e-10)
        throw std::invalid_argument("state does not factorize across degrees of freedom");
    DofFactors f;
    f.bases = std::move(bases);
    f.pol = svd.matrixU().col(0) * sv(0);
    f.time = svd.matrixV().col(0).conjugate();
    return f;
}

// Schmidt coefficients of the chosen degree of freedom across a bipartition
// of the parties (each party = one path).
inline SchmidtReport schmidt_per_dof(const PhotonicState& state,
                                     const std::vector<PathLabel>& left,
                                     const std::vector<PathLabel>& right, Dof dof) {
    auto f = factor_dofs(state);
    std::set<PathLabel> want(left.begin(), left.end());
    for (const auto& p : right)
        if (!want.insert(p).second)
            throw std::invalid_argument("bipartition sides overlap on '" + p + "'");
    std::set<PathLabel> have(f.bases.paths.begin(), f.bases.paths.end());
    if (want != have) throw std::invalid_argument("bipartition must cover exactly the state's paths");

    // reshape the chosen factor into a (left x right) matrix
    const auto& paths = f.bases.paths;
    auto local_dim = [&](const PathLabel& p) {
        return dof == Dof::POLARIZATION ? std::size_t(2) : f.bases.slots.at(p).size();
    };
    std::size_t ld = 1, rd = 1;
    for (const auto& p : left) ld *= local_dim(p);
    for (const auto& p : right) rd *= local_dim(p);
    const Eigen::VectorXcd& vec = dof == Dof::POLARIZATION ? f.pol : f.time;

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index(ld), Eigen::Index(rd));
    const std::size_t total = static_cast<std::size_t>(vec.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        // decode the path-major index into per-path digits
        std::map<PathLabel, std::size_t> digit;
        std::size_t rem = idx;
        for (auto it = paths.rbegin(); it != paths.rend(); ++it) {
            const std::size_t d = local_dim(*it);
            digit[*it] = rem % d;
            rem /= d;
        }
        std::size_t li = 0, ri = 0;
        for (const auto& p : left) li = li * local_dim(p) + digit[p];
        for (const auto& p : right) ri = ri * local_dim(p) + digit[p];
        m(Eigen::Index(li), Eigen::Index(ri)) += vec(Eigen::Index(idx));
    }

    SchmidtReport report;
    report.dof = dof;
    report.left = left;
    report.right = right;
    report.coefficients = detail::singular_values(m);
    double sum_sq = 0.0;
    for (double c : report.coefficients) sum_sq += c * c;
    if (std::abs(sum_sq - 1.0) > 1e-10)
        throw invariant_error("Schmidt coefficients squared sum to " + std::to_string(sum_sq));
    return report;
}

// --- closed-form success probabilities --------------------------------------

// The six closed-form expressions: the two-copy scheme's
// success with the simple and improved measurement (p0, p1), the
// known-parameter scheme's success (p2), and the threshold-detector mixture
// weights (f0, f1, f2).
struct ClosedFormReport {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double f0 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

inline ClosedFormReport closed_forms(const StateParams& params) {
    params.validate();
    const double a2 = std::norm(params.alpha);
    const double b2 = std::norm(params.beta);
    const double d2 = std::norm(params.delta);
    const double e2 = std::norm(params.eta);
    ClosedFormReport r;
    r.p0 = a2 * b2 * d2 * e2;           // |alpha beta delta eta|^2
    r.p1 = 4.0 * r.p0;                  // 4|alpha beta delta eta|^2
    r.p2 = 4.0 * b2 * d2 * e2;          // 4|beta delta eta|^2
    r.f0 = a2 * a2 * d2 * e2;           // |alpha^2 delta eta|^2
    r.f1 = a2 * a2 * d2 * d2 + a2 * a2 * e2 * e2 + a2 * b2 * d2 * d2 + a2 * b2 * e2 * e2;
    r.f2 = r.p1;
    return r;
}

}  // namespace hyperconc
