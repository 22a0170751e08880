// elements.hpp
//
// Compiles each optical element into a ModeTransform. Sign conventions are
// the real ones throughout: PBS and Pockels cells carry coefficient 1, the
// 50:50 splitter maps in_u -> (out_u + out_d)/sqrt2 and
// in_d -> (out_u - out_d)/sqrt2, and no element ever decreases a slot index.

#pragma once

#include "hyperconc/fock.hpp"

namespace hyperconc {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

namespace detail {

inline void require_distinct(const PathLabel& a, const PathLabel& b, const char* what) {
    if (a == b) throw std::invalid_argument(std::string(what) + ": ports collide ('" + a + "')");
}

}  // namespace detail

// Polarizing beam splitter in the H/V basis: H transmits, V reflects.
// Output port out1 collects {H from in1, V from in2}; out2 the mirror set.
// In/out pairs may alias for folded layouts; same-side ports must differ.
inline ModeTransform pbs_hv(const PathLabel& in1, const PathLabel& in2, const PathLabel& out1,
                            const PathLabel& out2) {
    detail::require_distinct(in1, in2, "pbs_hv inputs");
    detail::require_distinct(out1, out2, "pbs_hv outputs");
    return ModeTransform(
        "pbs_hv", {in1, in2}, [=](const Mode& m) -> ModeTransform::Image {
            const bool first = m.path == in1;
            const bool transmit = m.pol == Polarization::H;
            const PathLabel& out = (first == transmit) ? out1 : out2;
            return {{Mode{out, m.pol, m.slot}, 1.0}};
        });
}

// PBS oriented at 45 degrees: transmits |+> = (|H>+|V>)/sqrt2, reflects |->.
inline ModeTransform pbs_diag(const PathLabel& in1, const PathLabel& in2, const PathLabel& out1,
                              const PathLabel& out2) {
    detail::require_distinct(in1, in2, "pbs_diag inputs");
    detail::require_distinct(out1, out2, "pbs_diag outputs");
    return ModeTransform(
        "pbs_diag", {in1, in2}, [=](const Mode& m) -> ModeTransform::Image {
            const bool first = m.path == in1;
            const PathLabel& plus_out = first ? out1 : out2;
            const PathLabel& minus_out = first ? out2 : out1;
            // |H> = (|+> + |->)/sqrt2, |V> = (|+> - |->)/sqrt2; and on the
            // output side |+-> = (|H> +- |V>)/sqrt2.
            const double sign = (m.pol == Polarization::H) ? 1.0 : -1.0;
            return {{Mode{plus_out, Polarization::H, m.slot}, 0.5},
                    {Mode{plus_out, Polarization::V, m.slot}, 0.5},
                    {Mode{minus_out, Polarization::H, m.slot}, 0.5 * sign},
                    {Mode{minus_out, Polarization::V, m.slot}, -0.5 * sign}};
        });
}

// 50:50 beam splitter, polarization and slot preserved.
inline ModeTransform bs50(const PathLabel& in_u, const PathLabel& in_d, const PathLabel& out_u,
                          const PathLabel& out_d) {
    detail::require_distinct(in_u, in_d, "bs50 inputs");
    detail::require_distinct(out_u, out_d, "bs50 outputs");
    return ModeTransform(
        "bs50", {in_u, in_d}, [=](const Mode& m) -> ModeTransform::Image {
            const double sign = (m.path == in_u) ? 1.0 : -1.0;
            return {{Mode{out_u, m.pol, m.slot}, kInvSqrt2},
                    {Mode{out_d, m.pol, m.slot}, sign * kInvSqrt2}};
        });
}

// Unbalanced beam splitter: in1 -> t*out_t + r*out_r. The second input port
// is addressed by the out_r path, whose column is the unitary completion
// (-conj(r) on out_t, conj(t) on out_r); it stays inert unless photons are
// already present there.
inline ModeTransform ubs(Complex t, Complex r, const PathLabel& in1, const PathLabel& out_t,
                         const PathLabel& out_r) {
    if (std::abs(std::norm(t) + std::norm(r) - 1.0) > 1e-12)
        throw std::invalid_argument("ubs: |t|^2 + |r|^2 must equal 1");
    detail::require_distinct(in1, out_r, "ubs input vs reflected port");
    detail::require_distinct(out_t, out_r, "ubs outputs");
    return ModeTransform(
        "ubs", {in1, out_r}, [=](const Mode& m) -> ModeTransform::Image {
            if (m.path == in1)
                return {{Mode{out_t, m.pol, m.slot}, t}, {Mode{out_r, m.pol, m.slot}, r}};
            return {{Mode{out_t, m.pol, m.slot}, -std::conj(r)},
                    {Mode{out_r, m.pol, m.slot}, std::conj(t)}};
        });
}

// Wave plate: |H> -> cos(theta)|H> + sin(theta)|V>, completed unitarily with
// |V> -> -sin(theta)|H> + cos(theta)|V>.
inline ModeTransform waveplate(const PathLabel& path, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return ModeTransform(
        "waveplate", {path}, [=](const Mode& m) -> ModeTransform::Image {
            if (m.pol == Polarization::H)
                return {{Mode{path, Polarization::H, m.slot}, c}, {Mode{path, Polarization::V, m.slot}, s}};
            return {{Mode{path, Polarization::H, m.slot}, -s}, {Mode{path, Polarization::V, m.slot}, c}};
        });
}

// Unconditional polarization bit flip (half-wave plate), coefficient 1.
inline ModeTransform pol_flip(const PathLabel& path) {
    return ModeTransform(
        "pol_flip", {path}, [=](const Mode& m) -> ModeTransform::Image {
            return {{Mode{path, flip(m.pol), m.slot}, 1.0}};
        });
}

// Pockels cell: polarization flip on components whose slot is in
// `active_slots`; identity elsewhere.
inline ModeTransform pockels(const PathLabel& path, std::set<int> active_slots) {
    return ModeTransform(
        "pockels", {path}, [path, slots = std::move(active_slots)](const Mode& m) -> ModeTransform::Image {
            const Polarization p = slots.count(m.slot) ? flip(m.pol) : m.pol;
            return {{Mode{path, p, m.slot}, 1.0}};
        });
}

// Fixed optical delay: slot index grows by `dt` on this path.
inline ModeTransform delay(const PathLabel& path, int dt) {
    if (dt < 0) throw std::invalid_argument("delay must be non-negative");
    return ModeTransform(
        "delay", {path}, [=](const Mode& m) -> ModeTransform::Image {
            return {{Mode{path, m.pol, m.slot + dt}, 1.0}};
        });
}

// Unbalanced interferometer in the normalized single-output idealization:
// |X at slot s> -> (|X at s> + |X at s+dt>)/sqrt2. Components meeting in a
// common output slot add coherently; the lost difference port is not
// modeled, so this element is intentionally not an isometry on inputs whose
// slots are closer than dt.
inline ModeTransform plain_ui(const PathLabel& path, int dt = 1) {
    if (dt < 1) throw std::invalid_argument("plain_ui delay must be >= 1");
    return ModeTransform(
        "plain_ui", {path}, [=](const Mode& m) -> ModeTransform::Image {
            return {{Mode{path, m.pol, m.slot}, kInvSqrt2},
                    {Mode{path, m.pol, m.slot + dt}, kInvSqrt2}};
        });
}

// Unbalanced interferometer whose arms are selected by polarization:
// components with `long_pol` take the long arm (+dt slots), the orthogonal
// polarization passes undelayed. Deterministic, coefficient 1.
inline ModeTransform pol_routed_delay(const PathLabel& path, Polarization long_pol, int dt = 1) {
    if (dt < 0) throw std::invalid_argument("pol_routed_delay must not decrease slots");
    return ModeTransform(
        "pol_routed_delay", {path}, [=](const Mode& m) -> ModeTransform::Image {
            const int slot = (m.pol == long_pol) ? m.slot + dt : m.slot;
            return {{Mode{path, m.pol, slot}, 1.0}};
        });
}

// Time-bin-to-label converter (the PBS + per-arm Pockels cell + per-arm
// delay block of the improved single-photon measurement). Every input
// arrives in the middle slot; the input slot is re-encoded in the output
// polarization and the input polarization selects the output port:
//   (H, slot 0) -> (V, slot 1) on out_d     (V, slot 0) -> (V, slot 1) on out_u
//   (H, slot 1) -> (H, slot 1) on out_d     (V, slot 1) -> (H, slot 1) on out_u
inline ModeTransform tb_converter(const PathLabel& in_path, const PathLabel& out_u,
                                  const PathLabel& out_d) {
    detail::require_distinct(out_u, out_d, "tb_converter outputs");
    return ModeTransform(
        "tb_converter", {in_path}, [=](const Mode& m) -> ModeTransform::Image {
            if (m.slot != 0 && m.slot != 1)
                throw std::domain_error("tb_converter input must occupy slots 0 or 1, got slot " +
                                        std::to_string(m.slot));
            const PathLabel& out = (m.pol == Polarization::H) ? out_d : out_u;
            const Polarization p = (m.slot == 0) ? Polarization::V : Polarization::H;
            return {{Mode{out, p, 1}, 1.0}};
        });
}

// --- small helpers used by tests and the analysis module --------------------

// Dense matrix of a transform on an explicit list of basis modes. Rows are
// indexed by the output modes discovered while scanning; useful for checking
// isometry and matrix identities on finite windows.
struct TransformMatrix {
    std::vector<Mode> in_modes;
    std::vector<Mode> out_modes;
    std::vector<std::vector<Complex>> coeffs;  // [out][in]
};

inline TransformMatrix matrix_on(const ModeTransform& t, const std::vector<Mode>& in_modes) {
    TransformMatrix m;
    m.in_modes = in_modes;
    std::map<Mode, std::size_t> row_of;
    std::vector<std::map<std::size_t, Complex>> cols(in_modes.size());
    for (std::size_t j = 0; j < in_modes.size(); ++j) {
        for (const auto& [mode, c] : t.act(in_modes[j])) {
            auto [it, inserted] = row_of.try_emplace(mode, m.out_modes.size());
            if (inserted) m.out_modes.push_back(mode);
            cols[j][it->second] += c;
        }
    }
    m.coeffs.assign(m.out_modes.size(), std::vector<Complex>(in_modes.size(), 0.0));
    for (std::size_t j = 0; j < in_modes.size(); ++j)
        for (const auto& [i, c] : cols[j]) m.coeffs[i][j] = c;
    return m;
}

// Columns orthonormal to within `tol`: norm preservation plus inner-product
// preservation on the spanned subspace.
inline bool is_isometry_on(const ModeTransform& t, const std::vector<Mode>& in_modes,
                           double tol = 1e-12) {
    const auto m = matrix_on(t, in_modes);
    for (std::size_t j = 0; j < m.in_modes.size(); ++j) {
        for (std::size_t k = j; k < m.in_modes.size(); ++k) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < m.out_modes.size(); ++i)
                dot += std::conj(m.coeffs[i][j]) * m.coeffs[i][k];
            const Complex expected = (j == k) ? 1.0 : 0.0;
            if (std::abs(dot - expected) > tol) return false;
        }
    }
    return true;
}

inline bool never_decreases_slot(const ModeTransform& t, const std::vector<Mode>& in_modes) {
    for (const auto& in : in_modes)
        for (const auto& [out, c] : t.act(in))
            if (out.slot < in.slot) return false;
    return true;
}

}  // namespace hyperconc
