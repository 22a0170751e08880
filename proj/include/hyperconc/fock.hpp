// fock.hpp
//
// Exact sparse representation of pure multi-photon states over modes
// labeled by (spatial path, polarization, time slot), and application of
// linear mode transforms by direct expansion of creation-operator
// polynomials with bosonic normalization.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyperconc {

using Complex = std::complex<double>;

// Amplitudes smaller than this are dropped after each transform; keeps
// exact-zero round-off out of the sparse map without touching physical
// amplitudes at desk scale.
inline constexpr double kAmplitudeTolerance = 1e-12;
inline constexpr double kNormTolerance = 1e-9;

class invariant_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Polarization : unsigned char { H, V };

inline Polarization flip(Polarization p) {
    return p == Polarization::H ? Polarization::V : Polarization::H;
}

inline char pol_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

using PathLabel = std::string;

// A single bosonic mode. Slots sit on a discrete grid in units of the
// time-bin separation: slot 0 = S (early), slot 1 = L (late) at circuit
// input; delays only ever add non-negative integers.
struct Mode {
    PathLabel path;
    Polarization pol = Polarization::H;
    int slot = 0;

    friend auto operator<=>(const Mode&, const Mode&) = default;
};

inline std::string to_string(const Mode& m) {
    return std::string(1, pol_char(m.pol)) + "@" + m.path + ":" + std::to_string(m.slot);
}

// Occupation numbers in canonical (sorted) mode order; counts >= 1.
class OccupationConfig {
public:
    OccupationConfig() = default;

    explicit OccupationConfig(std::vector<std::pair<Mode, int>> occ) : occ_(std::move(occ)) {
        canonicalize();
    }

    static OccupationConfig single(const Mode& m) {
        return OccupationConfig({{m, 1}});
    }

    const std::vector<std::pair<Mode, int>>& occupations() const { return occ_; }

    int total_photons() const {
        int n = 0;
        for (const auto& [m, c] : occ_) n += c;
        return n;
    }

    int photons_on_path(const PathLabel& p) const {
        int n = 0;
        for (const auto& [m, c] : occ_)
            if (m.path == p) n += c;
        return n;
    }

    OccupationConfig with_added(const Mode& m, int k = 1) const {
        auto occ = occ_;
        bool found = false;
        for (auto& [mode, c] : occ) {
            if (mode == m) {
                c += k;
                found = true;
                break;
            }
        }
        if (!found) occ.emplace_back(m, k);
        return OccupationConfig(std::move(occ));
    }

    // Splits into (occupations on `paths`, occupations elsewhere).
    std::pair<OccupationConfig, OccupationConfig> split_by_paths(const std::set<PathLabel>& paths) const {
        std::vector<std::pair<Mode, int>> in, out;
        for (const auto& e : occ_)
            (paths.count(e.first.path) ? in : out).push_back(e);
        return {OccupationConfig(std::move(in)), OccupationConfig(std::move(out))};
    }

    // Product over modes of n_m!, the bosonic weight of this configuration.
    double factorial_product() const {
        double f = 1.0;
        for (const auto& [m, c] : occ_)
            for (int i = 2; i <= c; ++i) f *= i;
        return f;
    }

    friend auto operator<=>(const OccupationConfig&, const OccupationConfig&) = default;

private:
    void canonicalize() {
        std::sort(occ_.begin(), occ_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        // merge duplicates, drop zero counts
        std::vector<std::pair<Mode, int>> merged;
        for (const auto& [m, c] : occ_) {
            if (c < 0) throw std::invalid_argument("negative occupation count");
            if (c == 0) continue;
            if (!merged.empty() && merged.back().first == m)
                merged.back().second += c;
            else
                merged.emplace_back(m, c);
        }
        occ_ = std::move(merged);
    }

    std::vector<std::pair<Mode, int>> occ_;
};

inline std::string to_string(const OccupationConfig& cfg) {
    std::string s = "|";
    bool first = true;
    for (const auto& [m, c] : cfg.occupations()) {
        for (int i = 0; i < c; ++i) {
            if (!first) s += ", ";
            s += to_string(m);
            first = false;
        }
    }
    s += "\xE2\x9F\xA9";  // U+27E9 mathematical right angle bracket
    return s;
}

// A linear map on mode creation operators. Actions are declared per input
// path; modes on undeclared paths pass through unchanged, so a transform
// is implicitly padded with identity on the rest of the circuit.
class ModeTransform {
public:
    using Image = std::vector<std::pair<Mode, Complex>>;
    using Action = std::function<Image(const Mode&)>;

    ModeTransform() = default;
    ModeTransform(std::string name, std::set<PathLabel> input_paths, Action action)
        : name_(std::move(name)), input_paths_(std::move(input_paths)), action_(std::move(action)) {}

    static ModeTransform identity() {
        return ModeTransform("identity", {}, [](const Mode& m) { return Image{{m, 1.0}}; });
    }

    const std::string& name() const { return name_; }
    const std::set<PathLabel>& input_paths() const { return input_paths_; }

    bool covers(const PathLabel& p) const { return input_paths_.count(p) != 0; }

    Image act(const Mode& m) const {
        if (!covers(m.path)) return {{m, 1.0}};
        Image img = action_(m);
        if (img.empty())
            throw std::domain_error("transform '" + name_ + "' has no mapping for mode " + to_string(m));
        return img;
    }

private:
    std::string name_;
    std::set<PathLabel> input_paths_;
    Action action_;
};

// Sequential composition: `stages[0]` acts first.
inline ModeTransform compose(std::vector<ModeTransform> stages, std::string name = "composite") {
    std::set<PathLabel> paths;
    for (const auto& t : stages)
        paths.insert(t.input_paths().begin(), t.input_paths().end());
    auto action = [stages = std::move(stages)](const Mode& m) {
        ModeTransform::Image cur{{m, 1.0}};
        for (const auto& t : stages) {
            ModeTransform::Image next;
            for (const auto& [mode, coeff] : cur)
                for (const auto& [m2, c2] : t.act(mode))
                    next.emplace_back(m2, coeff * c2);
            cur = std::move(next);
        }
        return cur;
    };
    return ModeTransform(std::move(name), std::move(paths), std::move(action));
}

// Pure sparse state: map from occupation configuration to amplitude.
// All stored configurations carry the same total photon number.
class PhotonicState {
public:
    using TermMap = std::map<OccupationConfig, Complex>;

    PhotonicState() = default;

    explicit PhotonicState(TermMap terms) : terms_(std::move(terms)) {
        prune();
        check_photon_number();
    }

    static PhotonicState single_term(const OccupationConfig& cfg, Complex amp = 1.0) {
        TermMap t;
        t[cfg] = amp;
        return PhotonicState(std::move(t));
    }

    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    int photon_count() const { return photon_count_; }

    Complex amplitude(const OccupationConfig& cfg) const {
        auto it = terms_.find(cfg);
        return it == terms_.end() ? Complex(0.0) : it->second;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [cfg, amp] : terms_) s += std::norm(amp);
        return s;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    std::set<PathLabel> paths() const {
        std::set<PathLabel> ps;
        for (const auto& [cfg, amp] : terms_)
            for (const auto& [m, c] : cfg.occupations()) ps.insert(m.path);
        return ps;
    }

    // Distinct slots occurring on `path` anywhere in the support.
    std::set<int> slots_on_path(const PathLabel& path) const {
        std::set<int> slots;
        for (const auto& [cfg, amp] : terms_)
            for (const auto& [m, c] : cfg.occupations())
                if (m.path == path) slots.insert(m.slot);
        return slots;
    }

    PhotonicState scaled(Complex factor) const {
        TermMap t = terms_;
        for (auto& [cfg, amp] : t) amp *= factor;
        return PhotonicState(std::move(t));
    }

    friend PhotonicState operator+(const PhotonicState& a, const PhotonicState& b) {
        TermMap t = a.terms_;
        for (const auto& [cfg, amp] : b.terms_) t[cfg] += amp;
        return PhotonicState(std::move(t));
    }

private:
    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) < kAmplitudeTolerance)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    void check_photon_number() {
        photon_count_ = 0;
        bool first = true;
        for (const auto& [cfg, amp] : terms_) {
            int n = cfg.total_photons();
            if (first) {
                photon_count_ = n;
                first = false;
            } else if (n != photon_count_) {
                throw invariant_error("mixed photon numbers in one state");
            }
        }
    }

    TermMap terms_;
    int photon_count_ = 0;
};

inline Complex inner_product(const PhotonicState& bra, const PhotonicState& ket) {
    // occupation-number kets are orthonormal, so this is a sparse dot product
    Complex s = 0.0;
    const auto& a = bra.terms();
    const auto& b = ket.terms();
    if (a.size() <= b.size()) {
        for (const auto& [cfg, amp] : a) s += std::conj(amp) * ket.amplitude(cfg);
    } else {
        for (const auto& [cfg, amp] : b) s += std::conj(bra.amplitude(cfg)) * amp;
    }
    return s;
}

struct NormalizedState {
    PhotonicState state;
    double prior_norm = 0.0;  // prior_norm^2 is the branch probability weight
};

inline NormalizedState normalize(const PhotonicState& s) {
    double n = s.norm();
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero state");
    return {s.scaled(1.0 / n), n};
}

// Applies a linear mode transform by substituting every creation operator
// with its image and expanding photon by photon. The sqrt(n!) factors
// convert between ket amplitudes and operator-polynomial coefficients, so
// bunched occupations come out with the standard bosonic normalization.
inline PhotonicState apply(const PhotonicState& state, const ModeTransform& t) {
    PhotonicState::TermMap out;
    for (const auto& [cfg, amp] : state.terms()) {
        const Complex base = amp / std::sqrt(cfg.factorial_product());
        // expand the product of single-photon images
        std::vector<std::pair<OccupationConfig, Complex>> partial{{OccupationConfig{}, base}};
        for (const auto& [mode, count] : cfg.occupations()) {
            const auto image = t.act(mode);
            for (int k = 0; k < count; ++k) {
                std::vector<std::pair<OccupationConfig, Complex>> next;
                next.reserve(partial.size() * image.size());
                for (const auto& [acc, coeff] : partial)
                    for (const auto& [m2, c2] : image)
                        next.emplace_back(acc.with_added(m2), coeff * c2);
                partial = std::move(next);
            }
        }
        for (const auto& [cfg2, coeff] : partial)
            out[cfg2] += coeff * std::sqrt(cfg2.factorial_product());
    }
    return PhotonicState(std::move(out));
}

// Tensor product of states on disjoint path sets.
inline PhotonicState tensor(const PhotonicState& a, const PhotonicState& b) {
    auto pa = a.paths();
    auto pb = b.paths();
    for (const auto& p : pb)
        if (pa.count(p)) throw std::invalid_argument("tensor: path '" + p + "' occurs on both factors");
    PhotonicState::TermMap out;
    for (const auto& [ca, aa] : a.terms()) {
        for (const auto& [cb, ab] : b.terms()) {
            auto occ = ca.occupations();
            const auto& ob = cb.occupations();
            occ.insert(occ.end(), ob.begin(), ob.end());
            out[OccupationConfig(std::move(occ))] += aa * ab;
        }
    }
    return PhotonicState(std::move(out));
}

// --- parameterized source states -------------------------------------------

// Complex amplitudes (alpha,beta) for polarization and (delta,eta) for the
// time-bin degree of freedom; each pair normalized to 1 within 1e-12.
struct StateParams {
    Complex alpha{1.0};
    Complex beta{0.0};
    Complex delta{1.0};
    Complex eta{0.0};

    void validate() const {
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
            throw std::invalid_argument("|alpha|^2 + |beta|^2 must equal 1");
        if (std::abs(std::norm(delta) + std::norm(eta) - 1.0) > 1e-12)
            throw std::invalid_argument("|delta|^2 + |eta|^2 must equal 1");
    }

    bool is_real_nonnegative() const {
        return alpha.imag() == 0.0 && beta.imag() == 0.0 && delta.imag() == 0.0 && eta.imag() == 0.0 &&
               alpha.real() >= 0.0 && beta.real() >= 0.0 && delta.real() >= 0.0 && eta.real() >= 0.0;
    }

    // Coefficient swap realizing the polarization and time-bin flips applied
    // to the second copy in the two-copy scheme: H<->V and S<->L.
    StateParams flipped() const { return {beta, alpha, eta, delta}; }

    static StateParams from_squares(double alpha2, double delta2) {
        if (alpha2 < 0.0 || alpha2 > 1.0 || delta2 < 0.0 || delta2 > 1.0)
            throw std::invalid_argument("squared magnitudes must lie in [0,1]");
        return {std::sqrt(alpha2), std::sqrt(1.0 - alpha2), std::sqrt(delta2), std::sqrt(1.0 - delta2)};
    }
};

// (alpha|H..H> + beta|V..V>) x (delta|S..S> + eta|L..L>) over N distinct paths.
inline PhotonicState build_ghz(const StateParams& params, const std::vector<PathLabel>& paths) {
    params.validate();
    if (paths.size() < 2) throw std::invalid_argument("GHZ state needs at least 2 paths");
    std::set<PathLabel> uniq(paths.begin(), paths.end());
    if (uniq.size() != paths.size()) throw std::invalid_argument("GHZ paths must be distinct");

    auto product = [&paths](Polarization pol, int slot) {
        std::vector<std::pair<Mode, int>> occ;
        occ.reserve(paths.size());
        for (const auto& p : paths) occ.emplace_back(Mode{p, pol, slot}, 1);
        return OccupationConfig(std::move(occ));
    };

    PhotonicState::TermMap terms;
    terms[product(Polarization::H, 0)] = params.alpha * params.delta;
    terms[product(Polarization::H, 1)] = params.alpha * params.eta;
    terms[product(Polarization::V, 0)] = params.beta * params.delta;
    terms[product(Polarization::V, 1)] = params.beta * params.eta;
    return PhotonicState(std::move(terms));
}

inline PhotonicState build_hyper_pair(const StateParams& params, const PathLabel& path_a,
                                      const PathLabel& path_b) {
    if (path_a == path_b) throw std::invalid_argument("pair paths must be distinct");
    return build_ghz(params, {path_a, path_b});
}

// Per-path assignment of physical slots to the logical early/late labels.
struct SlotPair {
    int early = 0;
    int late = 1;
};
using SlotMap = std::map<PathLabel, SlotPair>;

// (|H..H> + sign_pol |V..V>)/sqrt2 x (|S..S> + sign_time |L..L>)/sqrt2 with
// per-path physical slots substituted for the logical S/L labels.
inline PhotonicState target_state(int sign_pol, int sign_time, const std::vector<PathLabel>& paths,
                                  const SlotMap& slot_map) {
    if (sign_pol * sign_pol != 1 || sign_time * sign_time != 1)
        throw std::invalid_argument("signs must be +1 or -1");
    if (paths.size() < 2) throw std::invalid_argument("target needs at least 2 paths");
    for (const auto& p : paths) {
        auto it = slot_map.find(p);
        if (it == slot_map.end()) throw std::invalid_argument("slot map missing path '" + p + "'");
        if (it->second.early == it->second.late)
            throw std::invalid_argument("slot map degenerate on path '" + p + "'");
    }
    auto product = [&](Polarization pol, bool late) {
        std::vector<std::pair<Mode, int>> occ;
        for (const auto& p : paths) {
            const auto& sp = slot_map.at(p);
            occ.emplace_back(Mode{p, pol, late ? sp.late : sp.early}, 1);
        }
        return OccupationConfig(std::move(occ));
    };
    PhotonicState::TermMap terms;
    terms[product(Polarization::H, false)] = 0.5;
    terms[product(Polarization::H, true)] = 0.5 * sign_time;
    terms[product(Polarization::V, false)] = 0.5 * sign_pol;
    terms[product(Polarization::V, true)] = 0.5 * sign_pol * sign_time;
    return PhotonicState(std::move(terms));
}

// --- canonical text rendering ----------------------------------------------

inline std::string format_amplitude(Complex a) {
    char buf[64];
    if (a.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.12g", a.real());
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", a.real(), a.imag());
    return buf;
}

// One term per line, canonical occupation order, 12 significant digits.
inline std::string to_string(const PhotonicState& s) {
    std::string out;
    for (const auto& [cfg, amp] : s.terms()) {
        if (!out.empty()) out += "\n";
        out += format_amplitude(amp);
        out += " ";
        out += to_string(cfg);
    }
    return out;
}

}  // namespace hyperconc
