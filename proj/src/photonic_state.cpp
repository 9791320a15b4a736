#include "bellbin/photonic_state.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace bellbin {

namespace {

constexpr double kDropThreshold = 1e-30;
constexpr double kNormTolerance = 1e-12;

void check_mode(const Mode& m, const FockLimits& limits) {
    if (m.time_bin < 0 || m.time_bin >= limits.window) {
        throw std::out_of_range(fmt::format("mode {} outside time window [0, {})", to_string(m), limits.window));
    }
    if (m.internal != 0 && m.internal != 1) {
        throw std::out_of_range(fmt::format("mode {} has internal index outside {{0, 1}}", to_string(m)));
    }
}

// sqrt(n+1) factor of a^dagger_m acting on the pattern, and the new pattern.
std::pair<Occupation, double> add_photon(const Occupation& occ, const Mode& m) {
    auto n = std::count(occ.begin(), occ.end(), m);
    Occupation out = occ;
    out.insert(std::upper_bound(out.begin(), out.end(), m), m);
    return {std::move(out), std::sqrt(static_cast<double>(n + 1))};
}

}  // namespace

std::string_view port_name(Port p) {
    switch (p) {
        case Port::a: return "a";
        case Port::b: return "b";
        case Port::c: return "c";
        case Port::d: return "d";
        case Port::e: return "e";
        case Port::f: return "f";
        case Port::bob: return "bob";
        case Port::bob_vac: return "bob_vac";
        case Port::bob_s: return "bob_s";
        case Port::bob_l: return "bob_l";
        case Port::bob_out1: return "bob_out1";
        case Port::bob_out2: return "bob_out2";
        case Port::alice_src: return "alice_src";
        case Port::alice_vac: return "alice_vac";
        case Port::alice_s: return "alice_s";
        case Port::alice_l: return "alice_l";
        case Port::alice_dump: return "alice_dump";
        case Port::idler_a: return "idler_a";
    }
    return "?";
}

std::string to_string(const Mode& m) {
    if (m.internal == 0) {
        return fmt::format("({},{})", port_name(m.port), m.time_bin);
    }
    return fmt::format("({},{},{})", port_name(m.port), m.time_bin, m.internal);
}

Occupation canonical(Occupation occ) {
    std::sort(occ.begin(), occ.end());
    return occ;
}

int photon_count(const Occupation& occ) { return static_cast<int>(occ.size()); }

PhotonicState::PhotonicState(FockLimits limits) : limits_(limits) { terms_.emplace(Occupation{}, Amplitude{1.0, 0.0}); }

PhotonicState PhotonicState::from_terms(TermMap terms, FockLimits limits, bool normalized) {
    if (limits.window < 1 || limits.max_photons < 0) {
        throw std::invalid_argument("FockLimits needs window >= 1 and max_photons >= 0");
    }
    PhotonicState s(limits);
    s.terms_.clear();
    for (auto& [occ, amp] : terms) {
        if (!std::is_sorted(occ.begin(), occ.end())) {
            throw std::invalid_argument("occupation pattern is not in canonical order");
        }
        if (photon_count(occ) > limits.max_photons) {
            throw std::out_of_range(
                fmt::format("pattern with {} photons exceeds budget {}", photon_count(occ), limits.max_photons));
        }
        for (const auto& m : occ) check_mode(m, limits);
        if (std::norm(amp) < kDropThreshold) continue;
        s.terms_.emplace(occ, amp);
    }
    s.normalized_ = normalized;
    if (normalized && std::abs(s.norm_squared() - 1.0) > kNormTolerance) {
        throw std::domain_error(fmt::format("state flagged normalized has squared norm {}", s.norm_squared()));
    }
    return s;
}

bool PhotonicState::is_vacuum() const {
    return terms_.size() == 1 && terms_.begin()->first.empty();
}

double PhotonicState::norm_squared() const {
    double acc = 0.0;
    for (const auto& [occ, amp] : terms_) acc += std::norm(amp);
    return acc;
}

Amplitude PhotonicState::amplitude(const Occupation& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? Amplitude{} : it->second;
}

PhotonicState PhotonicState::normalize() const {
    const double n2 = norm_squared();
    if (n2 < kDropThreshold) throw std::domain_error("cannot normalize a zero-norm state");
    TermMap out;
    const double scale = 1.0 / std::sqrt(n2);
    for (const auto& [occ, amp] : terms_) out.emplace(occ, amp * scale);
    return from_terms(std::move(out), limits_, true);
}

PhotonicState PhotonicState::as_conditional() const {
    PhotonicState s = *this;
    s.normalized_ = false;
    return s;
}

PhotonicState make_state(std::span<const Placement> placements, FockLimits limits) {
    Occupation occ;
    for (const auto& p : placements) {
        if (p.count < 0) throw std::invalid_argument("negative photon count");
        check_mode(p.mode, limits);
        occ.insert(occ.end(), static_cast<std::size_t>(p.count), p.mode);
    }
    if (photon_count(occ) > limits.max_photons) {
        throw std::out_of_range(
            fmt::format("{} photons requested but the budget is {}", photon_count(occ), limits.max_photons));
    }
    TermMap t;
    t.emplace(canonical(std::move(occ)), Amplitude{1.0, 0.0});
    return PhotonicState::from_terms(std::move(t), limits, true);
}

PhotonicState make_state(std::initializer_list<Placement> placements, FockLimits limits) {
    return make_state(std::span<const Placement>(placements.begin(), placements.size()), limits);
}

PhotonicState superpose(std::span<const WeightedState> parts, bool renormalize) {
    if (parts.empty()) throw std::invalid_argument("superpose needs at least one state");
    const FockLimits limits = parts.front().state.limits();
    TermMap acc;
    for (const auto& [c, s] : parts) {
        if (!(s.limits() == limits)) throw std::invalid_argument("superposed states use different limits");
        for (const auto& [occ, amp] : s.terms()) acc[occ] += c * amp;
    }
    auto out = PhotonicState::from_terms(std::move(acc), limits, false);
    if (out.norm_squared() < kDropThreshold) throw std::domain_error("superposition has zero norm");
    return renormalize ? out.normalize() : out;
}

PhotonicState superpose(std::initializer_list<WeightedState> parts, bool renormalize) {
    return superpose(std::span<const WeightedState>(parts.begin(), parts.size()), renormalize);
}

PhotonicState tensor(const PhotonicState& lhs, const PhotonicState& rhs) {
    if (!(lhs.limits() == rhs.limits())) throw std::invalid_argument("tensor of states with different limits");
    const FockLimits limits = lhs.limits();
    std::set<Mode> lhs_modes;
    for (const auto& [occ, amp] : lhs.terms()) lhs_modes.insert(occ.begin(), occ.end());
    for (const auto& [occ, amp] : rhs.terms()) {
        for (const auto& m : occ) {
            if (lhs_modes.contains(m)) throw std::invalid_argument("tensor factors share mode " + to_string(m));
        }
    }
    TermMap out;
    bool truncated = false;
    for (const auto& [o1, a1] : lhs.terms()) {
        for (const auto& [o2, a2] : rhs.terms()) {
            if (photon_count(o1) + photon_count(o2) > limits.max_photons) {
                truncated = true;
                continue;
            }
            Occupation merged;
            merged.reserve(o1.size() + o2.size());
            std::merge(o1.begin(), o1.end(), o2.begin(), o2.end(), std::back_inserter(merged));
            out[merged] += a1 * a2;
        }
    }
    const bool normalized = lhs.normalized() && rhs.normalized() && !truncated;
    return PhotonicState::from_terms(std::move(out), limits, normalized);
}

PhotonicState apply_creation(const PhotonicState& state, std::span<const ModeAmplitude> op) {
    TermMap out;
    for (const auto& [occ, amp] : state.terms()) {
        for (const auto& [m, c] : op) {
            auto [next, factor] = add_photon(occ, m);
            out[next] += amp * c * factor;
        }
    }
    return PhotonicState::from_terms(std::move(out), state.limits(), false);
}

PhotonicState apply_pair_creation(const PhotonicState& state, std::span<const PairTerm> op) {
    TermMap out;
    for (const auto& term : op) {
        auto with_idler = apply_creation(state, term.idler);
        auto both = apply_creation(with_idler, term.signal);
        for (const auto& [occ, amp] : both.terms()) out[occ] += term.weight * amp;
    }
    return PhotonicState::from_terms(std::move(out), state.limits(), false);
}

Amplitude inner_product(const PhotonicState& bra, const PhotonicState& ket) {
    Amplitude acc{};
    for (const auto& [occ, amp] : bra.terms()) acc += std::conj(amp) * ket.amplitude(occ);
    return acc;
}

double max_amplitude_difference(const PhotonicState& a, const PhotonicState& b) {
    double worst = 0.0;
    for (const auto& [occ, amp] : a.terms()) worst = std::max(worst, std::abs(amp - b.amplitude(occ)));
    for (const auto& [occ, amp] : b.terms()) worst = std::max(worst, std::abs(amp - a.amplitude(occ)));
    return worst;
}

ProbabilityMap measure_number(const PhotonicState& state) {
    ProbabilityMap out;
    for (const auto& [occ, amp] : state.terms()) out.emplace(occ, std::norm(amp));
    return out;
}

}  // namespace bellbin
