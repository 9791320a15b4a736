#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "bellbin/mode.hpp"

namespace bellbin {

using Amplitude = std::complex<double>;

// Occupation pattern as a sorted multiset of modes: a mode holding n photons
// appears n times. Amplitudes are taken w.r.t. normalized Fock states, so
// two photons in one mode is the single key {m, m} with |amplitude|^2 its
// probability.
using Occupation = std::vector<Mode>;
using TermMap = std::map<Occupation, Amplitude>;
using ProbabilityMap = std::map<Occupation, double>;

struct Placement {
    Mode mode;
    int count = 1;
};

// Pure state over the modes allowed by its FockLimits. Immutable once built.
//
// A state is either flagged normalized (norm 1 within 1e-12) or conditional,
// in which case its squared norm is the probability of whatever projection
// produced it.
class PhotonicState {
  public:
    explicit PhotonicState(FockLimits limits = {});

    // Validates canonical form, window and photon budget. Amplitudes with
    // |c|^2 below 1e-30 are dropped.
    static PhotonicState from_terms(TermMap terms, FockLimits limits, bool normalized);

    const TermMap& terms() const { return terms_; }
    const FockLimits& limits() const { return limits_; }
    bool normalized() const { return normalized_; }
    bool is_vacuum() const;

    double norm_squared() const;
    Amplitude amplitude(const Occupation& occ) const;

    PhotonicState normalize() const;
    PhotonicState as_conditional() const;

  private:
    TermMap terms_;
    FockLimits limits_;
    bool normalized_ = true;
};

Occupation canonical(Occupation occ);
int photon_count(const Occupation& occ);

PhotonicState make_state(std::span<const Placement> placements, FockLimits limits = {});
PhotonicState make_state(std::initializer_list<Placement> placements, FockLimits limits = {});

struct WeightedState {
    Amplitude coefficient;
    PhotonicState state;
};

// Linear combination. Throws std::domain_error when the result has zero norm.
PhotonicState superpose(std::span<const WeightedState> parts, bool renormalize = true);
PhotonicState superpose(std::initializer_list<WeightedState> parts, bool renormalize = true);

// Product of states living on disjoint modes. Terms above max_photons of the
// result limits are discarded; the result is conditional if anything was cut.
PhotonicState tensor(const PhotonicState& lhs, const PhotonicState& rhs);

struct ModeAmplitude {
    Mode mode;
    Amplitude amplitude;
};

// Applies the creation operator sum_k c_k a^dagger_{m_k}. The result is
// conditional (unnormalized). Terms exceeding the photon budget throw.
PhotonicState apply_creation(const PhotonicState& state, std::span<const ModeAmplitude> op);

// One bilinear term w * (sum_i s_i a^dagger_i) (sum_j t_j a^dagger_j).
struct PairTerm {
    std::vector<ModeAmplitude> signal;
    std::vector<ModeAmplitude> idler;
    Amplitude weight{1.0, 0.0};
};

PhotonicState apply_pair_creation(const PhotonicState& state, std::span<const PairTerm> op);

Amplitude inner_product(const PhotonicState& bra, const PhotonicState& ket);

// max |a_k - b_k| over the union of patterns.
double max_amplitude_difference(const PhotonicState& a, const PhotonicState& b);

// |amplitude|^2 per occupation pattern; sums to the squared norm.
ProbabilityMap measure_number(const PhotonicState& state);

}  // namespace bellbin
