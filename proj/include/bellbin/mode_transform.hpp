#pragma once

#include <map>
#include <set>
#include <vector>

#include "bellbin/photonic_state.hpp"

namespace bellbin {

// Linear map on creation operators:
//     a^dagger_in -> sum_out c[out, in] a^dagger_out
// stored sparsely as one column per domain mode.
//
// A transform "acts on" a set of ports. Modes on other ports pass through
// untouched, which lets small elements be composed into a larger setup.
// A mode on an acted port that is missing from the domain is an error.
class ModeTransform {
  public:
    using Column = std::vector<ModeAmplitude>;

    ModeTransform() = default;
    ModeTransform(std::map<Mode, Column> columns, std::set<Port> ports);

    const std::map<Mode, Column>& columns() const { return columns_; }
    const std::set<Port>& ports() const { return ports_; }

    bool acts_on(Port p) const { return ports_.contains(p); }
    bool in_domain(const Mode& m) const { return columns_.contains(m); }

    std::vector<Mode> domain() const;
    std::vector<Mode> codomain() const;

    // Image of a single creation operator (identity for untouched ports).
    Column image(const Mode& m) const;

    // max |<col_i, col_j> - delta_ij| over the domain.
    double isometry_defect() const;
    bool is_isometry(double tol = 1e-12) const { return isometry_defect() <= tol; }
    bool is_unitary(double tol = 1e-12) const;

    // Drops domain columns that are not on `inputs`. Acted ports are kept, so
    // feeding a dropped mode afterwards is an error rather than a pass-through.
    ModeTransform restricted_to(const std::set<Port>& inputs) const;

  private:
    std::map<Mode, Column> columns_;
    std::set<Port> ports_;
};

// second o first. Domain modes of `first` whose image leaves the domain of
// `second` throw std::out_of_range.
ModeTransform compose(const ModeTransform& first, const ModeTransform& second);

ModeTransform identity_transform();

// Substitutes every creation operator by its image and re-expands in the
// normalized Fock basis. Norm is preserved for isometries.
PhotonicState apply_transform(const PhotonicState& state, const ModeTransform& t);

}  // namespace bellbin
