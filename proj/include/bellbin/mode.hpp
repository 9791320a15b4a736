#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bellbin {

// Spatial channels used by the experiments in this library. The numeric
// order of the enumerators is the canonical port order used when sorting
// modes, so new labels must be appended.
enum class Port : std::uint8_t {
    a,          // BSA input, Alice's photon
    b,          // BSA input, photon from the entangled pair
    c,          // BSA short arm
    d,          // BSA long arm
    e,          // BSA output watched by D1
    f,          // BSA output watched by D2
    bob,        // Bob's photon before his analyzer
    bob_vac,    // unused second input of Bob's analyzer
    bob_s,
    bob_l,
    bob_out1,
    bob_out2,   // Bob's detector D3
    alice_src,  // Alice's photon before her preparation interferometer
    alice_vac,
    alice_s,
    alice_l,
    alice_dump, // discarded output of Alice's interferometer
    idler_a,    // twin of Alice's photon, never detected
};

std::string_view port_name(Port p);

// A single optical mode: spatial channel, time bin (in units of the
// time-bin separation) and an internal wavepacket index that the optics never
// touch. Ordering is lexicographic on (port, time_bin, internal).
struct Mode {
    Port port = Port::a;
    int time_bin = 0;
    int internal = 0;

    auto operator<=>(const Mode&) const = default;
    bool operator==(const Mode&) const = default;
};

std::string to_string(const Mode& m);

// Bounds every state and transform must respect.
struct FockLimits {
    int window = 3;       // time bins 0..window-1
    int max_photons = 4;  // enough for two pairs

    bool operator==(const FockLimits&) const = default;
};

}  // namespace bellbin
