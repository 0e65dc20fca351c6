#pragma once

#include "bec/types.hpp"

namespace bec {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kRb87MassKg = 1.44316e-25;     // default atom species
inline constexpr double kMicron = 1e-6;                // internal length unit, m

// Internal natural units: hbar = k_B = 1, length measured in microns, mass in
// units of the chosen atomic mass. Everything else follows.
struct UnitSystem {
    double mass_kg = kRb87MassKg;
    double length_m = kMicron;

    double energy_J() const { return kHbar * kHbar / (mass_kg * length_m * length_m); }
    double time_s() const { return kHbar / energy_J(); }
    double temperature_K() const { return energy_J() / kBoltzmann; }

    double temperature_from_nK(double t_nK) const {
        return t_nK * 1e-9 / temperature_K();
    }
    double temperature_to_nK(double t_internal) const {
        return t_internal * temperature_K() * 1e9;
    }
    double time_from_s(double t_s) const { return t_s / time_s(); }
    double time_to_s(double t_internal) const { return t_internal * time_s(); }
    double length_from_m(double l_m) const { return l_m / length_m; }
    double density_from_per_m(double d) const { return d * length_m; }
    double rate_from_per_s(double r) const { return r * time_s(); }
    // 1D contact coupling, SI units J*m.
    double coupling_from_si(double g_si) const {
        return g_si / (energy_J() * length_m);
    }
    double coupling_to_si(double g_internal) const {
        return g_internal * energy_J() * length_m;
    }
};

}  // namespace bec
