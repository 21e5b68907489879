#pragma once

#include <string>

namespace dyncert {

enum class ModelKind { Harmonic, Kerr, Pendulum, Morse, InfiniteWell };

// Dimensionless model: energies in hbar*omega0, times in 2pi/omega0, hbar = omega0 = 1.
// Harmonic/Kerr positions in sqrt(hbar/m omega0), pendulum in radians, Morse in 1/c, well in L.
struct ModelSystem {
    ModelKind kind = ModelKind::Harmonic;
    double alpha = 0.0;   // Kerr (any sign), pendulum (< 0)
    double lambda = 0.0;  // Morse, 2 D_e / hbar omega0

    static ModelSystem harmonic();
    static ModelSystem kerr(double alpha);
    static ModelSystem pendulum(double alpha);
    static ModelSystem morse(double lambda);
    static ModelSystem infinite_well();

    void validate() const;
    std::string name() const;
    bool parity_even() const { return kind != ModelKind::Morse; }
    bool cartesian() const { return kind != ModelKind::Pendulum; }

    // Kinetic term p^2 / (2 mu); Kerr uses its harmonic mu.
    double mass() const;
    // Configuration domain; infinite bounds where unbounded.
    double q_min() const;
    double q_max() const;
    // Lowest classical energy.
    double energy_floor() const;
};

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind k);

// Potential and its first two derivatives for the models with H = p^2/2mu + V(q).
double potential(const ModelSystem& m, double q);
double potential_d1(const ModelSystem& m, double q);
double potential_d2(const ModelSystem& m, double q);

// Classical energy of a phase-space point.
double classical_energy(const ModelSystem& m, double q, double p);

} // namespace dyncert
