#pragma once

#include <cstdint>
#include <limits>

#include "dyncert/model.hpp"

namespace dyncert {

// Nonnegative time that may be infinite; infinity is an explicit state, not a large float.
class Duration {
public:
    static Duration finite(double t);
    static Duration infinite() { return Duration(0.0, true); }
    bool is_infinite() const { return infinite_; }
    double value() const;  // +inf for the infinite state
    bool operator==(const Duration&) const = default;

private:
    Duration(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

struct TrappingTimes {
    Duration dt_plus;   // longest contiguous stretch with q >= 0, units 2pi/omega0
    Duration dt_minus;  // shortest contiguous stretch with q < 0
};

struct EnergyWindow {
    double e_min = 0.0;
    double e_max = std::numeric_limits<double>::infinity();
    bool bounded() const { return e_max < std::numeric_limits<double>::infinity(); }
    bool contains(double e) const { return e >= e_min && e <= e_max; }
};

struct TauRange {
    double lo, hi;
};

TrappingTimes trapping_times(const ModelSystem& m, double energy);
// Generic turning-point quadrature of the half-period integrals (no closed forms used).
TrappingTimes trapping_times_quadrature(const ModelSystem& m, double energy);

TauRange admissible_tau(const ModelSystem& m);
EnergyWindow energy_window(const ModelSystem& m, double tau);

struct PhasePoint {
    double q, p;
};

struct TrajectoryOptions {
    double tol = 1e-11;
    int max_doublings = 14;
};

PhasePoint integrate_trajectory(const ModelSystem& m, double q0, double p0, double t,
                                const TrajectoryOptions& opt = {});

// pos(q) with pos(0) = 1/2 inside |q| < 1e-12.
double pos(double q);

// P3 of a single classical state: (1/3) sum_k pos[q(k tau / 3)].
double classical_state_score(const ModelSystem& m, double q0, double p0, double tau,
                             const TrajectoryOptions& opt = {});

struct OracleOptions {
    double energy_cap = 20.0;      // sampling cap for unbounded windows
    double morse_x_floor = -12.0;  // dissociating side cutoff
    int workers = 0;               // 0: all cores
};

struct OracleResult {
    double max_score;
    std::uint64_t n_samples;
    std::uint64_t n_violations;  // states with P3 > 2/3 + 1e-12
};

OracleResult classical_score_oracle(const ModelSystem& m, const EnergyWindow& w, double tau,
                                    std::uint64_t n_samples, std::uint64_t seed,
                                    const OracleOptions& opt = {});

} // namespace dyncert
