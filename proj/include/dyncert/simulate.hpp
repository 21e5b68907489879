#pragma once

#include <cstdint>
#include <vector>

#include "dyncert/numerics.hpp"
#include "dyncert/protocol.hpp"

namespace dyncert {

struct McEstimate {
    double p3_hat;
    double std_error;  // sample standard deviation / sqrt(n_rounds)
    std::uint64_t n_rounds;
    std::uint64_t seed;
};

struct SimulationOptions {
    int workers = 0;  // 0: all cores
    double mass_target = 1e-8;
};

// Position wavefunction of a state evolved to t = k tau / 3 (units 2pi/omega0).
class WavefunctionSynth {
public:
    WavefunctionSynth(const QuantumState& st, int k, double tau);
    std::complex<double> operator()(double q) const;
    double density(double q) const { return std::norm((*this)(q)); }
    std::pair<double, double> support() const { return basis_.support(); }

private:
    EigenBasis basis_;
    Eigen::VectorXcd coeffs_;
};

// Piecewise-linear density on an adaptive grid with inverse-CDF sampling.
class PositionSampler {
public:
    PositionSampler(const WavefunctionSynth& psi, double mass_target = 1e-8);
    double sample(double u) const;
    double cdf(double q) const;
    const RealGrid& grid() const { return grid_; }
    double covered_mass() const { return mass_; }

private:
    RealGrid grid_;
    std::vector<double> cum_;
    double mass_;
};

McEstimate run_protocol(const QuantumState& st, double tau, std::uint64_t n_rounds, std::uint64_t seed,
                        const SimulationOptions& opt = {});

RealGrid marginal_density(const QuantumState& st, int k, double tau, const RealGrid& grid);
// Deterministic probability of q > 0 at t = k tau / 3.
double positive_probability(const QuantumState& st, int k, double tau);

} // namespace dyncert
