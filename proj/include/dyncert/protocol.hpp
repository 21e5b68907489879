#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dyncert/numerics.hpp"
#include "dyncert/spectra.hpp"

namespace dyncert {

using SlicePtr = std::shared_ptr<const SpectrumSlice>;

struct QuantumState {
    SlicePtr slice;
    Eigen::VectorXcd amplitudes;  // aligned to slice->indices

    void validate() const;
};

struct ScoreResult {
    double p3_max;
    QuantumState state;
    double tau;
    std::optional<EnergyWindow> window;
    double residual;
};

HermitianMatrix build_q3(const SpectrumSlice& s, double tau);
// R with Q3 = D R D^dag, D = diag(exp(i tau 2pi E_n / 3)).
Eigen::MatrixXd q3_real_form(const SpectrumSlice& s, double tau);

ScoreResult max_score(const SlicePtr& s, double tau, const EigenpairOptions& opt = {});
double max_score_value(const SpectrumSlice& s, double tau, const EigenpairOptions& opt = {});
double score_state(const QuantumState& st, double tau);

enum class WindowPolicy { FromTau, Fixed };

struct Truncation {
    std::optional<int> n_max;
    std::optional<EnergyWindow> window;
};

struct ScanPoint {
    double tau;
    double p3_max;
    int dim;
    std::string error;  // empty when the point succeeded
};

std::vector<ScanPoint> scan_tau(const ModelSystem& m, const std::vector<double>& tau_grid, WindowPolicy policy,
                                const Truncation& trunc = {}, int workers = 1);

// Slice used at a given tau under a policy (shared by scan_tau and the CLI).
SpectrumSlice slice_for(const ModelSystem& m, double tau, WindowPolicy policy, const Truncation& trunc);

enum class ReferenceKind { Psi6, Psi4 };
ReferenceKind parse_reference_kind(const std::string& s);
std::string to_string(ReferenceKind k);

QuantumState reference_state(ReferenceKind k, const SlicePtr& s);
// Probing ratio at which the reference state is used in the harmonic limit (psi6: 1; psi4: its optimum).
double harmonic_reference_tau(ReferenceKind k);

struct ScenarioRecord {
    std::string label;
    double score;
    double tau;
};

struct ScenarioTable {
    ScenarioRecord optimal;        // (i) best state and tau
    ScenarioRecord reference_opt;  // (ii) reference state, best tau
    ScenarioRecord reference_fixed;  // (iii) reference state at the harmonic tau
    TauRange tau_range;            // taus whose window contains the whole slice
    std::vector<std::string> warnings;
};

// Sub-interval of [lo, hi] on which energy_window(m, tau) contains every level of s.
std::optional<TauRange> window_tau_range(const ModelSystem& m, const SpectrumSlice& s, double lo, double hi);

ScenarioTable scenario_compare(const ModelSystem& m, int n_hat);

} // namespace dyncert
