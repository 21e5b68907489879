#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dyncert/classical.hpp"
#include "dyncert/mathieu.hpp"
#include "dyncert/model.hpp"

namespace dyncert {

struct Levels {
    std::vector<int> indices;
    std::vector<double> energies;
};

double level_energy(const ModelSystem& m, int n);
// Levels with e_min <= E_n <= e_max (well: strict); throws EmptyWindowError if none.
Levels levels(const ModelSystem& m, const EnergyWindow& w);
// Lowest levels up to index n_max (well starts at n = 1).
Levels levels_upto(const ModelSystem& m, int n_max);
int lowest_index(const ModelSystem& m);

// Real-gauge eigenfunctions for a fixed set of levels, with per-level data precomputed.
class EigenBasis {
public:
    EigenBasis(const ModelSystem& m, std::vector<int> indices);
    const ModelSystem& model() const { return model_; }
    const std::vector<int>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    // (psi, dpsi/dq) of the i-th retained level.
    std::pair<double, double> eval(std::size_t i, double q) const;
    // Values of all retained levels at q; harmonic/Kerr use the full recurrence once.
    Eigen::VectorXd values(double q) const;
    const MathieuSolution& mathieu(std::size_t i) const { return mathieu_.at(i); }
    // Sign applied on top of the stored special-function convention.
    double gauge(std::size_t i) const { return gauge_.empty() ? 1.0 : gauge_.at(i); }
    // Interval outside of which every retained level is negligible (|psi|^2 < 1e-32).
    std::pair<double, double> support() const;

private:
    ModelSystem model_;
    std::vector<int> indices_;
    std::vector<MathieuSolution> mathieu_;
    std::vector<double> gauge_;
    std::vector<double> log_norm_;
};

std::pair<double, double> eigenfunction(const ModelSystem& m, int n, double q);

double harmonic_sgn_element(int n, int np);
double well_sgn_element(int n, int np);
double morse_diag_polynomial(int n, double lambda);
double morse_diag_closed_form(int n, double lambda);

// Boundary-term (Wronskian) evaluation of <n|sgn(Q)|n'> for n != n'.
double sgn_element_wronskian(const EigenBasis& b, std::size_t i, std::size_t j, const std::vector<double>& energies);
// Direct quadrature of int sgn(q) psi_n psi_n' dq.
double sgn_element_quadrature(const EigenBasis& b, std::size_t i, std::size_t j);

Eigen::MatrixXd sgn_matrix(const ModelSystem& m, const std::vector<int>& indices);

struct SpectrumSlice {
    ModelSystem model;
    std::vector<int> indices;
    std::vector<double> energies;
    Eigen::MatrixXd sgn;

    std::size_t dim() const { return indices.size(); }
    void validate() const;
};

SpectrumSlice build_slice(const ModelSystem& m, const Levels& lv);
SpectrumSlice build_slice(const ModelSystem& m, const EnergyWindow& w);

} // namespace dyncert
