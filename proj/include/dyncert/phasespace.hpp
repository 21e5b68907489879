#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dyncert/protocol.hpp"

namespace dyncert {

struct WignerGrid {
    std::vector<double> q_axis;  // q (Cartesian) or phi (angular)
    std::vector<double> p_axis;  // p (Cartesian) or m (angular)
    Eigen::MatrixXd values;      // rows follow q_axis
    bool angular = false;

    // Sum of values times cell sizes (unit weight per discrete m).
    double cell_integral() const;
    double min() const { return values.minCoeff(); }
};

// W(q,p) = (1/pi) int psi*(q+y) psi(q-y) exp(2ipy) dy for the state evolved to t = k tau / 3.
WignerGrid wigner_cartesian(const QuantumState& st, const std::vector<double>& q_axis,
                            const std::vector<double>& p_axis, int k = 0, double tau = 1.0);

// Angular-momentum coefficients c_m of a pendulum state, psi(phi) = sum_m c_m e^{i m phi} / sqrt(2 pi).
std::vector<std::complex<double>> angular_coefficients(const QuantumState& st, int& m_offset, int k = 0,
                                                       double tau = 1.0);

// Discrete-m angular Wigner function with split kernel K(0) = 1, K(+-1) = 1/2.
WignerGrid wigner_angular(const QuantumState& st, const std::vector<double>& phi_axis, int m_lo, int m_hi,
                          int k = 0, double tau = 1.0);

} // namespace dyncert
