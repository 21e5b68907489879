#include "dyncert/phasespace.hpp"

#include <cmath>
#include <numbers>

#include "dyncert/errors.hpp"
#include "dyncert/simulate.hpp"

namespace dyncert {

using std::numbers::pi;
using cd = std::complex<double>;

double WignerGrid::cell_integral() const {
    auto widths = [](const std::vector<double>& ax) {
        std::vector<double> w(ax.size(), 1.0);
        if (ax.size() < 2)
            return w;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            double l = i > 0 ? ax[i] - ax[i - 1] : ax[1] - ax[0];
            double r = i + 1 < ax.size() ? ax[i + 1] - ax[i] : ax[i] - ax[i - 1];
            w[i] = 0.5 * (l + r);
        }
        return w;
    };
    auto wq = widths(q_axis);
    auto wp = angular ? std::vector<double>(p_axis.size(), 1.0) : widths(p_axis);
    double s = 0.0;
    for (std::size_t i = 0; i < q_axis.size(); ++i)
        for (std::size_t j = 0; j < p_axis.size(); ++j)
            s += values(i, j) * wq[i] * wp[j];
    return s;
}

WignerGrid wigner_cartesian(const QuantumState& st, const std::vector<double>& q_axis,
                            const std::vector<double>& p_axis, int k, double tau) {
    st.validate();
    const ModelSystem& m = st.slice->model;
    if (!m.cartesian())
        throw ModelMismatchError("Cartesian Wigner function is undefined for the pendulum; use the angular form");
    WavefunctionSynth psi(st, k, tau);
    auto [lo, hi] = psi.support();
    double width = hi - lo;
    double p_max = 0.0;
    for (double p : p_axis)
        p_max = std::max(p_max, std::abs(p));
    int n_max = *std::max_element(st.slice->indices.begin(), st.slice->indices.end());
    // y spacing resolves both the state and the requested momenta
    double k_state = m.kind == ModelKind::InfiniteWell ? n_max * pi : std::sqrt(2.0 * n_max + 1.0) * 2.0 + 4.0;
    int ny = std::max(800, static_cast<int>(std::ceil(width * (2.0 * p_max + 2.0 * k_state) * 4.0 / pi)));
    double hy = width / ny;
    WignerGrid g;
    g.q_axis = q_axis;
    g.p_axis = p_axis;
    g.values = Eigen::MatrixXd::Zero(q_axis.size(), p_axis.size());
    auto in_domain = [&](double x) { return x >= lo && x <= hi; };
    for (std::size_t i = 0; i < q_axis.size(); ++i) {
        double q = q_axis[i];
        std::vector<double> ys;
        std::vector<cd> prod;
        for (int j = -ny; j <= ny; ++j) {
            double y = j * hy;
            if (!in_domain(q + y) || !in_domain(q - y))
                continue;
            ys.push_back(y);
            prod.push_back(std::conj(psi(q + y)) * psi(q - y));
        }
        for (std::size_t jp = 0; jp < p_axis.size(); ++jp) {
            double p = p_axis[jp];
            cd s = 0.0;
            for (std::size_t j = 0; j < ys.size(); ++j)
                s += prod[j] * std::exp(cd(0.0, 2.0 * p * ys[j]));
            g.values(i, jp) = (s * hy).real() / pi;
        }
    }
    return g;
}

std::vector<cd> angular_coefficients(const QuantumState& st, int& m_offset, int k, double tau) {
    st.validate();
    const SpectrumSlice& s = *st.slice;
    if (s.model.kind != ModelKind::Pendulum)
        throw ModelMismatchError("angular Wigner function needs the pendulum model");
    EigenBasis b(s.model, s.indices);
    int m_top = 0;
    for (std::size_t a = 0; a < b.size(); ++a) {
        const MathieuSolution& sol = b.mathieu(a);
        m_top = std::max(m_top, sol.harmonic(sol.coeffs.size() - 1) / 2);
    }
    m_offset = -m_top;
    std::vector<cd> c(2 * m_top + 1, 0.0);
    double t = 2.0 * pi * k * tau / 3.0;
    for (std::size_t a = 0; a < b.size(); ++a) {
        const MathieuSolution& sol = b.mathieu(a);
        cd amp = st.amplitudes(a) * std::exp(cd(0.0, -s.energies[a] * t)) * b.gauge(a);
        for (std::size_t j = 0; j < sol.coeffs.size(); ++j) {
            int mm = sol.harmonic(j) / 2;
            double v = sol.coeffs[j];
            if (sol.kind == MathieuKind::Even) {
                if (mm == 0) {
                    c[m_top] += amp * std::sqrt(2.0) * v;
                } else {
                    c[m_top + mm] += amp * v / std::sqrt(2.0);
                    c[m_top - mm] += amp * v / std::sqrt(2.0);
                }
            } else {
                c[m_top + mm] += amp * cd(0.0, -1.0) * v / std::sqrt(2.0);
                c[m_top - mm] += amp * cd(0.0, 1.0) * v / std::sqrt(2.0);
            }
        }
    }
    return c;
}

WignerGrid wigner_angular(const QuantumState& st, const std::vector<double>& phi_axis, int m_lo, int m_hi, int k,
                          double tau) {
    if (m_hi < m_lo)
        throw DomainError("empty angular-momentum range");
    int off = 0;
    auto c = angular_coefficients(st, off, k, tau);
    int size = static_cast<int>(c.size());
    auto coef = [&](int mm) { int i = mm - off; return (i >= 0 && i < size) ? c[i] : cd(0.0); };
    WignerGrid g;
    g.angular = true;
    g.q_axis = phi_axis;
    for (int mm = m_lo; mm <= m_hi; ++mm)
        g.p_axis.push_back(mm);
    g.values = Eigen::MatrixXd::Zero(phi_axis.size(), g.p_axis.size());
    for (std::size_t i = 0; i < phi_axis.size(); ++i) {
        double phi = phi_axis[i];
        for (int mm = m_lo; mm <= m_hi; ++mm) {
            cd s = 0.0;
            for (int m1 = off; m1 < off + size; ++m1) {
                cd c1 = std::conj(coef(m1));
                if (c1 == 0.0)
                    continue;
                for (int delta = -1; delta <= 1; ++delta) {
                    int m2 = 2 * mm - m1 + delta;
                    double kern = delta == 0 ? 1.0 : 0.5;
                    s += kern * c1 * coef(m2) * std::exp(cd(0.0, (m2 - m1) * phi));
                }
            }
            g.values(i, mm - m_lo) = s.real() / (2.0 * pi);
        }
    }
    return g;
}

} // namespace dyncert
