#include "dyncert/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyncert/errors.hpp"
#include "dyncert/numerics.hpp"

namespace dyncert {

using std::numbers::pi;

namespace {

double kerr_energy(double alpha, int n) {
    double x = n + 0.5;
    return x + 0.5 * alpha * x * x + 0.375 * alpha;
}

int morse_bound_count(double lambda) {
    // bound states n < lambda - 1/2
    int n = static_cast<int>(std::ceil(lambda - 0.5));
    while (n > 0 && !(n - 1 < lambda - 0.5))
        --n;
    while (n < lambda - 0.5)
        ++n;
    return n;
}

double pendulum_scale(const ModelSystem& m) { return std::abs(m.alpha); }
double pendulum_q(const ModelSystem& m) { return -1.0 / (16.0 * m.alpha * m.alpha); }
double separatrix(const ModelSystem& m) { return 1.0 / (8.0 * std::abs(m.alpha)); }

std::vector<double> pendulum_energies(const ModelSystem& m, int n_max) {
    auto sols = mathieu_eigensystem(pendulum_q(m), n_max);
    std::vector<double> e(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i)
        e[i] = pendulum_scale(m) * sols[i].characteristic;
    return e;
}

} // namespace

int lowest_index(const ModelSystem& m) { return m.kind == ModelKind::InfiniteWell ? 1 : 0; }

double level_energy(const ModelSystem& m, int n) {
    m.validate();
    if (n < lowest_index(m))
        throw DomainError("level index below the ground state");
    switch (m.kind) {
    case ModelKind::Harmonic: return n + 0.5;
    case ModelKind::Kerr:
        if (m.alpha < 0.0 && n + 0.5 > 1.0 / std::abs(m.alpha))
            throw DomainError("Kerr level beyond the increasing branch n + 1/2 <= 1/|alpha|");
        return kerr_energy(m.alpha, n);
    case ModelKind::Pendulum: {
        double e = pendulum_energies(m, n).back();
        if (e >= separatrix(m))
            throw DomainError("pendulum level above the separatrix");
        return e;
    }
    case ModelKind::Morse: {
        if (n >= morse_bound_count(m.lambda))
            throw DomainError("Morse level index beyond the bound states");
        double x = n + 0.5;
        return x * (1.0 - x / (2.0 * m.lambda));
    }
    case ModelKind::InfiniteWell: return 0.25 * n * n;
    }
    throw DomainError("unknown model");
}

Levels levels_upto(const ModelSystem& m, int n_max) {
    m.validate();
    Levels lv;
    int n0 = lowest_index(m);
    if (n_max < n0)
        throw EmptyWindowError("truncation excludes every level");
    if (m.kind == ModelKind::Pendulum) {
        auto e = pendulum_energies(m, n_max);
        for (int n = 0; n <= n_max; ++n) {
            if (e[n] >= separatrix(m))
                throw DomainError("pendulum truncation reaches above the separatrix");
            lv.indices.push_back(n);
            lv.energies.push_back(e[n]);
        }
        return lv;
    }
    for (int n = n0; n <= n_max; ++n) {
        lv.indices.push_back(n);
        lv.energies.push_back(level_energy(m, n));
    }
    return lv;
}

Levels levels(const ModelSystem& m, const EnergyWindow& w) {
    m.validate();
    Levels lv;
    auto keep = [&](int n, double e) {
        // the well's strict inequalities are applied with a relative slack against rounding
        bool in = m.kind == ModelKind::InfiniteWell ? (e > w.e_min * (1.0 + 1e-12) && e < w.e_max * (1.0 - 1e-12))
                                                    : w.contains(e);
        if (in) {
            lv.indices.push_back(n);
            lv.energies.push_back(e);
        }
    };
    switch (m.kind) {
    case ModelKind::Harmonic:
    case ModelKind::Kerr: {
        int n_top;
        if (m.kind == ModelKind::Kerr && m.alpha < 0.0)
            n_top = static_cast<int>(std::floor(1.0 / std::abs(m.alpha) - 0.5));
        else if (!w.bounded())
            throw DomainError("unbounded energy window: give an explicit truncation");
        else
            n_top = static_cast<int>(std::ceil(w.e_max)) + 1;
        for (int n = 0; n <= n_top; ++n)
            keep(n, m.kind == ModelKind::Harmonic ? n + 0.5 : kerr_energy(m.alpha, n));
        break;
    }
    case ModelKind::Pendulum: {
        int n_max = 16;
        for (;;) {
            auto e = pendulum_energies(m, n_max);
            if (e.back() > std::min(w.e_max, separatrix(m))) {
                for (int n = 0; n <= n_max; ++n)
                    if (e[n] < separatrix(m))
                        keep(n, e[n]);
                break;
            }
            n_max *= 2;
            if (n_max > 100000)
                throw ConvergenceError("pendulum level enumeration did not terminate");
        }
        break;
    }
    case ModelKind::Morse: {
        int count = morse_bound_count(m.lambda);
        for (int n = 0; n < count; ++n)
            keep(n, level_energy(m, n));
        break;
    }
    case ModelKind::InfiniteWell: {
        if (!w.bounded())
            throw DomainError("unbounded energy window: give an explicit truncation");
        int n_top = static_cast<int>(std::ceil(2.0 * std::sqrt(w.e_max))) + 1;
        for (int n = 1; n <= n_top; ++n)
            keep(n, 0.25 * n * n);
        break;
    }
    }
    if (lv.indices.empty())
        throw EmptyWindowError("no energy level of " + m.name() + " lies in the window");
    return lv;
}

namespace {

double morse_log_envelope(double lambda, int n, double log_norm, double z) {
    double a = 2.0 * lambda - 2.0 * n - 1.0, s = 0.5 * a;
    // upper bound of |L_n^(a)(z)| by the sum of absolute terms
    double lsum = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        double t = std::lgamma(n + a + 1.0) - std::lgamma(n - k + 1.0) - std::lgamma(a + k + 1.0) +
                   k * std::log(z) - std::lgamma(k + 1.0);
        lsum = std::max(lsum, t) + std::log1p(std::exp(-std::abs(lsum - t)));
    }
    return log_norm + s * std::log(z) - 0.5 * z + lsum;
}

// psi_n in real gauge for the harmonic oscillator, all orders up to n_max.
void hermite_functions(int n_max, double q, std::vector<double>& psi) {
    psi.assign(n_max + 2, 0.0);
    psi[0] = std::pow(pi, -0.25) * std::exp(-0.5 * q * q);
    if (n_max + 1 >= 1)
        psi[1] = std::sqrt(2.0) * q * psi[0];
    for (int n = 1; n <= n_max; ++n)
        psi[n + 1] = std::sqrt(2.0 / (n + 1)) * q * psi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[n - 1];
}

} // namespace

EigenBasis::EigenBasis(const ModelSystem& m, std::vector<int> indices) : model_(m), indices_(std::move(indices)) {
    m.validate();
    if (indices_.empty())
        throw DomainError("eigenbasis needs at least one level");
    for (int n : indices_)
        if (n < lowest_index(m))
            throw DomainError("level index below the ground state");
    int n_max = *std::max_element(indices_.begin(), indices_.end());
    if (m.kind == ModelKind::Pendulum) {
        auto sols = mathieu_eigensystem(pendulum_q(m), n_max);
        for (int n : indices_) {
            const MathieuSolution& s = sols[n];
            double probe = n % 2 == 0 ? s.value(0.0) : s.derivative(0.0);
            // harmonic-limit signs: psi(0) ~ (-1)^{n/2}, psi'(0) ~ (-1)^{(n-1)/2}
            int want = ((n / 2) % 2 == 0) ? 1 : -1;
            gauge_.push_back((probe >= 0.0 ? 1 : -1) == want ? 1.0 : -1.0);
            mathieu_.push_back(s);
        }
    }
    if (m.kind == ModelKind::Morse) {
        int count = morse_bound_count(m.lambda);
        for (int n : indices_) {
            if (n >= count)
                throw DomainError("Morse level index beyond the bound states");
            double a = 2.0 * m.lambda - 2.0 * n - 1.0;
            log_norm_.push_back(0.5 * (std::lgamma(n + 1.0) + std::log(a) - std::lgamma(2.0 * m.lambda - n)));
            gauge_.push_back(n % 2 == 0 ? 1.0 : -1.0);
        }
    }
    if (m.kind == ModelKind::Kerr && m.alpha < 0.0)
        for (int n : indices_)
            if (n + 0.5 > 1.0 / std::abs(m.alpha))
                throw DomainError("Kerr level beyond the increasing branch");
}

std::pair<double, double> EigenBasis::eval(std::size_t i, double q) const {
    int n = indices_.at(i);
    switch (model_.kind) {
    case ModelKind::Harmonic:
    case ModelKind::Kerr: {
        std::vector<double> psi;
        hermite_functions(n, q, psi);
        double d = -std::sqrt((n + 1) / 2.0) * psi[n + 1];
        if (n > 0)
            d += std::sqrt(n / 2.0) * psi[n - 1];
        return {psi[n], d};
    }
    case ModelKind::Pendulum: {
        if (q < -pi - 1e-12 || q > pi + 1e-12)
            throw DomainError("pendulum angle outside (-pi, pi]");
        const MathieuSolution& s = mathieu_[i];
        double g = gauge_[i] / std::sqrt(pi);
        return {g * s.value(0.5 * q), 0.5 * g * s.derivative(0.5 * q)};
    }
    case ModelKind::Morse: {
        double lam = model_.lambda;
        double a = 2.0 * lam - 2.0 * n - 1.0, s = 0.5 * a;
        double z = 2.0 * lam * std::exp(q);
        if (z == 0.0 || !std::isfinite(z))
            return {0.0, 0.0};
        double env = std::exp(log_norm_[i] + s * std::log(z) - 0.5 * z);
        double l = laguerre(n, a, z);
        double l1 = n > 0 ? laguerre(n - 1, a + 1.0, z) : 0.0;
        double g = gauge_[i];
        return {g * env * l, g * env * ((s - 0.5 * z) * l - z * l1)};
    }
    case ModelKind::InfiniteWell: {
        if (q < -0.5 - 1e-12 || q > 0.5 + 1e-12)
            throw DomainError("well position outside [-1/2, 1/2]");
        double k = n * pi, r = std::sqrt(2.0);
        if (n % 2 == 1)
            return {r * std::cos(k * q), -r * k * std::sin(k * q)};
        return {r * std::sin(k * q), r * k * std::cos(k * q)};
    }
    }
    throw DomainError("unknown model");
}

Eigen::VectorXd EigenBasis::values(double q) const {
    Eigen::VectorXd v(indices_.size());
    if (model_.kind == ModelKind::Harmonic || model_.kind == ModelKind::Kerr) {
        std::vector<double> psi;
        hermite_functions(*std::max_element(indices_.begin(), indices_.end()), q, psi);
        for (std::size_t i = 0; i < indices_.size(); ++i)
            v(i) = psi[indices_[i]];
        return v;
    }
    for (std::size_t i = 0; i < indices_.size(); ++i)
        v(i) = eval(i, q).first;
    return v;
}

std::pair<double, double> EigenBasis::support() const {
    switch (model_.kind) {
    case ModelKind::Harmonic:
    case ModelKind::Kerr: {
        int n_max = *std::max_element(indices_.begin(), indices_.end());
        double r = std::sqrt(2.0 * n_max + 1.0) + 9.0;
        return {-r, r};
    }
    case ModelKind::Pendulum: return {-pi, pi};
    case ModelKind::InfiniteWell: return {-0.5, 0.5};
    case ModelKind::Morse: {
        double lam = model_.lambda, lo = 0.0, hi = 0.0;
        const double cut = 0.5 * std::log(1e-32);
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            int n = indices_[i];
            double x = 0.0;
            while (morse_log_envelope(lam, n, log_norm_[i], 2.0 * lam * std::exp(x)) > cut)
                x -= 0.05;
            lo = std::min(lo, x);
            x = 0.0;
            while (morse_log_envelope(lam, n, log_norm_[i], 2.0 * lam * std::exp(x)) > cut)
                x += 0.01;
            hi = std::max(hi, x);
        }
        return {lo, hi};
    }
    }
    throw DomainError("unknown model");
}

std::pair<double, double> eigenfunction(const ModelSystem& m, int n, double q) {
    EigenBasis b(m, {n});
    return b.eval(0, q);
}

double harmonic_sgn_element(int n, int np) {
    if (n < 0 || np < 0)
        throw DomainError("level index must be >= 0");
    if ((n + np) % 2 == 0)
        return 0.0;
    int e = n % 2 == 0 ? n : np, o = n % 2 == 0 ? np : n;
    double lc_e = std::lgamma(e + 1.0) - 2.0 * std::lgamma(e / 2 + 1.0);
    double lc_o = std::lgamma(o + 0.0) - 2.0 * std::lgamma((o - 1) / 2 + 1.0);
    double log_mag = -((e + o) / 2.0 - 1.0) * std::log(2.0) +
                     0.5 * (std::log(static_cast<double>(o)) - std::log(pi) + lc_e + lc_o);
    int k = (o - e - 1) / 2;
    if ((o - e - 1) < 0)
        k = -((e - o + 1) / 2);
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(log_mag) / (o - e);
}

double well_sgn_element(int n, int np) {
    if (n < 1 || np < 1)
        throw DomainError("well level index must be >= 1");
    if ((n + np) % 2 == 0)
        return 0.0;
    double s = n % 2 == 1 ? -1.0 : 1.0;
    return (2.0 / pi) * (1.0 / (n + np) + s / (n - np));
}

double morse_diag_polynomial(int n, double l) {
    switch (n) {
    case 0: return 0.0;
    case 1: return 1.0;
    case 2: return 2.0 * l + 6.0;
    case 3: return ((32.0 / 3.0) * l - 42.0) * l + 180.0;
    case 4: return (((58.0 / 3.0) * l + 190.0) * l - 5828.0 / 3.0) * l + 6440.0;
    case 5: return ((((212.0 / 3.0) * l - 4912.0 / 5.0) * l + 102376.0 / 5.0) * l - 140604.0) * l + 347760.0;
    case 6:
        return (((((380.0 / 3.0) * l + 125644.0 / 45.0) * l - 1726232.0 / 15.0) * l + 8950344.0 / 5.0) * l -
                10818312.0) * l + 23617440.0;
    case 7:
        return ((((((1192.0 / 3.0) * l - 553792.0 / 45.0) * l + 73504376.0 / 105.0) * l - 5199530008.0 / 315.0) * l +
                 6608820632.0 / 35.0) * l - 4965563888.0 / 5.0) * l + 1979385408.0;
    default: break;
    }
    throw DomainError("morse_diag_polynomial supports orders 0..7 only");
}

double morse_diag_closed_form(int n, double lambda) {
    double a = 2.0 * lambda - 2.0 * n - 1.0;
    if (!(a > 0.0))
        throw DomainError("Morse level index beyond the bound states");
    double pre = std::exp(a * std::log(2.0 * lambda) - 2.0 * lambda - std::lgamma(2.0 * lambda - n));
    return 4.0 * pre * morse_diag_polynomial(n, lambda) * a + 2.0 * regularized_gamma_Q(a, 2.0 * lambda) - 1.0;
}

double sgn_element_wronskian(const EigenBasis& b, std::size_t i, std::size_t j, const std::vector<double>& energies) {
    double de = energies.at(i) - energies.at(j);
    if (de == 0.0)
        throw DomainError("boundary-term formula needs nondegenerate energies");
    const ModelSystem& m = b.model();
    auto wr = [&](double q) {
        auto [u, du] = b.eval(i, q);
        auto [v, dv] = b.eval(j, q);
        return u * dv - du * v;
    };
    double w_edges = 0.0;
    if (std::isfinite(m.q_max()))
        w_edges += wr(m.q_max()) + wr(m.q_min());
    return (w_edges - 2.0 * wr(0.0)) / (2.0 * m.mass() * de);
}

double sgn_element_quadrature(const EigenBasis& b, std::size_t i, std::size_t j) {
    auto [lo, hi] = b.support();
    int nodes = std::max(b.indices()[i], b.indices()[j]) + 4;
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-14;
    opt.max_panels = 20000;
    auto f = [&](double q) { return b.eval(i, q).first * b.eval(j, q).first; };
    double pos_part = 0.0, neg_part = 0.0;
    for (int k = 0; k < nodes; ++k) {
        pos_part += integrate(f, hi * k / nodes, hi * (k + 1) / nodes, opt);
        neg_part += integrate(f, lo * (k + 1) / nodes, lo * k / nodes, opt);
    }
    return pos_part - neg_part;
}

Eigen::MatrixXd sgn_matrix(const ModelSystem& m, const std::vector<int>& idx) {
    m.validate();
    int d = static_cast<int>(idx.size());
    if (d == 0)
        throw DomainError("sgn_matrix needs at least one level");
    for (int k = 1; k < d; ++k)
        if (idx[k] <= idx[k - 1])
            throw DomainError("level indices must be strictly increasing");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    switch (m.kind) {
    case ModelKind::Harmonic:
    case ModelKind::Kerr: {
        // S_{e,o} = sign * exp(A_e + B_o) / (o - e), log terms precomputed per index
        std::vector<double> logt(d);
        for (int k = 0; k < d; ++k) {
            int n = idx[k];
            if (n % 2 == 0)
                logt[k] = -(n / 2.0) * std::log(2.0) + 0.5 * (std::lgamma(n + 1.0) - 2.0 * std::lgamma(n / 2 + 1.0));
            else
                logt[k] = -(n / 2.0 - 1.0) * std::log(2.0) +
                          0.5 * (std::log(static_cast<double>(n)) - std::log(pi) + std::lgamma(n + 0.0) -
                                 2.0 * std::lgamma((n - 1) / 2 + 1.0));
        }
        for (int a = 0; a < d; ++a) {
            if (idx[a] % 2 != 0)
                continue;
            for (int c = 0; c < d; ++c) {
                if (idx[c] % 2 != 1)
                    continue;
                int e = idx[a], o = idx[c];
                int twice_k = o - e - 1;
                int k = twice_k >= 0 ? twice_k / 2 : -((-twice_k) / 2);
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                double v = sign * std::exp(logt[a] + logt[c]) / (o - e);
                s(a, c) = v;
                s(c, a) = v;
            }
        }
        return s;
    }
    case ModelKind::InfiniteWell:
        for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c)
                s(a, c) = a == c ? 0.0 : well_sgn_element(idx[a], idx[c]);
        return s;
    case ModelKind::Pendulum:
    case ModelKind::Morse: {
        EigenBasis b(m, idx);
        std::vector<double> e(d);
        if (m.kind == ModelKind::Pendulum) {
            auto lv = levels_upto(m, idx.back());
            for (int k = 0; k < d; ++k)
                e[k] = lv.energies[idx[k]];
        } else {
            for (int k = 0; k < d; ++k)
                e[k] = level_energy(m, idx[k]);
        }
        for (int a = 0; a < d; ++a)
            for (int c = a + 1; c < d; ++c) {
                if (m.kind == ModelKind::Pendulum && (idx[a] + idx[c]) % 2 == 0)
                    continue;
                double v = sgn_element_wronskian(b, a, c, e);
                s(a, c) = v;
                s(c, a) = v;
            }
        if (m.kind == ModelKind::Morse)
            for (int a = 0; a < d; ++a) {
                double quad = sgn_element_quadrature(b, a, a);
                if (idx[a] <= 7) {
                    double closed = morse_diag_closed_form(idx[a], m.lambda);
                    if (std::abs(closed - quad) > 1e-6)
                        throw NumericalInstabilityError("Morse diagonal closed form and quadrature disagree at n = " +
                                                        std::to_string(idx[a]));
                    s(a, a) = closed;
                } else {
                    s(a, a) = quad;
                }
            }
        return s;
    }
    }
    throw DomainError("unknown model");
}

void SpectrumSlice::validate() const {
    std::size_t d = indices.size();
    if (d == 0 || energies.size() != d || static_cast<std::size_t>(sgn.rows()) != d ||
        static_cast<std::size_t>(sgn.cols()) != d)
        throw DomainError("spectrum slice has inconsistent sizes");
    for (std::size_t k = 1; k < d; ++k)
        if (!(energies[k] > energies[k - 1]))
            throw DomainError("spectrum slice energies must be strictly increasing");
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t c = 0; c < d; ++c) {
            if (std::abs(sgn(a, c) - sgn(c, a)) > 1e-12)
                throw DomainError("sgn matrix is not symmetric");
            if (std::abs(sgn(a, c)) > 1.0 + 1e-12)
                throw DomainError("sgn matrix entry outside [-1, 1]");
        }
    if (model.parity_even())
        for (std::size_t a = 0; a < d; ++a)
            if (sgn(a, a) != 0.0)
                throw DomainError("parity-even model must have a zero sgn diagonal");
}

SpectrumSlice build_slice(const ModelSystem& m, const Levels& lv) {
    SpectrumSlice s{m, lv.indices, lv.energies, sgn_matrix(m, lv.indices)};
    s.validate();
    return s;
}

SpectrumSlice build_slice(const ModelSystem& m, const EnergyWindow& w) { return build_slice(m, levels(m, w)); }

} // namespace dyncert
