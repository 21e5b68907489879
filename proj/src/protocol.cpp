#include "dyncert/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "dyncert/errors.hpp"

namespace dyncert {

using std::numbers::pi;
using cd = std::complex<double>;

void QuantumState::validate() const {
    if (!slice)
        throw DomainError("quantum state has no spectrum slice");
    if (static_cast<std::size_t>(amplitudes.size()) != slice->dim())
        throw DomainError("state amplitudes do not match the slice dimension");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
        throw DomainError("state amplitudes must have unit norm");
}

HermitianMatrix build_q3(const SpectrumSlice& s, double tau) {
    int d = static_cast<int>(s.dim());
    if (d == 0)
        throw DomainError("empty spectrum slice");
    Eigen::MatrixXcd q(d, d);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) {
            double theta = 2.0 * pi * (s.energies[a] - s.energies[c]) / 3.0;
            cd sum = 0.0;
            for (int k = 0; k < 3; ++k)
                sum += std::exp(cd(0.0, k * tau * theta));
            q(a, c) = (a == c ? 0.5 : 0.0) + sum * s.sgn(a, c) / 6.0;
        }
    // exact Hermitian symmetry despite rounding in the exponentials
    Eigen::MatrixXcd h = 0.5 * (q + q.adjoint());
    return HermitianMatrix(h);
}

Eigen::MatrixXd q3_real_form(const SpectrumSlice& s, double tau) {
    int d = static_cast<int>(s.dim());
    Eigen::MatrixXd r(d, d);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) {
            double theta = 2.0 * pi * (s.energies[a] - s.energies[c]) / 3.0;
            r(a, c) = (a == c ? 0.5 : 0.0) + (1.0 + 2.0 * std::cos(tau * theta)) * s.sgn(a, c) / 6.0;
        }
    return r;
}

namespace {

Eigen::VectorXcd phase_back(const SpectrumSlice& s, double tau, const Eigen::VectorXd& u) {
    Eigen::VectorXcd v(u.size());
    for (int a = 0; a < u.size(); ++a)
        v(a) = std::exp(cd(0.0, tau * 2.0 * pi * s.energies[a] / 3.0)) * u(a);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    cd ph = std::abs(v(imax)) > 0 ? std::conj(v(imax)) / std::abs(v(imax)) : cd(1.0);
    return v * ph / v.norm();
}

} // namespace

ScoreResult max_score(const SlicePtr& s, double tau, const EigenpairOptions& opt) {
    if (!s)
        throw DomainError("missing spectrum slice");
    if (!std::isfinite(tau) || !(tau > 0.0))
        throw DomainError("tau must be positive and finite");
    RealEigenpair ep = symmetric_max_eigenpair(q3_real_form(*s, tau), opt);
    QuantumState st{s, phase_back(*s, tau, ep.vector)};
    return {ep.value, st, tau, std::nullopt, ep.residual};
}

double max_score_value(const SpectrumSlice& s, double tau, const EigenpairOptions& opt) {
    return symmetric_max_eigenpair(q3_real_form(s, tau), opt).value;
}

double score_state(const QuantumState& st, double tau) {
    st.validate();
    if (!std::isfinite(tau) || !(tau > 0.0))
        throw DomainError("tau must be positive and finite");
    Eigen::MatrixXd r = q3_real_form(*st.slice, tau);
    const SpectrumSlice& s = *st.slice;
    Eigen::VectorXcd u(st.amplitudes.size());
    for (int a = 0; a < u.size(); ++a)
        u(a) = std::exp(cd(0.0, -tau * 2.0 * pi * s.energies[a] / 3.0)) * st.amplitudes(a);
    return std::real(u.dot(r.cast<cd>() * u));
}

SpectrumSlice slice_for(const ModelSystem& m, double tau, WindowPolicy policy, const Truncation& trunc) {
    if (policy == WindowPolicy::Fixed) {
        if (trunc.window)
            return build_slice(m, *trunc.window);
        if (trunc.n_max)
            return build_slice(m, levels_upto(m, *trunc.n_max));
        throw UsageError("fixed window policy needs a window or a truncation");
    }
    EnergyWindow w = energy_window(m, tau);
    if (w.bounded() || m.kind == ModelKind::Morse ||
        (m.kind == ModelKind::Kerr && m.alpha < 0.0)) {
        Levels lv = levels(m, w);
        if (trunc.n_max) {
            Levels cut;
            for (std::size_t k = 0; k < lv.indices.size(); ++k)
                if (lv.indices[k] <= *trunc.n_max) {
                    cut.indices.push_back(lv.indices[k]);
                    cut.energies.push_back(lv.energies[k]);
                }
            if (cut.indices.empty())
                throw EmptyWindowError("truncation excludes every level in the window");
            return build_slice(m, cut);
        }
        return build_slice(m, lv);
    }
    if (!trunc.n_max)
        throw UsageError("unbounded energy window for " + m.name() + ": give a truncation n_max");
    Levels lv = levels_upto(m, *trunc.n_max);
    Levels cut;
    for (std::size_t k = 0; k < lv.indices.size(); ++k)
        if (w.contains(lv.energies[k])) {
            cut.indices.push_back(lv.indices[k]);
            cut.energies.push_back(lv.energies[k]);
        }
    if (cut.indices.empty())
        throw EmptyWindowError("no level in the window");
    return build_slice(m, cut);
}

std::vector<ScanPoint> scan_tau(const ModelSystem& m, const std::vector<double>& grid, WindowPolicy policy,
                                const Truncation& trunc, int workers) {
    std::vector<ScanPoint> out(grid.size());
    std::shared_ptr<SpectrumSlice> fixed;
    if (policy == WindowPolicy::Fixed)
        fixed = std::make_shared<SpectrumSlice>(slice_for(m, 1.0, policy, trunc));
    parallel_for(grid.size(), workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double tau = grid[i];
            out[i] = {tau, std::nan(""), 0, ""};
            try {
                TauRange r = admissible_tau(m);
                if (tau < r.lo - 1e-12 || tau > r.hi + 1e-12 || !(tau > 0.0))
                    throw DomainError("tau outside the admissible range");
                if (fixed) {
                    out[i].p3_max = max_score_value(*fixed, tau);
                    out[i].dim = static_cast<int>(fixed->dim());
                } else {
                    SpectrumSlice s = slice_for(m, tau, policy, trunc);
                    out[i].p3_max = max_score_value(s, tau);
                    out[i].dim = static_cast<int>(s.dim());
                }
            } catch (const Error& e) {
                out[i].error = e.code() + ": " + e.what();
            }
        }
    });
    return out;
}

ReferenceKind parse_reference_kind(const std::string& s) {
    if (s == "psi6")
        return ReferenceKind::Psi6;
    if (s == "psi4")
        return ReferenceKind::Psi4;
    throw UsageError("unknown reference state '" + s + "'");
}

std::string to_string(ReferenceKind k) { return k == ReferenceKind::Psi6 ? "psi6" : "psi4"; }

namespace {

std::vector<cd> reference_amplitudes(ReferenceKind k) {
    if (k == ReferenceKind::Psi6)
        return {4.0 / std::sqrt(42.0), 0.0, 0.0, -1.0 / std::sqrt(2.0), 0.0, 0.0, std::sqrt(5.0 / 42.0)};
    const double weights[5] = {0.279, 0.191, 0.121, 0.309, 0.100};
    const double theta4 = 0.215 * pi;
    std::vector<cd> a;
    for (int n = 0; n < 5; ++n)
        a.push_back(std::sqrt(weights[n]) * std::exp(cd(0.0, -n * theta4)));
    return a;
}

} // namespace

QuantumState reference_state(ReferenceKind k, const SlicePtr& s) {
    if (!s)
        throw DomainError("missing spectrum slice");
    auto amp = reference_amplitudes(k);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s->dim()));
    for (std::size_t n = 0; n < amp.size(); ++n) {
        auto it = std::find(s->indices.begin(), s->indices.end(), static_cast<int>(n));
        if (it == s->indices.end())
            throw DomainError("slice lacks level " + std::to_string(n) + " needed by " + to_string(k));
        v(it - s->indices.begin()) = amp[n];
    }
    v /= v.norm();
    QuantumState st{s, v};
    st.validate();
    return st;
}

double harmonic_reference_tau(ReferenceKind k) {
    if (k == ReferenceKind::Psi6)
        return 1.0;
    static const double tau = [] {
        auto s = std::make_shared<SpectrumSlice>(build_slice(ModelSystem::harmonic(), levels_upto(ModelSystem::harmonic(), 4)));
        QuantumState st = reference_state(ReferenceKind::Psi4, s);
        return golden_maximize([&](double t) { return score_state(st, t); }, 0.75, 1.5).x;
    }();
    return tau;
}

std::optional<TauRange> window_tau_range(const ModelSystem& m, const SpectrumSlice& s, double lo, double hi) {
    auto inside = [&](double tau) {
        EnergyWindow w = energy_window(m, tau);
        return std::all_of(s.energies.begin(), s.energies.end(), [&](double e) { return w.contains(e); });
    };
    // the windows grow or shrink monotonically in tau, so the admissible set is one interval
    const int n = 600;
    int first = -1, last = -1;
    for (int i = 0; i <= n; ++i)
        if (inside(lo + (hi - lo) * i / n)) {
            if (first < 0)
                first = i;
            last = i;
        }
    if (first < 0)
        return std::nullopt;
    auto edge = [&](double in, double out) {
        for (int it = 0; it < 60 && std::abs(out - in) > 1e-12; ++it) {
            double mid = 0.5 * (in + out);
            (inside(mid) ? in : out) = mid;
        }
        return in;
    };
    double step = (hi - lo) / n;
    double a = first == 0 ? lo : edge(lo + first * step, lo + (first - 1) * step);
    double b = last == n ? hi : edge(lo + last * step, lo + (last + 1) * step);
    return TauRange{a, b};
}

ScenarioTable scenario_compare(const ModelSystem& m, int n_hat) {
    if (n_hat != 4 && n_hat != 6)
        throw UsageError("scenario truncation n_hat must be 4 or 6");
    ScenarioTable t;
    if ((m.kind == ModelKind::Kerr || m.kind == ModelKind::Pendulum) && std::abs(m.alpha) > 0.02)
        t.warnings.push_back("|alpha| > 0.02 lies outside the weak-anharmonicity regime");
    ReferenceKind ref = n_hat == 6 ? ReferenceKind::Psi6 : ReferenceKind::Psi4;
    auto s = std::make_shared<SpectrumSlice>(build_slice(m, levels_upto(m, n_hat)));
    TauRange r = admissible_tau(m);
    // the classical bound only holds where the window contains every level of the slice
    auto valid = window_tau_range(m, *s, std::max(r.lo, 0.75), std::min(r.hi, 1.5));
    if (!valid)
        throw EmptyWindowError("no tau in [3/4, 3/2] has a window containing levels 0.." + std::to_string(n_hat));
    double lo = valid->lo, hi = valid->hi;
    t.tau_range = *valid;
    QuantumState st = reference_state(ref, s);
    double tau_h = harmonic_reference_tau(ref);

    double fixed = score_state(st, tau_h);
    t.reference_fixed = {"reference state at harmonic tau", fixed, tau_h};
    bool fixed_valid = tau_h >= lo - 1e-12 && tau_h <= hi + 1e-12;
    if (!fixed_valid)
        t.warnings.push_back("harmonic tau lies outside the range where the window contains the slice");

    Maximum best_ref = golden_maximize([&](double x) { return score_state(st, x); }, lo, hi);
    if (fixed_valid && fixed >= best_ref.value)
        best_ref = {tau_h, fixed};
    t.reference_opt = {"reference state, optimized tau", best_ref.value, best_ref.x};

    Maximum best = golden_maximize([&](double x) { return max_score_value(*s, x); }, lo, hi);
    double at_ref = max_score_value(*s, best_ref.x);
    if (at_ref >= best.value)
        best = {best_ref.x, at_ref};
    t.optimal = {"optimal state and tau", best.value, best.x};
    return t;
}

} // namespace dyncert
