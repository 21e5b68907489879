#include "dyncert/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyncert/errors.hpp"
#include "dyncert/numerics.hpp"

namespace dyncert {

using std::numbers::pi;

Duration Duration::finite(double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("finite duration must be a nonnegative real");
    return Duration(t, false);
}

double Duration::value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

namespace {

TrappingTimes symmetric(double t) {
    if (!std::isfinite(t))
        return {Duration::infinite(), Duration::infinite()};
    return {Duration::finite(t), Duration::finite(t)};
}

double kerr_h0(double alpha, double e) {
    if (alpha == 0.0)
        return e;
    return 2.0 * e / (1.0 + std::sqrt(1.0 + 2.0 * alpha * e));
}

void check_energy(const ModelSystem& m, double e) {
    if (!std::isfinite(e))
        throw DomainError("energy must be finite");
    switch (m.kind) {
    case ModelKind::Harmonic:
        if (e < 0.0)
            throw DomainError("harmonic energy must be >= 0");
        break;
    case ModelKind::Kerr:
        if (e < 0.0)
            throw DomainError("Kerr energy must be >= 0");
        if (m.alpha < 0.0 && e > 0.5 / std::abs(m.alpha))
            throw DomainError("Kerr energy exceeds 1/(2|alpha|) for alpha < 0");
        break;
    case ModelKind::Pendulum: {
        double s = 8.0 * std::abs(m.alpha) * e;
        if (s < -1.0)
            throw DomainError("pendulum energy below the potential minimum");
        if (s >= 1.0)
            throw LibrationError("pendulum energy at or above the separatrix (librating motion excluded)");
        break;
    }
    case ModelKind::Morse:
        if (e < 0.0)
            throw DomainError("Morse energy must be >= 0");
        break;
    case ModelKind::InfiniteWell:
        if (!(e > 0.0))
            throw DomainError("infinite-well energy must be > 0");
        break;
    }
}

// int_a^b sqrt(mu/2) / sqrt(E - V(q)) dq, with Taylor-expanded E - V near turning points.
double half_transit(const ModelSystem& m, double e, double a, double b, bool turn_a, bool turn_b) {
    double w = b - a;
    double mu = m.mass();
    double va1 = turn_a ? potential_d1(m, a) : 0.0, va2 = turn_a ? potential_d2(m, a) : 0.0;
    double vb1 = turn_b ? potential_d1(m, b) : 0.0, vb2 = turn_b ? potential_d2(m, b) : 0.0;
    double near = 1e-4 * std::max(w, 1e-300);
    auto g = [&](double th) {
        double s = std::sin(th), c = std::cos(th);
        double da = w * s * s, db = w * c * c;
        double gap;
        if (turn_b && db < near)
            gap = vb1 * db - 0.5 * vb2 * db * db;
        else if (turn_a && da < near)
            gap = -va1 * da - 0.5 * va2 * da * da;
        else
            gap = e - potential(m, a + da);
        return std::sqrt(0.5 * mu) / std::sqrt(gap) * w * 2.0 * s * c;
    };
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    return integrate(g, 0.0, pi / 2, opt);
}

} // namespace

TrappingTimes trapping_times(const ModelSystem& m, double e) {
    check_energy(m, e);
    switch (m.kind) {
    case ModelKind::Harmonic:
        return symmetric(0.5);
    case ModelKind::Kerr: {
        double s = 1.0 + 2.0 * m.alpha * e;
        if (s <= 0.0)
            return symmetric(std::numeric_limits<double>::infinity());
        return symmetric(0.5 / std::sqrt(s));
    }
    case ModelKind::Pendulum: {
        double mm = 0.5 * (8.0 * std::abs(m.alpha) * e + 1.0);
        return symmetric(elliptic_K(mm) / pi);
    }
    case ModelKind::Morse: {
        double eps = 2.0 * e / m.lambda;
        if (eps == 0.0)
            return symmetric(0.5);
        if (eps < 1.0) {
            double ac = std::acos(std::sqrt(eps)), r = std::sqrt(1.0 - eps);
            return {Duration::finite(2.0 * ac / (2.0 * pi * r)),
                    Duration::finite((2.0 * pi - 2.0 * ac) / (2.0 * pi * r))};
        }
        if (eps == 1.0)
            return {Duration::finite(1.0 / pi), Duration::infinite()};
        double r = std::sqrt(eps - 1.0);
        return {Duration::finite(2.0 * std::acosh(std::sqrt(eps)) / (2.0 * pi * r)), Duration::infinite()};
    }
    case ModelKind::InfiniteWell:
        return symmetric(0.5 / std::sqrt(e));
    }
    throw DomainError("unknown model");
}

TrappingTimes trapping_times_quadrature(const ModelSystem& m, double e) {
    check_energy(m, e);
    const double to_period = 1.0 / (2.0 * pi);
    switch (m.kind) {
    case ModelKind::Kerr: {
        double h0 = kerr_h0(m.alpha, e);
        double omega = 1.0 + m.alpha * h0;
        if (omega <= 0.0)
            return symmetric(std::numeric_limits<double>::infinity());
        if (h0 == 0.0)
            return symmetric(0.5 / omega);
        double r = std::sqrt(2.0 * h0);
        auto g = [&](double th) {
            double s = std::sin(th), c = std::cos(th);
            double db = r * c * c;
            return 1.0 / (omega * std::sqrt(db * (2.0 * r - db))) * r * 2.0 * s * c;
        };
        double t = 2.0 * integrate(g, 0.0, pi / 2) * to_period;
        return symmetric(t);
    }
    case ModelKind::Harmonic:
    case ModelKind::Pendulum: {
        if (e == 0.0 && m.kind == ModelKind::Harmonic)
            return symmetric(0.5);
        double qp = m.kind == ModelKind::Harmonic ? std::sqrt(2.0 * e)
                                                  : std::acos(-8.0 * std::abs(m.alpha) * e);
        if (qp == 0.0)
            return symmetric(0.5);
        return symmetric(2.0 * half_transit(m, e, 0.0, qp, false, true) * to_period);
    }
    case ModelKind::Morse: {
        double eps = 2.0 * e / m.lambda;
        if (eps == 0.0)
            return symmetric(0.5);
        double qp = std::log1p(std::sqrt(eps));
        Duration plus = Duration::finite(2.0 * half_transit(m, e, 0.0, qp, false, true) * to_period);
        if (eps >= 1.0)
            return {plus, Duration::infinite()};
        double qm = std::log1p(-std::sqrt(eps));
        return {plus, Duration::finite(2.0 * half_transit(m, e, qm, 0.0, true, false) * to_period)};
    }
    case ModelKind::InfiniteWell:
        return symmetric(2.0 * half_transit(m, e, 0.0, 0.5, false, false) * to_period);
    }
    throw DomainError("unknown model");
}

TauRange admissible_tau(const ModelSystem& m) {
    if (m.kind == ModelKind::InfiniteWell)
        return {0.0, std::numeric_limits<double>::infinity()};
    return {0.75, 1.5};
}

EnergyWindow energy_window(const ModelSystem& m, double tau) {
    m.validate();
    TauRange r = admissible_tau(m);
    const double slop = 1e-12;
    if (!std::isfinite(tau) || !(tau > r.lo - slop) || !(tau < r.hi + slop) || !(tau > 0.0))
        throw DomainError("probing ratio tau outside the admissible range for " + m.name());
    constexpr double inf = std::numeric_limits<double>::infinity();
    EnergyWindow w;
    switch (m.kind) {
    case ModelKind::Harmonic:
    case ModelKind::Morse:
        w = {0.0, inf};
        break;
    case ModelKind::Kerr: {
        double a = m.alpha;
        double lo = 9.0 / (16.0 * tau * tau) - 1.0, hi = 9.0 / (4.0 * tau * tau) - 1.0;
        if (a == 0.0)
            w = {0.0, inf};
        else if (a > 0.0)
            w = {std::max(0.0, lo / (2.0 * a)), hi / (2.0 * a)};
        else
            w = {std::max(0.0, hi / (2.0 * a)), std::min(lo / (2.0 * a), 0.5 / std::abs(a))};
        break;
    }
    case ModelKind::Pendulum: {
        double s = 8.0 * std::abs(m.alpha);
        double e_max = (2.0 * elliptic_K_inverse(std::max(pi / 2, 2.0 * pi * tau / 3.0)) - 1.0) / s;
        double k_lo = pi * tau / 3.0;
        double e_min = k_lo >= pi / 2 ? (2.0 * elliptic_K_inverse(k_lo) - 1.0) / s : -1.0 / s;
        w = {std::max(e_min, -1.0 / s), e_max};
        break;
    }
    case ModelKind::InfiniteWell:
        w = {9.0 / (16.0 * tau * tau), 9.0 / (4.0 * tau * tau)};
        break;
    }
    if (w.e_min > w.e_max)
        throw EmptyWindowError("energy window is empty for " + m.name() + " at tau = " + std::to_string(tau));
    return w;
}

double pos(double q) {
    if (std::abs(q) < 1e-12)
        return 0.5;
    return q > 0.0 ? 1.0 : 0.0;
}

namespace {

constexpr double yoshida_w1 = -1.17767998417887;
constexpr double yoshida_w2 = 0.235573213359357;
constexpr double yoshida_w3 = 0.784513610477560;
constexpr double yoshida_w0 = 1.0 - 2.0 * (yoshida_w1 + yoshida_w2 + yoshida_w3);
constexpr double yoshida_seq[7] = {yoshida_w3, yoshida_w2, yoshida_w1, yoshida_w0,
                                   yoshida_w1, yoshida_w2, yoshida_w3};

PhasePoint yoshida6(const ModelSystem& m, PhasePoint x, double t_phys, int n) {
    double h = t_phys / n, inv_mu = 1.0 / m.mass();
    double q = x.q, p = x.p;
    for (int i = 0; i < n; ++i) {
        for (double c : yoshida_seq) {
            double hh = c * h;
            p -= 0.5 * hh * potential_d1(m, q);
            q += hh * p * inv_mu;
            p -= 0.5 * hh * potential_d1(m, q);
        }
    }
    return {q, p};
}

PhasePoint rotate(double q, double p, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {q * c + p * s, -q * s + p * c};
}

PhasePoint well_flight(double q0, double p0, double t) {
    // unfold the box onto a circle of length 2
    double y = q0 + 0.5 + p0 * t / pi;
    y = std::fmod(y, 2.0);
    if (y < 0.0)
        y += 2.0;
    if (y <= 1.0)
        return {y - 0.5, p0};
    return {1.5 - y, -p0};
}

} // namespace

PhasePoint integrate_trajectory(const ModelSystem& m, double q0, double p0, double t, const TrajectoryOptions& opt) {
    if (!std::isfinite(q0) || !std::isfinite(p0) || !std::isfinite(t))
        throw DomainError("trajectory inputs must be finite");
    switch (m.kind) {
    case ModelKind::Harmonic:
        return rotate(q0, p0, 2.0 * pi * t);
    case ModelKind::Kerr: {
        // H = f(H0): exact flow is the H0 rotation run at frequency f'(H0)
        double h0 = 0.5 * (q0 * q0 + p0 * p0);
        if (m.alpha < 0.0 && h0 > 1.0 / std::abs(m.alpha))
            throw DomainError("Kerr state violates H0 <= 1/|alpha|");
        return rotate(q0, p0, 2.0 * pi * t * (1.0 + m.alpha * h0));
    }
    case ModelKind::InfiniteWell:
        if (std::abs(q0) > 0.5)
            throw DomainError("well position outside [-1/2, 1/2]");
        return well_flight(q0, p0, t);
    case ModelKind::Pendulum:
    case ModelKind::Morse:
        break;
    }
    if (t == 0.0)
        return {q0, p0};
    double tp = 2.0 * pi * t;
    int n = 8 + static_cast<int>(std::ceil(24.0 * std::abs(t)));
    PhasePoint coarse = yoshida6(m, {q0, p0}, tp, n);
    for (int d = 0; d < opt.max_doublings; ++d) {
        n *= 2;
        PhasePoint fine = yoshida6(m, {q0, p0}, tp, n);
        double scale = 1.0 + std::abs(fine.q) + std::abs(fine.p) / std::sqrt(m.mass());
        double diff = std::abs(fine.q - coarse.q) + std::abs(fine.p - coarse.p) / std::sqrt(m.mass());
        if (diff / 63.0 <= opt.tol * scale) {
            PhasePoint out = fine;
            if (m.kind == ModelKind::Pendulum)
                out.q = std::remainder(out.q, 2.0 * pi);
            return out;
        }
        coarse = fine;
    }
    throw ConvergenceError("trajectory step doubling did not converge");
}

double classical_state_score(const ModelSystem& m, double q0, double p0, double tau, const TrajectoryOptions& opt) {
    PhasePoint a = integrate_trajectory(m, q0, p0, tau / 3.0, opt);
    PhasePoint b = integrate_trajectory(m, a.q, a.p, tau / 3.0, opt);
    return (pos(q0) + pos(a.q) + pos(b.q)) / 3.0;
}

namespace {

struct Box {
    double q_lo, q_hi, p_max, e_hi;
};

Box sampling_box(const ModelSystem& m, const EnergyWindow& w, const OracleOptions& opt) {
    double e_hi = w.bounded() ? w.e_max : std::max(opt.energy_cap, w.e_min);
    switch (m.kind) {
    case ModelKind::Harmonic: {
        double r = std::sqrt(2.0 * e_hi);
        return {-r, r, r, e_hi};
    }
    case ModelKind::Kerr: {
        if (m.alpha < 0.0)
            e_hi = std::min(e_hi, 0.5 / std::abs(m.alpha));
        double r = std::sqrt(2.0 * kerr_h0(m.alpha, e_hi));
        return {-r, r, r, e_hi};
    }
    case ModelKind::Pendulum: {
        double s = 8.0 * std::abs(m.alpha);
        e_hi = std::min(e_hi, std::nextafter(1.0 / s, 0.0));
        return {-pi, pi, std::sqrt((e_hi + 1.0 / s) / (4.0 * std::abs(m.alpha))), e_hi};
    }
    case ModelKind::Morse: {
        double eps = 2.0 * e_hi / m.lambda;
        double hi = std::log1p(std::sqrt(eps));
        double lo = eps < 1.0 ? std::max(std::log1p(-std::sqrt(eps)), opt.morse_x_floor) : opt.morse_x_floor;
        return {lo, hi, std::sqrt(2.0 * m.lambda * e_hi), e_hi};
    }
    case ModelKind::InfiniteWell:
        return {-0.5, 0.5, 2.0 * pi * std::sqrt(e_hi), e_hi};
    }
    throw DomainError("unknown model");
}

} // namespace

OracleResult classical_score_oracle(const ModelSystem& m, const EnergyWindow& w, double tau, std::uint64_t n_samples,
                                    std::uint64_t seed, const OracleOptions& opt) {
    m.validate();
    if (n_samples == 0)
        throw DomainError("oracle needs at least one sample");
    Box box = sampling_box(m, w, opt);
    if (w.e_min > box.e_hi)
        throw EmptyWindowError("sampling window is empty");
    TrajectoryOptions topt;
    topt.tol = 1e-8;
    int workers = opt.workers > 0 ? opt.workers : default_workers();
    int chunks = std::max(1, workers);
    std::vector<double> best(chunks, 0.0);
    std::vector<std::uint64_t> violations(chunks, 0);
    parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            std::uint64_t lo = n_samples * c / chunks, hi = n_samples * (c + 1) / chunks;
            for (std::uint64_t i = lo; i < hi; ++i) {
                double q = 0.0, p = 0.0;
                bool accepted = false;
                for (std::uint64_t attempt = 0; attempt < 1000000 && !accepted; ++attempt) {
                    q = box.q_lo + (box.q_hi - box.q_lo) * uniform01(seed, i, 2 * attempt);
                    p = box.p_max * (2.0 * uniform01(seed, i, 2 * attempt + 1) - 1.0);
                    double e = classical_energy(m, q, p);
                    accepted = e >= w.e_min && e <= box.e_hi;
                    if (accepted && m.kind == ModelKind::Kerr && m.alpha < 0.0)
                        accepted = 0.5 * (q * q + p * p) <= 1.0 / std::abs(m.alpha);
                }
                if (!accepted)
                    throw ConvergenceError("rejection sampler failed to find a state in the window");
                double s = classical_state_score(m, q, p, tau, topt);
                best[c] = std::max(best[c], s);
                if (s > 2.0 / 3.0 + 1e-12)
                    ++violations[c];
            }
        }
    });
    OracleResult r{0.0, n_samples, 0};
    for (int c = 0; c < chunks; ++c) {
        r.max_score = std::max(r.max_score, best[c]);
        r.n_violations += violations[c];
    }
    return r;
}

} // namespace dyncert
