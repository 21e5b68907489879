#include "dyncert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyncert/errors.hpp"

namespace dyncert {

using std::numbers::pi;
using cd = std::complex<double>;

WavefunctionSynth::WavefunctionSynth(const QuantumState& st, int k, double tau)
    : basis_((st.validate(), st.slice->model), st.slice->indices), coeffs_(st.amplitudes) {
    if (k < 0 || k > 2)
        throw DomainError("probing index k must be 0, 1 or 2");
    double t = 2.0 * pi * k * tau / 3.0;
    for (Eigen::Index a = 0; a < coeffs_.size(); ++a)
        coeffs_(a) *= std::exp(cd(0.0, -st.slice->energies[a] * t));
}

cd WavefunctionSynth::operator()(double q) const {
    Eigen::VectorXd v = basis_.values(q);
    cd s = 0.0;
    for (Eigen::Index a = 0; a < v.size(); ++a)
        s += coeffs_(a) * v(a);
    return s;
}

namespace {

std::vector<double> node_layout(double lo, double hi, int n_side) {
    std::vector<double> pts;
    if (lo < 0.0 && hi > 0.0) {
        for (int i = 0; i < n_side; ++i)
            pts.push_back(lo * (1.0 - static_cast<double>(i) / n_side));
        for (int i = 0; i <= n_side; ++i)
            pts.push_back(hi * static_cast<double>(i) / n_side);
    } else {
        for (int i = 0; i <= 2 * n_side; ++i)
            pts.push_back(lo + (hi - lo) * i / (2.0 * n_side));
    }
    return pts;
}

} // namespace

PositionSampler::PositionSampler(const WavefunctionSynth& psi, double mass_target) {
    auto [lo, hi] = psi.support();
    int n_side = 256;
    for (int iter = 0;; ++iter) {
        auto pts = node_layout(lo, hi, n_side);
        std::vector<double> vals(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            vals[i] = psi.density(pts[i]);
        PositionSampler prev = *this;
        grid_ = RealGrid(std::move(pts), std::move(vals));
        cum_.assign(grid_.size(), 0.0);
        for (std::size_t i = 1; i < grid_.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (grid_.values[i] + grid_.values[i - 1]) * (grid_.points[i] - grid_.points[i - 1]);
        mass_ = cum_.back();
        // converged when the whole CDF, not just the total mass, stops moving;
        // linear interpolation is second order, so the remaining bias is about shift / 3
        if (iter > 0) {
            double shift = std::abs(mass_ - prev.mass_);
            for (double x : prev.grid_.points)
                shift = std::max(shift, std::abs(cdf(x) - prev.cdf(x)));
            if (shift < 1e-7)
                break;
        }
        if (iter > 8)
            throw GridCoverageError("position grid did not converge");
        n_side *= 2;
    }
    if (mass_ < 1.0 - mass_target)
        throw GridCoverageError("position grid covers only " + std::to_string(mass_) + " of the probability");
}

double PositionSampler::sample(double u) const {
    double target = u * cum_.back();
    std::size_t i = std::upper_bound(cum_.begin(), cum_.end(), target) - cum_.begin();
    if (i == 0)
        return grid_.points.front();
    if (i >= cum_.size())
        return grid_.points.back();
    --i;
    double f0 = grid_.values[i], f1 = grid_.values[i + 1];
    double h = grid_.points[i + 1] - grid_.points[i];
    double r = target - cum_[i];
    double disc = f0 * f0 + 2.0 * (f1 - f0) * r / h;
    double denom = f0 + std::sqrt(std::max(disc, 0.0));
    double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return grid_.points[i] + std::clamp(s, 0.0, h);
}

double PositionSampler::cdf(double q) const {
    const auto& x = grid_.points;
    if (q <= x.front())
        return 0.0;
    if (q >= x.back())
        return 1.0;
    std::size_t i = std::upper_bound(x.begin(), x.end(), q) - x.begin() - 1;
    double h = x[i + 1] - x[i], s = q - x[i];
    double f0 = grid_.values[i], f1 = grid_.values[i + 1];
    return (cum_[i] + f0 * s + 0.5 * (f1 - f0) * s * s / h) / cum_.back();
}

McEstimate run_protocol(const QuantumState& st, double tau, std::uint64_t n_rounds, std::uint64_t seed,
                        const SimulationOptions& opt) {
    st.validate();
    if (n_rounds == 0)
        throw DomainError("n_rounds must be positive");
    if (!std::isfinite(tau) || !(tau > 0.0))
        throw DomainError("tau must be positive and finite");
    std::vector<PositionSampler> samplers;
    for (int k = 0; k < 3; ++k)
        samplers.emplace_back(WavefunctionSynth(st, k, tau), opt.mass_target);
    int workers = opt.workers > 0 ? opt.workers : default_workers();
    std::size_t chunks = static_cast<std::size_t>(std::max(1, workers));
    // half-unit counts keep the reduction exact and independent of the worker count
    std::vector<std::uint64_t> halves(chunks, 0), squares(chunks, 0);
    parallel_for(chunks, workers, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            std::uint64_t lo = n_rounds * c / chunks, hi = n_rounds * (c + 1) / chunks;
            for (std::uint64_t r = lo; r < hi; ++r) {
                int k = std::min(2, static_cast<int>(3.0 * uniform01(seed, 0, r)));
                double q = samplers[k].sample(uniform01(seed, 1, r));
                std::uint64_t h = static_cast<std::uint64_t>(2.0 * pos(q));
                halves[c] += h;
                squares[c] += h * h;
            }
        }
    });
    std::uint64_t sh = 0, sq = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        sh += halves[c];
        sq += squares[c];
    }
    double n = static_cast<double>(n_rounds);
    double mean = 0.5 * sh / n;
    double var = n > 1 ? std::max(0.0, (0.25 * sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), n_rounds, seed};
}

RealGrid marginal_density(const QuantumState& st, int k, double tau, const RealGrid& grid) {
    WavefunctionSynth psi(st, k, tau);
    const ModelSystem& m = st.slice->model;
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double q = grid.points[i];
        if (q < m.q_min() - 1e-12 || q > m.q_max() + 1e-12)
            throw DomainError("marginal grid leaves the configuration domain");
        vals[i] = psi.density(q);
    }
    return RealGrid(grid.points, std::move(vals));
}

double positive_probability(const QuantumState& st, int k, double tau) {
    WavefunctionSynth psi(st, k, tau);
    double hi = psi.support().second;
    int n_max = *std::max_element(st.slice->indices.begin(), st.slice->indices.end());
    int panels = n_max + 8;
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-15;
    opt.max_panels = 20000;
    double s = 0.0;
    for (int i = 0; i < panels; ++i)
        s += integrate([&](double q) { return psi.density(q); }, hi * i / panels, hi * (i + 1) / panels, opt);
    return s;
}

} // namespace dyncert
