#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyncert/errors.hpp"
#include "dyncert/simulate.hpp"
#include "oracles.hpp"

using namespace dyncert;
using std::numbers::pi;

namespace {

SlicePtr slice_of(const ModelSystem& m, int n_max) {
    return std::make_shared<SpectrumSlice>(build_slice(m, levels_upto(m, n_max)));
}

QuantumState psi6() { return reference_state(ReferenceKind::Psi6, slice_of(ModelSystem::harmonic(), 6)); }

QuantumState eigenstate(const SlicePtr& s, int i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s->dim()));
    v(i) = 1.0;
    return {s, v};
}

} // namespace

TEST_CASE("Monte Carlo reproduces the exact six-level score") {
    QuantumState st = psi6();
    SimulationOptions opt;
    opt.workers = 1;
    McEstimate e = run_protocol(st, 1.0, 200000, 7, opt);
    CHECK(e.n_rounds == 200000);
    CHECK(e.seed == 7);
    CHECK(std::abs(e.p3_hat - 0.687) <= 3.0 * e.std_error + 1e-3);
    CHECK(std::abs(e.p3_hat - score_state(st, 1.0)) <= 4.0 * e.std_error);
    // Bernoulli in half units: stderr follows from the mean alone
    CHECK(e.std_error == doctest::Approx(std::sqrt(e.p3_hat * (1 - e.p3_hat) / 199999.0)).epsilon(1e-3));
}

TEST_CASE("energy eigenstates score one half") {
    for (auto m : {ModelSystem::harmonic(), ModelSystem::infinite_well(), ModelSystem::pendulum(-0.05)}) {
        auto s = slice_of(m, 3);
        McEstimate e = run_protocol(eigenstate(s, 1), 1.0, 50000, 3);
        CHECK(std::abs(e.p3_hat - 0.5) <= 3.0 * e.std_error);
    }
}

TEST_CASE("estimates are calibrated across seeds") {
    QuantumState st = psi6();
    double exact = score_state(st, 1.0);
    int inside = 0;
    const int seeds = 50;
    for (int seed = 0; seed < seeds; ++seed) {
        McEstimate e = run_protocol(st, 1.0, 100000, 1000 + seed);
        if (std::abs(e.p3_hat - exact) <= 4.0 * e.std_error)
            ++inside;
    }
    // 4 sigma misses have probability 6e-5; more than one in 50 would flag a biased sampler
    CHECK(inside >= seeds - 1);
}

TEST_CASE("worker count does not change the estimate") {
    QuantumState st = reference_state(ReferenceKind::Psi4, slice_of(ModelSystem::harmonic(), 4));
    SimulationOptions one, many;
    one.workers = 1;
    many.workers = 8;
    McEstimate a = run_protocol(st, 1.1, 30001, 99, one);
    McEstimate b = run_protocol(st, 1.1, 30001, 99, many);
    CHECK(a.p3_hat == b.p3_hat);
    CHECK(a.std_error == b.std_error);
    McEstimate c = run_protocol(st, 1.1, 30001, 100, one);
    CHECK(a.p3_hat != c.p3_hat);
}

TEST_CASE("run_protocol rejects bad inputs") {
    CHECK_THROWS_AS(run_protocol(psi6(), 1.0, 0, 1), DomainError);
    CHECK_THROWS_AS(run_protocol(psi6(), -1.0, 10, 1), DomainError);
}

TEST_CASE("marginal densities") {
    QuantumState st = psi6();
    RealGrid g = RealGrid::uniform(-16.0, 16.0, 4001);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(marginal_density(st, k, 1.0, g).trapezoid() - 1.0) <= 1e-6);
    RealGrid a = marginal_density(st, 0, 1.0, g), b = marginal_density(st, 1, 1.0, g);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    CHECK(diff < 1e-12);

    auto s = slice_of(ModelSystem::harmonic(), 4);
    QuantumState ground = eigenstate(s, 0);
    RealGrid g0 = marginal_density(ground, 0, 1.3, g), g2 = marginal_density(ground, 2, 1.3, g);
    for (std::size_t i = 0; i < g.size(); i += 50)
        REQUIRE(std::abs(g0.values[i] - g2.values[i]) < 1e-15);

    RealGrid out = RealGrid::uniform(-0.7, 0.7, 11);
    CHECK_THROWS_AS(marginal_density(eigenstate(slice_of(ModelSystem::infinite_well(), 2), 0), 0, 1.0, out), DomainError);
}

TEST_CASE("anharmonic and bounded models simulate to the exact score") {
    const ModelSystem models[] = {ModelSystem::morse(10), ModelSystem::pendulum(-0.02), ModelSystem::infinite_well()};
    for (const auto& m : models) {
        auto s = std::make_shared<SpectrumSlice>(build_slice(m, levels_upto(m, 4)));
        ScoreResult r = max_score(s, 1.0);
        McEstimate e = run_protocol(r.state, 1.0, 100000, 11);
        INFO(m.name());
        CHECK(std::abs(e.p3_hat - r.p3_max) <= 4.0 * e.std_error);
    }
}

TEST_CASE("deterministic positivity matches the exact score") {
    const ModelSystem models[] = {ModelSystem::harmonic(), ModelSystem::kerr(0.02), ModelSystem::morse(10),
                                  ModelSystem::infinite_well(), ModelSystem::pendulum(-0.02)};
    for (const auto& m : models) {
        auto s = std::make_shared<SpectrumSlice>(build_slice(m, levels_upto(m, 6)));
        ScoreResult r = max_score(s, 1.0);
        double sum = 0.0;
        for (int k = 0; k < 3; ++k)
            sum += positive_probability(r.state, k, 1.0);
        INFO(m.name());
        CHECK(std::abs(sum / 3.0 - r.p3_max) <= 1e-6);
    }
}

TEST_CASE("inverse-CDF sampler passes a Kolmogorov-Smirnov test") {
    QuantumState st = psi6();
    for (int k = 0; k < 3; ++k) {
        PositionSampler sampler(WavefunctionSynth(st, k, 1.0));
        CHECK(sampler.covered_mass() >= 1.0 - 1e-8);
        const int n = 10000;
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i)
            xs[i] = sampler.sample(uniform01(5, 7 + k, i));
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            double f = sampler.cdf(xs[i]);
            d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
        }
        CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("sampler CDF matches direct quadrature of the density") {
    QuantumState st = psi6();
    WavefunctionSynth psi(st, 1, 1.0);
    PositionSampler sampler(psi);
    for (double q : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
        double ref = oracle::gk([&](double x) { return psi.density(x); }, -20.0, q, 1e-13);
        CHECK(std::abs(sampler.cdf(q) - ref) < 1e-6);
    }
}

TEST_CASE("unreachable mass target is reported") {
    QuantumState st = psi6();
    CHECK_THROWS_AS(PositionSampler(WavefunctionSynth(st, 0, 1.0), -1e-3), GridCoverageError);
    CHECK_THROWS_AS(WavefunctionSynth(st, 3, 1.0), DomainError);
}
