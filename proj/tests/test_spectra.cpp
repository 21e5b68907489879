#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dyncert/classical.hpp"
#include "dyncert/errors.hpp"
#include "dyncert/spectra.hpp"
#include "oracles.hpp"

using namespace dyncert;
using std::numbers::pi;

namespace {

double harmonic_sgn_oracle(int n, int m) {
    auto f = [&](double x) { return oracle::hermite_function(n, x) * oracle::hermite_function(m, x); };
    double r = std::sqrt(2.0 * std::max(n, m) + 1.0) + 12.0;
    return oracle::gk(f, 0.0, r, 1e-14) - oracle::gk(f, -r, 0.0, 1e-14);
}

double well_sgn_oracle(int n, int m) {
    auto psi = [](int k, double x) {
        return k % 2 == 1 ? std::sqrt(2.0) * std::cos(k * pi * x) : std::sqrt(2.0) * std::sin(k * pi * x);
    };
    auto f = [&](double x) { return psi(n, x) * psi(m, x); };
    return oracle::gk(f, 0.0, 0.5, 1e-15) - oracle::gk(f, -0.5, 0.0, 1e-15);
}

} // namespace

TEST_CASE("level examples") {
    auto h = levels(ModelSystem::harmonic(), {0.0, 7.0});
    REQUIRE(h.indices.size() == 7);
    for (int n = 0; n <= 6; ++n)
        CHECK(h.energies[n] == doctest::Approx(n + 0.5));
    auto k0 = levels(ModelSystem::kerr(0.0), {0.0, 7.0});
    CHECK(k0.indices == h.indices);
    auto m = levels(ModelSystem::morse(10), {0.0, std::numeric_limits<double>::infinity()});
    REQUIRE(m.indices.size() == 10);
    for (int n = 0; n <= 9; ++n)
        CHECK(m.energies[n] == doctest::Approx((n + 0.5) * (1 - (n + 0.5) / 20.0)).epsilon(1e-14));
    auto w = levels(ModelSystem::infinite_well(), energy_window(ModelSystem::infinite_well(), 1.0));
    CHECK(w.indices == std::vector<int>{2});
    CHECK_THROWS_AS(levels(ModelSystem::infinite_well(), {0.6, 0.7}), EmptyWindowError);
}

TEST_CASE("Kerr levels follow the anharmonic spectrum and its window") {
    const double a = 0.02;
    auto m = ModelSystem::kerr(a);
    for (int n = 0; n < 10; ++n) {
        double x = n + 0.5;
        CHECK(level_energy(m, n) == doctest::Approx(x + a * x * x / 2 + 3 * a / 8).epsilon(1e-14));
    }
    // window from tau = 1 keeps exactly the levels whose energies satisfy the trapping inequalities
    auto w = energy_window(m, 1.0);
    auto lv = levels(m, w);
    for (int n = 0; n < 200; ++n) {
        double e = level_energy(m, n);
        bool in = e >= w.e_min && e <= w.e_max;
        bool kept = std::find(lv.indices.begin(), lv.indices.end(), n) != lv.indices.end();
        REQUIRE(in == kept);
    }
    auto neg = ModelSystem::kerr(-0.02);
    CHECK_THROWS_AS(level_energy(neg, 50), DomainError);
}

TEST_CASE("well levels obey the strict probing inequalities") {
    for (double tau : {0.05, 0.1, 0.15, 0.3, 0.5, 1.0}) {
        auto lv = levels(ModelSystem::infinite_well(), energy_window(ModelSystem::infinite_well(), tau));
        for (int n : lv.indices) {
            REQUIRE(n > 1.5 / tau);
            REQUIRE(n < 3.0 / tau);
        }
        for (int n = 1; n < 200; ++n)
            if (n > 1.5 / tau + 1e-9 && n < 3.0 / tau - 1e-9)
                REQUIRE(std::find(lv.indices.begin(), lv.indices.end(), n) != lv.indices.end());
    }
}

TEST_CASE("eigenfunction examples") {
    CHECK(eigenfunction(ModelSystem::infinite_well(), 1, 0.0).first == doctest::Approx(std::sqrt(2.0)));
    const double lam = 10.0;
    for (double x : {-1.0, 0.0, 0.4}) {
        double z = 2 * lam * std::exp(x), s = lam - 0.5;
        double ref = std::exp(-0.5 * std::lgamma(2 * s) + s * std::log(z) - z / 2);
        CHECK(std::abs(eigenfunction(ModelSystem::morse(lam), 0, x).first - ref) < 1e-13);
    }
    CHECK_THROWS_AS(eigenfunction(ModelSystem::infinite_well(), 1, 0.7), DomainError);
    CHECK_THROWS_AS(eigenfunction(ModelSystem::pendulum(-0.05), 1, 4.0), DomainError);
}

TEST_CASE("pendulum ground state matches an ODE-integrated Mathieu profile") {
    const double alpha = -0.05, q = -1.0 / (16 * alpha * alpha);
    auto sys = mathieu_eigensystem(q, 0);
    double a = oracle::mathieu_characteristic(sys[0].characteristic, q, true, 0.05);
    // integrate from u = 0 with y = 1, normalize with int_0^{pi/2} y^2 = pi/4
    namespace ode = boost::numeric::odeint;
    using state = std::array<double, 3>;
    state y{1.0, 0.0, 0.0};
    auto rhs = [&](const state& x, state& d, double u) {
        d[0] = x[1];
        d[1] = -(a - 2 * q * std::cos(2 * u)) * x[0];
        d[2] = x[0] * x[0];
    };
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_fehlberg78<state>>(1e-13, 1e-13), rhs, y, 0.0, pi / 2,
                            1e-4);
    double ce0_at_0 = 1.0 / std::sqrt(y[2] / (pi / 4));
    double psi0 = eigenfunction(ModelSystem::pendulum(alpha), 0, 0.0).first;
    CHECK(std::abs(std::abs(psi0) - ce0_at_0 / std::sqrt(pi)) < 1e-8);
}

TEST_CASE("eigenfunctions are normalized") {
    struct Case {
        ModelSystem m;
        std::vector<int> ns;
    };
    std::vector<Case> cases = {{ModelSystem::harmonic(), {0, 3, 12, 40}},
                               {ModelSystem::pendulum(-0.02), {0, 1, 5, 12}},
                               {ModelSystem::morse(10), {0, 4, 9}},
                               {ModelSystem::morse(20), {7, 15}},
                               {ModelSystem::infinite_well(), {1, 2, 9}}};
    for (auto& c : cases)
        for (int n : c.ns) {
            EigenBasis b(c.m, {n});
            auto [lo, hi] = b.support();
            double s = 0.0;
            const int panels = 32;
            for (int k = 0; k < panels; ++k)
                s += oracle::gk([&](double x) { return std::pow(b.eval(0, x).first, 2); }, lo + (hi - lo) * k / panels,
                                lo + (hi - lo) * (k + 1) / panels, 1e-14);
            REQUIRE(std::abs(s - 1.0) < 1e-10);
        }
}

TEST_CASE("Morse derivative identity matches finite differences") {
    auto m = ModelSystem::morse(12.5);
    const double h = 1e-6;
    for (int n : {0, 1, 3, 6, 11})
        for (double x : {-0.8, -0.2, 0.1, 0.35}) {
            double d = eigenfunction(m, n, x).second;
            double fd = (eigenfunction(m, n, x + h).first - eigenfunction(m, n, x - h).first) / (2 * h);
            REQUIRE(std::abs(d - fd) <= 1e-5 * std::max(1e-3, std::abs(d)));
        }
}

TEST_CASE("Morse diagonal polynomials") {
    CHECK(morse_diag_polynomial(0, 4.2) == 0.0);
    CHECK(morse_diag_polynomial(1, 4.2) == 1.0);
    CHECK(morse_diag_polynomial(2, 3.0) == doctest::Approx(12.0));
    CHECK(morse_diag_polynomial(4, 10.0) ==
          doctest::Approx(6440.0 - 5828.0 * 10 / 3 + 190.0 * 100 + 58.0 * 1000 / 3).epsilon(1e-14));
    CHECK_THROWS_AS(morse_diag_polynomial(8, 10.0), DomainError);
}

TEST_CASE("Morse diagonal closed form agrees with an independent quadrature") {
    for (double lam : {5.0, 10.0, 20.0, 7.3})
        for (int n = 0; n <= 7 && n < lam - 0.5; ++n) {
            double ref = oracle::morse_sgn(lam, n, n);
            REQUIRE(std::abs(morse_diag_closed_form(n, lam) - ref) < 1e-8);
        }
}

TEST_CASE("harmonic and Kerr elements match Hermite-function quadrature") {
    for (int n = 0; n <= 12; ++n)
        for (int m = 0; m <= 12; ++m)
            REQUIRE(std::abs(harmonic_sgn_element(n, m) - harmonic_sgn_oracle(n, m)) < 1e-10);
    // <0|sgn|1> = sqrt(2/pi)
    CHECK(harmonic_sgn_element(0, 1) == doctest::Approx(std::sqrt(2.0 / pi)).epsilon(1e-14));
    std::vector<int> idx{0, 1, 2, 3, 4, 5, 6, 7};
    Eigen::MatrixXd s = sgn_matrix(ModelSystem::harmonic(), idx);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            CHECK(s(a, b) == doctest::Approx(harmonic_sgn_element(a, b)).epsilon(1e-13));
}

TEST_CASE("harmonic elements stay finite at large index") {
    double v = harmonic_sgn_element(5000, 5001);
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) < 1.0);
    CHECK(std::abs(v) > 0.1);
}

TEST_CASE("Kerr sgn matrix does not depend on alpha") {
    std::vector<int> idx{0, 1, 2, 3, 4, 5, 6};
    Eigen::MatrixXd a = sgn_matrix(ModelSystem::kerr(0.0), idx);
    Eigen::MatrixXd b = sgn_matrix(ModelSystem::kerr(0.017), idx);
    Eigen::MatrixXd c = sgn_matrix(ModelSystem::kerr(-0.02), idx);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("well elements") {
    for (int n = 1; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m) {
            if (n == m)
                continue;
            double ref = well_sgn_oracle(n, m);
            REQUIRE(std::abs(well_sgn_element(n, m) - ref) < 1e-12);
            if ((n + m) % 2 == 1) {
                double s = n % 2 == 1 ? -1.0 : 1.0;
                REQUIRE(well_sgn_element(n, m) == (2.0 / pi) * (1.0 / (n + m) + s / (n - m)));
            }
        }
}

TEST_CASE("Morse off-diagonal elements agree with an independent quadrature") {
    for (double lam : {5.0, 10.0}) {
        std::vector<int> idx;
        for (int n = 0; n < lam - 0.5; ++n)
            idx.push_back(n);
        Eigen::MatrixXd s = sgn_matrix(ModelSystem::morse(lam), idx);
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a; b < idx.size(); ++b)
                REQUIRE(std::abs(s(a, b) - oracle::morse_sgn(lam, idx[a], idx[b])) < 1e-8);
    }
}

TEST_CASE("Wronskian and quadrature agree for every model") {
    std::mt19937_64 rng(2024);
    const ModelSystem models[] = {ModelSystem::harmonic(), ModelSystem::kerr(0.02), ModelSystem::pendulum(-0.02),
                                  ModelSystem::morse(15), ModelSystem::infinite_well()};
    for (const auto& m : models) {
        int top = m.kind == ModelKind::Morse ? 14 : 16;
        auto lv = m.kind == ModelKind::Pendulum ? levels(m, {m.energy_floor(), 1e300}) : levels_upto(m, top);
        // Kerr eigenfunctions are those of H0, so the boundary formula takes H0 energies
        if (m.kind == ModelKind::Kerr)
            lv = levels_upto(ModelSystem::harmonic(), top);
        EigenBasis b(m, lv.indices);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(lv.indices.size()) - 1);
        for (int t = 0; t < 10; ++t) {
            int i = pick(rng), j = pick(rng);
            if (i == j)
                continue;
            double w = sgn_element_wronskian(b, i, j, lv.energies);
            double q = sgn_element_quadrature(b, i, j);
            INFO(m.name(), " ", lv.indices[i], " ", lv.indices[j]);
            REQUIRE(std::abs(w - q) < 1e-8);
        }
    }
}

TEST_CASE("parity-even slices have zero same-parity elements") {
    for (auto m : {ModelSystem::harmonic(), ModelSystem::pendulum(-0.01), ModelSystem::infinite_well()}) {
        auto lv = levels_upto(m, 9);
        Eigen::MatrixXd s = sgn_matrix(m, lv.indices);
        for (int a = 0; a < s.rows(); ++a)
            for (int b = 0; b < s.cols(); ++b)
                if ((lv.indices[a] + lv.indices[b]) % 2 == 0)
                    REQUIRE(s(a, b) == 0.0);
    }
}

TEST_CASE("sgn matrix spectrum lies in [-1, 1]") {
    const ModelSystem models[] = {ModelSystem::harmonic(), ModelSystem::pendulum(-0.02), ModelSystem::morse(10),
                                  ModelSystem::infinite_well()};
    for (const auto& m : models) {
        auto lv = levels_upto(m, 9);
        Eigen::MatrixXd s = sgn_matrix(m, lv.indices);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        CHECK(es.eigenvalues().minCoeff() >= -1.0 - 1e-12);
        CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("slice validation") {
    SpectrumSlice s = build_slice(ModelSystem::harmonic(), levels_upto(ModelSystem::harmonic(), 3));
    CHECK_NOTHROW(s.validate());
    SpectrumSlice bad = s;
    bad.sgn(0, 1) += 0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = s;
    bad.sgn(2, 2) = 0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = s;
    std::swap(bad.energies[0], bad.energies[1]);
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(sgn_matrix(ModelSystem::harmonic(), {2, 1}), DomainError);
}
