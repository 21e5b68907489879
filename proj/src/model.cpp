#include "dyncert/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dyncert/errors.hpp"

namespace dyncert {

using std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

ModelSystem ModelSystem::harmonic() { return {ModelKind::Harmonic, 0.0, 0.0}; }

ModelSystem ModelSystem::kerr(double alpha) {
    ModelSystem m{ModelKind::Kerr, alpha, 0.0};
    m.validate();
    return m;
}

ModelSystem ModelSystem::pendulum(double alpha) {
    ModelSystem m{ModelKind::Pendulum, alpha, 0.0};
    m.validate();
    return m;
}

ModelSystem ModelSystem::morse(double lambda) {
    ModelSystem m{ModelKind::Morse, 0.0, lambda};
    m.validate();
    return m;
}

ModelSystem ModelSystem::infinite_well() { return {ModelKind::InfiniteWell, 0.0, 0.0}; }

void ModelSystem::validate() const {
    switch (kind) {
    case ModelKind::Kerr:
        if (!std::isfinite(alpha))
            throw DomainError("Kerr alpha must be finite");
        break;
    case ModelKind::Pendulum:
        if (!(alpha < 0.0) || !std::isfinite(alpha))
            throw DomainError("pendulum alpha must be negative");
        break;
    case ModelKind::Morse:
        if (!(lambda > 0.5) || !std::isfinite(lambda))
            throw DomainError("Morse lambda must exceed 1/2");
        break;
    default:
        break;
    }
}

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::Harmonic: return "harmonic";
    case ModelKind::Kerr: return "kerr";
    case ModelKind::Pendulum: return "pendulum";
    case ModelKind::Morse: return "morse";
    case ModelKind::InfiniteWell: return "well";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "harmonic") return ModelKind::Harmonic;
    if (s == "kerr") return ModelKind::Kerr;
    if (s == "pendulum") return ModelKind::Pendulum;
    if (s == "morse") return ModelKind::Morse;
    if (s == "well" || s == "infinite-well") return ModelKind::InfiniteWell;
    throw UsageError("unknown model '" + s + "'");
}

std::string ModelSystem::name() const { return to_string(kind); }

double ModelSystem::mass() const {
    switch (kind) {
    case ModelKind::Pendulum: return 1.0 / (8.0 * std::abs(alpha));
    case ModelKind::Morse: return lambda;
    case ModelKind::InfiniteWell: return 2.0 * pi * pi;
    default: return 1.0;
    }
}

double ModelSystem::q_min() const {
    switch (kind) {
    case ModelKind::Pendulum: return -pi;
    case ModelKind::InfiniteWell: return -0.5;
    default: return -inf;
    }
}

double ModelSystem::q_max() const {
    switch (kind) {
    case ModelKind::Pendulum: return pi;
    case ModelKind::InfiniteWell: return 0.5;
    default: return inf;
    }
}

double ModelSystem::energy_floor() const {
    if (kind == ModelKind::Pendulum)
        return -1.0 / (8.0 * std::abs(alpha));
    return 0.0;
}

double potential(const ModelSystem& m, double q) {
    switch (m.kind) {
    case ModelKind::Harmonic: return 0.5 * q * q;
    case ModelKind::Pendulum: return -std::cos(q) / (8.0 * std::abs(m.alpha));
    case ModelKind::Morse: {
        double s = -std::expm1(q);
        return 0.5 * m.lambda * s * s;
    }
    case ModelKind::InfiniteWell: return std::abs(q) <= 0.5 ? 0.0 : inf;
    case ModelKind::Kerr: break;
    }
    throw ModelMismatchError("Kerr Hamiltonian has no potential form");
}

double potential_d1(const ModelSystem& m, double q) {
    switch (m.kind) {
    case ModelKind::Harmonic: return q;
    case ModelKind::Pendulum: return std::sin(q) / (8.0 * std::abs(m.alpha));
    case ModelKind::Morse: return m.lambda * std::expm1(q) * std::exp(q);
    case ModelKind::InfiniteWell: return 0.0;
    case ModelKind::Kerr: break;
    }
    throw ModelMismatchError("Kerr Hamiltonian has no potential form");
}

double potential_d2(const ModelSystem& m, double q) {
    switch (m.kind) {
    case ModelKind::Harmonic: return 1.0;
    case ModelKind::Pendulum: return std::cos(q) / (8.0 * std::abs(m.alpha));
    case ModelKind::Morse: return m.lambda * (2.0 * std::exp(2.0 * q) - std::exp(q));
    case ModelKind::InfiniteWell: return 0.0;
    case ModelKind::Kerr: break;
    }
    throw ModelMismatchError("Kerr Hamiltonian has no potential form");
}

double classical_energy(const ModelSystem& m, double q, double p) {
    if (m.kind == ModelKind::Kerr) {
        double h0 = 0.5 * (q * q + p * p);
        return h0 + 0.5 * m.alpha * h0 * h0;
    }
    return p * p / (2.0 * m.mass()) + potential(m, q);
}

} // namespace dyncert
