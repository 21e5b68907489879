#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dyncert {

struct RealGrid {
    std::vector<double> points;
    std::vector<double> values;

    RealGrid() = default;
    RealGrid(std::vector<double> pts, std::vector<double> vals);
    static RealGrid uniform(double a, double b, std::size_t n);
    std::size_t size() const { return points.size(); }
    double trapezoid() const;
};

// K(m) = int_0^{pi/2} (1 - m sin^2 u)^{-1/2} du, m < 1.
double elliptic_K(double m);
// Inverse of K on [0, 1).
double elliptic_K_inverse(double k);

double regularized_gamma_Q(double a, double x);
double regularized_gamma_P(double a, double x);

// Generalized Laguerre L_n^{(a)}(z) by three-term recurrence.
double laguerre(int n, double a, double z);

using RealFn = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    int max_panels = 4000;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b].
double integrate(const RealFn& f, double a, double b, const QuadOptions& opt = {});
// Integrand with 1/sqrt endpoint singularities; x = a + (b - a) sin^2(theta).
double quad_inverse_sqrt(const RealFn& f, double a, double b, const QuadOptions& opt = {});

class HermitianMatrix {
public:
    explicit HermitianMatrix(Eigen::MatrixXcd m, double tol = 1e-12);
    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    std::complex<double> operator()(int i, int j) const { return m_(i, j); }

private:
    Eigen::MatrixXcd m_;
};

struct EigenpairOptions {
    int dense_limit = 2048;
    double residual_tol = 1e-10;
    int max_krylov = 400;
};

struct RealEigenpair {
    double value;
    Eigen::VectorXd vector;
    double residual;
};

struct ComplexEigenpair {
    double value;
    Eigen::VectorXcd vector;
    double residual;
};

ComplexEigenpair hermitian_max_eigenpair(const HermitianMatrix& m, const EigenpairOptions& opt = {});
RealEigenpair symmetric_max_eigenpair(const Eigen::MatrixXd& m, const EigenpairOptions& opt = {});

// Deterministic counter-based generator: value depends only on (seed, stream, index).
std::uint64_t splitmix64(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Runs body(begin, end) over [0, n) in contiguous chunks on `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& body);
int default_workers();

// Maximizes f on [a, b] by golden-section search from several uniform starts.
struct Maximum {
    double x;
    double value;
};
Maximum golden_maximize(const RealFn& f, double a, double b, int starts = 8, double xtol = 1e-6);

} // namespace dyncert
