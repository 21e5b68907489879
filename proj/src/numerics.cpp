#include "dyncert/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <thread>

#include <Eigen/Eigenvalues>

#include "dyncert/errors.hpp"

namespace dyncert {

using std::numbers::pi;

RealGrid::RealGrid(std::vector<double> pts, std::vector<double> vals)
    : points(std::move(pts)), values(std::move(vals)) {
    if (points.size() != values.size())
        throw DomainError("grid points and values differ in length");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i] > points[i - 1]))
            throw DomainError("grid points must be strictly increasing");
}

RealGrid RealGrid::uniform(double a, double b, std::size_t n) {
    if (n < 2 || !(b > a))
        throw DomainError("uniform grid needs n >= 2 and a < b");
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return RealGrid(std::move(pts), std::vector<double>(n, 0.0));
}

double RealGrid::trapezoid() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        s += 0.5 * (values[i] + values[i - 1]) * (points[i] - points[i - 1]);
    return s;
}

double elliptic_K(double m) {
    if (!(m < 1.0))
        throw DomainError("elliptic_K requires m < 1");
    double a = 1.0, b = std::sqrt(1.0 - m);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (a + b);
}

double elliptic_K_inverse(double k) {
    if (!(k >= pi / 2))
        throw DomainError("elliptic_K_inverse requires k >= pi/2");
    if (k == pi / 2)
        return 0.0;
    // bisection in y = -log(1 - m), on which K grows roughly linearly
    double lo = 0.0, hi = 2.0 * k + 4.0;
    while (elliptic_K(-std::expm1(-hi)) < k) {
        hi *= 2.0;
        if (hi > 700.0)
            throw DomainError("elliptic_K_inverse: argument too large");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        if (elliptic_K(-std::expm1(-mid)) < k)
            lo = mid;
        else
            hi = mid;
    }
    return -std::expm1(-0.5 * (lo + hi));
}

namespace {

double gamma_series_P(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf_Q(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_Q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("regularized_gamma_Q requires a > 0 and x >= 0");
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return std::clamp(1.0 - gamma_series_P(a, x), 0.0, 1.0);
    return std::clamp(gamma_cf_Q(a, x), 0.0, 1.0);
}

double regularized_gamma_P(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("regularized_gamma_P requires a > 0 and x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return std::clamp(gamma_series_P(a, x), 0.0, 1.0);
    return std::clamp(1.0 - gamma_cf_Q(a, x), 0.0, 1.0);
}

double laguerre(int n, double a, double z) {
    if (n < 0)
        throw DomainError("laguerre requires n >= 0");
    double l0 = 1.0;
    if (n == 0)
        return l0;
    double l1 = 1.0 + a - z;
    for (int k = 1; k < n; ++k) {
        double l2 = ((2.0 * k + 1.0 + a - z) * l1 - (k + a) * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

namespace {

constexpr double kron_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kron_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const RealFn& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = fc * kron_w[7], g = fc * gauss_w[3];
    for (int i = 0; i < 7; ++i) {
        double dx = h * kron_x[i];
        double fs = f(c - dx) + f(c + dx);
        k += kron_w[i] * fs;
        if (i % 2 == 1)
            g += gauss_w[i / 2] * fs;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

} // namespace

double integrate(const RealFn& f, double a, double b, const QuadOptions& opt) {
    if (a == b)
        return 0.0;
    if (a > b)
        return -integrate(f, b, a, opt);
    std::priority_queue<Panel> heap;
    Panel first = gk15(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    int panels = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (panels >= opt.max_panels)
            throw ConvergenceError("adaptive quadrature exhausted its panel budget", err);
        Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++panels;
        if (!std::isfinite(total))
            throw ConvergenceError("integrand is not finite on the interval");
    }
    // recompute sums to shed accumulated rounding from incremental updates
    double s = 0.0;
    while (!heap.empty()) {
        s += heap.top().value;
        heap.pop();
    }
    return s;
}

double quad_inverse_sqrt(const RealFn& f, double a, double b, const QuadOptions& opt) {
    if (!(a < b))
        throw DomainError("quad_inverse_sqrt requires a < b");
    double w = b - a;
    auto g = [&](double th) {
        double s = std::sin(th), c = std::cos(th);
        return f(a + w * s * s) * w * 2.0 * s * c;
    };
    return integrate(g, 0.0, pi / 2, opt);
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw DomainError("Hermitian matrix must be square and nonempty");
    for (int i = 0; i < m_.rows(); ++i) {
        if (std::abs(m_(i, i).imag()) > tol)
            throw DomainError("Hermitian matrix diagonal must be real");
        for (int j = 0; j < i; ++j)
            if (std::abs(m_(i, j) - std::conj(m_(j, i))) > tol)
                throw DomainError("matrix is not Hermitian");
    }
}

namespace {

// Lanczos with full reorthogonalization for the largest eigenpair of a symmetric operator.
template <class Vec, class MatVec>
void lanczos_top(const MatVec& apply, Vec start, int n, const EigenpairOptions& opt,
                 double& value, Vec& vector, double& residual) {
    int kmax = std::min(n, opt.max_krylov);
    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    Vec v = start / start.norm();
    double scale = 0.0;
    for (int k = 0; k < kmax; ++k) {
        basis.push_back(v);
        Vec w = apply(v);
        double a = std::real(v.dot(w));
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& u : basis)
                w -= u * u.dot(w);
        double b = w.norm();
        int m = static_cast<int>(alpha.size());
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        scale = std::max(tri.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        double ritz_res = std::abs(b * tri.eigenvectors()(m - 1, m - 1));
        bool done = ritz_res <= 0.1 * opt.residual_tol * scale || b < 1e-14 * scale || m == kmax;
        if (done) {
            Vec x = Vec::Zero(n);
            for (int i = 0; i < m; ++i)
                x += basis[i] * tri.eigenvectors()(i, m - 1);
            x /= x.norm();
            value = tri.eigenvalues()(m - 1);
            vector = x;
            residual = (apply(x) - x * value).norm();
            if (residual > opt.residual_tol * scale)
                throw ConvergenceError("Lanczos did not reach the residual target", residual);
            return;
        }
        beta.push_back(b);
        v = w / b;
    }
}

} // namespace

RealEigenpair symmetric_max_eigenpair(const Eigen::MatrixXd& m, const EigenpairOptions& opt) {
    int n = static_cast<int>(m.rows());
    if (n == 0 || m.cols() != n)
        throw DomainError("symmetric eigenpair needs a square nonempty matrix");
    if (n <= opt.dense_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("dense symmetric eigensolver failed");
        Eigen::VectorXd v = es.eigenvectors().col(n - 1);
        double lam = es.eigenvalues()(n - 1);
        return {lam, v, (m * v - lam * v).norm()};
    }
    Eigen::VectorXd start(n);
    for (int i = 0; i < n; ++i)
        start(i) = 1.0 + 0.5 * std::sin(0.7 * i + 0.3);
    RealEigenpair out{0.0, {}, 0.0};
    lanczos_top([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); }, start, n, opt,
                out.value, out.vector, out.residual);
    return out;
}

ComplexEigenpair hermitian_max_eigenpair(const HermitianMatrix& h, const EigenpairOptions& opt) {
    const Eigen::MatrixXcd& m = h.matrix();
    int n = h.dim();
    if (n <= opt.dense_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("dense Hermitian eigensolver failed");
        Eigen::VectorXcd v = es.eigenvectors().col(n - 1);
        double lam = es.eigenvalues()(n - 1);
        double res = (m * v - lam * v).norm();
        return {lam, v, res};
    }
    Eigen::VectorXcd start(n);
    for (int i = 0; i < n; ++i)
        start(i) = {1.0 + 0.5 * std::sin(0.7 * i + 0.3), 0.25 * std::cos(1.3 * i)};
    ComplexEigenpair out{0.0, {}, 0.0};
    lanczos_top([&](const Eigen::VectorXcd& x) { return Eigen::VectorXcd(m * x); }, start, n, opt,
                out.value, out.vector, out.residual);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& body) {
    if (workers <= 1 || n < 2) {
        body(0, n);
        return;
    }
    std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(w);
    for (std::size_t t = 0; t < w; ++t) {
        std::size_t lo = n * t / w, hi = n * (t + 1) / w;
        threads.emplace_back([&, t, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

Maximum golden_maximize(const RealFn& f, double a, double b, int starts, double xtol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    Maximum best{a, f(a)};
    double fb = f(b);
    if (fb > best.value)
        best = {b, fb};
    for (int s = 0; s < starts; ++s) {
        double lo = a + (b - a) * s / starts, hi = a + (b - a) * (s + 1) / starts;
        double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        while (hi - lo > xtol) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1);
            }
        }
        if (f1 > best.value)
            best = {x1, f1};
        if (f2 > best.value)
            best = {x2, f2};
    }
    return best;
}

} // namespace dyncert
