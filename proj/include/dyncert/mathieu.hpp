#pragma once

#include <vector>

namespace dyncert {

enum class MathieuKind { Even, Odd };  // ce_r, se_r

// One 2pi-periodic Mathieu solution y'' + (a - 2q cos 2u) y = 0 as a Fourier series.
// Even: ce_r(u) = sum_k coeffs[k] cos((2k + p) u); Odd: se_r(u) = sum_k coeffs[k] sin((2k + p) u),
// with p = r mod 2 (odd kind with even r starts at sin 2u). Normalized so int_0^{2pi} y^2 = pi.
struct MathieuSolution {
    MathieuKind kind;
    int order;
    double q;
    double characteristic;
    std::vector<double> coeffs;

    double value(double u) const;
    double derivative(double u) const;
    // Frequency multiplying the k-th coefficient.
    int harmonic(std::size_t k) const;
};

struct MathieuOptions {
    double tail_tol = 1e-14;
    int max_terms = 20000;
};

MathieuSolution mathieu_function(MathieuKind kind, int order, double q, const MathieuOptions& opt = {});

// pi-periodic (in u) solutions in increasing characteristic order: level n is ce_n for even n
// and se_{n+1} for odd n.
std::vector<MathieuSolution> mathieu_eigensystem(double q, int n_max, const MathieuOptions& opt = {});

} // namespace dyncert
