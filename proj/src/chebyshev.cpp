#include "betafluct/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace betafluct {

std::vector<double> cheb_lobatto_from_samples(const std::vector<double>& f) {
    const int M = static_cast<int>(f.size()) - 1;
    std::vector<double> c(M + 1, 0.0);
    if (M == 0) {
        c[0] = f[0];
        return c;
    }
    // cos(pi j k / M) taken from a table indexed by (j k) mod 2M
    std::vector<double> table(2 * M);
    for (int i = 0; i < 2 * M; ++i) table[i] = std::cos(std::numbers::pi * i / M);
    for (int k = 0; k <= M; ++k) {
        double s = 0.5 * (f[0] + f[M] * table[(static_cast<long>(M) * k) % (2 * M)]);
        for (int j = 1; j < M; ++j) s += f[j] * table[(static_cast<long>(j) * k) % (2 * M)];
        c[k] = s * 2.0 / M;
    }
    c[0] *= 0.5;
    c[M] *= 0.5;
    return c;
}

std::vector<double> cheb_lobatto_coeffs(const std::function<double(double)>& f, int M) {
    std::vector<double> s(M + 1);
    for (int j = 0; j <= M; ++j) s[j] = f(std::cos(std::numbers::pi * j / M));
    return cheb_lobatto_from_samples(s);
}

double log_mode_potential(int k, double c, double d, double lambda) {
    const double z = (lambda - c) / d;
    if (std::abs(z) <= 1.0) {
        if (k == 0) return std::log(0.5 * d);
        return -std::cos(k * std::acos(z)) / k;
    }
    // zeta = z - sgn(z) sqrt(z^2-1), |zeta| < 1; written to avoid cancellation
    const double zeta = 1.0 / (z + std::copysign(std::sqrt(z * z - 1.0), z));
    if (k == 0) return std::log(0.5 * d) - std::log(std::abs(zeta));
    return -std::pow(zeta, k) / k;
}

}  // namespace betafluct
