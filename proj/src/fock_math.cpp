#include "gjc/fock_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gjc {

namespace {

constexpr double kRescaleThreshold = 1e200;

struct Scaled {
    double mantissa;
    double log_scale;
};

// L_n^l(x) = mantissa · e^{log_scale}; rescaled on the fly so the
// recurrence survives large n + l.
Scaled laguerre_scaled(int n, int l, double x) {
    if (n == 0) {
        return {1.0, 0.0};
    }
    double prev = 1.0;
    double cur = 1.0 + l - x;
    double log_scale = 0.0;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + l - x) * cur - (k + l) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescaleThreshold) {
            cur /= kRescaleThreshold;
            prev /= kRescaleThreshold;
            log_scale += std::log(kRescaleThreshold);
        }
    }
    return {cur, log_scale};
}

double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

} // namespace

FockSpace::FockSpace(std::size_t n_max) : n_max_(n_max) {
    if (n_max < 2) {
        throw std::invalid_argument("FockSpace: n_max must be >= 2, got " + std::to_string(n_max));
    }
}

std::size_t FockSpace::index(Spin s, std::size_t n) const {
    if (n >= n_max_) {
        throw std::out_of_range("FockSpace::index: photon number " + std::to_string(n) +
                                " outside truncation n_max = " + std::to_string(n_max_));
    }
    return (s == Spin::up ? n_max_ : 0) + n;
}

DisplacementAmplitude::DisplacementAmplitude(double beta) : beta_(beta) {
    if (!std::isfinite(beta)) {
        throw std::domain_error("DisplacementAmplitude: beta must be finite");
    }
}

double laguerre_poly(int n, int l, double x) {
    if (n < 0) {
        throw std::domain_error("laguerre_poly: negative degree n = " + std::to_string(n));
    }
    if (l < -n) {
        throw std::domain_error("laguerre_poly: order l = " + std::to_string(l) + " below -n");
    }
    if (!std::isfinite(x)) {
        throw std::domain_error("laguerre_poly: non-finite argument");
    }
    if (l < 0) {
        // L_n^{−k}(x) = (−x)^k (n−k)!/n! L_{n−k}^{k}(x); the recurrence cancels badly for l < 0
        const int k = -l;
        double factor = 1.0;
        for (int i = n - k + 1; i <= n; ++i) {
            factor *= -x / i;
        }
        const auto s = laguerre_scaled(n - k, k, x);
        return factor * s.mantissa * std::exp(s.log_scale);
    }
    const auto s = laguerre_scaled(n, l, x);
    return s.mantissa * std::exp(s.log_scale);
}

double laguerre_transition(int s, int s_prime, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::domain_error("laguerre_transition: alpha must be finite and >= 0");
    }
    if (s < 0 || s_prime < 0) {
        throw std::domain_error("laguerre_transition: negative index");
    }
    if (s < s_prime) {
        return parity(s_prime - s) * laguerre_transition(s_prime, s, alpha);
    }
    const int k = s - s_prime;
    if (alpha == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    const auto lag = laguerre_scaled(s_prime, k, alpha);
    if (lag.mantissa == 0.0) {
        return 0.0;
    }
    const double log_mag = 0.5 * (std::lgamma(s_prime + 1.0) - std::lgamma(s + 1.0)) -
                           0.5 * alpha + 0.5 * k * std::log(alpha) + lag.log_scale +
                           std::log(std::abs(lag.mantissa));
    return std::copysign(std::exp(log_mag), lag.mantissa);
}

double displacement_element(int m, int n, DisplacementAmplitude beta) {
    const double b = beta.value();
    const double v = laguerre_transition(m, n, b * b);
    return (b < 0.0) ? parity(m - n) * v : v;
}

Eigen::MatrixXcd displacement_matrix(DisplacementAmplitude beta, const FockSpace& space) {
    const auto n_max = static_cast<int>(space.n_max());
    Eigen::MatrixXcd d(n_max, n_max);
    for (int n = 0; n < n_max; ++n) {
        for (int m = 0; m < n_max; ++m) {
            d(m, n) = displacement_element(m, n, beta);
        }
    }
    return d;
}

Eigen::VectorXcd displaced_fock(std::size_t n, DisplacementAmplitude beta, const FockSpace& space) {
    if (n >= space.n_max()) {
        throw std::out_of_range("displaced_fock: n = " + std::to_string(n) +
                                " outside truncation n_max = " + std::to_string(space.n_max()));
    }
    const auto n_max = static_cast<int>(space.n_max());
    Eigen::VectorXcd v(n_max);
    for (int m = 0; m < n_max; ++m) {
        v(m) = displacement_element(m, static_cast<int>(n), beta);
    }
    return v;
}

double truncation_loss(std::size_t n, DisplacementAmplitude beta, const FockSpace& space) {
    return 1.0 - displaced_fock(n, beta, space).squaredNorm();
}

bool is_resolved(std::size_t n, DisplacementAmplitude beta, const FockSpace& space, double tol) {
    return std::abs(truncation_loss(n, beta, space)) <= tol;
}

std::size_t recommended_n_max(std::size_t n, double beta_abs) {
    return n + static_cast<std::size_t>(std::ceil(10.0 * beta_abs * beta_abs)) + 50;
}

} // namespace gjc
