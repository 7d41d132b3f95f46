// fock_math.hpp: Laguerre kernels, displacement operators and displaced Fock states

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace gjc {

using complex = std::complex<double>;

/// Default tolerance on 1 − ‖v‖² for a displaced state to count as resolved
/// by the truncated boson basis.
inline constexpr double kDefaultTruncationTol = 1e-10;

enum class Spin { down, up };

/// Truncated boson space {|0⟩, ..., |n_max − 1⟩} and the layout of the
/// {↓,↑} ⊗ Fock product basis.
///
/// The product basis is spin-major: index(↓, N) = N and
/// index(↑, N) = n_max + N. Every matrix and state vector in the library
/// uses this layout.
class FockSpace {
public:
    explicit FockSpace(std::size_t n_max);

    std::size_t n_max() const noexcept { return n_max_; }
    std::size_t dim() const noexcept { return 2 * n_max_; }

    std::size_t index(Spin s, std::size_t n) const;

private:
    std::size_t n_max_;
};

/// Real displacement amplitude β of D(β) = exp(β(a† − a)). The sign is the
/// direction of the shift.
class DisplacementAmplitude {
public:
    constexpr DisplacementAmplitude() = default;
    explicit DisplacementAmplitude(double beta);

    constexpr double value() const noexcept { return beta_; }
    constexpr DisplacementAmplitude operator-() const noexcept {
        DisplacementAmplitude d;
        d.beta_ = -beta_;
        return d;
    }

private:
    double beta_{0.0};
};

/// Generalized Laguerre polynomial L_n^l(x), integer l ≥ −n, by the
/// three-term recurrence in n. Throws std::domain_error for n < 0,
/// l < −n or non-finite x.
double laguerre_poly(int n, int l, double x);

/// Laguerre transition function
///   I_{s,s'}(α) = √(s'!/s!) e^{−α/2} α^{(s−s')/2} L_{s'}^{s−s'}(α).
/// For s < s' the value is (−1)^{s−s'} I_{s',s}(α), so the Laguerre
/// superscript is never negative. Throws std::domain_error for α < 0.
double laguerre_transition(int s, int s_prime, double alpha);

/// ⟨m|D(β)|n⟩ for real β; equals sgn(β)^{m−n} I_{m,n}(β²).
double displacement_element(int m, int n, DisplacementAmplitude beta);

/// n_max × n_max matrix of D(β) in the Fock basis (rows/columns truncated,
/// elements exact).
Eigen::MatrixXcd displacement_matrix(DisplacementAmplitude beta, const FockSpace& space);

/// D(β)|n⟩ expanded over the truncated Fock basis, i.e. column n of
/// displacement_matrix. With β = +λ_g/ω this is |n^{(λ_g)}⟩ with components
/// I_{M,n}; with β = −λ_e/ω it is |n^{(λ_e)}⟩ with components I_{n,M}.
/// Throws std::out_of_range when n ≥ n_max.
Eigen::VectorXcd displaced_fock(std::size_t n, DisplacementAmplitude beta, const FockSpace& space);

/// 1 − ‖P D(β)|n⟩‖², the weight of D(β)|n⟩ outside the truncated space.
double truncation_loss(std::size_t n, DisplacementAmplitude beta, const FockSpace& space);

/// True when truncation_loss(n, β) ≤ tol.
bool is_resolved(std::size_t n, DisplacementAmplitude beta, const FockSpace& space,
                 double tol = kDefaultTruncationTol);

/// Smallest n_max that keeps displaced states up to `n` with |β| ≤ beta_abs
/// resolved: n + 10β² + 50.
std::size_t recommended_n_max(std::size_t n, double beta_abs);

} // namespace gjc
