// model.hpp: Hamiltonian of a two-level system with permanent dipoles coupled to
// one oscillator mode, assembled on the truncated {↓,↑} ⊗ Fock basis (ħ = 1).
//
//   H = ω(a†a + ½) + (ω₀/2)σ_z + (−λ_g σ_↓ + λ_e σ_↑ + λ_eg σ_x)(a† + a)
//
// Matrices are dense. H is banded: it only couples photon numbers that
// differ by at most one.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gjc/fock_math.hpp"

namespace gjc {

struct ModelParams {
    double omega{1.0};      // oscillator frequency, the unit of all energies
    double omega0{0.0};     // bare transition frequency
    double lambda_g{0.0};   // ground-state diagonal coupling
    double lambda_e{0.0};   // excited-state diagonal coupling
    double lambda_eg{0.0};  // transition coupling
    // Accept λ_g or λ_e < 0. They enter H literally with the signs above.
    bool allow_signed_couplings{false};

    /// Every violated constraint, empty when valid.
    std::vector<std::string> violations() const;
    /// Throws std::invalid_argument listing all violations.
    void validate() const;

    DisplacementAmplitude ground_displacement() const;   // +λ_g/ω
    DisplacementAmplitude excited_displacement() const;  // −λ_e/ω
};

class HamiltonianMatrix {
public:
    HamiltonianMatrix(FockSpace space, Eigen::MatrixXcd matrix, double omega = 1.0);

    const FockSpace& space() const noexcept { return space_; }
    /// Oscillator frequency of the model; sets the period T = 2π/ω.
    double omega() const noexcept { return omega_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    /// Gershgorin bound on the spectral radius.
    double spectral_radius_bound() const;

private:
    FockSpace space_;
    Eigen::MatrixXcd matrix_;
    double omega_;
};

/// Full 2·n_max × 2·n_max Hamiltonian.
HamiltonianMatrix build_full(const ModelParams& params, const FockSpace& space);

/// n_max × n_max displaced-oscillator block
///   H_↑ = ω(a†a + ½) + ω₀/2 + λ_e(a† + a)
///   H_↓ = ω(a†a + ½) − ω₀/2 − λ_g(a† + a)
Eigen::MatrixXcd build_displaced_branch(const ModelParams& params, Spin branch, const FockSpace& space);

/// Interaction λ_eg σ_x (a† + a) on the product space.
HamiltonianMatrix build_coupling(const ModelParams& params, const FockSpace& space);

/// Embed an n_max × n_max block as block ⊗ |s⟩⟨s| in the product layout.
Eigen::MatrixXcd embed_branch(const Eigen::MatrixXcd& block, Spin s, const FockSpace& space);

/// Closed-form eigenenergy of a displaced branch:
///   E_eN = ω₀/2 + ω(N + ½) − λ_e²/ω,   E_gN = −ω₀/2 + ω(N + ½) − λ_g²/ω.
double displaced_energy(const ModelParams& params, Spin branch, int n);

/// Matrix of a† + a on the truncated Fock space.
Eigen::MatrixXcd position_quadrature(const FockSpace& space);

} // namespace gjc
