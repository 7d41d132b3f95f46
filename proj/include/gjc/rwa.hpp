// rwa.hpp: multiphoton rotating-wave approximation: resonance bookkeeping,
// the n-photon coupling V_N(n) and the dressed-state spectrum.

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gjc/fock_math.hpp"
#include "gjc/model.hpp"

namespace gjc {

/// Below this |λ_e + λ_g|/ω the closed form of V_N(n) is 0·∞ and the direct
/// matrix element is used instead.
inline constexpr double kCouplingSingularThreshold = 1e-6;
/// Fraction of ω inside which a detuning counts as resonant.
inline constexpr double kDefaultResonanceWindow = 0.1;
/// |V_N(n)| at or above this fraction of ω breaks the weak-coupling condition.
inline constexpr double kWeakCouplingLimit = 0.1;

struct ResonanceSpec {
    int n{1};             // photons exchanged per Rabi cycle
    double delta_n{0.0};  // ω_eg − nω

    bool is_near_resonant(double omega, double window = kDefaultResonanceWindow) const {
        return std::abs(delta_n) < window * omega;
    }
};

/// ω_eg = ω₀ + λ_g²/ω − λ_e²/ω.
double omega_eg(const ModelParams& params);

/// ω₀ that puts ω_eg exactly on nω. params.omega0 is ignored.
double resonant_omega0(const ModelParams& params, int n);

/// Copy of params with omega0 = resonant_omega0(params, n).
ModelParams tuned_to_resonance(ModelParams params, int n);

/// n ≥ 1 and δ_n = ω_eg − nω. Throws std::domain_error for n < 1.
ResonanceSpec resonance_spec(const ModelParams& params, int n);

/// V_N(n) = ⟨↓,N^{(λ_g)}| λ_eg σ_x (a†+a) |↑,(N−n)^{(λ_e)}⟩ in closed form,
/// falling back to coupling_element_direct when |λ_e + λ_g|/ω < threshold.
/// Throws std::domain_error when n_manifold < n or n < 1.
double coupling_element(const ModelParams& params, int n_manifold, int n,
                        double threshold = kCouplingSingularThreshold);

/// The same matrix element from explicit displaced Fock vectors.
double coupling_element_direct(const ModelParams& params, int n_manifold, int n);

/// Ω_N(n) = 2|V_N(n)|.
double rabi_frequency(const ModelParams& params, int n_manifold, int n);

struct DressedPair {
    int n_manifold{0};
    int alpha{+1};  // +1 or −1
    double energy{0.0};
    std::complex<double> c_down;  // amplitude on |↓, N^{(λ_g)}⟩
    std::complex<double> c_up;    // amplitude on |↑, (N−n)^{(λ_e)}⟩
};

struct DressedManifold {
    DressedPair plus;
    DressedPair minus;
    double coupling{0.0};  // V_N(n)
    double delta{0.0};     // E_e(N−n) − E_gN
    // V = δ = 0: no preferred mixing, plus/minus are the bare states
    bool degenerate{false};
    bool weak_coupling_violated{false};
};

/// Both dressed states of manifold N. c_down is real and ≥ 0; when it
/// vanishes c_up is real and > 0. spec.delta_n must agree with params.
DressedManifold dressed_pair(const ModelParams& params, const ResonanceSpec& spec, int n_manifold);

struct UnmixedState {
    int n_photons{0};
    double energy{0.0};
    Eigen::VectorXcd state;  // |↓, N^{(λ_g)}⟩ on the product space
};

/// The n states |↓, N^{(λ_g)}⟩, N < n, left uncoupled by the resonance.
std::vector<UnmixedState> low_manifold_states(const ModelParams& params, const ResonanceSpec& spec,
                                              const FockSpace& space);

/// Detuning-window and weak-coupling warnings for manifolds n..max_manifold.
std::vector<std::string> rwa_validity_warnings(const ModelParams& params, const ResonanceSpec& spec,
                                               int max_manifold,
                                               double window = kDefaultResonanceWindow);

/// One exported manifold. c_down / c_up hold [plus, minus].
struct SpectrumRecord {
    int n_manifold{0};
    int n{0};
    double delta_n{0.0};
    double coupling{0.0};
    double rabi{0.0};
    double e_plus{0.0};
    double e_minus{0.0};
    double c_down[2]{};
    double c_up[2]{};
    bool degenerate{false};
};

/// Records for manifolds first..last (inclusive); empty when first > last.
std::vector<SpectrumRecord> spectrum_records(const ModelParams& params, const ResonanceSpec& spec,
                                             int first, int last);

} // namespace gjc
