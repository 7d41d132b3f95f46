// dynamics.hpp: time evolution of the coupled system by two routes:
//   * classic RK4 integration of i dψ/dt = Hψ with the full Hamiltonian,
//   * analytic evolution over the multiphoton dressed basis,
// plus the closed-form inversion series for Fock and coherent initial fields.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gjc/fock_math.hpp"
#include "gjc/model.hpp"
#include "gjc/rwa.hpp"

namespace gjc {

/// A propagation result that cannot be trusted (norm drift, unstable step,
/// incomplete dressed projection).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The truncated boson basis cannot hold the requested state.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuantumState {
public:
    QuantumState(FockSpace space, Eigen::VectorXcd amplitudes, double time = 0.0);

    const FockSpace& space() const noexcept { return space_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    double time() const noexcept { return time_; }

    double norm_squared() const { return amplitudes_.squaredNorm(); }
    std::complex<double> amplitude(Spin s, std::size_t n) const { return amplitudes_(space_.index(s, n)); }

private:
    FockSpace space_;
    Eigen::VectorXcd amplitudes_;
    double time_;
};

enum class InitialKind { excited_fock, ground_coherent, custom_vector };

struct InitialStateSpec {
    InitialKind kind{InitialKind::excited_fock};
    std::size_t n_photons{0};     // excited_fock
    double mean_photons{0.0};     // ground_coherent
    Eigen::VectorXcd amplitudes;  // custom_vector, product-basis layout
};

/// Builds ψ₀.
///   excited_fock:    |↑⟩ ⊗ |n⟩
///   ground_coherent: |↓⟩ ⊗ D(−√N̄)|0⟩, a coherent state with mean N̄
///   custom_vector:   the given amplitudes, which must be normalized
/// Throws TruncationError when N̄ + 5√N̄ > n_max, std::out_of_range when
/// n ≥ n_max and std::invalid_argument for a bad custom vector.
QuantumState prepare_initial(const InitialStateSpec& spec, const ModelParams& params, const FockSpace& space);

/// Coherent displacement used for a ground_coherent state of mean N̄.
DisplacementAmplitude coherent_displacement(double mean_photons);

struct Observables {
    double inversion{0.0};     // W = Σ_N |ψ_↑N|² − |ψ_↓N|²
    Eigen::VectorXd photons;   // P_N = |ψ_↑N|² + |ψ_↓N|²
    double norm{0.0};
};

Observables observables(const QuantumState& psi);

struct Trajectory {
    double omega{1.0};              // converts times to periods T = 2π/ω
    std::vector<double> times;      // model time units (1/ω when ω = 1)
    std::vector<double> inversion;
    Eigen::MatrixXd photon_dist;    // samples × n_max
    std::vector<double> norm;
    std::vector<double> energy;     // ⟨H⟩

    double max_norm_drift{0.0};
    double max_tail_population{0.0};  // population of the top photon levels
    bool truncation_ok{true};
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return times.size(); }
    double t_periods(std::size_t i) const;
};

struct NumericOptions {
    double norm_bound{1e-6};          // abort when |‖ψ‖² − 1| exceeds this
    std::size_t tail_levels{5};
    double tail_bound{1e-8};          // truncation monitor threshold
    // Integrate H − ⟨ψ₀|H|ψ₀⟩ and restore the phase afterwards.
    bool shift_energy_reference{true};
};

struct NumericResult {
    Trajectory trajectory;
    QuantumState final_state;
    double dt_effective{0.0};
    std::size_t steps{0};
};

/// Classic fourth-order Runge-Kutta on i dψ/dt = Hψ. The step count is
/// round(t_end/dt) and the step is adjusted to land on t_end. Observables are
/// sampled at step 0, every `sample_every` steps and at t_end. No renormalization is
/// applied; a norm drift beyond opts.norm_bound throws NumericalError with a
/// step-size hint, as does a step outside the RK4 stability interval.
NumericResult evolve_numeric(const HamiltonianMatrix& h, const QuantumState& psi0, double t_end,
                             double dt, std::size_t sample_every, const NumericOptions& opts = {});

struct RwaOptions {
    double completeness_tol{1e-6};
    std::size_t tail_levels{5};
    double tail_bound{1e-8};
};

/// Evolves ψ₀ over {|↓,N^{(λ_g)}⟩, N < n} ∪ {|±,N⟩, N ≥ n} and samples the
/// same observables as evolve_numeric on the given times. Energy is the
/// dressed-basis expectation, constant in time. Throws NumericalError when
/// the projection captures less than 1 − completeness_tol of the norm.
Trajectory evolve_rwa(const ModelParams& params, const ResonanceSpec& spec, const QuantumState& psi0,
                      const std::vector<double>& times, const RwaOptions& opts = {});

/// W(t) = offset + Σ_k weight_k · cos(freq_k t), the form shared by the Fock
/// and coherent closed forms.
struct InversionSeries {
    double offset{0.0};
    std::vector<double> weights;
    std::vector<double> freqs;
    int first_manifold{0};      // manifold of the first term
    double captured_weight{0.0};  // Σ of the initial weights retained

    double operator()(double t) const;
    std::vector<double> evaluate(const std::vector<double>& times) const;
};

/// Cumulative-weight cutoff for the inversion series.
inline constexpr double kSeriesWeightTol = 1e-10;

/// Series for ψ₀ = |↑,0⟩ at exact resonance:
///   W(t) = Σ_N I_{N,0}²(λ_e²/ω²) cos(Ω_{N+n}(n) t).
InversionSeries fock_inversion_series(const ModelParams& params, int n);

/// Series for ψ₀ = |↓⟩ ⊗ D(−√N̄)|0⟩ at exact resonance:
///   W(t) = −1 + 2 Σ_{N≥n} I_{N,0}²(ρ) sin²(Ω_N(n) t/2),  ρ = (√N̄ + λ_g/ω)².
InversionSeries coherent_inversion_series(const ModelParams& params, int n, double mean_photons);

/// Argument ρ of the coherent-state weights.
double coherent_overlap_argument(const ModelParams& params, double mean_photons);

double inversion_fock(const ModelParams& params, int n, double t);
double inversion_coherent(const ModelParams& params, int n, double mean_photons, double t);

/// Uniform grid 0, dt, ..., t_end (t_end included when it lands on the grid).
std::vector<double> time_grid(double t_end, double dt);

} // namespace gjc
