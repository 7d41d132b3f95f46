#include "gjc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/Sparse>

namespace gjc {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
// |R(iy)| ≤ 1 for the RK4 stability function on the imaginary axis iff |y| ≤ 2√2.
constexpr double kRk4ImaginaryStability = 2.8284271247461903;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using SparseH = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

double tail_population(const Eigen::VectorXd& photons, std::size_t levels) {
    const auto n = static_cast<Eigen::Index>(photons.size());
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(levels), n);
    return photons.tail(k).sum();
}

void record_sample(Trajectory& traj, std::size_t row, double t, const Observables& obs, double energy,
                   std::size_t tail_levels) {
    traj.times.push_back(t);
    traj.inversion.push_back(obs.inversion);
    traj.norm.push_back(obs.norm);
    traj.energy.push_back(energy);
    traj.photon_dist.row(static_cast<Eigen::Index>(row)) = obs.photons.transpose();
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(obs.norm - 1.0));
    traj.max_tail_population = std::max(traj.max_tail_population, tail_population(obs.photons, tail_levels));
}

Observables observables_of(const Eigen::VectorXcd& amps, std::size_t n_max) {
    const auto n = static_cast<Eigen::Index>(n_max);
    Observables o;
    const Eigen::VectorXd down = amps.head(n).cwiseAbs2();
    const Eigen::VectorXd up = amps.tail(n).cwiseAbs2();
    o.photons = down + up;
    o.inversion = up.sum() - down.sum();
    o.norm = o.photons.sum();
    return o;
}

} // namespace

QuantumState::QuantumState(FockSpace space, Eigen::VectorXcd amplitudes, double time)
    : space_(space), amplitudes_(std::move(amplitudes)), time_(time) {
    if (static_cast<std::size_t>(amplitudes_.size()) != space_.dim()) {
        throw std::invalid_argument("QuantumState: amplitude vector length does not match 2 * n_max");
    }
}

DisplacementAmplitude coherent_displacement(double mean_photons) {
    if (!(mean_photons >= 0.0)) {
        throw std::domain_error("coherent state: mean photon number must be >= 0");
    }
    return DisplacementAmplitude(-std::sqrt(mean_photons));
}

QuantumState prepare_initial(const InitialStateSpec& spec, const ModelParams& params, const FockSpace& space) {
    params.validate();
    const auto n_max = static_cast<Eigen::Index>(space.n_max());
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2 * n_max);
    switch (spec.kind) {
    case InitialKind::excited_fock:
        amps(static_cast<Eigen::Index>(space.index(Spin::up, spec.n_photons))) = 1.0;
        break;
    case InitialKind::ground_coherent: {
        const double nbar = spec.mean_photons;
        const auto beta = coherent_displacement(nbar);
        if (nbar + 5.0 * std::sqrt(nbar) > static_cast<double>(space.n_max())) {
            std::ostringstream msg;
            msg << "coherent state with mean " << nbar << " needs n_max >= " << nbar + 5.0 * std::sqrt(nbar)
                << ", have " << space.n_max();
            throw TruncationError(msg.str());
        }
        amps.head(n_max) = displaced_fock(0, beta, space);
        break;
    }
    case InitialKind::custom_vector:
        if (static_cast<std::size_t>(spec.amplitudes.size()) != space.dim()) {
            throw std::invalid_argument("custom initial vector has the wrong length");
        }
        if (std::abs(spec.amplitudes.squaredNorm() - 1.0) > 1e-10) {
            throw std::invalid_argument("custom initial vector is not normalized");
        }
        amps = spec.amplitudes;
        break;
    }
    return QuantumState(space, std::move(amps));
}

Observables observables(const QuantumState& psi) {
    return observables_of(psi.amplitudes(), psi.space().n_max());
}

double Trajectory::t_periods(std::size_t i) const {
    return times.at(i) * omega / (2.0 * std::numbers::pi);
}

NumericResult evolve_numeric(const HamiltonianMatrix& h, const QuantumState& psi0, double t_end, double dt,
                             std::size_t sample_every, const NumericOptions& opts) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("evolve_numeric: dt must be > 0");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("evolve_numeric: t_end must be >= 0");
    }
    if (sample_every == 0) {
        throw std::invalid_argument("evolve_numeric: sample_every must be >= 1");
    }
    if (psi0.space().n_max() != h.space().n_max()) {
        throw std::invalid_argument("evolve_numeric: state and Hamiltonian live on different spaces");
    }

    const std::size_t n_max = h.space().n_max();
    const Eigen::MatrixXcd& hm = h.matrix();
    const Eigen::VectorXcd& v0 = psi0.amplitudes();
    const double e_ref = opts.shift_energy_reference ? (v0.dot(hm * v0)).real() / v0.squaredNorm() : 0.0;

    Eigen::MatrixXcd shifted = hm;
    shifted.diagonal().array() -= e_ref;
    const SparseH hs = shifted.sparseView();

    Trajectory traj;
    traj.omega = h.omega();

    const double radius = h.spectral_radius_bound();
    if (dt > 0.05 / radius) {
        std::ostringstream msg;
        msg << "dt = " << dt << " exceeds the recommended 0.05/rho = " << 0.05 / radius
            << " (rho = " << radius << ")";
        traj.warnings.push_back(msg.str());
    }

    auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    if (steps == 0 && t_end > 0.0) {
        steps = 1;
    }
    const double step = steps > 0 ? t_end / static_cast<double>(steps) : dt;
    const double shifted_radius = shifted.cwiseAbs().rowwise().sum().maxCoeff();
    if (step * shifted_radius > kRk4ImaginaryStability) {
        std::ostringstream msg;
        msg << "RK4 step " << step << " is outside the stability interval (|E|dt <= 2.83 needs dt <= "
            << kRk4ImaginaryStability / shifted_radius << ", " << kRk4ImaginaryStability / shifted_radius * h.omega() / kTwoPi
            << " oscillator periods); reduce dt or n_max";
        throw NumericalError(msg.str());
    }

    const std::size_t samples = steps / sample_every + 1 + (steps % sample_every != 0 ? 1 : 0);
    traj.photon_dist.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(n_max));
    traj.times.reserve(samples);
    traj.inversion.reserve(samples);
    traj.norm.reserve(samples);
    traj.energy.reserve(samples);

    Eigen::VectorXcd psi = v0;
    Eigen::VectorXcd k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), tmp(psi.size());
    const std::complex<double> minus_i_dt = -kI * step;

    auto sample = [&](std::size_t row, double t) {
        const auto obs = observables_of(psi, n_max);
        const double energy = psi.dot(hs * psi).real() + e_ref * obs.norm;
        record_sample(traj, row, t, obs, energy, opts.tail_levels);
        if (std::abs(obs.norm - 1.0) > opts.norm_bound) {
            std::ostringstream msg;
            msg << "norm drift " << std::abs(obs.norm - 1.0) << " exceeds bound " << opts.norm_bound << " at t = " << t
                << "; try dt <= " << step / 2.0 << " (" << step / 2.0 * h.omega() / kTwoPi << " oscillator periods)";
            throw NumericalError(msg.str());
        }
    };

    sample(0, 0.0);
    std::size_t row = 1;
    for (std::size_t s = 1; s <= steps; ++s) {
        k1.noalias() = minus_i_dt * (hs * psi);
        tmp = psi + 0.5 * k1;
        k2.noalias() = minus_i_dt * (hs * tmp);
        tmp = psi + 0.5 * k2;
        k3.noalias() = minus_i_dt * (hs * tmp);
        tmp = psi + k3;
        k4.noalias() = minus_i_dt * (hs * tmp);
        psi += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if (s % sample_every == 0 || s == steps) {
            sample(row++, static_cast<double>(s) * step);
        }
    }

    traj.truncation_ok = traj.max_tail_population < opts.tail_bound;
    if (!traj.truncation_ok) {
        std::ostringstream msg;
        msg << "top " << opts.tail_levels << " photon levels reached population " << traj.max_tail_population
            << " (bound " << opts.tail_bound << "); increase n_max";
        traj.warnings.push_back(msg.str());
    }

    const double t_final = static_cast<double>(steps) * step;
    psi *= std::exp(-kI * e_ref * t_final);
    NumericResult out{std::move(traj), QuantumState(h.space(), std::move(psi), t_final), step, steps};
    return out;
}

Trajectory evolve_rwa(const ModelParams& params, const ResonanceSpec& spec, const QuantumState& psi0,
                      const std::vector<double>& times, const RwaOptions& opts) {
    params.validate();
    const FockSpace& space = psi0.space();
    const auto n_max = static_cast<Eigen::Index>(space.n_max());
    const int n = spec.n;
    if (n < 1 || n >= n_max) {
        throw std::domain_error("evolve_rwa: resonance order outside the truncated space");
    }

    Trajectory traj;
    traj.omega = params.omega;

    const Eigen::MatrixXcd d_down = displacement_matrix(params.ground_displacement(), space);
    const Eigen::MatrixXcd d_up = displacement_matrix(params.excited_displacement(), space);
    const Eigen::VectorXcd a_down = d_down.adjoint() * psi0.amplitudes().head(n_max);
    const Eigen::VectorXcd a_up = d_up.adjoint() * psi0.amplitudes().tail(n_max);

    // Dressed amplitudes. Unmixed N < n first, then (plus, minus) per manifold.
    const Eigen::Index n_pairs = n_max - n;
    std::vector<DressedManifold> manifolds;
    manifolds.reserve(static_cast<std::size_t>(n_pairs));
    Eigen::VectorXcd d_plus(n_pairs), d_minus(n_pairs);
    double captured = a_down.head(n).squaredNorm();
    double energy = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        energy += std::norm(a_down(k)) * displaced_energy(params, Spin::down, static_cast<int>(k));
    }
    for (Eigen::Index j = 0; j < n_pairs; ++j) {
        const int big_n = static_cast<int>(j) + n;
        manifolds.push_back(dressed_pair(params, spec, big_n));
        const auto& m = manifolds.back();
        const auto ad = a_down(big_n);
        const auto au = a_up(j);
        d_plus(j) = std::conj(m.plus.c_down) * ad + std::conj(m.plus.c_up) * au;
        d_minus(j) = std::conj(m.minus.c_down) * ad + std::conj(m.minus.c_up) * au;
        captured += std::norm(d_plus(j)) + std::norm(d_minus(j));
        energy += std::norm(d_plus(j)) * m.plus.energy + std::norm(d_minus(j)) * m.minus.energy;
    }
    const double norm0 = psi0.norm_squared();
    // validity is judged on the manifolds the state actually occupies
    int top_manifold = n;
    for (Eigen::Index j = 0; j < n_pairs; ++j) {
        if (std::norm(d_plus(j)) + std::norm(d_minus(j)) > opts.tail_bound * norm0) {
            top_manifold = static_cast<int>(j) + n;
        }
    }
    traj.warnings = rwa_validity_warnings(params, spec, top_manifold);
    if (captured < norm0 * (1.0 - opts.completeness_tol)) {
        std::ostringstream msg;
        msg << "dressed-basis projection captures " << captured << " of norm " << norm0
            << "; increase n_max or check the resonance order";
        throw NumericalError(msg.str());
    }

    traj.photon_dist.resize(static_cast<Eigen::Index>(times.size()), n_max);
    Eigen::VectorXcd b_down(n_max), b_up(n_max), amps(2 * n_max);
    for (std::size_t row = 0; row < times.size(); ++row) {
        const double t = times[row];
        b_down.setZero();
        b_up.setZero();
        for (Eigen::Index k = 0; k < n; ++k) {
            b_down(k) = a_down(k) * std::exp(-kI * displaced_energy(params, Spin::down, static_cast<int>(k)) * t);
        }
        for (Eigen::Index j = 0; j < n_pairs; ++j) {
            const auto& m = manifolds[static_cast<std::size_t>(j)];
            const auto p = d_plus(j) * std::exp(-kI * m.plus.energy * t);
            const auto q = d_minus(j) * std::exp(-kI * m.minus.energy * t);
            b_down(j + n) = m.plus.c_down * p + m.minus.c_down * q;
            b_up(j) = m.plus.c_up * p + m.minus.c_up * q;
        }
        amps.head(n_max).noalias() = d_down * b_down;
        amps.tail(n_max).noalias() = d_up * b_up;
        const auto obs = observables_of(amps, space.n_max());
        record_sample(traj, row, t, obs, energy, opts.tail_levels);
    }
    traj.truncation_ok = traj.max_tail_population < opts.tail_bound;
    if (!traj.truncation_ok) {
        traj.warnings.push_back("top photon levels populated beyond the truncation bound; increase n_max");
    }
    return traj;
}

double InversionSeries::operator()(double t) const {
    double w = offset;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        w += weights[k] * std::cos(freqs[k] * t);
    }
    return w;
}

std::vector<double> InversionSeries::evaluate(const std::vector<double>& times) const {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back((*this)(t));
    }
    return out;
}

namespace {

// Visits p_N = I_{N,0}²(α) for N = 0, 1, ... until the cumulative weight
// reaches 1 − kSeriesWeightTol (or a hard cap well beyond the Poisson tail).
template <class Visit>
double for_each_weight(double alpha, Visit&& visit) {
    const int cap = static_cast<int>(alpha + 40.0 * std::sqrt(alpha) + 200.0);
    double cumulative = 0.0;
    for (int big_n = 0; big_n <= cap && cumulative < 1.0 - kSeriesWeightTol; ++big_n) {
        const double i = laguerre_transition(big_n, 0, alpha);
        const double p = i * i;
        cumulative += p;
        visit(big_n, p);
    }
    return cumulative;
}

} // namespace

InversionSeries fock_inversion_series(const ModelParams& params, int n) {
    if (n < 1) {
        throw std::domain_error("fock_inversion_series: n must be >= 1");
    }
    const double e = params.lambda_e / params.omega;
    InversionSeries s;
    s.first_manifold = n;
    s.captured_weight = for_each_weight(e * e, [&](int big_n, double p) {
        s.weights.push_back(p);
        s.freqs.push_back(rabi_frequency(params, big_n + n, n));
    });
    return s;
}

double coherent_overlap_argument(const ModelParams& params, double mean_photons) {
    if (!(mean_photons >= 0.0)) {
        throw std::domain_error("mean photon number must be >= 0");
    }
    const double r = std::sqrt(mean_photons) + params.lambda_g / params.omega;
    return r * r;
}

InversionSeries coherent_inversion_series(const ModelParams& params, int n, double mean_photons) {
    if (n < 1) {
        throw std::domain_error("coherent_inversion_series: n must be >= 1");
    }
    const double rho = coherent_overlap_argument(params, mean_photons);
    InversionSeries s;
    s.first_manifold = n;
    // −1 + 2Σ p sin²(Ωt/2) = −1 + Σ p − Σ p cos(Ωt)
    s.offset = -1.0;
    s.captured_weight = for_each_weight(rho, [&](int big_n, double p) {
        if (big_n < n) {
            return;
        }
        s.offset += p;
        s.weights.push_back(-p);
        s.freqs.push_back(rabi_frequency(params, big_n, n));
    });
    return s;
}

double inversion_fock(const ModelParams& params, int n, double t) {
    return fock_inversion_series(params, n)(t);
}

double inversion_coherent(const ModelParams& params, int n, double mean_photons, double t) {
    return coherent_inversion_series(params, n, mean_photons)(t);
}

std::vector<double> time_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) {
        throw std::invalid_argument("time_grid: need dt > 0 and t_end >= 0");
    }
    const auto count = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = static_cast<double>(k) * dt;
    }
    return out;
}

} // namespace gjc
