#include "gjc/rwa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gjc {

namespace {

void check_indices(int n_manifold, int n) {
    if (n < 1) {
        throw std::domain_error("resonance order n must be >= 1");
    }
    if (n_manifold < n) {
        throw std::domain_error("manifold N = " + std::to_string(n_manifold) +
                                " is below the resonance order n = " + std::to_string(n));
    }
}

} // namespace

double omega_eg(const ModelParams& p) {
    return p.omega0 + (p.lambda_g * p.lambda_g - p.lambda_e * p.lambda_e) / p.omega;
}

double resonant_omega0(const ModelParams& p, int n) {
    if (n < 1) {
        throw std::domain_error("resonant_omega0: n must be >= 1");
    }
    return n * p.omega - (p.lambda_g * p.lambda_g - p.lambda_e * p.lambda_e) / p.omega;
}

ModelParams tuned_to_resonance(ModelParams params, int n) {
    params.omega0 = resonant_omega0(params, n);
    return params;
}

ResonanceSpec resonance_spec(const ModelParams& params, int n) {
    if (n < 1) {
        throw std::domain_error("resonance_spec: n must be >= 1");
    }
    return ResonanceSpec{n, omega_eg(params) - n * params.omega};
}

double coupling_element_direct(const ModelParams& p, int n_manifold, int n) {
    check_indices(n_manifold, n);
    const double beta = std::max(std::abs(p.lambda_g), std::abs(p.lambda_e)) / p.omega;
    const FockSpace space(recommended_n_max(static_cast<std::size_t>(n_manifold), beta) + 1);

    const Eigen::VectorXcd down = displaced_fock(static_cast<std::size_t>(n_manifold),
                                                 p.ground_displacement(), space);
    const Eigen::VectorXcd up = displaced_fock(static_cast<std::size_t>(n_manifold - n),
                                               p.excited_displacement(), space);
    const Eigen::VectorXcd x_up = position_quadrature(space) * up;
    return p.lambda_eg * down.dot(x_up).real();
}

double coupling_element(const ModelParams& p, int n_manifold, int n, double threshold) {
    check_indices(n_manifold, n);
    const double b = (p.lambda_g + p.lambda_e) / p.omega;
    if (std::abs(b) < threshold) {
        return coupling_element_direct(p, n_manifold, n);
    }
    // ⟨N|D(−b)|N−n⟩ = sgn(b)^n I_{N−n,N}(b²)
    const double overlap = laguerre_transition(n_manifold - n, n_manifold, b * b);
    const double sign = (b < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    const double bracket = (p.lambda_g - p.lambda_e) / p.omega - n / b;
    return p.lambda_eg * bracket * sign * overlap;
}

double rabi_frequency(const ModelParams& params, int n_manifold, int n) {
    return 2.0 * std::abs(coupling_element(params, n_manifold, n));
}

DressedManifold dressed_pair(const ModelParams& params, const ResonanceSpec& spec, int n_manifold) {
    check_indices(n_manifold, spec.n);
    const double e_down = displaced_energy(params, Spin::down, n_manifold);
    const double e_up = displaced_energy(params, Spin::up, n_manifold - spec.n);
    const double delta = e_up - e_down;
    if (std::abs(delta - spec.delta_n) > 1e-9 * std::max(1.0, std::abs(params.omega))) {
        throw std::invalid_argument("dressed_pair: ResonanceSpec detuning does not match the model parameters");
    }

    DressedManifold out;
    out.coupling = coupling_element(params, n_manifold, spec.n);
    out.delta = delta;
    out.weak_coupling_violated = std::abs(out.coupling) >= kWeakCouplingLimit * params.omega;

    const double v = out.coupling;
    const double mean = 0.5 * (e_down + e_up);
    const double half_split = std::sqrt(0.25 * delta * delta + v * v);

    auto make = [&](int alpha) {
        DressedPair p;
        p.n_manifold = n_manifold;
        p.alpha = alpha;
        p.energy = mean + alpha * half_split;
        // (c_down, c_up) ∝ (E − E_up, V) ∝ (V, E − E_down); take the better conditioned one
        const double a0 = alpha * half_split - 0.5 * delta;
        const double b0 = alpha * half_split + 0.5 * delta;
        double cd = a0;
        double cu = v;
        if (std::hypot(v, b0) > std::hypot(a0, v)) {
            cd = v;
            cu = b0;
        }
        const double norm = std::hypot(cd, cu);
        cd /= norm;
        cu /= norm;
        if (cd < 0.0 || (cd == 0.0 && cu < 0.0)) {
            cd = -cd;
            cu = -cu;
        }
        p.c_down = cd;
        p.c_up = cu;
        return p;
    };

    if (v == 0.0 && delta == 0.0) {
        out.degenerate = true;
        out.plus = DressedPair{n_manifold, +1, e_down, 1.0, 0.0};
        out.minus = DressedPair{n_manifold, -1, e_up, 0.0, 1.0};
        return out;
    }
    out.plus = make(+1);
    out.minus = make(-1);
    return out;
}

std::vector<UnmixedState> low_manifold_states(const ModelParams& params, const ResonanceSpec& spec,
                                              const FockSpace& space) {
    if (spec.n < 1) {
        throw std::domain_error("low_manifold_states: n must be >= 1");
    }
    std::vector<UnmixedState> out;
    out.reserve(static_cast<std::size_t>(spec.n));
    const auto n_max = static_cast<Eigen::Index>(space.n_max());
    for (int k = 0; k < spec.n; ++k) {
        UnmixedState s;
        s.n_photons = k;
        s.energy = displaced_energy(params, Spin::down, k);
        s.state = Eigen::VectorXcd::Zero(2 * n_max);
        s.state.head(n_max) = displaced_fock(static_cast<std::size_t>(k), params.ground_displacement(), space);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> rwa_validity_warnings(const ModelParams& params, const ResonanceSpec& spec,
                                               int max_manifold, double window) {
    std::vector<std::string> out;
    if (!spec.is_near_resonant(params.omega, window)) {
        std::ostringstream msg;
        msg << "detuning |delta_" << spec.n << "| = " << std::abs(spec.delta_n)
            << " is not small compared to omega (window " << window << " omega)";
        out.push_back(msg.str());
    }
    double worst = 0.0;
    int worst_n = spec.n;
    for (int big_n = spec.n; big_n <= max_manifold; ++big_n) {
        const double v = std::abs(coupling_element(params, big_n, spec.n));
        if (v > worst) {
            worst = v;
            worst_n = big_n;
        }
    }
    if (worst >= kWeakCouplingLimit * params.omega) {
        std::ostringstream msg;
        msg << "weak-coupling condition violated: |V_" << worst_n << "(" << spec.n << ")| = " << worst
            << " >= " << kWeakCouplingLimit << " omega";
        out.push_back(msg.str());
    }
    return out;
}

std::vector<SpectrumRecord> spectrum_records(const ModelParams& params, const ResonanceSpec& spec,
                                             int first, int last) {
    std::vector<SpectrumRecord> out;
    if (first > last) {
        return out;
    }
    first = std::max(first, spec.n);
    for (int big_n = first; big_n <= last; ++big_n) {
        const auto m = dressed_pair(params, spec, big_n);
        SpectrumRecord r;
        r.n_manifold = big_n;
        r.n = spec.n;
        r.delta_n = spec.delta_n;
        r.coupling = m.coupling;
        r.rabi = 2.0 * std::abs(m.coupling);
        r.e_plus = m.plus.energy;
        r.e_minus = m.minus.energy;
        r.c_down[0] = m.plus.c_down.real();
        r.c_down[1] = m.minus.c_down.real();
        r.c_up[0] = m.plus.c_up.real();
        r.c_up[1] = m.minus.c_up.real();
        r.degenerate = m.degenerate;
        out.push_back(r);
    }
    return out;
}

} // namespace gjc
