#include "gjc/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gjc {

std::vector<std::string> ModelParams::violations() const {
    std::vector<std::string> out;
    auto finite = [&](double v, const char* name) {
        if (!std::isfinite(v)) {
            out.push_back(std::string(name) + " must be finite");
            return false;
        }
        return true;
    };
    if (finite(omega, "omega") && !(omega > 0.0)) {
        out.emplace_back("omega must be > 0");
    }
    finite(omega0, "omega0");
    finite(lambda_eg, "lambda_eg");
    if (finite(lambda_g, "lambda_g") && lambda_g < 0.0 && !allow_signed_couplings) {
        out.emplace_back("lambda_g must be >= 0 (set allow_signed_couplings to accept signed values)");
    }
    if (finite(lambda_e, "lambda_e") && lambda_e < 0.0 && !allow_signed_couplings) {
        out.emplace_back("lambda_e must be >= 0 (set allow_signed_couplings to accept signed values)");
    }
    return out;
}

void ModelParams::validate() const {
    const auto v = violations();
    if (v.empty()) {
        return;
    }
    std::ostringstream msg;
    msg << "invalid model parameters:";
    for (const auto& s : v) {
        msg << "\n  - " << s;
    }
    throw std::invalid_argument(msg.str());
}

DisplacementAmplitude ModelParams::ground_displacement() const {
    return DisplacementAmplitude(lambda_g / omega);
}

DisplacementAmplitude ModelParams::excited_displacement() const {
    return DisplacementAmplitude(-lambda_e / omega);
}

HamiltonianMatrix::HamiltonianMatrix(FockSpace space, Eigen::MatrixXcd matrix, double omega)
    : space_(space), matrix_(std::move(matrix)), omega_(omega) {
    if (matrix_.rows() != matrix_.cols() ||
        static_cast<std::size_t>(matrix_.rows()) != space_.dim()) {
        throw std::invalid_argument("HamiltonianMatrix: dimension does not match the product space");
    }
}

double HamiltonianMatrix::spectral_radius_bound() const {
    return matrix_.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXcd position_quadrature(const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.n_max());
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double s = std::sqrt(static_cast<double>(k + 1));
        x(k, k + 1) = s;
        x(k + 1, k) = s;
    }
    return x;
}

Eigen::MatrixXcd build_displaced_branch(const ModelParams& params, Spin branch, const FockSpace& space) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(space.n_max());
    const double sign = (branch == Spin::up) ? 1.0 : -1.0;
    const double coupling = (branch == Spin::up) ? params.lambda_e : -params.lambda_g;

    Eigen::MatrixXcd h = coupling * position_quadrature(space);
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k, k) = params.omega * (static_cast<double>(k) + 0.5) + sign * 0.5 * params.omega0;
    }
    return h;
}

Eigen::MatrixXcd embed_branch(const Eigen::MatrixXcd& block, Spin s, const FockSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.n_max());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    const Eigen::Index off = (s == Spin::up) ? n : 0;
    out.block(off, off, n, n) = block;
    return out;
}

HamiltonianMatrix build_coupling(const ModelParams& params, const FockSpace& space) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(space.n_max());
    const Eigen::MatrixXcd x = params.lambda_eg * position_quadrature(space);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    v.block(0, n, n, n) = x;
    v.block(n, 0, n, n) = x;
    return HamiltonianMatrix(space, std::move(v), params.omega);
}

HamiltonianMatrix build_full(const ModelParams& params, const FockSpace& space) {
    Eigen::MatrixXcd h = build_coupling(params, space).matrix();
    const auto n = static_cast<Eigen::Index>(space.n_max());
    h.block(0, 0, n, n) = build_displaced_branch(params, Spin::down, space);
    h.block(n, n, n, n) = build_displaced_branch(params, Spin::up, space);
    return HamiltonianMatrix(space, std::move(h), params.omega);
}

double displaced_energy(const ModelParams& params, Spin branch, int n) {
    if (n < 0) {
        throw std::domain_error("displaced_energy: negative photon number");
    }
    const double ladder = params.omega * (n + 0.5);
    if (branch == Spin::up) {
        return 0.5 * params.omega0 + ladder - params.lambda_e * params.lambda_e / params.omega;
    }
    return -0.5 * params.omega0 + ladder - params.lambda_g * params.lambda_g / params.omega;
}

} // namespace gjc
