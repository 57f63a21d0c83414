#include "cutsim/constitutive.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "cutsim/errors.hpp"

namespace cutsim {

std::pair<double, double> compute_lame(double E, double nu) {
    if (!(E > 0.0)) {
        throw ParameterDomainError("Young's modulus must be positive, got " + std::to_string(E));
    }
    if (!(nu > -1.0 && nu < 0.5)) {
        throw ParameterDomainError("Poisson ratio must lie in (-1, 0.5), got " +
                                   std::to_string(nu));
    }
    const double mu = E / (2.0 * (1.0 + nu));
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    return {mu, lambda};
}

std::array<double, 3> bspline_weights(double fx) {
    if (!(fx >= 0.5 && fx <= 1.5)) {
        throw OutOfDomainError("stencil coordinate " + std::to_string(fx) +
                               " outside [0.5, 1.5]; particle escaped its stencil");
    }
    const double a = 1.5 - fx;
    const double b = fx - 1.0;
    const double c = fx - 0.5;
    return {0.5 * a * a, 0.75 - b * b, 0.5 * c * c};
}

PolarDecomposition polar_rotation(const Mat3& F) {
    const double det = F.determinant();
    if (!(det > 0.0)) {
        throw InvertedElementError("det(F) = " + std::to_string(det) +
                                   "; J must be clamped positive before stress evaluation");
    }
    // Newton iteration X <- (X + X^-T)/2 converges quadratically to the
    // orthogonal polar factor for det > 0.
    Mat3 X = F;
    for (int it = 0; it < 60; ++it) {
        const Mat3 next = 0.5 * (X + X.inverse().transpose());
        const double delta = (next - X).cwiseAbs().maxCoeff();
        X = next;
        if (delta < 1e-13) break;
    }
    PolarDecomposition out;
    out.R = X;
    const Mat3 S = X.transpose() * F;
    out.S = 0.5 * (S + S.transpose());
    return out;
}

Mat3 corotated_piola(const Mat3& F, double mu_eff, double lambda_eff) {
    const double J = F.determinant();
    if (!(J > 0.0)) {
        throw InvertedElementError("det(F) = " + std::to_string(J) + " in corotated_piola");
    }
    const Mat3 R = polar_rotation(F).R;
    return 2.0 * mu_eff * (F - R) + lambda_eff * (J - 1.0) * J * F.inverse().transpose();
}

Mat3 cauchy_from_piola(const Mat3& F, const Mat3& P) {
    const double J = F.determinant();
    if (!(J > 0.0)) {
        throw InvertedElementError("det(F) <= 0 in cauchy_from_piola");
    }
    return (1.0 / J) * P * F.transpose();
}

RadialReturnResult j2_radial_return(const Mat3& F_trial, const Material& mat, double alpha,
                                    double visco_relax) {
    const double J = F_trial.determinant();
    if (!(J > 0.0)) {
        throw InvertedElementError("det(F) = " + std::to_string(J) + " in j2_radial_return");
    }
    const double yield_radius = std::sqrt(2.0 / 3.0) * mat.sigma_y;
    if (!std::isfinite(yield_radius)) {
        return {F_trial, alpha};
    }

    const auto [mu, lambda] = compute_lame(mat.E, mat.nu);
    (void)lambda;

    // Principal stretches from F^T F; computeDirect is closed-form and cheap
    // enough for the per-particle hot path.
    Eigen::SelfAdjointEigenSolver<Mat3> eig;
    eig.computeDirect(F_trial.transpose() * F_trial);
    const Vec3 sigma2 = eig.eigenvalues().cwiseMax(1e-24);
    const Vec3 sigma = sigma2.cwiseSqrt();
    const Vec3 eps = sigma.array().log();
    const double eps_mean = eps.sum() / 3.0;
    const Vec3 eps_dev = eps.array() - eps_mean;
    const double dev_norm = eps_dev.norm();

    // Trial deviatoric stress magnitude (Hencky measure): ||s|| = 2 mu ||eps_dev||.
    const double s_norm = 2.0 * mu * dev_norm;
    if (s_norm <= yield_radius || dev_norm <= 0.0) {
        return {F_trial, alpha};
    }

    double dgamma = dev_norm - yield_radius / (2.0 * mu);
    if (visco_relax > 0.0) {
        dgamma /= 1.0 + visco_relax;
    }
    const Vec3 eps_dev_new = eps_dev * (1.0 - dgamma / dev_norm);
    const Vec3 sigma_new = (eps_dev_new.array() + eps_mean).exp();

    const Mat3 V = eig.eigenvectors();
    const Mat3 U = F_trial * V * sigma.cwiseInverse().asDiagonal();
    RadialReturnResult out;
    out.F = U * sigma_new.asDiagonal() * V.transpose();
    out.alpha = alpha + dgamma;
    return out;
}

double cfl_timestep(const SimConfig& cfg, const std::vector<Material>& materials) {
    if (materials.empty()) {
        throw ConfigError("CFL timestep needs at least one material");
    }
    double max_wave_speed = 0.0;
    for (const Material& m : materials) {
        const auto [mu, lambda] = compute_lame(m.E, m.nu);
        max_wave_speed = std::max(max_wave_speed, std::sqrt((lambda + 2.0 * mu) / m.rho));
    }
    return cfg.cfl_factor * cfg.dx() / max_wave_speed;
}

}  // namespace cutsim
