#pragma once

#include <array>
#include <utility>

#include "cutsim/math_types.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// mu = E / (2(1+nu)), lambda = E*nu / ((1+nu)(1-2nu)).
// Throws ParameterDomainError for E <= 0 or nu outside (-1, 0.5).
std::pair<double, double> compute_lame(double E, double nu);

// Quadratic B-spline weights over the 3-node stencil. fx is the distance (in
// cell units) from the particle to the lowest stencil node, in [0.5, 1.5].
std::array<double, 3> bspline_weights(double fx);

struct PolarDecomposition {
    Mat3 R;  // rotation, det = +1
    Mat3 S;  // symmetric positive-definite stretch
};

// Polar decomposition F = R*S via Newton iteration on the rotation factor.
// Requires det(F) > 0; throws InvertedElementError otherwise.
PolarDecomposition polar_rotation(const Mat3& F);

// Corotated first Piola stress P = 2*mu*(F - R) + lambda*(J-1)*J*F^-T.
Mat3 corotated_piola(const Mat3& F, double mu_eff, double lambda_eff);

// Companion accessor: Cauchy stress sigma = J^-1 P F^T.
Mat3 cauchy_from_piola(const Mat3& F, const Mat3& P);

struct RadialReturnResult {
    Mat3 F;
    double alpha;
};

// J2 radial return on the principal-stretch (Hencky) deviator; the volumetric
// part is preserved exactly. visco_relax = 0 gives the rate-independent
// return; > 0 relaxes the returned fraction Perzyna-style.
RadialReturnResult j2_radial_return(const Mat3& F_trial, const Material& mat, double alpha,
                                    double visco_relax = 0.0);

// dt_max = cfl_factor * dx / max_m sqrt((lambda_m + 2 mu_m) / rho_m).
// Throws ConfigError on an empty material set.
double cfl_timestep(const SimConfig& cfg, const std::vector<Material>& materials);

}  // namespace cutsim
