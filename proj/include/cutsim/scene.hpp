#pragma once

#include <vector>

#include "cutsim/planner.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// Jittered-lattice particle seeding of the scene's analytic primitive.
// Positions are deterministic in the scene seed; mass = rho * spacing^3.
std::vector<Particle> sample_object_particles(const SceneSpec& scene, double spacing,
                                              int material_index, const Material& mat);

}  // namespace cutsim
