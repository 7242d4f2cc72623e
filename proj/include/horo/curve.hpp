#pragma once

#include <string>
#include <vector>

namespace horo {

// Which one-parameter isometry group sweeps the generating curve.
enum class SymmetryKind {
  parabolic_cylinder,  // rulings parallel to (0,1,0)
  rotational,          // axis = z-axis
};

const char* to_string(SymmetryKind k);

// One generating-curve sample. `s` is the curve parameter (hyperbolic
// arc-length for grim reapers, Euclidean arc-length for wings, the radial
// coordinate r for bowls). theta is unused when has_theta is false.
struct CurveSample {
  double s = 0.0;
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
};

// Sampled generating curve of an invariant surface; the central artifact
// output, shared by solvers, verification and file emission.
struct GeneratingCurve {
  std::string family;  // "grim", "bowl", "wing", "plane", "horosphere"
  SymmetryKind symmetry = SymmetryKind::parabolic_cylinder;
  bool has_theta = true;
  std::vector<CurveSample> samples;
};

}  // namespace horo
