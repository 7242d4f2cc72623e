#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "horo/curve.hpp"

namespace horo {

// Point of the upper half-space model, z > 0.
struct UpperHalfSpacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

// Surface point with its Euclidean curvature data and the hyperbolic mean
// curvature H = z*H_e + (N_e)_3 derived from them.
struct CurvatureSample {
  UpperHalfSpacePoint point;
  double mean_curvature_euclidean = 0.0;
  std::array<double, 3> unit_normal_euclidean{0.0, 0.0, 1.0};
  double mean_curvature_hyperbolic = 0.0;
};

CurvatureSample make_curvature_sample(const UpperHalfSpacePoint& p, double H_e,
                                      const std::array<double, 3>& N_e);

// Hyperbolic mean curvature from Euclidean data at height z.
// Throws std::domain_error for z <= 0.
double hyperbolic_from_euclidean(double z, double H_e, double N_e3);

// Hyperbolic inner product of ambient vectors attached at height z.
double hyperbolic_inner(double z, const std::array<double, 3>& u,
                        const std::array<double, 3>& v);

// Residual and conservation statistics for a sampled curve.
struct VerificationReport {
  double max_residual = 0.0;
  double rms_residual = 0.0;
  std::size_t interior_samples = 0;
  std::optional<double> conservation_drift;
  std::string conservation_kind;  // "first-integral", "energy" or empty
};

// Independent check of H = <N, dz> on a sampled generating curve. The
// profile derivatives are estimated by centered finite differences on the
// given (possibly non-uniform) parameter values; nothing is taken from the
// generating ODE. Endpoints are excluded from the statistics.
//
// Requires >= 5 samples; rotational curves must keep x > 0 at interior
// samples (axis contact allowed at the endpoints only).
VerificationReport shrinker_residual(const GeneratingCurve& curve,
                                     SymmetryKind family);

// shrinker_residual plus the conservation statistic appropriate for the
// curve's family: first-integral drift for grim curves (needs theta),
// energy-identity drift for bowls (slope recovered by finite differences).
VerificationReport verify_curve(const GeneratingCurve& curve);

}  // namespace horo
