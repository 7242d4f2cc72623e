#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "horo/curve.hpp"
#include "horo/ode.hpp"

namespace horo {

// Reduced grim-reaper state: the phase plane is {z > 0, theta in (-pi, pi)}.
struct PhasePoint {
  double z = 1.0;
  double theta = 0.0;
};

// (z', theta') = (z sin(theta), 2 cos(theta) (1-z)/z).
// Throws std::domain_error for z <= 0.
std::array<double, 2> grim_field(const PhasePoint& p);

// Analytic Jacobian of grim_field.
std::array<std::array<double, 2>, 2> grim_field_jacobian(const PhasePoint& p);

// Conserved quantity cos(theta) z^-2 e^{-2/z} along grim-reaper orbits.
double first_integral(const PhasePoint& p);

enum class GrimClass { horosphere_h1, vertical_plane, periodic_graph };

const char* to_string(GrimClass c);

struct GrimSample {
  double s = 0.0;  // hyperbolic arc-length
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;
};

// Generating-curve solution of the full (x, z, theta) system with the
// canonical start x(0)=0, theta(0)=0, z(0)=z0.
struct GrimOrbit {
  std::vector<GrimSample> samples;  // accepted steps + events, increasing s
  double z0 = 1.0;                  // z at a theta=0 crossing with z < 1
  std::optional<double> z0_star;    // z at the first theta=0 crossing with z > 1
  std::optional<double> period_x;   // x-advance between consecutive minima
  double first_integral_c = 0.0;
  double first_integral_drift = 0.0;
  GrimClass classification = GrimClass::periodic_graph;
  std::vector<Event> events;

  // Dense trajectories of (x, z, theta); bwd covers [s_min, 0], fwd [0, s_max].
  Trajectory fwd, bwd;

  GrimSample state_at(double s) const;
  GeneratingCurve resample(std::size_t n) const;
  double s_min() const { return bwd.s.empty() ? 0.0 : bwd.s_end(); }
  double s_max() const { return fwd.s.empty() ? 0.0 : fwd.s_end(); }
};

// Integrates the generating curve over [s_min, s_max] with s_min <= 0 <= s_max,
// detecting theta-zero, z-one and z-extremum events, and classifies the orbit.
GrimOrbit solve_grim(double z0, double s_min, double s_max,
                     const SolverConfig& config);

// z of the next theta=0 crossing of the orbit through (z_start, 0), z_start != 1.
// Optionally reports the crossing parameter and x-advance of the full system.
double theta_zero_return(double z_start, const SolverConfig& config,
                         double* s_at = nullptr);

// The unique z0* > 1 paired with z0 in (0,1): the orbit through (z0, 0)
// next crosses theta = 0 at (z0*, 0).
double z0_star_map(double z0, const SolverConfig& config);

struct SymmetryCheckReport {
  double max_z_asymmetry = 0.0;      // |z(-s) - z(s)|
  double max_theta_asymmetry = 0.0;  // |theta(-s) + theta(s)|
  double max_reflected_field_error = 0.0;  // (z, pi - theta) orbit identity
};

// Checks the phase-plane reflection symmetries on an orbit integrated over a
// symmetric span from theta(0) = 0.
SymmetryCheckReport symmetry_check(const GrimOrbit& orbit, std::size_t n_probe = 512);

struct LinearizationReport {
  std::array<std::array<double, 2>, 2> jacobian{};
  std::array<std::complex<double>, 2> eigenvalues{};
  double trace = 0.0;
  double determinant = 0.0;
};

// Linearization of the reduced system at the equilibrium (1, 0).
LinearizationReport linearization_at_equilibrium();

}  // namespace horo
