#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace horo {

// Right-hand side of y' = f(s, y); writes the derivative into dy.
// A field may throw std::domain_error to signal that y left its domain;
// the integrator treats that as a rejected step, not a fatal error.
using VectorField =
    std::function<void(double s, std::span<const double> y, std::span<double> dy)>;

// Scalar integrand carried along the integration as an extra accumulator.
using Integrand = std::function<double(double s, std::span<const double> y)>;

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;       // 0 = choose automatically
  double h_max = 0.0;        // 0 = |span| / 10
  long max_steps = 1000000;
  double event_tol = 1e-12;  // root location tolerance in the independent variable

  // Throws std::invalid_argument if tolerances or step bounds are unusable.
  void validate() const;
};

enum class EventKind {
  theta_zero,
  z_one,
  z_extremum_max,
  z_extremum_min,
  x_critical,
  user,
};

const char* to_string(EventKind k);

// A detected root of an event function, refined to event_tol in s.
struct Event {
  EventKind kind;
  double s;
  std::vector<double> state;
};

struct EventSpec {
  EventKind kind = EventKind::user;
  std::function<double(double s, std::span<const double> y)> value;
  int direction = 0;     // +1: only - to +, -1: only + to -, 0: any crossing
  bool terminal = false; // stop the integration at the refined root
};

enum class IntegrationStatus { completed, max_steps, step_underflow, domain_exit };

const char* to_string(IntegrationStatus st);

// Dense-output coefficients for one accepted step, quartic in the
// normalized step fraction.
struct DenseSegment {
  double s0 = 0.0;
  double h = 0.0;
  std::vector<double> c1, c2, c3, c4, c5;

  void eval(double s, std::span<double> out) const;
};

// Accepted steps plus a piecewise interpolant over the whole span.
// Monotone in s (increasing for forward spans, decreasing for backward).
struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> s;
  std::vector<std::vector<double>> y;
  std::vector<DenseSegment> segments;

  bool forward() const { return s.size() < 2 || s.back() >= s.front(); }
  double s_begin() const { return s.front(); }
  double s_end() const { return s.back(); }

  // Interpolated state at any s inside the covered span (clamped outside).
  std::vector<double> sample(double at) const;
  void sample_into(double at, std::span<double> out) const;
};

struct IntegrationResult {
  Trajectory trajectory;
  std::vector<Event> events;
  IntegrationStatus status = IntegrationStatus::completed;
  std::string message;

  bool ok() const { return status == IntegrationStatus::completed; }
};

// Adaptive Dormand-Prince 5(4) with PI step control, quartic dense output
// and event root refinement by bisection on the interpolant.
IntegrationResult integrate(const VectorField& field, std::span<const double> y0,
                            double s_begin, double s_end, const SolverConfig& config,
                            std::span<const EventSpec> events = {});

// Same integrator on the augmented state [y; q] with q_i' = quad[i](s, y).
// Accumulators start at quad_init (zeros if empty) and share the solver's
// order and error control. The resulting trajectory has dim = |y0| + |quad|.
IntegrationResult integrate_with_quadrature(const VectorField& field,
                                            std::span<const Integrand> quad,
                                            std::span<const double> y0,
                                            double s_begin, double s_end,
                                            const SolverConfig& config,
                                            std::span<const EventSpec> events = {},
                                            std::span<const double> quad_init = {});

}  // namespace horo
