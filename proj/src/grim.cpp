#include "horo/grim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace horo {

namespace {

void check_z(double z, const char* who) {
  if (!(z > 0.0)) throw std::domain_error(std::string(who) + ": z must be > 0");
}

// Full generating-curve system, y = (x, z, theta).
void grim_field3(double, std::span<const double> y, std::span<double> dy) {
  double z = y[1], th = y[2];
  check_z(z, "grim_field");
  dy[0] = z * std::cos(th);
  dy[1] = z * std::sin(th);
  dy[2] = 2.0 * std::cos(th) * (1.0 - z) / z;
}

std::vector<EventSpec> grim_event_specs(bool backward) {
  // On a backward leg the integration order reverses the sign of dz/ds,
  // so extremum directions flip to keep kinds in the s-increasing sense.
  int flip = backward ? -1 : +1;
  std::vector<EventSpec> specs;
  specs.push_back({EventKind::theta_zero,
                   [](double, std::span<const double> y) { return y[2]; }, 0, false});
  specs.push_back({EventKind::z_one,
                   [](double, std::span<const double> y) { return y[1] - 1.0; }, 0,
                   false});
  auto dz = [](double, std::span<const double> y) { return y[1] * std::sin(y[2]); };
  specs.push_back({EventKind::z_extremum_max, dz, -flip, false});
  specs.push_back({EventKind::z_extremum_min, dz, +flip, false});
  return specs;
}

}  // namespace

std::array<double, 2> grim_field(const PhasePoint& p) {
  check_z(p.z, "grim_field");
  return {p.z * std::sin(p.theta), 2.0 * std::cos(p.theta) * (1.0 - p.z) / p.z};
}

std::array<std::array<double, 2>, 2> grim_field_jacobian(const PhasePoint& p) {
  check_z(p.z, "grim_field_jacobian");
  double s = std::sin(p.theta), c = std::cos(p.theta), z = p.z;
  return {{{s, z * c}, {-2.0 * c / (z * z), -2.0 * s * (1.0 - z) / z}}};
}

double first_integral(const PhasePoint& p) {
  check_z(p.z, "first_integral");
  // cos(theta) z^-2 e^{-2/z}, evaluated in log form so neither factor overflows.
  return std::cos(p.theta) * std::exp(-2.0 / p.z - 2.0 * std::log(p.z));
}

const char* to_string(GrimClass c) {
  switch (c) {
    case GrimClass::horosphere_h1: return "horosphere-H1";
    case GrimClass::vertical_plane: return "vertical-plane";
    case GrimClass::periodic_graph: return "periodic-graph";
  }
  return "?";
}

GrimSample GrimOrbit::state_at(double s) const {
  const Trajectory& tr = (s < 0.0 && !bwd.s.empty()) ? bwd : fwd;
  auto y = tr.sample(s);
  return {s, y[0], y[1], y[2]};
}

GeneratingCurve GrimOrbit::resample(std::size_t n) const {
  if (n < 2) throw std::invalid_argument("GrimOrbit::resample: need n >= 2");
  GeneratingCurve c;
  c.family = "grim";
  c.symmetry = SymmetryKind::parabolic_cylinder;
  c.has_theta = true;
  double a = s_min(), b = s_max();
  c.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    GrimSample g = state_at(s);
    c.samples.push_back({g.s, g.x, g.z, g.theta});
  }
  return c;
}

GrimOrbit solve_grim(double z0, double s_min, double s_max,
                     const SolverConfig& config) {
  check_z(z0, "solve_grim");
  if (!(s_min <= 0.0) || !(s_max >= 0.0) || s_min == s_max)
    throw std::invalid_argument("solve_grim: span must contain s = 0");

  GrimOrbit orbit;
  orbit.z0 = z0;
  orbit.first_integral_c = first_integral({z0, 0.0});
  orbit.classification =
      (z0 == 1.0) ? GrimClass::horosphere_h1 : GrimClass::periodic_graph;

  std::array<double, 3> y0{0.0, z0, 0.0};

  auto fwd_specs = grim_event_specs(false);
  auto bwd_specs = grim_event_specs(true);

  if (s_max > 0.0) {
    auto res = integrate(grim_field3, y0, 0.0, s_max, config, fwd_specs);
    if (!res.ok())
      throw std::runtime_error(std::string("solve_grim: forward leg ") +
                               to_string(res.status) + " " + res.message);
    orbit.fwd = std::move(res.trajectory);
    orbit.events = std::move(res.events);
  }
  if (s_min < 0.0) {
    auto res = integrate(grim_field3, y0, 0.0, s_min, config, bwd_specs);
    if (!res.ok())
      throw std::runtime_error(std::string("solve_grim: backward leg ") +
                               to_string(res.status) + " " + res.message);
    orbit.bwd = std::move(res.trajectory);
    orbit.events.insert(orbit.events.begin(), res.events.rbegin(),
                        res.events.rend());
  }

  // Merge accepted steps and event states into one increasing sample list.
  auto push = [&](double s, std::span<const double> y) {
    orbit.samples.push_back({s, y[0], y[1], y[2]});
  };
  for (std::size_t i = orbit.bwd.s.size(); i-- > 0;)
    push(orbit.bwd.s[i], orbit.bwd.y[i]);
  for (std::size_t i = orbit.bwd.s.empty() ? 0 : 1; i < orbit.fwd.s.size(); ++i)
    push(orbit.fwd.s[i], orbit.fwd.y[i]);
  for (const Event& e : orbit.events) push(e.s, e.state);
  std::sort(orbit.samples.begin(), orbit.samples.end(),
            [](const GrimSample& a, const GrimSample& b) { return a.s < b.s; });
  orbit.samples.erase(
      std::unique(orbit.samples.begin(), orbit.samples.end(),
                  [](const GrimSample& a, const GrimSample& b) {
                    return std::abs(a.s - b.s) < 1e-13;
                  }),
      orbit.samples.end());

  for (const auto& smp : orbit.samples)
    orbit.first_integral_drift =
        std::max(orbit.first_integral_drift,
                 std::abs(first_integral({smp.z, smp.theta}) -
                          orbit.first_integral_c));

  // z0* from the first forward theta=0 crossing above the horosphere,
  // the period from the x-advance between consecutive minima crossings.
  std::vector<std::array<double, 2>> minima;  // (s, x)
  if (z0 < 1.0) minima.push_back({0.0, 0.0});  // canonical start is a minimum
  for (const Event& e : orbit.events) {
    if (e.kind != EventKind::theta_zero || e.s <= 0.0) continue;
    if (e.state[1] > 1.0) {
      if (!orbit.z0_star) orbit.z0_star = e.state[1];
    } else {
      minima.push_back({e.s, e.state[0]});
    }
  }
  if (minima.size() >= 2) orbit.period_x = minima[1][1] - minima[0][1];
  return orbit;
}

double theta_zero_return(double z_start, const SolverConfig& config, double* s_at) {
  check_z(z_start, "theta_zero_return");
  if (z_start == 1.0)
    throw std::invalid_argument("theta_zero_return: (1, 0) is the equilibrium");

  // Reduced system is enough; terminal event stops at the first crossing.
  VectorField field = [](double, std::span<const double> y, std::span<double> dy) {
    check_z(y[0], "grim_field");
    dy[0] = y[0] * std::sin(y[1]);
    dy[1] = 2.0 * std::cos(y[1]) * (1.0 - y[0]) / y[0];
  };
  EventSpec crossing{EventKind::theta_zero,
                     [](double, std::span<const double> y) { return y[1]; }, 0, true};
  std::array<double, 2> y0{z_start, 0.0};

  // The return parameter grows like |log z0| as z0 -> 0; 400 covers any
  // practically representable starting height.
  auto res = integrate(field, y0, 0.0, 400.0, config, {&crossing, 1});
  for (const Event& e : res.events)
    if (e.s > 0.0) {
      if (s_at) *s_at = e.s;
      return e.state[0];
    }
  throw std::runtime_error("theta_zero_return: no theta=0 crossing found");
}

double z0_star_map(double z0, const SolverConfig& config) {
  if (!(z0 > 0.0) || !(z0 < 1.0))
    throw std::invalid_argument("z0_star_map: z0 must lie in (0,1)");
  return theta_zero_return(z0, config);
}

SymmetryCheckReport symmetry_check(const GrimOrbit& orbit, std::size_t n_probe) {
  if (orbit.bwd.s.empty() || orbit.fwd.s.empty())
    throw std::invalid_argument("symmetry_check: orbit must cover [-S, S]");
  if (std::abs(orbit.fwd.y.front()[2]) > 0.0)
    throw std::invalid_argument("symmetry_check: orbit must start at theta = 0");

  double S = std::min(orbit.s_max(), -orbit.s_min());
  SymmetryCheckReport rep;
  for (std::size_t i = 1; i <= n_probe; ++i) {
    double s = S * static_cast<double>(i) / static_cast<double>(n_probe);
    GrimSample p = orbit.state_at(s);
    GrimSample m = orbit.state_at(-s);
    rep.max_z_asymmetry = std::max(rep.max_z_asymmetry, std::abs(m.z - p.z));
    rep.max_theta_asymmetry =
        std::max(rep.max_theta_asymmetry, std::abs(m.theta + p.theta));

    // Prop.-style reflection (z, theta) -> (z, pi - theta): the reflected
    // point must satisfy f(z, pi - theta) = (dz, -dtheta).
    auto f = grim_field({p.z, p.theta});
    auto g = grim_field({p.z, std::numbers::pi - p.theta});
    double scale = 1.0 + std::abs(f[0]) + std::abs(f[1]);
    rep.max_reflected_field_error =
        std::max(rep.max_reflected_field_error,
                 std::max(std::abs(g[0] - f[0]), std::abs(g[1] + f[1])) / scale);
  }
  return rep;
}

LinearizationReport linearization_at_equilibrium() {
  LinearizationReport rep;
  rep.jacobian = grim_field_jacobian({1.0, 0.0});
  const auto& j = rep.jacobian;
  rep.trace = j[0][0] + j[1][1];
  rep.determinant = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  // Eigenvalues of a 2x2 from trace and determinant.
  std::complex<double> disc =
      std::sqrt(std::complex<double>(rep.trace * rep.trace - 4.0 * rep.determinant));
  rep.eigenvalues = {0.5 * (rep.trace + disc), 0.5 * (rep.trace - disc)};
  return rep;
}

}  // namespace horo
