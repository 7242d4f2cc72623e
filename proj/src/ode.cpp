#include "horo/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace horo {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;

// Error weights, 5th minus embedded 4th order.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Dense-output weights for the quartic continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct FieldDomainExit {};

class Stepper {
 public:
  Stepper(const VectorField& field, std::size_t n) : field_(field), n_(n) {
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) k->resize(n);
    ytmp_.resize(n);
  }

  // Evaluates the field, translating domain errors and checking finiteness.
  void eval(double s, std::span<const double> y, std::span<double> dy) {
    try {
      field_(s, y, dy);
    } catch (const std::domain_error&) {
      throw FieldDomainExit{};
    }
    for (std::size_t i = 0; i < dy.size(); ++i) {
      if (!std::isfinite(dy[i])) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "non-finite field value in component %zu at s=%.17g", i, s);
        throw std::runtime_error(buf);
      }
    }
    ++n_eval_;
  }

  void first_stage(double s, std::span<const double> y) { eval(s, y, k1_); }
  void shift_fsal() { std::swap(k1_, k7_); }

  // One trial step from (s, y) with size h. Fills ynew, the scaled error
  // norm, and the dense segment. k1 must already hold f(s, y).
  double try_step(double s, std::span<const double> y, double h,
                  std::span<double> ynew, const SolverConfig& cfg,
                  DenseSegment& seg) {
    auto stage = [&](std::span<double> k, double c,
                     std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const auto& [kv, a] : terms) acc += a * (*kv)[i];
        ytmp_[i] = y[i] + h * acc;
      }
      eval(s + c * h, ytmp_, k);
    };

    stage(k2_, c2, {{&k1_, a21}});
    stage(k3_, c3, {{&k1_, a31}, {&k2_, a32}});
    stage(k4_, c4, {{&k1_, a41}, {&k2_, a42}, {&k3_, a43}});
    stage(k5_, c5, {{&k1_, a51}, {&k2_, a52}, {&k3_, a53}, {&k4_, a54}});
    stage(k6_, 1.0, {{&k1_, a61}, {&k2_, a62}, {&k3_, a63}, {&k4_, a64}, {&k5_, a65}});

    for (std::size_t i = 0; i < n_; ++i)
      ynew[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] +
                            a75 * k5_[i] + a76 * k6_[i]);
    eval(s + h, ynew, k7_);

    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                       e6 * k6_[i] + e7 * k7_[i]);
      double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n_));

    seg.s0 = s;
    seg.h = h;
    seg.c1.assign(y.begin(), y.end());
    seg.c2.resize(n_);
    seg.c3.resize(n_);
    seg.c4.resize(n_);
    seg.c5.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double ydiff = ynew[i] - y[i];
      double bspl = h * k1_[i] - ydiff;
      seg.c2[i] = ydiff;
      seg.c3[i] = bspl;
      seg.c4[i] = ydiff - h * k7_[i] - bspl;
      seg.c5[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                       d6 * k6_[i] + d7 * k7_[i]);
    }
    return err;
  }

  long evaluations() const { return n_eval_; }

 private:
  const VectorField& field_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
  long n_eval_ = 0;
};

// Refines a sign change of g on [sa, sb] (dense-output bracket) by bisection.
double bisect_root(const DenseSegment& seg,
                   const std::function<double(double, std::span<const double>)>& g,
                   double sa, double ga, double sb, double tol,
                   std::vector<double>& scratch) {
  double a = sa, b = sb, fa = ga;
  while (std::abs(b - a) > tol) {
    double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    seg.eval(m, scratch);
    double fm = g(m, scratch);
    if (fm == 0.0) return m;
    if ((fa < 0) != (fm < 0)) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("SolverConfig: rtol and atol must be positive");
  if (!(event_tol > 0.0))
    throw std::invalid_argument("SolverConfig: event_tol must be positive");
  if (max_steps < 1) throw std::invalid_argument("SolverConfig: max_steps must be >= 1");
  if (h_max > 0.0 && h_init > h_max)
    throw std::invalid_argument("SolverConfig: h_init must not exceed h_max");
  if (h_init < 0.0 || h_max < 0.0)
    throw std::invalid_argument("SolverConfig: step bounds must be non-negative");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::theta_zero: return "theta-zero";
    case EventKind::z_one: return "z-one";
    case EventKind::z_extremum_max: return "z-extremum-max";
    case EventKind::z_extremum_min: return "z-extremum-min";
    case EventKind::x_critical: return "x-critical";
    case EventKind::user: return "user";
  }
  return "?";
}

const char* to_string(IntegrationStatus st) {
  switch (st) {
    case IntegrationStatus::completed: return "completed";
    case IntegrationStatus::max_steps: return "max-steps";
    case IntegrationStatus::step_underflow: return "step-underflow";
    case IntegrationStatus::domain_exit: return "domain-exit";
  }
  return "?";
}

void DenseSegment::eval(double s, std::span<double> out) const {
  double th = (h != 0.0) ? (s - s0) / h : 0.0;
  double th1 = 1.0 - th;
  for (std::size_t i = 0; i < c1.size(); ++i)
    out[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
}

std::vector<double> Trajectory::sample(double at) const {
  std::vector<double> out(dim);
  sample_into(at, out);
  return out;
}

void Trajectory::sample_into(double at, std::span<double> out) const {
  if (segments.empty()) {
    std::copy(y.front().begin(), y.front().end(), out.begin());
    return;
  }
  bool fwd = forward();
  // First segment whose far end reaches `at`.
  auto it = std::lower_bound(segments.begin(), segments.end(), at,
                             [fwd](const DenseSegment& seg, double v) {
                               double end = seg.s0 + seg.h;
                               return fwd ? end < v : end > v;
                             });
  if (it == segments.end()) --it;
  it->eval(at, out);
}

IntegrationResult integrate(const VectorField& field, std::span<const double> y0,
                            double s_begin, double s_end, const SolverConfig& config,
                            std::span<const EventSpec> events) {
  config.validate();
  double span = s_end - s_begin;
  if (span == 0.0) throw std::invalid_argument("integrate: degenerate span");
  double dir = span > 0 ? 1.0 : -1.0;

  double h_max = config.h_max > 0 ? config.h_max : std::abs(span) / 10.0;
  double h = config.h_init > 0 ? config.h_init
                               : std::min(h_max, std::max(1e-8, 1e-3 * std::abs(span)));

  std::size_t n = y0.size();
  IntegrationResult res;
  res.trajectory.dim = n;
  res.trajectory.s.push_back(s_begin);
  res.trajectory.y.emplace_back(y0.begin(), y0.end());

  Stepper stepper(field, n);
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> ynew(n), scratch(n);
  double s = s_begin;

  auto finish = [&res, dir](IntegrationStatus st) -> IntegrationResult& {
    std::stable_sort(res.events.begin(), res.events.end(),
                     [dir](const Event& a, const Event& b) {
                       return a.s * dir < b.s * dir;
                     });
    res.status = st;
    return res;
  };

  stepper.first_stage(s, y);

  // Last reported event location per spec index, for dedup within event_tol.
  std::vector<double> last_event_s(events.size(),
                                   std::numeric_limits<double>::quiet_NaN());

  // PI step controller state.
  constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safety = 0.9;
  double facold = 1e-4;
  bool rejected_last = false;

  long steps = 0;
  while (true) {
    if (steps >= config.max_steps) {
      res.message = "maximum step count reached";
      return finish(IntegrationStatus::max_steps);
    }
    double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(s), 1.0);
    h = std::min(h, h_max);
    bool last = false;
    if ((s + dir * h - s_end) * dir >= 0.0) {
      h = std::abs(s_end - s);
      last = true;
      if (h == 0.0) return finish(IntegrationStatus::completed);
    }

    DenseSegment seg;
    double err;
    bool domain_hit = false;
    try {
      err = stepper.try_step(s, y, dir * h, ynew, config, seg);
    } catch (const FieldDomainExit&) {
      domain_hit = true;
      err = std::numeric_limits<double>::infinity();
    }

    if (err > 1.0) {
      // Rejected: shrink and retry.
      double fac = domain_hit ? 2.0
                              : std::min(5.0, std::pow(err, expo1) / safety);
      h /= fac;
      rejected_last = true;
      ++steps;
      if (h < h_floor) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "step size underflow at s=%.17g", s);
        res.message = buf;
        return finish(domain_hit ? IntegrationStatus::domain_exit
                                 : IntegrationStatus::step_underflow);
      }
      continue;
    }

    // Accepted.
    ++steps;
    double s_new = last ? s_end : s + dir * h;
    seg.h = s_new - seg.s0;  // exact endpoint for the interpolant

    // Event scan on the fresh segment: sign changes over a few subintervals.
    bool stop_at_event = false;
    double stop_s = s_new;
    constexpr int kScan = 4;
    for (std::size_t ie = 0; ie < events.size(); ++ie) {
      const EventSpec& ev = events[ie];
      double sa = s;
      double ga = ev.value(sa, y);
      for (int j = 1; j <= kScan; ++j) {
        double sb = s + (s_new - s) * (static_cast<double>(j) / kScan);
        double gb;
        if (j == kScan) {
          gb = ev.value(sb, ynew);
        } else {
          seg.eval(sb, scratch);
          gb = ev.value(sb, scratch);
        }
        bool crossed = (ga < 0 && gb >= 0) || (ga > 0 && gb <= 0) ||
                       (ga == 0 && gb != 0 && sa != s_begin);
        if (crossed) {
          int sgn = gb > ga ? +1 : -1;
          if (ev.direction == 0 || ev.direction == sgn) {
            double root = (ga == 0.0) ? sa
                                      : bisect_root(seg, ev.value, sa, ga, sb,
                                                    config.event_tol, scratch);
            bool dup = !std::isnan(last_event_s[ie]) &&
                       std::abs(root - last_event_s[ie]) <= config.event_tol;
            if (!dup) {
              last_event_s[ie] = root;
              Event e;
              e.kind = ev.kind;
              e.s = root;
              e.state.resize(n);
              seg.eval(root, e.state);
              res.events.push_back(std::move(e));
              if (ev.terminal && (!stop_at_event || (root - stop_s) * dir < 0)) {
                stop_at_event = true;
                stop_s = root;
              }
            }
          }
        }
        sa = sb;
        ga = gb;
      }
    }

    if (stop_at_event) {
      // Truncate at the first terminal event.
      std::erase_if(res.events, [&](const Event& e) {
        return (e.s - stop_s) * dir > config.event_tol;
      });
      seg.h = stop_s - seg.s0;
      std::vector<double> ystop(n);
      if (seg.h != 0.0) {
        seg.eval(stop_s, ystop);
        res.trajectory.segments.push_back(seg);
        res.trajectory.s.push_back(stop_s);
        res.trajectory.y.push_back(ystop);
      }
      return finish(IntegrationStatus::completed);
    }

    res.trajectory.segments.push_back(std::move(seg));
    res.trajectory.s.push_back(s_new);
    res.trajectory.y.push_back(ynew);

    if (last) return finish(IntegrationStatus::completed);

    // PI controller for the next step size.
    double fac11 = std::pow(std::max(err, 1e-16), expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(0.1, std::min(5.0, fac / safety));
    double h_next = h / fac;
    if (rejected_last) h_next = std::min(h_next, h);
    rejected_last = false;
    facold = std::max(err, 1e-4);

    s = s_new;
    std::swap(y, ynew);
    stepper.shift_fsal();
    h = h_next;
  }
}

IntegrationResult integrate_with_quadrature(const VectorField& field,
                                            std::span<const Integrand> quad,
                                            std::span<const double> y0,
                                            double s_begin, double s_end,
                                            const SolverConfig& config,
                                            std::span<const EventSpec> events,
                                            std::span<const double> quad_init) {
  std::size_t n = y0.size(), m = quad.size();
  if (!quad_init.empty() && quad_init.size() != m)
    throw std::invalid_argument("integrate_with_quadrature: quad_init size mismatch");

  VectorField augmented = [&field, quad, n](double s, std::span<const double> y,
                                            std::span<double> dy) {
    field(s, y.subspan(0, n), dy.subspan(0, n));
    for (std::size_t i = 0; i < quad.size(); ++i)
      dy[n + i] = quad[i](s, y.subspan(0, n));
  };

  std::vector<double> y0aug(y0.begin(), y0.end());
  y0aug.resize(n + m, 0.0);
  for (std::size_t i = 0; i < quad_init.size(); ++i) y0aug[n + i] = quad_init[i];

  return integrate(augmented, y0aug, s_begin, s_end, config, events);
}

}  // namespace horo
