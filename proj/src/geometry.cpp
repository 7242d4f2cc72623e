#include "horo/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "horo/grim.hpp"

namespace horo {

namespace {

// Centered 3-point derivatives on non-uniform nodes.
double d1_centered(double fm, double f0, double fp, double h1, double h2) {
  return (-h2 / (h1 * (h1 + h2))) * fm + ((h2 - h1) / (h1 * h2)) * f0 +
         (h1 / (h2 * (h1 + h2))) * fp;
}

double d2_centered(double fm, double f0, double fp, double h1, double h2) {
  return 2.0 * (h2 * fm - (h1 + h2) * f0 + h1 * fp) / (h1 * h2 * (h1 + h2));
}

// One-sided 3-point first derivative at the left node.
double d1_forward(double f0, double f1, double f2, double h1, double h2) {
  return (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * f0 +
         ((h1 + h2) / (h1 * h2)) * f1 - (h1 / (h2 * (h1 + h2))) * f2;
}

}  // namespace

const char* to_string(SymmetryKind k) {
  return k == SymmetryKind::parabolic_cylinder ? "parabolic-cylinder" : "rotational";
}

double hyperbolic_from_euclidean(double z, double H_e, double N_e3) {
  if (!(z > 0.0)) throw std::domain_error("hyperbolic_from_euclidean: z must be > 0");
  return z * H_e + N_e3;
}

double hyperbolic_inner(double z, const std::array<double, 3>& u,
                        const std::array<double, 3>& v) {
  if (!(z > 0.0)) throw std::domain_error("hyperbolic_inner: z must be > 0");
  return (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (z * z);
}

CurvatureSample make_curvature_sample(const UpperHalfSpacePoint& p, double H_e,
                                      const std::array<double, 3>& N_e) {
  double norm = std::sqrt(N_e[0] * N_e[0] + N_e[1] * N_e[1] + N_e[2] * N_e[2]);
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("make_curvature_sample: normal must be unit length");
  CurvatureSample cs;
  cs.point = p;
  cs.mean_curvature_euclidean = H_e;
  cs.unit_normal_euclidean = N_e;
  cs.mean_curvature_hyperbolic = hyperbolic_from_euclidean(p.z, H_e, N_e[2]);
  return cs;
}

VerificationReport shrinker_residual(const GeneratingCurve& curve,
                                     SymmetryKind family) {
  const auto& pts = curve.samples;
  if (pts.size() < 5)
    throw std::invalid_argument("shrinker_residual: need at least 5 samples");

  VerificationReport rep;
  double sum_sq = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    double h1 = pts[i].s - pts[i - 1].s;
    double h2 = pts[i + 1].s - pts[i].s;
    if (!(h1 > 0.0) || !(h2 > 0.0))
      throw std::invalid_argument("shrinker_residual: parameter not increasing");

    double xp = d1_centered(pts[i - 1].x, pts[i].x, pts[i + 1].x, h1, h2);
    double zp = d1_centered(pts[i - 1].z, pts[i].z, pts[i + 1].z, h1, h2);
    double xpp = d2_centered(pts[i - 1].x, pts[i].x, pts[i + 1].x, h1, h2);
    double zpp = d2_centered(pts[i - 1].z, pts[i].z, pts[i + 1].z, h1, h2);

    double speed = std::hypot(xp, zp);
    double kappa = (xp * zpp - zp * xpp) / (speed * speed * speed);
    double n3 = xp / speed;  // third component of the rotated unit tangent

    double H_e;
    if (family == SymmetryKind::parabolic_cylinder) {
      H_e = 0.5 * kappa;
    } else {
      if (!(pts[i].x > 0.0))
        throw std::domain_error("shrinker_residual: rotational sample with x <= 0");
      double sin_theta = zp / speed;
      H_e = 0.5 * (kappa + sin_theta / pts[i].x);
    }

    double H = hyperbolic_from_euclidean(pts[i].z, H_e, n3);
    double residual = H - n3 / pts[i].z;
    rep.max_residual = std::max(rep.max_residual, std::abs(residual));
    sum_sq += residual * residual;
    ++rep.interior_samples;
  }
  rep.rms_residual = std::sqrt(sum_sq / static_cast<double>(rep.interior_samples));
  return rep;
}

VerificationReport verify_curve(const GeneratingCurve& curve) {
  VerificationReport rep = shrinker_residual(curve, curve.symmetry);
  const auto& pts = curve.samples;

  if (curve.family == "grim" && curve.has_theta) {
    double c0 = first_integral({pts.front().z, pts.front().theta});
    double drift = 0.0;
    for (const auto& p : pts)
      drift = std::max(drift, std::abs(first_integral({p.z, p.theta}) - c0));
    rep.conservation_drift = drift;
    rep.conservation_kind = "first-integral";
  } else if (curve.family == "bowl") {
    // Energy identity along the radial profile; the slope is recovered by
    // finite differences, so this drift carries the discretization error.
    std::size_t n = pts.size();
    std::vector<double> zp(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h1 = pts[i].s - pts[i - 1].s;
      double h2 = pts[i + 1].s - pts[i].s;
      zp[i] = d1_centered(pts[i - 1].z, pts[i].z, pts[i + 1].z, h1, h2);
    }
    zp[0] = (pts[0].s == 0.0)
                ? 0.0
                : d1_forward(pts[0].z, pts[1].z, pts[2].z, pts[1].s - pts[0].s,
                             pts[2].s - pts[1].s);
    zp[n - 1] = -d1_forward(pts[n - 1].z, pts[n - 2].z, pts[n - 3].z,
                            pts[n - 1].s - pts[n - 2].s,
                            pts[n - 2].s - pts[n - 3].s);

    auto integrand = [&](std::size_t i) {
      return pts[i].s > 0.0 ? zp[i] * zp[i] / pts[i].s : 0.0;
    };
    auto lhs = [&](std::size_t i, double q) {
      return 0.5 * std::log1p(zp[i] * zp[i]) + q;
    };
    auto height_term = [&](std::size_t i) {
      return -2.0 * (1.0 / pts[i].z + std::log(pts[i].z));
    };

    double q = 0.0, drift = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      q += 0.5 * (integrand(i) + integrand(i - 1)) * (pts[i].s - pts[i - 1].s);
      if (i + 1 == n) break;  // endpoint slope is one-sided, skip it
      double r = (lhs(i, q) - lhs(0, 0.0)) - (height_term(i) - height_term(0));
      drift = std::max(drift, std::abs(r));
    }
    rep.conservation_drift = drift;
    rep.conservation_kind = "energy";
  }
  return rep;
}

}  // namespace horo
