#include "elastic/model.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

namespace elastic {

double default_epsilon(double b2, double theta) {
  if (theta == 0.5) return 0.1;
  if (theta < 0.5) return std::pow(8.0 * b2, -1.0 / (2.0 - 4.0 * theta));
  return std::pow(8.0 * b2, -1.0 / (4.0 * theta - 2.0));
}

ModelParams make_params(double a2, double b2, double theta) {
  if (!(a2 > 0.0)) throw ValidationError("a2 must be positive");
  if (!(b2 > a2)) throw ValidationError("b2 must exceed a2");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in [0,1]");
  return ModelParams{a2, b2, theta, default_epsilon(b2, theta)};
}

ModelParams make_params(double a2, double b2, double theta, double epsilon) {
  ModelParams p = make_params(a2, b2, theta);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
  if (theta != 0.5 && epsilon > p.epsilon * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "epsilon must not exceed " << p.epsilon << " for theta=" << theta
       << " (zone regimes would not hold uniformly)";
    throw ValidationError(os.str());
  }
  p.epsilon = epsilon;
  return p;
}

double bump(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double ZonePartition::chi_int(double r) const {
  const double h = 0.5 * epsilon;
  if (r <= h) return 1.0;
  if (r >= epsilon) return 0.0;
  return bump((r - h) / h);
}

double ZonePartition::chi_ext(double r) const {
  const double lo = 1.0 / epsilon;
  if (r >= 2.0 * lo) return 1.0;
  if (r <= lo) return 0.0;
  return bump((2.0 * lo - r) / lo);
}

DataProfile zero_profile() {
  DataProfile p;
  p.zero = true;
  p.amplitude = 0.0;
  return p;
}

DataProfile gaussian_profile(double amplitude, double width, Vec3 direction) {
  DataProfile p;
  p.amplitude = amplitude;
  p.width = width;
  p.direction = direction;
  return p;
}

const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::modulated_gaussian: return "modulated-gaussian";
    case ProfileKind::ring: return "ring";
  }
  return "gaussian";
}

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ProfileKind::gaussian;
  if (s == "modulated-gaussian") return ProfileKind::modulated_gaussian;
  if (s == "ring") return ProfileKind::ring;
  throw ValidationError("profile kind must be one of gaussian, modulated-gaussian, ring (got '" + s + "')");
}

void validate(const DataProfile& p) {
  if (p.zero) return;
  if (!(p.width > 0.0)) throw ValidationError("profile width must be positive");
  if (!(p.center_frequency >= 0.0)) throw ValidationError("profile center_frequency must be nonnegative");
  if (std::abs(norm(p.direction) - 1.0) > 1e-12) throw ValidationError("profile direction must be a unit vector");
  if (!(p.riesz_order >= 0.0 && p.riesz_order < 2.5)) throw ValidationError("profile riesz_order must lie in [0, 5/2)");
}

namespace {
double gauss_ft(double amplitude, double w, double r2) {
  return amplitude * std::pow(2.0 * kPi, 1.5) * w * w * w * std::exp(-0.5 * w * w * r2);
}
}  // namespace

double profile_scalar_fourier(const DataProfile& p, const Vec3& xi) {
  if (p.zero) return 0.0;
  const double r = norm(xi);
  double g = 0.0;
  switch (p.kind) {
    case ProfileKind::gaussian:
      g = gauss_ft(p.amplitude, p.width, r * r);
      break;
    case ProfileKind::modulated_gaussian: {
      const double k = p.center_frequency;
      Vec3 m{xi[0] - k * p.direction[0], xi[1] - k * p.direction[1], xi[2] - k * p.direction[2]};
      Vec3 q{xi[0] + k * p.direction[0], xi[1] + k * p.direction[1], xi[2] + k * p.direction[2]};
      g = 0.5 * (gauss_ft(p.amplitude, p.width, dot(m, m)) + gauss_ft(p.amplitude, p.width, dot(q, q)));
      break;
    }
    case ProfileKind::ring: {
      const double d = r - p.center_frequency;
      g = gauss_ft(p.amplitude, p.width, d * d);
      break;
    }
  }
  if (p.riesz_order > 0.0) g = (r > 0.0) ? g / std::pow(r, p.riesz_order) : 0.0;
  return g;
}

CVec3 profile_fourier(const DataProfile& p, const Vec3& xi) {
  const double g = profile_scalar_fourier(p, xi);
  return {cplx(g * p.direction[0]), cplx(g * p.direction[1]), cplx(g * p.direction[2])};
}

double gaussian_analytic_norm(const DataProfile& p, double s) {
  if (p.zero) return 0.0;
  if (p.kind != ProfileKind::gaussian) throw ValidationError("analytic norm is available for the gaussian family only");
  const double e = s - p.riesz_order;
  if (!(e > -1.5)) throw ValidationError("analytic norm needs s - riesz_order > -3/2");
  const double w = p.width;
  const double n2 = 2.0 * kPi * p.amplitude * p.amplitude * std::pow(w, 3.0 - 2.0 * e) * std::tgamma(e + 1.5);
  return std::sqrt(n2);
}

double profile_support_radius(const DataProfile& p) {
  if (p.zero) return 1.0;
  if (p.kind == ProfileKind::gaussian) return 12.0 / p.width;
  return p.center_frequency + 12.0 / p.width;
}

double profile_tail_fraction(const DataProfile& p, double s, double R) {
  if (p.zero) return 0.0;
  const double e = s - p.riesz_order;
  const double w = p.width;
  const double shift = (p.kind == ProfileKind::gaussian) ? 0.0 : p.center_frequency;
  if (R <= shift) return 1.0;
  // Radial density r^{2+2e} exp(-w^2 (r - shift)^2); for r > R it is bounded by
  // (r/(r-shift))^{2+2e} times the centred density, and r/(r-shift) <= R/(R-shift).
  const double x = w * w * (R - shift) * (R - shift);
  const double frac = boost::math::gamma_q(e + 1.5, x);
  const double scale = std::pow(R / (R - shift), std::max(0.0, 2.0 + 2.0 * e));
  return frac * scale;
}

}  // namespace elastic
