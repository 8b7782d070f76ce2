#pragma once

#include "elastic/common.hpp"

namespace elastic {

struct ModelParams {
  double a2 = 1.0;
  double b2 = 4.0;
  double theta = 0.5;
  double epsilon = 0.1;

  double a() const { return std::sqrt(a2); }
  double b() const { return std::sqrt(b2); }
  // max{1 - theta, theta}
  double max_rate() const { return theta > 0.5 ? theta : 1.0 - theta; }
};

// Zone cutoff chosen so that each asymptotic regime holds uniformly on its zone.
double default_epsilon(double b2, double theta);

ModelParams make_params(double a2, double b2, double theta);
ModelParams make_params(double a2, double b2, double theta, double epsilon);

// |xi|^p with the convention 0^0 = 1.
inline double rpow(double r, double p) { return p == 0.0 ? 1.0 : std::pow(r, p); }

// Smooth cutoffs in |xi|: chi_int = 1 on [0, eps/2], 0 beyond eps;
// chi_ext = 0 below 1/eps, 1 beyond 2/eps; chi_mid = 1 - chi_int - chi_ext.
struct ZonePartition {
  double epsilon = 0.1;
  double chi_int(double r) const;
  double chi_ext(double r) const;
  double chi_mid(double r) const { return 1.0 - chi_int(r) - chi_ext(r); }
};

// exp(1 - 1/(1 - t^2)) on |t| < 1, zero outside.
double bump(double t);

enum class ProfileKind { gaussian, modulated_gaussian, ring };

struct DataProfile {
  ProfileKind kind = ProfileKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center_frequency = 0.0;
  Vec3 direction{1.0, 0.0, 0.0};
  // Transform is divided by |xi|^riesz_order; 1 gives |D|^{-1} of the profile,
  // which realizes data concentrated at low frequency in the homogeneous space.
  double riesz_order = 0.0;
  bool zero = false;
};

DataProfile zero_profile();
DataProfile gaussian_profile(double amplitude, double width, Vec3 direction);

const char* to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

void validate(const DataProfile& p);

// Scalar transform g(xi) with u^(xi) = g(xi) * direction.
double profile_scalar_fourier(const DataProfile& p, const Vec3& xi);
CVec3 profile_fourier(const DataProfile& p, const Vec3& xi);

// Closed-form homogeneous Sobolev norm ||u||_{H^s dot} of a Gaussian profile
// (including its riesz_order); requires s - riesz_order > -3/2.
double gaussian_analytic_norm(const DataProfile& p, double s);

// Radius beyond which the profile's spectral mass is negligible.
double profile_support_radius(const DataProfile& p);

// Relative squared-norm mass of |xi|^{2s}|g|^2 beyond radius R (upper bound).
double profile_tail_fraction(const DataProfile& p, double s, double R);

}  // namespace elastic
