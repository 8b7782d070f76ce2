#pragma once

#include "elastic/propagator.hpp"

namespace elastic {

enum class Theorem {
  higher_energy_D22,     // data in H^{s+1} x H^s
  homogeneous,           // data in H^{s+1} dot x H^s dot
  additional_decay_D2m,  // additional H^1_m x L^m regularity
  D21,                   // data in H^{s+1} x H^s, estimate via the phase-space energy
  Dm1                    // additional L^m regularity of both data
};

enum class Quantity { solution_L2, energy };

struct EstimateKind {
  Theorem theorem = Theorem::additional_decay_D2m;
  double s = 0.0;
  double m = 1.0;
  Quantity quantity = Quantity::energy;
};

const char* to_string(Theorem t);
const char* to_string(Quantity q);
Theorem theorem_from_string(const std::string& s);
Quantity quantity_from_string(const std::string& s);

struct DecayPrediction {
  double exponent = 0.0;  // power of (1 + t)
  bool sharp = true;
  double epsilon_slack = 0.0;
};

DecayPrediction predicted_exponent(const EstimateKind& k, const ModelParams& p, double slack = 0.02);

// The two constraints bounding rho_{s+1} (rho_0 when solution is true) for theta < 1/2.
double rho_bound(double m, double s, double theta, bool solution);

struct SlopeFit {
  double t_min = 0.0, t_max = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  int samples = 0;
  bool warning = false;  // r2 < 0.99: transient-dominated window
  std::vector<double> t, norm;
};

// Data realizing the L^m effect: the transforms of |D| u0 and u1 behave like
// |xi|^{-3(m-1)/m} near the origin (flat for m = 1).
std::pair<DataProfile, DataProfile> concentrated_profiles(double m, double width = 1.0,
                                                          Vec3 direction = {0.0, 0.0, 1.0});

NormSpec norm_for(const EstimateKind& k);

// Grid resolving both the data scale and the late-time concentration near the origin.
QuadratureGrid decay_grid(const DataProfile& u0, const DataProfile& u1);

SlopeFit measure_decay(const EstimateKind& k, const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                       double t_min = 1e2, double t_max = 1e4, int samples = 20);
SlopeFit measure_decay(const EstimateKind& k, const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                       double t_min, double t_max, int samples, const QuadratureGrid& g);

// Fit of log(values) against log(1 + t).
SlopeFit fit_power_law(const std::vector<double>& t, const std::vector<double>& values);

enum class Verdict { consistent, too_slow, faster_than_predicted, harness_bug };
const char* to_string(Verdict v);

// consistent when fitted <= predicted + tol; a sharp prediction beaten by more
// than tol is a harness bug, a non-sharp one is informational.
Verdict compare(const DecayPrediction& pred, const SlopeFit& fit, double tol = 0.05);
Verdict compare(const EstimateKind& k, const ModelParams& p, const SlopeFit& fit, double tol = 0.05);

}  // namespace elastic
