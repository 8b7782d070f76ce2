#include "elastic/decay_lab.hpp"

#include <algorithm>

namespace elastic {

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::higher_energy_D22: return "higher-energy-D22";
    case Theorem::homogeneous: return "homogeneous";
    case Theorem::additional_decay_D2m: return "additional-decay-D2m";
    case Theorem::D21: return "D21";
    case Theorem::Dm1: return "Dm1";
  }
  return "";
}

const char* to_string(Quantity q) { return q == Quantity::solution_L2 ? "solution-L2" : "energy"; }

Theorem theorem_from_string(const std::string& s) {
  for (Theorem t : {Theorem::higher_energy_D22, Theorem::homogeneous, Theorem::additional_decay_D2m, Theorem::D21,
                    Theorem::Dm1})
    if (s == to_string(t)) return t;
  throw ValidationError("theorem must be one of higher-energy-D22, homogeneous, additional-decay-D2m, D21, Dm1 (got '" +
                        s + "')");
}

Quantity quantity_from_string(const std::string& s) {
  if (s == "solution-L2") return Quantity::solution_L2;
  if (s == "energy") return Quantity::energy;
  throw ValidationError("quantity must be solution-L2 or energy (got '" + s + "')");
}

double rho_bound(double m, double s, double theta, bool solution) {
  const double num = solution ? 6.0 - 5.0 * m : 6.0 - 3.0 * m + 2.0 * s * m;
  const double first = (num + 2.0 * m * (1.0 - 2.0 * theta)) / (4.0 * m * (1.0 - theta));
  const double second = theta > 0.0 ? num / (4.0 * m * theta) : INFINITY;
  return std::min(first, second);
}

DecayPrediction predicted_exponent(const EstimateKind& k, const ModelParams& p, double slack) {
  const double m = k.m, s = k.s, th = p.theta, mx = p.max_rate();
  if (!(s >= 0.0)) throw ValidationError("s must be nonnegative");
  if (!(m >= 1.0 && m < 2.0) && k.theorem != Theorem::higher_energy_D22 && k.theorem != Theorem::homogeneous &&
      k.theorem != Theorem::D21)
    throw ValidationError("m must lie in [1,2)");
  if (!(slack > 0.0)) throw ValidationError("epsilon_slack must be positive");
  const bool sol = k.quantity == Quantity::solution_L2;
  DecayPrediction d;
  auto growth = [&](double e) {
    d.exponent = e;
    d.sharp = false;
    d.epsilon_slack = 0.0;
    return d;
  };
  auto rho = [&](double bound) {
    d.sharp = false;
    d.epsilon_slack = slack;
    return bound - slack;
  };
  switch (k.theorem) {
    case Theorem::higher_energy_D22:
      if (sol) throw ValidationError("higher-energy-D22 estimates the energy only");
      d.exponent = -s / (2.0 * mx);
      return d;
    case Theorem::homogeneous:
      if (sol) throw ValidationError("homogeneous estimates the energy only");
      d.exponent = 0.0;
      return d;
    case Theorem::additional_decay_D2m:
      if (sol) {
        if (!(m < 1.2)) throw ValidationError("solution-L2 needs m < 6/5");
        d.exponent = -(6.0 - 5.0 * m) / (4.0 * m * mx);
      } else {
        d.exponent = -(3.0 * (2.0 - m) + 2.0 * m * s) / (4.0 * m * mx);
      }
      return d;
    case Theorem::D21:
      if (sol) return growth(1.0);
      d.exponent = -s / (2.0 * mx);
      return d;
    case Theorem::Dm1:
      if (th < 0.5) {
        if (sol) {
          if (m < 1.2) {
            d.exponent = -rho(rho_bound(m, 0.0, th, true));
          } else {
            d.exponent = 1.0 - rho(rho_bound(m, 0.0, th, false));
          }
        } else {
          d.exponent = -rho(rho_bound(m, s, th, false));
        }
        return d;
      }
      if (sol) {
        if (m < 1.2) {
          d.exponent = -(6.0 - 5.0 * m) / (4.0 * m * th);
          return d;
        }
        return growth(1.0 - (6.0 - 3.0 * m) / (4.0 * m * th));
      }
      d.exponent = -(6.0 - 3.0 * m + 2.0 * s * m) / (4.0 * m * th);
      return d;
  }
  return d;
}

std::pair<DataProfile, DataProfile> concentrated_profiles(double m, double width, Vec3 direction) {
  if (!(m >= 1.0 && m < 2.0)) throw ValidationError("m must lie in [1,2)");
  const double q = 3.0 * (m - 1.0) / m;
  DataProfile u0 = gaussian_profile(1.0, width, direction);
  DataProfile u1 = u0;
  u0.riesz_order = 1.0 + q;
  u1.riesz_order = q;
  validate(u0);
  validate(u1);
  return {u0, u1};
}

NormSpec norm_for(const EstimateKind& k) {
  if (k.quantity == Quantity::solution_L2) return {NormKind::L2, 0.0};
  return {NormKind::energy, k.s};
}

QuadratureGrid decay_grid(const DataProfile& u0, const DataProfile& u1) {
  double R = 0.0;
  for (const DataProfile* d : {&u0, &u1})
    if (!d->zero) R = std::max(R, profile_support_radius(*d));
  if (R == 0.0) R = 1.0;
  return graded_grid(R, 1e-8 * R, 48, 16);
}

SlopeFit fit_power_law(const std::vector<double>& t, const std::vector<double>& values) {
  SlopeFit f;
  f.t = t;
  f.norm = values;
  f.samples = static_cast<int>(t.size());
  if (t.empty()) throw ValidationError("no samples to fit");
  f.t_min = t.front();
  f.t_max = t.back();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw NumericalError("norm vanished or is non-finite at t=" + std::to_string(t[i]) + "; fit rejected");
    x.push_back(std::log1p(t[i]));
    y.push_back(std::log(values[i]));
  }
  LinearFit lf = least_squares(x, y);
  f.slope = lf.slope;
  f.r2 = lf.r2;
  f.warning = lf.r2 < 0.99;
  return f;
}

SlopeFit measure_decay(const EstimateKind& k, const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                       double t_min, double t_max, int samples, const QuadratureGrid& g) {
  if (!(t_min > 0.0) || !(t_max >= 10.0 * t_min)) throw ValidationError("fit window needs t_max >= 10 t_min > 0");
  if (samples < 20) throw ValidationError("fit needs at least 20 samples");
  if (u0.zero && u1.zero) throw ValidationError("zero data: norm identically 0, fit rejected");
  std::vector<double> t = geomspace(t_min, t_max, samples);
  std::vector<double> v = norm_series(p, u0, u1, t, norm_for(k), g);
  return fit_power_law(t, v);
}

SlopeFit measure_decay(const EstimateKind& k, const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                       double t_min, double t_max, int samples) {
  return measure_decay(k, p, u0, u1, t_min, t_max, samples, decay_grid(u0, u1));
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::too_slow: return "too-slow";
    case Verdict::faster_than_predicted: return "faster-than-predicted";
    case Verdict::harness_bug: return "harness-bug";
  }
  return "";
}

Verdict compare(const DecayPrediction& pred, const SlopeFit& fit, double tol) {
  if (fit.slope > pred.exponent + tol) return Verdict::too_slow;
  if (fit.slope < pred.exponent - tol) return pred.sharp ? Verdict::harness_bug : Verdict::faster_than_predicted;
  return Verdict::consistent;
}

Verdict compare(const EstimateKind& k, const ModelParams& p, const SlopeFit& fit, double tol) {
  return compare(predicted_exponent(k, p), fit, tol);
}

}  // namespace elastic
