#include "elastic/exponents.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace elastic {

namespace {

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

int sign(double x, double scale) {
  if (std::abs(x) <= 1e-12 * std::max(1.0, scale)) return 0;
  return x > 0 ? 1 : -1;
}

void check_cri(double m, double theta) {
  if (!(m >= 1.0 && m < 1.2)) throw ValidationError("p_c needs m in [1, 6/5)");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ValidationError("p_c needs theta in [1/2, 1]");
}

void check_bal(double m, double s, double theta) {
  if (m == 1.5) {
    if (!(s >= 0.0 && s < 0.5)) throw ValidationError("p_bal(3/2,s,theta) needs s in [0, 1/2)");
    if (!(theta >= 0.0 && theta < 0.5)) throw ValidationError("p_bal(3/2,s,theta) needs theta in [0, 1/2)");
    return;
  }
  if (!(m >= 1.2 && m < 1.5)) throw ValidationError("p_bal needs m = 3/2 or m in [6/5, 3/2)");
  if (s != 0.0) throw ValidationError("p_bal(m,0,theta) needs s = 0");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ValidationError("p_bal(m,0,theta) needs theta in [1/2, 1]");
}

void check_regime(ExponentRegime r, double m, double s, double theta) {
  switch (r) {
    case ExponentRegime::cri:
      check_cri(m, theta);
      if (s != 0.0) throw ValidationError("regime cri needs s = 0");
      break;
    case ExponentRegime::bal_3_2_s:
      if (m != 1.5) throw ValidationError("regime bal-3/2-s needs m = 3/2");
      check_bal(m, s, theta);
      break;
    case ExponentRegime::bal_m_0:
      if (m == 1.5) throw ValidationError("regime bal-m-0 needs m in [6/5, 3/2)");
      check_bal(m, s, theta);
      break;
  }
}

double threshold_of(ExponentRegime r, double m, double s, double theta) {
  return r == ExponentRegime::cri ? critical_exponent(m, theta) : balanced_exponent(m, s, theta);
}

}  // namespace

double ExponentTriple::at(int k) const { return p[((k - 1) % 3 + 3) % 3]; }

ExponentTriple make_triple(double p1, double p2, double p3) {
  for (double p : {p1, p2, p3})
    if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("exponents must be > 1");
  return ExponentTriple{{p1, p2, p3}};
}

std::string to_string(ExponentRegime r) {
  switch (r) {
    case ExponentRegime::cri: return "cri";
    case ExponentRegime::bal_3_2_s: return "bal-3/2-s";
    case ExponentRegime::bal_m_0: return "bal-m-0";
  }
  return "";
}

std::string to_string(ExistenceCase c) {
  switch (c) {
    case ExistenceCase::i: return "i";
    case ExistenceCase::ii: return "ii";
    case ExistenceCase::iii: return "iii";
    case ExistenceCase::inadmissible: return "inadmissible";
  }
  return "";
}

ExponentRegime exponent_regime_from_string(const std::string& s) {
  if (s == "cri") return ExponentRegime::cri;
  if (s == "bal-3/2-s") return ExponentRegime::bal_3_2_s;
  if (s == "bal-m-0") return ExponentRegime::bal_m_0;
  throw ValidationError("unknown regime '" + s + "' (expected cri, bal-3/2-s, bal-m-0)");
}

double critical_exponent(double m, double theta) {
  check_cri(m, theta);
  return 1.0 + m * (2.0 * theta + 1.0) / (3.0 - m);
}

double balanced_exponent(double m, double s, double theta) {
  check_bal(m, s, theta);
  if (m == 1.5) return 2.0 + (2.0 + 4.0 * s * (1.0 - theta)) / (5.0 - 6.0 * theta + 2.0 * s);
  return 2.0 + 6.0 * (m - 2.0 + 2.0 * theta) / (2.0 * m * theta - 3.0 * m + 6.0);
}

double alpha(int k, const ExponentTriple& t, double m, double theta) {
  const double p = t.at(k), q = t.at(k + 1);
  return m * (2.0 * theta + (1.0 + 2.0 * theta) * q + p * q) / (2.0 * (p * q - 1.0));
}

double alpha_tilde(int k, const ExponentTriple& t, double m, double theta) {
  const double q = t.at(k + 1), r = t.at(k + 2), P = t.p[0] * t.p[1] * t.p[2];
  return m * (2.0 * theta + (1.0 + 2.0 * theta) * (q + 1.0) * r + P) / (2.0 * (P - 1.0));
}

double alpha_bal(int k, const ExponentTriple& t, double m, double s, double theta) {
  check_bal(m, s, theta);
  const double p = t.at(k), q = t.at(k + 1), den = 2.0 * (p * q - 1.0);
  if (m == 1.5)
    return (9.0 - 12.0 * theta + 4.0 * s * (2.0 - theta) + ((7.0 - 6.0 * theta) + 2.0 * s * (3.0 - 2.0 * theta)) * q -
            ((2.0 - 6.0 * theta) + 2.0 * s) * p * q) /
           den;
  return (4.0 * m * theta + 12.0 * theta - 3.0 + (2.0 * m * theta + 12.0 * theta + 3.0 * m - 6.0) * q -
          (2.0 * m * theta - 3.0 * m + 3.0) * p * q) /
         den;
}

double alpha_tilde_bal(int k, const ExponentTriple& t, double m, double s, double theta) {
  check_bal(m, s, theta);
  const double q = t.at(k + 1), r = t.at(k + 2), P = t.p[0] * t.p[1] * t.p[2], den = 2.0 * (P - 1.0);
  if (m == 1.5)
    return (9.0 - 12.0 * theta + 4.0 * s * (2.0 - theta) +
            ((7.0 - 6.0 * theta) + 2.0 * s * (3.0 - 2.0 * theta)) * (q + 1.0) * r - ((2.0 - 6.0 * theta) + 2.0 * s) * P) /
           den;
  return (4.0 * m * theta + 12.0 * theta - 3.0 + (2.0 * m * theta + 12.0 * theta + 3.0 * m - 6.0) * (q + 1.0) * r -
          (2.0 * m * theta - 3.0 * m + 3.0) * P) /
         den;
}

double loss_first(ExponentRegime r, double p1, double m, double s, double theta) {
  switch (r) {
    case ExponentRegime::cri:
      return (3.0 + 2.0 * m * theta) / (2.0 * m * theta) - (3.0 - m) / (2.0 * m * theta) * p1;
    case ExponentRegime::bal_3_2_s: {
      const double d = (1.0 - theta) * (s + 1.0);
      return 1.0 + (2.0 - 2.0 * theta + s) / d + (6.0 * theta - 5.0 - 2.0 * s) / (4.0 * d) * p1;
    }
    case ExponentRegime::bal_m_0:
      return (m + 3.0) / m - (0.5 + (6.0 - 3.0 * m) / (4.0 * m * theta)) * p1;
  }
  return 0.0;
}

double loss_second(ExponentRegime r, double p1, double p2, double m, double s, double theta) {
  switch (r) {
    case ExponentRegime::cri:
      return (3.0 + 2.0 * m * theta) / (2.0 * m * theta) + (1.0 + 2.0 * theta) / (2.0 * theta) * p2 -
             (3.0 - m) / (2.0 * m * theta) * p1 * p2;
    case ExponentRegime::bal_3_2_s: {
      const double d = (1.0 - theta) * (s + 1.0);
      return 1.0 + (2.0 - 2.0 * theta + s) / d + (1.0 + (3.0 + 2.0 * s - 2.0 * theta) / (4.0 * d)) * p2 +
             (6.0 * theta - 5.0 - 2.0 * s) / (4.0 * d) * p1 * p2;
    }
    case ExponentRegime::bal_m_0: {
      const double c = 0.5 + (6.0 - 3.0 * m) / (4.0 * m * theta);
      return (m + 3.0) / m - ((6.0 - 3.0 * m) / (4.0 * m * theta) - 0.5 - 3.0 / m) * p2 - c * p1 * p2;
    }
  }
  return 0.0;
}

bool Window::contains(double p) const {
  const bool above = lo_open ? p > lo : p >= lo - 1e-12 * lo;
  const bool below = std::isinf(hi) || (hi_open ? p < hi : p <= hi + 1e-12 * hi);
  return above && below;
}

std::string Window::describe() const {
  std::ostringstream os;
  os << (lo_open ? "(" : "[") << lo << ", ";
  if (std::isinf(hi))
    os << "inf)";
  else
    os << hi << (hi_open ? ")" : "]");
  return os.str();
}

GnReport gn_admissible(const ExponentTriple& t, double m, double s) {
  if (!(s >= 0.0)) throw ValidationError("s must be nonnegative");
  if (!(m >= 1.0 && m < 2.0)) throw ValidationError("m must lie in [1, 2)");
  GnReport r;
  const double inf = std::numeric_limits<double>::infinity();
  if (s == 0.0) {
    r.window = {2.0 / m, 3.0, false, false};
    r.rule = "s = 0: p_k in [2/m, 3]";
  } else if (s < 0.5) {
    r.window = {1.0 + std::ceil(s), 1.0 + 2.0 / (1.0 - 2.0 * s), true, false};
    r.rule = "0 < s < 1/2: 1 + ceil(s) < p_k <= 1 + 2/(1-2s)";
  } else if (s <= 1.5) {
    r.window = {1.0 + std::ceil(s), inf, true, true};
    r.rule = "1/2 <= s <= 3/2: 1 + ceil(s) < p_k";
  } else {
    r.window = {1.0 + s, inf, true, true};
    r.rule = "s > 3/2: 1 + s < p_k";
  }
  for (int k = 0; k < 3; ++k) r.inside[k] = r.window.contains(t.p[k]);
  return r;
}

ExponentReport classify_and_g(const ExponentTriple& t, double m, double s, double theta, ExponentRegime regime,
                              double eps1) {
  check_regime(regime, m, s, theta);
  if (!(eps1 > 0.0)) throw ValidationError("eps1 must be positive");
  ExponentReport rep;
  rep.regime = regime;
  rep.m = m;
  rep.s = s;
  rep.theta = theta;
  rep.triple = t;
  const double T = threshold_of(regime, m, s, theta);
  rep.threshold = T;
  rep.p_c = regime == ExponentRegime::cri ? T : std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= 3; ++k) {
    if (regime == ExponentRegime::cri) {
      rep.alpha[k - 1] = alpha(k, t, m, theta);
      rep.alpha_tilde[k - 1] = alpha_tilde(k, t, m, theta);
    } else {
      rep.alpha[k - 1] = alpha_bal(k, t, m, s, theta);
      rep.alpha_tilde[k - 1] = alpha_tilde_bal(k, t, m, s, theta);
    }
  }
  rep.windows = gn_admissible(t, m, s);

  // Rewriting equivalences: alpha < 3/2 exactly when the second loss parameter would be negative,
  // which for the cri regime is the p_c form of the condition.
  for (int k = 1; k <= 3; ++k) {
    const double p = t.at(k), q = t.at(k + 1), r = t.at(k + 2);
    const int sa = sign(rep.alpha[k - 1] - 1.5, 1.5);
    const int sb = regime == ExponentRegime::cri ? sign(T - q * (p + 1.0 - T), T * q * p)
                                         : sign(loss_second(regime, p, q, m, s, theta), q * p);
    rep.checks.push_back({"alpha_" + std::to_string(k) + " rewrite", sa == sb || sa == 0 || sb == 0, ""});
    if (regime == ExponentRegime::cri) {
      const int sat = sign(rep.alpha_tilde[k - 1] - 1.5, 1.5);
      const int sbt = sign(T - r * (q * (p + 1.0 - T) + 1.0 - T), T * r * q * p);
      rep.checks.push_back({"alpha_tilde_" + std::to_string(k) + " rewrite", sat == sbt || sat == 0 || sbt == 0, ""});
    }
  }

  std::array<bool, 3> below{}, at{};
  int count = 0;
  for (int k = 0; k < 3; ++k) {
    at[k] = near(t.p[k], T);
    below[k] = t.p[k] < T || at[k];
    count += below[k];
  }
  auto rotate = [&](int k1) { rep.rotation = {k1, k1 % 3 + 1, (k1 + 1) % 3 + 1}; };
  bool boundary_alpha = false;
  if (count == 0) {
    rep.ecase = ExistenceCase::i;
  } else if (count == 1) {
    int k1 = below[0] ? 1 : (below[1] ? 2 : 3);
    rotate(k1);
    const double a = rep.alpha[k1 - 1];
    boundary_alpha = near(a, 1.5);
    if (a < 1.5 && !boundary_alpha) {
      rep.ecase = ExistenceCase::ii;
      rep.g[k1 - 1] = at[k1 - 1] ? eps1 : loss_first(regime, t.at(k1), m, s, theta);
    } else {
      rep.ecase = ExistenceCase::inadmissible;
    }
  } else if (count == 2) {
    int k3 = !below[0] ? 1 : (!below[1] ? 2 : 3);
    int k1 = k3 % 3 + 1;
    rotate(k1);
    const int k2 = rep.rotation[1];
    const double a = rep.alpha_tilde[k1 - 1];
    boundary_alpha = near(a, 1.5);
    if (a < 1.5 && !boundary_alpha) {
      rep.ecase = ExistenceCase::iii;
      rep.g[k1 - 1] = at[k1 - 1] ? eps1 : loss_first(regime, t.at(k1), m, s, theta);
      rep.g[k2 - 1] = at[k2 - 1] ? eps1 : loss_second(regime, t.at(k1), t.at(k2), m, s, theta);
    } else {
      rep.ecase = ExistenceCase::inadmissible;
    }
  } else {
    rep.ecase = ExistenceCase::inadmissible;
  }
  for (int k = 0; k < 3; ++k)
    if (rep.g[k] < 0.0) rep.checks.push_back({"g_" + std::to_string(k + 1) + " >= 0", false, "negative loss"});

  if (rep.ecase != ExistenceCase::inadmissible)
    rep.status = "inside proven global-existence region";
  else if (boundary_alpha && regime == ExponentRegime::cri && m == 1.0 && theta == 0.5)
    rep.status = "conjectured-critical";
  else
    rep.status = "outside proven global-existence region";
  return rep;
}

nlohmann::json to_json(const ExponentReport& r) {
  nlohmann::json j;
  j["inputs"] = {{"p", r.triple.p}, {"m", r.m}, {"s", r.s}, {"theta", r.theta}, {"regime", to_string(r.regime)}};
  j["threshold"] = r.threshold;
  j["p_c"] = std::isnan(r.p_c) ? nlohmann::json(nullptr) : nlohmann::json(r.p_c);
  j["alpha"] = r.alpha;
  j["alpha_tilde"] = r.alpha_tilde;
  j["case"] = to_string(r.ecase);
  j["rotation"] = r.rotation;
  j["g"] = r.g;
  j["status"] = r.status;
  j["windows"] = {{"window", r.windows.window.describe()}, {"rule", r.windows.rule}, {"inside", r.windows.inside}};
  j["checks"] = nlohmann::json::array();
  for (const Check& c : r.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return j;
}

GnParameters pick_gn_parameters(double p, double s) {
  if (!(p > 1.0)) throw ValidationError("p_k must be > 1");
  if (!(s >= 0.0)) throw ValidationError("s must be nonnegative");
  GnParameters g;
  g.q1 = 3.0 * (p - 1.0);
  g.q2 = 6.0;
  g.r1 = 6.0;
  g.r2 = 3.0;
  g.r3 = 3.0 * (p - 1.0);
  g.r4 = 6.0 * (p - 1.0) / (3.0 * (p - 1.0) - 2.0);
  g.r5 = 3.0 * (p - 1.0);
  g.r6 = 6.0;
  const double c = 3.0 / (s + 1.0), lo_s = s / (s + 1.0);
  auto range = [&](const std::string& name, double beta, double lo, double hi) {
    const double tol = 1e-12;
    const bool ok = std::isfinite(beta) && beta >= lo - tol && beta <= hi + tol;
    std::ostringstream os;
    os << name << " = " << beta << " must lie in [" << lo << ", " << hi << "]";
    g.checks.push_back({name, ok, os.str()});
    if (!ok && g.ok) {
      g.ok = false;
      g.failure = os.str();
    }
  };
  auto identity = [&](const std::string& name, double lhs, double rhs) {
    const bool ok = std::isfinite(lhs) && std::abs(lhs - rhs) <= 1e-12;
    std::ostringstream os;
    os << name << ": " << lhs << " != " << rhs;
    g.checks.push_back({name, ok, ok ? "" : os.str()});
    if (!ok && g.ok) {
      g.ok = false;
      g.failure = os.str();
    }
  };
  // 1/r4 is the quantity that enters the constraints; it vanishes at p = 5/3.
  const double inv_r4 = (3.0 * (p - 1.0) - 2.0) / (6.0 * (p - 1.0));
  range("beta(q1)", c * (0.5 - 1.0 / g.q1), 0.0, 1.0);
  range("beta(q2)", c * (0.5 - 1.0 / g.q2 + s / 3.0), lo_s, 1.0);
  identity("(p-1)/q1 + 1/q2 = 1/2", (p - 1.0) / g.q1 + 1.0 / g.q2, 0.5);
  range("beta(r1)", c * (0.5 - 1.0 / g.r1 + s / 3.0), lo_s, 1.0);
  range("beta(r2)", c * (0.5 - 1.0 / (g.r2 * (p - 1.0))), 0.0, 1.0);
  identity("1/r1 + 1/r2 = 1/2", 1.0 / g.r1 + 1.0 / g.r2, 0.5);
  range("beta(r3)", c * (0.5 - 1.0 / g.r3), 0.0, 1.0);
  range("beta(r5)", c * (0.5 - 1.0 / g.r5), 0.0, 1.0);
  range("beta(r6)", c * (0.5 - 1.0 / g.r6 + s / 3.0), lo_s, 1.0);
  range("1/r4", inv_r4, 0.0, 0.5);
  identity("1/r3 + 1/r4 = 1/2", 1.0 / g.r3 + inv_r4, 0.5);
  identity("1/r4 = (p-2)/r5 + 1/r6", inv_r4, (p - 2.0) / g.r5 + 1.0 / g.r6);
  return g;
}

}  // namespace elastic
