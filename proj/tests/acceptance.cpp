#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "elastic/diffusion.hpp"
#include "elastic/exponents.hpp"
#include "elastic/semilinear.hpp"

using namespace elastic;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

int sgn(double x) { return (x > 0) - (x < 0); }

ModeState random_mode(std::mt19937_64& rng, double r) {
  std::normal_distribution<double> n;
  Vec3 e{n(rng), n(rng), n(rng)};
  const double l = norm(e);
  ModeState s;
  s.xi = {r * e[0] / l, r * e[1] / l, r * e[2] / l};
  for (int k = 0; k < 3; ++k) {
    s.u_hat[k] = cplx(n(rng), n(rng));
    s.ut_hat[k] = cplx(n(rng), n(rng));
  }
  return s;
}

void oracle_identities(Outcome& o) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double trace = 0.0, prod = 0.0, charpoly = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double th = u(rng), a2 = 0.05 + 2.0 * u(rng), b2 = a2 + 0.05 + 2.0 * u(rng);
    const double r = std::pow(10.0, -3.0 + 6.0 * u(rng));
    const ModelParams p = make_params(a2, b2, th);
    double sre = 0.0;
    for (const cplx& z : exact_roots6(p, r)) sre += z.real();
    trace = std::max(trace, std::abs(sre - 3.0 * std::pow(r, 2.0 * th)) / (3.0 * std::pow(r, 2.0 * th)));
    for (double y2 : {a2, b2}) {
      const ModeRoots m = exact_mode_roots(p, y2, r);
      prod = std::max(prod, std::abs(m.mu_plus * m.mu_minus - y2 * r * r) / (y2 * r * r));
    }
  }
  std::uniform_real_distribution<double> l(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double a2 = 0.05 + 2.0 * u(rng), b2 = a2 + 0.05 + 2.0 * u(rng);
    const SymbolMatrices s = build_symbol(make_params(a2, b2, 0.5), {0.0, 0.0, 1.0}, 1.0);
    const cplx lam(l(rng), l(rng));
    const cplx lhs = (s.generator - lam * CMat6::Identity()).determinant();
    const cplx qa = lam * lam - cplx(0, 1) * lam - a2, qb = lam * lam - cplx(0, 1) * lam - b2;
    const cplx rhs = qa * qa * qb;
    charpoly = std::max(charpoly, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  o.pass = trace <= 1e-12 && prod <= 1e-12 && charpoly <= 1e-10;
  o.detail << "trace " << trace << ", product " << prod << ", characteristic " << charpoly;
}

void asymptotic_orders(Outcome& o) {
  for (double th : {0.0, 0.1, 0.25, 0.75, 0.9, 1.0}) {
    const ModelParams p = make_params(1.0, 4.0, th);
    for (Zone z : {Zone::interior, Zone::exterior}) {
      const OrderFit f = asymptotic_error_order(p, z, std::nullopt, default_order_samples(p, z));
      const bool inner = z == Zone::interior;
      const bool ok = inner ? f.order >= f.predicted - 0.3 : f.order <= f.predicted + 0.3;
      o.pass = o.pass && ok;
      o.detail << (inner ? "int" : "ext") << "(" << th << ")=" << f.order << "/" << f.predicted << " ";
    }
  }
}

void lyapunov(Outcome& o) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, gron = 0.0;
  for (int k = 0; k < 100; ++k) {
    // the epsilon rule sends epsilon to 0 as theta -> 1/2, so theta is drawn at distance >= 0.05 from 1/2
    const double w = u(rng);
    const ModelParams p = make_params(1.0, 4.0, w < 0.5 ? 0.9 * w : 0.1 + 0.9 * w);
    const double r = p.epsilon * std::pow(1.0 / (p.epsilon * p.epsilon), u(rng));
    const LyapunovReport rep = verify_lyapunov_mid(p, random_mode(rng, r), 50.0, 200);
    const bool ok = rep.max_violation <= 1e-6 * rep.F0 && rep.ET <= rep.gronwall_bound;
    o.pass = o.pass && ok;
    worst = std::max(worst, rep.max_violation / rep.F0);
    gron = std::max(gron, rep.ET / rep.gronwall_bound);
  }
  o.detail << "max (dF/dt + F/c3)/F(0) " << worst << ", max E(T)/(3 e^{-T/c3} E(0)) " << gron;
}

void dissipation(Outcome& o) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ModelParams p = make_params(0.5 + u(rng), 2.0 + u(rng), u(rng));
    const double r = std::pow(10.0, -2.0 + 4.0 * u(rng));
    const ModeState s = random_mode(rng, r);
    double slow = INFINITY;
    for (const cplx& z : exact_roots6(p, r)) slow = std::min(slow, z.real());
    worst = std::max(worst, dissipation_residual(p, s, std::min(10.0, 10.0 / slow)));
  }
  o.pass = worst < 1e-6;
  o.detail << "max relative residual " << worst;
}

void decay_rates(Outcome& o) {
  const auto [u0, u1] = concentrated_profiles(1.0);
  for (double s : {0.0, 1.0})
    for (double th : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double m = 1.0;
      const double expected = -(3.0 * (2.0 - m) + 2.0 * m * s) / (4.0 * m * std::max(1.0 - th, th));
      const EstimateKind k{Theorem::additional_decay_D2m, s, m, Quantity::energy};
      const SlopeFit f = measure_decay(k, make_params(1.0, 4.0, th), u0, u1, 1e2, 1e4, 20);
      const bool ok = std::abs(f.slope - expected) <= 0.05;
      o.pass = o.pass && ok;
      o.detail << "(th=" << th << ",s=" << s << ") " << f.slope << " vs " << expected << "; ";
    }
}

void diffusion_gaps(Outcome& o) {
  const auto [u0, u1] = concentrated_profiles(1.0);
  for (double th : {0.0, 0.25, 0.75}) {
    const double gap = th == 0.0 ? 0.5 : th < 0.5 ? (1.0 - 2.0 * th) / (2.0 * (1.0 - th)) : (2.0 * th - 1.0) / (2.0 * th);
    const ModelParams p = make_params(1.0, 4.0, th);
    const auto [t0, t1] = gap_window(p);
    const GapMeasurement g = gap_decay(p, build_reference(p), u0, u1, 0.0, 1.0, t0, t1);
    const double measured = g.solution.slope - g.difference.slope;
    const bool ok = measured >= gap - 0.1;
    o.pass = o.pass && ok;
    o.detail << "th=" << th << " gap " << measured << " (need >= " << gap - 0.1 << ", window [" << t0 << ", " << t1
             << "]); ";
  }
}

void exponent_calculus(Outcome& o) {
  const bool pc = critical_exponent(1.0, 0.5) == 2.0;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> P(1.01, 4.0), M(1.0, 1.2 - 1e-9), TH(0.5, 1.0);
  int agree = 0, agree_t = 0;
  for (int n = 0; n < 10000; ++n) {
    const ExponentTriple t = make_triple(P(rng), P(rng), P(rng));
    const double m = M(rng), th = TH(rng), c = critical_exponent(m, th);
    const double p = t.at(1), q = t.at(2), r = t.at(3);
    agree += sgn(alpha(1, t, m, th) - 1.5) == sgn(c - q * (p + 1.0 - c));
    agree_t += sgn(alpha_tilde(1, t, m, th) - 1.5) == sgn(c - r * (q * (p + 1.0 - c) + 1.0 - c));
  }
  double cont = 0.0;
  struct Family {
    ExponentRegime r;
    double m, s, th;
  };
  for (Family f : {Family{ExponentRegime::cri, 1.0, 0.0, 0.5}, Family{ExponentRegime::cri, 1.1, 0.0, 0.8},
                   Family{ExponentRegime::bal_3_2_s, 1.5, 0.3, 0.2}, Family{ExponentRegime::bal_m_0, 1.3, 0.0, 0.7}}) {
    const double T = f.r == ExponentRegime::cri ? critical_exponent(f.m, f.th) : balanced_exponent(f.m, f.s, f.th);
    cont = std::max({cont, std::abs(loss_first(f.r, T, f.m, f.s, f.th)), std::abs(loss_second(f.r, T, T, f.m, f.s, f.th))});
  }
  o.pass = pc && agree == 10000 && agree_t == 10000 && cont < 1e-10;
  o.detail << "p_c(1,1/2)=" << critical_exponent(1.0, 0.5) << ", alpha agreement " << agree << "/10000, alpha~ "
           << agree_t << "/10000, max |g| at threshold " << cont;
}

void semilinear_probes(Outcome& o) {
  // (a) linear consistency inside the trust horizon
  {
    RunConfig c = default_run_config();
    c.nonlinear = false;
    c.L = 64.0 * kPi;
    c.T = 25.0;
    c.dt = 0.5;
    DataProfile ring;
    ring.kind = ProfileKind::ring;
    ring.center_frequency = 0.3;
    ring.width = 16.0;
    ring.direction = {0.6, 0.0, 0.8};
    c.u0 = ring;
    ring.direction = {0.0, 1.0, 0.0};
    c.u1 = ring;
    const auto [a, b] = scaled_profiles(c);
    const RunResult r = run(c);
    std::vector<double> times;
    for (const auto& row : r.rows) times.push_back(row.t);
    const QuadratureGrid g = uniform_grid(1.6, 512, 24, 48);
    const auto ru = norm_series(c.params, a, b, times, {NormKind::L2, 0.0}, g);
    const auto rv = norm_series(c.params, a, b, times, {NormKind::dt_L2, 0.0}, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double su = 0.0, sv = 0.0;
      for (int k = 0; k < 3; ++k) {
        su += std::pow(r.rows[i].raw[k][0], 2);
        sv += std::pow(r.rows[i].raw[k][2], 2);
      }
      worst = std::max({worst, std::abs(std::sqrt(su) / ru[i] - 1.0), std::abs(std::sqrt(sv) / rv[i] - 1.0)});
    }
    const bool ok = worst < 1e-6 && c.T <= trust_horizon(c);
    o.pass = o.pass && ok;
    o.detail << "(a) max rel error " << worst << " up to t=" << c.T << " (horizon " << trust_horizon(c) << ")"
             << (ok ? "" : " FAIL") << "; ";
  }
  // (b) Picard contraction at delta = 1e-3
  {
    RunConfig c = default_run_config();
    c.regime = ExponentRegime::cri;
    const PicardResult p = picard_probe(c, 5, 10.0);
    const bool ok = p.contraction && p.ratio < 0.5;
    o.pass = o.pass && ok;
    o.detail << "(b) Picard ratio " << p.ratio << " [" << p.verdict << "]" << (ok ? "" : " FAIL") << "; ";
    std::cout << "  criterion 8b done: ratio " << p.ratio << std::endl;
  }
  // (c) bounded weighted norms over T = 100 for case i and case ii triples
  for (auto triple : {std::array<double, 3>{2.5, 2.5, 2.5}, std::array<double, 3>{1.8, 3.0, 3.0}}) {
    RunConfig c = default_run_config();
    c.triple = make_triple(triple[0], triple[1], triple[2]);
    c.regime = ExponentRegime::cri;
    const RunResult r = run(c);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
      for (std::size_t q = 0; q < r.sup_value[k].size(); ++q)
        worst = std::max(worst, r.sup_value[k][q] / r.ref_value[k][q]);
    const bool ok = r.bounded && r.max_masked_energy == 0.0;
    o.pass = o.pass && ok;
    o.detail << "(c) case " << r.exponent_case << " (" << triple[0] << "," << triple[1] << "," << triple[2]
             << ") g=(" << r.g[0] << "," << r.g[1] << "," << r.g[2] << ") max sup/ref " << worst << " [" << r.verdict
             << "]" << (ok ? "" : " FAIL") << "; ";
    std::cout << "  criterion 8c case " << r.exponent_case << " done: max sup/ref " << worst << std::endl;
  }
}

void gn_parameter_choice(Outcome& o) {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> S(1e-6, 0.5 - 1e-6), U(0.0, 1.0);
  int ok = 0;
  for (int n = 0; n < 1000; ++n) {
    const double s = S(rng);
    const Window w = gn_admissible(make_triple(2.5, 2.5, 2.5), 1.0, s).window;
    const double p = w.lo + (w.hi - w.lo) * (1.0 - U(rng));
    ok += pick_gn_parameters(p, s).ok;
  }
  const GnParameters below = pick_gn_parameters(1.6, 0.1);
  const GnParameters above = pick_gn_parameters(1.0 + 2.0 / (1.0 - 0.5) + 1e-6, 0.25);
  o.pass = ok == 1000 && !below.ok && !above.ok;
  o.detail << ok << "/1000 admissible samples satisfied; outside: p=1.6 -> " << (below.ok ? "accepted" : below.failure)
           << ", p=5+1e-6 -> " << (above.ok ? "accepted" : above.failure);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, oracle_identities}, {2, asymptotic_orders}, {3, lyapunov},          {4, dissipation},      {5, decay_rates},
      {6, diffusion_gaps},    {7, exponent_calculus}, {8, semilinear_probes}, {9, gn_parameter_choice}};
  bool all = true;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::printf("criterion %d %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
