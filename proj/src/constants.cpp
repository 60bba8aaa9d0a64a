#include "vlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace vlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Strict "sufficiently small" choices take 0.99 of the admissible supremum;
// equalities are realized exactly. Keeps every solver deterministic.
constexpr double kStrictFactor = 0.99;

// Largest x in [0, hi] with pred(x) true, for predicates that are true at 0
// and false beyond a threshold. Bisection to 1e-12 absolute.
double largest_satisfying(const std::function<bool(double)>& pred, double hi) {
  if (pred(hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double unit_ball_volume(int m) {
  return std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

MuLambda mu_lambda(int m, double q) {
  if (m < 1) throw Error("mu_lambda requires m >= 1");
  if (q <= m) throw Error("mu_lambda requires q > m");
  const double mu = 1.0 - static_cast<double>(m) / q;
  const double lambda = 2.0 * std::pow(unit_ball_volume(m), -1.0 / q) / mu;
  return {mu, lambda};
}

SupportConstants solve_support_constants(int m, double q, int Q) {
  if (Q < 1) throw Error("solve_support_constants requires Q >= 1");
  const double half_pow = std::pow(2.0, -(m + 1));
  // eps0 (1 + 2^{-(m+1)}/Q) = 2^{-(m+1)}, realized with equality.
  const double eps0 = half_pow / (1.0 + half_pow / Q);
  const MuLambda ml = mu_lambda(m, q);
  const double cap = std::min(1.0 + half_pow / Q, 2.0 / std::sqrt(3.0));
  const double eps1 = std::log(cap) / ml.lambda_const;
  return {eps0, eps1};
}

PartitionConstants solve_partition_constants(int dimY, int n, int m, double q,
                                             int Q, double gamma) {
  if (gamma <= 0) throw Error("Gamma must be positive");
  const double mass_gap = (Q + 0.25) / (Q + 0.5);
  int M = std::max(dimY, n) + 1;
  while (!(mass_gap < 1.0 - 1.0 / M)) ++M;
  const double eps2 =
      kStrictFactor *
      std::min({0.5, 1.0 / gamma,
                std::pow((Q + 1.0) / (Q + 0.5), 1.0 / m) - 1.0});
  const MuLambda ml = mu_lambda(m, q);
  const double C0 = (m == 1) ? 2.0 * Q * gamma
                             : 2.0 * Q * std::pow(gamma, m / ml.mu);
  return {M, eps2, C0};
}

CorollaryConstants solve_corollary_constants(const SupportConstants& sup,
                                             const PartitionConstants& part,
                                             int m, double q, int Q) {
  const MuLambda ml = mu_lambda(m, q);
  const double omega = unit_ball_volume(m);
  const double eps3 = kStrictFactor * std::min(0.125, sup.eps0);
  const double eps4 =
      kStrictFactor *
      std::min({sup.eps1,
                std::log((Q + 0.25) / (Q + eps3)) / ml.lambda_const,
                part.eps2 * std::pow((Q + eps3) * omega, -ml.mu / m)});
  const double C1 = (m > 1) ? part.C0
                            : std::pow((Q + 0.25) * omega, ml.mu) * part.C0;
  return {eps3, eps4, C1};
}

ConeCylinderConstants solve_cone_cylinder_constants(int m, int Q,
                                                    double delta2,
                                                    double delta3) {
  if (delta2 <= 0 || delta2 >= 1) throw Error("delta2 must be in (0,1)");
  if (delta3 <= 0 || delta3 >= 0.25) throw Error("delta3 must be in (0,1/4)");
  const double target = (1.0 + delta2) / 2.0;
  // (1 - lam0^2)^{m/2} = (1+delta2)/2, realized with equality.
  const double lam0 = std::sqrt(1.0 - std::pow(target, 2.0 / m));

  // ((1+tau)^2 - 1)^{m/2} / (1+tau)^m == target. The left side increases
  // from 0 toward 1 on tau > 0; verify monotonicity on a sample grid before
  // trusting the bisection.
  auto phi = [m](double tau) {
    const double a = (1.0 + tau) * (1.0 + tau) - 1.0;
    return std::pow(a, m / 2.0) / std::pow(1.0 + tau, m);
  };
  double prev = phi(1e-9);
  for (int i = 1; i <= 100; ++i) {
    const double cur = phi(10.0 * i / 100.0);
    if (cur < prev - 1e-13) throw Error("tau0 objective is not monotone");
    prev = cur;
  }
  double lo = 0.0, hi = 10.0;
  if (phi(hi) < target) throw Error("tau0 target unreachable on [0,10]");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < target ? lo : hi) = mid;
  }
  const double tau0 = 0.5 * (lo + hi);

  const double ratio = (Q + (1.0 + delta2) / 2.0) / (Q + delta2);
  const double sigma0 =
      kStrictFactor * std::min(1.0 - 2.0 * delta3,
                               std::sqrt(std::pow(ratio, 2.0 / m) - 1.0));
  const double lam1 =
      std::min({lam0, 2.0 / (2.0 + std::sqrt(2.0)),
                2.0 / std::sqrt(1.0 + sigma0 * sigma0)});
  return {lam0, tau0, sigma0, lam1};
}

MainConstants solve_main_constants(const CorollaryConstants& cor, int m,
                                   double q, int Q, double eps7, double lam2) {
  if (eps7 <= 0) throw Error("eps7 must be positive");
  const MuLambda ml = mu_lambda(m, q);
  const double omega = unit_ball_volume(m);
  const double lam3_prime = std::min(lam2, cor.eps4 / (1.0 + cor.eps4));

  const double lam = ml.lambda_const;
  // e^{Lambda x}(Q + x) <= Q + eps3
  const double x1 = largest_satisfying(
      [&](double x) { return std::exp(lam * x) * (Q + x) <= Q + cor.eps3; },
      1.0);
  // e^{Lambda x} <= (Q + 1.5 x)/(Q + x) * 8Q/(8Q - 1)
  const double x2 = largest_satisfying(
      [&](double x) {
        return std::exp(lam * x) * (Q + x) * (8.0 * Q - 1.0) <=
               (Q + 1.5 * x) * 8.0 * Q;
      },
      1.0);
  // e^{Lambda x} <= Q/(Q - 3/8)
  const double x3 = std::log(Q / (Q - 0.375)) / lam;
  // (x/m)^m (Q + 1/2)^mu omega_m^mu <= eps7
  const double x4 =
      m * std::pow(eps7 / std::pow((Q + 0.5) * omega, ml.mu), 1.0 / m);

  const double eps8 =
      kStrictFactor *
      std::min({cor.eps3 / 2.0, cor.eps4 / m, 0.25,
                eps7 * std::pow(lam3_prime, ml.mu) / cor.C1, x1, x2, x3, x4});
  return {lam3_prime, eps8, lam2 * lam3_prime};
}

namespace {

void check(std::vector<SelfCheck>& out, const std::string& name, double lhs,
           double rhs, bool strict) {
  const bool pass = strict ? (lhs < rhs) : (lhs <= rhs + 1e-12);
  out.push_back({name, lhs, rhs, strict, pass});
}

}  // namespace

bool ConstantsTable::self_check_ok() const {
  return std::all_of(self_checks.begin(), self_checks.end(),
                     [](const SelfCheck& c) { return c.pass; });
}

ConstantsTable solve_constants(int dimY, int n, int m, double q, int Q,
                               const ConstantsConfig& config) {
  ConstantsTable t;
  t.m = m;
  t.n = n;
  t.Q = Q;
  t.q = q;
  t.dimY = dimY;
  const MuLambda ml = mu_lambda(m, q);
  t.mu = ml.mu;
  t.lambda_const = ml.lambda_const;
  t.omega_m = unit_ball_volume(m);

  const SupportConstants sup = solve_support_constants(m, q, Q);
  t.eps0 = sup.eps0;
  t.eps1 = sup.eps1;

  const PartitionConstants part =
      solve_partition_constants(dimY, n, m, q, Q, config.gamma);
  t.M = part.M;
  t.eps2 = part.eps2;
  t.C0 = part.C0;
  t.gamma = config.gamma;

  const CorollaryConstants cor = solve_corollary_constants(sup, part, m, q, Q);
  t.eps3 = cor.eps3;
  t.eps4 = cor.eps4;
  t.C1 = cor.C1;

  const ConeCylinderConstants cone =
      solve_cone_cylinder_constants(m, Q, config.delta2, config.delta3);
  t.lam0 = cone.lam0;
  t.tau0 = cone.tau0;
  t.sigma0 = cone.sigma0;
  t.lam1 = cone.lam1;
  t.delta1 = config.delta1;
  t.delta2 = config.delta2;
  t.delta3 = config.delta3;
  t.lip_delta = config.lip_delta;

  // lam2 comes from the cylinder lemma instantiated at the graph lemma's
  // slacks delta2 = (1 - delta)/2 and delta3 = 1/8.
  const ConeCylinderConstants lip = solve_cone_cylinder_constants(
      m, Q, (1.0 - config.lip_delta) / 2.0, 0.125);
  t.lam2 = lip.lam1;

  t.eps5 = config.eps5;
  t.eps6 = config.eps6;
  t.eps7 = config.eps7;

  const MainConstants main_c =
      solve_main_constants(cor, m, q, Q, config.eps7, t.lam2);
  t.lam3_prime = main_c.lam3_prime;
  t.eps8 = main_c.eps8;
  t.lam3 = main_c.lam3;

  for (const char* name : {"mu", "lambda", "eps0", "eps1", "eps2", "eps3",
                           "eps4", "eps8", "lam0", "lam1", "lam2", "lam3",
                           "sigma0", "tau0", "C0", "C1", "M"})
    t.provenance[name] = Provenance::Solved;
  for (const char* name : {"gamma", "eps5", "eps6", "eps7", "delta1", "delta2",
                           "delta3"})
    t.provenance[name] = Provenance::Configured;

  // Substitute every solved value back into its defining inequality.
  auto& sc = t.self_checks;
  check(sc, "eps0 (1 + 2^-(m+1)/Q) <= 2^-(m+1)",
        t.eps0 * (1.0 + std::pow(2.0, -(m + 1)) / Q), std::pow(2.0, -(m + 1)),
        false);
  check(sc, "exp(Lambda eps1) <= min(1 + 2^-(m+1)/Q, 2/sqrt(3))",
        std::exp(t.lambda_const * t.eps1),
        std::min(1.0 + std::pow(2.0, -(m + 1)) / Q, 2.0 / std::sqrt(3.0)),
        false);
  check(sc, "(Q+1/4)/(Q+1/2) < 1 - 1/M", (Q + 0.25) / (Q + 0.5),
        1.0 - 1.0 / t.M, true);
  check(sc, "(Q+1/2)/(Q+1) < (1+eps2)^-m", (Q + 0.5) / (Q + 1.0),
        std::pow(1.0 + t.eps2, -m), true);
  check(sc, "eps2 < 1/Gamma", t.eps2, 1.0 / t.gamma, true);
  check(sc, "eps2 < 1/2", t.eps2, 0.5, true);
  check(sc, "eps3 < min(1/8, eps0)", t.eps3, std::min(0.125, t.eps0), true);
  check(sc, "exp(Lambda eps4)(Q+eps3) <= Q+1/4",
        std::exp(t.lambda_const * t.eps4) * (Q + t.eps3), Q + 0.25, false);
  check(sc, "eps4 < eps1", t.eps4, t.eps1, true);
  check(sc, "eps4 ((Q+eps3) omega)^(mu/m) < eps2",
        t.eps4 * std::pow((Q + t.eps3) * t.omega_m, t.mu / m), t.eps2, true);
  check(sc, "(1-lam0^2)^(m/2) >= (1+delta2)/2",
        (1.0 + t.delta2) / 2.0, std::pow(1.0 - t.lam0 * t.lam0, m / 2.0),
        false);
  check(sc, "tau0 equality residual",
        std::abs(std::pow(std::pow(1.0 + t.tau0, 2) - 1.0, m / 2.0) /
                     std::pow(1.0 + t.tau0, m) -
                 (1.0 + t.delta2) / 2.0),
        1e-10, false);
  check(sc, "sigma0 < 1 - 2 delta3", t.sigma0, 1.0 - 2.0 * t.delta3, true);
  check(sc, "(1+sigma0^2)^(m/2) < (Q+(1+delta2)/2)/(Q+delta2)",
        std::pow(1.0 + t.sigma0 * t.sigma0, m / 2.0),
        (Q + (1.0 + t.delta2) / 2.0) / (Q + t.delta2), true);
  check(sc, "C1 eps8 / lam3'^mu <= eps7",
        t.C1 * t.eps8 / std::pow(t.lam3_prime, t.mu), t.eps7, false);
  check(sc, "exp(Lambda eps8) <= (Q+eps3)/(Q+eps8)",
        std::exp(t.lambda_const * t.eps8), (Q + t.eps3) / (Q + t.eps8), false);
  check(sc, "exp(Lambda eps8) <= (Q+1.5eps8)/(Q+eps8) 8Q/(8Q-1)",
        std::exp(t.lambda_const * t.eps8),
        (Q + 1.5 * t.eps8) / (Q + t.eps8) * 8.0 * Q / (8.0 * Q - 1.0), false);
  check(sc, "exp(Lambda eps8) <= Q/(Q-3/8)",
        std::exp(t.lambda_const * t.eps8), Q / (Q - 0.375), false);
  check(sc, "(eps8/m)^m (Q+1/2)^mu omega^mu <= eps7",
        std::pow(t.eps8 / m, m) * std::pow((Q + 0.5) * t.omega_m, t.mu),
        t.eps7, false);
  check(sc, "eps8 <= min(eps3/2, eps4/m, 1/4)", t.eps8,
        std::min({t.eps3 / 2.0, t.eps4 / m, 0.25}), false);

  if (!t.self_check_ok()) {
    std::string bad;
    for (const SelfCheck& c : t.self_checks)
      if (!c.pass) bad += " [" + c.name + "]";
    throw Error("constants self-check failed:" + bad);
  }
  return t;
}

nlohmann::json ConstantsTable::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["n"] = n;
  j["Q"] = Q;
  j["q"] = q;
  j["dimY"] = dimY;
  j["mu"] = mu;
  j["lambda"] = lambda_const;
  j["omega_m"] = omega_m;
  j["eps0"] = eps0; j["eps1"] = eps1; j["eps2"] = eps2; j["eps3"] = eps3;
  j["eps4"] = eps4; j["eps5"] = eps5; j["eps6"] = eps6; j["eps7"] = eps7;
  j["eps8"] = eps8;
  j["lam0"] = lam0; j["lam1"] = lam1; j["lam2"] = lam2; j["lam3"] = lam3;
  j["lam3_prime"] = lam3_prime;
  j["sigma0"] = sigma0;
  j["tau0"] = tau0;
  j["C0"] = C0;
  j["C1"] = C1;
  j["Gamma"] = gamma;
  j["M"] = M;
  j["delta1"] = delta1; j["delta2"] = delta2; j["delta3"] = delta3;
  nlohmann::json prov;
  for (const auto& [name, p] : provenance)
    prov[name] = (p == Provenance::Solved) ? "solved" : "configured";
  j["provenance"] = std::move(prov);
  nlohmann::json checks = nlohmann::json::array();
  for (const SelfCheck& c : self_checks)
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs},
                      {"strict", c.strict}, {"pass", c.pass}});
  j["self_checks"] = std::move(checks);
  return j;
}

}  // namespace vlab
