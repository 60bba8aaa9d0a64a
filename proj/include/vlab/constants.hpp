#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/geometry.hpp"

namespace vlab {

enum class Provenance { Solved, Configured };

// One entry of the self-check suite: a defining inequality re-evaluated with
// the solved value substituted back.
struct SelfCheck {
  std::string name;
  double lhs;
  double rhs;
  bool strict;
  bool pass;
};

// Inputs the proofs leave non-constructive (compactness arguments) plus the
// external Sobolev-Poincare constant. Gamma has no default on purpose: it
// must be supplied for certification runs.
struct ConstantsConfig {
  double gamma = 0.0;
  double eps5 = 0.1;
  double eps6 = 0.1;
  double eps7 = 0.1;
  double delta1 = 0.5;   // lower density slack for the cone/cylinder checks
  double delta2 = 0.5;   // upper density slack
  double delta3 = 0.125; // cylinder shell thickness parameter
  double lip_delta = 0.5;  // the graph lemma's density slack
};

struct ConstantsTable {
  int m = 1;
  int n = 2;
  int Q = 1;
  int dimY = 3;
  double q = 2.0;

  double mu = 0.0;           // 1 - m/q
  double lambda_const = 0.0; // 2 omega_m^{-1/q} / mu
  double omega_m = 0.0;      // volume of the unit m-ball

  double eps0 = 0.0, eps1 = 0.0, eps2 = 0.0, eps3 = 0.0, eps4 = 0.0;
  double eps5 = 0.0, eps6 = 0.0, eps7 = 0.0, eps8 = 0.0;
  double lam0 = 0.0, lam1 = 0.0, lam2 = 0.0, lam3 = 0.0, lam3_prime = 0.0;
  double sigma0 = 0.0, tau0 = 0.0;
  double C0 = 0.0, C1 = 0.0;
  double gamma = 0.0;
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
  double lip_delta = 0.5;
  int M = 0;

  std::map<std::string, Provenance> provenance;
  std::vector<SelfCheck> self_checks;

  bool self_check_ok() const;
  nlohmann::json to_json() const;
};

double unit_ball_volume(int m);

struct MuLambda {
  double mu;
  double lambda_const;
};
// mu = 1 - m/q, Lambda = 2 omega_m^{-1/q} mu^{-1}; requires q > m >= 1.
MuLambda mu_lambda(int m, double q);

struct SupportConstants {
  double eps0;
  double eps1;
};
SupportConstants solve_support_constants(int m, double q, int Q);

struct PartitionConstants {
  int M;
  double eps2;
  double C0;
};
PartitionConstants solve_partition_constants(int dimY, int n, int m, double q,
                                             int Q, double gamma);

struct CorollaryConstants {
  double eps3;
  double eps4;
  double C1;
};
CorollaryConstants solve_corollary_constants(const SupportConstants& sup,
                                             const PartitionConstants& part,
                                             int m, double q, int Q);

struct ConeCylinderConstants {
  double lam0;
  double tau0;
  double sigma0;
  double lam1;
};
ConeCylinderConstants solve_cone_cylinder_constants(int m, int Q,
                                                    double delta2,
                                                    double delta3);

struct MainConstants {
  double lam3_prime;
  double eps8;
  double lam3;
};
MainConstants solve_main_constants(const CorollaryConstants& cor, int m,
                                   double q, int Q, double eps7, double lam2);

// Full chain: everything solvable is solved, the rest copied from `config`.
// Construction runs the self-check suite; a failed substitution throws.
ConstantsTable solve_constants(int dimY, int n, int m, double q, int Q,
                               const ConstantsConfig& config);

}  // namespace vlab
