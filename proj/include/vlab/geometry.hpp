#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlab/tolerances.hpp"

namespace vlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An m-plane through the origin in R^n, stored as its orthogonal projection
// matrix. Grassmannian identity is therefore norm-zero distance of
// projectors, never basis comparison.
class Plane {
 public:
  Plane() = default;

  // Span of the given vectors. Throws Error("degenerate basis") on rank
  // deficiency.
  static Plane from_basis(const std::vector<Vec>& vectors);

  // Adopts an existing projector after validating symmetry, idempotency and
  // integer trace against `tol.algebraic`.
  static Plane from_projection(const Mat& proj,
                               const Tolerances& tol = default_tolerances());

  // Convenience: the line through the origin in R^2 at angle `theta`.
  static Plane line2d(double theta);

  int n() const { return static_cast<int>(proj_.rows()); }
  int m() const { return m_; }
  const Mat& proj() const { return proj_; }

  Vec project(const Vec& v) const { return proj_ * v; }
  Vec reject(const Vec& v) const { return v - proj_ * v; }

  // Orthonormal basis of the plane (n x m), from the projector's unit
  // eigenvectors. Deterministic for a fixed projector.
  Mat orthonormal_basis() const;
  // Orthonormal basis of the orthogonal complement (n x (n-m)).
  Mat orthonormal_complement() const;

  // Flattened projector (column-major, length n*n); the Y-point used when a
  // tangent map is tracked as a sampled function.
  Vec flatten() const;
  static Plane unflatten(const Vec& y, int n,
                         const Tolerances& tol = default_tolerances());

 private:
  Plane(Mat proj, int m) : proj_(std::move(proj)), m_(m) {}
  Mat proj_;
  int m_ = 0;
};

// Frobenius norm of the projector difference. The operator norm is
// equivalent up to a factor sqrt(m); Frobenius is what every |S-P| in this
// library means.
double plane_distance(const Plane& a, const Plane& b);

enum class RegionKind {
  OpenBall,
  ClosedBall,
  TruncatedCylinder,  // |P(x-a)| < r and |Pperp(x-a)| < s
  ConeComplement,     // |Pperp(x-a)| > sigma*|P(x-a)|
  Annulus,            // inner < |x-a| <= r
  HalfSpace,          // <normal, x-a> > 0
};

struct Region {
  RegionKind kind = RegionKind::OpenBall;
  Vec center;
  double radius = 0.0;    // r
  double height = 0.0;    // cylinder height s
  double inner = 0.0;     // annulus inner radius
  double aperture = 0.0;  // cone-complement sigma
  std::optional<Plane> base;
  Vec normal;

  static Region open_ball(Vec a, double r);
  static Region closed_ball(Vec a, double r);
  static Region cylinder(Plane base, Vec a, double r, double s);
  static Region cone_complement(Plane base, Vec a, double sigma);
  static Region annulus(Vec a, double inner, double outer);
  static Region half_space(Vec a, Vec normal);

  bool contains(const Vec& x) const;
};

}  // namespace vlab
