#include "vlab/geometry.hpp"

#include <cmath>

namespace vlab {

Plane Plane::from_basis(const std::vector<Vec>& vectors) {
  if (vectors.empty()) throw Error("degenerate basis: no vectors");
  const auto n = vectors.front().size();
  Mat basis(n, static_cast<Eigen::Index>(vectors.size()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    if (vectors[static_cast<size_t>(j)].size() != n)
      throw Error("degenerate basis: mixed dimensions");
    basis.col(j) = vectors[static_cast<size_t>(j)];
  }
  Eigen::ColPivHouseholderQR<Mat> qr(basis);
  qr.setThreshold(1e-10);
  if (qr.rank() < basis.cols()) throw Error("degenerate basis");

  // Orthonormalize, then P = U U^T.
  Eigen::HouseholderQR<Mat> hqr(basis);
  Mat u = hqr.householderQ() * Mat::Identity(n, basis.cols());
  Mat proj = u * u.transpose();
  proj = 0.5 * (proj + proj.transpose());
  return Plane(std::move(proj), static_cast<int>(basis.cols()));
}

Plane Plane::from_projection(const Mat& proj, const Tolerances& tol) {
  if (proj.rows() != proj.cols()) throw Error("projection matrix not square");
  if ((proj - proj.transpose()).norm() > tol.algebraic)
    throw Error("projection matrix not symmetric");
  if ((proj * proj - proj).norm() > tol.algebraic)
    throw Error("projection matrix not idempotent");
  const double tr = proj.trace();
  const int m = static_cast<int>(std::lround(tr));
  if (std::abs(tr - m) > tol.algebraic || m < 0)
    throw Error("projection trace is not an integer");
  return Plane(proj, m);
}

Plane Plane::line2d(double theta) {
  Vec u(2);
  u << std::cos(theta), std::sin(theta);
  return from_basis({u});
}

Mat Plane::orthonormal_basis() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(proj_);
  // Eigenvalues ascending; the plane's directions are the unit eigenvalues.
  return es.eigenvectors().rightCols(m_);
}

Mat Plane::orthonormal_complement() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(proj_);
  return es.eigenvectors().leftCols(n() - m_);
}

Vec Plane::flatten() const {
  return Eigen::Map<const Vec>(proj_.data(), proj_.size());
}

Plane Plane::unflatten(const Vec& y, int n, const Tolerances& tol) {
  if (y.size() != static_cast<Eigen::Index>(n) * n)
    throw Error("flattened plane has wrong length");
  Mat proj = Eigen::Map<const Mat>(y.data(), n, n);
  return from_projection(proj, tol);
}

double plane_distance(const Plane& a, const Plane& b) {
  if (a.n() != b.n() || a.m() != b.m())
    throw Error("plane dimension mismatch");
  return (a.proj() - b.proj()).norm();
}

Region Region::open_ball(Vec a, double r) {
  if (r <= 0) throw Error("ball radius must be positive");
  Region reg;
  reg.kind = RegionKind::OpenBall;
  reg.center = std::move(a);
  reg.radius = r;
  return reg;
}

Region Region::closed_ball(Vec a, double r) {
  Region reg = open_ball(std::move(a), r);
  reg.kind = RegionKind::ClosedBall;
  return reg;
}

Region Region::cylinder(Plane base, Vec a, double r, double s) {
  if (r <= 0 || s <= 0) throw Error("cylinder radius/height must be positive");
  Region reg;
  reg.kind = RegionKind::TruncatedCylinder;
  reg.center = std::move(a);
  reg.radius = r;
  reg.height = s;
  reg.base = std::move(base);
  return reg;
}

Region Region::cone_complement(Plane base, Vec a, double sigma) {
  if (sigma <= 0 || sigma > 1) throw Error("cone aperture must be in (0,1]");
  Region reg;
  reg.kind = RegionKind::ConeComplement;
  reg.center = std::move(a);
  reg.aperture = sigma;
  reg.base = std::move(base);
  return reg;
}

Region Region::annulus(Vec a, double inner, double outer) {
  if (inner < 0 || outer <= inner) throw Error("annulus radii invalid");
  Region reg;
  reg.kind = RegionKind::Annulus;
  reg.center = std::move(a);
  reg.inner = inner;
  reg.radius = outer;
  return reg;
}

Region Region::half_space(Vec a, Vec normal) {
  if (normal.norm() == 0) throw Error("half-space normal must be nonzero");
  Region reg;
  reg.kind = RegionKind::HalfSpace;
  reg.center = std::move(a);
  reg.normal = std::move(normal);
  return reg;
}

bool Region::contains(const Vec& x) const {
  if (x.size() != center.size()) throw Error("region dimension mismatch");
  const Vec d = x - center;
  switch (kind) {
    case RegionKind::OpenBall:
      return d.norm() < radius;
    case RegionKind::ClosedBall:
      return d.norm() <= radius;
    case RegionKind::TruncatedCylinder:
      return base->project(d).norm() < radius &&
             base->reject(d).norm() < height;
    case RegionKind::ConeComplement:
      return base->reject(d).norm() > aperture * base->project(d).norm();
    case RegionKind::Annulus: {
      const double t = d.norm();
      return t > inner && t <= radius;
    }
    case RegionKind::HalfSpace:
      return normal.dot(d) > 0;
  }
  return false;
}

}  // namespace vlab
