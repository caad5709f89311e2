#pragma once

// Structure groups U(1) and SU(2) as embedded matrix groups, their Lie
// algebras, the exponential map and projection back onto the group.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "pullback/error.hpp"

namespace pullback {

using CMat = Eigen::MatrixXcd;

enum class GroupTag { U1, SU2 };

constexpr int group_dim(GroupTag tag) { return tag == GroupTag::U1 ? 1 : 2; }

inline std::string to_string(GroupTag tag) { return tag == GroupTag::U1 ? "U1" : "SU2"; }

struct GroupElement {
  GroupTag tag = GroupTag::U1;
  CMat entries;
};

/// Lie algebra element: anti-Hermitian (and traceless for SU(2)).
struct AlgebraElement {
  GroupTag tag = GroupTag::U1;
  CMat entries;
};

inline constexpr double kRenormalizeBound = 0.1;

inline GroupElement identity_element(GroupTag tag) {
  const int n = group_dim(tag);
  return {tag, CMat::Identity(n, n)};
}

inline AlgebraElement zero_algebra(GroupTag tag) {
  const int n = group_dim(tag);
  return {tag, CMat::Zero(n, n)};
}

inline void require_same_tag(GroupTag a, GroupTag b) {
  if (a != b) throw Error(ErrorKind::TagMismatch, to_string(a) + " vs " + to_string(b));
}

/// Nearest group element: the polar factor, with the SU(2) determinant phase
/// removed (U(1) reduces to g / |g|).
inline GroupElement renormalize(const GroupElement& g) {
  CMat u;
  if (g.tag == GroupTag::U1) {
    const std::complex<double> z = g.entries(0, 0);
    if (std::abs(z) == 0.0) throw Error(ErrorKind::TooFarFromGroup, "zero is not in U(1)");
    u = CMat::Constant(1, 1, z / std::abs(z));
  } else {
    Eigen::JacobiSVD<CMat> svd(g.entries, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
    const std::complex<double> det = u.determinant();
    u /= std::sqrt(det);
  }
  if ((u - g.entries).norm() > kRenormalizeBound)
    throw Error(ErrorKind::TooFarFromGroup, "distance to the group exceeds 0.1");
  return {g.tag, u};
}

inline GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  require_same_tag(a.tag, b.tag);
  return renormalize({a.tag, a.entries * b.entries});
}

inline GroupElement inverse(const GroupElement& g) { return {g.tag, g.entries.adjoint()}; }

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return multiply(a, b); }

/// Frobenius distance between two elements of the same group.
inline double distance(const GroupElement& a, const GroupElement& b) {
  require_same_tag(a.tag, b.tag);
  return (a.entries - b.entries).norm();
}

inline double unitarity_defect(const GroupElement& g) {
  const int n = group_dim(g.tag);
  double d = (g.entries.adjoint() * g.entries - CMat::Identity(n, n)).norm();
  if (g.tag == GroupTag::SU2) d = std::max(d, std::abs(g.entries.determinant() - 1.0));
  return d;
}

inline double anti_hermitian_defect(const AlgebraElement& x) {
  double d = (x.entries + x.entries.adjoint()).norm();
  if (x.tag == GroupTag::SU2) d = std::max(d, std::abs(x.entries.trace()));
  return d;
}

/// Exact exponential: scalar for U(1); for SU(2) X^2 = -theta^2 I gives
/// exp(X) = cos(theta) I + sin(theta)/theta X.
inline GroupElement exp_alg(const AlgebraElement& x) {
  if (x.tag == GroupTag::U1) return {x.tag, CMat::Constant(1, 1, std::exp(x.entries(0, 0)))};
  const double theta = std::sqrt(0.5 * x.entries.squaredNorm());
  const double sinc = theta < 1e-8 ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
  CMat out = std::cos(theta) * CMat::Identity(2, 2) + sinc * x.entries;
  return {x.tag, out};
}

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_tag(a.tag, b.tag);
  return {a.tag, a.entries + b.entries};
}

inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_tag(a.tag, b.tag);
  return {a.tag, a.entries - b.entries};
}

inline AlgebraElement operator-(const AlgebraElement& a) { return {a.tag, -a.entries}; }

inline AlgebraElement operator*(double s, const AlgebraElement& a) { return {a.tag, s * a.entries}; }

/// g^{-1} X g.
inline AlgebraElement adjoint_inverse(const GroupElement& g, const AlgebraElement& x) {
  require_same_tag(g.tag, x.tag);
  return {x.tag, g.entries.adjoint() * x.entries * g.entries};
}

inline double norm(const AlgebraElement& x) { return x.entries.norm(); }

// Named elements ------------------------------------------------------------

inline GroupElement u1(double phase) {
  return {GroupTag::U1, CMat::Constant(1, 1, std::polar(1.0, phase))};
}

inline AlgebraElement u1_algebra(double coefficient) {
  return {GroupTag::U1, CMat::Constant(1, 1, std::complex<double>(0.0, coefficient))};
}

inline CMat pauli(int axis) {
  const std::complex<double> i(0.0, 1.0);
  CMat s(2, 2);
  switch (axis) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

/// i (a . sigma).
inline AlgebraElement su2_algebra(double ax, double ay, double az) {
  const std::complex<double> i(0.0, 1.0);
  return {GroupTag::SU2, i * (ax * pauli(0) + ay * pauli(1) + az * pauli(2))};
}

/// Unit quaternion (w, x, y, z) as an SU(2) matrix w I + i (x, y, z) . sigma.
inline GroupElement su2_from_quaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  CMat m = (w / n) * CMat::Identity(2, 2) + su2_algebra(x / n, y / n, z / n).entries;
  return {GroupTag::SU2, m};
}

}  // namespace pullback
