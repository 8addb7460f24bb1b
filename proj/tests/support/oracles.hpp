#pragma once

// Independent reference formulas for the examples, written out term by term
// from the textbook Hamiltonians rather than derived from a metric, plus a
// few numerical helpers that do not share code with the library.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DiskParams {
  double m = 1, I = 1, J = 1, R = 1;
};
struct KnifeParams {
  double m = 1, J = 1, g = 1, alpha = M_PI / 6;
};
struct SnakeParams {
  double m = 1, r = 1, J0 = 0.5, J1 = 0.125;
};
struct SleighParams {
  double M = 1, J = 1, a = 1;
};

// q = (x, y, phi, psi)
inline double disk_H(const DiskParams& s, const Vec&, const Vec& p) {
  return 0.5 * ((p[0] * p[0] + p[1] * p[1]) / s.m + p[2] * p[2] / s.J + p[3] * p[3] / s.I);
}

// q = (x, y, phi)
inline double knife_H(const KnifeParams& s, const Vec& q, const Vec& p) {
  return 0.5 * ((p[0] * p[0] + p[1] * p[1]) / s.m + p[2] * p[2] / s.J) -
         s.m * s.g * q[0] * std::sin(s.alpha);
}

// q = (x, y, theta, psi, phi)
inline double snake_H(const SnakeParams& s, const Vec&, const Vec& p) {
  const double d = p[2] - p[3];
  return (p[0] * p[0] + p[1] * p[1]) / (2 * s.m) + p[3] * p[3] / (2 * s.J0) +
         d * d / (2 * (s.m * s.r * s.r - s.J0)) + p[4] * p[4] / (4 * s.J1);
}

// q = (x, y, theta)
inline double sleigh_H(const SleighParams& s, const Vec& q, const Vec& p) {
  const double M = s.M, J = s.J, a = s.a;
  const double st = std::sin(q[2]), ct = std::cos(q[2]);
  return (M * a * a * st * st + J) / (2 * J * M) * p[0] * p[0] +
         (M * a * a * ct * ct + J) / (2 * J * M) * p[1] * p[1] + p[2] * p[2] / (2 * J) -
         a * a * st * ct / J * p[0] * p[1] + a / J * (st * p[0] - ct * p[1]) * p[2];
}

inline Mat disk_A(const DiskParams& s, const Vec& q) {
  Mat A(2, 4);
  A << 1, 0, 0, -s.R * std::cos(q[2]), 0, 1, 0, -s.R * std::sin(q[2]);
  return A;
}
inline Mat knife_A(const Vec& q) {
  Mat A(1, 3);
  A << std::sin(q[2]), -std::cos(q[2]), 0;
  return A;
}
inline Mat snake_A(const SnakeParams& s, const Vec& q) {
  const double cot = 1.0 / std::tan(q[4]);
  Mat A(2, 5);
  A << 1, 0, s.r * cot * std::cos(q[2]), 0, 0, 0, 1, s.r * cot * std::sin(q[2]), 0, 0;
  return A;
}
inline Mat sleigh_A(const Vec& q) { return knife_A(q); }

// Reduced velocity fields as displayed for the separated examples.
inline Vec disk_reduced(const DiskParams& s, double g_phi, double g_psi, const Vec& q) {
  Vec v(4);
  v << g_psi * s.R / s.I * std::cos(q[2]), g_psi * s.R / s.I * std::sin(q[2]), g_phi / s.J,
      g_psi / s.I;
  return v;
}
inline Vec knife_reduced(const KnifeParams& s, double g_phi, double E, const Vec& q) {
  const double root =
      std::sqrt((E - g_phi * g_phi / (2 * s.J)) + s.m * s.g * std::sin(s.alpha) * q[0]);
  Vec v(3);
  v << std::cos(q[2]) / std::sqrt(s.m / 2) * root, std::sin(q[2]) / std::sqrt(s.m / 2) * root,
      g_phi / s.J;
  return v;
}
inline Vec snake_reduced(const SnakeParams& s, double g_psi, double g_phi, double E, const Vec& q) {
  const double C = std::sqrt(E - g_psi * g_psi / (2 * s.J0) - g_phi * g_phi / (4 * s.J1));
  const double sp = std::sin(q[4]);
  const double gp = std::sqrt((s.m * s.r * s.r - s.J0 * sp * sp) / 2);
  Vec v(5);
  v << -C * s.r * std::cos(q[2]) * std::cos(q[4]) / gp,
      -C * s.r * std::sin(q[2]) * std::cos(q[4]) / gp, C * sp / gp, g_psi / s.J0 - C * sp / gp,
      g_phi / (2 * s.J1);
  return v;
}

// Left-hand side of the sleigh HJ equation with gamma_y eliminated, valid for |theta| < pi/2.
inline double sleigh_hj_lhs(const SleighParams& s, double theta, double gx, double gth) {
  const double M = s.M, J = s.J, a = s.a, K = J + a * a * M;
  const double sec = 1.0 / std::cos(theta);
  return 0.25 * sec *
         (2 * sec / M * gx * gx + 4 * a * std::tan(theta) / K * gx * gth +
          (J + 2 * a * a * M + J * std::cos(2 * theta)) * sec / (K * K) * gth * gth);
}

// Sleigh d(gamma) condition on D x D with gamma_theta = gamma_theta(theta):
// K sec(th) (d gx/d th + tan(th) gx) + a M tan(th) (d gth/d th + tan(th) gth).
inline double sleigh_dgamma_lhs(const SleighParams& s, double theta, double gx, double dgx,
                                double gth, double dgth) {
  const double K = s.J + s.a * s.a * s.M, t = std::tan(theta);
  return K / std::cos(theta) * (dgx + t * gx) + s.a * s.M * t * (dgth + t * gth);
}

// Five-point central derivative of a scalar function of one variable.
inline double diff5(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Five-point Jacobian of a vector map.
inline Mat jacobian5(const std::function<Vec(const Vec&)>& f, const Vec& q, double h = 1e-3) {
  const Vec f0 = f(q);
  Mat J(f0.size(), q.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const auto step = [&](double d) {
      Vec qq = q;
      qq[j] += d;
      return f(qq);
    };
    J.col(j) = (-step(2 * h) + 8 * step(h) - 8 * step(-h) + step(-2 * h)) / (12 * h);
  }
  return J;
}

// Uniform draws from a standard engine, independent of the library sampler.
class Draw {
 public:
  explicit Draw(unsigned seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  Vec vec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle
