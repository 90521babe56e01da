#pragma once

#include "billiards/polynomial.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace billiards {

using Vec = Eigen::VectorXd;

// Ellipsoid sum x_i^2 / a_i = 1 and its confocal pencil
// Q_lambda: sum x_i^2 / (a_i - lambda) = 1. Axes are squared semi-axes.
class ConfocalFamily {
 public:
  explicit ConfocalFamily(std::vector<double> axes);

  int d() const { return static_cast<int>(axes_.size()); }
  const std::vector<double>& axes() const { return axes_; }
  double a(int i) const { return axes_[static_cast<size_t>(i)]; }  // 0-based, descending

  // sum x_i^2 / (a_i - lambda)
  double pencil_value(double lambda, const Vec& x) const;
  // Gradient of the pencil form at x (outward normal of Q_lambda, not normalized).
  Vec pencil_gradient(double lambda, const Vec& x) const;

  // 0 for lambda < a_d, j for lambda in (a_{d-j+1}, a_{d-j}), d above a_1,
  // -1 when lambda coincides with an axis within tol.
  int type_index(double lambda, double tol = 1e-9) const;
  std::string type_name(double lambda, double tol = 1e-9) const;

 private:
  std::vector<double> axes_;
};

struct CausticSet {
  std::vector<double> gammas;  // ascending
  std::vector<int> types;      // type_index per gamma
  bool degenerate = false;
  std::string note;
};

// Merged endpoints b_1 < ... < b_{2d-1} and the reciprocal band system
// c_1 > ... > c_{2d}. Band p (1-based) is [c_{2p}, c_{2p-1}], gap p is
// (c_{2p+1}, c_{2p}).
struct IntervalSystem {
  int d = 0;
  std::vector<double> b;  // empty when built directly from endpoints
  std::vector<double> c;

  static IntervalSystem from_endpoints(std::vector<double> c_desc);

  double band_lo(int p) const { return c[static_cast<size_t>(2 * p - 1)]; }
  double band_hi(int p) const { return c[static_cast<size_t>(2 * p - 2)]; }
  double gap_lo(int p) const { return c[static_cast<size_t>(2 * p)]; }
  double gap_hi(int p) const { return c[static_cast<size_t>(2 * p - 1)]; }
  bool in_bands(double z, double tol = 0.0) const;
  // prod (z - c_j)
  Polynomial<double> T() const;
};

struct JacobiPoint {
  std::vector<double> lambdas;  // ascending
  std::vector<int> signs;       // sign of each Cartesian coordinate
  std::vector<bool> on_axis;    // lambda_j equals some a_k within tolerance
};

struct Line {
  Vec point;
  Vec direction;  // unit
  Line() = default;
  Line(Vec p, Vec v);
};

struct AudinReport {
  bool ok = false;
  std::vector<double> b;
  std::vector<int> positions;  // 1-based position of each gamma_j in b
};

JacobiPoint jacobi_coordinates(const ConfocalFamily& f, const Vec& x, double axis_tol = 1e-9);
Vec cartesian_from_jacobi(const ConfocalFamily& f, const JacobiPoint& j, double tol = 1e-10);

// Degree d-1 polynomial whose roots are the caustic parameters of the line.
Polynomial<double> tangency_polynomial(const ConfocalFamily& f, const Line& line);
double tangency_value(const ConfocalFamily& f, const Line& line, double lambda);

CausticSet caustic_parameters(const ConfocalFamily& f, const Line& line, double axis_tol = 1e-9);
CausticSet make_caustics(const ConfocalFamily& f, std::vector<double> gammas, double axis_tol = 1e-9);

AudinReport audin_check(const ConfocalFamily& f, const CausticSet& c);

IntervalSystem interval_system(const ConfocalFamily& f, const CausticSet& c, bool allow_degenerate = false);

// x_i^2 = prod_j (a_i - lambda_j) / prod_{k != i} (a_i - a_k)
std::vector<double> squared_coordinates(const ConfocalFamily& f, const std::vector<double>& lambdas);

}  // namespace billiards
