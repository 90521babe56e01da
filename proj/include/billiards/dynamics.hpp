#pragma once

#include "billiards/confocal.hpp"

#include <array>
#include <optional>
#include <vector>

namespace billiards {

class GrazingError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct Ray {
  Vec origin;
  Vec direction;  // unit
  Ray() = default;
  Ray(Vec o, Vec v);
};

struct Segment {
  Vec start;
  Vec direction;
  double length = 0;
  Vec end() const { return start + length * direction; }
  Line line() const { return Line(start, direction); }
};

// Cumulative hit counts of lambda_j at its lower [0] and upper [1] band endpoint.
using TurningCounts = std::vector<std::array<long, 2>>;

struct Trajectory {
  std::vector<double> axes;
  CausticSet caustics;
  std::vector<Segment> segments;
  // turning_counts[s] holds the counts after segments 0..s, including the
  // impact that ends segment s.
  std::vector<TurningCounts> turning_counts;
};

struct Reflection {
  Vec impact;
  Ray reflected;
  double cos_incidence = 0;  // |v . n| at impact
};

struct SimulationOptions {
  double grazing_tol = 1e-10;
  bool allow_degenerate = false;
};

Reflection next_reflection(const ConfocalFamily& f, const Ray& r, double grazing_tol = 1e-10);

Trajectory simulate(const ConfocalFamily& f, const Ray& r, int k, const SimulationOptions& opt = {});

// A boundary ray tangent to the given caustics. Jacobi coordinates of the start
// point are lambda_1 = 0 and lambda_j = b_{2j-2} + frac_j (b_{2j-1} - b_{2j-2});
// the direction points inward. Signs pick the Cartesian octant and the
// orientation along each confocal normal.
Ray ray_from_caustics(const ConfocalFamily& f, const std::vector<double>& gammas, const std::vector<double>& frac,
                      const std::vector<int>& point_signs = {}, const std::vector<int>& direction_signs = {});

enum class PairKind { coincident, intersecting, parallel, skew };
const char* to_string(PairKind k);

struct PairClassification {
  PairKind kind = PairKind::skew;
  std::optional<Vec> point;
  double distance = 0;  // closest approach between the lines
};

PairClassification classify_segment_pair(const Line& l1, const Line& l2, double tol = 1e-9);

enum class ClosureKind { periodic, weak, none };
const char* to_string(ClosureKind k);

struct ClosureCertificate {
  ClosureKind kind = ClosureKind::none;
  int s = -1;
  int n = 0;
  std::vector<double> alphas;
  std::vector<double> residuals;
  int side = 0;        // +1 reflection from inside Q_alpha, -1 from outside
  int type_index = -1; // type of Q_alpha
  std::optional<Vec> point;
  std::vector<int> flips;  // nonempty for the elliptic-coordinate variant
  std::string reason;
};

struct ClosureOptions {
  double line_tol = 1e-7;     // closest-approach distance for "intersecting"
  double angle_tol = 1e-7;    // reflection-law residual, radians
};

ClosureCertificate weak_closure_check(const ConfocalFamily& f, const Trajectory& t, int n, int s, const ClosureOptions& opt = {});

// Same test after applying coordinate sign flips to segment n+1, i.e. closure of
// the trajectory projected to the positive orthant (elliptic coordinates).
ClosureCertificate weak_closure_check_elliptic(const ConfocalFamily& f, const Trajectory& t, int n, const ClosureOptions& opt = {});

double reflection_residual(const Vec& incoming, const Vec& outgoing, const Vec& normal);

}  // namespace billiards
