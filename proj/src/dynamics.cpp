#include "billiards/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace billiards {

Ray::Ray(Vec o, Vec v) : origin(std::move(o)), direction(std::move(v)) {
  double n = direction.norm();
  if (!(n > 0)) throw DomainError("ray direction must be nonzero");
  direction /= n;
}

Reflection next_reflection(const ConfocalFamily& f, const Ray& r, double grazing_tol) {
  const int d = f.d();
  const Vec& o = r.origin;
  const Vec& v = r.direction;
  double A = 0, B = 0, C = -1;
  for (int i = 0; i < d; ++i) {
    A += v[i] * v[i] / f.a(i);
    B += 2 * o[i] * v[i] / f.a(i);
    C += o[i] * o[i] / f.a(i);
  }
  if (C > 1e-9) throw DomainError("next_reflection: ray origin outside the ellipsoid");
  double disc = B * B - 4 * A * C;
  if (disc < 0) disc = 0;
  // Stable roots: q = -(B + sign(B) sqrt(disc))/2, roots q/A and C/q.
  double sq = std::sqrt(disc);
  double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  double t1 = q / A;
  double t2 = q != 0 ? C / q : t1;
  double t = std::max(t1, t2);
  if (!(t > 0)) throw GrazingError("next_reflection: no forward intersection");
  Vec x = o + t * v;
  Vec n(d);
  for (int i = 0; i < d; ++i) n[i] = x[i] / f.a(i);
  n.normalize();
  double vn = v.dot(n);
  if (std::abs(vn) < grazing_tol) throw GrazingError("next_reflection: grazing impact");
  Vec w = v - 2 * vn * n;
  w.normalize();
  return {x, Ray(x, w), std::abs(vn)};
}

namespace {

struct Endpoint {
  bool is_axis;
  int axis;      // 0-based axis index when is_axis
  double value;  // b_i
  int coord;     // 0-based Jacobi coordinate that hits it
  int side;      // 0 lower, 1 upper
};

std::vector<Endpoint> endpoint_table(const ConfocalFamily& f, const CausticSet& c) {
  std::vector<Endpoint> e;
  for (int k = 0; k < f.d(); ++k) e.push_back({true, k, f.a(k), 0, 0});
  for (double g : c.gammas) e.push_back({false, -1, g, 0, 0});
  std::sort(e.begin(), e.end(), [](auto& x, auto& y) { return x.value < y.value; });
  for (size_t i = 0; i < e.size(); ++i) {
    int idx = static_cast<int>(i) + 1;  // b_idx
    if (idx % 2 == 1) {
      e[i].coord = (idx + 1) / 2 - 1;
      e[i].side = 1;
    } else {
      e[i].coord = idx / 2;
      e[i].side = 0;
    }
  }
  return e;
}

// Parameter along the line where lambda reaches the endpoint: hyperplane
// crossing for axes, tangency point for caustics.
double event_parameter(const ConfocalFamily& f, const Endpoint& e, const Vec& p, const Vec& v) {
  if (e.is_axis) {
    if (v[e.axis] == 0) return NAN;
    return -p[e.axis] / v[e.axis];
  }
  double jpv = 0, jvv = 0;
  for (int i = 0; i < f.d(); ++i) {
    double w = 1.0 / (f.a(i) - e.value);
    jpv += w * p[i] * v[i];
    jvv += w * v[i] * v[i];
  }
  if (jvv == 0) return NAN;
  return -jpv / jvv;
}

}  // namespace

Trajectory simulate(const ConfocalFamily& f, const Ray& r, int k, const SimulationOptions& opt) {
  if (k < 1) throw DomainError("simulate: k must be positive");
  Trajectory t;
  t.axes = f.axes();
  t.caustics = caustic_parameters(f, Line(r.origin, r.direction));
  if (t.caustics.degenerate && !opt.allow_degenerate) throw DomainError("simulate: degenerate caustics (" + t.caustics.note + ")");
  const auto table = endpoint_table(f, t.caustics);
  TurningCounts counts(static_cast<size_t>(f.d()), {0, 0});
  Ray cur = r;
  for (int s = 0; s < k; ++s) {
    Reflection refl = next_reflection(f, cur, opt.grazing_tol);
    Segment seg;
    seg.start = cur.origin;
    seg.direction = cur.direction;
    seg.length = (refl.impact - cur.origin).norm();
    const double eps = 1e-12 * (1 + seg.length);
    for (const auto& e : table) {
      double tp = event_parameter(f, e, seg.start, seg.direction);
      if (std::isfinite(tp) && tp > eps && tp < seg.length - eps) ++counts[static_cast<size_t>(e.coord)][static_cast<size_t>(e.side)];
    }
    ++counts[0][0];  // lambda_1 = 0 at the impact
    t.segments.push_back(seg);
    t.turning_counts.push_back(counts);
    cur = refl.reflected;
  }
  return t;
}

Ray ray_from_caustics(const ConfocalFamily& f, const std::vector<double>& gammas, const std::vector<double>& frac,
                      const std::vector<int>& point_signs, const std::vector<int>& direction_signs) {
  const int d = f.d();
  CausticSet cs = make_caustics(f, gammas);
  if (static_cast<int>(cs.gammas.size()) != d - 1) throw DomainError("ray_from_caustics: need d-1 caustics");
  if (static_cast<int>(frac.size()) != d - 1) throw DomainError("ray_from_caustics: need d-1 fractions");
  std::vector<double> b = f.axes();
  b.insert(b.end(), cs.gammas.begin(), cs.gammas.end());
  std::sort(b.begin(), b.end());
  b.insert(b.begin(), 0.0);  // b_0
  JacobiPoint jp;
  jp.lambdas.push_back(0.0);
  for (int j = 2; j <= d; ++j) {
    double lo = b[static_cast<size_t>(2 * j - 2)], hi = b[static_cast<size_t>(2 * j - 1)];
    jp.lambdas.push_back(lo + frac[static_cast<size_t>(j - 2)] * (hi - lo));
  }
  jp.signs = point_signs.empty() ? std::vector<int>(static_cast<size_t>(d), 1) : point_signs;
  Vec x = cartesian_from_jacobi(f, jp);
  Vec v = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    double lk = jp.lambdas[static_cast<size_t>(k)];
    double num = 1, den = 1;
    for (double g : cs.gammas) num *= g - lk;
    for (int i = 0; i < d; ++i)
      if (i != k) den *= jp.lambdas[static_cast<size_t>(i)] - lk;
    double w = num / den;
    if (w < -1e-9) throw DomainError("ray_from_caustics: start point lies inside a caustic");
    Vec n(d);
    for (int i = 0; i < d; ++i) n[i] = x[i] / (f.a(i) - lk);
    double nn = n.norm();
    if (nn == 0) continue;
    n /= nn;
    double sgn = k == 0 ? -1.0 : 1.0;  // inward across the boundary
    if (!direction_signs.empty() && k > 0) sgn = direction_signs[static_cast<size_t>(k - 1)];
    v += sgn * std::sqrt(std::max(w, 0.0)) * n;
  }
  return Ray(x, v);
}

const char* to_string(PairKind k) {
  switch (k) {
    case PairKind::coincident: return "coincident";
    case PairKind::intersecting: return "coplanar-intersecting";
    case PairKind::parallel: return "parallel";
    case PairKind::skew: return "skew";
  }
  return "?";
}

const char* to_string(ClosureKind k) {
  switch (k) {
    case ClosureKind::periodic: return "periodic";
    case ClosureKind::weak: return "weak";
    case ClosureKind::none: return "none";
  }
  return "?";
}

PairClassification classify_segment_pair(const Line& l1, const Line& l2, double tol) {
  const Vec& u = l1.direction;
  const Vec& w = l2.direction;
  Vec r = l1.point - l2.point;
  double scale = 1 + std::max(l1.point.norm(), l2.point.norm());
  double b = u.dot(w);
  // Sine from the rejection vector; 1 - b^2 cancels badly near parallel.
  double sinv = (w - b * u).norm();
  double sin2 = sinv * sinv;
  PairClassification out;
  if (sinv < tol) {
    Vec perp = r - r.dot(u) * u;
    out.distance = perp.norm();
    out.kind = out.distance < tol * scale ? PairKind::coincident : PairKind::parallel;
    return out;
  }
  double du = u.dot(r), dw = w.dot(r);
  double s = (b * dw - du) / sin2;
  double t = (dw - b * du) / sin2;
  Vec c1 = l1.point + s * u;
  Vec c2 = l2.point + t * w;
  out.distance = (c1 - c2).norm();
  if (out.distance < tol * scale) {
    out.kind = PairKind::intersecting;
    out.point = 0.5 * (c1 + c2);
  } else {
    out.kind = PairKind::skew;
  }
  return out;
}

double reflection_residual(const Vec& incoming, const Vec& outgoing, const Vec& normal) {
  Vec n = normal.normalized();
  Vec mirrored = (incoming - 2 * incoming.dot(n) * n).normalized();
  // Angle from the chord length; acos is inaccurate near zero.
  double chord = (mirrored - outgoing.normalized()).norm();
  return 2 * std::asin(std::min(1.0, 0.5 * chord));
}

namespace {

// Best confocal quadric through X reflecting d_in into d_out.
void certify_at_point(const ConfocalFamily& f, const Vec& X, const Vec& d_in, const Vec& d_out, ClosureCertificate& cert,
                      double& best) {
  JacobiPoint jp = jacobi_coordinates(f, X);
  for (double lam : jp.lambdas) {
    if (f.type_index(lam, 1e-12) < 0) continue;
    Vec grad = f.pencil_gradient(lam, X);
    if (grad.norm() == 0) continue;
    double res = reflection_residual(d_in, d_out, grad);
    if (res < best) {
      best = res;
      cert.alphas = {lam};
      cert.residuals = {res};
      cert.side = d_in.dot(grad) > 0 ? 1 : -1;
      cert.type_index = f.type_index(lam);
      cert.point = X;
    }
  }
}

ClosureCertificate check_pair(const ConfocalFamily& f, const Trajectory& t, int n, const ClosureOptions& opt, const std::vector<int>& flips) {
  const Segment& first = t.segments[0];
  const Segment& last = t.segments[static_cast<size_t>(n)];
  const int d = f.d();
  Vec flip = Vec::Ones(d);
  for (int i = 0; i < d && !flips.empty(); ++i) flip[i] = flips[static_cast<size_t>(i)];
  Vec mn = flip.cwiseProduct(last.start);
  Vec wn = flip.cwiseProduct(last.direction);
  ClosureCertificate cert;
  cert.n = n;
  cert.s = 0;
  cert.flips = flips;
  auto pc = classify_segment_pair(first.line(), Line(mn, wn), opt.line_tol);
  if (pc.kind == PairKind::coincident) {
    cert.kind = first.direction.dot(wn) > 0 ? ClosureKind::periodic : ClosureKind::none;
    cert.s = -1;
    cert.residuals = {pc.distance};
    if (cert.kind == ClosureKind::none) cert.reason = "lines coincide with opposite orientation";
    return cert;
  }
  if (pc.kind != PairKind::intersecting) {
    cert.reason = std::string("lines are ") + to_string(pc.kind);
    return cert;
  }
  // Reflection law on directions: segment n+1 reflected at X continues as segment 1.
  // X may lie on the extensions of either segment.
  const Vec& X = *pc.point;
  if (n == 1 && flips.empty()) {
    cert.reason = "consecutive segments meet at their impact point";
    return cert;
  }
  double best = INFINITY;
  certify_at_point(f, X, wn, first.direction, cert, best);
  if (best < opt.angle_tol) {
    cert.kind = ClosureKind::weak;
  } else {
    cert.kind = ClosureKind::none;
    cert.reason = "no confocal quadric through the intersection satisfies the reflection law";
  }
  return cert;
}

}  // namespace

ClosureCertificate weak_closure_check(const ConfocalFamily& f, const Trajectory& t, int n, int s, const ClosureOptions& opt) {
  if (n < 1) throw DomainError("weak_closure_check: n must be positive");
  if (static_cast<int>(t.segments.size()) < n + 1) throw DomainError("weak_closure_check: trajectory too short");
  if (s >= 1) throw DomainError("weak_closure_check: s >= 1 is certified through the Pell identity, not geometrically");
  if (s < -1) throw DomainError("weak_closure_check: s must be >= -1");
  const Segment& first = t.segments[0];
  const Segment& last = t.segments[static_cast<size_t>(n)];
  if (s == -1) {
    ClosureCertificate cert;
    cert.n = n;
    cert.s = -1;
    auto pc = classify_segment_pair(first.line(), last.line(), opt.line_tol);
    bool same = pc.kind == PairKind::coincident && first.direction.dot(last.direction) > 0;
    cert.residuals = {pc.distance, (first.direction - last.direction).norm()};
    cert.kind = same ? ClosureKind::periodic : ClosureKind::none;
    if (!same) cert.reason = std::string("segments 1 and n+1 are ") + to_string(pc.kind);
    return cert;
  }
  return check_pair(f, t, n, opt, {});
}

ClosureCertificate weak_closure_check_elliptic(const ConfocalFamily& f, const Trajectory& t, int n, const ClosureOptions& opt) {
  if (static_cast<int>(t.segments.size()) < n + 1) throw DomainError("weak_closure_check_elliptic: trajectory too short");
  const int d = f.d();
  ClosureCertificate best;
  best.n = n;
  best.reason = "no sign pattern gives a closure";
  double best_res = INFINITY;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<int> flips(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) flips[static_cast<size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
    auto c = check_pair(f, t, n, opt, flips);
    if (c.kind == ClosureKind::none) continue;
    double res = c.residuals.empty() ? 0 : c.residuals.front();
    if (c.kind == ClosureKind::periodic) res = -1;  // periodic beats weak
    if (res < best_res) {
      best_res = res;
      best = c;
    }
  }
  return best;
}

}  // namespace billiards
