#pragma once

#include "billiards/confocal.hpp"
#include "billiards/linalg.hpp"
#include "billiards/pell.hpp"
#include "billiards/polynomial.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

// All computations run in Real at the current process precision.
namespace billiards {

// ---- periodicity (rank) tests ----

enum class RankCase { even, even_hyperboloids, odd_ellipsoid };
const char* to_string(RankCase c);

struct RankVerdict {
  RankCase which = RankCase::even;
  bool applicable = false;  // parity and caustic types allow this case
  bool admissible = false;  // n reaches the minimal value of the case
  int rows = 0, cols = 0, rank = 0;
  double smallest = 0;      // smallest singular value over max |coefficient| used
  bool periodic = false;
};

struct RankReport {
  std::vector<RankVerdict> cases;
  bool periodic() const;
};

// Caustics must be distinct and non-degenerate. Throws DomainError when no case applies.
RankReport periodicity_rank_test(const ConfocalFamily& f, const CausticSet& c, int n, double tol = 1e-10);

// Segments along generatrices of the 1-sheeted hyperboloid Q_gamma1 (gamma1 in (a3, a2)).
RankReport double_caustic_test(const ConfocalFamily& f, double gamma1, int n, double tol = 1e-10);

// Taylor coefficients 0..K-1 of sqrt(prod (a_i - x) prod (gamma_j - x)).
std::vector<Real> caustic_series(const ConfocalFamily& f, const CausticSet& c, int K);

// ---- 0-weak determinants ----

enum class WeakVariant { odd_hankel, odd_M, even_N };
const char* to_string(WeakVariant v);

// primary: index into c.gammas of the caustic entering the N matrix (even_N only).
Matrix<Real> weak_matrix(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary = 0);
// Literal layouts for n = 3..7.
Matrix<Real> explicit_weak_matrix(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary = 0);
// Literal layout for 3 <= n <= 7, the general one above that.
Real weak_period_determinant(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary = 0);

// ---- polynomial families ----

// rho = F U^2 - G V^2 with F G = P, vanishing to order n at 0, degree n + s + 1.
// F is the product of (b_i - x) over the listed 1-based positions of the merged
// sequence b_1 < ... < b_{2d-1}.
struct FamilyFit {
  int n = 0, s = 0;
  std::vector<int> F_positions;
  Polynomial<Real> F, G, U, V, rho;
  Polynomial<Real> r;         // rho / x^n
  std::vector<double> alphas; // real roots of r, ascending
  double kernel_residual = 0; // |M v| relative, i.e. smallest singular value / largest
  double next_sigma = 0;      // second smallest, relative
  double zero_residual = 0;   // max_{k<n} |rho_k| / max |rho_k|
};

std::vector<double> merged_b(const ConfocalFamily& f, const CausticSet& c);

// Square coefficient system of the family (n + s - d + 3 unknowns, n equations).
Matrix<Real> family_matrix(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& F_positions);
Real family_determinant(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& F_positions);

// Throws NumericError when the kernel is not one-dimensional within tol.
FamilyFit fit_family(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& F_positions,
                     double tol = 1e-8);

// ---- certificates ----

struct SignCheck {
  double x = 0;
  int expected = 0;
  int observed = 0;
};

struct WeakCertificate {
  int n = 0;
  WeakVariant variant = WeakVariant::odd_hankel;
  int primary = -1;
  std::vector<double> axes;
  CausticSet caustics;
  FamilyFit fit;
  double alpha = 0;
  std::string interval;       // "(-inf,a3)", "(a3,a2)" or "(a2,a1)"
  double lo = 0, hi = 0;      // certified bracket from the sign table
  int quadric_type = -1;
  std::vector<SignCheck> signs;
  bool consistent = false;    // alpha simple, inside [lo, hi], signs as predicted
  std::string note;
};

// Without a variant every admissible one is tried; the smallest kernel residual wins.
WeakCertificate weak_certificate(const ConfocalFamily& f, const CausticSet& c, int n,
                                 std::optional<WeakVariant> v = std::nullopt, int primary = -1, double tol = 1e-8);

std::string certificate_json(const WeakCertificate& cert);

struct WeakPellTriple {
  Polynomial<Real> p, q, r;
  WeakPellReport<Real> report;
};

// p = F U^2 - rho/2, q = U V, r = rho / (2 x^n).
WeakPellTriple build_weak_pell_triple(const WeakCertificate& cert, double tol = 1e-9);
WeakPellTriple build_weak_pell_triple(const FamilyFit& fit, const ConfocalFamily& f, const CausticSet& c,
                                      double tol = 1e-9);

// ---- elliptic coordinates ----

struct EllipticVariant {
  int alpha_type = 0;  // 0 ellipsoid, 1 one-sheeted, 2 two-sheeted
  int eps1 = 0, eps2 = 0;
  std::vector<int> F_positions;
  double lo = 0, hi = 0;     // band or gap that must hold alpha
  double kernel_residual = 1;
  bool admits = false;
  double alpha = 0;
  bool alpha_certified = false;
};

std::vector<int> elliptic_positions(int n, int alpha_type, int eps1, int eps2);

struct EllipticScan {
  std::vector<EllipticVariant> variants;
  bool any() const;
};

EllipticScan elliptic_weak_scan(const ConfocalFamily& f, const CausticSet& c, int n, double tol = 1e-8);

// ---- sweeps ----

// All sign changes of cond along gamma_index in (lo, hi), each bisected to xtol.
// Returns the full caustic vectors.
std::vector<std::vector<double>> sweep_caustic(const std::vector<double>& gammas, int gamma_index, double lo,
                                               double hi, const std::function<double(const std::vector<double>&)>& cond,
                                               int samples = 200, double xtol = 1e-12);

}  // namespace billiards
