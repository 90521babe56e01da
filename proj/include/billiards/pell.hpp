#pragma once

#include "billiards/confocal.hpp"
#include "billiards/poly_core.hpp"
#include "billiards/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace billiards {

// A^2 - T B^2 = S^2 with T = prod (z - c_j).
template <class T>
struct PellTriple {
  Polynomial<T> A, B, S;
  int m = 0, g = 0, d = 0;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PellReport {
  double residual = 0;  // max |coeff of A^2 - T B^2 - S^2| / max |coeff of A^2|
  bool residual_ok = false;
  std::vector<Check> checks;
  bool pass = false;
};

template <class T>
PellReport verify_generalized_pell(const PellTriple<T>& t, const IntervalSystem& E, double tol = 1e-8);

struct ExtremalOptions {
  int grid_per_band = 3000;
  int max_iter = 80;
  // Relative jitter applied to the initial reference and the pole starts.
  double perturbation = 0;
  std::uint64_t seed = 1;
};

struct ExtremalSolution {
  PellTriple<double> triple;
  double L = 0;                          // uniform norm of A / (A_0 S) on E
  std::vector<double> alternance;        // ascending
  std::vector<double> extremal_points;   // all points where |A/S| = 1, ascending
  std::vector<int> extremal_signs;       // sign of A/S there
  std::vector<int> extremal_multiplicity;  // 1 at band endpoints, 2 inside
  int g = 0;
  bool restricted = false;  // g <= q
  std::vector<int> pole_gaps;  // gap index p (between bands p and p+1, band 1 rightmost)
};

ExtremalSolution solve_restricted_extremal(const IntervalSystem& E, int m, int q, const ExtremalOptions& opt = {});

// Longest subsequence of alternating signs, taken greedily in ascending order.
std::vector<double> alternating_subsequence(const std::vector<double>& x, const std::vector<int>& sign);

struct AlternanceSets {
  std::vector<double> x_plus, x_minus;  // with multiplicity
  double power_sum_residual = 0;        // max over k < m, relative
  double power_sum_gap = 0;             // |difference| at k = m
};

AlternanceSets alternance_points(const ExtremalSolution& sol);

template <class T>
struct Denominator {
  T L;        // |level|
  int sign;   // sign of the level as produced by the x^+/x^- labelling
  Polynomial<T> H;
};

template <class T>
Denominator<T> reconstruct_denominator(const std::vector<T>& x_plus, const std::vector<T>& x_minus, int m,
                                       double tol = 1e-9);

struct KlnResult {
  std::vector<double> N;
  std::vector<bool> integral;
};

KlnResult kln_numbers(const Polynomial<double>& P, const IntervalSystem& E, int m, double tol = 1e-6,
                      const QuadratureOptions& q = {1 << 5, 1 << 16, 1e-10});

struct AdjointReport {
  std::vector<long> adjoint_winding;  // m^_1 .. m^_{d-1}
  std::vector<long> tau;              // tau_1 .. tau_{d-1}
  std::vector<int> k_type;            // bit alpha = 1 .. d-1
  int adjoint_resonance = 0;
  bool monotone = false;
  bool recursion = false;
};

AdjointReport adjoint_report(const ExtremalSolution& sol, const IntervalSystem& E);

template <class T>
struct WeakPellReport {
  double residual = 0;
  bool coprime_pq = false, coprime_pr = false, coprime_qr = false;
  std::vector<double> alphas;  // real roots of r
  bool pass = false;
};

// p^2 - P q^2 = x^{2n} r^2 with P(x) = prod (a_i - x) prod (gamma_j - x).
template <class T>
WeakPellReport<T> verify_weak_pell(const Polynomial<T>& p, const Polynomial<T>& q, const Polynomial<T>& r,
                                   const ConfocalFamily& f, const CausticSet& c, int n, int s, double tol = 1e-9);

template <class T>
Polynomial<T> caustic_polynomial(const ConfocalFamily& f, const CausticSet& c);

inline bool resonance_weakness_inequality(int r_hat, int s, int d) { return r_hat + s + 2 <= d; }

}  // namespace billiards
