#pragma once

#include "billiards/confocal.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace billiards {

struct QuadratureOptions {
  int start_nodes = 16;
  int max_nodes = 1 << 16;
  double tol = 1e-11;
};

// int_lo^hi g(s) / sqrt((s - lo)(hi - s)) ds via s = mid + half cos(theta) and
// Gauss-Chebyshev nodes, doubling until two estimates agree.
double chebyshev_endpoint_integral(const std::function<double(double)>& g, double lo, double hi,
                                   const QuadratureOptions& opt = {});

struct FrequencyData {
  Polynomial<double> eta;            // monic, degree d-1
  std::vector<double> band_measures; // mu_p for band p = 1..d, band 1 rightmost
  std::vector<double> frequencies;   // f_1 < ... < f_{d-1}
  double mass = 0;                   // sum of mu_p before any check
};

Polynomial<double> gap_normalized_differential(const IntervalSystem& E, const QuadratureOptions& opt = {});
FrequencyData band_measures(const IntervalSystem& E, const QuadratureOptions& opt = {});

struct ResonanceRow {
  int k = 0;
  std::vector<long> winding;
  std::vector<double> residual;
  int r = 0;
  bool near = false;
};

struct ResonanceReport {
  std::vector<ResonanceRow> rows;
  int r = 0;
  std::optional<int> k0;
  std::vector<long> weak_winding;
  std::vector<int> near_candidates;
};

ResonanceReport resonance_scan(const std::vector<double>& frequencies, int d, int kmax, double tol = 1e-8,
                               double near_tol = 1e-4);
inline ResonanceReport resonance_scan(const FrequencyData& fd, int kmax, double tol = 1e-8, double near_tol = 1e-4) {
  return resonance_scan(fd.frequencies, static_cast<int>(fd.band_measures.size()), kmax, tol, near_tol);
}

std::string resonance_csv(const ResonanceReport& r);

// Length of a periodic trajectory with winding numbers m_0..m_{d-1}, where
// m_0 is the period and m_{j-1} counts hits of lambda_j at b_{2j-2}.
double periodic_length(const ConfocalFamily& f, const CausticSet& c, const std::vector<long>& winding,
                       const QuadratureOptions& opt = {});

}  // namespace billiards
