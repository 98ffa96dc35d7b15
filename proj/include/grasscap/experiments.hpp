#pragma once

#include <cstdint>
#include <vector>

#include "grasscap/classifier.hpp"
#include "grasscap/ensemble.hpp"
#include "grasscap/estimate.hpp"

namespace grasscap {

enum class SweepMode { ddt_linear, ddt_affine, capacity };

// One grid of Monte Carlo runs. DDT modes fix (n, m, k) and sweep
// (sigma2, r); capacity mode fixes sigma2 and sweeps (rho, M) with
// dimensions from the scaling laws.
struct SweepConfig {
  SweepMode mode = SweepMode::ddt_linear;

  // ddt modes
  Index n = 0;
  Index m = 0;
  Index k = 0;
  std::vector<double> sigma2_grid;
  std::vector<double> r_list;

  // capacity mode
  double nu = 1.0;
  double kappa = 0.5;
  std::vector<double> rho_list;
  std::vector<Index> m_grid;
  double sigma2 = 0.01;

  std::int64_t ensembles_per_point = 100;   // class-set realizations per point
  std::int64_t signals_per_ensemble = 100;  // observations per realization
  std::int64_t l_cap = 100000;              // points demanding more classes are skipped
  std::uint64_t master_seed = 0;
};

// One grid point. `gain` is r in DDT mode and rho in capacity mode.
// Skipped rows (class count above l_cap, or count overflow) carry zero
// trials and the skipped flag.
struct SweepRow {
  double sigma2 = 0.0;
  double gain = 0.0;
  std::int64_t l = 0;
  Index m = 0;
  Index n = 0;
  Index k = 0;
  ErrorEstimate estimate;
  std::uint64_t master_seed = 0;
  bool l_clamped = false;
  bool skipped = false;
};

struct SlopeFit {
  double d_hat = 0.0;
  double std_err = 0.0;
  std::int64_t rows_used = 0;
};

// Uniform true class per trial, ML classification over all classes.
ErrorEstimate estimate_error(const std::vector<SubspaceClass>& classes,
                             const FeatureMatrix& phi, double sigma2,
                             std::int64_t signals, RngStream rng);

// For each (r, sigma2): L = num_classes_for(sigma2, r) (clamped to 2 when
// r = 0, flagged in the row); per ensemble a fresh class set and feature
// matrix; pooled errors/trials across ensembles. Deterministic in
// (config, master_seed) regardless of `threads`.
std::vector<SweepRow> run_ddt_sweep(const SweepConfig& config, int threads = 1);

// For each (rho, M): dims from dims_for, then as run_ddt_sweep at the fixed
// sigma2. Overflowing L is flagged and skipped.
std::vector<SweepRow> run_capacity_sweep(const SweepConfig& config,
                                         int threads = 1);

// OLS of log2(p_hat) against (1/2) log2(1/sigma2); d_hat = -slope. Rows
// with p_hat = 0, p_hat = 1, fewer than 10 errors, or the skipped flag are
// excluded. Throws InsufficientDataError below 3 usable rows.
SlopeFit fit_slope(const std::vector<SweepRow>& rows);

}  // namespace grasscap
