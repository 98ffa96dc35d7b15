#include "grasscap/experiments.hpp"

#include <cmath>
#include <string>

#include "grasscap/parallel.hpp"

namespace grasscap {

namespace {

// Stream labels for the independent draw purposes inside one ensemble.
constexpr std::uint64_t kClassDraws = 1;
constexpr std::uint64_t kPhiDraw = 2;
constexpr std::uint64_t kTrials = 3;

struct EnsembleCount {
  std::int64_t errors = 0;
  std::int64_t trials = 0;
};

// Error count for one (grid point, ensemble) work item: draw L classes and
// a fresh feature matrix from the item's stream, then run the signal trials.
EnsembleCount run_ensemble(const SweepRow& point, bool affine,
                           std::int64_t signals, RngStream ensemble_rng) {
  std::vector<SubspaceClass> classes;
  classes.reserve(static_cast<std::size_t>(point.l));
  RngStream class_rng = ensemble_rng.derive(kClassDraws);
  for (std::int64_t c = 0; c < point.l; ++c) {
    RngStream rc = class_rng.derive(static_cast<std::uint64_t>(c));
    classes.push_back(affine ? draw_affine_class(point.n, point.k, rc)
                             : draw_linear_class(point.n, point.k, rc));
  }
  const FeatureMatrix phi =
      draw_feature_matrix(point.m, point.n, ensemble_rng.derive(kPhiDraw));
  const ErrorEstimate est = estimate_error(classes, phi, point.sigma2, signals,
                                           ensemble_rng.derive(kTrials));
  return {est.errors, est.trials};
}

void validate_counts(const SweepConfig& config) {
  if (config.ensembles_per_point < 1)
    throw DomainError("sweep: ensembles_per_point must be >= 1");
  if (config.signals_per_ensemble < 1)
    throw DomainError("sweep: signals_per_ensemble must be >= 1");
  if (config.l_cap < 1) throw DomainError("sweep: l_cap must be >= 1");
}

// Pools ensembles_per_point independent realizations of every non-skipped
// row. Work items are (row, ensemble) pairs; each derives its stream from
// (master_seed, grid index, ensemble index), so the merge is order-free.
void fill_rows(std::vector<SweepRow>& rows, const SweepConfig& config,
               bool affine, int threads) {
  const std::int64_t ensembles = config.ensembles_per_point;
  std::vector<std::int64_t> live;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!rows[i].skipped) live.push_back(static_cast<std::int64_t>(i));

  std::vector<EnsembleCount> counts(
      static_cast<std::size_t>(live.size()) *
      static_cast<std::size_t>(ensembles));
  const RngStream root(config.master_seed);
  parallel_for(
      static_cast<std::int64_t>(counts.size()), threads, [&](std::int64_t w) {
        const std::int64_t row_index = live[static_cast<std::size_t>(
            w / ensembles)];
        const std::int64_t e = w % ensembles;
        const SweepRow& point = rows[static_cast<std::size_t>(row_index)];
        counts[static_cast<std::size_t>(w)] = run_ensemble(
            point, affine, config.signals_per_ensemble,
            root.derive(static_cast<std::uint64_t>(row_index))
                .derive(static_cast<std::uint64_t>(e)));
      });

  for (std::size_t li = 0; li < live.size(); ++li) {
    std::int64_t errors = 0;
    std::int64_t trials = 0;
    for (std::int64_t e = 0; e < ensembles; ++e) {
      const auto& c =
          counts[li * static_cast<std::size_t>(ensembles) +
                 static_cast<std::size_t>(e)];
      errors += c.errors;
      trials += c.trials;
    }
    rows[static_cast<std::size_t>(live[li])].estimate =
        make_error_estimate(errors, trials);
  }
}

}  // namespace

ErrorEstimate estimate_error(const std::vector<SubspaceClass>& classes,
                             const FeatureMatrix& phi, double sigma2,
                             std::int64_t signals, RngStream rng) {
  if (classes.empty()) throw DimensionError("estimate_error: no classes");
  if (signals < 1) throw DomainError("estimate_error: signals must be >= 1");

  std::vector<ProjectedClass> projected;
  projected.reserve(classes.size());
  for (const auto& cls : classes) projected.push_back(project_class(cls, phi));
  const LikelihoodEvaluator eval(std::move(projected), sigma2);
  const std::uint64_t l = static_cast<std::uint64_t>(classes.size());

  std::int64_t errors = 0;
  for (std::int64_t t = 0; t < signals; ++t) {
    RngStream trial_rng = rng.derive(static_cast<std::uint64_t>(t));
    const Index truth = static_cast<Index>(trial_rng.uniform_below(l));
    const Vector y = sample_projected(eval.at(truth), sigma2, trial_rng);
    errors += eval.classify(y).chosen != truth;
  }
  return make_error_estimate(errors, signals);
}

std::vector<SweepRow> run_ddt_sweep(const SweepConfig& config, int threads) {
  if (config.mode != SweepMode::ddt_linear &&
      config.mode != SweepMode::ddt_affine)
    throw DomainError("run_ddt_sweep: mode must be ddt_linear or ddt_affine");
  if (config.sigma2_grid.empty())
    throw DomainError("run_ddt_sweep: empty sigma2 grid");
  if (config.r_list.empty()) throw DomainError("run_ddt_sweep: empty r list");
  if (config.k < 1 || config.k > config.n || config.m < 1 ||
      config.m > config.n)
    throw DimensionError("run_ddt_sweep: need 1 <= k <= n and 1 <= m <= n");
  validate_counts(config);

  std::vector<SweepRow> rows;
  for (double r : config.r_list) {
    for (double sigma2 : config.sigma2_grid) {
      SweepRow row;
      row.sigma2 = sigma2;
      row.gain = r;
      row.m = config.m;
      row.n = config.n;
      row.k = config.k;
      row.master_seed = config.master_seed;
      row.l = num_classes_for(sigma2, r);
      if (r == 0.0 && row.l < 2) {
        // A single class cannot be misclassified; pin the r = 0 curve to a
        // fixed two-class problem instead.
        row.l = 2;
        row.l_clamped = true;
      }
      if (row.l > config.l_cap) row.skipped = true;
      rows.push_back(row);
    }
  }
  fill_rows(rows, config, config.mode == SweepMode::ddt_affine, threads);
  return rows;
}

std::vector<SweepRow> run_capacity_sweep(const SweepConfig& config,
                                         int threads) {
  if (config.mode != SweepMode::capacity)
    throw DomainError("run_capacity_sweep: mode must be capacity");
  if (config.m_grid.empty()) throw DomainError("run_capacity_sweep: empty M grid");
  if (config.rho_list.empty())
    throw DomainError("run_capacity_sweep: empty rho list");
  if (!(config.sigma2 > 0.0))
    throw DomainError("run_capacity_sweep: sigma2 must be positive");
  validate_counts(config);

  std::vector<SweepRow> rows;
  for (double rho : config.rho_list) {
    for (Index m : config.m_grid) {
      SweepRow row;
      row.sigma2 = config.sigma2;
      row.gain = rho;
      row.m = m;
      row.master_seed = config.master_seed;
      try {
        const ScaledDims dims =
            dims_for(m, ScalingParams{config.nu, config.kappa, rho, 0.0});
        row.n = dims.n;
        row.k = dims.k;
        row.l = dims.l;
        if (row.l > config.l_cap || row.k > row.m || row.m > row.n)
          row.skipped = true;
      } catch (const OverflowError&) {
        row.skipped = true;
      }
      rows.push_back(row);
    }
  }
  fill_rows(rows, config, /*affine=*/false, threads);
  return rows;
}

SlopeFit fit_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    if (row.skipped || e.errors < 10 || e.p_hat <= 0.0 || e.p_hat >= 1.0)
      continue;
    xs.push_back(0.5 * std::log2(1.0 / row.sigma2));
    ys.push_back(std::log2(e.p_hat));
  }
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
  if (n < 3)
    throw InsufficientDataError("fit_slope: only " + std::to_string(n) +
                                " usable rows, need >= 3");

  double x_mean = 0.0, y_mean = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    x_mean += xs[static_cast<std::size_t>(i)];
    y_mean += ys[static_cast<std::size_t>(i)];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double dx = xs[static_cast<std::size_t>(i)] - x_mean;
    sxx += dx * dx;
    sxy += dx * (ys[static_cast<std::size_t>(i)] - y_mean);
  }
  if (!(sxx > 0.0))
    throw InsufficientDataError("fit_slope: degenerate sigma2 grid");

  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double resid = ys[static_cast<std::size_t>(i)] - y_mean -
                         slope * (xs[static_cast<std::size_t>(i)] - x_mean);
    rss += resid * resid;
  }
  SlopeFit fit;
  fit.d_hat = -slope;
  fit.std_err = std::sqrt(std::max(0.0, rss / static_cast<double>(n - 2)) / sxx);
  fit.rows_used = n;
  return fit;
}

}  // namespace grasscap
