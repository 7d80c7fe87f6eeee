#include "tscf/soigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tscf {

namespace {

// Cholesky solve of a symmetric positive-definite system, in place on
// copies. Returns false when a pivot falls below the relative tolerance
// (singular or indefinite input).
bool solve_spd(std::vector<std::vector<double>> a, std::vector<double> b,
               std::vector<double>& x) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
  if (scale == 0.0) return false;
  const double tol = 1e-12 * scale;

  // a becomes the lower-triangular factor L.
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > tol)) return false;
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
    b[i] = s / a[i][i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k][ii] * x[k];
    x[ii] = s / a[ii][ii];
  }
  return true;
}

double mean_of(std::span<const double> z) {
  if (z.empty()) return 0.0;
  return std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
}

ARModel flat_model(std::span<const double> z) {
  return ARModel{1, {0.0}, mean_of(z)};
}

}  // namespace

ARModel fit_ar(std::span<const double> series, std::size_t order) {
  if (order < 1) throw std::invalid_argument("fit_ar: order must be >= 1");
  const std::size_t n = series.size();
  if (n < 3) return flat_model(series);

  // Need at least two regression rows to determine anything beyond a mean.
  const std::size_t p = std::min(order, n - 2);
  const std::size_t dim = p + 1;  // intercept + p lags

  // Normal equations over rows t = p..n-1 with regressors (1, z_{t-1..t-p}).
  std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
  std::vector<double> xty(dim, 0.0);
  std::vector<double> row(dim);
  for (std::size_t t = p; t < n; ++t) {
    row[0] = 1.0;
    for (std::size_t i = 1; i <= p; ++i) row[i] = series[t - i];
    for (std::size_t i = 0; i < dim; ++i) {
      xty[i] += row[i] * series[t];
      for (std::size_t j = i; j < dim; ++j) xtx[i][j] += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];
  }

  std::vector<double> beta;
  if (!solve_spd(xtx, xty, beta)) {
    // Singular system (constant window, exact collinearity): ridge fallback.
    // Escalate the damping only if the base value still fails numerically.
    bool solved = false;
    for (double damp = 1e-8; damp <= 1.0 && !solved; damp *= 1e3) {
      auto damped = xtx;
      for (std::size_t i = 0; i < dim; ++i) damped[i][i] += damp;
      solved = solve_spd(std::move(damped), xty, beta);
    }
    if (!solved) return flat_model(series);
  }

  ARModel model;
  model.order = p;
  model.intercept = beta[0];
  model.coeffs.assign(beta.begin() + 1, beta.end());
  return model;
}

std::vector<double> predict_insample(const ARModel& model, std::span<const double> series) {
  if (model.coeffs.size() != model.order) {
    throw std::invalid_argument("predict_insample: model coefficient count != order");
  }
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (t < model.order) {
      out[t] = series[t];  // not enough lags: pass through
      continue;
    }
    double v = model.intercept;
    for (std::size_t i = 1; i <= model.order; ++i) v += model.coeffs[i - 1] * series[t - i];
    out[t] = v;
  }
  return out;
}

TimeSeries generate(const TimeSeries& target, const Chromosome& chrom, const ReferenceSet& refs,
                    std::size_t order) {
  const std::size_t m = target.size();
  if (!chromosome_valid(chrom, m, refs.size())) {
    throw std::invalid_argument("generate: chromosome out of range for this target/reference set");
  }
  if (order < 1) throw std::invalid_argument("generate: order must be >= 1");

  const std::size_t s = chrom.soi_start;
  const std::size_t e = chrom.soi_end;
  const std::size_t win_lo = s > order ? s - order : 0;
  const std::size_t win_hi = std::min(e + order, m);

  const TimeSeries& ref = refs.members[chrom.ref_idx].series;
  if (ref.size() != m) throw std::invalid_argument("generate: reference length differs");

  std::vector<double> diff(win_hi - win_lo);
  for (std::size_t t = win_lo; t < win_hi; ++t) diff[t - win_lo] = ref[t] - target[t];

  const ARModel model = fit_ar(diff, order);
  const std::vector<double> smoothed = predict_insample(model, diff);

  // Copy, then overwrite only the SoI: positions outside it stay
  // bit-identical to the target.
  std::vector<double> values = target.values();
  for (std::size_t t = s; t < e; ++t) values[t] = target[t] + smoothed[t - win_lo];
  return TimeSeries(std::move(values));
}

}  // namespace tscf
