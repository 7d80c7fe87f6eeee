#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tscf/chromosome.hpp"
#include "tscf/reference.hpp"
#include "tscf/timeseries.hpp"

namespace tscf {

// Autoregressive model with intercept: z_t ~ intercept + sum_i coeffs[i-1] * z_{t-i}.
struct ARModel {
  std::size_t order = 1;
  std::vector<double> coeffs;  // phi_1 .. phi_order
  double intercept = 0.0;
};

// Conditional least-squares fit via the normal equations. Degenerate inputs
// never fail: a singular system falls back to a ridge-regularized solve
// (damping 1e-8 on the diagonal); a series too short for the requested order
// is fitted at the largest order with at least two usable rows; anything
// shorter than 3 points yields the flat model (order 1, phi=0,
// intercept = mean).
ARModel fit_ar(std::span<const double> series, std::size_t order);

// One-step-ahead fitted values, same length as the input. Positions with
// fewer than model.order preceding values pass the raw input through.
std::vector<double> predict_insample(const ARModel& model, std::span<const double> series);

// Builds a counterfactual candidate for one chromosome: take the
// reference-minus-target difference on the SoI window extended by `order`
// points on each side (clamped to the series), smooth it with an in-sample
// AR fit, and add the smoothed difference back onto the target inside
// [soi_start, soi_end). Every position outside the SoI is copied bit-for-bit
// from the target. Never fails on degenerate data.
TimeSeries generate(const TimeSeries& target, const Chromosome& chrom, const ReferenceSet& refs,
                    std::size_t order);

}  // namespace tscf
