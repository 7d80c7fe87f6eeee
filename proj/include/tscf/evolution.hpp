#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tscf/chromosome.hpp"
#include "tscf/classifier.hpp"
#include "tscf/objectives.hpp"
#include "tscf/reference.hpp"
#include "tscf/rng.hpp"
#include "tscf/timeseries.hpp"

namespace tscf {

// A target for which no explanation can be produced (e.g. the reference
// pool has no member predicted to a different class).
class ExplainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Search parameters. JSON-serializable; see to_json/from_json.
struct RunConfig {
  std::size_t pop_size = 50;
  std::size_t generations = 50;
  double p_crossover = 0.7;
  double p_mutation = 0.7;
  std::size_t references = 4;  // how many references to select (K)
  double tau = 0.4;            // tolerable SoI length fraction; 0 disables
  std::size_t ar_order = 4;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range fields (pop_size must be
  // even and >= 2, probabilities in [0,1], tau in (0,1) or exactly 0, ...).
  void validate() const;

  std::string to_json() const;
  // Applies the fields present in `text` on top of `base` (defaults when
  // omitted); absent fields keep their base values. Unknown keys are
  // rejected.
  static RunConfig from_json(const std::string& text, RunConfig base);
  static RunConfig from_json(const std::string& text);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// A fully evaluated population member.
struct Candidate {
  Chromosome chrom;
  TimeSeries series;
  ObjectivePair objectives;
};

// Output of non-dominated sorting: fronts[0] is the best front; rank[i] is
// the front index of point i; crowding[i] is Deb's crowding distance within
// the point's own front (boundary points get +infinity).
struct FrontPartition {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

struct ExplainResult {
  // Non-dominated members of the final population whose candidate actually
  // flips the prediction. Members still carrying the no-flip penalty are not
  // counterfactuals and are dropped; an empty front means the search never
  // found a flipping candidate.
  std::vector<Candidate> front;
  int target_label = 0;  // predicted class id of the target
  bool degenerate_references = false;
  std::vector<std::size_t> reference_pool_indices;
  std::vector<double> reference_distances;
};

// Random chromosomes: soi_start ~ U[0, m-2], soi_end ~ U[soi_start+1, m],
// ref_idx ~ U[0, reference_count-1].
std::vector<Chromosome> init_population(std::size_t count, std::size_t series_length,
                                        std::size_t reference_count, Rng& rng);

// Binary tournament over indices 0..rank.size()-1: two draws with
// replacement; lower rank wins, ties go to larger crowding, remaining ties
// to the first drawn.
std::size_t tournament_select(const std::vector<std::size_t>& rank,
                              const std::vector<double>& crowding, Rng& rng);

// Interval-endpoint recombination. With probability 1-p_crossover the
// parents are copied through. Otherwise let alpha be the sorted distinct
// endpoint values of both parents:
//  - 4 distinct values: pair starts with starts and ends with ends when
//    |a.start-b.start|+|a.end-b.end| <= |a.start-b.end|+|a.end-b.start|,
//    otherwise pair across; each pair is (min,max).
//  - 3 distinct values: offspring (alpha1,alpha2) and (alpha2,alpha3).
//  - 2 distinct values (equal parents): split at a uniform interior point
//    when one exists; adjacent endpoints fall back to copies.
// ref_idx genes are carried from the parents unchanged.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            double p_crossover, Rng& rng);

// Per-trial success probability of the mutation length draw:
// 2^(-(soi_length/series_length)/tau), which equals 0.5 exactly when the
// window fills a tau fraction of the series; 0.5 when tau is outside (0,1).
double mutation_length_bias(std::size_t soi_length, std::size_t series_length, double tau);

// Endpoint rescaling. With probability 1-p_mutation the input is returned
// unchanged. Otherwise draw a new length l ~ Binomial(2*len, p_b) with
// p_b = mutation_length_bias(len, m, tau). A fair coin picks which endpoint
// absorbs the new length; the other endpoint never moves, and clamps keep
// the window inside [0, m] with length >= 1.
Chromosome mutate(const Chromosome& x, double p_mutation, double tau, std::size_t series_length,
                  Rng& rng);

// The chromosome replicated once per reference slot: ref_idx = 0..count-1.
std::vector<Chromosome> expand(const Chromosome& x, std::size_t reference_count);

// Deb's fast non-dominated sort plus per-front crowding distances.
// Deterministic: fronts preserve index order, crowding ties resolve by
// stable sorting.
FrontPartition fast_nondominated_sort(const std::vector<ObjectivePair>& points);

// Environmental selection: admit whole fronts while they fit, then fill the
// remainder from the first overflowing front by descending crowding
// distance (ties by ascending index). Returns exactly `count` indices.
std::vector<std::size_t> survival_select(const FrontPartition& partition, std::size_t count);

// Full evolutionary search for one target: select references from the pool,
// evolve `generations` rounds of 2N offspring expanded across all reference
// slots, keep the best N of the (2K+1)N merged pool each round, and return
// the non-dominated members of the final population. Deterministic given
// config.seed. Throws ExplainError when no reference qualifies.
ExplainResult run_explain(const TimeSeries& target, const Classifier& f, const Dataset& pool,
                          const RunConfig& config);

}  // namespace tscf
