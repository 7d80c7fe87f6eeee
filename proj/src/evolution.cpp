#include "tscf/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "tscf/soigen.hpp"

namespace tscf {

using nlohmann::json;

void RunConfig::validate() const {
  if (pop_size < 2 || pop_size % 2 != 0) {
    throw std::invalid_argument("RunConfig: pop_size must be even and >= 2");
  }
  if (generations < 1) throw std::invalid_argument("RunConfig: generations must be >= 1");
  if (!(p_crossover >= 0.0 && p_crossover <= 1.0)) {
    throw std::invalid_argument("RunConfig: p_crossover must be in [0, 1]");
  }
  if (!(p_mutation >= 0.0 && p_mutation <= 1.0)) {
    throw std::invalid_argument("RunConfig: p_mutation must be in [0, 1]");
  }
  if (references < 1) throw std::invalid_argument("RunConfig: references must be >= 1");
  if (!(tau == 0.0 || (tau > 0.0 && tau < 1.0))) {
    throw std::invalid_argument("RunConfig: tau must be in (0, 1), or 0 to disable");
  }
  if (ar_order < 1) throw std::invalid_argument("RunConfig: ar_order must be >= 1");
}

std::string RunConfig::to_json() const {
  json j;
  j["pop_size"] = pop_size;
  j["generations"] = generations;
  j["p_crossover"] = p_crossover;
  j["p_mutation"] = p_mutation;
  j["references"] = references;
  j["tau"] = tau;
  j["ar_order"] = ar_order;
  j["seed"] = seed;
  return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) { return from_json(text, RunConfig{}); }

RunConfig RunConfig::from_json(const std::string& text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("RunConfig: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("RunConfig: expected a JSON object");

  RunConfig out = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "pop_size") out.pop_size = value.get<std::size_t>();
      else if (key == "generations") out.generations = value.get<std::size_t>();
      else if (key == "p_crossover") out.p_crossover = value.get<double>();
      else if (key == "p_mutation") out.p_mutation = value.get<double>();
      else if (key == "references" || key == "K") out.references = value.get<std::size_t>();
      else if (key == "tau") out.tau = value.get<double>();
      else if (key == "ar_order") out.ar_order = value.get<std::size_t>();
      else if (key == "seed") out.seed = value.get<std::uint64_t>();
      else throw std::invalid_argument("RunConfig: unknown key \"" + key + "\"");
    } catch (const json::exception&) {
      throw std::invalid_argument("RunConfig: bad value for \"" + key + "\"");
    }
  }
  return out;
}

std::vector<Chromosome> init_population(std::size_t count, std::size_t series_length,
                                        std::size_t reference_count, Rng& rng) {
  if (series_length < 2) throw std::invalid_argument("init_population: series_length must be >= 2");
  if (reference_count < 1) {
    throw std::invalid_argument("init_population: reference_count must be >= 1");
  }
  const auto m = static_cast<std::int64_t>(series_length);
  std::vector<Chromosome> pop;
  pop.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Chromosome c;
    c.soi_start = static_cast<std::size_t>(rng.uniform_int(0, m - 2));
    c.soi_end = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(c.soi_start) + 1, m));
    c.ref_idx =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(reference_count) - 1));
    pop.push_back(c);
  }
  return pop;
}

std::size_t tournament_select(const std::vector<std::size_t>& rank,
                              const std::vector<double>& crowding, Rng& rng) {
  if (rank.empty() || rank.size() != crowding.size()) {
    throw std::invalid_argument("tournament_select: bad rank/crowding arrays");
  }
  const auto n = static_cast<std::int64_t>(rank.size());
  const auto a = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
  const auto b = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
  if (rank[b] < rank[a]) return b;
  if (rank[a] < rank[b]) return a;
  if (crowding[b] > crowding[a]) return b;
  return a;  // first drawn wins remaining ties
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            double p_crossover, Rng& rng) {
  Chromosome y1 = a;
  Chromosome y2 = b;
  if (!(rng.uniform01() < p_crossover)) return {y1, y2};

  std::array<std::size_t, 4> alpha{a.soi_start, a.soi_end, b.soi_start, b.soi_end};
  std::sort(alpha.begin(), alpha.end());
  const auto distinct = std::unique(alpha.begin(), alpha.end()) - alpha.begin();

  if (distinct == 4) {
    // Pair the endpoints whichever way keeps them closest together.
    const auto dist = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
    const std::size_t straight = dist(a.soi_start, b.soi_start) + dist(a.soi_end, b.soi_end);
    const std::size_t crossed = dist(a.soi_start, b.soi_end) + dist(a.soi_end, b.soi_start);
    if (straight <= crossed) {
      y1.soi_start = std::min(a.soi_start, b.soi_start);
      y1.soi_end = std::max(a.soi_start, b.soi_start);
      y2.soi_start = std::min(a.soi_end, b.soi_end);
      y2.soi_end = std::max(a.soi_end, b.soi_end);
    } else {
      y1.soi_start = std::min(a.soi_start, b.soi_end);
      y1.soi_end = std::max(a.soi_start, b.soi_end);
      y2.soi_start = std::min(a.soi_end, b.soi_start);
      y2.soi_end = std::max(a.soi_end, b.soi_start);
    }
  } else if (distinct == 3) {
    y1.soi_start = alpha[0];
    y1.soi_end = alpha[1];
    y2.soi_start = alpha[1];
    y2.soi_end = alpha[2];
  } else {
    // Equal parents. Split at an interior point when the window has one;
    // a unit window has nothing to split and passes the parents through.
    if (alpha[1] - alpha[0] >= 2) {
      const auto split = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(alpha[0]) + 1,
                          static_cast<std::int64_t>(alpha[1]) - 1));
      y1.soi_start = alpha[0];
      y1.soi_end = split;
      y2.soi_start = split;
      y2.soi_end = alpha[1];
    }
  }
  return {y1, y2};
}

double mutation_length_bias(std::size_t soi_length, std::size_t series_length, double tau) {
  // exp2 keeps the fixed point exact: the bias is 0.5 in floating point
  // whenever soi_length/series_length == tau. Without a usable tau the
  // draw is unbiased. Short windows bias toward growth, long ones toward
  // shrinkage.
  if (!(tau > 0.0 && tau < 1.0)) return 0.5;
  return std::exp2(-(static_cast<double>(soi_length) / static_cast<double>(series_length)) / tau);
}

Chromosome mutate(const Chromosome& x, double p_mutation, double tau, std::size_t series_length,
                  Rng& rng) {
  if (!chromosome_valid(x, series_length, x.ref_idx + 1)) {
    throw std::invalid_argument("mutate: chromosome out of range");
  }
  Chromosome y = x;
  if (!(rng.uniform01() < p_mutation)) return y;

  const auto m = static_cast<std::int64_t>(series_length);
  const auto len = static_cast<std::int64_t>(x.soi_end - x.soi_start);
  const double p_b = mutation_length_bias(x.soi_end - x.soi_start, series_length, tau);

  const bool scale_end = rng.uniform01() < 0.5;
  const std::int64_t l = rng.binomial(2 * len, p_b);

  const auto start = static_cast<std::int64_t>(x.soi_start);
  const auto end = static_cast<std::int64_t>(x.soi_end);
  if (scale_end) {
    y.soi_end = static_cast<std::size_t>(std::min(std::max(start + l, start + 1), m));
  } else {
    y.soi_start = static_cast<std::size_t>(std::max(std::min(end - l, end - 1),
                                                    static_cast<std::int64_t>(0)));
  }
  return y;
}

std::vector<Chromosome> expand(const Chromosome& x, std::size_t reference_count) {
  if (reference_count < 1) throw std::invalid_argument("expand: reference_count must be >= 1");
  std::vector<Chromosome> out(reference_count, x);
  for (std::size_t j = 0; j < reference_count; ++j) out[j].ref_idx = j;
  return out;
}

FrontPartition fast_nondominated_sort(const std::vector<ObjectivePair>& points) {
  const std::size_t n = points.size();
  FrontPartition part;
  part.rank.assign(n, 0);
  part.crowding.assign(n, 0.0);
  if (n == 0) return part;

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominator_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++dominator_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++dominator_count[i];
      }
    }
  }

  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominator_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    // Members can arrive out of order from the dominance walk; keep every
    // front in ascending index order so downstream tie-breaks are stable.
    std::sort(current.begin(), current.end());
    const std::size_t level = part.fronts.size();
    for (std::size_t i : current) part.rank[i] = level;
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--dominator_count[j] == 0) next.push_back(j);
      }
    }
    part.fronts.push_back(std::move(current));
    current = std::move(next);
  }

  // Crowding distance per front, per objective: boundary points get
  // +infinity; interior points accumulate normalized neighbour gaps. A
  // zero-range objective contributes nothing to interior points.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (const auto& front : part.fronts) {
    for (int obj = 0; obj < 2; ++obj) {
      auto value = [&](std::size_t i) { return obj == 0 ? points[i].f1 : points[i].f2; };
      std::vector<std::size_t> order = front;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t i, std::size_t j) { return value(i) < value(j); });
      part.crowding[order.front()] = kInf;
      part.crowding[order.back()] = kInf;
      const double range = value(order.back()) - value(order.front());
      if (range <= 0.0) continue;
      for (std::size_t k = 1; k + 1 < order.size(); ++k) {
        if (part.crowding[order[k]] == kInf) continue;
        part.crowding[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
      }
    }
  }
  return part;
}

std::vector<std::size_t> survival_select(const FrontPartition& partition, std::size_t count) {
  if (count > partition.rank.size()) {
    throw std::invalid_argument("survival_select: asking for more members than exist");
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (const auto& front : partition.fronts) {
    if (chosen.size() == count) break;
    if (chosen.size() + front.size() <= count) {
      chosen.insert(chosen.end(), front.begin(), front.end());
      continue;
    }
    // Partial front: descending crowding, ties by ascending index (stable
    // sort over an index-ordered front).
    std::vector<std::size_t> order = front;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return partition.crowding[i] > partition.crowding[j];
    });
    order.resize(count - chosen.size());
    chosen.insert(chosen.end(), order.begin(), order.end());
    break;
  }
  return chosen;
}

namespace {

// A population with everything the loop needs to know about it.
struct EvalPop {
  std::vector<Chromosome> chroms;
  std::vector<TimeSeries> series;
  std::vector<ObjectivePair> objectives;
};

EvalPop evaluate(std::vector<Chromosome> chroms, const TimeSeries& target, int target_label,
                 const ReferenceSet& refs, const Classifier& f, std::size_t ar_order) {
  EvalPop pop;
  pop.series.reserve(chroms.size());
  for (const auto& c : chroms) pop.series.push_back(generate(target, c, refs, ar_order));

  // One classifier call per population keeps external bridges cheap.
  const auto probs = f.predict_proba(pop.series);
  pop.objectives.reserve(chroms.size());
  for (std::size_t i = 0; i < chroms.size(); ++i) {
    pop.objectives.push_back(ObjectivePair{flip_distance(probs[i], target_label, refs),
                                           dissimilarity(pop.series[i], target)});
  }
  pop.chroms = std::move(chroms);
  return pop;
}

}  // namespace

ExplainResult run_explain(const TimeSeries& target, const Classifier& f, const Dataset& pool,
                          const RunConfig& config) {
  config.validate();
  const std::size_t m = target.size();
  if (pool.length() != m) {
    throw std::invalid_argument("run_explain: target and pool series lengths differ");
  }
  if (f.series_length() != m) {
    throw std::invalid_argument("run_explain: classifier expects length " +
                                std::to_string(f.series_length()));
  }

  const int target_label = f.predict_label(target);
  const ReferenceSet refs = select_references(target, pool, f, config.references);
  if (refs.empty()) {
    throw ExplainError(
        "no usable reference: every pool member is predicted to the target's own class");
  }
  const std::size_t k_eff = refs.size();  // may be < K on a degenerate pool

  Rng rng(config.seed);
  const std::size_t n = config.pop_size;

  EvalPop pop = evaluate(init_population(n, m, k_eff, rng), target, target_label, refs, f,
                         config.ar_order);
  FrontPartition part = fast_nondominated_sort(pop.objectives);
  std::vector<std::size_t> rank = part.rank;
  std::vector<double> crowding = part.crowding;

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    // 2N offspring from N tournament-selected parent pairs.
    std::vector<Chromosome> offspring;
    offspring.reserve(2 * n * k_eff);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pa = tournament_select(rank, crowding, rng);
      const std::size_t pb = tournament_select(rank, crowding, rng);
      auto [c1, c2] = crossover(pop.chroms[pa], pop.chroms[pb], config.p_crossover, rng);
      c1 = mutate(c1, config.p_mutation, config.tau, m, rng);
      c2 = mutate(c2, config.p_mutation, config.tau, m, rng);
      offspring.push_back(c1);
      offspring.push_back(c2);
    }
    // Each offspring fans out across every reference slot.
    std::vector<Chromosome> expanded;
    expanded.reserve(2 * n * k_eff);
    for (const auto& c : offspring) {
      for (const auto& e : expand(c, k_eff)) expanded.push_back(e);
    }

    EvalPop q = evaluate(std::move(expanded), target, target_label, refs, f, config.ar_order);

    // Merge parents and offspring, then keep the best N.
    EvalPop merged;
    merged.chroms.reserve(pop.chroms.size() + q.chroms.size());
    merged.series.reserve(pop.series.size() + q.series.size());
    merged.objectives.reserve(pop.objectives.size() + q.objectives.size());
    auto append = [&](EvalPop&& src) {
      for (auto& c : src.chroms) merged.chroms.push_back(c);
      for (auto& s : src.series) merged.series.push_back(std::move(s));
      for (auto& o : src.objectives) merged.objectives.push_back(o);
    };
    append(std::move(pop));
    append(std::move(q));
    if (merged.chroms.size() != (2 * k_eff + 1) * n) {
      throw std::logic_error("run_explain: merged pool size invariant broken");
    }

    const FrontPartition merged_part = fast_nondominated_sort(merged.objectives);
    const std::vector<std::size_t> keep = survival_select(merged_part, n);
    if (keep.size() != n) throw std::logic_error("run_explain: survival size invariant broken");

    EvalPop next;
    next.chroms.reserve(n);
    next.series.reserve(n);
    next.objectives.reserve(n);
    rank.clear();
    crowding.clear();
    for (std::size_t idx : keep) {
      next.chroms.push_back(merged.chroms[idx]);
      next.series.push_back(std::move(merged.series[idx]));
      next.objectives.push_back(merged.objectives[idx]);
      rank.push_back(merged_part.rank[idx]);
      crowding.push_back(merged_part.crowding[idx]);
    }
    pop = std::move(next);
  }

  const FrontPartition final_part = fast_nondominated_sort(pop.objectives);
  ExplainResult result;
  result.target_label = target_label;
  result.degenerate_references = refs.degenerate();
  for (const auto& member : refs.members) {
    result.reference_pool_indices.push_back(member.pool_index);
    result.reference_distances.push_back(member.distance);
  }
  // The best front always holds a near-zero-change member that never flips
  // (nothing can beat its f2); it and its kind are not counterfactuals.
  result.front.reserve(final_part.fronts.front().size());
  for (std::size_t idx : final_part.fronts.front()) {
    if (pop.objectives[idx].f1 == kNoFlipPenalty) continue;
    result.front.push_back(Candidate{pop.chroms[idx], pop.series[idx], pop.objectives[idx]});
  }
  return result;
}

}  // namespace tscf
