#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sockpuppet/lsh_index.hpp"
#include "sockpuppet/pipeline.hpp"

namespace sockpuppet {

/// Known same-person groups. Users outside every cluster are unlabeled.
class GroundTruth {
 public:
  GroundTruth() = default;
  /// Throws InputError on an empty or overlapping cluster.
  explicit GroundTruth(std::vector<std::set<UserId>> clusters);

  const std::vector<std::set<UserId>>& clusters() const { return clusters_; }
  const std::set<UserId>& labeled() const { return labeled_; }
  std::uint64_t positive_pair_count() const;

 private:
  std::vector<std::set<UserId>> clusters_;
  std::set<UserId> labeled_;
};

/// One cluster per line, comma-separated ids. Blank and '#' lines skipped.
GroundTruth read_truth(std::istream& in);
void write_truth(std::ostream& out, const GroundTruth& truth);

struct EvalReport {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;

  nlohmann::ordered_json to_json() const;
};

/// Pairwise precision/recall over labeled users. Predictions touching an
/// unlabeled user are ignored; empty denominators score 1.0.
EvalReport pairwise_metrics(std::span<const CandidatePair> predicted, const GroundTruth& truth);

struct SweepGrid {
  std::vector<unsigned> bits{128};
  std::vector<unsigned> max_distances{20};
  std::vector<double> thresholds{0.5};
  std::vector<DirectionSelect> directions{DirectionSelect::out};
  std::vector<NormMode> modes{NormMode::max};
  std::vector<Weighting> weightings{Weighting::weighted};
  std::uint64_t seed = 0;
  unsigned blocks = 0;

  /// Configurations in grid order (bits outermost, weighting innermost).
  std::vector<RunConfig> configs() const;
};

struct SweepRow {
  RunConfig config;
  bool ok = true;
  std::string error;
  EvalReport report;
  std::size_t candidates = 0;
  double wall_ms = 0;
};

std::vector<SweepRow> sweep(const SweepGrid& grid, const InteractionGraph& graph,
                            const GroundTruth& truth);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace sockpuppet
