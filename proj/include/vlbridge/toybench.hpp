#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/trainer.hpp"

namespace vlb {

/// Synthetic retrieval corpus: each video is the normalized sum of random
/// concept directions for the words of its caption plus Gaussian noise, so
/// captions are linearly predictive of their video.
struct ToyCorpusOptions {
  std::size_t videos = 200;
  std::size_t dim = 64;
  double noise = 0.5;
  std::uint64_t seed = 0;
};

std::vector<SampleRecord> make_toy_corpus(const ToyCorpusOptions& options);

/// Augments every record with `generate_variant_set` plus S1/S2 scores.
std::vector<TrainingExample> augment_examples(const std::vector<SampleRecord>& records, const Rewriter& rewriter,
                                              const Embedder& embedder, const PipelineConfig& config);

struct ToyBenchmarkOptions {
  ToyCorpusOptions corpus;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t epochs = 150;
  double lr = 10.0;
  std::size_t text_dim = 64;  // hash embedder width for the text side
};

struct ToyArm {
  std::string name;
  std::vector<double> recall_at_1;  // one per seed
  std::vector<double> recall_at_5;
  double mean_recall_at_1() const;
};

/// Arms: "anchors-unweighted" (baseline), "full" (S1*S2), "s1-only",
/// "s2-only", "augmented-unweighted".
struct ToyBenchmarkResult {
  std::vector<ToyArm> arms;
  const ToyArm& arm(const std::string& name) const;
};

ToyBenchmarkResult run_toy_benchmark(const ToyBenchmarkOptions& options);

}  // namespace vlb
