#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vlbridge/augment.hpp"
#include "vlbridge/config.hpp"
#include "vlbridge/score.hpp"
#include "vlbridge/trainer.hpp"

namespace vlb {

/// Side file written next to every artifact as `<output>.manifest.json`.
/// Counts are listed in stage order and never increase along a filter chain.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::ordered_json& j);
};

std::filesystem::path manifest_path(const std::filesystem::path& artifact);
std::filesystem::path sweep_path(const std::filesystem::path& artifact);
std::filesystem::path csv_path(const std::filesystem::path& report);

/// One line of the augmented dataset: the input record plus its variants
/// and scores. `variants` is absent when augmentation was degenerate.
struct AugmentedRecord {
  SampleRecord record;
  std::optional<VariantSet> variants;
  std::optional<SignificanceReport> scores;
  std::optional<std::string> error;
};

std::string serialize_augmented_record(const AugmentedRecord& r);
/// Accepts plain dataset lines too; they come back without variants.
AugmentedRecord parse_augmented_record(std::string_view json_line, std::size_t line);

RunManifest cmd_augment(const PipelineConfig& config, const std::filesystem::path& input,
                        const std::filesystem::path& output);

/// Also writes `<output>.sweep.json` with kept counts over a threshold grid.
RunManifest cmd_attributes(const PipelineConfig& config, const std::filesystem::path& input,
                           const std::filesystem::path& output);

struct TrainOverrides {
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  bool grad_check = false;
};

/// Throws a kCheckFailed error after writing its artifacts when the gradient
/// check exceeds 1e-5.
RunManifest cmd_train(const PipelineConfig& config, const std::filesystem::path& input,
                      const std::filesystem::path& output, const TrainOverrides& overrides);

/// Summarizes prior artifacts into `output` and `<output>.csv`. The CSV holds
/// one row per loss item of every train artifact; its contribution column
/// sums to that artifact's total.
RunManifest cmd_report(std::span<const std::filesystem::path> inputs, const std::filesystem::path& output);

inline constexpr double kGradCheckTolerance = 1e-5;

}  // namespace vlb
