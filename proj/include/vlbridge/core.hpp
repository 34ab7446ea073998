#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlbridge/metrics.hpp"

namespace vlb {

/// Lowercases, strips punctuation (keeping hyphens and apostrophes that sit
/// between two word characters) and splits on whitespace. Non-ASCII bytes
/// count as word characters. Throws when no token survives.
std::vector<std::string> tokenize(std::string_view text);

/// Same normalization as `tokenize` but returns an empty list instead of
/// throwing.
std::vector<std::string> tokenize_lenient(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

/// One video-text pair. Immutable; all invariants are checked by `create`.
class TextSample {
 public:
  static TextSample create(std::string id, std::string video_id, std::string text,
                           std::optional<std::string> tree = std::nullopt);

  const std::string& id() const { return id_; }
  const std::string& video_id() const { return video_id_; }
  const std::string& text() const { return text_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const std::optional<std::string>& tree_text() const { return tree_text_; }
  const std::optional<ConstituencyTree>& tree() const { return tree_; }

  friend bool operator==(const TextSample& a, const TextSample& b) {
    return a.id_ == b.id_ && a.video_id_ == b.video_id_ && a.text_ == b.text_ &&
           a.tree_text_ == b.tree_text_;
  }

 private:
  TextSample() = default;

  std::string id_;
  std::string video_id_;
  std::string text_;
  std::vector<std::string> tokens_;
  std::optional<std::string> tree_text_;
  std::optional<ConstituencyTree> tree_;
};

/// Per-frame features (N_v x d, unit rows) plus their pooled direction.
class VideoFeatures {
 public:
  /// Rows must already be unit-norm within 1e-6.
  VideoFeatures(std::string video_id, std::vector<std::vector<double>> frames);

  /// Normalizes rows that are not already unit-norm; zero rows are rejected.
  static VideoFeatures normalized(std::string video_id, std::vector<std::vector<double>> frames);

  const std::string& video_id() const { return video_id_; }
  std::size_t frame_count() const { return frames_.size(); }
  std::size_t dim() const { return pooled_.size(); }
  const std::vector<std::vector<double>>& frames() const { return frames_; }
  std::span<const double> pooled() const { return pooled_; }

  friend bool operator==(const VideoFeatures&, const VideoFeatures&) = default;

 private:
  std::string video_id_;
  std::vector<std::vector<double>> frames_;
  std::vector<double> pooled_;
};

/// Template with exactly one `{text}` placeholder and optional `{index}`
/// placeholders (rendered 1-based).
class PromptContext {
 public:
  explicit PromptContext(std::string tmpl);

  static PromptContext plain() { return PromptContext("{text}"); }

  const std::string& template_text() const { return template_; }
  std::string rendered(std::string_view text, std::optional<std::size_t> index = std::nullopt) const;

 private:
  std::string template_;
};

enum class ComponentKind { kSubject, kVerb, kObject, kAdjective, kPrepositional };

std::string_view to_string(ComponentKind kind);
ComponentKind component_from_string(std::string_view name);
std::vector<ComponentKind> default_taxonomy();

// ---------------------------------------------------------------------------
// Dataset JSONL

struct SampleRecord {
  TextSample sample;
  std::optional<VideoFeatures> video;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Parses one dataset object; `line` is only used in error messages.
SampleRecord parse_sample_record(std::string_view json_line, std::size_t line);

/// Serializes with a fixed key order; single-frame videos are written as
/// `video_embedding`, multi-frame ones as `frames`.
std::string serialize_sample_record(const SampleRecord& record);

std::vector<SampleRecord> load_dataset(const std::filesystem::path& path);
void save_dataset(std::span<const SampleRecord> records, const std::filesystem::path& path);

/// Reads non-blank lines, keeping their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_jsonl_lines(const std::filesystem::path& path);

}  // namespace vlb
