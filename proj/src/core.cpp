#include "vlbridge/core.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlbridge/error.hpp"

namespace vlb {

using ordered_json = nlohmann::ordered_json;

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize_lenient(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word_char(c)) {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if ((c == '-' || c == '\'') && !current.empty() && i + 1 < text.size() &&
               is_word_char(static_cast<unsigned char>(text[i + 1]))) {
      current += static_cast<char>(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
  auto tokens = tokenize_lenient(text);
  if (tokens.empty()) fail(ErrorCode::kInvalidArgument, "tokenize: text has no word tokens");
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TextSample TextSample::create(std::string id, std::string video_id, std::string text,
                              std::optional<std::string> tree) {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "sample id must be non-empty");
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) fail(ErrorCode::kInvalidArgument, "sample '" + id + "': text is empty");

  TextSample s;
  s.tokens_ = tokenize_lenient(text);
  if (s.tokens_.empty()) {
    fail(ErrorCode::kInvalidArgument, "sample '" + id + "': text has no word tokens");
  }
  if (tree) {
    ConstituencyTree parsed = parse_bracketed_tree(*tree);
    if (parsed.leaf_count() != s.tokens_.size()) {
      fail(ErrorCode::kInvalidArgument, "sample '" + id + "': tree has " +
                                            std::to_string(parsed.leaf_count()) + " leaves but text has " +
                                            std::to_string(s.tokens_.size()) + " tokens");
    }
    s.tree_ = std::move(parsed);
  }
  s.id_ = std::move(id);
  s.video_id_ = std::move(video_id);
  s.text_ = std::move(text);
  s.tree_text_ = std::move(tree);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

VideoFeatures::VideoFeatures(std::string video_id, std::vector<std::vector<double>> frames)
    : video_id_(std::move(video_id)), frames_(std::move(frames)) {
  if (frames_.empty()) fail(ErrorCode::kInvalidArgument, "video '" + video_id_ + "': no frames");
  const std::size_t d = frames_.front().size();
  if (d < 2) fail(ErrorCode::kInvalidArgument, "video '" + video_id_ + "': feature dim must be >= 2");
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < frames_.size(); ++r) {
    const auto& row = frames_[r];
    if (row.size() != d) {
      fail(ErrorCode::kInvalidArgument, "video '" + video_id_ + "': ragged frame matrix");
    }
    if (std::abs(l2_norm(row) - 1.0) > 1e-6) {
      fail(ErrorCode::kInvalidArgument,
           "video '" + video_id_ + "': frame " + std::to_string(r) + " is not unit-norm");
    }
    for (std::size_t k = 0; k < d; ++k) mean[k] += row[k];
  }
  const double n = l2_norm(mean);
  if (n == 0.0) fail(ErrorCode::kInvalidArgument, "video '" + video_id_ + "': frames cancel out");
  for (double& x : mean) x /= n;
  pooled_ = std::move(mean);
}

VideoFeatures VideoFeatures::normalized(std::string video_id, std::vector<std::vector<double>> frames) {
  for (auto& row : frames) {
    const double n = l2_norm(row);
    if (n == 0.0) fail(ErrorCode::kInvalidArgument, "video '" + video_id + "': zero frame vector");
    if (std::abs(n - 1.0) > 1e-12) {
      for (double& x : row) x /= n;
    }
  }
  return VideoFeatures(std::move(video_id), std::move(frames));
}

// ---------------------------------------------------------------------------

PromptContext::PromptContext(std::string tmpl) : template_(std::move(tmpl)) {
  std::size_t count = 0;
  for (std::size_t pos = template_.find("{text}"); pos != std::string::npos;
       pos = template_.find("{text}", pos + 1)) {
    ++count;
  }
  if (count != 1) {
    fail(ErrorCode::kConfig, "prompt template must contain exactly one {text} placeholder");
  }
}

std::string PromptContext::rendered(std::string_view text, std::optional<std::size_t> index) const {
  const std::string index_text = index ? std::to_string(*index + 1) : std::string();
  std::string out;
  std::size_t i = 0;
  while (i < template_.size()) {
    if (template_.compare(i, 6, "{text}") == 0) {
      out += text;
      i += 6;
    } else if (template_.compare(i, 7, "{index}") == 0) {
      out += index_text;
      i += 7;
    } else {
      out += template_[i++];
    }
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "prompt rendered to an empty string");
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kSubject: return "subject";
    case ComponentKind::kVerb: return "verb";
    case ComponentKind::kObject: return "object";
    case ComponentKind::kAdjective: return "adjective";
    case ComponentKind::kPrepositional: return "prepositional";
  }
  return "unknown";
}

ComponentKind component_from_string(std::string_view name) {
  for (auto k : default_taxonomy()) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::kConfig, "unknown component '" + std::string(name) + "'");
}

std::vector<ComponentKind> default_taxonomy() {
  return {ComponentKind::kSubject, ComponentKind::kVerb, ComponentKind::kObject,
          ComponentKind::kAdjective, ComponentKind::kPrepositional};
}

// ---------------------------------------------------------------------------
// Dataset JSONL

namespace {

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

std::string require_string(const ordered_json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) line_error(line, std::string("missing required field \"") + field + "\"");
  if (!it->is_string()) line_error(line, std::string("field \"") + field + "\" must be a string");
  return it->get<std::string>();
}

std::vector<double> number_array(const ordered_json& arr, const char* field, std::size_t line) {
  if (!arr.is_array()) line_error(line, std::string("field \"") + field + "\" must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) line_error(line, std::string("field \"") + field + "\" must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

SampleRecord parse_sample_record(std::string_view json_line, std::size_t line) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    line_error(line, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) line_error(line, "expected a JSON object");

  std::string id = require_string(obj, "id", line);
  std::string text = require_string(obj, "text", line);
  std::string video_id = require_string(obj, "video_id", line);
  std::optional<std::string> tree;
  if (auto it = obj.find("tree"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) line_error(line, "field \"tree\" must be a string");
    tree = it->get<std::string>();
  }

  try {
    SampleRecord rec{TextSample::create(std::move(id), video_id, std::move(text), std::move(tree)),
                     std::nullopt};
    std::vector<std::vector<double>> frames;
    if (auto it = obj.find("frames"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) line_error(line, "field \"frames\" must be an array of arrays");
      for (const auto& row : *it) frames.push_back(number_array(row, "frames", line));
    } else if (auto it2 = obj.find("video_embedding"); it2 != obj.end() && !it2->is_null()) {
      frames.push_back(number_array(*it2, "video_embedding", line));
    }
    if (!frames.empty()) rec.video = VideoFeatures::normalized(video_id, std::move(frames));
    return rec;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse && std::string_view(e.what()).starts_with("line ")) throw;
    line_error(line, e.what());
  }
}

std::string serialize_sample_record(const SampleRecord& record) {
  const auto& s = record.sample;
  ordered_json obj;
  obj["id"] = s.id();
  obj["video_id"] = s.video_id();
  obj["text"] = s.text();
  if (s.tree_text()) obj["tree"] = *s.tree_text();
  if (record.video) {
    if (record.video->frame_count() == 1) {
      obj["video_embedding"] = record.video->frames().front();
    } else {
      obj["frames"] = record.video->frames();
    }
  }
  return obj.dump();
}

std::vector<std::pair<std::size_t, std::string>> read_jsonl_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    bool blank = true;
    for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (!blank) lines.emplace_back(n, std::move(line));
  }
  if (in.bad()) fail(ErrorCode::kIo, "read failure on '" + path.string() + "'");
  return lines;
}

std::vector<SampleRecord> load_dataset(const std::filesystem::path& path) {
  std::vector<SampleRecord> out;
  std::set<std::string> seen;
  for (const auto& [line_no, text] : read_jsonl_lines(path)) {
    SampleRecord rec = parse_sample_record(text, line_no);
    if (!seen.insert(rec.sample.id()).second) {
      line_error(line_no, "duplicate id \"" + rec.sample.id() + "\"");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void save_dataset(std::span<const SampleRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  for (const auto& rec : records) out << serialize_sample_record(rec) << '\n';
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failure on '" + path.string() + "'");
}

}  // namespace vlb
