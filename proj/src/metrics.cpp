#include "vlbridge/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "vlbridge/error.hpp"

namespace vlb {

std::size_t ConstituencyTree::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

std::size_t ConstituencyTree::leaf_count() const {
  if (children.empty()) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

namespace {

void collect_leaves(const ConstituencyTree& t, std::vector<std::string>& out) {
  if (t.children.empty()) {
    out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) collect_leaves(c, out);
}

}  // namespace

std::vector<std::string> ConstituencyTree::leaves() const {
  std::vector<std::string> out;
  collect_leaves(*this, out);
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kInvalidArgument,
         "cosine_similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
             std::to_string(b.size()) + ")");
  }
  if (a.empty()) fail(ErrorCode::kInvalidArgument, "cosine_similarity: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kInvalidArgument, "cosine_similarity: zero-norm input");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  // Single rolling row over b.
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = (a[i - 1] == b[j - 1]) ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) {
    fail(ErrorCode::kInvalidArgument, "rouge_l: empty token sequence");
  }
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

// ---------------------------------------------------------------------------
// Bracketed trees

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view s) : s_(s) {}

  ConstituencyTree parse() {
    skip_ws();
    if (pos_ >= s_.size()) error("empty input");
    if (s_[pos_] != '(') error("expected '('");
    ConstituencyTree t = parse_bracket();
    skip_ws();
    if (pos_ != s_.size()) error("trailing characters after tree");
    return t;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kParse, "tree parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  static bool is_token_char(char c) {
    return c != '(' && c != ')' && !std::isspace(static_cast<unsigned char>(c));
  }

  std::string read_token() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_token_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  ConstituencyTree parse_bracket() {
    ++pos_;  // '('
    skip_ws();
    if (pos_ >= s_.size()) error("unexpected end of input");
    ConstituencyTree node;
    node.label = read_token();
    if (node.label.empty()) error("empty label");
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) error("unexpected end of input");
      char c = s_[pos_];
      if (c == ')') {
        ++pos_;
        return node;
      }
      if (c == '(') {
        node.children.push_back(parse_bracket());
      } else {
        node.children.push_back(ConstituencyTree{read_token(), {}});
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void serialize_into(const ConstituencyTree& t, bool root, std::string& out) {
  if (t.children.empty() && !root) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    serialize_into(c, false, out);
  }
  out += ')';
}

}  // namespace

ConstituencyTree parse_bracketed_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string serialize_tree(const ConstituencyTree& tree) {
  std::string out;
  serialize_into(tree, true, out);
  return out;
}

// ---------------------------------------------------------------------------
// Zhang-Shasha

namespace {

struct PostorderIndex {
  std::vector<const std::string*> labels;  // 1-based
  std::vector<std::size_t> leftmost;       // l(i), 1-based
  std::vector<std::size_t> keyroots;

  explicit PostorderIndex(const ConstituencyTree& root) {
    labels.push_back(nullptr);
    leftmost.push_back(0);
    visit(root);
    const std::size_t n = labels.size() - 1;
    // A keyroot is the highest node for each distinct leftmost leaf.
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[leftmost[i]]) {
        seen[leftmost[i]] = true;
        keyroots.push_back(i);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::size_t size() const { return labels.size() - 1; }

 private:
  std::size_t visit(const ConstituencyTree& t) {
    std::size_t first_leaf = 0;
    for (const auto& c : t.children) {
      std::size_t l = visit(c);
      if (first_leaf == 0) first_leaf = l;
    }
    labels.push_back(&t.label);
    const std::size_t self = labels.size() - 1;
    leftmost.push_back(first_leaf == 0 ? self : first_leaf);
    return leftmost.back();
  }
};

}  // namespace

std::size_t tree_edit_distance(const ConstituencyTree& a, const ConstituencyTree& b) {
  const PostorderIndex ta(a), tb(b);
  const std::size_t n = ta.size(), m = tb.size();
  std::vector<std::vector<std::size_t>> treedist(n + 1, std::vector<std::size_t>(m + 1, 0));
  std::vector<std::vector<std::size_t>> fd(n + 2, std::vector<std::size_t>(m + 2, 0));

  for (std::size_t i : ta.keyroots) {
    for (std::size_t j : tb.keyroots) {
      const std::size_t li = ta.leftmost[i], lj = tb.leftmost[j];
      // fd indices are offset so that (li-1, lj-1) maps to (0, 0).
      fd[0][0] = 0;
      for (std::size_t x = li; x <= i; ++x) fd[x - li + 1][0] = fd[x - li][0] + 1;
      for (std::size_t y = lj; y <= j; ++y) fd[0][y - lj + 1] = fd[0][y - lj] + 1;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          const std::size_t fx = x - li + 1, fy = y - lj + 1;
          const std::size_t del = fd[fx - 1][fy] + 1;
          const std::size_t ins = fd[fx][fy - 1] + 1;
          if (ta.leftmost[x] == li && tb.leftmost[y] == lj) {
            const std::size_t rel = fd[fx - 1][fy - 1] + (*ta.labels[x] == *tb.labels[y] ? 0 : 1);
            fd[fx][fy] = std::min({del, ins, rel});
            treedist[x][y] = fd[fx][fy];
          } else {
            const std::size_t px = ta.leftmost[x] - li, py = tb.leftmost[y] - lj;
            fd[fx][fy] = std::min({del, ins, fd[px][py] + treedist[x][y]});
          }
        }
      }
    }
  }
  return treedist[n][m];
}

}  // namespace vlb
