#pragma once

// Reference implementations used only by tests. Each one is written from the
// definition and shares no code with the implementation it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vlbridge/metrics.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// LCS by enumerating every subsequence of the shorter sequence.

inline bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < seq.size() && k < sub.size(); ++i) {
    if (seq[i] == sub[k]) ++k;
  }
  return k == sub.size();
}

inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1U << s.size()); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
    if (bits <= best) continue;
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (1U << i)) sub.push_back(s[i]);
    }
    if (is_subsequence(sub, t)) best = bits;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Tree edit distance by exhaustive edit scripts. Any unit-cost script can be
// reordered into deletions from `a`, relabels, then insertions (deletions
// from `b` run backwards), so the distance is the minimum over node subsets
// kept in each tree whose induced forests have the same shape, of
// deletions + insertions + label mismatches.

struct Flat {
  std::vector<std::string> labels;                 // preorder
  std::vector<std::vector<std::size_t>> children;  // preorder indices
};

inline void flatten(const vlb::ConstituencyTree& t, Flat& f) {
  const std::size_t me = f.labels.size();
  f.labels.push_back(t.label);
  f.children.emplace_back();
  for (const auto& c : t.children) {
    f.children[me].push_back(f.labels.size());
    flatten(c, f);
  }
}

// Shape string and preorder labels of the forest left after deleting every
// node outside `keep` (a deleted node's children move into its place).
inline void induced(const Flat& f, std::size_t node, std::uint32_t keep, std::string& shape,
                    std::vector<std::string>& labels) {
  const bool kept = keep & (1U << node);
  if (kept) {
    shape += '(';
    labels.push_back(f.labels[node]);
  }
  for (auto c : f.children[node]) induced(f, c, keep, shape, labels);
  if (kept) shape += ')';
}

struct Reduction {
  std::size_t deleted;
  std::vector<std::string> labels;
};

inline std::map<std::string, std::vector<Reduction>> reductions(const vlb::ConstituencyTree& t) {
  Flat f;
  flatten(t, f);
  const std::size_t n = f.labels.size();
  std::map<std::string, std::vector<Reduction>> out;
  for (std::uint32_t keep = 0; keep < (1U << n); ++keep) {
    std::string shape;
    std::vector<std::string> labels;
    induced(f, 0, keep, shape, labels);
    out[shape].push_back({n - static_cast<std::size_t>(__builtin_popcount(keep)), std::move(labels)});
  }
  return out;
}

inline std::size_t tree_distance(const std::map<std::string, std::vector<Reduction>>& ra,
                                 const std::map<std::string, std::vector<Reduction>>& rb) {
  std::size_t best = SIZE_MAX;
  for (const auto& [shape, xs] : ra) {
    auto it = rb.find(shape);
    if (it == rb.end()) continue;
    for (const auto& x : xs) {
      for (const auto& y : it->second) {
        std::size_t cost = x.deleted + y.deleted;
        for (std::size_t i = 0; i < x.labels.size(); ++i) cost += x.labels[i] != y.labels[i];
        best = std::min(best, cost);
      }
    }
  }
  return best;
}

inline std::size_t tree_distance(const vlb::ConstituencyTree& a, const vlb::ConstituencyTree& b) {
  return tree_distance(reductions(a), reductions(b));
}

// Every ordered tree with exactly n nodes over `labels`.
inline std::vector<vlb::ConstituencyTree> all_trees(std::size_t n, const std::vector<std::string>& labels) {
  std::vector<vlb::ConstituencyTree> out;
  if (n == 0) return out;
  // Forests of m nodes, built recursively as (first tree, rest forest).
  std::function<std::vector<std::vector<vlb::ConstituencyTree>>(std::size_t)> forests =
      [&](std::size_t m) -> std::vector<std::vector<vlb::ConstituencyTree>> {
    if (m == 0) return {{}};
    std::vector<std::vector<vlb::ConstituencyTree>> res;
    for (std::size_t first = 1; first <= m; ++first) {
      for (const auto& t : all_trees(first, labels)) {
        for (auto rest : forests(m - first)) {
          rest.insert(rest.begin(), t);
          res.push_back(std::move(rest));
        }
      }
    }
    return res;
  };
  for (const auto& label : labels) {
    for (auto& kids : forests(n - 1)) out.push_back({label, std::move(kids)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diversity critic: links from the definition, components by transitive
// closure, representative by exhaustive argmax.

struct Pair {
  std::string input, output;
};

inline std::vector<std::size_t> diverse(const std::vector<Pair>& pairs,
                                        const std::function<double(const std::string&, const std::string&)>& nli,
                                        double gamma) {
  const std::size_t n = pairs.size();
  std::vector<std::vector<double>> score(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    reach[a][a] = true;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      std::vector<double> dirs = {nli(pairs[a].output, pairs[b].output), nli(pairs[b].output, pairs[a].output)};
      if (pairs[a].input != pairs[b].input) {
        dirs.push_back(nli(pairs[a].input, pairs[b].input));
        dirs.push_back(nli(pairs[b].input, pairs[a].input));
      }
      score[a][b] = *std::max_element(dirs.begin(), dirs.end());
      reach[a][b] = score[a][b] >= gamma;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::set<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> comp;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) comp.push_back(j);
    }
    auto key = [&](std::size_t u) {
      double s = 0.0;
      for (std::size_t v : comp) {
        if (v != u && score[u][v] >= gamma) s += score[u][v];
      }
      // Larger sum first, then smaller output, input, index.
      return std::make_tuple(-s, pairs[u].output, pairs[u].input, u);
    };
    kept.insert(*std::min_element(comp.begin(), comp.end(),
                                  [&](std::size_t x, std::size_t y) { return key(x) < key(y); }));
  }
  return {kept.begin(), kept.end()};
}

// ---------------------------------------------------------------------------
// Small numeric helpers

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  for (double& x : v) x = g(rng);
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
  return v;
}

}  // namespace oracle
