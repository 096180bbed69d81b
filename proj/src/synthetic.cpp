#include "elr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "elr/error.hpp"

namespace elr {

namespace {

// Class vocabulary slice: words [c·w, (c+1)·w) with w = D / classes.
void bag_of_words(SparseGraph& g, std::size_t d, std::size_t classes, std::size_t words,
                  double signal, std::mt19937_64& rng) {
  const std::size_t n = g.labels.size();
  g.features = DenseMatrix(n, d);
  const std::size_t slice = std::max<std::size_t>(1, d / classes);
  std::bernoulli_distribution topical(signal);
  std::uniform_int_distribution<std::size_t> any_word(0, d - 1);
  std::uniform_int_distribution<std::size_t> slice_word(0, slice - 1);
  const std::size_t per_node = std::min(words, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(g.labels[i]) * slice;
    std::size_t placed = 0;
    while (placed < per_node) {
      std::size_t w = topical(rng) ? std::min(base + slice_word(rng), d - 1) : any_word(rng);
      if (g.features(i, w) == 0.0) {
        g.features(i, w) = 1.0;
        ++placed;
      }
    }
  }
}

}  // namespace

SparseGraph make_sbm(const SbmConfig& cfg) {
  if (cfg.blocks < 1 || cfg.n < cfg.blocks)
    throw ArgumentError("make_sbm: need 1 <= blocks <= n");
  for (double p : {cfg.p_in, cfg.p_out, cfg.signal})
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("make_sbm: probabilities must be in [0, 1]");

  SparseGraph g;
  g.n_classes = cfg.blocks;
  g.labels.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i)
    g.labels[i] = static_cast<Label>(i * cfg.blocks / cfg.n);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j) {
      const double p = g.labels[i] == g.labels[j] ? cfg.p_in : cfg.p_out;
      if (unit(rng) < p)
        edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1.0});
    }
  g.adjacency = build_symmetric(cfg.n, edges);

  if (cfg.n_features == 0) {
    g.features = DenseMatrix::identity(cfg.n);
    g.identity_features = true;
  } else {
    bag_of_words(g, cfg.n_features, cfg.blocks, cfg.words_per_node, cfg.signal, rng);
  }
  return g;
}

SparseGraph make_citation_like(const CitationLikeConfig& cfg) {
  if (cfg.classes < 1 || cfg.n < cfg.classes || cfg.n_features < cfg.classes)
    throw ArgumentError("make_citation_like: need classes <= n and classes <= n_features");
  const std::size_t max_edges = cfg.n * (cfg.n - 1) / 2;
  if (cfg.n_edges > max_edges / 2)
    throw ArgumentError("make_citation_like: n_edges = " + std::to_string(cfg.n_edges) +
                        " is too dense for n = " + std::to_string(cfg.n));

  SparseGraph g;
  g.n_classes = cfg.classes;
  g.labels.resize(cfg.n);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> class_of(0, cfg.classes - 1);
  std::vector<std::vector<std::size_t>> members(cfg.classes);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    // First `classes` nodes seed every class so none is empty.
    const std::size_t c = i < cfg.classes ? i : class_of(rng);
    g.labels[i] = static_cast<Label>(c);
    members[c].push_back(i);
  }

  // Pareto(shape, 1) activity weights give a few hubs and many leaves.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weight(cfg.n);
  for (double& w : weight) w = std::pow(1.0 - unit(rng), -1.0 / cfg.pareto_shape);
  std::discrete_distribution<std::size_t> any_node(weight.begin(), weight.end());
  std::vector<std::discrete_distribution<std::size_t>> in_class;
  for (const auto& m : members) {
    std::vector<double> w;
    for (std::size_t i : m) w.push_back(weight[i]);
    in_class.emplace_back(w.begin(), w.end());
  }

  std::bernoulli_distribution same(cfg.homophily);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  while (edges.size() < cfg.n_edges) {
    const std::size_t i = any_node(rng);
    std::size_t j;
    if (same(rng)) {
      const auto c = static_cast<std::size_t>(g.labels[i]);
      j = members[c][in_class[c](rng)];
    } else {
      j = any_node(rng);
    }
    if (i == j) continue;
    const std::uint64_t k = (static_cast<std::uint64_t>(std::min(i, j)) << 32) | std::max(i, j);
    if (!seen.insert(k).second) continue;
    edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1.0});
  }
  g.adjacency = build_symmetric(cfg.n, edges);
  bag_of_words(g, cfg.n_features, cfg.classes, cfg.words_per_node, cfg.signal, rng);
  return g;
}

}  // namespace elr
