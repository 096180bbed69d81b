#pragma once

#include <cstddef>
#include <cstdint>

#include "elr/graph.hpp"

namespace elr {

// Planted-partition graph: nodes split into equal-size blocks (block = label),
// each pair linked independently with p_in inside a block and p_out across.
// With n_features == 0 the features are the identity matrix; otherwise each
// node gets a binary bag-of-words row where `signal` of its words come from a
// block-specific vocabulary slice.
struct SbmConfig {
  std::size_t n = 200;
  std::size_t blocks = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t n_features = 0;
  std::size_t words_per_node = 10;
  double signal = 0.5;
  std::uint64_t seed = 0;
};

SparseGraph make_sbm(const SbmConfig& cfg);

// Citation-network stand-in with heavy-tailed degrees: `n_edges` distinct
// edges whose endpoints are drawn with Pareto weights, a fraction `homophily`
// of them inside a class; sparse binary features with `words_per_node` words,
// a fraction `signal` taken from the class vocabulary slice.
struct CitationLikeConfig {
  std::size_t n = 2708;
  std::size_t classes = 7;
  std::size_t n_features = 1433;
  std::size_t n_edges = 5278;
  std::size_t words_per_node = 18;
  double homophily = 0.8;
  double signal = 0.4;
  double pareto_shape = 2.0;
  std::uint64_t seed = 0;
};

SparseGraph make_citation_like(const CitationLikeConfig& cfg);

}  // namespace elr
