#include "elr/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "elr/error.hpp"

namespace elr {

namespace {

using PairKey = std::uint64_t;

PairKey key(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return (static_cast<PairKey>(i) << 32) | static_cast<PairKey>(j);
}

std::size_t budget_for(const SparseMatrix& a, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw ArgumentError("attack rate must be a finite value >= 0");
  return static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(a.upper_triangle_count())));
}

void check_graph(const SparseMatrix& a) {
  if (!a.is_square() || !a.is_symmetric())
    throw ShapeError("attack input must be a symmetric square matrix");
  if (!a.has_zero_diagonal()) throw ShapeError("attack input must have a zero diagonal");
}

// Draws distinct pairs (i < j) satisfying `allowed` and not in `taken`.
// Rejection sampling while that is cheap; once it keeps failing, the
// remaining candidates are enumerated and drawn without replacement.
template <class Allowed>
class PairSampler {
 public:
  PairSampler(std::size_t n, std::unordered_set<PairKey>& taken, Allowed allowed,
              std::size_t available)
      : n_(n), taken_(taken), allowed_(allowed), available_(available) {}

  std::size_t available() const { return available_; }

  // Precondition: available() > 0.
  PairKey draw(std::mt19937_64& rng) {
    if (!enumerated_) {
      std::uniform_int_distribution<std::size_t> node(0, n_ - 1);
      for (int attempt = 0; attempt < 256; ++attempt) {
        const std::size_t i = node(rng);
        const std::size_t j = node(rng);
        if (i == j || !allowed_(i, j)) continue;
        const PairKey k = key(i, j);
        if (taken_.insert(k).second) {
          --available_;
          return k;
        }
      }
      enumerate();
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    const std::size_t at = pick(rng);
    const PairKey k = pool_[at];
    pool_[at] = pool_.back();
    pool_.pop_back();
    taken_.insert(k);
    --available_;
    return k;
  }

 private:
  void enumerate() {
    enumerated_ = true;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (allowed_(i, j) && !taken_.contains(key(i, j))) pool_.push_back(key(i, j));
  }

  std::size_t n_;
  std::unordered_set<PairKey>& taken_;
  Allowed allowed_;
  std::size_t available_;
  bool enumerated_ = false;
  std::vector<PairKey> pool_;
};

std::vector<Edge> to_edges(const std::vector<PairKey>& keys, double weight) {
  std::vector<Edge> out;
  out.reserve(keys.size());
  for (PairKey k : keys)
    out.push_back({static_cast<std::uint32_t>(k >> 32),
                   static_cast<std::uint32_t>(k & 0xffffffffu), weight});
  return out;
}

}  // namespace

std::string_view attack_name(AttackKind kind) {
  return kind == AttackKind::kDice ? "dice" : "random";
}

AttackKind parse_attack(std::string_view name) {
  if (name == "random") return AttackKind::kRandom;
  if (name == "dice") return AttackKind::kDice;
  throw ArgumentError("unknown attack '" + std::string(name) + "' (expected random or dice)");
}

SparseMatrix random_attack(const SparseMatrix& a, double rate, std::uint64_t seed) {
  check_graph(a);
  const std::size_t budget = budget_for(a, rate);
  const std::size_t n = a.rows();
  const std::size_t n_edges = a.upper_triangle_count();
  const std::size_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const std::size_t absent = all_pairs - n_edges;
  if (budget > absent)
    throw ArgumentError("random_attack: cannot insert " + std::to_string(budget) +
                        " edges, at most " + std::to_string(absent) + " pairs are absent");
  if (budget == 0) return a;

  std::unordered_set<PairKey> taken;
  taken.reserve(n_edges + budget);
  auto edges = upper_edges(a);
  for (const Edge& e : edges) taken.insert(key(e.src, e.dst));

  std::mt19937_64 rng(seed);
  auto any_pair = [](std::size_t, std::size_t) { return true; };
  PairSampler sampler(n, taken, any_pair, absent);
  std::vector<PairKey> inserted;
  inserted.reserve(budget);
  for (std::size_t b = 0; b < budget; ++b) inserted.push_back(sampler.draw(rng));

  const auto extra = to_edges(inserted, 1.0);
  edges.insert(edges.end(), extra.begin(), extra.end());
  return build_symmetric(n, edges);
}

AttackResult dice_attack(const SparseMatrix& a, std::span<const Label> labels, double rate,
                         std::uint64_t seed) {
  check_graph(a);
  const std::size_t n = a.rows();
  if (labels.size() != n)
    throw ShapeError("dice_attack: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n) + " nodes");
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] == kUnlabeled)
      throw ArgumentError("dice_attack: node " + std::to_string(i) + " is unlabeled");

  AttackResult out;
  out.budget = budget_for(a, rate);
  if (out.budget == 0) {
    out.adjacency = a;
    return out;
  }

  const auto edges = upper_edges(a);
  std::unordered_set<PairKey> taken;
  taken.reserve(edges.size() + out.budget);
  std::vector<std::size_t> intra;  // indices into `edges`
  std::size_t inter_present = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    taken.insert(key(edges[k].src, edges[k].dst));
    if (labels[edges[k].src] == labels[edges[k].dst])
      intra.push_back(k);
    else
      ++inter_present;
  }

  std::vector<std::size_t> class_sizes;
  for (Label y : labels) {
    if (static_cast<std::size_t>(y) >= class_sizes.size())
      class_sizes.resize(static_cast<std::size_t>(y) + 1, 0);
    ++class_sizes[static_cast<std::size_t>(y)];
  }
  std::size_t same_pairs = 0;
  for (std::size_t c : class_sizes) same_pairs += c * (c > 0 ? c - 1 : 0) / 2;
  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t inter_absent = all_pairs - same_pairs - inter_present;

  auto cross = [labels](std::size_t i, std::size_t j) { return labels[i] != labels[j]; };
  PairSampler sampler(n, taken, cross, inter_absent);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<bool> removed(edges.size(), false);
  std::vector<PairKey> inserted;

  for (std::size_t b = 0; b < out.budget; ++b) {
    bool remove = coin(rng);
    if (remove && intra.empty()) remove = false;
    if (!remove && sampler.available() == 0) remove = true;
    if (remove && intra.empty()) break;
    if (remove) {
      std::uniform_int_distribution<std::size_t> pick(0, intra.size() - 1);
      const std::size_t at = pick(rng);
      removed[intra[at]] = true;
      intra[at] = intra.back();
      intra.pop_back();
      ++out.removed;
    } else {
      inserted.push_back(sampler.draw(rng));
      ++out.added;
    }
    ++out.spent;
  }

  std::vector<Edge> kept;
  kept.reserve(edges.size() + inserted.size());
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (!removed[k]) kept.push_back(edges[k]);
  const auto extra = to_edges(inserted, 1.0);
  kept.insert(kept.end(), extra.begin(), extra.end());
  out.adjacency = build_symmetric(n, kept);
  return out;
}

AttackResult apply_attack(const SparseMatrix& a, std::span<const Label> labels,
                          const AttackSpec& spec) {
  if (spec.kind == AttackKind::kDice) return dice_attack(a, labels, spec.rate, spec.seed);
  AttackResult out;
  out.budget = budget_for(a, spec.rate);
  out.adjacency = random_attack(a, spec.rate, spec.seed);
  out.spent = out.budget;
  out.added = out.budget;
  return out;
}

PerturbationReport perturbation_report(const SparseMatrix& before, const SparseMatrix& after) {
  if (before.rows() != after.rows() || before.cols() != after.cols())
    throw ShapeError("perturbation_report: shape mismatch");
  PerturbationReport rep;
  for (std::size_t r = 0; r < before.rows(); ++r) {
    auto bc = before.row_cols(r);
    auto ac = after.row_cols(r);
    auto b = std::upper_bound(bc.begin(), bc.end(), r);
    auto a = std::upper_bound(ac.begin(), ac.end(), r);
    while (b != bc.end() || a != ac.end()) {
      if (a == ac.end() || (b != bc.end() && *b < *a)) {
        ++rep.removed;
        ++b;
      } else if (b == bc.end() || *a < *b) {
        ++rep.added;
        ++a;
      } else {
        ++a;
        ++b;
      }
    }
  }
  const std::size_t base = before.upper_triangle_count();
  rep.rate = base == 0 ? 0.0
                       : static_cast<double>(rep.added + rep.removed) / static_cast<double>(base);
  return rep;
}

}  // namespace elr
