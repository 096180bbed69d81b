#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "elr/graph.hpp"
#include "elr/matrix.hpp"

namespace elr {

enum class AttackKind { kRandom, kDice };

std::string_view attack_name(AttackKind kind);
// Throws ArgumentError for anything other than "random" or "dice".
AttackKind parse_attack(std::string_view name);

// Rates are fractions of the undirected edge count |E|. Random attacks may use
// rates above 1.
struct AttackSpec {
  AttackKind kind = AttackKind::kRandom;
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct AttackResult {
  SparseMatrix adjacency;
  std::size_t budget = 0;  // ⌊rate·|E|⌋
  std::size_t spent = 0;   // perturbations actually applied
  std::size_t added = 0;
  std::size_t removed = 0;
};

// Inserts ⌊rate·|E|⌋ distinct absent pairs (i < j) chosen uniformly, weight
// 1.0. Throws ArgumentError naming the maximum when fewer pairs are absent,
// ShapeError if A is not symmetric with a zero diagonal.
SparseMatrix random_attack(const SparseMatrix& a, double rate, std::uint64_t seed);

// DICE: each budget unit flips a fair coin between deleting a random
// same-label edge and inserting a random absent cross-label pair. A move type
// that has run out yields to the other; when both have, the attack stops and
// `spent` falls short of `budget`. Every node must be labeled.
AttackResult dice_attack(const SparseMatrix& a, std::span<const Label> labels, double rate,
                         std::uint64_t seed);

// Dispatch on spec.kind. Labels are only read by DICE.
AttackResult apply_attack(const SparseMatrix& a, std::span<const Label> labels,
                          const AttackSpec& spec);

struct PerturbationReport {
  std::size_t added = 0;
  std::size_t removed = 0;
  double rate = 0.0;  // (added + removed) / |E_before|; 0 when A_before is empty
};

// Undirected pairs present in only one of the two matrices.
PerturbationReport perturbation_report(const SparseMatrix& before, const SparseMatrix& after);

}  // namespace elr
