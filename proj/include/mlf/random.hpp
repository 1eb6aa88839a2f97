#pragma once

// Deterministic generation for test corpora. The generator and the formula
// recipe are pinned in docs/formats.md so corpora can be replayed elsewhere.

#include <cstdint>
#include <string>
#include <vector>

#include "mlf/formula.hpp"

namespace mlf {

/// splitmix64: state += 0x9E3779B97F4A7C15, then two xor-multiply mixes.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// Random formula over atoms p0..p(atom_count-1); modal nesting bounded by
/// modal_budget, tree height by struct_budget (see the format notes).
inline Formula random_formula(SplitMix64& rng, int modal_budget, int struct_budget,
                              int atom_count) {
  const auto ac = static_cast<std::uint64_t>(atom_count);
  if (struct_budget <= 0) {
    const std::uint64_t k = rng.below(ac + 2);
    if (k < ac) return atom("p" + std::to_string(k));
    return k == ac ? top() : bot();
  }
  const std::uint64_t k = rng.below(modal_budget > 0 ? 10 : 8);
  auto sub = [&] { return random_formula(rng, modal_budget, struct_budget - 1, atom_count); };
  auto modal_sub = [&] {
    return random_formula(rng, modal_budget - 1, struct_budget - 1, atom_count);
  };
  switch (k) {
    case 0: return atom("p" + std::to_string(rng.below(ac)));
    case 1: return top();
    case 2: return bot();
    case 3: return neg(sub());
    case 4: {
      Formula l = sub();
      return conj(std::move(l), sub());
    }
    case 5: {
      Formula l = sub();
      return disj(std::move(l), sub());
    }
    case 6: {
      Formula l = sub();
      return implies(std::move(l), sub());
    }
    case 7: {
      Formula l = sub();
      return iff(std::move(l), sub());
    }
    case 8: return box(modal_sub());
    default: return diamond(modal_sub());
  }
}

}  // namespace mlf
