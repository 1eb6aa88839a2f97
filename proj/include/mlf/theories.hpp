#pragma once

// Axiom schemata of S4.2 and a bounded decision procedure: refutation by
// exhaustive countermodel search over finite pre-Boolean-algebras. A
// countermodel is a sound refutation; the valid outcome is only a
// certificate up to the searched bounds.

#include <optional>
#include <vector>

#include "json.hpp"

#include "mlf/formula.hpp"
#include "mlf/kripke.hpp"

namespace mlf {

enum class Schema { K, Dual, T, Four, Dot2 };

/// The schema with its metavariables replaced by args (K takes 2, others 1).
Formula axiom_instance(Schema schema, const std::vector<Formula>& args);

struct Countermodel {
  Model model;
  int world = 0;
};

struct DecisionBounds {
  int m_max = 0;
  int cluster_max = 0;
  std::uint64_t frames_checked = 0;
  std::uint64_t valuations_checked = 0;
};

struct DecisionOutcome {
  std::optional<Countermodel> countermodel;  // empty: valid up to the bounds
  DecisionBounds bounds;
  bool refuted() const { return countermodel.has_value(); }
};

/// Searches every pBA with base size <= m_max and cluster sizes <= cluster_max
/// (frames ascending by world count, valuations lexicographic) and returns the
/// first countermodel, else the bounded-validity certificate.
DecisionOutcome s42_decide(const Formula& f, int m_max, int cluster_max);

nlohmann::json decision_to_json(const DecisionOutcome& outcome);

}  // namespace mlf
