#include "mlf/theories.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace mlf {

Formula axiom_instance(Schema schema, const std::vector<Formula>& args) {
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw std::invalid_argument("axiom schema arity mismatch");
  };
  switch (schema) {
    case Schema::K:
      want(2);
      return implies(box(implies(args[0], args[1])), implies(box(args[0]), box(args[1])));
    case Schema::Dual:
      want(1);
      return iff(diamond(args[0]), neg(box(neg(args[0]))));
    case Schema::T:
      want(1);
      return implies(box(args[0]), args[0]);
    case Schema::Four:
      want(1);
      return implies(box(args[0]), box(box(args[0])));
    case Schema::Dot2:
      want(1);
      return implies(diamond(box(args[0])), box(diamond(args[0])));
  }
  throw std::logic_error("unreachable");
}

DecisionOutcome s42_decide(const Formula& f, int m_max, int cluster_max) {
  DecisionOutcome out;
  out.bounds.m_max = m_max;
  out.bounds.cluster_max = cluster_max;

  std::vector<Frame> frames = all_pbas_up_to(m_max, cluster_max);
  std::stable_sort(frames.begin(), frames.end(),
                   [](const Frame& a, const Frame& b) { return a.size() < b.size(); });

  std::vector<std::string> names;
  for (const auto& a : atoms_of(f)) names.push_back(a);
  const std::size_t k = names.size();

  // Fail fast when any frame in range would blow the valuation budget.
  const std::size_t widest = frames.empty() ? 0 : frames.back().size();
  if (widest > 64 || k * widest > 30)
    throw std::invalid_argument(
        "s42_decide: " + std::to_string(k) + " atoms over a " + std::to_string(widest) +
        "-world frame exceeds the exhaustive-search budget; lower the bounds");

  for (const Frame& fr : frames) {
    ++out.bounds.frames_checked;
    const std::size_t n = fr.size();
    std::vector<std::uint64_t> rows(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (fr.edge(i, j)) rows[i] |= std::uint64_t{1} << j;
    const std::uint64_t full =
        n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    const std::uint64_t total = std::uint64_t{1} << (k * n);
    std::map<std::string, std::uint64_t> val;
    for (std::uint64_t v = 0; v < total; ++v) {
      ++out.bounds.valuations_checked;
      for (std::size_t a = 0; a < k; ++a) val[names[a]] = (v >> (a * n)) & full;
      const std::uint64_t ext = eval_mask(f, rows, full, val);
      if (ext == full) continue;
      const int world = std::countr_zero(full & ~ext);
      Countermodel cm;
      cm.model.frame = fr;
      for (std::size_t a = 0; a < k; ++a) {
        auto& set = cm.model.valuation[names[a]];
        for (std::size_t w = 0; w < n; ++w)
          if ((val[names[a]] >> w) & 1u) set.insert(fr.world_at(w));
      }
      cm.world = fr.world_at(static_cast<std::size_t>(world));
      out.countermodel = std::move(cm);
      return out;
    }
  }
  return out;
}

nlohmann::json decision_to_json(const DecisionOutcome& outcome) {
  nlohmann::json j;
  j["bounds"] = {{"m_max", outcome.bounds.m_max},
                 {"cluster_max", outcome.bounds.cluster_max},
                 {"frames_checked", outcome.bounds.frames_checked},
                 {"valuations_checked", outcome.bounds.valuations_checked}};
  if (outcome.countermodel) {
    j["result"] = "countermodel";
    j["model"] = model_to_json(outcome.countermodel->model);
    j["world"] = outcome.countermodel->world;
  } else {
    j["result"] = "valid_up_to_bound";
  }
  return j;
}

}  // namespace mlf
