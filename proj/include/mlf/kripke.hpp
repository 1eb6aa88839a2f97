#pragma once

// Finite Kripke frames and models: satisfaction, frame-class predicates,
// recognition of pre-Boolean-algebras and their enumeration.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mlf/bits.hpp"
#include "mlf/formula.hpp"

namespace mlf {

/// Finite frame: an ordered list of distinct world ids plus an accessibility
/// relation, stored as one successor bit-row per world position.
class Frame {
 public:
  Frame() = default;
  Frame(std::vector<int> worlds, const std::vector<std::pair<int, int>>& edges);

  template <typename Pred>
  static Frame from_predicate(std::vector<int> worlds, Pred related) {
    Frame f;
    f.init_worlds(std::move(worlds));
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (related(i, j)) f.rows_[i].set(j);
    return f;
  }

  std::size_t size() const { return worlds_.size(); }
  const std::vector<int>& worlds() const { return worlds_; }
  int world_at(std::size_t i) const { return worlds_[i]; }
  std::size_t index_of(int world_id) const;  // throws on unknown id

  bool edge(std::size_t i, std::size_t j) const { return rows_[i].test(j); }
  const Bits& row(std::size_t i) const { return rows_[i]; }
  std::vector<std::pair<int, int>> edge_pairs() const;

  bool operator==(const Frame& o) const { return worlds_ == o.worlds_ && rows_ == o.rows_; }

 private:
  void init_worlds(std::vector<int> worlds);

  std::vector<int> worlds_;
  std::vector<Bits> rows_;
  std::map<int, std::size_t> index_;
};

struct Model {
  Frame frame;
  std::map<std::string, std::set<int>> valuation;  // atom -> set of world ids
};

struct FrameProperties {
  bool reflexive = false;
  bool transitive = false;
  bool directed = false;  // wRv and wRu imply some z with vRz and uRz
};

/// Cluster decomposition of a frame certified isomorphic to <P(B), subset>.
/// Clusters are keyed by the subset of {0..m-1} they map to.
struct PBAStructure {
  int base_size = 0;
  std::map<int, std::uint32_t> cluster_of;                     // world id -> mask
  std::map<std::uint32_t, std::vector<int>> cluster_members;   // mask -> world ids
};

struct Quotient {
  std::vector<std::vector<int>> classes;  // world ids; class order is canonical
  std::vector<std::vector<bool>> leq;     // induced order on classes
};

struct AsPbaResult {
  std::optional<PBAStructure> structure;
  std::string rejection;  // set when structure is empty
  bool ok() const { return structure.has_value(); }
};

bool satisfies(const Model& m, int world_id, const Formula& f);
/// Extension of f in m as a bit set over world positions.
Bits extension(const Model& m, const Formula& f);

/// Extension of f as a world mask over a frame of at most 64 worlds given as
/// successor row masks. Intended for valuation sweeps.
std::uint64_t eval_mask(const Formula& f, const std::vector<std::uint64_t>& rows,
                        std::uint64_t full, const std::map<std::string, std::uint64_t>& val);

bool valid_on_frame(const Frame& fr, const Formula& f);

FrameProperties frame_properties(const Frame& fr);

Quotient quotient_clusters(const Frame& fr);  // throws on non-preorder frames

AsPbaResult as_pba(const Frame& fr);

/// Canonical frame of a certified structure: worlds grouped by cluster in
/// ascending mask order, w R u iff cluster_of(w) is a subset of cluster_of(u).
Frame pba_frame(const PBAStructure& ps);

/// Streams one frame per cluster-size function c : P(B) -> {1..cluster_max}
/// for |B| = m exactly, in lexicographic c order (masks ascending).
class PbaEnumeration {
 public:
  PbaEnumeration(int m, int cluster_max);
  std::optional<Frame> next();

 private:
  int m_;
  int cluster_max_;
  std::vector<int> sizes_;
  bool done_ = false;
};

std::vector<Frame> all_pbas(int m, int cluster_max);
std::vector<Frame> all_pbas_up_to(int m_max, int cluster_max);

nlohmann::json frame_to_json(const Frame& fr);
Frame frame_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);
std::string frame_to_dot(const Frame& fr);

}  // namespace mlf
