#pragma once

// Desk-scale combinatorics of the concrete forcing posets: almost-disjoint
// codes over a fixed sequence enumeration, the pair poset of finite
// approximations with frozen intersections, the opens-and-reals poset, their
// centered merges, dense sets, finite generic-filter chains, and coding
// certificates.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mlf {

using Seq = std::vector<std::uint32_t>;

// Fixed bijection index <-> finite sequence over N: sequences ordered by
// weight (sum of entries plus length) ascending, lexicographically within a
// weight. Weight-w sequences occupy indices [2^(w-1), 2^w).
Seq seq_of(std::uint64_t index);
std::uint64_t seq_index(const Seq& s);

class InsufficientPrefixError : public std::runtime_error {
 public:
  explicit InsufficientPrefixError(const std::string& what) : std::runtime_error(what) {}
};

/// Prefix oracle for an infinite sequence over N: eventually periodic, or a
/// finite truncation that refuses queries past its known length. Queries
/// recompute from the fixed description, so concurrent use needs no locking.
class RealHandle {
 public:
  RealHandle(std::string name, Seq head, Seq period);
  static RealHandle truncated(std::string name, Seq known);

  const std::string& name() const { return name_; }
  std::uint32_t at(std::size_t i) const;  // throws InsufficientPrefixError
  Seq prefix(std::size_t k) const;
  bool in_basic_open(const Seq& s) const;  // s an initial segment of the real
  bool total() const { return !period_.empty(); }
  std::size_t known_length() const;        // SIZE_MAX when total
  bool same_sequence(const RealHandle& other) const;

 private:
  RealHandle() = default;

  std::string name_;
  Seq head_;
  Seq period_;  // empty = truncated oracle
};

/// First `count` elements of the almost-disjoint code S(f): the indices of
/// the initial segments of f, ascending.
std::vector<std::uint64_t> ad_code(const RealHandle& f, std::size_t count);

/// Membership-decidable subset of N, referenced by id inside conditions.
class SetHandle {
 public:
  static SetHandle ad_code_of(int id, RealHandle f);
  static SetHandle explicit_set(int id, std::string name, std::set<std::uint64_t> elems);

  int id() const { return id_; }
  const std::string& name() const { return name_; }
  bool contains(std::uint64_t x) const;
  /// k-th element in ascending order; only ad codes and explicit sets.
  std::uint64_t nth_element(std::size_t k) const;

 private:
  SetHandle() = default;
  int id_ = 0;
  std::string name_;
  std::optional<RealHandle> code_of_;
  std::set<std::uint64_t> elems_;
};

/// Condition <s, t>: s a finite set of naturals, t a finite set of handles
/// freezing the intersections s cap A.
struct PYCondition {
  std::set<std::uint64_t> s;
  std::set<int> t;  // SetHandle ids
  bool operator==(const PYCondition&) const = default;
};

bool py_extends(const PYCondition& stronger, const PYCondition& weaker,
                const std::vector<SetHandle>& handles);
/// Common extension <s, union of t's> of conditions sharing s.
PYCondition py_merge(const std::vector<PYCondition>& conditions);

/// Condition of the opens-and-reals poset: basic opens U_s named by their
/// stems plus real ids; new opens must avoid old reals.
struct PICondition {
  std::set<Seq> opens;
  std::set<int> reals;  // RealHandle ids
  bool operator==(const PICondition&) const = default;
};

bool pi_extends(const PICondition& stronger, const PICondition& weaker,
                const std::vector<RealHandle>& reals);
/// Common extension (the union) of conditions sharing the opens component.
PICondition pi_merge_class(const std::vector<PICondition>& conditions);

/// Stem t^<j> where t is the longest common initial segment of the reals and
/// j the least value differing from every real's next entry; no input real
/// lies in the returned basic open.
Seq avoid_basic_open(const std::vector<RealHandle>& reals);

template <typename Cond>
struct DenseSpec {
  std::string name;
  std::function<bool(const Cond&)> hits;
  std::function<Cond(const Cond&)> extend;  // lands inside the dense set
};

/// Conditions containing some U_t with t extending s and length > N.
DenseSpec<PICondition> dense_DsN(Seq s, std::size_t N, std::vector<RealHandle> reals);
/// Conditions containing the given real; extension just adds it.
DenseSpec<PICondition> dense_Dalpha(int real_id);

// Dense sets of the pair poset used by chains and coding runs.
DenseSpec<PYCondition> dense_py_s_size(std::size_t k, std::vector<SetHandle> handles);
DenseSpec<PYCondition> dense_py_add_handle(int handle_id);
DenseSpec<PYCondition> dense_py_meet(int handle_id, std::size_t min_count,
                                     std::vector<SetHandle> handles);

/// c_0 = start, c_{i+1} = denses[i].extend(c_i); each c_{i+1} hits denses[i].
/// With an `extends` predicate every step is re-verified against the poset
/// order as the chain is built.
template <typename Cond>
std::vector<Cond> rasiowa_sikorski(
    Cond start, const std::vector<DenseSpec<Cond>>& denses,
    const std::function<bool(const Cond&, const Cond&)>& extends = {}) {
  std::vector<Cond> chain;
  chain.push_back(std::move(start));
  for (const auto& d : denses) {
    Cond next = d.extend(chain.back());
    if (!d.hits(next))
      throw std::runtime_error("dense set " + d.name + " missed by its own extension");
    if (extends && !extends(next, chain.back()))
      throw std::runtime_error("dense set " + d.name + " produced a non-extension");
    chain.push_back(std::move(next));
  }
  return chain;
}

bool py_chain_ok(const std::vector<PYCondition>& chain, const std::vector<SetHandle>& handles);
bool pi_chain_ok(const std::vector<PICondition>& chain, const std::vector<RealHandle>& reals);

struct CodingReport {
  struct PerHandle {
    int handle = 0;
    bool in_code_set = false;
    std::optional<std::size_t> frozen_at;  // first chain index with the handle in t
    std::set<std::uint64_t> frozen_intersection;
    bool frozen_stable = false;            // intersection unchanged afterwards
    std::vector<std::uint64_t> growth_witnesses;
  };
  std::vector<PerHandle> handles;
  bool ok = false;
  std::string failure;
};

/// Audits a chain built to code `code_set`: the intersection with each coded
/// handle freezes at a finite set, each other handle gathers at least
/// growth_steps witnessed elements.
CodingReport coding_certificate(const std::vector<PYCondition>& chain,
                                const std::vector<SetHandle>& handles,
                                const std::set<int>& code_set, std::size_t growth_steps);

nlohmann::json py_condition_to_json(const PYCondition& c);
nlohmann::json pi_condition_to_json(const PICondition& c);
nlohmann::json coding_report_to_json(const CodingReport& r);

}  // namespace mlf
