#include "mlf/posets.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace mlf {

namespace {

constexpr std::size_t kSearchCap = 1u << 20;

std::uint64_t weight_of(const Seq& s) {
  std::uint64_t w = s.size();
  for (auto e : s) w += e;
  return w;
}

// Number of sequences of weight exactly w.
std::uint64_t count_of_weight(std::uint64_t w) {
  return w == 0 ? 1 : std::uint64_t{1} << (w - 1);
}

}  // namespace

std::uint64_t seq_index(const Seq& s) {
  const std::uint64_t w = weight_of(s);
  if (w >= 63) throw std::invalid_argument("sequence weight too large to index");
  if (w == 0) return 0;
  // Lexicographic rank within the weight class, then offset by the class start.
  std::uint64_t rank = 0;
  std::uint64_t rem = w;
  for (auto e : s) {
    // Sequences starting with a smaller first entry come first.
    // sum_{d < e} count(rem - d - 1) = 2^(rem-1) - 2^(rem-e-1).
    rank += (std::uint64_t{1} << (rem - 1)) - (std::uint64_t{1} << (rem - e - 1));
    rem -= e + 1;
  }
  return (std::uint64_t{1} << (w - 1)) + rank;
}

Seq seq_of(std::uint64_t index) {
  if (index == 0) return {};
  const int w = std::bit_width(index);  // weight class [2^(w-1), 2^w)
  std::uint64_t rank = index - (std::uint64_t{1} << (w - 1));
  Seq out;
  std::uint64_t rem = static_cast<std::uint64_t>(w);
  while (rem > 0) {
    std::uint32_t e = 0;
    for (;; ++e) {
      const std::uint64_t here = count_of_weight(rem - e - 1);
      if (rank < here) break;
      rank -= here;
    }
    out.push_back(e);
    rem -= e + 1;
  }
  return out;
}

RealHandle::RealHandle(std::string name, Seq head, Seq period)
    : name_(std::move(name)), head_(std::move(head)), period_(std::move(period)) {
  if (period_.empty()) throw std::invalid_argument("eventually periodic real needs a period");
}

RealHandle RealHandle::truncated(std::string name, Seq known) {
  RealHandle r;
  r.name_ = std::move(name);
  r.head_ = std::move(known);
  return r;
}

std::uint32_t RealHandle::at(std::size_t i) const {
  if (i < head_.size()) return head_[i];
  if (period_.empty())
    throw InsufficientPrefixError("real " + name_ + " known only to length " +
                                  std::to_string(head_.size()));
  return period_[(i - head_.size()) % period_.size()];
}

Seq RealHandle::prefix(std::size_t k) const {
  Seq out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(at(i));
  return out;
}

bool RealHandle::in_basic_open(const Seq& s) const {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (at(i) != s[i]) return false;
  return true;
}

std::size_t RealHandle::known_length() const {
  return period_.empty() ? head_.size() : SIZE_MAX;
}

bool RealHandle::same_sequence(const RealHandle& other) const {
  if (!total() || !other.total()) {
    const std::size_t bound = std::min(known_length(), other.known_length());
    for (std::size_t i = 0; i < bound; ++i)
      if (at(i) != other.at(i)) return false;
    throw InsufficientPrefixError("prefixes too short to separate " + name_ + " and " +
                                  other.name_);
  }
  // Eventually periodic sequences agree iff they agree on a prefix covering
  // both heads plus the period cycle.
  const std::size_t heads = std::max(head_.size(), other.head_.size());
  const std::size_t cycle = std::lcm(period_.size(), other.period_.size());
  for (std::size_t i = 0; i < heads + cycle; ++i)
    if (at(i) != other.at(i)) return false;
  return true;
}

std::vector<std::uint64_t> ad_code(const RealHandle& f, std::size_t count) {
  // Prefix weights grow strictly with length, so enumerating prefixes by
  // length yields ascending indices.
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::size_t len = 0; len < count; ++len) out.push_back(seq_index(f.prefix(len)));
  return out;
}

SetHandle SetHandle::ad_code_of(int id, RealHandle f) {
  SetHandle h;
  h.id_ = id;
  h.name_ = "S(" + f.name() + ")";
  h.code_of_ = std::move(f);
  return h;
}

SetHandle SetHandle::explicit_set(int id, std::string name, std::set<std::uint64_t> elems) {
  SetHandle h;
  h.id_ = id;
  h.name_ = std::move(name);
  h.elems_ = std::move(elems);
  return h;
}

bool SetHandle::contains(std::uint64_t x) const {
  if (code_of_) return code_of_->in_basic_open(seq_of(x));
  return elems_.count(x) > 0;
}

std::uint64_t SetHandle::nth_element(std::size_t k) const {
  if (code_of_) return seq_index(code_of_->prefix(k));
  if (k >= elems_.size()) throw std::out_of_range("explicit set exhausted");
  return *std::next(elems_.begin(), static_cast<std::ptrdiff_t>(k));
}

bool py_extends(const PYCondition& stronger, const PYCondition& weaker,
                const std::vector<SetHandle>& handles) {
  if (!std::includes(stronger.s.begin(), stronger.s.end(), weaker.s.begin(), weaker.s.end()))
    return false;
  if (!std::includes(stronger.t.begin(), stronger.t.end(), weaker.t.begin(), weaker.t.end()))
    return false;
  // Frozen intersections: nothing new in s may hit a set already in t.
  for (std::uint64_t x : stronger.s) {
    if (weaker.s.count(x)) continue;
    for (int id : weaker.t)
      if (handles.at(id).contains(x)) return false;
  }
  return true;
}

PYCondition py_merge(const std::vector<PYCondition>& conditions) {
  if (conditions.empty()) throw std::invalid_argument("py_merge needs at least one condition");
  PYCondition out = conditions.front();
  for (const auto& c : conditions) {
    if (c.s != out.s)
      throw std::invalid_argument("py_merge: conditions must share the first component");
    out.t.insert(c.t.begin(), c.t.end());
  }
  return out;
}

bool pi_extends(const PICondition& stronger, const PICondition& weaker,
                const std::vector<RealHandle>& reals) {
  if (!std::includes(stronger.opens.begin(), stronger.opens.end(), weaker.opens.begin(),
                     weaker.opens.end()))
    return false;
  if (!std::includes(stronger.reals.begin(), stronger.reals.end(), weaker.reals.begin(),
                     weaker.reals.end()))
    return false;
  for (const Seq& s : stronger.opens) {
    if (weaker.opens.count(s)) continue;
    for (int id : weaker.reals)
      if (reals.at(id).in_basic_open(s)) return false;  // throws when undecidable
  }
  return true;
}

PICondition pi_merge_class(const std::vector<PICondition>& conditions) {
  if (conditions.empty())
    throw std::invalid_argument("pi_merge_class needs at least one condition");
  PICondition out = conditions.front();
  for (const auto& c : conditions) {
    if (c.opens != out.opens)
      throw std::invalid_argument("pi_merge_class: conditions must share the opens component");
    out.reals.insert(c.reals.begin(), c.reals.end());
  }
  return out;
}

Seq avoid_basic_open(const std::vector<RealHandle>& reals) {
  if (reals.empty()) throw std::invalid_argument("avoid_basic_open needs at least one real");
  for (std::size_t i = 0; i < reals.size(); ++i)
    for (std::size_t j = i + 1; j < reals.size(); ++j)
      if (reals[i].same_sequence(reals[j]))
        throw std::invalid_argument("avoid_basic_open: reals must be pairwise distinct");
  Seq stem;
  if (reals.size() > 1) {
    for (std::size_t pos = 0;; ++pos) {
      const std::uint32_t v = reals[0].at(pos);
      bool agree = true;
      for (const auto& r : reals)
        if (r.at(pos) != v) {
          agree = false;
          break;
        }
      if (!agree) break;
      stem.push_back(v);
    }
  }
  std::set<std::uint32_t> next;
  for (const auto& r : reals) next.insert(r.at(stem.size()));
  std::uint32_t j = 0;
  while (next.count(j)) ++j;
  stem.push_back(j);
  return stem;
}

namespace {

bool is_prefix(const Seq& p, const Seq& s) {
  return p.size() <= s.size() && std::equal(p.begin(), p.end(), s.begin());
}

}  // namespace

DenseSpec<PICondition> dense_DsN(Seq s, std::size_t N, std::vector<RealHandle> reals) {
  auto hits = [s, N](const PICondition& p) {
    for (const Seq& t : p.opens)
      if (is_prefix(s, t) && t.size() > N) return true;
    return false;
  };
  auto extend = [s, N, reals, hits](const PICondition& p) {
    if (hits(p)) return p;
    // Reals of p inside U_s constrain the new stem; everything else already
    // avoids any extension of s.
    std::vector<const RealHandle*> inside;
    for (int id : p.reals)
      if (reals.at(id).in_basic_open(s)) inside.push_back(&reals.at(id));
    Seq t;
    if (inside.empty()) {
      t = s;
    } else if (inside.size() == 1) {
      t = inside[0]->prefix(std::max(N, s.size()));
      std::uint32_t j = inside[0]->at(t.size()) == 0 ? 1 : 0;
      t.push_back(j);
    } else {
      std::vector<RealHandle> group;
      for (auto* r : inside) group.push_back(*r);
      t = avoid_basic_open(group);  // extends the common stem, which extends s
    }
    while (t.size() <= N) t.push_back(0);
    PICondition q = p;
    q.opens.insert(t);
    return q;
  };
  return {"D_(" + std::to_string(seq_index(s)) + "," + std::to_string(N) + ")", hits, extend};
}

DenseSpec<PICondition> dense_Dalpha(int real_id) {
  auto hits = [real_id](const PICondition& p) { return p.reals.count(real_id) > 0; };
  auto extend = [real_id](const PICondition& p) {
    PICondition q = p;
    q.reals.insert(real_id);  // adding reals is never limited
    return q;
  };
  return {"D_real:" + std::to_string(real_id), hits, extend};
}

DenseSpec<PYCondition> dense_py_s_size(std::size_t k, std::vector<SetHandle> handles) {
  auto hits = [k](const PYCondition& c) { return c.s.size() >= k; };
  auto extend = [k, handles](const PYCondition& c) {
    PYCondition q = c;
    std::uint64_t x = 0;
    while (q.s.size() < k) {
      if (x > kSearchCap)
        throw std::runtime_error("dense_py_s_size: no admissible element found");
      bool frozen = q.s.count(x) > 0;
      for (auto it = q.t.begin(); !frozen && it != q.t.end(); ++it)
        frozen = handles.at(*it).contains(x);
      if (!frozen) q.s.insert(x);
      ++x;
    }
    return q;
  };
  return {"D_size:" + std::to_string(k), hits, extend};
}

DenseSpec<PYCondition> dense_py_add_handle(int handle_id) {
  auto hits = [handle_id](const PYCondition& c) { return c.t.count(handle_id) > 0; };
  auto extend = [handle_id](const PYCondition& c) {
    PYCondition q = c;
    q.t.insert(handle_id);
    return q;
  };
  return {"D_freeze:" + std::to_string(handle_id), hits, extend};
}

DenseSpec<PYCondition> dense_py_meet(int handle_id, std::size_t min_count,
                                     std::vector<SetHandle> handles) {
  auto count_in = [handle_id, handles](const PYCondition& c) {
    std::size_t n = 0;
    for (std::uint64_t x : c.s)
      if (handles.at(handle_id).contains(x)) ++n;
    return n;
  };
  auto hits = [count_in, min_count](const PYCondition& c) { return count_in(c) >= min_count; };
  auto extend = [handle_id, min_count, handles, count_in](const PYCondition& c) {
    PYCondition q = c;
    if (q.t.count(handle_id))
      throw std::runtime_error("dense_py_meet: intersection with handle " +
                               std::to_string(handle_id) + " is frozen");
    std::size_t k = 0;
    while (count_in(q) < min_count) {
      if (k > kSearchCap) throw std::runtime_error("dense_py_meet: search exhausted");
      const std::uint64_t x = handles.at(handle_id).nth_element(k++);
      if (q.s.count(x)) continue;
      bool frozen = false;
      for (auto it = q.t.begin(); !frozen && it != q.t.end(); ++it)
        frozen = handles.at(*it).contains(x);
      if (!frozen) q.s.insert(x);
    }
    return q;
  };
  return {"D_meet:" + std::to_string(handle_id) + ":" + std::to_string(min_count), hits, extend};
}

bool py_chain_ok(const std::vector<PYCondition>& chain, const std::vector<SetHandle>& handles) {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!py_extends(chain[i + 1], chain[i], handles)) return false;
  return true;
}

bool pi_chain_ok(const std::vector<PICondition>& chain, const std::vector<RealHandle>& reals) {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!pi_extends(chain[i + 1], chain[i], reals)) return false;
  return true;
}

CodingReport coding_certificate(const std::vector<PYCondition>& chain,
                                const std::vector<SetHandle>& handles,
                                const std::set<int>& code_set, std::size_t growth_steps) {
  CodingReport rep;
  if (chain.empty()) {
    rep.failure = "empty chain";
    return rep;
  }
  auto intersect = [&](const PYCondition& c, const SetHandle& h) {
    std::set<std::uint64_t> out;
    for (std::uint64_t x : c.s)
      if (h.contains(x)) out.insert(x);
    return out;
  };
  rep.ok = true;
  for (const auto& h : handles) {
    CodingReport::PerHandle per;
    per.handle = h.id();
    per.in_code_set = code_set.count(h.id()) > 0;
    if (per.in_code_set) {
      for (std::size_t i = 0; i < chain.size(); ++i)
        if (chain[i].t.count(h.id())) {
          per.frozen_at = i;
          per.frozen_intersection = intersect(chain[i], h);
          break;
        }
      if (!per.frozen_at) {
        rep.ok = false;
        rep.failure = "handle " + std::to_string(h.id()) + " never entered the t component";
      } else {
        per.frozen_stable = true;
        for (std::size_t i = *per.frozen_at; i < chain.size(); ++i)
          if (intersect(chain[i], h) != per.frozen_intersection) {
            per.frozen_stable = false;
            rep.ok = false;
            rep.failure = "frozen intersection moved for handle " + std::to_string(h.id());
            break;
          }
      }
    } else {
      const auto final_hits = intersect(chain.back(), h);
      per.growth_witnesses.assign(final_hits.begin(), final_hits.end());
      if (per.growth_witnesses.size() < growth_steps) {
        rep.ok = false;
        rep.failure = "handle " + std::to_string(h.id()) + " has only " +
                      std::to_string(per.growth_witnesses.size()) + " witnesses";
      }
    }
    rep.handles.push_back(std::move(per));
  }
  return rep;
}

nlohmann::json py_condition_to_json(const PYCondition& c) {
  return {{"s", c.s}, {"t", c.t}};
}

nlohmann::json pi_condition_to_json(const PICondition& c) {
  auto opens = nlohmann::json::array();
  for (const Seq& s : c.opens) opens.push_back(s);
  return {{"opens", opens}, {"reals", c.reals}};
}

nlohmann::json coding_report_to_json(const CodingReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  if (!r.failure.empty()) j["failure"] = r.failure;
  auto arr = nlohmann::json::array();
  for (const auto& per : r.handles) {
    nlohmann::json h;
    h["handle"] = per.handle;
    h["coded"] = per.in_code_set;
    if (per.in_code_set) {
      if (per.frozen_at) h["frozen_at"] = *per.frozen_at;
      h["frozen_intersection"] = per.frozen_intersection;
      h["frozen_stable"] = per.frozen_stable;
    } else {
      h["growth_witnesses"] = per.growth_witnesses;
    }
    arr.push_back(std::move(h));
  }
  j["handles"] = std::move(arr);
  return j;
}

}  // namespace mlf
