#include "mlf/kripke.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace mlf {

void Frame::init_worlds(std::vector<int> worlds) {
  worlds_ = std::move(worlds);
  for (std::size_t i = 0; i < worlds_.size(); ++i)
    if (!index_.emplace(worlds_[i], i).second)
      throw std::invalid_argument("duplicate world id " + std::to_string(worlds_[i]));
  rows_.assign(worlds_.size(), Bits(worlds_.size()));
}

Frame::Frame(std::vector<int> worlds, const std::vector<std::pair<int, int>>& edges) {
  init_worlds(std::move(worlds));
  for (const auto& [w, u] : edges) rows_[index_of(w)].set(index_of(u));
}

std::size_t Frame::index_of(int world_id) const {
  auto it = index_.find(world_id);
  if (it == index_.end())
    throw std::invalid_argument("unknown world id " + std::to_string(world_id));
  return it->second;
}

std::vector<std::pair<int, int>> Frame::edge_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (edge(i, j)) out.emplace_back(worlds_[i], worlds_[j]);
  return out;
}

Bits extension(const Model& m, const Formula& f) {
  const Frame& fr = m.frame;
  const std::size_t n = fr.size();
  switch (f.op()) {
    case Op::Atom: {
      Bits e(n);
      auto it = m.valuation.find(f.atom_name());
      if (it != m.valuation.end())
        for (int w : it->second) e.set(fr.index_of(w));
      return e;
    }
    case Op::Top: {
      Bits e(n);
      e.flip();
      return e;
    }
    case Op::Bot:
      return Bits(n);
    case Op::Not: {
      Bits e = extension(m, f.child(0));
      e.flip();
      return e;
    }
    case Op::And: {
      Bits e = extension(m, f.child(0));
      e &= extension(m, f.child(1));
      return e;
    }
    case Op::Or: {
      Bits e = extension(m, f.child(0));
      e |= extension(m, f.child(1));
      return e;
    }
    case Op::Implies: {
      Bits a = extension(m, f.child(0));
      a.flip();
      a |= extension(m, f.child(1));
      return a;
    }
    case Op::Iff: {
      Bits a = extension(m, f.child(0));
      a ^= extension(m, f.child(1));
      a.flip();
      return a;
    }
    case Op::Box: {
      Bits sub = extension(m, f.child(0));
      Bits e(n);
      for (std::size_t i = 0; i < n; ++i)
        if (fr.row(i).subset_of(sub)) e.set(i);
      return e;
    }
    case Op::Diamond: {
      Bits sub = extension(m, f.child(0));
      Bits e(n);
      for (std::size_t i = 0; i < n; ++i)
        if (fr.row(i).intersects(sub)) e.set(i);
      return e;
    }
  }
  throw std::logic_error("unreachable");
}

bool satisfies(const Model& m, int world_id, const Formula& f) {
  return extension(m, f).test(m.frame.index_of(world_id));
}

std::uint64_t eval_mask(const Formula& f, const std::vector<std::uint64_t>& rows,
                        std::uint64_t full, const std::map<std::string, std::uint64_t>& val) {
  switch (f.op()) {
    case Op::Atom: {
      auto it = val.find(f.atom_name());
      return it == val.end() ? 0 : it->second;
    }
    case Op::Top: return full;
    case Op::Bot: return 0;
    case Op::Not: return full & ~eval_mask(f.child(0), rows, full, val);
    case Op::And:
      return eval_mask(f.child(0), rows, full, val) & eval_mask(f.child(1), rows, full, val);
    case Op::Or:
      return eval_mask(f.child(0), rows, full, val) | eval_mask(f.child(1), rows, full, val);
    case Op::Implies:
      return (full & ~eval_mask(f.child(0), rows, full, val)) |
             eval_mask(f.child(1), rows, full, val);
    case Op::Iff:
      return full & ~(eval_mask(f.child(0), rows, full, val) ^
                      eval_mask(f.child(1), rows, full, val));
    case Op::Box: {
      std::uint64_t sub = eval_mask(f.child(0), rows, full, val);
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!(rows[i] & ~sub)) e |= std::uint64_t{1} << i;
      return e;
    }
    case Op::Diamond: {
      std::uint64_t sub = eval_mask(f.child(0), rows, full, val);
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i] & sub) e |= std::uint64_t{1} << i;
      return e;
    }
  }
  return 0;
}

bool valid_on_frame(const Frame& fr, const Formula& f) {
  const std::size_t n = fr.size();
  if (n == 0) return true;
  if (n > 64) throw std::invalid_argument("valid_on_frame: frame too large");
  std::vector<std::string> names;
  for (const auto& a : atoms_of(f)) names.push_back(a);
  const std::size_t k = names.size();
  if (k * n > 26)
    throw std::invalid_argument("valid_on_frame: valuation space too large");
  std::vector<std::uint64_t> rows(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (fr.edge(i, j)) rows[i] |= std::uint64_t{1} << j;
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  const std::uint64_t world_mask = full;
  const std::uint64_t total = std::uint64_t{1} << (k * n);
  std::map<std::string, std::uint64_t> val;
  for (std::uint64_t v = 0; v < total; ++v) {
    for (std::size_t a = 0; a < k; ++a) val[names[a]] = (v >> (a * n)) & world_mask;
    if (eval_mask(f, rows, full, val) != full) return false;
  }
  return true;
}

FrameProperties frame_properties(const Frame& fr) {
  const std::size_t n = fr.size();
  FrameProperties p{true, true, true};
  for (std::size_t i = 0; i < n; ++i)
    if (!fr.edge(i, i)) p.reflexive = false;
  for (std::size_t i = 0; i < n && p.transitive; ++i)
    for (std::size_t j = 0; j < n && p.transitive; ++j)
      if (fr.edge(i, j) && !fr.row(j).subset_of(fr.row(i))) p.transitive = false;
  for (std::size_t w = 0; w < n && p.directed; ++w)
    for (std::size_t v = 0; v < n && p.directed; ++v) {
      if (!fr.edge(w, v)) continue;
      for (std::size_t u = 0; u < n && p.directed; ++u) {
        if (!fr.edge(w, u)) continue;
        if (!fr.row(v).intersects(fr.row(u))) p.directed = false;
      }
    }
  return p;
}

Quotient quotient_clusters(const Frame& fr) {
  FrameProperties p = frame_properties(fr);
  if (!p.reflexive || !p.transitive)
    throw std::invalid_argument("quotient_clusters: frame is not a preorder");
  const std::size_t n = fr.size();
  std::vector<int> cls(n, -1);
  std::vector<std::size_t> reps;  // class index -> representative position
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] != -1) continue;
    const int c = static_cast<int>(reps.size());
    reps.push_back(i);
    cls[i] = c;
    for (std::size_t j = i + 1; j < n; ++j)
      if (fr.edge(i, j) && fr.edge(j, i)) cls[j] = c;
  }
  Quotient q;
  q.classes.resize(reps.size());
  for (std::size_t i = 0; i < n; ++i) q.classes[cls[i]].push_back(fr.world_at(i));
  q.leq.assign(reps.size(), std::vector<bool>(reps.size(), false));
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = 0; b < reps.size(); ++b) q.leq[a][b] = fr.edge(reps[a], reps[b]);
  return q;
}

AsPbaResult as_pba(const Frame& fr) {
  AsPbaResult res;
  FrameProperties p = frame_properties(fr);
  if (!p.reflexive || !p.transitive) {
    res.rejection = "frame is not a preorder";
    return res;
  }
  Quotient q = quotient_clusters(fr);
  const std::size_t k = q.classes.size();
  if (!std::has_single_bit(k)) {
    res.rejection = "quotient size " + std::to_string(k) + " is not a power of two";
    return res;
  }
  const int m = std::countr_zero(k);

  // Rank classes by predecessor count; in P(B) the count of A is 2^|A|.
  std::vector<std::size_t> pred(k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (q.leq[b][a]) ++pred[a];
  std::vector<std::size_t> atoms;  // classes with exactly the bottom and themselves below
  std::size_t bottoms = 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (pred[a] == 1) ++bottoms;
    if (pred[a] == 2) atoms.push_back(a);
  }
  if (bottoms != 1) {
    res.rejection = "no unique bottom cluster";
    return res;
  }
  if (static_cast<int>(atoms.size()) != m) {
    res.rejection = "atom count " + std::to_string(atoms.size()) + " does not match base size " +
                    std::to_string(m);
    return res;
  }

  // Map each class to the set of atoms below it and verify the map is an
  // order isomorphism onto <P({0..m-1}), subset>.
  std::vector<std::uint32_t> mask(k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (int i = 0; i < m; ++i)
      if (q.leq[atoms[i]][a]) mask[a] |= std::uint32_t{1} << i;
  std::vector<bool> seen(k, false);
  for (std::size_t a = 0; a < k; ++a) {
    if (mask[a] >= k || seen[mask[a]]) {
      res.rejection = "join structure does not match a powerset lattice";
      return res;
    }
    seen[mask[a]] = true;
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const bool sub = (mask[a] & ~mask[b]) == 0;
      if (q.leq[a][b] != sub) {
        res.rejection = "order is not isomorphic to a powerset lattice";
        return res;
      }
    }

  PBAStructure ps;
  ps.base_size = m;
  for (std::size_t a = 0; a < k; ++a) {
    auto& members = ps.cluster_members[mask[a]];
    for (int w : q.classes[a]) {
      ps.cluster_of[w] = mask[a];
      members.push_back(w);
    }
  }
  res.structure = std::move(ps);
  return res;
}

Frame pba_frame(const PBAStructure& ps) {
  std::vector<int> worlds;
  std::vector<std::uint32_t> mask_of;  // by position
  for (const auto& [mask, members] : ps.cluster_members)
    for (int w : members) {
      worlds.push_back(w);
      mask_of.push_back(mask);
    }
  return Frame::from_predicate(std::move(worlds), [&](std::size_t i, std::size_t j) {
    return (mask_of[i] & ~mask_of[j]) == 0;
  });
}

PbaEnumeration::PbaEnumeration(int m, int cluster_max) : m_(m), cluster_max_(cluster_max) {
  if (m < 0 || cluster_max < 0) throw std::invalid_argument("negative enumeration bound");
  if (cluster_max == 0) {
    done_ = true;
    return;
  }
  sizes_.assign(std::size_t{1} << m, 1);
}

std::optional<Frame> PbaEnumeration::next() {
  if (done_) return std::nullopt;
  // Build the frame for the current size function.
  PBAStructure ps;
  ps.base_size = m_;
  int id = 0;
  for (std::size_t mask = 0; mask < sizes_.size(); ++mask) {
    auto& members = ps.cluster_members[static_cast<std::uint32_t>(mask)];
    for (int c = 0; c < sizes_[mask]; ++c) members.push_back(id++);
  }
  Frame out = pba_frame(ps);
  // Advance the size function lexicographically (last coordinate fastest).
  std::size_t i = sizes_.size();
  while (i > 0) {
    --i;
    if (sizes_[i] < cluster_max_) {
      ++sizes_[i];
      return out;
    }
    sizes_[i] = 1;
  }
  done_ = true;
  return out;
}

std::vector<Frame> all_pbas(int m, int cluster_max) {
  std::vector<Frame> out;
  PbaEnumeration e(m, cluster_max);
  while (auto f = e.next()) out.push_back(std::move(*f));
  return out;
}

std::vector<Frame> all_pbas_up_to(int m_max, int cluster_max) {
  std::vector<Frame> out;
  for (int m = 0; m <= m_max; ++m)
    for (auto& f : all_pbas(m, cluster_max)) out.push_back(std::move(f));
  return out;
}

nlohmann::json frame_to_json(const Frame& fr) {
  nlohmann::json j;
  j["worlds"] = fr.worlds();
  auto rel = nlohmann::json::array();
  for (const auto& [w, u] : fr.edge_pairs()) rel.push_back({w, u});
  j["relation"] = std::move(rel);
  return j;
}

Frame frame_from_json(const nlohmann::json& j) {
  std::vector<int> worlds = j.at("worlds").get<std::vector<int>>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("relation"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Frame(std::move(worlds), edges);
}

nlohmann::json model_to_json(const Model& m) {
  nlohmann::json j = frame_to_json(m.frame);
  nlohmann::json val = nlohmann::json::object();
  for (const auto& [name, set] : m.valuation) val[name] = set;
  j["valuation"] = std::move(val);
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  Model m;
  m.frame = frame_from_json(j);
  if (j.contains("valuation"))
    for (const auto& [name, arr] : j.at("valuation").items())
      m.valuation[name] = arr.get<std::set<int>>();
  for (const auto& [name, set] : m.valuation)
    for (int w : set) m.frame.index_of(w);  // validates membership
  return m;
}

std::string frame_to_dot(const Frame& fr) {
  std::ostringstream out;
  out << "digraph frame {\n  compound=true;\n  node [shape=circle];\n";
  FrameProperties p = frame_properties(fr);
  if (!p.reflexive || !p.transitive) {
    for (int w : fr.worlds()) out << "  w" << w << " [label=\"" << w << "\"];\n";
    for (const auto& [w, u] : fr.edge_pairs())
      if (w != u) out << "  w" << w << " -> w" << u << ";\n";
    out << "}\n";
    return out.str();
  }
  Quotient q = quotient_clusters(fr);
  for (std::size_t c = 0; c < q.classes.size(); ++c) {
    out << "  subgraph cluster_" << c << " {\n    label=\"C" << c << "\";\n";
    for (int w : q.classes[c]) out << "    w" << w << " [label=\"" << w << "\"];\n";
    out << "  }\n";
  }
  // Covering edges of the induced order, anchored at first members.
  const std::size_t k = q.classes.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b || !q.leq[a][b]) continue;
      if (q.leq[b][a]) continue;  // same cluster cannot happen; skip symmetry
      bool covering = true;
      for (std::size_t c = 0; c < k && covering; ++c)
        if (c != a && c != b && q.leq[a][c] && q.leq[c][b] && !q.leq[c][a] && !q.leq[b][c])
          covering = false;
      if (!covering) continue;
      out << "  w" << q.classes[a][0] << " -> w" << q.classes[b][0] << " [ltail=cluster_" << a
          << ", lhead=cluster_" << b << "];\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace mlf
