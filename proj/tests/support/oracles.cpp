#include "support/oracles.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

std::vector<std::string> sorted_atoms(const mlf::Formula& f) {
  auto set = mlf::atoms_of(f);
  return {set.begin(), set.end()};
}

}  // namespace

std::vector<char> sat_worlds(const TinyFrame& fr, const TinyValuation& val,
                             const mlf::Formula& f) {
  using mlf::Op;
  std::vector<char> out(fr.n, 0);
  switch (f.op()) {
    case Op::Atom: {
      auto it = val.find(f.atom_name());
      if (it != val.end()) out = it->second;
      return out;
    }
    case Op::Top:
      std::fill(out.begin(), out.end(), 1);
      return out;
    case Op::Bot:
      return out;
    case Op::Not: {
      auto a = sat_worlds(fr, val, f.child(0));
      for (int w = 0; w < fr.n; ++w) out[w] = !a[w];
      return out;
    }
    case Op::And: {
      auto a = sat_worlds(fr, val, f.child(0));
      auto b = sat_worlds(fr, val, f.child(1));
      for (int w = 0; w < fr.n; ++w) out[w] = a[w] && b[w];
      return out;
    }
    case Op::Or: {
      auto a = sat_worlds(fr, val, f.child(0));
      auto b = sat_worlds(fr, val, f.child(1));
      for (int w = 0; w < fr.n; ++w) out[w] = a[w] || b[w];
      return out;
    }
    case Op::Implies: {
      auto a = sat_worlds(fr, val, f.child(0));
      auto b = sat_worlds(fr, val, f.child(1));
      for (int w = 0; w < fr.n; ++w) out[w] = !a[w] || b[w];
      return out;
    }
    case Op::Iff: {
      auto a = sat_worlds(fr, val, f.child(0));
      auto b = sat_worlds(fr, val, f.child(1));
      for (int w = 0; w < fr.n; ++w) out[w] = a[w] == b[w];
      return out;
    }
    case Op::Box: {
      auto a = sat_worlds(fr, val, f.child(0));
      for (int w = 0; w < fr.n; ++w) {
        out[w] = 1;
        for (int u : fr.succ[w])
          if (!a[u]) {
            out[w] = 0;
            break;
          }
      }
      return out;
    }
    case Op::Diamond: {
      auto a = sat_worlds(fr, val, f.child(0));
      for (int w = 0; w < fr.n; ++w) {
        out[w] = 0;
        for (int u : fr.succ[w])
          if (a[u]) {
            out[w] = 1;
            break;
          }
      }
      return out;
    }
  }
  return out;
}

bool tiny_valid(const TinyFrame& fr, const mlf::Formula& f) {
  const auto names = sorted_atoms(f);
  const std::size_t bits = names.size() * static_cast<std::size_t>(fr.n);
  if (bits > 30) throw std::invalid_argument("tiny_valid: valuation space too large");
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
    TinyValuation val;
    for (std::size_t a = 0; a < names.size(); ++a) {
      auto& flags = val[names[a]];
      flags.assign(fr.n, 0);
      for (int w = 0; w < fr.n; ++w)
        flags[w] = (v >> (a * fr.n + w)) & 1u;
    }
    auto sat = sat_worlds(fr, val, f);
    for (int w = 0; w < fr.n; ++w)
      if (!sat[w]) return false;
  }
  return true;
}

bool tiny_reflexive(const TinyFrame& fr) {
  for (int w = 0; w < fr.n; ++w)
    if (std::find(fr.succ[w].begin(), fr.succ[w].end(), w) == fr.succ[w].end()) return false;
  return true;
}

bool tiny_transitive(const TinyFrame& fr) {
  std::vector<std::vector<char>> adj(fr.n, std::vector<char>(fr.n, 0));
  for (int w = 0; w < fr.n; ++w)
    for (int u : fr.succ[w]) adj[w][u] = 1;
  for (int a = 0; a < fr.n; ++a)
    for (int b = 0; b < fr.n; ++b)
      for (int c = 0; c < fr.n; ++c)
        if (adj[a][b] && adj[b][c] && !adj[a][c]) return false;
  return true;
}

bool tiny_directed(const TinyFrame& fr) {
  std::vector<std::vector<char>> adj(fr.n, std::vector<char>(fr.n, 0));
  for (int w = 0; w < fr.n; ++w)
    for (int u : fr.succ[w]) adj[w][u] = 1;
  for (int w = 0; w < fr.n; ++w)
    for (int v = 0; v < fr.n; ++v)
      for (int u = 0; u < fr.n; ++u) {
        if (!adj[w][v] || !adj[w][u]) continue;
        bool ok = false;
        for (int z = 0; z < fr.n && !ok; ++z) ok = adj[v][z] && adj[u][z];
        if (!ok) return false;
      }
  return true;
}

namespace {

// Strict partial orders on k labeled points, as lt-bit rows. Built by adding
// point k with a (downset, upset) pair to each order on k-1 points; the
// restriction map makes the enumeration exact, no dedup needed.
using Lt = std::array<std::uint8_t, 6>;

std::vector<Lt> posets_on(int k) {
  std::vector<Lt> current{Lt{}};
  for (int x = 1; x < k; ++x) {
    std::vector<Lt> next;
    for (const Lt& lt : current) {
      for (std::uint32_t down = 0; down < (1u << x); ++down) {
        // down must be downward closed
        bool ok = true;
        for (int a = 0; a < x && ok; ++a)
          if ((down >> a) & 1u)
            for (int b = 0; b < x && ok; ++b)
              if ((lt[b] >> a) & 1u && !((down >> b) & 1u)) ok = false;
        if (!ok) continue;
        const std::uint32_t rest = ~down & ((1u << x) - 1);
        for (std::uint32_t up = rest;; up = (up - 1) & rest) {
          bool good = true;
          // up must be upward closed
          for (int a = 0; a < x && good; ++a)
            if ((up >> a) & 1u)
              for (int b = 0; b < x && good; ++b)
                if ((lt[a] >> b) & 1u && !((up >> b) & 1u)) good = false;
          // transitivity through x: everything below beats everything above
          for (int a = 0; a < x && good; ++a)
            if ((down >> a) & 1u)
              for (int b = 0; b < x && good; ++b)
                if ((up >> b) & 1u && !((lt[a] >> b) & 1u)) good = false;
          if (good) {
            Lt ext = lt;
            for (int a = 0; a < x; ++a)
              if ((down >> a) & 1u) ext[a] |= std::uint8_t{1} << x;
            ext[x] = static_cast<std::uint8_t>(up);
            next.push_back(ext);
          }
          if (up == 0) break;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

// Restricted growth strings: partitions of {0..n-1} into labeled blocks
// ordered by least element.
void partitions_rec(int n, int pos, int blocks, std::vector<int>& assign,
                    const std::function<void(const std::vector<int>&, int)>& fn) {
  if (pos == n) {
    fn(assign, blocks);
    return;
  }
  for (int b = 0; b <= blocks; ++b) {
    assign[pos] = b;
    partitions_rec(n, pos + 1, std::max(blocks, b + 1), assign, fn);
  }
}

std::uint64_t pack(const TinyFrame& fr, const std::vector<int>& perm) {
  std::uint64_t key = 0;
  std::vector<std::vector<char>> adj(fr.n, std::vector<char>(fr.n, 0));
  for (int w = 0; w < fr.n; ++w)
    for (int u : fr.succ[w]) adj[w][u] = 1;
  int bit = 0;
  for (int i = 0; i < fr.n; ++i)
    for (int j = 0; j < fr.n; ++j, ++bit)
      if (adj[perm[i]][perm[j]]) key |= std::uint64_t{1} << bit;
  return key;
}

// Minimal packed matrix over permutations respecting the degree invariant.
std::uint64_t canonical_key(const TinyFrame& fr) {
  std::vector<std::pair<std::pair<int, int>, int>> tagged;  // (out, in), world
  std::vector<int> indeg(fr.n, 0);
  for (int w = 0; w < fr.n; ++w)
    for (int u : fr.succ[w]) ++indeg[u];
  for (int w = 0; w < fr.n; ++w)
    tagged.push_back({{static_cast<int>(fr.succ[w].size()), indeg[w]}, w});
  std::sort(tagged.begin(), tagged.end());
  std::vector<int> perm(fr.n);
  for (int i = 0; i < fr.n; ++i) perm[i] = tagged[i].second;
  std::uint64_t best = ~std::uint64_t{0};
  // Permute within equal-invariant runs only.
  std::vector<std::pair<int, int>> runs;
  int start = 0;
  for (int i = 1; i <= fr.n; ++i)
    if (i == fr.n || tagged[i].first != tagged[start].first) {
      runs.emplace_back(start, i);
      start = i;
    }
  std::function<void(std::size_t)> rec = [&](std::size_t run) {
    if (run == runs.size()) {
      best = std::min(best, pack(fr, perm));
      return;
    }
    auto [lo, hi] = runs[run];
    std::sort(perm.begin() + lo, perm.begin() + hi);
    do {
      rec(run + 1);
    } while (std::next_permutation(perm.begin() + lo, perm.begin() + hi));
  };
  rec(0);
  return best;
}

}  // namespace

const std::vector<TinyFrame>& rtd_frame_catalog(int max_worlds) {
  static std::map<int, std::vector<TinyFrame>> cache;
  auto it = cache.find(max_worlds);
  if (it != cache.end()) return it->second;

  std::vector<TinyFrame> frames;
  std::set<std::pair<int, std::uint64_t>> seen;
  std::vector<std::vector<Lt>> posets(max_worlds + 1);
  for (int k = 1; k <= max_worlds; ++k) posets[k] = posets_on(k);

  for (int n = 1; n <= max_worlds; ++n) {
    std::vector<int> assign(n);
    std::function<void(const std::vector<int>&, int)> handle = [&](const std::vector<int>& a,
                                                                   int blocks) {
      for (const Lt& lt : posets[blocks]) {
        TinyFrame fr;
        fr.n = n;
        fr.succ.assign(n, {});
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (a[i] == a[j] || ((lt[a[i]] >> a[j]) & 1u)) fr.succ[i].push_back(j);
        if (!tiny_directed(fr)) continue;
        const std::uint64_t key = canonical_key(fr);
        if (seen.emplace(n, key).second) frames.push_back(std::move(fr));
      }
    };
    partitions_rec(n, 0, 0, assign, handle);
  }
  auto [pos, _] = cache.emplace(max_worlds, std::move(frames));
  return pos->second;
}

bool brute_force_refutable(const mlf::Formula& f, int max_worlds) {
  for (const TinyFrame& fr : rtd_frame_catalog(max_worlds))
    if (!tiny_valid(fr, f)) return true;
  return false;
}

}  // namespace oracle
