#include "mlf/multiverse.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace mlf {

namespace {

constexpr std::size_t kWitnessCap = 8;

std::vector<int> t_values(const ControlFamily& fam) {
  std::vector<int> vals;
  if (!fam.t_buttons) return vals;
  for (int v = 0; v <= fam.t_buttons->count; ++v) vals.push_back(v);
  if (fam.t_buttons->unbounded) vals.push_back(kTInfinity);
  return vals;
}

std::vector<std::pair<int, int>> ratchet_values(const ControlFamily& fam) {
  std::vector<std::pair<int, int>> vals;
  if (!fam.ratchet) return vals;
  for (int a = 0; a < fam.ratchet->alpha_max; ++a)
    for (int k = 0; k < fam.ratchet->k_max; ++k) vals.emplace_back(a, k);
  return vals;
}

int tail_start(const ControlFamily& fam) {
  return fam.t_buttons->count - fam.t_tail() + 1;
}

bool in_tail(const ControlFamily& fam, int v) {
  return v != kTInfinity && v >= tail_start(fam);
}

// Quotient order of the truncated ladder: tail values are mutually reachable.
bool leq_t(const ControlFamily& fam, int v, int w) {
  if (v == w) return true;
  if (w == kTInfinity) return true;
  if (v == kTInfinity) return false;
  if (in_tail(fam, v) && in_tail(fam, w)) return true;
  return v < w;
}

int t_rank(const ControlFamily& fam, int v) {
  if (v == kTInfinity) return kTInfinity;
  return std::min(v, tail_start(fam));
}

template <typename Fn>
void enumerate_states(const ControlFamily& fam, Fn fn) {
  const std::uint32_t pushed_lim = std::uint32_t{1} << fam.buttons;
  const std::uint32_t switch_lim = std::uint32_t{1} << fam.switches;
  const int n_lim = std::max(fam.nswitch, 1);
  auto rvals = ratchet_values(fam);
  if (rvals.empty()) rvals.emplace_back(0, 0);
  auto tvals = t_values(fam);
  if (tvals.empty()) tvals.push_back(0);
  MState s;
  for (std::uint32_t p = 0; p < pushed_lim; ++p)
    for (std::uint32_t sw = 0; sw < switch_lim; ++sw)
      for (int j = 0; j < n_lim; ++j)
        for (auto [a, k] : rvals)
          for (int t : tvals) {
            s.pushed = p;
            s.switch_bits = sw;
            s.nswitch_val = j;
            s.ratchet_alpha = a;
            s.ratchet_k = k;
            s.t_sup = t;
            fn(s);
          }
}

std::string atom_name(const Formula& f) { return f.atom_name(); }

}  // namespace

int ControlFamily::t_tail() const {
  if (!t_buttons) return 0;
  const int want = nswitch >= 2 ? nswitch : 1;
  return want <= t_buttons->count ? want : 1;
}

int ControlFamily::t_stable_max() const {
  if (!t_buttons) return 0;
  return t_buttons->count - t_tail() + 1;
}

void ControlFamily::validate() const {
  if (buttons < 0 || buttons > 20 || switches < 0 || switches > 20)
    throw std::invalid_argument("button/switch counts out of range");
  if (nswitch < 0) throw std::invalid_argument("negative n-switch arity");
  if (ratchet && (ratchet->alpha_max < 1 || ratchet->k_max < 1))
    throw std::invalid_argument("ratchet bounds must be positive");
  if (t_buttons && t_buttons->count < 0)
    throw std::invalid_argument("t-button count must be nonnegative");
  if (regime == Regime::HybridAdversarial && !t_buttons)
    throw std::invalid_argument("hybrid regime needs a t-button ladder");
  if (wire_button0_to_switch0 && (buttons < 1 || switches < 1))
    throw std::invalid_argument("miswiring needs a button and a switch");
}

bool state_in_bounds(const ControlFamily& fam, const MState& s) {
  if (s.pushed >> fam.buttons) return false;
  if (s.switch_bits >> fam.switches) return false;
  if (s.nswitch_val < 0 || s.nswitch_val >= std::max(fam.nswitch, 1)) return false;
  if (fam.ratchet) {
    if (s.ratchet_alpha < 0 || s.ratchet_alpha >= fam.ratchet->alpha_max) return false;
    if (s.ratchet_k < 0 || s.ratchet_k >= fam.ratchet->k_max) return false;
  } else if (s.ratchet_alpha != 0 || s.ratchet_k != 0) {
    return false;
  }
  if (fam.t_buttons) {
    if (s.t_sup == kTInfinity) return fam.t_buttons->unbounded;
    if (s.t_sup < 0 || s.t_sup > fam.t_buttons->count) return false;
  } else if (s.t_sup != 0) {
    return false;
  }
  return true;
}

bool mstate_leq(const ControlFamily& fam, const MState& s, const MState& t) {
  if (s.pushed & ~t.pushed) return false;
  if (std::pair(t.ratchet_alpha, t.ratchet_k) < std::pair(s.ratchet_alpha, s.ratchet_k))
    return false;
  if (fam.t_buttons && !leq_t(fam, s.t_sup, t.t_sup)) return false;
  if (fam.regime == Regime::HybridAdversarial && t.nswitch_val != s.nswitch_val) {
    // Forcing a new n-switch value costs t-buttons; once the ladder is
    // saturated (tail under the decoupled reading, or infinite) it is free.
    const bool climbed = t_rank(fam, t.t_sup) > t_rank(fam, s.t_sup);
    const bool free_zone =
        s.t_sup == kTInfinity || (fam.sw_decoupled && in_tail(fam, s.t_sup));
    if (!climbed && !free_zone) return false;
  }
  return true;
}

std::vector<MState> successors(const ControlFamily& fam, const MState& s) {
  fam.validate();
  if (!state_in_bounds(fam, s)) throw std::invalid_argument("state out of bounds");
  std::vector<MState> out;
  enumerate_states(fam, [&](const MState& t) {
    if (mstate_leq(fam, s, t)) out.push_back(t);
  });
  return out;
}

StateSpace StateSpace::reachable(const ControlFamily& fam, const MState& initial,
                                 std::size_t cap) {
  fam.validate();
  if (!state_in_bounds(fam, initial)) throw std::invalid_argument("initial state out of bounds");
  StateSpace sp;
  sp.fam_ = fam;
  // The relation is transitive, so one sweep of mstate_leq from the initial
  // state is the full reachable set.
  enumerate_states(fam, [&](const MState& t) {
    if (mstate_leq(fam, initial, t)) sp.states_.push_back(t);
  });
  if (sp.states_.size() > cap)
    throw std::runtime_error("state-space size cap exceeded: " +
                             std::to_string(sp.states_.size()) + " > " + std::to_string(cap));
  sp.initial_ = sp.index_of(initial);
  return sp;
}

std::size_t StateSpace::index_of(const MState& s) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), s,
                             [](const MState& a, const MState& b) { return a.key() < b.key(); });
  if (it == states_.end() || !(*it == s)) throw std::invalid_argument("state not in space");
  return static_cast<std::size_t>(it - states_.begin());
}

Formula button_atom(int i) { return atom("b:" + std::to_string(i)); }
Formula switch_atom(int i) { return atom("s:" + std::to_string(i)); }
Formula nswitch_atom(int j) { return atom("sw:" + std::to_string(j)); }
Formula ratchet_geq_atom(int alpha, int k) {
  return atom("r:" + std::to_string(alpha) + "," + std::to_string(k));
}
Formula t_still_true_atom(int i) { return atom("T:" + std::to_string(i)); }
Formula t_sup_atom(int k) { return atom("Rk:" + std::to_string(k)); }
Formula t_sup_infinite_atom() { return atom("supinf"); }

std::vector<std::string> declared_atoms(const ControlFamily& fam) {
  std::vector<std::string> out;
  for (int i = 0; i < fam.buttons; ++i) out.push_back(atom_name(button_atom(i)));
  for (int i = 0; i < fam.switches; ++i) out.push_back(atom_name(switch_atom(i)));
  for (int j = 0; j < fam.nswitch; ++j) out.push_back(atom_name(nswitch_atom(j)));
  if (fam.ratchet)
    for (int a = 0; a < fam.ratchet->alpha_max; ++a)
      for (int k = 0; k < fam.ratchet->k_max; ++k)
        out.push_back(atom_name(ratchet_geq_atom(a, k)));
  if (fam.t_buttons) {
    for (int i = 1; i <= fam.t_stable_max(); ++i) out.push_back(atom_name(t_still_true_atom(i)));
    for (int k = 0; k <= fam.t_buttons->count; ++k) out.push_back(atom_name(t_sup_atom(k)));
    if (fam.t_buttons->unbounded) out.push_back("supinf");
  }
  return out;
}

bool atom_holds(const ControlFamily& fam, const MState& s, const std::string& a) {
  auto num = [](const std::string& str, std::size_t from) { return std::stoi(str.substr(from)); };
  if (a.rfind("b:", 0) == 0) {
    const int i = num(a, 2);
    if (i == 0 && fam.wire_button0_to_switch0) return (s.switch_bits >> 0) & 1u;
    return (s.pushed >> i) & 1u;
  }
  if (a.rfind("sw:", 0) == 0) return s.nswitch_val == num(a, 3);
  if (a.rfind("s:", 0) == 0) return (s.switch_bits >> num(a, 2)) & 1u;
  if (a.rfind("r:", 0) == 0) {
    const auto comma = a.find(',');
    const int alpha = num(a.substr(0, comma), 2);
    const int k = num(a, comma + 1);
    return std::pair(s.ratchet_alpha, s.ratchet_k) >= std::pair(alpha, k);
  }
  if (a.rfind("T:", 0) == 0) return s.t_sup != kTInfinity && s.t_sup < num(a, 2);
  if (a.rfind("Rk:", 0) == 0) return s.t_sup == num(a, 3);
  if (a == "supinf") return s.t_sup == kTInfinity;
  throw std::invalid_argument("unknown control atom: " + a);
}

ExportedModel as_kripke_model(const ControlFamily& fam, const MState& initial, std::size_t cap) {
  StateSpace sp = StateSpace::reachable(fam, initial, cap);
  ExportedModel em;
  em.states = sp.states();
  const std::size_t n = sp.size();
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
  em.model.frame = Frame::from_predicate(
      std::move(ids), [&](std::size_t i, std::size_t j) { return sp.related(i, j); });
  for (const auto& a : declared_atoms(fam)) {
    auto& set = em.model.valuation[a];
    for (std::size_t i = 0; i < n; ++i)
      if (atom_holds(fam, em.states[i], a)) set.insert(static_cast<int>(i));
  }
  em.initial_world = static_cast<int>(sp.initial());
  return em;
}

namespace {

void push_witness(CheckItem& item, const MState& s) {
  if (item.witnesses.size() < kWitnessCap) item.witnesses.push_back(mstate_to_json(s));
}

// True iff some successor of s (within the family bounds) matches `want`.
// The fast path proposes the obvious candidate; the slow path scans.
template <typename Want, typename Candidate>
bool successor_exists(const ControlFamily& fam, const MState& s, Want want, Candidate candidate) {
  MState c = candidate();
  if (state_in_bounds(fam, c) && mstate_leq(fam, s, c) && want(c)) return true;
  bool found = false;
  enumerate_states(fam, [&](const MState& t) {
    if (!found && mstate_leq(fam, s, t) && want(t)) found = true;
  });
  return found;
}

}  // namespace

CheckReport check_control_axioms(const ControlFamily& fam, const MState& initial) {
  fam.validate();
  ExportedModel em = as_kripke_model(fam, initial);
  const std::size_t n = em.states.size();
  CheckReport rep;

  auto add = [&](CheckItem item) {
    rep.pass = rep.pass && item.pass;
    rep.items.push_back(std::move(item));
  };

  // Necessity over the exported model: every state is reachable from the
  // initial one, so "holds at every state" realizes the leading box.
  auto box_check = [&](std::string name, const Formula& body) {
    CheckItem item{std::move(name), true, {}};
    Bits ext = extension(em.model, body);
    for (std::size_t i = 0; i < n; ++i)
      if (!ext.test(i)) {
        item.pass = false;
        push_witness(item, em.states[i]);
      }
    add(std::move(item));
  };

  for (int i = 0; i < fam.switches; ++i)
    box_check("switch:" + std::to_string(i) + ":settable",
              conj(diamond(switch_atom(i)), diamond(neg(switch_atom(i)))));

  for (int i = 0; i < fam.buttons; ++i) {
    box_check("button:" + std::to_string(i) + ":pushable", diamond(box(button_atom(i))));
    box_check("button:" + std::to_string(i) + ":pure",
              implies(button_atom(i), box(button_atom(i))));
  }

  if (fam.nswitch >= 1) {
    CheckItem exactly{"nswitch:exactly_one", true, {}};
    std::vector<Bits> exts;
    for (int j = 0; j < std::max(fam.nswitch, 1); ++j)
      exts.push_back(extension(em.model, nswitch_atom(j)));
    for (std::size_t i = 0; i < n; ++i) {
      int holds = 0;
      for (const auto& e : exts) holds += e.test(i);
      if (holds != 1) {
        exactly.pass = false;
        push_witness(exactly, em.states[i]);
      }
    }
    add(std::move(exactly));
    std::vector<Formula> reach;
    for (int j = 0; j < fam.nswitch; ++j) reach.push_back(diamond(nswitch_atom(j)));
    box_check("nswitch:reachability", big_conj(reach));
  }

  if (fam.ratchet) {
    CheckItem mono{"ratchet:monotone", true, {}};
    for (int a = 0; a < fam.ratchet->alpha_max; ++a)
      for (int k = 0; k < fam.ratchet->k_max; ++k) {
        Formula r = ratchet_geq_atom(a, k);
        Bits ext = extension(em.model, implies(r, box(r)));
        for (std::size_t i = 0; i < n; ++i)
          if (!ext.test(i)) {
            mono.pass = false;
            push_witness(mono, em.states[i]);
          }
      }
    add(std::move(mono));

    // Increasability holds on interior states only; the truncation top cannot
    // offer headroom.
    CheckItem inc{"ratchet:increasable", true, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const MState& s = em.states[i];
      if (s.ratchet_alpha >= fam.ratchet->alpha_max - 1) continue;
      for (auto [a, k] : ratchet_values(fam)) {
        if (std::pair(a, k) <= std::pair(s.ratchet_alpha, s.ratchet_k)) continue;
        bool ok = successor_exists(
            fam, s, [&](const MState& t) { return t.ratchet_alpha == a && t.ratchet_k == k; },
            [&] {
              MState c = s;
              c.ratchet_alpha = a;
              c.ratchet_k = k;
              return c;
            });
        if (!ok) {
          inc.pass = false;
          push_witness(inc, s);
        }
      }
    }
    add(std::move(inc));
  }

  if (fam.t_buttons) {
    CheckItem exactly{"t_ladder:exactly_one_value", true, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const MState& s = em.states[i];
      int holds = (s.t_sup == kTInfinity) ? 1 : 0;
      for (int k = 0; k <= fam.t_buttons->count; ++k)
        holds += atom_holds(fam, s, "Rk:" + std::to_string(k));
      if (holds != 1) {
        exactly.pass = false;
        push_witness(exactly, s);
      }
    }
    add(std::move(exactly));

    CheckItem pure{"t_ladder:pure_buttons", true, {}};
    for (int i = 1; i <= fam.t_stable_max(); ++i) {
      Formula pushed = neg(t_still_true_atom(i));
      Bits ext = extension(em.model, implies(pushed, box(pushed)));
      for (std::size_t w = 0; w < n; ++w)
        if (!ext.test(w)) {
          pure.pass = false;
          push_witness(pure, em.states[w]);
        }
    }
    add(std::move(pure));

    CheckItem up{"t_ladder:upward_reachability", true, {}};
    CheckItem abs{"t_ladder:infinity_absorbing", true, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const MState& s = em.states[i];
      for (int v : t_values(fam)) {
        const bool should = leq_t(fam, s.t_sup, v);
        if (should && v != s.t_sup) {
          bool ok = successor_exists(
              fam, s, [&](const MState& t) { return t.t_sup == v; },
              [&] {
                MState c = s;
                c.t_sup = v;
                return c;
              });
          if (!ok) {
            up.pass = false;
            push_witness(up, s);
          }
        }
      }
      if (s.t_sup == kTInfinity) {
        bool leak = false;
        enumerate_states(fam, [&](const MState& t) {
          if (!leak && mstate_leq(fam, s, t) && t.t_sup != kTInfinity) leak = true;
        });
        if (leak) {
          abs.pass = false;
          push_witness(abs, s);
        }
      }
    }
    add(std::move(up));
    add(std::move(abs));
  }

  return rep;
}

namespace {

struct TargetChange {
  std::string control;
  std::string target;
  MState result;  // the unique state realizing the change with others fixed
};

std::vector<TargetChange> single_control_targets(const ControlFamily& fam, const MState& s) {
  std::vector<TargetChange> out;
  for (int i = 0; i < fam.buttons; ++i)
    if (!((s.pushed >> i) & 1u)) {
      MState t = s;
      t.pushed |= std::uint32_t{1} << i;
      out.push_back({"button:" + std::to_string(i), "push", t});
    }
  for (int i = 0; i < fam.switches; ++i) {
    MState t = s;
    t.switch_bits ^= std::uint32_t{1} << i;
    out.push_back({"switch:" + std::to_string(i),
                   ((s.switch_bits >> i) & 1u) ? "off" : "on", t});
  }
  for (int j = 0; j < fam.nswitch; ++j)
    if (j != s.nswitch_val) {
      MState t = s;
      t.nswitch_val = j;
      out.push_back({"nswitch", "set:" + std::to_string(j), t});
    }
  if (fam.ratchet)
    for (auto [a, k] : ratchet_values(fam))
      if (std::pair(a, k) > std::pair(s.ratchet_alpha, s.ratchet_k)) {
        MState t = s;
        t.ratchet_alpha = a;
        t.ratchet_k = k;
        out.push_back(
            {"ratchet", "raise:" + std::to_string(a) + "," + std::to_string(k), t});
      }
  if (fam.t_buttons)
    for (int v : t_values(fam))
      if (v != s.t_sup && leq_t(fam, s.t_sup, v)) {
        MState t = s;
        t.t_sup = v;
        out.push_back({"t_buttons",
                       "raise:" + (v == kTInfinity ? std::string("inf") : std::to_string(v)), t});
      }
  return out;
}

}  // namespace

IndependenceReport check_independence(const ControlFamily& fam, const MState& initial) {
  fam.validate();
  StateSpace sp = StateSpace::reachable(fam, initial);
  IndependenceReport rep;
  std::set<std::pair<std::string, std::string>> pairs;

  for (const MState& s : sp.states()) {
    for (const auto& tc : single_control_targets(fam, s)) {
      if (mstate_leq(fam, s, tc.result)) continue;
      IndependenceFailure fail{s, tc.control, tc.target, {}};
      // Which other control's release would provide a witness?
      auto try_relax = [&](const std::string& name, auto mutate, auto domain) {
        for (const auto& v : domain) {
          MState cand = tc.result;
          mutate(cand, v);
          if (state_in_bounds(fam, cand) && mstate_leq(fam, s, cand)) {
            fail.blocked_by.push_back(name);
            pairs.emplace(tc.control.substr(0, tc.control.find(':')), name);
            return;
          }
        }
      };
      if (tc.control != "t_buttons" && fam.t_buttons)
        try_relax(
            "t_buttons", [](MState& c, int v) { c.t_sup = v; }, t_values(fam));
      if (tc.control != "nswitch" && fam.nswitch >= 2) {
        std::vector<int> dom(fam.nswitch);
        for (int j = 0; j < fam.nswitch; ++j) dom[j] = j;
        try_relax(
            "nswitch", [](MState& c, int v) { c.nswitch_val = v; }, dom);
      }
      if (tc.control.rfind("button", 0) != 0 && fam.buttons > 0) {
        std::vector<std::uint32_t> dom(std::size_t{1} << fam.buttons);
        for (std::size_t m = 0; m < dom.size(); ++m) dom[m] = static_cast<std::uint32_t>(m);
        try_relax(
            "buttons", [](MState& c, std::uint32_t v) { c.pushed = v; }, dom);
      }
      rep.failures.push_back(std::move(fail));
      rep.pass = false;
    }
  }
  rep.dependent_pairs.assign(pairs.begin(), pairs.end());
  return rep;
}

nlohmann::json family_to_json(const ControlFamily& fam) {
  nlohmann::json j;
  j["buttons"] = fam.buttons;
  j["switches"] = fam.switches;
  j["nswitch"] = fam.nswitch;
  j["ratchet"] = fam.ratchet
                     ? nlohmann::json{{"alpha_max", fam.ratchet->alpha_max},
                                      {"k_max", fam.ratchet->k_max}}
                     : nlohmann::json(nullptr);
  j["t_buttons"] = fam.t_buttons
                       ? nlohmann::json{{"count", fam.t_buttons->count},
                                        {"unbounded", fam.t_buttons->unbounded}}
                       : nlohmann::json(nullptr);
  j["regime"] = fam.regime == Regime::Independent ? "independent" : "hybrid_adversarial";
  j["sw_decoupled"] = fam.sw_decoupled;
  j["wire_button0_to_switch0"] = fam.wire_button0_to_switch0;
  return j;
}

ControlFamily family_from_json(const nlohmann::json& j) {
  ControlFamily fam;
  fam.buttons = j.value("buttons", 0);
  fam.switches = j.value("switches", 0);
  fam.nswitch = j.value("nswitch", 0);
  if (j.contains("ratchet") && !j["ratchet"].is_null())
    fam.ratchet = RatchetBounds{j["ratchet"].at("alpha_max").get<int>(),
                                j["ratchet"].at("k_max").get<int>()};
  if (j.contains("t_buttons") && !j["t_buttons"].is_null())
    fam.t_buttons = TButtons{j["t_buttons"].at("count").get<int>(),
                             j["t_buttons"].value("unbounded", true)};
  const std::string regime = j.value("regime", "independent");
  if (regime == "independent")
    fam.regime = Regime::Independent;
  else if (regime == "hybrid_adversarial")
    fam.regime = Regime::HybridAdversarial;
  else
    throw std::invalid_argument("unknown regime: " + regime);
  fam.sw_decoupled = j.value("sw_decoupled", true);
  fam.wire_button0_to_switch0 = j.value("wire_button0_to_switch0", false);
  fam.validate();
  return fam;
}

nlohmann::json mstate_to_json(const MState& s) {
  nlohmann::json j;
  std::vector<int> pushed, switches;
  for (int i = 0; i < 32; ++i) {
    if ((s.pushed >> i) & 1u) pushed.push_back(i);
    if ((s.switch_bits >> i) & 1u) switches.push_back(i);
  }
  j["pushed"] = pushed;
  j["switches_on"] = switches;
  j["nswitch"] = s.nswitch_val;
  j["ratchet"] = {s.ratchet_alpha, s.ratchet_k};
  if (s.t_sup == kTInfinity)
    j["t_sup"] = "inf";
  else
    j["t_sup"] = s.t_sup;
  return j;
}

nlohmann::json check_report_to_json(const CheckReport& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  auto items = nlohmann::json::array();
  for (const auto& it : r.items)
    items.push_back({{"name", it.name}, {"pass", it.pass}, {"witnesses", it.witnesses}});
  j["checks"] = std::move(items);
  return j;
}

nlohmann::json independence_report_to_json(const IndependenceReport& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  auto fails = nlohmann::json::array();
  std::size_t shown = 0;
  for (const auto& f : r.failures) {
    if (shown++ >= 32) break;
    fails.push_back({{"state", mstate_to_json(f.state)},
                     {"control", f.control},
                     {"target", f.target},
                     {"blocked_by", f.blocked_by}});
  }
  j["failures"] = std::move(fails);
  j["failure_count"] = r.failures.size();
  auto pairs = nlohmann::json::array();
  for (const auto& [a, b] : r.dependent_pairs) pairs.push_back({a, b});
  j["dependent_pairs"] = std::move(pairs);
  return j;
}

}  // namespace mlf
