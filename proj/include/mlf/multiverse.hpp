#pragma once

// Finite abstract generic multiverse: states of control statements (buttons,
// switches, an n-switch, a ratchet, a truncated t-button ladder) under an
// accessibility relation standing in for "is an extension of". The reachable
// state set exports as a Kripke model so modal statements are evaluated by
// the kripke module.
//
// The t-button ladder truncates a countable family: t_sup takes values
// 0..count plus an absorbing "infinity" sentinel. The top `t_tail()` finite
// values form a saturated tail of mutually reachable values, each standing
// for the class of all large finite sups with that residue mod n; with no
// n-switch the tail has length 1 and the ladder is a plain chain.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mlf/formula.hpp"
#include "mlf/kripke.hpp"

namespace mlf {

struct RatchetBounds {
  int alpha_max = 0;  // value pairs (alpha, k), alpha < alpha_max, k < k_max
  int k_max = 0;
};

struct TButtons {
  int count = 0;          // finite sup values 0..count
  bool unbounded = true;  // whether the "sup is infinite" sentinel is reachable
};

enum class Regime { Independent, HybridAdversarial };

struct ControlFamily {
  int buttons = 0;   // atoms b:i
  int switches = 0;  // atoms s:i
  int nswitch = 0;   // arity; 0 absent, 1 degenerate constant, else >= 2
  std::optional<RatchetBounds> ratchet;
  std::optional<TButtons> t_buttons;
  Regime regime = Regime::Independent;
  bool sw_decoupled = true;
  bool wire_button0_to_switch0 = false;  // negative control: b:0 reads switch bit 0

  int t_tail() const;      // saturated tail length of the t ladder (0 if absent)
  int t_stable_max() const;  // largest i for which atom T:i is class-definite
  void validate() const;
};

constexpr int kTInfinity = std::numeric_limits<int>::max();

struct MState {
  std::uint32_t pushed = 0;
  std::uint32_t switch_bits = 0;
  int nswitch_val = 0;
  int ratchet_alpha = 0;
  int ratchet_k = 0;
  int t_sup = 0;  // kTInfinity = absorbing sentinel

  bool operator==(const MState&) const = default;
  auto key() const {
    return std::tuple(pushed, switch_bits, nswitch_val, ratchet_alpha, ratchet_k, t_sup);
  }
};

bool state_in_bounds(const ControlFamily& fam, const MState& s);

/// The accessibility relation (reflexive and transitive by construction).
bool mstate_leq(const ControlFamily& fam, const MState& s, const MState& t);

/// All in-bounds successors of s, in canonical state order.
std::vector<MState> successors(const ControlFamily& fam, const MState& s);

/// Reachable states from an initial state, canonically ordered and indexed.
class StateSpace {
 public:
  static StateSpace reachable(const ControlFamily& fam, const MState& initial,
                              std::size_t cap = 200000);

  const ControlFamily& family() const { return fam_; }
  const std::vector<MState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  std::size_t initial() const { return initial_; }
  std::size_t index_of(const MState& s) const;  // throws if absent
  bool related(std::size_t i, std::size_t j) const {
    return mstate_leq(fam_, states_[i], states_[j]);
  }

 private:
  ControlFamily fam_;
  std::vector<MState> states_;
  std::size_t initial_ = 0;
};

struct ExportedModel {
  Model model;              // worlds are state indices 0..N-1
  int initial_world = 0;
  std::vector<MState> states;  // index -> state
};

ExportedModel as_kripke_model(const ControlFamily& fam, const MState& initial,
                              std::size_t cap = 200000);

// Control observation atoms.
Formula button_atom(int i);
Formula switch_atom(int i);
Formula nswitch_atom(int j);
Formula ratchet_geq_atom(int alpha, int k);
Formula t_still_true_atom(int i);
Formula t_sup_atom(int k);
Formula t_sup_infinite_atom();

std::vector<std::string> declared_atoms(const ControlFamily& fam);
bool atom_holds(const ControlFamily& fam, const MState& s, const std::string& atom);

struct CheckItem {
  std::string name;
  bool pass = true;
  std::vector<nlohmann::json> witnesses;
};

struct CheckReport {
  bool pass = true;
  std::vector<CheckItem> items;
};

/// Switch, button, n-switch, ratchet and t-ladder axioms, evaluated on the
/// exported Kripke model; witness states attached on failure.
CheckReport check_control_axioms(const ControlFamily& fam, const MState& initial);

struct IndependenceFailure {
  MState state;
  std::string control;  // the control whose target change has no clean witness
  std::string target;
  std::vector<std::string> blocked_by;  // controls whose release would unblock
};

struct IndependenceReport {
  bool pass = true;
  std::vector<IndependenceFailure> failures;
  std::vector<std::pair<std::string, std::string>> dependent_pairs;
};

/// For every reachable state and single-control target change, checks a
/// successor exists realizing the change with every other control's
/// observable value unchanged.
IndependenceReport check_independence(const ControlFamily& fam, const MState& initial);

nlohmann::json family_to_json(const ControlFamily& fam);
ControlFamily family_from_json(const nlohmann::json& j);
nlohmann::json mstate_to_json(const MState& s);
nlohmann::json check_report_to_json(const CheckReport& r);
nlohmann::json independence_report_to_json(const IndependenceReport& r);

}  // namespace mlf
