#pragma once

// Labelings: assignments of control statements to the worlds of a certified
// pBA frame, their verification against a multiverse (mutually exclusive
// partition of truth, correspondence with the relation, initial world), and
// the translation that moves Kripke valuations into the multiverse.

#include <map>
#include <set>
#include <vector>

#include "json.hpp"

#include "mlf/formula.hpp"
#include "mlf/kripke.hpp"
#include "mlf/multiverse.hpp"

namespace mlf {

struct Labeling {
  Frame frame;              // the certified pBA frame
  PBAStructure pba;
  std::map<int, Formula> statements;  // world id -> control statement
  int initial_world = 0;
};

struct VerificationReport {
  bool partition_ok = true;
  bool correspondence_ok = true;
  bool initial_ok = true;
  std::vector<nlohmann::json> witnesses;
  bool all_ok() const { return partition_ok && correspondence_ok && initial_ok; }
};

/// The 2^m statements over m switch atoms; statement j is the conjunction of
/// s:i / !s:i following the binary digits of j (bit i = coefficient of 2^i).
std::vector<Formula> binary_nswitch(int m);

/// n statements over ratchet atoms; statement j holds iff the ratchet value
/// (alpha, k) has k mod n == j. Requires k_max >= 2n of headroom.
std::vector<Formula> ratchet_nswitch(int n, const RatchetBounds& bounds);

/// Buttons pick the cluster, the n-switch picks the world inside it:
/// label(w_i^A) = /\_{j in A} b:j  /\_{j notin A} !b:j  /\ sw:i.
Labeling product_labeling(const PBAStructure& pba, const ControlFamily& fam);

/// Below the top cluster the t-ladder residue picks the world; the top
/// cluster adds the "sup infinite" branch driven by the n-switch:
/// label(w_j^C)     = Psi_C /\ Theta_j             for C a proper subset
/// label(w_j^Btop)  = (Psi_B /\ Theta_j) \/ (supinf /\ sw:j).
Labeling hybrid_labeling(const PBAStructure& pba, const ControlFamily& fam);

VerificationReport verify_labeling(const Labeling& lab, const ControlFamily& fam,
                                   const MState& initial);

/// psi_p = disjunction of labels over v(p); the empty disjunction is `false`.
Substitution translate_valuation(const Labeling& lab,
                                 const std::map<std::string, std::set<int>>& valuation);

/// Does satisfaction of f at the initial frame world match satisfaction of
/// the translated instance at the initial multiverse state?
bool check_translation(const Labeling& lab, const ControlFamily& fam, const MState& initial,
                       const Model& model, const Formula& f);
bool check_translation(const Labeling& lab, const ExportedModel& em, const Model& model,
                       const Formula& f);

nlohmann::json verification_to_json(const VerificationReport& r);

}  // namespace mlf
