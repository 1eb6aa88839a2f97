#include "mlf/labeling.hpp"

#include <algorithm>
#include <stdexcept>

namespace mlf {

namespace {

constexpr std::size_t kWitnessCap = 100;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Uniform cluster size of a certified structure; throws when sizes differ.
int uniform_cluster_size(const PBAStructure& pba) {
  int n = -1;
  for (const auto& [mask, members] : pba.cluster_members) {
    if (n == -1) n = static_cast<int>(members.size());
    if (n != static_cast<int>(members.size()))
      throw std::invalid_argument("clusters must have equal size (pad with dummy worlds)");
  }
  return n == -1 ? 0 : n;
}

std::vector<Formula> button_literals(std::uint32_t mask, int m) {
  std::vector<Formula> lits;
  for (int j = 0; j < m; ++j)
    lits.push_back(((mask >> j) & 1u) ? button_atom(j) : neg(button_atom(j)));
  return lits;
}

}  // namespace

std::vector<Formula> binary_nswitch(int m) {
  require(m >= 1, "binary_nswitch needs m >= 1");
  std::vector<Formula> out;
  for (std::uint32_t j = 0; j < (std::uint32_t{1} << m); ++j) {
    std::vector<Formula> lits;
    for (int i = 0; i < m; ++i)
      lits.push_back(((j >> i) & 1u) ? switch_atom(i) : neg(switch_atom(i)));
    out.push_back(big_conj(lits));
  }
  return out;
}

std::vector<Formula> ratchet_nswitch(int n, const RatchetBounds& bounds) {
  require(n >= 2, "ratchet_nswitch needs n >= 2");
  require(bounds.k_max >= 2 * n, "ratchet_nswitch needs k_max >= 2n of headroom");
  // value == (alpha, k) is "geq (alpha,k) and not geq the next value up".
  auto exact_value = [&](int alpha, int k) {
    Formula geq = ratchet_geq_atom(alpha, k);
    int na = alpha, nk = k + 1;
    if (nk == bounds.k_max) {
      ++na;
      nk = 0;
    }
    if (na == bounds.alpha_max) return geq;  // top value
    return conj(geq, neg(ratchet_geq_atom(na, nk)));
  };
  std::vector<Formula> out;
  for (int j = 0; j < n; ++j) {
    std::vector<Formula> cases;
    for (int a = 0; a < bounds.alpha_max; ++a)
      for (int k = 0; k < bounds.k_max; ++k)
        if (k % n == j) cases.push_back(exact_value(a, k));
    out.push_back(big_disj(cases));
  }
  return out;
}

Labeling product_labeling(const PBAStructure& pba, const ControlFamily& fam) {
  fam.validate();
  require(fam.regime == Regime::Independent, "product labeling needs the independent regime");
  require(fam.buttons == pba.base_size, "button count must equal the pBA base size");
  const int n = uniform_cluster_size(pba);
  require(n >= 1, "empty structure");
  require(std::max(fam.nswitch, 1) == n, "n-switch arity must equal the cluster size");

  Labeling lab;
  lab.pba = pba;
  lab.frame = pba_frame(pba);
  for (const auto& [mask, members] : pba.cluster_members) {
    for (int i = 0; i < n; ++i) {
      auto lits = button_literals(mask, pba.base_size);
      lits.push_back(nswitch_atom(i));
      lab.statements[members[i]] = big_conj(lits);
    }
  }
  // The bottom cluster exists in every certified structure.
  lab.initial_world = pba.cluster_members.at(0).front();
  return lab;
}

Labeling hybrid_labeling(const PBAStructure& pba, const ControlFamily& fam) {
  fam.validate();
  require(fam.regime == Regime::HybridAdversarial, "hybrid labeling needs the hybrid regime");
  require(fam.buttons == pba.base_size, "button count must equal the pBA base size");
  require(fam.t_buttons.has_value(), "hybrid labeling needs t-buttons");
  require(fam.t_buttons->unbounded, "hybrid labeling needs the unbounded sentinel");
  const int n = uniform_cluster_size(pba);
  require(n >= 1, "empty structure");
  require(std::max(fam.nswitch, 1) == n, "n-switch arity must equal the cluster size");
  require(fam.t_tail() == std::max(n, 1),
          "t-button count too small for the n-switch residue tail");

  const int K = fam.t_buttons->count;
  auto theta = [&](int j) {
    std::vector<Formula> cases;
    for (int k = 0; k <= K; ++k)
      if (k % n == j) cases.push_back(t_sup_atom(k));
    return big_disj(cases);
  };

  const std::uint32_t top = (std::uint32_t{1} << pba.base_size) - 1;
  Labeling lab;
  lab.pba = pba;
  lab.frame = pba_frame(pba);
  for (const auto& [mask, members] : pba.cluster_members) {
    for (int j = 0; j < n; ++j) {
      auto lits = button_literals(mask, pba.base_size);
      lits.push_back(theta(j));
      Formula below_top = big_conj(lits);
      if (mask == top)
        lab.statements[members[j]] =
            disj(below_top, conj(t_sup_infinite_atom(), nswitch_atom(j)));
      else
        lab.statements[members[j]] = below_top;
    }
  }
  lab.initial_world = pba.cluster_members.at(0).front();
  return lab;
}

VerificationReport verify_labeling(const Labeling& lab, const ControlFamily& fam,
                                   const MState& initial) {
  // Statements may only mention the family's declared control observations.
  std::set<std::string> declared;
  for (const auto& a : declared_atoms(fam)) declared.insert(a);
  for (const auto& [w, stmt] : lab.statements)
    for (const auto& a : atoms_of(stmt))
      if (!declared.count(a))
        throw std::invalid_argument("statement for world " + std::to_string(w) +
                                    " uses undeclared atom " + a);

  ExportedModel em = as_kripke_model(fam, initial);
  const std::size_t n_states = em.states.size();
  const std::size_t n_worlds = lab.frame.size();
  require(lab.statements.size() == n_worlds, "statements must be keyed by the frame's worlds");

  std::vector<Bits> ext;  // by frame world position
  ext.reserve(n_worlds);
  for (std::size_t wi = 0; wi < n_worlds; ++wi)
    ext.push_back(extension(em.model, lab.statements.at(lab.frame.world_at(wi))));

  VerificationReport rep;
  auto witness = [&](nlohmann::json j) {
    if (rep.witnesses.size() < kWitnessCap) rep.witnesses.push_back(std::move(j));
  };

  // Clause 1: every reachable state satisfies exactly one statement.
  std::vector<int> label_of(n_states, -1);
  for (std::size_t si = 0; si < n_states; ++si) {
    std::vector<int> holds;
    for (std::size_t wi = 0; wi < n_worlds; ++wi)
      if (ext[wi].test(si)) holds.push_back(lab.frame.world_at(wi));
    if (holds.size() == 1) {
      label_of[si] = static_cast<int>(lab.frame.index_of(holds[0]));
    } else {
      rep.partition_ok = false;
      witness({{"clause", 1}, {"state", mstate_to_json(em.states[si])}, {"worlds", holds}});
    }
  }

  // Clause 2: from a state labeled w, a successor satisfying the label of u
  // exists exactly when wRu.
  for (std::size_t si = 0; si < n_states; ++si) {
    if (label_of[si] < 0) continue;
    const std::size_t wi = static_cast<std::size_t>(label_of[si]);
    const Bits& succ = em.model.frame.row(si);
    for (std::size_t ui = 0; ui < n_worlds; ++ui) {
      const bool possible = succ.intersects(ext[ui]);
      const bool related = lab.frame.edge(wi, ui);
      if (possible != related) {
        rep.correspondence_ok = false;
        witness({{"clause", 2},
                 {"state", mstate_to_json(em.states[si])},
                 {"world", lab.frame.world_at(wi)},
                 {"target", lab.frame.world_at(ui)},
                 {"frame_related", related},
                 {"target_possible", possible}});
      }
    }
  }

  // Clause 3: the initial state satisfies the initial world's statement.
  const std::size_t init_wi = lab.frame.index_of(lab.initial_world);
  if (!ext[init_wi].test(static_cast<std::size_t>(em.initial_world))) {
    rep.initial_ok = false;
    witness({{"clause", 3},
             {"state", mstate_to_json(em.states[static_cast<std::size_t>(em.initial_world)])},
             {"initial_world", lab.initial_world}});
  }
  return rep;
}

Substitution translate_valuation(const Labeling& lab,
                                 const std::map<std::string, std::set<int>>& valuation) {
  Substitution sub;
  for (const auto& [p, set] : valuation) {
    std::vector<Formula> labels;
    for (std::size_t wi = 0; wi < lab.frame.size(); ++wi) {
      const int w = lab.frame.world_at(wi);
      if (set.count(w)) labels.push_back(lab.statements.at(w));
    }
    sub.bindings.emplace(p, big_disj(labels));
  }
  return sub;
}

bool check_translation(const Labeling& lab, const ExportedModel& em, const Model& model,
                       const Formula& f) {
  const bool frame_side = satisfies(model, lab.initial_world, f);
  Substitution sub = translate_valuation(lab, model.valuation);
  const bool multiverse_side = satisfies(em.model, em.initial_world, substitute(f, sub));
  return frame_side == multiverse_side;
}

bool check_translation(const Labeling& lab, const ControlFamily& fam, const MState& initial,
                       const Model& model, const Formula& f) {
  ExportedModel em = as_kripke_model(fam, initial);
  return check_translation(lab, em, model, f);
}

nlohmann::json verification_to_json(const VerificationReport& r) {
  return {{"partition_ok", r.partition_ok},
          {"correspondence_ok", r.correspondence_ok},
          {"initial_ok", r.initial_ok},
          {"pass", r.all_ok()},
          {"witnesses", r.witnesses}};
}

}  // namespace mlf
