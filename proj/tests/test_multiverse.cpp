#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "mlf/labeling.hpp"
#include "mlf/multiverse.hpp"

using namespace mlf;

namespace {

ControlFamily independent_family(int buttons, int switches, int nswitch) {
  ControlFamily fam;
  fam.buttons = buttons;
  fam.switches = switches;
  fam.nswitch = nswitch;
  return fam;
}

ControlFamily hybrid_family(int buttons, int nswitch, int t_count, bool sw_decoupled) {
  ControlFamily fam;
  fam.buttons = buttons;
  fam.nswitch = nswitch;
  fam.t_buttons = TButtons{t_count, true};
  fam.regime = Regime::HybridAdversarial;
  fam.sw_decoupled = sw_decoupled;
  return fam;
}

void check_preorder(const ControlFamily& fam) {
  StateSpace sp = StateSpace::reachable(fam, MState{});
  const std::size_t n = sp.size();
  for (std::size_t i = 0; i < n; ++i) CHECK(sp.related(i, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!sp.related(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k)
        if (sp.related(j, k)) CHECK(sp.related(i, k));
    }
}

}  // namespace

TEST_CASE("successors include the state itself and never unpush") {
  ControlFamily fam = independent_family(1, 0, 0);
  MState zero;
  auto succ = successors(fam, zero);
  CHECK(std::find(succ.begin(), succ.end(), zero) != succ.end());

  ControlFamily fam2 = independent_family(2, 1, 2);
  StateSpace sp = StateSpace::reachable(fam2, MState{});
  for (std::size_t i = 0; i < sp.size(); ++i)
    for (const MState& t : successors(fam2, sp.states()[i]))
      CHECK((sp.states()[i].pushed & ~t.pushed) == 0);
}

TEST_CASE("one button and a 2-switch: four one-step successors") {
  ControlFamily fam = independent_family(1, 0, 2);
  auto succ = successors(fam, MState{});
  CHECK(succ.size() == 4);  // pushed in {none, 0} x nswitch value in {0, 1}
}

TEST_CASE("exported frames") {
  // One button: the two-world chain.
  ExportedModel one = as_kripke_model(independent_family(1, 0, 0), MState{});
  CHECK(one.states.size() == 2);
  CHECK(one.model.frame.edge(0, 1));
  CHECK_FALSE(one.model.frame.edge(1, 0));
  FrameProperties p = frame_properties(one.model.frame);
  CHECK(p.reflexive);
  CHECK(p.transitive);
  CHECK(p.directed);

  // One button and one switch: four worlds in two 2-clusters.
  ExportedModel bs = as_kripke_model(independent_family(1, 1, 0), MState{});
  CHECK(bs.states.size() == 4);
  Quotient q = quotient_clusters(bs.model.frame);
  REQUIRE(q.classes.size() == 2);
  CHECK(q.classes[0].size() == 2);
  CHECK(q.classes[1].size() == 2);

  // Buttons plus an n-switch: a pBA with base size m_b, clusters of size n.
  ExportedModel mn = as_kripke_model(independent_family(2, 0, 3), MState{});
  AsPbaResult pba = as_pba(mn.model.frame);
  REQUIRE(pba.ok());
  CHECK(pba.structure->base_size == 2);
  for (const auto& [mask, members] : pba.structure->cluster_members)
    CHECK(members.size() == 3);
}

TEST_CASE("relation is a preorder in every regime") {
  ControlFamily ind = independent_family(1, 1, 2);
  ind.ratchet = RatchetBounds{2, 4};
  ind.t_buttons = TButtons{3, true};
  check_preorder(ind);
  check_preorder(hybrid_family(1, 2, 4, true));
  check_preorder(hybrid_family(1, 2, 4, false));
}

TEST_CASE("independent multiverses export directed frames") {
  for (auto [b, s, n] : {std::tuple{2, 1, 0}, std::tuple{1, 2, 2}, std::tuple{0, 1, 3}}) {
    ControlFamily fam = independent_family(b, s, n);
    fam.ratchet = RatchetBounds{2, 3};
    ExportedModel em = as_kripke_model(fam, MState{});
    FrameProperties p = frame_properties(em.model.frame);
    CHECK(p.reflexive);
    CHECK(p.transitive);
    CHECK(p.directed);
  }
}

TEST_CASE("t ladder moves up and infinity absorbs") {
  ControlFamily fam = independent_family(0, 0, 0);
  fam.t_buttons = TButtons{3, true};
  StateSpace sp = StateSpace::reachable(fam, MState{});
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const MState& s = sp.states()[i];
    for (std::size_t j = 0; j < sp.size(); ++j) {
      const MState& t = sp.states()[j];
      if (s.t_sup == kTInfinity && sp.related(i, j)) CHECK(t.t_sup == kTInfinity);
      if (s.t_sup != kTInfinity && (t.t_sup == kTInfinity || t.t_sup > s.t_sup))
        CHECK(sp.related(i, j));  // in one step
    }
  }
}

TEST_CASE("control axioms pass for independent families") {
  ControlFamily fam = independent_family(2, 2, 2);
  fam.ratchet = RatchetBounds{2, 4};
  CheckReport rep = check_control_axioms(fam, MState{});
  CHECK(rep.pass);
  for (const auto& item : rep.items) {
    CAPTURE(item.name);
    CHECK(item.pass);
  }
}

TEST_CASE("a button wired to a switch fails the pure-button check") {
  ControlFamily fam = independent_family(1, 1, 0);
  fam.wire_button0_to_switch0 = true;
  CheckReport rep = check_control_axioms(fam, MState{});
  CHECK_FALSE(rep.pass);
  bool found = false;
  for (const auto& item : rep.items)
    if (item.name == "button:0:pure") {
      found = true;
      CHECK_FALSE(item.pass);
      CHECK_FALSE(item.witnesses.empty());
    }
  CHECK(found);
}

TEST_CASE("hybrid keeps the n-switch axioms but loses independence") {
  for (bool decoupled : {true, false}) {
    CAPTURE(decoupled);
    ControlFamily fam = hybrid_family(1, 2, 4, decoupled);
    CheckReport axioms = check_control_axioms(fam, MState{});
    for (const auto& item : axioms.items) {
      CAPTURE(item.name);
      if (item.name == "nswitch:exactly_one" || item.name == "nswitch:reachability")
        CHECK(item.pass);
    }
    IndependenceReport indep = check_independence(fam, MState{});
    CHECK_FALSE(indep.pass);
    for (const auto& f : indep.failures) CHECK(f.control == "nswitch");
    REQUIRE(indep.dependent_pairs.size() == 1);
    CHECK(indep.dependent_pairs[0] == std::pair<std::string, std::string>("nswitch", "t_buttons"));
  }
}

TEST_CASE("hybrid coupling modes differ on the saturated tail") {
  // sw changes on a tail state keep t fixed only in the decoupled reading.
  ControlFamily loose = hybrid_family(1, 2, 4, true);
  ControlFamily tight = hybrid_family(1, 2, 4, false);
  MState tail;
  tail.t_sup = 3;  // tail of {0..4} with a 2-switch is {3, 4}
  MState flipped = tail;
  flipped.nswitch_val = 1;
  CHECK(mstate_leq(loose, tail, flipped));
  CHECK_FALSE(mstate_leq(tight, tail, flipped));
  // Below the tail both modes forbid a free n-switch move.
  MState low;
  low.t_sup = 1;
  MState low_flip = low;
  low_flip.nswitch_val = 1;
  CHECK_FALSE(mstate_leq(loose, low, low_flip));
  CHECK_FALSE(mstate_leq(tight, low, low_flip));
  // At the infinite sup both modes free the n-switch.
  MState inf;
  inf.t_sup = kTInfinity;
  MState inf_flip = inf;
  inf_flip.nswitch_val = 1;
  CHECK(mstate_leq(loose, inf, inf_flip));
  CHECK(mstate_leq(tight, inf, inf_flip));
}

TEST_CASE("independence passes for independent families") {
  ControlFamily fam = independent_family(2, 1, 2);
  fam.ratchet = RatchetBounds{2, 4};
  fam.t_buttons = TButtons{2, true};
  IndependenceReport rep = check_independence(fam, MState{});
  CHECK(rep.pass);
  CHECK(rep.failures.empty());

  IndependenceReport single = check_independence(independent_family(0, 1, 0), MState{});
  CHECK(single.pass);
}

TEST_CASE("state space cap") {
  CHECK_THROWS_AS(StateSpace::reachable(independent_family(3, 3, 4), MState{}, 10),
                  std::runtime_error);
}

TEST_CASE("family json round trip") {
  ControlFamily fam = hybrid_family(2, 3, 8, false);
  fam.switches = 1;
  fam.ratchet = RatchetBounds{3, 9};
  ControlFamily back = family_from_json(family_to_json(fam));
  CHECK(back.buttons == fam.buttons);
  CHECK(back.switches == fam.switches);
  CHECK(back.nswitch == fam.nswitch);
  CHECK(back.ratchet->alpha_max == 3);
  CHECK(back.t_buttons->count == 8);
  CHECK(back.regime == Regime::HybridAdversarial);
  CHECK(back.sw_decoupled == false);
}

TEST_CASE("declared atoms evaluate everywhere and others are rejected") {
  ControlFamily fam = hybrid_family(1, 2, 4, true);
  fam.switches = 1;
  fam.ratchet = RatchetBounds{2, 4};
  StateSpace sp = StateSpace::reachable(fam, MState{});
  for (const auto& name : declared_atoms(fam))
    for (const MState& s : sp.states()) atom_holds(fam, s, name);  // must not throw
  CHECK_THROWS_AS(atom_holds(fam, MState{}, "bogus"), std::invalid_argument);
}
