#include "mlf/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "mlf/formula.hpp"
#include "mlf/kripke.hpp"
#include "mlf/labeling.hpp"
#include "mlf/multiverse.hpp"
#include "mlf/posets.hpp"
#include "mlf/random.hpp"
#include "mlf/theories.hpp"

namespace mlf {

namespace {

constexpr int kFormatVersion = 1;

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file " + out_path);
  f << text;
}

void emit_json(nlohmann::json j, const std::string& out_path, std::ostream& out) {
  j["format_version"] = kFormatVersion;
  emit(j.dump(2) + "\n", out_path, out);
}

struct PbaSpec {
  int m = 0;
  int n = 1;
};

PbaSpec parse_pba_spec(const std::string& text) {
  PbaSpec spec;
  bool have_m = false, have_n = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--pba expects m=<int>,n=<int>");
    const std::string key = item.substr(0, eq);
    const int val = std::stoi(item.substr(eq + 1));
    if (key == "m") {
      spec.m = val;
      have_m = true;
    } else if (key == "n") {
      spec.n = val;
      have_n = true;
    } else {
      throw CLI::ValidationError("unknown pba key: " + key);
    }
  }
  if (!have_m || !have_n) throw CLI::ValidationError("--pba expects m=<int>,n=<int>");
  if (spec.m < 0 || spec.m > 6 || spec.n < 1 || spec.n > 16)
    throw CLI::ValidationError("pba spec out of range (m <= 6, 1 <= n <= 16)");
  return spec;
}

PBAStructure uniform_pba(int m, int n) {
  PBAStructure ps;
  ps.base_size = m;
  int id = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    auto& members = ps.cluster_members[mask];
    for (int i = 0; i < n; ++i) {
      ps.cluster_of[id] = mask;
      members.push_back(id++);
    }
  }
  return ps;
}

nlohmann::json pba_to_json(const PBAStructure& ps) {
  nlohmann::json clusters = nlohmann::json::object();
  for (const auto& [mask, members] : ps.cluster_members)
    clusters[std::to_string(mask)] = members;
  return {{"base_size", ps.base_size}, {"clusters", clusters}};
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"desk-scale toolkit for the modal logic of forcing"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::string out_path;
  app.add_option("--out", out_path, "write the report to a file instead of stdout")
      ->capture_default_str();

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse a formula and print its canonical forms");
  std::string parse_text;
  std::string parse_format = "json";
  cmd_parse->add_option("formula", parse_text, "formula text")->required();
  cmd_parse->add_option("--format", parse_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  // decide
  auto* cmd_decide = app.add_subcommand("decide", "bounded S4.2 decision by pBA countermodel search");
  std::string decide_text;
  int decide_m = 3, decide_c = 3;
  cmd_decide->add_option("formula", decide_text, "formula text")->required();
  cmd_decide->add_option("--m", decide_m, "max pBA base size")->capture_default_str();
  cmd_decide->add_option("--c", decide_c, "max cluster size")->capture_default_str();

  // frames
  auto* cmd_frames = app.add_subcommand("frames", "enumerate pBA frames");
  int frames_m = 2, frames_c = 2;
  std::string frames_format = "json";
  cmd_frames->add_option("--m", frames_m, "max base size")->capture_default_str();
  cmd_frames->add_option("--c", frames_c, "max cluster size")->capture_default_str();
  cmd_frames->add_option("--format", frames_format, "json or dot")
      ->check(CLI::IsMember({"json", "dot"}))
      ->capture_default_str();

  // multiverse
  auto* cmd_mv = app.add_subcommand("multiverse", "build a control-statement multiverse and check it");
  std::string mv_family_path;
  int mv_buttons = 1, mv_switches = 0, mv_nswitch = 0, mv_t_count = 0;
  std::vector<int> mv_ratchet;
  bool mv_t_bounded = false, mv_hybrid = false, mv_sw_coupled = false, mv_miswire = false;
  std::string mv_check = "both", mv_model_out;
  cmd_mv->add_option("--family", mv_family_path, "family config JSON file");
  cmd_mv->add_option("--buttons", mv_buttons, "button count")->capture_default_str();
  cmd_mv->add_option("--switches", mv_switches, "switch count")->capture_default_str();
  cmd_mv->add_option("--nswitch", mv_nswitch, "n-switch arity (0 = absent)")->capture_default_str();
  cmd_mv->add_option("--ratchet", mv_ratchet, "ratchet bounds: alpha_max k_max")->expected(2);
  cmd_mv->add_option("--t-count", mv_t_count, "t-button count (0 = absent)")->capture_default_str();
  cmd_mv->add_flag("--t-bounded", mv_t_bounded, "drop the infinite-sup sentinel");
  cmd_mv->add_flag("--hybrid", mv_hybrid, "hybrid adversarial regime");
  cmd_mv->add_flag("--sw-coupled", mv_sw_coupled, "sw_decoupled=false");
  cmd_mv->add_flag("--miswire", mv_miswire, "negative control: wire b:0 to switch bit 0");
  cmd_mv->add_option("--check", mv_check, "axioms, independence, both or none")
      ->check(CLI::IsMember({"axioms", "independence", "both", "none"}))
      ->capture_default_str();
  cmd_mv->add_option("--model-out", mv_model_out, "also dump the exported Kripke model");

  // verify-labeling
  auto* cmd_vl = app.add_subcommand("verify-labeling", "construct and verify a labeling");
  std::string vl_pba = "m=1,n=2", vl_regime = "independent", vl_family_path;
  int vl_t_count = 8;
  bool vl_sw_coupled = false;
  cmd_vl->add_option("--pba", vl_pba, "pBA shape, m=<base size>,n=<cluster size>")
      ->capture_default_str();
  cmd_vl->add_option("--regime", vl_regime, "independent or hybrid")
      ->check(CLI::IsMember({"independent", "hybrid"}))
      ->capture_default_str();
  cmd_vl->add_option("--t-count", vl_t_count, "t-button count for the hybrid regime")
      ->capture_default_str();
  cmd_vl->add_flag("--sw-coupled", vl_sw_coupled, "sw_decoupled=false");
  cmd_vl->add_option("--family", vl_family_path,
                     "family config JSON file (overrides the flags above)");

  // translate-check
  auto* cmd_tc = app.add_subcommand("translate-check",
                                    "compare frame satisfaction with the translated statement");
  std::string tc_pba = "m=1,n=2", tc_formula;
  std::uint64_t tc_seed = 0;
  int tc_count = 200, tc_atoms = 3, tc_depth = 4;
  std::string tc_valuation;
  cmd_tc->add_option("--pba", tc_pba, "pBA shape")->capture_default_str();
  cmd_tc->add_option("--formula", tc_formula, "single formula (otherwise a random corpus)");
  cmd_tc->add_option("--valuation", tc_valuation, "valuation JSON for --formula");
  cmd_tc->add_option("--seed", tc_seed, "corpus seed")->capture_default_str();
  cmd_tc->add_option("--count", tc_count, "corpus size")->capture_default_str();
  cmd_tc->add_option("--atoms", tc_atoms, "atom count")->capture_default_str();
  cmd_tc->add_option("--depth", tc_depth, "modal depth bound")->capture_default_str();

  // posets
  auto* cmd_po = app.add_subcommand("posets", "sequence enumeration and coding runs");
  int po_table = 0;
  bool po_demo = false, po_emit_chain = false;
  int po_steps = 200, po_growth = 20;
  std::string po_code = "0,2";
  cmd_po->add_option("--seq-table", po_table, "dump the first N enumerated sequences");
  cmd_po->add_flag("--coding-demo", po_demo, "run the four-handle coding certificate");
  cmd_po->add_option("--steps", po_steps, "chain length for the demo")->capture_default_str();
  cmd_po->add_option("--growth", po_growth, "required growth witnesses")->capture_default_str();
  cmd_po->add_option("--code-a", po_code, "comma-separated coded handle ids")
      ->capture_default_str();
  cmd_po->add_flag("--emit-chain", po_emit_chain, "include the full chain in the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_parse->parsed()) {
      Formula f = parse(parse_text);
      if (parse_format == "text") {
        emit(render(f) + "\n", out_path, out);
        return 0;
      }
      emit_json({{"text", render(f)},
                 {"ast", formula_to_json(f)},
                 {"modal_depth", modal_depth(f)}},
                out_path, out);
      return 0;
    }

    if (cmd_decide->parsed()) {
      Formula f = parse(decide_text);
      DecisionOutcome outcome = s42_decide(f, decide_m, decide_c);
      nlohmann::json j = decision_to_json(outcome);
      j["formula"] = render(f);
      emit_json(std::move(j), out_path, out);
      return outcome.refuted() ? 1 : 0;
    }

    if (cmd_frames->parsed()) {
      auto frames = all_pbas_up_to(frames_m, frames_c);
      if (frames_format == "dot") {
        std::string text;
        for (const auto& fr : frames) text += frame_to_dot(fr);
        emit(text, out_path, out);
      } else {
        auto arr = nlohmann::json::array();
        for (const auto& fr : frames) arr.push_back(frame_to_json(fr));
        emit_json({{"count", frames.size()}, {"frames", arr}}, out_path, out);
      }
      return 0;
    }

    if (cmd_mv->parsed()) {
      ControlFamily fam;
      if (!mv_family_path.empty()) {
        std::ifstream in(mv_family_path);
        if (!in) throw std::runtime_error("cannot read " + mv_family_path);
        nlohmann::json j;
        in >> j;
        fam = family_from_json(j);
      } else {
        fam.buttons = mv_buttons;
        fam.switches = mv_switches;
        fam.nswitch = mv_nswitch;
        if (!mv_ratchet.empty()) fam.ratchet = RatchetBounds{mv_ratchet[0], mv_ratchet[1]};
        if (mv_t_count > 0) fam.t_buttons = TButtons{mv_t_count, !mv_t_bounded};
        fam.regime = mv_hybrid ? Regime::HybridAdversarial : Regime::Independent;
        fam.sw_decoupled = !mv_sw_coupled;
        fam.wire_button0_to_switch0 = mv_miswire;
        fam.validate();
      }
      MState initial;
      nlohmann::json j;
      j["family"] = family_to_json(fam);
      bool all_pass = true;
      if (mv_check == "axioms" || mv_check == "both") {
        CheckReport rep = check_control_axioms(fam, initial);
        all_pass = all_pass && rep.pass;
        j["axioms"] = check_report_to_json(rep);
      }
      if (mv_check == "independence" || mv_check == "both") {
        IndependenceReport rep = check_independence(fam, initial);
        all_pass = all_pass && rep.pass;
        j["independence"] = independence_report_to_json(rep);
      }
      ExportedModel em = as_kripke_model(fam, initial);
      j["states"] = em.states.size();
      if (!mv_model_out.empty()) {
        std::ofstream f(mv_model_out);
        if (!f) throw std::runtime_error("cannot open " + mv_model_out);
        f << model_to_json(em.model).dump(2) << "\n";
      }
      emit_json(std::move(j), out_path, out);
      return all_pass ? 0 : 1;
    }

    if (cmd_vl->parsed()) {
      PbaSpec spec = parse_pba_spec(vl_pba);
      PBAStructure ps = uniform_pba(spec.m, spec.n);
      ControlFamily fam;
      if (!vl_family_path.empty()) {
        std::ifstream in(vl_family_path);
        if (!in) throw std::runtime_error("cannot read " + vl_family_path);
        nlohmann::json jf;
        in >> jf;
        fam = family_from_json(jf);
      } else {
        fam.buttons = spec.m;
        fam.nswitch = spec.n;
        if (vl_regime == "hybrid") {
          fam.regime = Regime::HybridAdversarial;
          fam.t_buttons = TButtons{vl_t_count, true};
          fam.sw_decoupled = !vl_sw_coupled;
        }
      }
      Labeling lab = fam.regime == Regime::HybridAdversarial ? hybrid_labeling(ps, fam)
                                                             : product_labeling(ps, fam);
      VerificationReport rep = verify_labeling(lab, fam, MState{});
      nlohmann::json j;
      j["pba"] = pba_to_json(ps);
      j["family"] = family_to_json(fam);
      j["report"] = verification_to_json(rep);
      emit_json(std::move(j), out_path, out);
      return rep.all_ok() ? 0 : 1;
    }

    if (cmd_tc->parsed()) {
      PbaSpec spec = parse_pba_spec(tc_pba);
      PBAStructure ps = uniform_pba(spec.m, spec.n);
      ControlFamily fam;
      fam.buttons = spec.m;
      fam.nswitch = spec.n;
      Labeling lab = product_labeling(ps, fam);
      ExportedModel em = as_kripke_model(fam, MState{});
      const std::size_t n_worlds = lab.frame.size();
      if (n_worlds > 62) throw std::runtime_error("pBA too large for random valuations");
      std::size_t checked = 0;
      auto mismatches = nlohmann::json::array();
      auto run_one = [&](const Formula& f, const Model& model) {
        ++checked;
        if (!check_translation(lab, em, model, f) && mismatches.size() < 16)
          mismatches.push_back(
              {{"formula", render(f)}, {"valuation", model_to_json(model)["valuation"]}});
      };
      if (!tc_formula.empty()) {
        Model model;
        model.frame = lab.frame;
        if (!tc_valuation.empty()) {
          auto jval = nlohmann::json::parse(tc_valuation);
          for (const auto& [name, arr] : jval.items())
            model.valuation[name] = arr.get<std::set<int>>();
        }
        run_one(parse(tc_formula), model);
      } else {
        SplitMix64 rng(tc_seed);
        for (int i = 0; i < tc_count; ++i) {
          Formula f = random_formula(rng, tc_depth, tc_depth + 1, tc_atoms);
          Model model;
          model.frame = lab.frame;
          for (int a = 0; a < tc_atoms; ++a) {
            const std::uint64_t mask = rng.below(std::uint64_t{1} << n_worlds);
            auto& set = model.valuation["p" + std::to_string(a)];
            for (std::size_t w = 0; w < n_worlds; ++w)
              if ((mask >> w) & 1u) set.insert(lab.frame.world_at(w));
          }
          run_one(f, model);
        }
      }
      emit_json({{"checked", checked}, {"mismatches", mismatches}}, out_path, out);
      return mismatches.empty() ? 0 : 1;
    }

    if (cmd_po->parsed()) {
      nlohmann::json j;
      if (po_table > 0) {
        auto arr = nlohmann::json::array();
        for (int i = 0; i < po_table; ++i)
          arr.push_back({{"index", i}, {"seq", seq_of(static_cast<std::uint64_t>(i))}});
        j["seq_table"] = std::move(arr);
      }
      bool ok = true;
      if (po_demo) {
        std::vector<RealHandle> fs = {RealHandle("f0", {}, {0}),
                                      RealHandle("f1", {0, 1}, {0, 1}),
                                      RealHandle("f2", {1}, {0}),
                                      RealHandle("f3", {1, 1}, {0})};
        std::vector<SetHandle> handles;
        for (int i = 0; i < 4; ++i) handles.push_back(SetHandle::ad_code_of(i, fs[i]));
        std::set<int> code_a;
        std::stringstream ss(po_code);
        std::string item;
        while (std::getline(ss, item, ',')) code_a.insert(std::stoi(item));
        // Meet rounds are capped: almost-disjoint code elements grow
        // exponentially with prefix length, so deep meets overflow indices.
        const std::size_t rounds =
            std::min<std::size_t>(std::max(po_growth, 1), 40);
        std::vector<DenseSpec<PYCondition>> denses;
        denses.push_back(dense_py_s_size(2, handles));
        for (int id : code_a) denses.push_back(dense_py_add_handle(id));
        for (std::size_t round = 1; round <= rounds; ++round)
          for (int id = 0; id < 4; ++id)
            if (!code_a.count(id)) denses.push_back(dense_py_meet(id, round, handles));
        std::size_t size_target = 3;
        while (denses.size() < static_cast<std::size_t>(po_steps))
          denses.push_back(dense_py_s_size(size_target++, handles));
        denses.resize(static_cast<std::size_t>(po_steps));
        auto chain = rasiowa_sikorski(PYCondition{}, denses);
        CodingReport rep =
            coding_certificate(chain, handles, code_a, static_cast<std::size_t>(po_growth));
        ok = rep.ok && py_chain_ok(chain, handles);
        j["chain_audit"] = py_chain_ok(chain, handles);
        j["chain_length"] = chain.size();
        j["certificate"] = coding_report_to_json(rep);
        if (po_emit_chain) {
          auto arr = nlohmann::json::array();
          for (const auto& c : chain) arr.push_back(py_condition_to_json(c));
          j["chain"] = std::move(arr);
        }
      }
      emit_json(std::move(j), out_path, out);
      return ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace mlf
