#include "critlab/commands.hpp"

#include <chrono>

#include "critlab/criticality.hpp"
#include "critlab/error.hpp"
#include "critlab/gap.hpp"
#include "critlab/io.hpp"
#include "critlab/varcrit.hpp"

namespace critlab {

using nlohmann::json;

namespace {

class Timer {
 public:
  explicit Timer(json& sink) : t_(sink) {}
  void stage(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    if (!current_.empty()) t_[current_] = std::chrono::duration<double>(now - start_).count();
    current_ = name;
    start_ = now;
  }

 private:
  json& t_;
  std::string current_;
  std::chrono::steady_clock::time_point start_;
};

NullSequenceOptions nullseq_options(const ProblemConfig& cfg, bool keep) {
  NullSequenceOptions o;
  o.N = cfg.nullseq.N;
  o.kind = cfg.nullseq.kind;
  o.unit = cfg.nullseq.unit;
  o.core = cfg.nullseq.core;
  o.keep_functions = keep;
  return o;
}

std::string tag(double N) {
  std::string s = json(N).dump();
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"classify", "groundstate", "nullseq",
                                              "gap",      "poincare",    "refine"};
  return names;
}

CommandOutput run_command(const std::string& command, const Problem& pb, bool dump_fields) {
  const ProblemConfig& cfg = pb.config;
  const Exhaustion& ex = pb.ex;
  const DiscreteOperator& op = pb.op;
  const EigOptions eopt = eig_options(cfg.tol);
  const SolveOptions sopt = solve_options(cfg.tol);
  const Thresholds& th = cfg.tol.thresholds;

  CommandOutput out;
  Timer timer(out.timings);
  json& result = out.result;

  if (command == "classify") {
    timer.stage("classify");
    const ClassificationReport r = classify(op, ex, th, eopt);
    result = to_json(r);
    out.definitive = r.verdict != Verdict::inconclusive;
  } else if (command == "groundstate") {
    timer.stage("ground_state");
    const GroundState gs = ground_state(op, ex, sopt, cfg.tol.settle, true);
    result = to_json(gs);
    out.fields.emplace_back("phi", gs.phi);
    if (dump_fields)
      for (std::size_t i = 0; i < gs.psi.size(); ++i)
        out.fields.emplace_back("psi_" + std::to_string(i + 1), gs.psi[i]);
    out.definitive = gs.converged;
  } else if (command == "nullseq") {
    timer.stage("ground_state");
    const GroundState gs = ground_state(op, ex, sopt, cfg.tol.settle, true);
    timer.stage("null_sequence");
    const NullSequenceReport ns = null_sequence(op, ex, gs, nullseq_options(cfg, dump_fields));
    result = to_json(ns);
    result["ground_state"] = to_json(gs);
    out.table_name = "energies";
    out.table = "N,M,energy,cutoff_energy,cutoff_closed_form,l2_b0\n";
    for (const auto& e : ns.entries) {
      out.table += json(e.N).dump() + "," + std::to_string(e.M) + "," + num(e.energy).dump() +
                   "," + num(e.cutoff_energy).dump() + "," + num(e.cutoff_closed_form).dump() +
                   "," + num(e.l2_b0).dump() + "\n";
      if (dump_fields) out.fields.emplace_back("u_N" + tag(e.N), e.u);
    }
    out.definitive = ns.energies_eventually_decreasing;
  } else if (command == "gap") {
    GridFunction W;
    if (cfg.gap_weight.kind == FieldSpec::Kind::construct) {
      timer.stage("classify");
      const ClassificationReport r = classify(op, ex, th, eopt);
      timer.stage("construct_weight");
      const WeightConstruction wc = construct_weight(op, ex, eopt, &r);
      result["construction"] = to_json(wc);
      result["classification"] = to_json(r);
      W = wc.W;
    } else {
      W = evaluate_field(cfg.gap_weight, ex, cfg.base_dir);
    }
    timer.stage("verify_gap");
    const GapCertificate c = verify_gap(op, W, ex, th, eopt);
    result["certificate"] = to_json(c);
    out.fields.emplace_back("W", W);
    out.definitive = c.verdict != GapVerdict::inconclusive;
  } else if (command == "poincare") {
    timer.stage("ground_state");
    const GroundState gs = ground_state(op, ex, sopt, cfg.tol.settle, true);
    const GridFunction psi = evaluate_field(cfg.poincare.psi, ex, cfg.base_dir);
    const GridFunction W = evaluate_field(cfg.poincare.weight, ex, cfg.base_dir);
    timer.stage("poincare_certificate");
    const PoincareCertificate c =
        poincare_certificate(op, ex, gs, psi, W, cfg.poincare.C, th, eopt);
    result["certificate"] = to_json(c);
    result["ground_state"] = to_json(gs);
    timer.stage("pairing");
    try {
      const NullSequenceReport ns = null_sequence(op, ex, gs, nullseq_options(cfg, true));
      result["pairing"] = to_json(pairing_along_sequence(ns, psi, op.cell_volume()));
    } catch (const Error& e) {
      // the certificate stands on its own; record why the pairing table is missing
      result["pairing"] = error_json(to_string(e.code()), e.what());
    }
    out.fields.emplace_back("psi", psi);
    out.fields.emplace_back("W", W);
    out.definitive = c.verdict != PoincareVerdict::inconclusive;
  } else if (command == "refine") {
    timer.stage("classify");
    const ClassificationReport r = classify(op, ex, th, eopt);
    VariationalProblem vp;
    vp.W0 = evaluate_field(cfg.refine.W0, ex, cfg.base_dir);
    vp.p = cfg.refine.p;
    vp.max_iterations = cfg.refine.max_iterations;
    timer.stage("minimize");
    const Minimizer m = minimize_constrained(op, vp, ex, eopt, &r);
    const GridFunction W = build_critical_potential(m.kappa, m.v, vp.W0, vp.p, ex);
    timer.stage("verify_refinement");
    const RefinementCheck chk =
        verify_refinement(op, W, ex, m.v, th, eopt, cfg.tol.residual, cfg.tol.match);
    result["classification"] = to_json(r);
    result["minimizer"] = to_json(m);
    result["refinement"] = to_json(chk);
    out.fields.emplace_back("v", m.v);
    out.fields.emplace_back("W", W);
    out.definitive = chk.passed;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown command '" + command + "'");
  }
  timer.stage("");
  return out;
}

json make_report(const std::string& command, const ProblemConfig& cfg, const CommandOutput& out) {
  return {{"tool", {{"name", "critlab"}, {"version", CRITLAB_VERSION}}},
          {"command", command},
          {"config", to_json(cfg)},
          {"result", out.result},
          {"definitive", out.definitive}};
}

}  // namespace critlab
