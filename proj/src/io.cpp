#include "critlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "critlab/error.hpp"
#include "format.hpp"

namespace critlab {

using nlohmann::json;

std::string field_csv(const Domain& d, const GridFunction& f) {
  if (f.size() != d.size())
    throw Error(ErrorCode::invalid_argument, "field does not match the domain");
  const int dim = d.grid().dim;
  static const char* axes[] = {"x", "y", "z"};
  std::string out = "index";
  for (int a = 0; a < dim; ++a) out += std::string(",") + axes[a];
  out += ",value\n";
  for (std::size_t l = 0; l < d.size(); ++l) {
    const Point x = d.coord(l);
    out += std::to_string(d.node(l));
    for (int a = 0; a < dim; ++a) out += "," + fmt_num(x[a]);
    out += "," + fmt_num(f[l]) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + file.string());
}

void write_field_csv(const std::filesystem::path& file, const Domain& d, const GridFunction& f) {
  write_text(file, field_csv(d, f));
}

GridFunction read_field_csv(const std::filesystem::path& file, const Domain& d) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::io, "cannot open field " + file.string());
  const int dim = d.grid().dim;
  const double tol = 1e-3 * d.grid().h;
  GridFunction f(d.size(), 0.0);
  std::vector<bool> seen(d.size(), false);
  std::string line;
  std::getline(in, line);  // header
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cols.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::io, file.string() + ":" + std::to_string(row) + ": bad number");
      }
    }
    if (static_cast<int>(cols.size()) != dim + 2)
      throw Error(ErrorCode::io,
                  file.string() + ":" + std::to_string(row) + ": expected index,coords,value");
    const double gi = cols[0];
    if (gi < 0 || gi >= static_cast<double>(d.grid().size()) || gi != std::floor(gi))
      throw Error(ErrorCode::io, file.string() + ":" + std::to_string(row) + ": bad index");
    const long l = d.local(static_cast<std::size_t>(gi));
    if (l < 0)
      throw Error(ErrorCode::io,
                  file.string() + ":" + std::to_string(row) + ": node is not active");
    const Point x = d.coord(l);
    for (int a = 0; a < dim; ++a)
      if (std::abs(x[a] - cols[1 + a]) > tol)
        throw Error(ErrorCode::io,
                    file.string() + ":" + std::to_string(row) + ": coordinates disagree");
    f[l] = cols[dim + 1];
    seen[l] = true;
  }
  for (std::size_t l = 0; l < d.size(); ++l)
    if (!seen[l]) throw Error(ErrorCode::io, file.string() + ": missing active nodes");
  return f;
}

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

namespace {

template <class S>
json statuses(const std::vector<S>& s) {
  json a = json::array();
  for (auto x : s) a.push_back(to_string(x));
  return a;
}

json thresholds_json(const Thresholds& t) {
  return {{"crit", t.crit}, {"sub", t.sub}, {"neg", t.neg}};
}

}  // namespace

json to_json(const Extrapolation& e) {
  return {{"model", Extrapolation::model}, {"gamma", num(e.gamma)}, {"limit", num(e.limit)},
          {"c", num(e.c)}, {"residual", num(e.residual)}, {"finite", e.finite},
          {"terminal", e.terminal}};
}

json to_json(const NonnegativityReport& r) {
  return {{"lambda_min", nums(r.lambda_min)},
          {"status", statuses(r.status)},
          {"tol_neg", num(r.tol_neg)},
          {"nonnegative", r.nonnegative},
          {"first_negative_level", r.first_negative_level},
          {"monotone", r.monotone}};
}

json to_json(const GreenGrowth& g) {
  return {{"values", nums(g.values)},       {"increments", nums(g.increments)},
          {"ratios", nums(g.ratios)},       {"status", statuses(g.status)},
          {"fit", to_json(g.fit)},          {"increasing", g.increasing}};
}

json to_json(const ClassificationReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"reason", r.reason},
          {"nonnegativity", to_json(r.nonneg)},
          {"mu", nums(r.mu)},
          {"mu_fit", to_json(r.mu_fit)},
          {"green", to_json(r.green)},
          {"thresholds", thresholds_json(r.thresholds)},
          {"eps_crit", num(r.eps_crit)},
          {"eps_sub", num(r.eps_sub)},
          {"mu_vanishing", r.mu_vanishing},
          {"mu_bounded_below", r.mu_bounded_below},
          {"green_diverging", r.green_diverging},
          {"green_cauchy", r.green_cauchy},
          {"mu_monotone", r.mu_monotone}};
}

json to_json(const GroundState& g) {
  return {{"g_x1", nums(g.g_x1)},          {"phi_x0", num(g.phi_x0)},
          {"diffs", nums(g.diffs)},        {"residual", num(g.residual)},
          {"converged", g.converged},      {"settle_tol", g.settle_tol},
          {"levels_used", g.levels_used},  {"diagnostic", g.diagnostic}};
}

json to_json(const NullSequenceReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"N", num(e.N)},
                       {"M", e.M},
                       {"energy", num(e.energy)},
                       {"cutoff_energy", num(e.cutoff_energy)},
                       {"cutoff_closed_form", num(e.cutoff_closed_form)},
                       {"l2_b0", num(e.l2_b0)}});
  return {{"kind", to_string(r.kind)},
          {"C", num(r.C)},
          {"entries", entries},
          {"energies_eventually_decreasing", r.energies_eventually_decreasing}};
}

json to_json(const Lambda0Estimate& e) {
  return {{"lambda", nums(e.lambda)},
          {"status", statuses(e.status)},
          {"fit", to_json(e.fit)},
          {"monotone", e.monotone}};
}

json to_json(const GapCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"note", c.note},
          {"nu", nums(c.nu)},
          {"fit", to_json(c.fit)},
          {"nu_inf", num(c.nu_inf)},
          {"monotone", c.monotone},
          {"thresholds", thresholds_json(c.thresholds)}};
}

json to_json(const WeightConstruction& w) {
  return {{"C", nums(w.C)},
          {"eps", nums(w.eps)},
          {"min_slack", num(w.min_slack)},
          {"positive", w.positive},
          {"lambda0", to_json(w.lambda0)}};
}

json to_json(const PoincareCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"note", c.note},
          {"pairing", num(c.pairing)},
          {"C", num(c.C)},
          {"nu", nums(c.nu)},
          {"fit", to_json(c.fit)},
          {"floor", num(c.floor)}};
}

json to_json(const std::vector<PairingPoint>& p) {
  json a = json::array();
  for (const auto& x : p)
    a.push_back({{"N", num(x.N)}, {"energy", num(x.energy)}, {"pairing", num(x.pairing)}});
  return a;
}

json to_json(const Minimizer& m) {
  return {{"kappa", num(m.kappa)},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"constraint_residual", num(m.constraint_residual)},
          {"stationarity", num(m.stationarity)},
          {"energy_history_length", m.history.size()},
          {"final_energy", m.history.empty() ? json(nullptr) : num(m.history.back())},
          {"warning", m.warning}};
}

json to_json(const RefinementCheck& r) {
  json diag = json::array();
  for (const auto& s : r.diagnostics) diag.push_back(s);
  json j = {{"passed", r.passed},
            {"nonnegative", r.nonnegative},
            {"critical", r.critical},
            {"ground_state_match", r.ground_state_match},
            {"residual", num(r.residual)},
            {"gs_mismatch", num(r.gs_mismatch)},
            {"nonnegativity", to_json(r.nonneg)},
            {"diagnostics", diag}};
  if (r.nonnegative) {
    j["classification"] = to_json(r.classification);
    j["ground_state"] = to_json(r.ground_state);
  }
  return j;
}

json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace critlab
