#include "softplast/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "softplast/errors.hpp"
#include "softplast/laminate.hpp"

namespace softplast {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw ValidationError("scenario: unknown key '" + where + "." + key + "'");
  }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw ValidationError("scenario: missing key '" + where + "." + key + "'");
  if (!obj[key].is_number())
    throw ValidationError("scenario: '" + where + "." + key + "' must be a number");
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& where,
                           const std::string& key) {
  if (!obj.contains(key))
    throw ValidationError("scenario: missing key '" + where + "." + key + "'");
  if (!obj[key].is_string())
    throw ValidationError("scenario: '" + where + "." + key + "' must be a string");
  return obj[key].get<std::string>();
}

SymTensor2 parse_sym(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 3 || !arr[0].is_number())
    throw ValidationError("scenario: '" + where + "' must be [m11, m12, m22]");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

YieldSet parse_yield(const json& y) {
  reject_unknown_keys(y, "material.yield",
                      {"type", "radius", "s_sigma", "s_zeta", "vertices"});
  const std::string type = require_string(y, "material.yield", "type");
  if (type == "ball") return YieldSet::ball(require_number(y, "material.yield", "radius"));
  if (type == "ellipsoid")
    return YieldSet::ellipsoid(require_number(y, "material.yield", "s_sigma"),
                               require_number(y, "material.yield", "s_zeta"));
  if (type == "polytope") {
    if (!y.contains("vertices") || !y["vertices"].is_array())
      throw ValidationError("scenario: missing key 'material.yield.vertices'");
    std::vector<Eigen::Vector3d> verts;
    for (const auto& v : y["vertices"]) {
      if (!v.is_array() || v.size() != 3)
        throw ValidationError(
            "scenario: 'material.yield.vertices' entries must be [d11, d12, zeta]");
      verts.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
    }
    return YieldSet::polytope(verts);
  }
  throw ValidationError("scenario: 'material.yield.type' must be ball|ellipsoid|polytope");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

MaterialModel Scenario::material() const {
  return MaterialModel(Elasticity(mu, kappa), yield,
                       SofteningPotential::sqrt_family(b_v));
}

TimeGrid Scenario::grid() const {
  if (explicit_times) {
    TimeGrid g;
    g.times = *explicit_times;
    return g;
  }
  return TimeGrid::uniform(t_end, steps);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario: cannot open file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: JSON parse error: ") + e.what());
  }

  reject_unknown_keys(doc, "",
                      {"version", "material", "initial", "load", "time", "solver",
                       "verify", "output"});
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1)
    throw ValidationError("scenario: 'version' must be the integer 1");

  Scenario s;

  if (!doc.contains("material"))
    throw ValidationError("scenario: missing key 'material'");
  const json& mat = doc["material"];
  reject_unknown_keys(mat, "material", {"mu", "kappa", "yield", "b_V"});
  s.mu = require_number(mat, "material", "mu");
  s.kappa = require_number(mat, "material", "kappa");
  if (!(s.mu > 0.0)) throw ValidationError("scenario: 'material.mu' must be > 0");
  if (!(s.kappa > 0.0)) throw ValidationError("scenario: 'material.kappa' must be > 0");
  if (!mat.contains("yield"))
    throw ValidationError("scenario: missing key 'material.yield'");
  s.yield = parse_yield(mat["yield"]);
  s.b_v = require_number(mat, "material", "b_V");
  if (!(s.b_v > 0.0)) throw ValidationError("scenario: 'material.b_V' must be > 0");
  if (!(s.b_v < s.yield.yield_height()))
    throw ValidationError("softening asymptote must be below yield height a_K");

  if (!doc.contains("initial"))
    throw ValidationError("scenario: missing key 'initial'");
  const json& init = doc["initial"];
  reject_unknown_keys(init, "initial", {"p0", "z0"});
  if (!init.contains("p0") || !init["p0"].is_array() || init["p0"].size() != 2)
    throw ValidationError("scenario: 'initial.p0' must be [d11, d12]");
  s.p0 = {init["p0"][0].get<double>(), init["p0"][1].get<double>()};
  s.z0 = require_number(init, "initial", "z0");

  if (!doc.contains("load")) throw ValidationError("scenario: missing key 'load'");
  const json& load = doc["load"];
  reject_unknown_keys(load, "load", {"mode", "xi0", "knots"});
  const std::string mode = require_string(load, "load", "mode");
  if (mode == "monotone_affine") {
    if (!load.contains("xi0"))
      throw ValidationError("scenario: missing key 'load.xi0'");
    s.load = LoadProgram::monotone_affine(parse_sym(load["xi0"], "load.xi0"));
  } else if (mode == "piecewise_linear") {
    if (!load.contains("knots") || !load["knots"].is_array())
      throw ValidationError("scenario: missing key 'load.knots'");
    std::vector<LoadProgram::Knot> knots;
    for (const auto& k : load["knots"]) {
      reject_unknown_keys(k, "load.knots[]", {"t", "Ew"});
      knots.push_back({require_number(k, "load.knots[]", "t"),
                       parse_sym(k["Ew"], "load.knots[].Ew")});
    }
    s.load = LoadProgram::piecewise_linear(std::move(knots));
  } else {
    throw ValidationError("scenario: 'load.mode' must be monotone_affine|piecewise_linear");
  }

  if (!doc.contains("time")) throw ValidationError("scenario: missing key 'time'");
  const json& time = doc["time"];
  reject_unknown_keys(time, "time", {"t_end", "steps", "knots"});
  if (time.contains("knots")) {
    if (!time["knots"].is_array() || time["knots"].size() < 2)
      throw ValidationError("scenario: 'time.knots' must list >= 2 times");
    std::vector<double> times;
    for (const auto& t : time["knots"]) times.push_back(t.get<double>());
    s.explicit_times = std::move(times);
  } else {
    s.t_end = require_number(time, "time", "t_end");
    s.steps = static_cast<int>(require_number(time, "time", "steps"));
    if (!(s.t_end > 0.0)) throw ValidationError("scenario: 'time.t_end' must be > 0");
    if (s.steps < 1) throw ValidationError("scenario: 'time.steps' must be >= 1");
  }

  if (doc.contains("solver")) {
    const json& solver = doc["solver"];
    reject_unknown_keys(solver, "solver", {"tol", "max_iter", "work_integration", "seed"});
    if (solver.contains("tol")) {
      s.solver.tol = require_number(solver, "solver", "tol");
      if (!(s.solver.tol > 0.0))
        throw ValidationError("scenario: 'solver.tol' must be > 0");
    }
    if (solver.contains("max_iter")) {
      s.solver.max_iter = static_cast<int>(require_number(solver, "solver", "max_iter"));
      if (s.solver.max_iter < 1)
        throw ValidationError("scenario: 'solver.max_iter' must be >= 1");
    }
    if (solver.contains("work_integration")) {
      const std::string w = require_string(solver, "solver", "work_integration");
      if (w == "exact")
        s.solver.work = WorkIntegration::exact_segment;
      else if (w == "trapezoid")
        s.solver.work = WorkIntegration::trapezoid;
      else
        throw ValidationError("scenario: 'solver.work_integration' must be exact|trapezoid");
    }
    if (solver.contains("seed"))
      s.solver.seed = static_cast<std::uint64_t>(require_number(solver, "solver", "seed"));
  }

  if (doc.contains("verify")) {
    const json& verify = doc["verify"];
    reject_unknown_keys(verify, "verify",
                        {"energy", "stability", "laminate_study", "laminate_k",
                         "stability_samples", "stability_times"});
    if (verify.contains("energy")) s.verify.energy = verify["energy"].get<bool>();
    if (verify.contains("stability")) s.verify.stability = verify["stability"].get<bool>();
    if (verify.contains("laminate_study"))
      s.verify.laminate_study = verify["laminate_study"].get<bool>();
    if (verify.contains("laminate_k")) {
      for (const auto& k : verify["laminate_k"]) {
        const int kk = k.get<int>();
        if (kk < 2) throw ValidationError("scenario: 'verify.laminate_k' entries must be >= 2");
        s.verify.laminate_k.push_back(kk);
      }
    }
    if (verify.contains("stability_samples"))
      s.verify.stability_samples =
          static_cast<int>(require_number(verify, "verify", "stability_samples"));
    if (verify.contains("stability_times"))
      s.verify.stability_times =
          static_cast<int>(require_number(verify, "verify", "stability_times"));
  }

  if (doc.contains("output")) {
    const json& output = doc["output"];
    reject_unknown_keys(output, "output", {"directory", "formats"});
    if (output.contains("directory"))
      s.output.directory = require_string(output, "output", "directory");
    if (output.contains("formats")) {
      s.output.csv = s.output.json = s.output.plot = false;
      for (const auto& f : output["formats"]) {
        const std::string fmt = f.get<std::string>();
        if (fmt == "csv") s.output.csv = true;
        else if (fmt == "json") s.output.json = true;
        else if (fmt == "plot") s.output.plot = true;
        else throw ValidationError("scenario: 'output.formats' must contain csv|json|plot");
      }
    }
  }
  return s;
}

namespace {

std::string series_csv_text(const Elasticity& el,
                            const std::vector<EvolutionState>& record) {
  std::ostringstream out;
  out << "t,e11,e12,e22,p11,p12,sigma11,sigma12,sigma22,sigma_dev_norm,"
         "z_atom,conc_zhat,alpha,Q,diss_H,v_total,work,residual\n";
  const EvolutionState& first = record.front();
  const double q0 = elastic_energy(el, first.e);
  for (const EvolutionState& s : record) {
    const double q = elastic_energy(el, s.e);
    const double residual = q + s.diss_H + s.v_total - q0 - first.v_total - s.work;
    const double cols[] = {s.t,
                           s.e.m11,
                           s.e.m12,
                           s.e.m22,
                           s.p.d11,
                           s.p.d12,
                           s.sigma.m11,
                           s.sigma.m12,
                           s.sigma.m22,
                           norm(deviatoric(s.sigma)),
                           s.measure.atom_z,
                           s.measure.conc_zhat,
                           s.measure.alpha,
                           q,
                           s.diss_H,
                           s.v_total,
                           s.work,
                           residual};
    for (std::size_t i = 0; i < std::size(cols); ++i)
      out << (i ? "," : "") << format_double(cols[i]);
    out << "\n";
  }
  return out.str();
}

std::string plot_script_text(bool with_laminate) {
  std::ostringstream out;
  out << "# gnuplot script; run from the output directory\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 900,600\n"
         "set output 'stress.png'\n"
         "set xlabel 't'\n"
         "plot 'series.csv' using 1:10 with lines title '|dev sigma|', \\\n"
         "     'series.csv' using 1:(sqrt(2*($5*$5+$6*$6))) with lines title '|p|'\n"
         "set output 'energy.png'\n"
         "plot 'series.csv' using 1:14 with lines title 'Q', \\\n"
         "     'series.csv' using 1:15 with lines title 'diss_H', \\\n"
         "     'series.csv' using 1:17 with lines title 'work'\n";
  if (with_laminate)
    out << "set output 'laminate.png'\n"
           "set logscale xy\n"
           "plot 'laminate.csv' using 1:3 with linespoints title 'gap'\n";
  return out.str();
}

}  // namespace

RunReport run_scenario(const Scenario& scenario) {
  RunReport report;
  nlohmann::ordered_json summary;
  summary["version"] = 1;

  const std::filesystem::path outdir(scenario.output.directory);
  std::filesystem::create_directories(outdir);

  MaterialModel model = scenario.material();
  std::vector<EvolutionState> record;
  try {
    record = run_evolution(model, scenario.load, scenario.grid(), scenario.p0,
                           scenario.z0, scenario.solver);
  } catch (const SolverFailure& f) {
    report.status = RunStatus::solver_error;
    report.message = f.what();
    nlohmann::ordered_json diag;
    diag["error"] = f.what();
    diag["time_index"] = f.time_index;
    diag["iterations"] = f.iterations;
    diag["residual"] = f.residual;
    diag["last_iterate"] = {f.last_iterate.d11, f.last_iterate.d12};
    atomic_write(outdir / "diagnostic.json", diag.dump(2) + "\n");
    return report;
  }

  // first-yield detection: first recorded time the plastic strain moved
  double t0 = -1.0;
  for (const EvolutionState& s : record) {
    if (norm(s.p - record.front().p) > 1e-12) {
      t0 = s.t;
      break;
    }
  }
  report.t0_detected = t0;

  const EvolutionState& last = record.back();
  summary["t0_detected"] = t0;
  summary["t_end"] = last.t;
  summary["steps"] = record.size() - 1;
  summary["final_sigma_dev_norm"] = norm(deviatoric(last.sigma));
  summary["final_p_norm"] = norm(last.p);
  summary["final_p"] = {last.p.d11, last.p.d12};
  summary["conc_zhat"] = last.measure.conc_zhat;
  summary["diss_H"] = last.diss_H;
  summary["v_total"] = last.v_total;
  summary["work"] = last.work;
  summary["work_error_bound"] = last.work_error;
  summary["path_dependent_summary"] = last.path_dependent_summary;
  summary["yield_conforming"] = scenario.yield.conforming();

  bool verify_failed = false;
  std::string verify_message;

  report.energy_residual = energy_balance_residual(model.elastic, record);
  summary["energy_residual"] = report.energy_residual;
  if (scenario.verify.energy) {
    const double allowance = scenario.solver.work == WorkIntegration::exact_segment
                                 ? 1e-10
                                 : last.work_error + 1e-10;
    if (std::abs(report.energy_residual) > allowance) {
      verify_failed = true;
      verify_message = "energy balance residual above tolerance";
    }
    summary["energy_allowance"] = allowance;
  }

  if (scenario.verify.stability) {
    const int n_times = std::max(1, scenario.verify.stability_times);
    double worst = -std::numeric_limits<double>::infinity();
    const std::size_t stride = std::max<std::size_t>(1, record.size() / n_times);
    for (std::size_t i = 0; i < record.size(); i += stride) {
      worst = std::max(worst, stability_check(model, record[i],
                                              scenario.verify.stability_samples,
                                              scenario.solver.seed + i));
    }
    worst = std::max(worst, stability_check(model, record.back(),
                                            scenario.verify.stability_samples,
                                            scenario.solver.seed + record.size()));
    report.worst_stability_violation = worst;
    summary["worst_stability_violation"] = worst;
    if (worst > 1e-12) {
      verify_failed = true;
      verify_message = "stability violation above tolerance";
    }
  }

  if (scenario.verify.laminate_study && !scenario.verify.laminate_k.empty()) {
    const DevTensor2 xi0s = deviatoric(scenario.load.at(1.0) - scenario.load.at(0.0));
    if (norm(xi0s) > 0.0) {
      const double target = effective_dissipation(model.yield, model.softening, xi0s, 0.0);
      std::ostringstream lam;
      lam << "k,functional,gap\n";
      for (int k : scenario.verify.laminate_k) {
        const LaminateField field = build_laminate(k, xi0s, 1.0);
        const double val = discrete_functional(field, model.yield, model.softening,
                                               scenario.z0);
        lam << k << "," << format_double(val) << ","
            << format_double(std::abs(val - target)) << "\n";
      }
      report.laminate_csv = outdir / "laminate.csv";
      atomic_write(report.laminate_csv, lam.str());
      summary["laminate_target"] = target;
    }
  }

  if (scenario.output.csv) {
    report.series_csv = outdir / "series.csv";
    atomic_write(report.series_csv, series_csv_text(model.elastic, record));
  }
  if (scenario.output.plot)
    atomic_write(outdir / "plot.gp", plot_script_text(!report.laminate_csv.empty()));

  if (verify_failed) {
    report.status = RunStatus::verification_failure;
    report.message = verify_message;
    summary["verification_failure"] = verify_message;
  }
  if (scenario.output.json) {
    report.summary_json = outdir / "summary.json";
    atomic_write(report.summary_json, summary.dump(2) + "\n");
  }
  return report;
}

}  // namespace softplast
