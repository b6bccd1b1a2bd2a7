#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "hscale/analysis.hpp"
#include "hscale/dsl.hpp"
#include "hscale/lab.hpp"
#include "hscale/orfun.hpp"
#include "hscale/report.hpp"
#include "hscale/samplers.hpp"
#include "hscale/spectral.hpp"
#include "hscale/torus.hpp"
#include "hscale/version.hpp"

namespace hscale::cli {

namespace {

using nlohmann::ordered_json;

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void dump_rec(const ordered_json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * depth), ' ');
  const std::string pad1(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ',';
          out += nl;
        }
        first = false;
        out += pad1;
        out += nlohmann::json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), out, indent, depth + 1);
      }
      out += nl;
      out += pad;
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ',';
          out += nl;
        }
        out += pad1;
        dump_rec(j[i], out, indent, depth + 1);
      }
      out += nl;
      out += pad;
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += num17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

orfun::OrFunction parse_phi(const ordered_json& cfg, const std::string& key) {
  const std::string text = cfg.at(key).get<std::string>();
  if (text.empty())
    throw std::invalid_argument("missing required function '" + key + "'");
  return dsl::parse(text);
}

// "expr,s0,s1" split at the last two top-level commas
orfun::PsiParameter resolve_psi(const ordered_json& cfg) {
  const std::string from = cfg.value("psi_from", "");
  if (!from.empty()) {
    std::vector<std::size_t> commas;
    int depth = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (from[i] == '(') ++depth;
      if (from[i] == ')') --depth;
      if (from[i] == ',' && depth == 0) commas.push_back(i);
    }
    if (commas.size() < 2)
      throw std::invalid_argument("--psi-from expects 'expr,s0,s1'");
    const std::size_t p1 = commas[commas.size() - 2];
    const std::size_t p2 = commas[commas.size() - 1];
    const double s0 = std::stod(from.substr(p1 + 1, p2 - p1 - 1));
    const double s1 = std::stod(from.substr(p2 + 1));
    return orfun::make_interpolation_parameter(dsl::parse(from.substr(0, p1)),
                                               s0, s1);
  }
  const std::string expr = cfg.value("psi", "");
  if (expr.empty())
    throw std::invalid_argument("one of --psi or --psi-from is required");
  return dsl::parse_psi(expr);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

void write_text(const ordered_json& cfg, const std::string& text,
                const std::string& suffix = "") {
  std::string path = cfg.value("output", "");
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
    return;
  }
  path += suffix;
  if (path.find('/') == std::string::npos) {
    if (const char* dir = std::getenv("HSCALE_OUTPUT_DIR"))
      path = std::string(dir) + "/" + path;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

ordered_json base_doc(const ordered_json& cfg) {
  ordered_json doc;
  doc["version"] = hscale::kVersion;
  doc["verb"] = cfg.at("verb");
  doc["seed"] = cfg.at("seed");
  doc["config"] = cfg;
  return doc;
}

spectral::SpectralOperator resolve_spectrum(const ordered_json& cfg,
                                            lab::Rng& rng) {
  const std::string file = cfg.value("spectrum_file", "");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot read spectrum file: " + file);
    nlohmann::json j;
    in >> j;
    return spectral::spectral_operator_from_json(j);
  }
  const auto n = cfg.at("N").get<std::size_t>();
  if (n == 0) throw std::invalid_argument("empty eigenvalue list (N = 0)");
  return lab::sample_spectrum(rng, n, 1.0, cfg.value("lambda_max", 1e4));
}

// ---- verbs ----

int run_criterion(const ordered_json& cfg, ordered_json& doc) {
  const auto v = analysis::criterion_integral(
      parse_phi(cfg, "phi"), cfg.at("q").get<int>(), cfg.at("n").get<int>(),
      cfg.value("lower", 1.0));
  doc["result"] = report::verdict_to_json(v);
  doc["warnings"] = v.warnings;
  return kExitOk;
}

int run_factorize(const ordered_json& cfg, ordered_json& doc) {
  const auto fac = analysis::rate_factorization(
      parse_phi(cfg, "phi"), cfg.at("q").get<int>(), cfg.at("n").get<int>(),
      cfg.at("eps").get<double>());
  ordered_json r;
  r["epsilon"] = fac.epsilon;
  r["phi1_growth"] = fac.phi1_growth;
  r["product_error"] = fac.product_error;
  r["knot_log_t_max"] = fac.knot_log_t_max;
  r["phi2_verdict"] = report::verdict_to_json(fac.phi2_criterion);
  r["phi1"] = dsl::render(fac.phi1);
  r["phi2"] = dsl::render(fac.phi2);
  r["eta"] = dsl::render(fac.eta);
  doc["result"] = std::move(r);
  const bool ok =
      fac.phi2_criterion.kind == analysis::VerdictKind::Converges &&
      fac.product_error <= 1e-8;
  return ok ? kExitOk : kExitInvariant;
}

int run_indices(const ordered_json& cfg, ordered_json& doc) {
  const auto e = orfun::matuszewska_indices(parse_phi(cfg, "phi"));
  doc["result"] = ordered_json{{"sigma0", e.sigma0},
                               {"sigma1", e.sigma1},
                               {"residual", e.residual},
                               {"drift", e.drift},
                               {"inconclusive", e.inconclusive},
                               {"grid_spec",
                                ordered_json{{"t_top", e.grid.t_top},
                                             {"lambda_max", e.grid.lambda_max},
                                             {"lambda_count", e.grid.lambda_count},
                                             {"anchors", e.grid.anchor_count}}}};
  return kExitOk;
}

int run_interp_identity(const ordered_json& cfg, ordered_json& doc) {
  lab::Rng rng(cfg.at("seed").get<std::uint64_t>());
  const auto A = resolve_spectrum(cfg, rng);
  const auto phi0 = parse_phi(cfg, "phi0");
  const auto phi1 = parse_phi(cfg, "phi1");
  const auto psi = resolve_psi(cfg);
  spectral::InterpolationFrame frame(A, phi0, phi1, psi);
  const auto composed = orfun::compose_parameterized(phi0, phi1, psi);
  const auto samples = cfg.value("samples", 100);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    const auto u = lab::sample_coeffs(rng, A.size());
    const double lhs = frame.interpolation_norm(u);
    const double rhs = spectral::graded_norm(A, composed, u);
    if (rhs > 0) worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  const double tol = cfg.value("tolerance", 1e-12);
  doc["result"] = ordered_json{{"max_rel_gap", worst},
                               {"samples", samples},
                               {"N", A.size()},
                               {"tolerance", tol}};
  return worst <= tol ? kExitOk : kExitInvariant;
}

int run_inequalities(const ordered_json& cfg, ordered_json& doc) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const auto phi0 = parse_phi(cfg, "phi0");
  const auto phi1 = parse_phi(cfg, "phi1");
  const auto psi = resolve_psi(cfg);
  const int spectra = cfg.value("spectra", 3);
  const auto samples = cfg.value("samples", 1000);
  const double tol = cfg.value("tolerance", 1e-10);

  std::vector<report::SlackRecord> records;
  ordered_json mins;
  auto track = [&](const std::string& id, double rel_slack,
                   const std::string& dig) {
    records.push_back({id, rel_slack, dig, tol});
    const std::string key = "min_slack_" + id;
    if (!mins.contains(key) || rel_slack < mins[key].get<double>())
      mins[key] = rel_slack;
  };

  for (int sp = 0; sp < spectra; ++sp) {
    lab::Rng rng(seed + static_cast<std::uint64_t>(sp) * 0x9e3779b9ULL);
    const auto A = resolve_spectrum(cfg, rng);
    spectral::InterpolationFrame frame(A, phi0, phi1, psi);
    for (int s = 0; s < samples; ++s) {
      const auto u = lab::sample_coeffs(rng, A.size());
      const double nphi = frame.norm_phi(u);
      if (nphi == 0) continue;
      const std::string dig = report::digest(
          "ineq:" + std::to_string(seed) + ":" + std::to_string(sp) + ":" +
          std::to_string(s));
      const double tau = frame.kappa() * std::exp(rng.uniform(0.0, 5.0));
      track("3b.3", frame.tau_slack(u, tau) / nphi, dig);
      const auto st = frame.self_tuned(u);
      track("3b.9new", st.slack_a / nphi, dig);
      if (st.slack_b) track("3b.11", *st.slack_b / nphi, dig);
      if (st.slack_c) track("3b.12", *st.slack_c / nphi, dig);
    }
  }
  const bool pass = report::aggregate_pass(records);
  ordered_json failing = ordered_json::array();
  for (const auto& r : records)
    if (!r.pass()) failing.push_back(ordered_json(report::to_json(r)));
  doc["result"] = ordered_json{{"records", records.size()},
                               {"pass", pass},
                               {"minima", mins},
                               {"tolerance", tol},
                               {"failing", failing}};
  return pass ? kExitOk : kExitInvariant;
}

int run_opnorm(const ordered_json& cfg, ordered_json& doc) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  lab::Rng rng(seed);
  const auto A = resolve_spectrum(cfg, rng);
  const auto phi0 = parse_phi(cfg, "phi0");
  const auto phi1 = parse_phi(cfg, "phi1");
  const auto eta0 =
      cfg.value("eta0", "").empty() ? phi0 : parse_phi(cfg, "eta0");
  const auto eta1 =
      cfg.value("eta1", "").empty() ? phi1 : parse_phi(cfg, "eta1");
  const auto psi = resolve_psi(cfg);
  const auto samples = cfg.value("samples", 100);
  const double tol = cfg.value("tolerance", 1e-10);

  std::vector<report::SlackRecord> records;
  double min_slack = std::numeric_limits<double>::infinity();
  ordered_json last;
  for (int s = 0; s < samples; ++s) {
    spectral::DiagonalMap T;
    T.m.resize(A.size());
    for (auto& z : T.m) z = spectral::Complex(rng.normal(), rng.normal());
    const auto rec =
        spectral::operator_norm_interpolation(T, phi0, phi1, eta0, eta1, psi, A);
    const double rel = rec.slack / rec.norm_interp;
    min_slack = std::min(min_slack, rel);
    records.push_back({"3b.19", rel,
                       report::digest("opnorm:" + std::to_string(seed) + ":" +
                                      std::to_string(s)),
                       tol});
    last = ordered_json{{"norm0", rec.norm0},
                        {"norm1", rec.norm1},
                        {"norm_interp", rec.norm_interp},
                        {"nu", rec.nu},
                        {"c_psi_nu", rec.c_psi_nu},
                        {"ratio", rec.ratio},
                        {"dilation", rec.dilation},
                        {"slack", rec.slack}};
  }
  const bool pass = report::aggregate_pass(records);
  doc["result"] = ordered_json{{"records", records.size()},
                               {"pass", pass},
                               {"min_slack_3b.19", min_slack},
                               {"tolerance", tol},
                               {"last_sample", last}};
  return pass ? kExitOk : kExitInvariant;
}

int run_rate(const ordered_json& cfg, ordered_json& doc) {
  const auto phi = parse_phi(cfg, "phi");
  const int q = cfg.at("q").get<int>();
  const int n = cfg.at("n").get<int>();
  const int M = cfg.at("M").get<int>();
  const auto fac =
      analysis::rate_factorization(phi, q, n, cfg.value("eps", 0.25));
  const auto e = torus::EigenEnumeration::build(n, M);
  const auto f = torus::synthesize_field(
      n, M, torus::RadialDecay{phi, cfg.value("delta", 0.5)}, e);

  std::vector<std::size_t> ks;
  for (double k : parse_list(cfg.value("ks", "")))
    ks.push_back(static_cast<std::size_t>(k));
  if (ks.empty())
    for (std::size_t k = 16; k <= e.total(); k *= 2) ks.push_back(k);

  const auto res = torus::rate_experiment(fac.phi1, fac.phi2, f, q, ks,
                                          cfg.value("grid", 0));
  std::vector<std::array<double, 4>> rows;
  ordered_json jrows = ordered_json::array();
  ordered_json theta = ordered_json::array();
  for (const auto& r : res.rows) {
    rows.push_back({static_cast<double>(r.k), r.error, r.bound, r.ratio});
    jrows.push_back(ordered_json{{"k", r.k},
                                 {"error", r.error},
                                 {"bound", r.bound},
                                 {"ratio", r.ratio},
                                 {"degree", r.degree},
                                 {"l1_bound", r.l1_bound}});
    theta.push_back(r.theta);
  }
  doc["result"] = ordered_json{{"c_star", res.c_star},
                               {"norm_phi", res.norm_phi},
                               {"grid_per_axis", res.grid_per_axis},
                               {"rows", jrows},
                               {"theta", theta}};
  if (cfg.value("format", "csv") == "csv") {
    write_text(cfg, report::rate_table_csv(rows));
    ordered_json meta = doc;
    if (!cfg.value("output", "").empty())
      write_text(cfg, dump_json17(meta, 2) + "\n", ".meta.json");
  } else {
    write_text(cfg, dump_json17(doc, 2) + "\n");
  }
  return std::isfinite(res.c_star) ? kExitOk : kExitInvariant;
}

int run_unconditional(const ordered_json& cfg, ordered_json& doc) {
  const auto phi = parse_phi(cfg, "phi");
  const int n = cfg.at("n").get<int>();
  const int M = cfg.at("M").get<int>();
  const auto e = torus::EigenEnumeration::build(n, M);
  const auto f = torus::synthesize_field(
      n, M, torus::RadialDecay{phi, cfg.value("delta", 1.0)}, e);
  auto levels = parse_list(cfg.value("eps_levels", "0.1,0.01,0.001"));
  const auto res = torus::unconditional_probe(
      f, phi, cfg.at("q").get<int>(), cfg.value("perms", 20),
      cfg.at("seed").get<std::uint64_t>(), levels, cfg.value("grid", 0));
  bool all_reached = true;
  ordered_json table = ordered_json::array();
  for (const auto& row : res.k_at_level) {
    ordered_json jrow = ordered_json::array();
    for (auto k : row) {
      jrow.push_back(k);
      if (k < 0) all_reached = false;
    }
    table.push_back(std::move(jrow));
  }
  doc["result"] = ordered_json{{"eps_levels", levels},
                               {"k_at_level", table},
                               {"final_residual", res.final_residual},
                               {"all_reached", all_reached},
                               {"criterion", report::verdict_to_json(res.criterion)}};
  return kExitOk;
}

int run_ae(const ordered_json& cfg, ordered_json& doc) {
  const auto phi = parse_phi(cfg, "phi");
  const int n = cfg.at("n").get<int>();
  const int M = cfg.at("M").get<int>();
  torus::TorusField f(n, M);
  const std::string file = cfg.value("field_file", "");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot read field file: " + file);
    nlohmann::json j;
    in >> j;
    f = torus::torus_field_from_json(j);
  } else {
    f = torus::synthesize_field(
        n, M,
        torus::RandomInBall{orfun::OrFunction::logstar(),
                            cfg.at("seed").get<std::uint64_t>(),
                            cfg.value("radius", 1.0),
                            cfg.value("envelope", 1.0)});
  }
  const auto d = torus::ae_diagnostics(f, phi, cfg.value("grid", 0));
  const auto series = torus::orlicz_condition_series(
      phi, n, cfg.value("series_jmax", std::size_t{1000000}));
  ordered_json cps = ordered_json::array();
  for (const auto& [j, s] : series.checkpoints)
    cps.push_back(ordered_json{{"j", j}, {"partial", s}});
  doc["result"] =
      ordered_json{{"majorant_l2", d.majorant_l2},
                   {"mr_sum", d.mr_sum},
                   {"orlicz_weighted", d.orlicz_weighted},
                   {"orlicz_condition_in_cube", d.orlicz_condition},
                   {"norm_logstar", d.norm_logstar},
                   {"fitted_c", d.fitted_c},
                   {"condition_series",
                    ordered_json{{"checkpoints", cps},
                                 {"strictly_increasing", series.strictly_increasing},
                                 {"last_doubling_growth", series.last_doubling_growth}}}};
  return kExitOk;
}

}  // namespace

std::string dump_json17(const ordered_json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  return out;
}

nlohmann::ordered_json parse_cli(int argc, const char* const* argv) {
  CLI::App app{"spectral Hilbert-scale experiments"};
  app.require_subcommand(1);

  ordered_json cfg;
  std::string config_file;
  std::uint64_t seed = lab::kDefaultSeed;
  std::string output, format;  // format defaults per verb
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  double grid_tmax = 1e6;

  struct Common {
    std::string phi, phi0, phi1, eta0, eta1, psi, psi_from, spectrum_file,
        field_file, ks, eps_levels;
    int q = 0, n = 1, M = 64, grid = 0, samples = -1, spectra = 3, perms = 20;
    std::size_t N = 1000, series_jmax = 1000000;
    double lower = 1.0, eps = 0.25, delta = 0.5, lambda_max = 1e4,
           radius = 1.0, envelope = 1.0;
  } c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "RNG seed (echoed in output)");
    sub->add_option("--output", output, "output path (stdout when empty)");
    sub->add_option("--format", format, "json or csv");
    sub->add_option("--tolerance", tolerance, "slack/gap tolerance");
    sub->add_option("--grid-tmax", grid_tmax, "verification grid upper t");
    sub->add_option("--config", config_file, "JSON config file (wins on conflict)");
  };

  auto* criterion = app.add_subcommand("criterion", "convergence criterion integral");
  criterion->add_option("--phi", c.phi)->required();
  criterion->add_option("--q", c.q)->required();
  criterion->add_option("--n", c.n)->required();
  criterion->add_option("--lower", c.lower);
  add_common(criterion);

  auto* factorize = app.add_subcommand("factorize", "rate factorization phi = phi1 phi2");
  factorize->add_option("--phi", c.phi)->required();
  factorize->add_option("--q", c.q)->required();
  factorize->add_option("--n", c.n)->required();
  factorize->add_option("--eps", c.eps);
  add_common(factorize);

  auto* indices = app.add_subcommand("indices", "Matuszewska index estimate");
  indices->add_option("--phi", c.phi)->required();
  add_common(indices);

  auto* interp = app.add_subcommand("interp-identity", "norm identity sweep");
  interp->add_option("--phi0", c.phi0)->required();
  interp->add_option("--phi1", c.phi1)->required();
  interp->add_option("--psi", c.psi);
  interp->add_option("--psi-from", c.psi_from);
  interp->add_option("--N", c.N);
  interp->add_option("--samples", c.samples);
  interp->add_option("--lambda-max", c.lambda_max);
  interp->add_option("--spectrum-file", c.spectrum_file);
  add_common(interp);

  auto* ineq = app.add_subcommand("inequalities", "interpolational inequality sweep");
  ineq->add_option("--phi0", c.phi0)->required();
  ineq->add_option("--phi1", c.phi1)->required();
  ineq->add_option("--psi", c.psi);
  ineq->add_option("--psi-from", c.psi_from);
  ineq->add_option("--N", c.N);
  ineq->add_option("--samples", c.samples);
  ineq->add_option("--spectra", c.spectra);
  ineq->add_option("--lambda-max", c.lambda_max);
  ineq->add_option("--spectrum-file", c.spectrum_file);
  add_common(ineq);

  auto* opnorm = app.add_subcommand("opnorm", "operator-norm interpolational inequality");
  opnorm->add_option("--phi0", c.phi0)->required();
  opnorm->add_option("--phi1", c.phi1)->required();
  opnorm->add_option("--eta0", c.eta0);
  opnorm->add_option("--eta1", c.eta1);
  opnorm->add_option("--psi", c.psi);
  opnorm->add_option("--psi-from", c.psi_from);
  opnorm->add_option("--N", c.N);
  opnorm->add_option("--samples", c.samples);
  opnorm->add_option("--lambda-max", c.lambda_max);
  opnorm->add_option("--spectrum-file", c.spectrum_file);
  add_common(opnorm);

  auto* rate = app.add_subcommand("rate", "convergence-rate experiment on T^n");
  rate->add_option("--phi", c.phi)->required();
  rate->add_option("--q", c.q)->required();
  rate->add_option("--n", c.n)->required();
  rate->add_option("--M", c.M)->required();
  rate->add_option("--eps", c.eps);
  rate->add_option("--delta", c.delta);
  rate->add_option("--ks", c.ks);
  rate->add_option("--grid", c.grid);
  add_common(rate);

  auto* uncond = app.add_subcommand("unconditional", "permutation convergence probe");
  uncond->add_option("--phi", c.phi)->required();
  uncond->add_option("--q", c.q);
  uncond->add_option("--n", c.n);
  uncond->add_option("--M", c.M)->required();
  uncond->add_option("--perms", c.perms);
  uncond->add_option("--delta", c.delta);
  uncond->add_option("--eps-levels", c.eps_levels);
  uncond->add_option("--grid", c.grid);
  add_common(uncond);

  auto* ae = app.add_subcommand("ae", "a.e.-convergence diagnostics");
  ae->add_option("--phi", c.phi)->required();
  ae->add_option("--n", c.n);
  ae->add_option("--M", c.M)->required();
  ae->add_option("--grid", c.grid);
  ae->add_option("--radius", c.radius);
  ae->add_option("--envelope", c.envelope);
  ae->add_option("--field-file", c.field_file);
  ae->add_option("--series-jmax", c.series_jmax);
  add_common(ae);

  app.parse(argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string verb = sub->get_name();

  cfg["verb"] = verb;
  cfg["seed"] = seed;
  cfg["output"] = output;
  cfg["format"] = format.empty() ? (verb == "rate" ? "csv" : "json") : format;
  cfg["grid_tmax"] = grid_tmax;
  if (!std::isnan(tolerance))
    cfg["tolerance"] = tolerance;
  else if (verb == "interp-identity")
    cfg["tolerance"] = 1e-12;
  else
    cfg["tolerance"] = 1e-10;

  auto put_if = [&](const char* key, const auto& value, bool used) {
    if (used) cfg[key] = value;
  };
  put_if("phi", c.phi, !c.phi.empty());
  put_if("phi0", c.phi0, !c.phi0.empty());
  put_if("phi1", c.phi1, !c.phi1.empty());
  put_if("eta0", c.eta0, !c.eta0.empty());
  put_if("eta1", c.eta1, !c.eta1.empty());
  put_if("psi", c.psi, !c.psi.empty());
  put_if("psi_from", c.psi_from, !c.psi_from.empty());
  put_if("spectrum_file", c.spectrum_file, !c.spectrum_file.empty());
  put_if("field_file", c.field_file, !c.field_file.empty());
  put_if("ks", c.ks, !c.ks.empty());
  put_if("eps_levels", c.eps_levels, !c.eps_levels.empty());

  if (verb == "criterion" || verb == "factorize" || verb == "rate" ||
      verb == "unconditional")
    cfg["q"] = c.q;
  if (verb != "indices") cfg["n"] = c.n;
  if (verb == "rate" || verb == "unconditional" || verb == "ae") cfg["M"] = c.M;
  if (verb == "criterion") cfg["lower"] = c.lower;
  if (verb == "factorize" || verb == "rate") cfg["eps"] = c.eps;
  if (verb == "rate" || verb == "unconditional") cfg["delta"] = c.delta;
  if (verb == "unconditional") cfg["perms"] = c.perms;
  if (verb == "ae") {
    cfg["radius"] = c.radius;
    cfg["envelope"] = c.envelope;
    cfg["series_jmax"] = c.series_jmax;
  }
  if (verb == "interp-identity" || verb == "inequalities" || verb == "opnorm") {
    cfg["N"] = c.N;
    cfg["lambda_max"] = c.lambda_max;
    cfg["samples"] = c.samples > 0 ? c.samples
                     : verb == "inequalities" ? 1000
                                              : 100;
  }
  if (verb == "inequalities") cfg["spectra"] = c.spectra;
  if (verb == "rate" || verb == "unconditional" || verb == "ae")
    cfg["grid"] = c.grid;

  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in)
      throw std::invalid_argument("cannot read config file: " + config_file);
    nlohmann::json file_cfg;
    in >> file_cfg;
    for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it) {
      if (cfg.contains(it.key()) && cfg[it.key()] != it.value())
        std::cerr << "warning: config file overrides --" << it.key() << "\n";
      cfg[it.key()] = it.value();
    }
  }
  return cfg;
}

int run_experiment(const nlohmann::ordered_json& cfg) {
  const std::string verb = cfg.at("verb").get<std::string>();
  ordered_json doc = base_doc(cfg);
  int code = kExitOk;
  if (verb == "criterion")
    code = run_criterion(cfg, doc);
  else if (verb == "factorize")
    code = run_factorize(cfg, doc);
  else if (verb == "indices")
    code = run_indices(cfg, doc);
  else if (verb == "interp-identity")
    code = run_interp_identity(cfg, doc);
  else if (verb == "inequalities")
    code = run_inequalities(cfg, doc);
  else if (verb == "opnorm")
    code = run_opnorm(cfg, doc);
  else if (verb == "rate")
    return run_rate(cfg, doc);  // rate handles its own csv emission
  else if (verb == "unconditional")
    code = run_unconditional(cfg, doc);
  else if (verb == "ae")
    code = run_ae(cfg, doc);
  else
    throw std::invalid_argument("unknown verb: " + verb);
  doc["exit_code"] = code;
  write_text(cfg, dump_json17(doc, 2) + "\n");
  return code;
}

}  // namespace hscale::cli
