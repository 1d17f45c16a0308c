#include "commands.hpp"

#include "sspack/errors.hpp"
#include "sspack/io.hpp"

#include <CLI11.hpp>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

namespace sspack::cli {

using nlohmann::json;

namespace {

double pick(double value, double fallback) { return value > 0.0 ? value : fallback; }

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

struct Context {
  const RunConfig& cfg;
  Ifs ifs;
  double s;
};

SeparationCert obtain_cert(const Context& ctx, json& notes) {
  if (!ctx.cfg.cert_path.empty()) {
    std::ifstream in(ctx.cfg.cert_path);
    if (!in) throw InputError("cannot open certificate " + ctx.cfg.cert_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InputError(ctx.cfg.cert_path + ": " + e.what());
    }
    notes.push_back("certificate read from file, not re-derived");
    return cert_from_json(doc.contains("cert") ? doc.at("cert") : doc);
  }
  SeparationOptions so;
  if (ctx.cfg.depth_cap > 0) so.depth_cap = ctx.cfg.depth_cap;
  if (ctx.cfg.tol > 0.0) so.gap_tol = ctx.cfg.tol;
  notes.push_back("delta standardized on delta_lb");
  return certify_ssc(ctx.ifs, ctx.s, so);
}

OptimizerOptions optimizer_options(const RunConfig& cfg, double default_eps, bool strict) {
  OptimizerOptions o;
  o.eps = pick(cfg.eps, default_eps);
  o.threads = std::max(1, cfg.threads);
  o.max_cells = cfg.max_cells;
  o.strict = strict;
  return o;
}

json precision_result(const PrecisionError& e) {
  return {{"status", "precision_error"}, {"message", e.what()}, {"value_lo", e.lo()}, {"value_hi", e.hi()}};
}

struct Outcome {
  json result;
  json cert = nullptr;
  int code = kExitOk;
};

Outcome cmd_dim(const Context& ctx) {
  const DimensionResult d = similarity_dimension(ctx.ifs.ratios(), pick(ctx.cfg.tol, kDefaultDimensionTol));
  json r = to_json(d);
  r["status"] = "ok";
  return {r};
}

Outcome cmd_certify(const Context& ctx) {
  json notes = json::array();
  try {
    const SeparationCert c = obtain_cert(ctx, notes);
    return {{{"status", "ok"}, {"certified", true}, {"notes", notes}}, to_json(c)};
  } catch (const SscUncertified& e) {
    return {{{"status", "uncertified"}, {"certified", false}, {"message", e.what()}, {"lower", e.lower()},
             {"upper", e.upper()}},
            nullptr,
            kExitUncertified};
  }
}

Outcome cmd_packing(const Context& ctx) {
  json notes = json::array();
  const SeparationCert cert = obtain_cert(ctx, notes);
  const OptimizerOptions o = optimizer_options(ctx.cfg, 1e-3, true);
  const CylinderTree tree(ctx.ifs, ctx.s);
  RadiusWindow window{cert.r_lo, cert.r_hi};
  if (ctx.cfg.window == "wide") {
    window.lo = cert.r_star * cert.r_lo;
    notes.push_back("wide window: radii from r_*^2 delta / 2");
  } else if (ctx.cfg.window != "compact") {
    throw ParameterError("window must be compact or wide");
  }
  try {
    json r = to_json(maximize_reciprocal_density(tree, window, o));
    r["status"] = "ok";
    r["notes"] = notes;
    return {r, to_json(cert)};
  } catch (const PrecisionError& e) {
    return {precision_result(e), to_json(cert), kExitPrecision};
  }
}

Outcome cmd_hausdorff(const Context& ctx) {
  json notes = json::array();
  const SeparationCert cert = obtain_cert(ctx, notes);
  const OptimizerOptions o = optimizer_options(ctx.cfg, 1e-3, true);
  try {
    if (ctx.cfg.balls || ctx.ifs.dim() != 1) {
      if (!ctx.cfg.balls) throw InputError("interval search needs dim = 1; use --balls for the ball-family bound");
      json r = to_json(hausdorff_upper_bound_balls(ctx.ifs, ctx.s, cert, o));
      r["status"] = "ok";
      notes.push_back("infimum over balls only; an upper bound on the Hausdorff measure");
      r["notes"] = notes;
      return {r, to_json(cert)};
    }
    const DensityResult h = hausdorff_measure_1d(ctx.ifs, ctx.s, cert, o);
    json r = to_json(h);
    r["status"] = "ok";
    r["witness_interval"] = {h.witness.center(0) - h.witness.radius, h.witness.center(0) + h.witness.radius};
    r["notes"] = notes;
    return {r, to_json(cert)};
  } catch (const PrecisionError& e) {
    return {precision_result(e), to_json(cert), kExitPrecision};
  }
}

Outcome cmd_density_scan(const Context& ctx) {
  json notes = json::array();
  const SeparationCert cert = obtain_cert(ctx, notes);
  const CylinderTree tree(ctx.ifs, ctx.s);
  std::vector<double> radii;
  const std::size_t n = ctx.cfg.radii;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    radii.push_back(cert.r_lo + t * (cert.r_hi - cert.r_lo));
  }
  std::ofstream csv;
  if (!ctx.cfg.csv.empty()) {
    csv.open(ctx.cfg.csv);
    if (!csv) throw InputError("cannot write " + ctx.cfg.csv);
    write_scan_csv_header(csv, ctx.ifs.dim());
  }
  double best = 0.0;
  json argmax = nullptr;
  const std::size_t count = density_scan(tree, ctx.cfg.depth, radii, pick(ctx.cfg.tol, 1e-9), [&](const ScanRecord& r) {
    if (csv.is_open()) write_scan_csv_row(csv, r);
    if (r.density_lo > best) {
      best = r.density_lo;
      argmax = {{"x", to_json(r.x)}, {"r", r.r}};
    }
  });
  notes.push_back("max density_lo is a lower bound for the packing measure");
  return {{{"status", "ok"},
           {"records", count},
           {"center_depth", ctx.cfg.depth},
           {"radii", n},
           {"max_density_lo", best},
           {"argmax", argmax},
           {"notes", notes}},
          to_json(cert)};
}

Outcome cmd_verify(const Context& ctx) {
  json notes = json::array();
  const SeparationCert cert = obtain_cert(ctx, notes);
  const CylinderTree tree(ctx.ifs, ctx.s);
  const OptimizerOptions o = optimizer_options(ctx.cfg, 1e-2, false);
  std::size_t violations = 0;

  const DensityResult p = packing_measure(ctx.ifs, ctx.s, cert, o);
  if (!p.converged) notes.push_back("packing bracket did not reach eps; checks use the bracket reached");

  const TheoremCheckReport thm = check_density_theorem(tree, cert, p, ctx.cfg.samples, ctx.cfg.seed);
  violations += thm.violations.size();

  const BlowupReport blow = check_blowup_invariance(tree, cert, ctx.cfg.samples, ctx.cfg.seed + 1);
  violations += blow.failed;

  // Cylinder-union identity on a few random balls in O.
  json identity = json::array();
  std::mt19937_64 rng(ctx.cfg.seed + 2);
  std::uniform_int_distribution<int> letter(0, static_cast<int>(ctx.ifs.size()) - 1);
  std::uniform_real_distribution<double> fraction(0.05, 0.9);
  MeasureOptions mo;
  mo.tol = 1e-9;
  for (int attempt = 0; attempt < 40 && identity.size() < 4; ++attempt) {
    CylinderTree::Node node = tree.root();
    for (int k = 0; k < 10; ++k) node = tree.child(node, static_cast<std::size_t>(letter(rng)));
    const Ball ball{node.center, fraction(rng) * cert.delta_lb / 2.0};
    try {
      const IdentityReport rep = cylinder_union_identity_check(tree, cert, ball, 2, mo);
      if (!rep.holds()) ++violations;
      identity.push_back({{"ball", to_json(ball)},
                          {"base", {rep.base.lo, rep.base.hi}},
                          {"sum", {rep.sum_lo, rep.sum_hi}},
                          {"holds", rep.holds()}});
    } catch (const PreconditionUnverified&) {
    }
  }

  json duality;
  double h_hi = 0.0;
  double h_width = 0.0;
  if (ctx.ifs.dim() == 1) {
    const DensityResult h = hausdorff_measure_1d(ctx.ifs, ctx.s, cert, o);
    h_hi = h.value_hi;
    h_width = h.width();
    duality["hausdorff"] = {h.value_lo, h.value_hi};
  } else {
    const BallUpperBound h = hausdorff_upper_bound_balls(ctx.ifs, ctx.s, cert, o);
    h_hi = h.upper_bound;
    h_width = h.upper_bound - h.family_lower;
    duality["hausdorff_balls_upper"] = h.upper_bound;
  }
  const bool ordered = h_hi <= p.value_lo + 2.0 * (h_width + p.width());
  if (!ordered) ++violations;
  duality["packing"] = {p.value_lo, p.value_hi};
  duality["ordered"] = ordered;

  json blow_json = {{"passed", blow.passed}, {"failed", blow.failed}, {"skipped", blow.skipped}};
  json r = {{"status", violations == 0 ? "ok" : "violation"},
            {"violations", violations},
            {"packing", to_json(p)},
            {"theorem", to_json(thm)},
            {"blowup", blow_json},
            {"identity", identity},
            {"duality", duality},
            {"notes", notes}};
  return {r, to_json(cert), violations == 0 ? kExitOk : kExitViolation};
}

Outcome cmd_sweep(const Context& ctx) {
  json notes = json::array();
  const SeparationCert cert = obtain_cert(ctx, notes);
  SweepOptions so;
  so.trials = ctx.cfg.trials;
  so.mode = parse_perturb_mode(ctx.cfg.mode);
  so.seed = ctx.cfg.seed;
  so.threads = std::max(1, ctx.cfg.threads);
  so.working_delta = ctx.cfg.working_delta;
  so.optimizer = optimizer_options(ctx.cfg, 5e-3, true);
  const std::vector<double> magnitudes = default_magnitudes(cert.delta_lb, ctx.cfg.levels);

  const SweepResult sweep = continuity_sweep(ctx.ifs, magnitudes, so);
  json records = json::array();
  for (const SweepRecord& rec : sweep.records) records.push_back(to_json(rec));

  if (!ctx.cfg.csv.empty()) {
    std::ofstream csv(ctx.cfg.csv);
    if (!csv) throw InputError("cannot write " + ctx.cfg.csv);
    write_sweep_csv(csv, sweep.records);
  }
  json summary = nullptr;
  try {
    const ModulusReport report = modulus_report(sweep.records, 2.0 * so.optimizer.eps);
    summary = to_json(report);
    if (!ctx.cfg.summary_csv.empty()) {
      std::ofstream csv(ctx.cfg.summary_csv);
      if (!csv) throw InputError("cannot write " + ctx.cfg.summary_csv);
      write_modulus_csv(csv, report);
    }
  } catch (const InputError& e) {
    if (!sweep.records.empty()) notes.push_back(e.what());
  }
  notes.push_back("perturbed systems must certify a gap above the working delta");
  json r = {{"status", "ok"},
            {"working_delta", sweep.baseline.cert.delta_lb},
            {"mode", to_string(so.mode)},
            {"baseline", to_json(sweep.baseline.packing)},
            {"magnitudes", magnitudes},
            {"records", records},
            {"summary", summary},
            {"notes", notes}};
  return {r, to_json(sweep.baseline.cert)};
}

Outcome dispatch(const Context& ctx) {
  const std::string& c = ctx.cfg.command;
  if (c == "dim") return cmd_dim(ctx);
  if (c == "certify") return cmd_certify(ctx);
  if (c == "packing") return cmd_packing(ctx);
  if (c == "hausdorff1d") return cmd_hausdorff(ctx);
  if (c == "density-scan") return cmd_density_scan(ctx);
  if (c == "verify") return cmd_verify(ctx);
  if (c == "sweep") return cmd_sweep(ctx);
  throw InputError("unknown command " + c);
}

int emit(const RunConfig& cfg, const json& doc, std::ostream& out, std::ostream& err) {
  const std::string text = doc.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream f(cfg.out);
  if (!f) {
    err << "error: cannot write " << cfg.out << "\n";
    return kExitInput;
  }
  f << text;
  return kExitOk;
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream in(cfg.ifs_path);
  if (!in) {
    err << "error: cannot open " << cfg.ifs_path << "\n";
    return kExitInput;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  const auto problems = validate_result(doc);
  for (const auto& p : problems) err << "invalid: " << p << "\n";
  if (problems.empty()) out << "valid (schema_version " << kSchemaVersion << ")\n";
  return problems.empty() ? kExitOk : kExitInput;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "validate") return run_validate(cfg, out, err);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (cfg.eps < 0.0 || cfg.tol < 0.0) throw ParameterError("tolerances must be positive");
    Ifs ifs = load_ifs(cfg.ifs_path);
    const double s = similarity_dimension(ifs.ratios()).s;
    const Context ctx{cfg, std::move(ifs), s};
    const Outcome o = dispatch(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json doc = {{"schema_version", kSchemaVersion},
                      {"command", cfg.command},
                      {"ifs_hash", ifs_hash(ctx.ifs)},
                      {"s", s},
                      {"cert", o.cert},
                      {"result", o.result},
                      {"meta", {{"wall_time_s", wall}, {"host", host_name()}, {"threads", cfg.threads}}}};
    const int written = emit(cfg, doc, out, err);
    if (o.code != kExitOk) err << "error: " << o.result.value("status", "failed") << "\n";
    return written != kExitOk ? written : o.code;
  } catch (const SscUncertified& e) {
    err << "uncertified: " << e.what() << " [lower " << e.lower() << ", upper " << e.upper() << "]\n";
    return kExitUncertified;
  } catch (const PrecisionError& e) {
    err << "precision: " << e.what() << " [" << e.lo() << ", " << e.hi() << "]\n";
    return kExitPrecision;
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified packing and Hausdorff measures of self-similar sets", "sspack"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("ifs", cfg.ifs_path, "IFS description (JSON)")->required();
    sub->add_option("--out", cfg.out, "Write the JSON result here instead of stdout");
    sub->add_option("--tol", cfg.tol, "Evaluation tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--depth-cap", cfg.depth_cap, "Separation search depth cap")->check(CLI::PositiveNumber);
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--cert", cfg.cert_path, "Reuse a certificate (certify output or bare cert JSON)");
  };
  auto optimizer = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.eps, "Target bracket width")->check(CLI::PositiveNumber);
    sub->add_option("--max-cells", cfg.max_cells, "Branch-and-bound cell budget");
  };

  CLI::App* dim = app.add_subcommand("dim", "Similarity dimension");
  common(dim);
  CLI::App* certify = app.add_subcommand("certify", "Certify strong separation");
  common(certify);
  CLI::App* packing = app.add_subcommand("packing", "Packing measure bracket");
  common(packing);
  optimizer(packing);
  packing->add_option("--window", cfg.window, "compact (default) or wide radius window");
  CLI::App* hausdorff = app.add_subcommand("hausdorff1d", "Hausdorff measure bracket (d = 1)");
  common(hausdorff);
  optimizer(hausdorff);
  hausdorff->add_flag("--balls", cfg.balls, "Ball-family upper bound (any dimension)");
  CLI::App* scan = app.add_subcommand("density-scan", "Reciprocal density on a grid");
  common(scan);
  scan->add_option("--depth", cfg.depth, "Centre word length")->check(CLI::NonNegativeNumber);
  scan->add_option("--radii", cfg.radii, "Number of radii across the window");
  scan->add_option("--csv", cfg.csv, "CSV output");
  CLI::App* verify = app.add_subcommand("verify", "Invariant suite");
  common(verify);
  optimizer(verify);
  verify->add_option("--samples", cfg.samples, "Sample balls per check");
  verify->add_option("--seed", cfg.seed, "Random seed");
  CLI::App* sweep = app.add_subcommand("sweep", "Continuity sweep");
  common(sweep);
  optimizer(sweep);
  sweep->add_option("--seed", cfg.seed, "Random seed");
  sweep->add_option("--trials", cfg.trials, "Trials per magnitude");
  sweep->add_option("--levels", cfg.levels, "Number of magnitudes (delta/20 halved each level)");
  sweep->add_option("--mode", cfg.mode, "translations, ratios or both");
  sweep->add_option("--working-delta", cfg.working_delta, "Gap defining M_delta (default half the certified gap)");
  sweep->add_option("--csv", cfg.csv, "Sweep CSV");
  sweep->add_option("--summary-csv", cfg.summary_csv, "Per-magnitude summary CSV");
  CLI::App* validate = app.add_subcommand("validate", "Validate a result document");
  validate->add_option("result", cfg.ifs_path, "Result JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return execute(cfg, out, err);
}

}  // namespace sspack::cli
