#include "sspack/io.hpp"

#include "sspack/errors.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sspack {

using nlohmann::json;

namespace {

Vec vec_from(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw InputError(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  }
  Vec v(dim);
  for (int k = 0; k < dim; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number()) throw InputError(std::string(what) + " entries must be numbers");
    v(k) = j[static_cast<std::size_t>(k)].get<double>();
  }
  return v;
}

Mat rotation_from(const json& m, int dim) {
  Mat rot = Mat::Identity(dim, dim);
  if (m.contains("rotation")) {
    const json& r = m.at("rotation");
    if (!r.is_array() || static_cast<int>(r.size()) != dim) throw InputError("rotation must be a d x d matrix");
    for (int i = 0; i < dim; ++i) rot.row(i) = vec_from(r[static_cast<std::size_t>(i)], dim, "rotation row").transpose();
  } else if (m.contains("angle")) {
    if (dim != 2) throw InputError("angle is only meaningful for dim = 2");
    const double a = m.at("angle").get<double>();
    rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  } else if (m.contains("sign")) {
    if (dim != 1) throw InputError("sign is only meaningful for dim = 1");
    const double sign = m.at("sign").get<double>();
    if (sign != 1.0 && sign != -1.0) throw InputError("sign must be +1 or -1");
    rot(0, 0) = sign;
  }
  return rot;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

Ifs ifs_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw InputError("IFS document must be a JSON object");
    const int dim = doc.at("dim").get<int>();
    if (dim < 1 || dim > kMaxDim) throw InputError("dim must be between 1 and " + std::to_string(kMaxDim));
    const json& maps = doc.at("maps");
    if (!maps.is_array()) throw InputError("maps must be an array");
    std::vector<Similitude> out;
    for (const json& m : maps) {
      out.emplace_back(m.at("ratio").get<double>(), rotation_from(m, dim), vec_from(m.at("translation"), dim, "translation"));
    }
    const json& box = doc.at("box");
    return Ifs(std::move(out), Box{vec_from(box.at("lo"), dim, "box.lo"), vec_from(box.at("hi"), dim, "box.hi")});
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed IFS document: ") + e.what());
  }
}

Ifs load_ifs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open IFS file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return ifs_from_json(doc);
}

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json to_json(const Ifs& ifs) {
  json maps = json::array();
  for (const Similitude& f : ifs.maps()) {
    json rot = json::array();
    for (int i = 0; i < f.dim(); ++i) rot.push_back(to_json(Vec(f.rotation().row(i).transpose())));
    maps.push_back({{"ratio", f.ratio()}, {"rotation", rot}, {"translation", to_json(f.translation())}});
  }
  return {{"dim", ifs.dim()}, {"maps", maps}, {"box", {{"lo", to_json(ifs.box().lo)}, {"hi", to_json(ifs.box().hi)}}}};
}

std::string ifs_hash(const Ifs& ifs) {
  const std::string text = to_json(ifs).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json to_json(const Ball& ball) { return {{"center", to_json(ball.center)}, {"radius", ball.radius}}; }

json to_json(const DimensionResult& r) {
  return {{"s", r.s}, {"residual", r.residual}, {"iterations", r.iterations}};
}

json to_json(const SeparationCert& c) {
  return {{"delta_lb", c.delta_lb}, {"delta_raw", c.delta_raw}, {"r_star", c.r_star},
          {"depth_used", c.depth_used}, {"r_lo", c.r_lo}, {"r_hi", c.r_hi}};
}

SeparationCert cert_from_json(const json& doc) {
  try {
    return {doc.at("delta_lb").get<double>(), doc.at("delta_raw").get<double>(), doc.at("r_star").get<double>(),
            doc.at("depth_used").get<int>(),   doc.at("r_lo").get<double>(),      doc.at("r_hi").get<double>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed certificate: ") + e.what());
  }
}

json to_json(const MeasureBound& m) {
  return {{"lo", m.lo}, {"hi", m.hi}, {"depth_used", m.depth_used}, {"leaves", m.leaves}, {"converged", m.converged}};
}

json to_json(const DensityResult& r) {
  json history = json::array();
  for (const BracketSnapshot& h : r.history) history.push_back({h.cells, h.lo, h.hi});
  json out = {{"value_lo", r.value_lo},
              {"value_hi", finite_or_null(r.value_hi)},
              {"witness", to_json(r.witness)},
              {"witness_density_lo", r.witness_density_lo},
              {"cells_explored", r.cells_explored},
              {"eps", r.eps},
              {"converged", r.converged},
              {"lambda_floor", r.lambda_floor},
              {"window", {r.window.lo, r.window.hi}}};
  if (!history.empty()) out["history"] = history;
  return out;
}

json to_json(const BallUpperBound& r) {
  return {{"label", BallUpperBound::kLabel},
          {"upper_bound", finite_or_null(r.upper_bound)},
          {"family_lower", r.family_lower},
          {"witness", to_json(r.witness)},
          {"cells_explored", r.cells_explored},
          {"converged", r.converged}};
}

json to_json(const TheoremCheckReport& r) {
  json violations = json::array();
  for (const TheoremSample& v : r.violations) {
    violations.push_back({{"ball", to_json(v.ball)}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  return {{"checked", r.checked},
          {"skipped", r.skipped},
          {"violations", violations},
          {"min_slack_ratio", finite_or_null(r.min_slack_ratio)}};
}

json to_json(const SweepRecord& r) {
  return {{"magnitude_index", r.magnitude_index}, {"trial", r.trial}, {"delta_req", r.delta_req},
          {"d_actual", r.d_actual},               {"s_g", r.s_g},     {"packing_lo", r.packing_lo},
          {"packing_hi", r.packing_hi},           {"cert_ok", r.cert_ok}, {"precision_ok", r.precision_ok},
          {"deviation", r.deviation},             {"seed", r.seed}};
}

json to_json(const ModulusReport& r) {
  json rows = json::array();
  for (const ModulusRow& row : r.rows) {
    rows.push_back({{"magnitude", row.magnitude},
                    {"n_certified", row.n_certified},
                    {"max_dev", row.max_dev},
                    {"mean_dev", row.mean_dev}});
  }
  return {{"rows", rows}, {"nonincreasing", r.nonincreasing}, {"slack", r.slack}};
}

void write_scan_csv_header(std::ostream& os, int dim) {
  for (int k = 1; k <= dim; ++k) os << "x_" << k << ',';
  os << "r,density_lo,density_hi\n";
}

void write_scan_csv_row(std::ostream& os, const ScanRecord& rec) {
  for (Eigen::Index k = 0; k < rec.x.size(); ++k) os << fmt(rec.x(k)) << ',';
  os << fmt(rec.r) << ',' << fmt(rec.density_lo) << ',' << fmt(rec.density_hi) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "delta_req,d_actual,s_g,packing_lo,packing_hi,cert_ok,seed\n";
  for (const SweepRecord& r : records) {
    os << fmt(r.delta_req) << ',' << fmt(r.d_actual) << ',' << fmt(r.s_g) << ',' << fmt(r.packing_lo) << ','
       << fmt(r.packing_hi) << ',' << (r.cert_ok ? "true" : "false") << ',' << r.seed << '\n';
  }
}

void write_modulus_csv(std::ostream& os, const ModulusReport& report) {
  os << "magnitude,n_certified,max_dev,mean_dev\n";
  for (const ModulusRow& row : report.rows) {
    os << fmt(row.magnitude) << ',' << row.n_certified << ',' << fmt(row.max_dev) << ',' << fmt(row.mean_dev) << '\n';
  }
}

}  // namespace sspack
