#include "commands.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace sspack::cli {

using nlohmann::json;

namespace {

void require(std::vector<std::string>& problems, const json& obj, const std::string& where, const std::string& key,
             json::value_t type) {
  if (!obj.contains(key)) {
    problems.push_back(where + "." + key + " missing");
    return;
  }
  const json& v = obj.at(key);
  const bool number = type == json::value_t::number_float;
  const bool ok = number ? v.is_number() : (type == json::value_t::number_unsigned ? v.is_number_integer() : v.type() == type);
  if (!ok) problems.push_back(where + "." + key + " has the wrong type");
}

bool is_hex16(const std::string& s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

std::vector<std::string> validate_result(const json& doc) {
  using T = json::value_t;
  std::vector<std::string> p;
  if (!doc.is_object()) return {"document is not an object"};

  require(p, doc, "doc", "schema_version", T::number_unsigned);
  require(p, doc, "doc", "command", T::string);
  require(p, doc, "doc", "ifs_hash", T::string);
  require(p, doc, "doc", "s", T::number_float);
  require(p, doc, "doc", "result", T::object);
  require(p, doc, "doc", "meta", T::object);
  if (!doc.contains("cert")) p.push_back("doc.cert missing");
  if (!p.empty()) return p;

  if (doc.at("schema_version").get<int>() != kSchemaVersion) p.push_back("unsupported schema_version");
  if (!is_hex16(doc.at("ifs_hash").get<std::string>())) p.push_back("ifs_hash is not 16 hex digits");

  const json& cert = doc.at("cert");
  if (!cert.is_null()) {
    if (!cert.is_object()) {
      p.push_back("cert must be an object or null");
    } else {
      for (const char* k : {"delta_lb", "delta_raw", "r_star", "r_lo", "r_hi"}) require(p, cert, "cert", k, T::number_float);
      require(p, cert, "cert", "depth_used", T::number_unsigned);
    }
  }

  const json& meta = doc.at("meta");
  require(p, meta, "meta", "wall_time_s", T::number_float);
  require(p, meta, "meta", "host", T::string);

  const std::map<std::string, std::vector<const char*>> ok_keys = {
      {"dim", {"s", "residual", "iterations"}},
      {"certify", {"certified"}},
      {"packing", {"value_lo", "value_hi", "witness", "cells_explored", "eps", "converged"}},
      {"hausdorff1d", {"witness", "cells_explored", "converged"}},
      {"density-scan", {"records", "max_density_lo"}},
      {"verify", {"violations", "packing", "theorem", "blowup", "duality"}},
      {"sweep", {"baseline", "records", "magnitudes"}},
  };
  const std::string command = doc.at("command").get<std::string>();
  const auto it = ok_keys.find(command);
  if (it == ok_keys.end()) {
    p.push_back("unknown command " + command);
    return p;
  }
  const json& result = doc.at("result");
  require(p, result, "result", "status", T::string);
  if (!p.empty()) return p;

  const std::string status = result.at("status").get<std::string>();
  static const std::array<const char*, 4> statuses = {"ok", "uncertified", "precision_error", "violation"};
  if (std::find(statuses.begin(), statuses.end(), status) == statuses.end()) p.push_back("unknown status " + status);
  if (status == "precision_error") {
    require(p, result, "result", "value_lo", T::number_float);
    require(p, result, "result", "value_hi", T::number_float);
    return p;
  }
  if (status == "uncertified") return p;
  for (const char* k : it->second) {
    if (!result.contains(k)) p.push_back("result." + std::string(k) + " missing");
  }
  if (command == "hausdorff1d" && !result.contains("value_hi") && !result.contains("upper_bound")) {
    p.push_back("result needs value_hi or upper_bound");
  }
  if (result.contains("value_lo") && result.contains("value_hi") && result.at("value_lo").is_number() &&
      result.at("value_hi").is_number() && result.at("value_lo").get<double>() > result.at("value_hi").get<double>()) {
    p.push_back("result.value_lo exceeds value_hi");
  }
  return p;
}

}  // namespace sspack::cli
