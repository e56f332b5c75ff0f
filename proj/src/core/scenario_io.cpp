// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lpnnloc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kConfigError, field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "expected a finite number");
  return v;
}

Vec2 point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) bad(field, "expected [x, y]");
  return {number(j[0], field + "[0]"), number(j[1], field + "[1]")};
}

std::vector<Vec2> point_list(const json& doc, const char* key) {
  if (!doc.contains(key)) bad(key, "missing");
  const json& arr = doc[key];
  if (!arr.is_array() || arr.empty()) bad(key, "expected a non-empty array of [x, y]");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(point(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::size_t index_1based(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    bad(field, "expected an integer >= 1");
  }
  return static_cast<std::size_t>(j.get<long long>() - 1);
}

ContaminationPattern parse_contamination(const json& j) {
  const std::string f = "noise.contamination";
  ContaminationPattern out;
  if (!j.is_object()) bad(f, "expected an object");
  if (!j.contains("mode") || !j["mode"].is_string()) bad(f + ".mode", "expected a string");
  const std::string mode = j["mode"].get<std::string>();
  if (mode == "none") {
    out.mode = ContaminationMode::kNone;
  } else if (mode == "one_antenna") {
    out.mode = ContaminationMode::kOneAntenna;
  } else if (mode == "one_tx_one_rx") {
    out.mode = ContaminationMode::kOneTxOneRx;
  } else if (mode == "explicit") {
    out.mode = ContaminationMode::kExplicitEntries;
  } else {
    bad(f + ".mode", "unknown mode '" + mode +
                         "' (none, one_antenna, one_tx_one_rx, explicit)");
  }
  if (out.mode == ContaminationMode::kExplicitEntries) {
    if (!j.contains("entries") || !j["entries"].is_array()) {
      bad(f + ".entries", "expected an array of [i, j] pairs");
    }
    const json& e = j["entries"];
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string ef = f + ".entries[" + std::to_string(k) + "]";
      if (!e[k].is_array() || e[k].size() != 2) bad(ef, "expected [i, j]");
      out.entries.emplace_back(index_1based(e[k][0], ef + "[0]"),
                               index_1based(e[k][1], ef + "[1]"));
    }
  }
  return out;
}

NoiseSpec parse_noise(const json& j) {
  if (!j.is_object()) bad("noise", "expected an object");
  NoiseSpec spec;
  const std::string kind = j.value("kind", std::string("gaussian"));
  if (kind == "gaussian") {
    spec.kind = NoiseKind::kGaussian;
  } else if (kind == "nlos_exponential") {
    spec.kind = NoiseKind::kNlosExponential;
  } else if (kind == "laplace_sinr") {
    spec.kind = NoiseKind::kLaplaceSinr;
  } else {
    bad("noise.kind", "unknown kind '" + kind +
                          "' (gaussian, nlos_exponential, laplace_sinr)");
  }
  if (j.contains("gaussianVariance")) {
    spec.gaussian_variance = number(j["gaussianVariance"], "noise.gaussianVariance");
  }
  if (j.contains("outlierScale")) {
    spec.outlier_scale = number(j["outlierScale"], "noise.outlierScale");
  }
  if (j.contains("contamination")) {
    spec.contamination = parse_contamination(j["contamination"]);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() &&
                                             j["seed"].get<long long>() >= 0)) {
      bad("noise.seed", "expected a non-negative integer");
    }
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  if (spec.kind != NoiseKind::kGaussian &&
      spec.contamination.mode == ContaminationMode::kNone) {
    bad("noise.contamination", "outlier noise needs a contamination mode");
  }
  spec.validate();
  return spec;
}

}  // namespace

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kNlosExponential: return "nlos_exponential";
    case NoiseKind::kLaplaceSinr: return "laplace_sinr";
  }
  return "unknown";
}

const char* to_string(ContaminationMode mode) {
  switch (mode) {
    case ContaminationMode::kNone: return "none";
    case ContaminationMode::kOneAntenna: return "one_antenna";
    case ContaminationMode::kOneTxOneRx: return "one_tx_one_rx";
    case ContaminationMode::kExplicitEntries: return "explicit";
  }
  return "unknown";
}

MeasurementSet Scenario::observed() const {
  if (measurements) return *measurements;
  const MeasurementSet clean = true_distances(geometry);
  return noise ? apply_noise(clean, *noise) : clean;
}

Scenario parse_scenario_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("(root)", "expected a JSON object");

  Scenario sc;
  try {
    sc.geometry.transmitters = point_list(doc, "transmitters");
    sc.geometry.receivers = point_list(doc, "receivers");
    if (doc.contains("target") && !doc["target"].is_null()) {
      sc.geometry.target = point(doc["target"], "target");
    }
    if (doc.contains("noise") && !doc["noise"].is_null()) {
      sc.noise = parse_noise(doc["noise"]);
      // Surface pattern problems now rather than at solve time.
      contamination_mask(*sc.noise, sc.geometry.m(), sc.geometry.n());
    }
    if (doc.contains("measurements") && !doc["measurements"].is_null()) {
      const json& arr = doc["measurements"];
      if (!arr.is_array()) bad("measurements", "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        values.push_back(number(arr[k], "measurements[" + std::to_string(k) + "]"));
      }
      if (values.size() != sc.geometry.m() * sc.geometry.n()) {
        bad("measurements", "expected M*N = " +
                                std::to_string(sc.geometry.m() * sc.geometry.n()) +
                                " values, got " + std::to_string(values.size()));
      }
      sc.measurements.emplace(sc.geometry.m(), sc.geometry.n(), std::move(values));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("invalid scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kPatternMismatch) {
      throw Error(ErrorCode::kConfigError,
                  std::string("noise.contamination.entries: ") + e.what());
    }
    throw;
  }
  if (!sc.measurements && !sc.geometry.target) {
    bad("target", "required when no measurements are given");
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const Scenario& scenario) {
  auto pt = [](const Vec2& v) { return json::array({v.x(), v.y()}); };
  json doc;
  doc["transmitters"] = json::array();
  for (const Vec2& t : scenario.geometry.transmitters) doc["transmitters"].push_back(pt(t));
  doc["receivers"] = json::array();
  for (const Vec2& r : scenario.geometry.receivers) doc["receivers"].push_back(pt(r));
  if (scenario.geometry.target) doc["target"] = pt(*scenario.geometry.target);
  if (scenario.noise) {
    const NoiseSpec& n = *scenario.noise;
    json c;
    c["mode"] = to_string(n.contamination.mode);
    if (n.contamination.mode == ContaminationMode::kExplicitEntries) {
      c["entries"] = json::array();
      for (const auto& [i, j] : n.contamination.entries) {
        c["entries"].push_back(json::array({i + 1, j + 1}));
      }
    }
    doc["noise"] = {{"kind", to_string(n.kind)},
                    {"gaussianVariance", n.gaussian_variance},
                    {"outlierScale", n.outlier_scale},
                    {"contamination", c},
                    {"seed", n.seed}};
  }
  if (scenario.measurements) {
    const auto v = scenario.measurements->values();
    doc["measurements"] = std::vector<double>(v.begin(), v.end());
  }
  return doc.dump(2);
}

}  // namespace lpnnloc
