// Copyright 2026 The noma-pair Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noma/chanmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace noma {
namespace {

using nlohmann::json;

void fail(const std::string& what) { throw std::invalid_argument(what); }

template <typename T>
void hash_bytes(std::uint64_t& h, const T* data, std::size_t count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(T); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ScenarioParseError(std::string("missing field '") + key + "'");
  }
  return *it;
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) {
    throw ScenarioParseError("field '" + field + "' is not a number");
  }
  return v.get<double>();
}

Vec as_vector(const json& v, const std::string& field, Index expected) {
  if (!v.is_array()) {
    throw ScenarioParseError("field '" + field + "' is not an array");
  }
  if (static_cast<Index>(v.size()) != expected) {
    throw ScenarioParseError("field '" + field + "' has " +
                             std::to_string(v.size()) + " entries, expected " +
                             std::to_string(expected));
  }
  Vec out(expected);
  for (Index i = 0; i < expected; ++i) {
    out(i) = as_double(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (k < 1) fail("ScenarioConfig: k must be >= 1, got " + std::to_string(k));
  if (n < 1) fail("ScenarioConfig: n must be >= 1, got " + std::to_string(n));
  if (!(min_distance_m > 0.0)) fail("ScenarioConfig: min_distance_m must be > 0");
  if (!(min_distance_m < cell_radius_m)) {
    fail("ScenarioConfig: min_distance_m must be < cell_radius_m");
  }
  if (!(bandwidth_hz > 0.0)) fail("ScenarioConfig: bandwidth_hz must be > 0");
  if (!std::isfinite(noise_psd_dbm_hz) || !std::isfinite(pathloss_a) ||
      !std::isfinite(pathloss_b) || !std::isfinite(p_max_dbm)) {
    fail("ScenarioConfig: non-finite parameter");
  }
}

void Scenario::validate() const {
  if (k < 1 || n < 1) fail("Scenario: k and n must be positive");
  if (distances_m.size() != k) fail("Scenario: distances_m must have k entries");
  if (noise_w.size() != k) fail("Scenario: noise_w must have k entries");
  if (channels.rows() != n || channels.cols() != k) {
    fail("Scenario: channels must be n x k");
  }
  for (Index i = 0; i < k; ++i) {
    if (!std::isfinite(distances_m(i)) || distances_m(i) < 0.0) {
      fail("Scenario: distance of user " + std::to_string(i) + " is invalid");
    }
    if (i > 0 && distances_m(i) < distances_m(i - 1)) {
      fail("Scenario: distance ordering violated (users must be sorted by "
           "non-decreasing distance; user " +
           std::to_string(i) + " is closer than user " + std::to_string(i - 1) +
           ")");
    }
    if (!(noise_w(i) > 0.0) || !std::isfinite(noise_w(i))) {
      fail("Scenario: noise power of user " + std::to_string(i) +
           " must be positive");
    }
  }
  if (!(p_max_w > 0.0) || !std::isfinite(p_max_w)) {
    fail("Scenario: p_max_w must be positive");
  }
  if (!channels.allFinite()) fail("Scenario: channels contain non-finite values");
}

std::uint64_t Scenario::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t dims[2] = {k, n};
  hash_bytes(h, dims, 2);
  hash_bytes(h, distances_m.data(), static_cast<std::size_t>(distances_m.size()));
  hash_bytes(h, channels.data(), static_cast<std::size_t>(channels.size()));
  hash_bytes(h, noise_w.data(), static_cast<std::size_t>(noise_w.size()));
  hash_bytes(h, &p_max_w, 1);
  return h;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.k == b.k && a.n == b.n && a.p_max_w == b.p_max_w &&
         a.distances_m == b.distances_m && a.channels == b.channels &&
         a.noise_w == b.noise_w;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double path_loss_db(double d_m, const ScenarioConfig& config) {
  if (!(d_m >= config.min_distance_m)) {
    throw std::domain_error("path_loss_db: distance " + std::to_string(d_m) +
                            " m is below min_distance_m = " +
                            std::to_string(config.min_distance_m) + " m");
  }
  return config.pathloss_a + config.pathloss_b * std::log10(d_m / 1000.0);
}

double noise_power_w(const ScenarioConfig& config) {
  if (!(config.bandwidth_hz > 0.0)) {
    throw std::domain_error("noise_power_w: bandwidth must be positive");
  }
  const double dbm =
      config.noise_psd_dbm_hz + 10.0 * std::log10(config.bandwidth_hz);
  return dbm_to_watts(dbm);
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  const double r0 = config.min_distance_m;
  const double r1 = config.cell_radius_m;
  std::vector<double> dist(static_cast<std::size_t>(config.k));
  for (auto& d : dist) {
    d = std::sqrt(unit(rng) * (r1 * r1 - r0 * r0) + r0 * r0);
  }
  std::sort(dist.begin(), dist.end());

  Scenario s;
  s.k = config.k;
  s.n = config.n;
  s.distances_m = Eigen::Map<const Vec>(dist.data(), config.k);
  s.channels.resize(config.n, config.k);
  for (int u = 0; u < config.k; ++u) {
    const double gain = std::sqrt(std::pow(10.0, -path_loss_db(dist[u], config) / 10.0));
    for (int a = 0; a < config.n; ++a) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s.channels(a, u) = gain * Complex(re, im);
    }
  }
  s.noise_w = Vec::Constant(config.k, noise_power_w(config));
  s.p_max_w = dbm_to_watts(config.p_max_dbm);
  return s;
}

Scenario sort_by_distance(Scenario s) {
  std::vector<Index> order(static_cast<std::size_t>(s.k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return s.distances_m(a) < s.distances_m(b);
  });
  Scenario out = s;
  for (Index i = 0; i < s.k; ++i) {
    out.distances_m(i) = s.distances_m(order[i]);
    out.noise_w(i) = s.noise_w(order[i]);
    out.channels.col(i) = s.channels.col(order[i]);
  }
  return out;
}

Scenario make_scenario(Vec distances_m, CMat channels, Vec noise_w,
                       double p_max_w) {
  Scenario s;
  s.k = static_cast<int>(channels.cols());
  s.n = static_cast<int>(channels.rows());
  s.distances_m = std::move(distances_m);
  s.channels = std::move(channels);
  s.noise_w = std::move(noise_w);
  s.p_max_w = p_max_w;
  s.validate();
  return s;
}

Scenario normalized(const Scenario& s) {
  Scenario out = s;
  const double p = std::sqrt(s.p_max_w);
  for (Index u = 0; u < s.k; ++u) {
    out.channels.col(u) *= p / std::sqrt(s.noise_w(u));
  }
  out.noise_w.setOnes();
  out.p_max_w = 1.0;
  return out;
}

std::string scenario_to_text(const Scenario& s) {
  s.validate();
  json doc;
  doc["format_version"] = kScenarioFormatVersion;
  doc["k"] = s.k;
  doc["n"] = s.n;
  doc["distances_m"] = std::vector<double>(s.distances_m.begin(), s.distances_m.end());
  doc["noise_w"] = std::vector<double>(s.noise_w.begin(), s.noise_w.end());
  doc["p_max_w"] = s.p_max_w;
  json rows = json::array();
  for (Index u = 0; u < s.k; ++u) {
    json row = json::array();
    for (Index a = 0; a < s.n; ++a) {
      row.push_back({s.channels(a, u).real(), s.channels(a, u).imag()});
    }
    rows.push_back(std::move(row));
  }
  doc["channels"] = std::move(rows);
  return doc.dump(1) + "\n";
}

Scenario scenario_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("scenario: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioParseError("scenario: top level must be an object");

  const json& version = require(doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kScenarioFormatVersion) {
    throw ScenarioParseError("scenario: unsupported format_version " + version.dump());
  }
  const json& jk = require(doc, "k");
  const json& jn = require(doc, "n");
  if (!jk.is_number_integer() || !jn.is_number_integer() || jk.get<int>() < 1 ||
      jn.get<int>() < 1) {
    throw ScenarioParseError("scenario: fields 'k' and 'n' must be positive integers");
  }
  const int k = jk.get<int>();
  const int n = jn.get<int>();

  Scenario s;
  s.k = k;
  s.n = n;
  s.distances_m = as_vector(require(doc, "distances_m"), "distances_m", k);
  s.noise_w = as_vector(require(doc, "noise_w"), "noise_w", k);
  s.p_max_w = as_double(require(doc, "p_max_w"), "p_max_w");

  const json& rows = require(doc, "channels");
  if (!rows.is_array() || static_cast<int>(rows.size()) != k) {
    throw ScenarioParseError("scenario: field 'channels' must have k = " +
                             std::to_string(k) + " rows, found " +
                             std::to_string(rows.is_array() ? rows.size() : 0));
  }
  s.channels.resize(n, k);
  for (int u = 0; u < k; ++u) {
    const std::string field = "channels[" + std::to_string(u) + "]";
    if (!rows[u].is_array() || static_cast<int>(rows[u].size()) != n) {
      throw ScenarioParseError("scenario: field '" + field + "' must have n = " +
                               std::to_string(n) + " entries");
    }
    for (int a = 0; a < n; ++a) {
      const json& pair = rows[u][a];
      const std::string entry = field + "[" + std::to_string(a) + "]";
      if (!pair.is_array() || pair.size() != 2) {
        throw ScenarioParseError("scenario: field '" + entry +
                                 "' must be a (re, im) pair");
      }
      s.channels(a, u) = Complex(as_double(pair[0], entry + ".re"),
                                 as_double(pair[1], entry + ".im"));
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioParseError(std::string("scenario: ") + e.what());
  }
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << scenario_to_text(s);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return scenario_from_text(buf.str());
  } catch (const ScenarioParseError& e) {
    throw ScenarioParseError(path.string() + ": " + e.what());
  }
}

}  // namespace noma
