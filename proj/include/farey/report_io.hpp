#pragma once

// Serialization of reports: JSON for spacing, Diophantine and orbit reports;
// CSV (or JSON) for Frobenius censuses. Every document carries
// schema_version, and every stochastic one records its seed, sample count
// and generator name. Parsers read back exactly what the writers emit.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "farey/congruence.hpp"
#include "farey/diophantine.hpp"
#include "farey/frobenius.hpp"
#include "farey/spacing_stats.hpp"

namespace farey::io {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ValidationError("csv", "bad number '" + s + "'");
  return v;
}

inline json pmf_json(const std::map<int, double>& pmf) {
  json j = json::object();
  for (auto [k, v] : pmf) j[std::to_string(k)] = v;
  return j;
}

inline std::map<int, double> pmf_from_json(const json& j) {
  std::map<int, double> pmf;
  for (auto it = j.begin(); it != j.end(); ++it) pmf[std::stoi(it.key())] = it.value().get<double>();
  return pmf;
}

inline void check_schema(const json& j) {
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw ValidationError("schema_version", "unsupported schema version");
}

inline json to_json(const SpacingReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"kind", r.kind},
              {"n", r.n},
              {"Q", r.Q},
              {"modulus", r.modulus},
              {"classes", r.classes},
              {"scale", r.scale},
              {"pmf", pmf_json(r.pmf)},
              {"overflow", r.overflow},
              {"mean", r.mean},
              {"samples", r.samples},
              {"seed", r.seed},
              {"rng", r.rng}};
}

inline SpacingReport spacing_from_json(const json& j) {
  check_schema(j);
  SpacingReport r;
  r.kind = j.at("kind").get<std::string>();
  r.n = j.at("n").get<int>();
  r.Q = j.at("Q").get<std::int64_t>();
  r.modulus = j.at("modulus").get<std::int64_t>();
  r.classes = j.at("classes").get<std::vector<IntRow>>();
  r.scale = j.at("scale").get<double>();
  r.pmf = pmf_from_json(j.at("pmf"));
  r.overflow = j.at("overflow").get<double>();
  r.mean = j.at("mean").get<double>();
  r.samples = j.at("samples").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rng = j.at("rng").get<std::string>();
  return r;
}

inline json to_json(const DioReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"kind", r.kind},
              {"n", r.n},
              {"Q", r.Q},
              {"alpha", r.alpha},
              {"c", r.c},
              {"modulus", r.modulus},
              {"classes", r.classes},
              {"pmf", pmf_json(r.pmf)},
              {"overflow", r.overflow},
              {"mean", r.mean},
              {"predicted_mean", r.predicted_mean},
              {"samples", r.samples},
              {"seed", r.seed},
              {"rng", r.rng}};
}

inline DioReport dio_from_json(const json& j) {
  check_schema(j);
  DioReport r;
  r.kind = j.at("kind").get<std::string>();
  r.n = j.at("n").get<int>();
  r.Q = j.at("Q").get<std::int64_t>();
  r.alpha = j.at("alpha").get<double>();
  r.c = j.at("c").get<double>();
  r.modulus = j.at("modulus").get<std::int64_t>();
  r.classes = j.at("classes").get<std::vector<IntRow>>();
  r.pmf = pmf_from_json(j.at("pmf"));
  r.overflow = j.at("overflow").get<double>();
  r.mean = j.at("mean").get<double>();
  r.predicted_mean = j.at("predicted_mean").get<double>();
  r.samples = j.at("samples").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rng = j.at("rng").get<std::string>();
  return r;
}

inline json to_json(const ResidueSystem& sys, const OrbitCount& c) {
  return json{{"schema_version", kSchemaVersion},
              {"n", sys.n()},
              {"modulus", sys.modulus()},
              {"classes", sys.classes()},
              {"astar", c.astar},
              {"index", c.index},
              {"density", json{{"num", c.density.num}, {"den", c.density.den}}}};
}

inline OrbitCount orbit_from_json(const json& j) {
  check_schema(j);
  OrbitCount c;
  c.astar = j.at("astar").get<std::int64_t>();
  c.index = j.at("index").get<std::int64_t>();
  c.density = Rational{j.at("density").at("num").get<std::int64_t>(),
                       j.at("density").at("den").get<std::int64_t>()};
  return c;
}

// ---------------------------------------------------------------------------
// Census

/// One row of the census table.
struct CensusRow {
  double r = 0.0;
  std::int64_t restricted_tail = 0;
  std::int64_t full_tail = 0;
  double restricted_norm = 0.0;
  double full_norm = 0.0;
  friend bool operator==(const CensusRow&, const CensusRow&) = default;
};

struct CensusTable {
  int n = 2;
  std::int64_t T = 0;
  std::int64_t modulus = 1;
  std::vector<IntRow> classes;
  std::int64_t restricted_total = 0;
  std::int64_t full_total = 0;
  std::vector<CensusRow> rows;
  friend bool operator==(const CensusTable&, const CensusTable&) = default;
};

inline CensusTable census_table(const CensusResult& res) {
  CensusTable t;
  t.n = res.config.n;
  t.T = res.config.T;
  t.modulus = res.config.sys.modulus();
  t.classes = res.config.sys.classes();
  t.restricted_total = res.restricted_psi.total;
  t.full_total = res.full_psi.total;
  for (std::size_t i = 0; i < res.config.r_grid.size(); ++i)
    t.rows.push_back({res.full_psi.r[i], res.restricted_psi.tail[i], res.full_psi.tail[i],
                      res.restricted_psi.tail_norm[i], res.full_psi.tail_norm[i]});
  return t;
}

inline std::string classes_text(const std::vector<IntRow>& classes) {
  std::string s;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i) s += ';';
    for (std::size_t j = 0; j < classes[i].size(); ++j) {
      if (j) s += ',';
      s += std::to_string(classes[i][j]);
    }
  }
  return s;
}

/// Metadata lines start with '#', followed by the header
/// R,restricted_tail,full_tail,restricted_norm,full_norm.
inline std::string to_csv(const CensusTable& t) {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# n=" << t.n << "\n";
  out << "# T=" << t.T << "\n";
  out << "# modulus=" << t.modulus << "\n";
  out << "# classes=" << classes_text(t.classes) << "\n";
  out << "# restricted_total=" << t.restricted_total << "\n";
  out << "# full_total=" << t.full_total << "\n";
  out << "R,restricted_tail,full_tail,restricted_norm,full_norm\n";
  for (const auto& r : t.rows)
    out << format_double(r.r) << ',' << r.restricted_tail << ',' << r.full_tail << ','
        << format_double(r.restricted_norm) << ',' << format_double(r.full_norm) << '\n';
  return out.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<IntRow> parse_classes_text(const std::string& s) {
  std::vector<IntRow> out;
  if (s.empty()) return out;
  for (const auto& row : split(s, ';')) {
    IntRow r;
    for (const auto& v : split(row, ',')) r.push_back(std::stoll(v));
    out.push_back(r);
  }
  return out;
}

inline CensusTable census_from_csv(const std::string& text) {
  CensusTable t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int version = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "schema_version") version = std::stoi(val);
      else if (key == "n") t.n = std::stoi(val);
      else if (key == "T") t.T = std::stoll(val);
      else if (key == "modulus") t.modulus = std::stoll(val);
      else if (key == "classes") t.classes = parse_classes_text(val);
      else if (key == "restricted_total") t.restricted_total = std::stoll(val);
      else if (key == "full_total") t.full_total = std::stoll(val);
      continue;
    }
    if (!header) {
      if (line != "R,restricted_tail,full_tail,restricted_norm,full_norm")
        throw ValidationError("csv", "unexpected census header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) throw ValidationError("csv", "census rows need 5 fields");
    t.rows.push_back({parse_double(f[0]), std::stoll(f[1]), std::stoll(f[2]), parse_double(f[3]),
                      parse_double(f[4])});
  }
  if (version != kSchemaVersion) throw ValidationError("schema_version", "unsupported schema version");
  if (!header) throw ValidationError("csv", "missing census header");
  return t;
}

inline json to_json(const CensusTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back(json{{"R", r.r},
                        {"restricted_tail", r.restricted_tail},
                        {"full_tail", r.full_tail},
                        {"restricted_norm", r.restricted_norm},
                        {"full_norm", r.full_norm}});
  return json{{"schema_version", kSchemaVersion},
              {"n", t.n},
              {"T", t.T},
              {"modulus", t.modulus},
              {"classes", t.classes},
              {"restricted_total", t.restricted_total},
              {"full_total", t.full_total},
              {"rows", rows}};
}

inline CensusTable census_from_json(const json& j) {
  check_schema(j);
  CensusTable t;
  t.n = j.at("n").get<int>();
  t.T = j.at("T").get<std::int64_t>();
  t.modulus = j.at("modulus").get<std::int64_t>();
  t.classes = j.at("classes").get<std::vector<IntRow>>();
  t.restricted_total = j.at("restricted_total").get<std::int64_t>();
  t.full_total = j.at("full_total").get<std::int64_t>();
  for (const auto& r : j.at("rows"))
    t.rows.push_back({r.at("R").get<double>(), r.at("restricted_tail").get<std::int64_t>(),
                      r.at("full_tail").get<std::int64_t>(), r.at("restricted_norm").get<double>(),
                      r.at("full_norm").get<double>()});
  return t;
}

/// Indented JSON text. Keys come out sorted, doubles in shortest round-trip form.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace farey::io
