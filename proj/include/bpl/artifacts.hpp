#pragma once

// Output files and their metadata headers. JSON-lines files open with a
// {"_meta": ...} record, CSV files with "# key: value" comment lines, JSON
// documents carry a "meta" member.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bpl/config.hpp"
#include "bpl/dataset.hpp"
#include "bpl/error.hpp"
#include "bpl/random.hpp"

#ifndef BPL_VERSION
#define BPL_VERSION "0.0.0"
#endif

namespace bpl {

struct Metadata {
  std::string artifact;
  std::string version = BPL_VERSION;
  std::string config_hash;
  std::string dataset_hash;
  std::uint64_t seed = 0;
  nlohmann::json config;
};

inline std::string hash_json(const nlohmann::json& j) { return hex64(fnv1a64(j.dump())); }

inline std::string dataset_hash(const std::vector<Claim>& claims) {
  std::uint64_t h = fnv1a64("");
  for (const auto& c : claims) h = fnv1a64(nlohmann::json(c).dump() + "\n", h);
  return hex64(h);
}

inline Metadata make_metadata(const std::string& artifact, const RunConfig& cfg, const std::string& data_hash) {
  Metadata m;
  m.artifact = artifact;
  m.config = cfg;
  // Thread count never changes results, so it stays out of the hash.
  auto hashed = m.config;
  hashed["run"].erase("threads");
  m.config_hash = hash_json(hashed);
  m.dataset_hash = data_hash;
  m.seed = cfg.seed;
  return m;
}

inline void to_json(nlohmann::json& j, const Metadata& m) {
  j = {{"artifact", m.artifact},         {"version", m.version}, {"config_hash", m.config_hash},
       {"dataset_hash", m.dataset_hash}, {"seed", m.seed},       {"config", m.config}};
}

inline void from_json(const nlohmann::json& j, Metadata& m) {
  m.artifact = j.at("artifact");
  m.version = j.at("version");
  m.config_hash = j.at("config_hash");
  m.dataset_hash = j.at("dataset_hash");
  m.seed = j.at("seed");
  m.config = j.value("config", nlohmann::json::object());
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

inline void write_jsonl(const std::string& path, const Metadata& meta, const std::vector<nlohmann::json>& rows) {
  auto out = open_output(path);
  out << nlohmann::json{{"_meta", meta}}.dump() << '\n';
  for (const auto& r : rows) out << r.dump() << '\n';
}

inline void write_json(const std::string& path, const Metadata& meta, nlohmann::json body) {
  body["meta"] = meta;
  open_output(path) << body.dump(2) << '\n';
}

inline std::string csv_header(const Metadata& meta) {
  std::ostringstream out;
  out << "# artifact: " << meta.artifact << "\n# version: " << meta.version << "\n# config_hash: " << meta.config_hash
      << "\n# dataset_hash: " << meta.dataset_hash << "\n# seed: " << meta.seed << "\n# config: " << meta.config.dump()
      << "\n";
  return out.str();
}

struct JsonlFile {
  std::optional<Metadata> meta;
  std::vector<nlohmann::json> rows;
};

inline JsonlFile read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  JsonlFile f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1 && j.is_object() && j.contains("_meta")) {
      f.meta = j["_meta"].get<Metadata>();
      continue;
    }
    f.rows.push_back(std::move(j));
  }
  return f;
}

inline std::vector<Claim> read_corpus(const std::string& path) {
  const auto f = read_jsonl(path);
  std::vector<Claim> claims;
  claims.reserve(f.rows.size());
  for (std::size_t i = 0; i < f.rows.size(); ++i) {
    try {
      claims.push_back(f.rows[i].get<Claim>());
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ": record " + std::to_string(i + 1) + " is not a claim: " + e.what());
    }
  }
  return claims;
}

}  // namespace bpl
