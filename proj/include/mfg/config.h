#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "mfg/model.h"

namespace mfg {

inline constexpr int kSchemaVersion = 1;

/// Unreadable or ill-formed configuration; the message carries the line or field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  std::shared_ptr<const GameModel> model;
  std::string name;
  // FNV-1a over the config bytes and every referenced CSV, in reference order.
  std::uint64_t digest = 0;
};

// Model config (JSON, schema_version 1):
//   family "tabular":  states/observations/actions sizes, transition K[x][a][xbar][x']
//                      (or K[x][a][x'] when mu-free), cost d[x][a][xbar] (or d[x][a]),
//                      observation r[x][y], optional "moment": {"weights", "alpha"}
//   family "gaussian": grids {"coords": [...]} or {"min","max","size"} (cell width is
//                      the spacing), tensors f[x][a][xbar], g[x][a], h[x][xbar], d[x][a][xbar],
//                      optional "observation_measure_free" (default true), "growth_L"
// Common keys: "schema_version", "name", "discount", "initial".
// Any tensor may be {"csv": "relative/path.csv"} with rows "i,j,...,value".
//
// Structural problems in the tensors (non-stochastic rows, negative costs) are
// not errors here; validate() reports them. Throws ConfigError otherwise.
LoadedModel load_model(const std::filesystem::path& path);
LoadedModel parse_model(const std::string& text, const std::filesystem::path& base_dir);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex_digest(std::uint64_t digest);

}  // namespace mfg
