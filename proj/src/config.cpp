#include "mfg/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mfg {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Reader {
 public:
  Reader(std::filesystem::path base, std::uint64_t digest) : base_(std::move(base)), digest_(digest) {}

  std::uint64_t digest() const { return digest_; }

  const json& require(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.is_object() || !obj.contains(key)) {
      throw ConfigError("field '" + where + key + "' is required");
    }
    return obj.at(key);
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) throw ConfigError("field '" + field + "' must be a number");
    return v.get<double>();
  }

  std::size_t count(const json& v, const std::string& field) const {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ConfigError("field '" + field + "' must be a positive integer");
    }
    return v.get<std::size_t>();
  }

  std::vector<double> vector(const json& v, const std::string& field) const {
    if (!v.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  // Reads a tensor of the given shape from nested arrays or a CSV reference.
  Tensor tensor(const json& v, const std::vector<std::size_t>& shape, const std::string& field) {
    Tensor t(shape);
    if (v.is_object() && v.contains("csv")) {
      read_csv(v.at("csv"), t, field);
      return t;
    }
    fill(v, t, 0, 0, field);
    return t;
  }

  // Tensor whose last-but-one axis (xbar) may be omitted; the value is then
  // replicated along it.
  Tensor broadcast_tensor(const json& v, std::vector<std::size_t> full, std::size_t xbar_axis,
                          const std::string& field) {
    const std::size_t depth = nesting_depth(v);
    if (depth == full.size() || (v.is_object() && v.contains("csv") &&
                                 !v.value("mean_field_free", false))) {
      return tensor(v, full, field);
    }
    std::vector<std::size_t> reduced = full;
    reduced.erase(reduced.begin() + static_cast<long>(xbar_axis));
    Tensor small = tensor(v, reduced, field);
    Tensor t(full);
    std::vector<std::size_t> idx(full.size(), 0);
    for (std::size_t flat = 0; flat < t.data.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t k = full.size(); k-- > 0;) {
        idx[k] = rem % full[k];
        rem /= full[k];
      }
      std::size_t off = 0;
      for (std::size_t k = 0, j = 0; k < full.size(); ++k) {
        if (k == xbar_axis) continue;
        off = off * reduced[j] + idx[k];
        ++j;
      }
      t.data[flat] = small.data[off];
    }
    return t;
  }

 private:
  static std::size_t nesting_depth(const json& v) {
    std::size_t d = 0;
    const json* cur = &v;
    while (cur->is_array() && !cur->empty()) {
      ++d;
      cur = &(*cur)[0];
    }
    return d;
  }

  void fill(const json& v, Tensor& t, std::size_t axis, std::size_t offset,
            const std::string& field) {
    if (axis == t.shape.size()) {
      t.data[offset] = number(v, field);
      return;
    }
    if (!v.is_array() || v.size() != t.shape[axis]) {
      throw ConfigError("field '" + field + "' must be an array of length " +
                        std::to_string(t.shape[axis]));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      fill(v[i], t, axis + 1, offset * t.shape[axis] + i, field + "[" + std::to_string(i) + "]");
    }
  }

  void read_csv(const json& ref, Tensor& t, const std::string& field) {
    if (!ref.is_string()) throw ConfigError("field '" + field + ".csv' must be a path");
    const auto path = base_ / ref.get<std::string>();
    const std::string text = read_file(path);
    digest_ = fnv1a(text, digest_);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<bool> seen(t.data.size(), false);
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (lineno == 1 && !cells.empty() &&
          cells[0].find_first_not_of(" 0123456789") != std::string::npos) {
        continue;  // header
      }
      if (cells.size() != t.shape.size() + 1) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(t.shape.size() + 1) + " columns");
      }
      std::size_t off = 0;
      try {
        for (std::size_t k = 0; k < t.shape.size(); ++k) {
          const auto i = std::stoul(cells[k]);
          if (i >= t.shape[k]) throw ConfigError("index out of range");
          off = off * t.shape[k] + i;
        }
        t.data[off] = std::stod(cells.back());
      } catch (const std::exception& e) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      seen[off] = true;
    }
    for (bool s : seen) {
      if (!s) throw ConfigError(path.string() + ": tensor '" + field + "' has missing entries");
    }
  }

  std::filesystem::path base_;
  std::uint64_t digest_;
};

Grid read_grid(Reader& rd, const json& v, const std::string& field, bool need_width) {
  if (v.is_number_integer()) {
    if (need_width) throw ConfigError("field '" + field + "' needs coordinates");
    return Grid::indexed(rd.count(v, field));
  }
  if (!v.is_object()) throw ConfigError("field '" + field + "' must be a size or a grid object");
  std::vector<double> coords;
  if (v.contains("coords")) {
    coords = rd.vector(v.at("coords"), field + ".coords");
  } else if (v.contains("min") && v.contains("max") && v.contains("size")) {
    const double lo = rd.number(v.at("min"), field + ".min");
    const double hi = rd.number(v.at("max"), field + ".max");
    const std::size_t n = rd.count(v.at("size"), field + ".size");
    for (std::size_t i = 0; i < n; ++i) {
      coords.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  } else if (v.contains("size")) {
    if (need_width) throw ConfigError("field '" + field + "' needs coordinates");
    return Grid::indexed(rd.count(v.at("size"), field + ".size"));
  } else {
    throw ConfigError("field '" + field + "' needs 'coords' or 'min'/'max'/'size'");
  }
  double width = 1.0;
  if (v.contains("cell_width")) {
    width = rd.number(v.at("cell_width"), field + ".cell_width");
  } else if (coords.size() > 1) {
    width = (coords.back() - coords.front()) / static_cast<double>(coords.size() - 1);
  }
  return Grid::with_coords(std::move(coords), width);
}

}  // namespace

LoadedModel parse_model(const std::string& text, const std::filesystem::path& base_dir) {
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  Reader rd(base_dir, fnv1a(text));
  if (!cfg.is_object()) throw ConfigError("config root must be an object");
  const auto& version = rd.require(cfg, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw ConfigError("field 'schema_version' must be " + std::to_string(kSchemaVersion));
  }
  const auto& family_v = rd.require(cfg, "family", "");
  if (!family_v.is_string()) throw ConfigError("field 'family' must be a string");
  const std::string family = family_v.get<std::string>();
  const double beta = rd.number(rd.require(cfg, "discount", ""), "discount");

  LoadedModel out;
  out.name = cfg.value("name", family);

  try {
    if (family == "tabular") {
      const std::size_t nx = rd.count(rd.require(cfg, "states", ""), "states");
      const std::size_t ny = rd.count(rd.require(cfg, "observations", ""), "observations");
      const std::size_t na = rd.count(rd.require(cfg, "actions", ""), "actions");
      Measure mu0(rd.vector(rd.require(cfg, "initial", ""), "initial"));
      if (mu0.size() != nx) throw ConfigError("field 'initial' must have one weight per state");
      Tensor K = rd.broadcast_tensor(rd.require(cfg, "transition", ""), {nx, na, nx, nx}, 2,
                                     "transition");
      Tensor d = rd.broadcast_tensor(rd.require(cfg, "cost", ""), {nx, na, nx}, 2, "cost");
      Tensor r = rd.tensor(rd.require(cfg, "observation", ""), {nx, ny}, "observation");
      std::optional<std::vector<double>> w;
      double alpha = 1.0;
      if (cfg.contains("moment")) {
        const auto& m = cfg.at("moment");
        w = rd.vector(rd.require(m, "weights", "moment."), "moment.weights");
        alpha = rd.number(rd.require(m, "alpha", "moment."), "moment.alpha");
      }
      out.model = std::make_shared<const TabularAffineModel>(std::move(K), std::move(d),
                                                             std::move(r), beta, std::move(mu0),
                                                             std::move(w), alpha);
    } else if (family == "gaussian") {
      GaussianTables tab;
      tab.states = read_grid(rd, rd.require(cfg, "states", ""), "states", true);
      tab.observations = read_grid(rd, rd.require(cfg, "observations", ""), "observations", true);
      tab.actions = read_grid(rd, rd.require(cfg, "actions", ""), "actions", true);
      const std::size_t nx = tab.states.size, na = tab.actions.size;
      Measure mu0(rd.vector(rd.require(cfg, "initial", ""), "initial"));
      if (mu0.size() != nx) throw ConfigError("field 'initial' must have one weight per state");
      tab.f = rd.tensor(rd.require(cfg, "f", ""), {nx, na, nx}, "f");
      tab.g = rd.tensor(rd.require(cfg, "g", ""), {nx, na}, "g");
      tab.h = rd.broadcast_tensor(rd.require(cfg, "h", ""), {nx, nx}, 1, "h");
      tab.d = rd.tensor(rd.require(cfg, "d", ""), {nx, na, nx}, "d");
      tab.observation_measure_free = cfg.value("observation_measure_free", true);
      if (cfg.contains("growth_L")) tab.growth_L = rd.number(cfg.at("growth_L"), "growth_L");
      out.model = std::make_shared<const GaussianAdditiveModel>(std::move(tab), beta, std::move(mu0));
    } else {
      throw ConfigError("field 'family' must be 'tabular' or 'gaussian'");
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  out.digest = rd.digest();
  return out;
}

LoadedModel load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return parse_model(text, path.parent_path());
}

}  // namespace mfg
