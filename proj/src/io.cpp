#include "mfg/io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mfg/config.h"

namespace mfg::io {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string flow_csv(const MeasureFlow& flow) {
  std::ostringstream os;
  os << "t,state,weight\n";
  for (std::size_t t = 0; t < flow.size(); ++t) {
    for (std::size_t x = 0; x < flow[t].size(); ++x) {
      os << t << "," << x << "," << num(flow[t][x]) << "\n";
    }
  }
  return os.str();
}

MeasureFlow parse_flow_csv(const std::string& text) {
  std::map<std::size_t, std::map<std::size_t, double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("t,", 0) == 0) continue;
    std::stringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw ConfigError("flow csv line " + std::to_string(lineno) + ": expected t,state,weight");
    }
    try {
      rows[std::stoul(a)][std::stoul(b)] = std::stod(c);
    } catch (const std::exception&) {
      throw ConfigError("flow csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  std::vector<Measure> measures;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    auto it = rows.find(t);
    if (it == rows.end()) throw ConfigError("flow csv: missing time " + std::to_string(t));
    std::vector<double> w(it->second.size());
    for (const auto& [x, v] : it->second) {
      if (x >= w.size()) throw ConfigError("flow csv: state indices are not contiguous");
      w[x] = v;
    }
    try {
      // Twelve significant digits round-trip only to about 1e-11 in total mass.
      double s = 0.0;
      for (double v : w) s += v;
      Measure(w, 1e-9);
      for (double& v : w) v /= s;
      measures.push_back(Measure(std::move(w), 1e-9));
    } catch (const ValidationError& e) {
      throw ConfigError("flow csv time " + std::to_string(t) + ": " + e.what());
    }
  }
  try {
    return MeasureFlow(std::move(measures));
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("flow csv: ") + e.what());
  }
}

MeasureFlow read_flow_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_flow_csv(ss.str());
}

std::string policy_csv(const Policy& policy) {
  std::ostringstream os;
  os << "t,belief_key,action\n";
  const auto& tree = *policy.tree;
  for (int t = 0; t <= tree.horizon(); ++t) {
    for (NodeId id : tree.layer(t)) {
      os << t << ",";
      const auto& cells = tree.node(id).key.cells;
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? ";" : "") << cells[i];
      os << "," << policy.at(id) << "\n";
    }
  }
  return os.str();
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "t,N,f_id,estimate,stderr\n";
  for (const auto& r : table.rows) {
    os << r.t << "," << r.N << "," << r.f_id << "," << num(r.estimate) << "," << num(r.se) << "\n";
  }
  return os.str();
}

std::string one_step_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "t,N,g_id,estimate,stderr,bound\n";
  for (const auto& r : table.one_step) {
    os << r.t << "," << r.N << "," << r.g_id << "," << num(r.estimate) << "," << num(r.se) << ","
       << num(r.bound) << "\n";
  }
  return os.str();
}

std::string eps_csv(const std::vector<EpsPoint>& points) {
  std::ostringstream os;
  os << "N,eps_hat,ci_lo,ci_hi\n";
  for (const auto& p : points) {
    os << p.N << "," << num(p.eps_hat) << "," << num(p.ci_lo) << "," << num(p.ci_hi) << "\n";
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace mfg::io
