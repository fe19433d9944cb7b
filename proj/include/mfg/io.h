#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfg/measure_flow.h"
#include "mfg/simulator.h"
#include "mfg/solver.h"

namespace mfg::io {

// Numbers in every artifact use 12 significant digits.
std::string num(double v);

// Flow CSV: header "t,state,weight", one row per (t, state).
std::string flow_csv(const MeasureFlow& flow);
MeasureFlow parse_flow_csv(const std::string& text);
MeasureFlow read_flow_csv(const std::filesystem::path& path);

// Policy CSV: header "t,belief_key,action"; the key is the quantized belief
// cells joined by ';'. Rows follow tree layer order.
std::string policy_csv(const Policy& policy);

// Header "t,N,f_id,estimate,stderr".
std::string convergence_csv(const ConvergenceTable& table);
// Header "t,N,g_id,estimate,stderr,bound".
std::string one_step_csv(const ConvergenceTable& table);
// Header "N,eps_hat,ci_lo,ci_hi".
std::string eps_csv(const std::vector<EpsPoint>& points);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mfg::io
