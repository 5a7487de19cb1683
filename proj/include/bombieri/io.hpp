#pragma once

#include <string>
#include <vector>

#include "bombieri/array_analysis.hpp"
#include "bombieri/experiments.hpp"

namespace bombieri {

// Node file schema: {"k": int, "nodes": [{"re": .., "im": .., "m": ..}, ..]}
MultiplicityArray load_array(const std::string& path);
void save_array(const MultiplicityArray& arr, const std::string& path);

// Writes to a sibling temp file, then renames over the target, so readers
// never see a half-written file.
void atomic_write_text(const std::string& path, const std::string& text);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);
void save_sweep(const std::vector<SweepRow>& rows, const std::string& path,
                OutputFormat fmt);

std::string frame_report_json(const FrameReport& rep);
std::string geometry_report_json(const GeometryReport& rep);

std::string annex_suite_csv(const AnnexSuiteResult& res);
std::string annex_suite_json(const AnnexSuiteResult& res);

}  // namespace bombieri
