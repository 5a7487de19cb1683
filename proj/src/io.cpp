#include "bombieri/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bombieri/annex.hpp"

namespace bombieri {

namespace {

using nlohmann::json;

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

json row_to_json(const SweepRow& r) {
  json j;
  j["k"] = r.k;
  if (!r.error.empty()) {
    j["error"] = r.error;
  } else {
    j["total_multiplicity"] = r.total_multiplicity;
    j["lower_frame_bound"] = r.lower_frame_bound;
    j["upper_frame_bound"] = r.upper_frame_bound;
    j["conditioning"] = r.conditioning;
    if (r.interpolation_constant)
      j["interpolation_constant"] = *r.interpolation_constant;
    else
      j["interpolation_constant"] = nullptr;
    j["overlap_count"] = r.overlap_count;
    j["separation_margin_dilated"] = r.separation_margin_dilated;
    j["separation_margin_contracted"] = r.separation_margin_contracted;
    j["uncovered_mass_dilated"] = r.uncovered_mass_dilated;
    j["uncovered_mass_contracted"] = r.uncovered_mass_contracted;
    j["k_times_uncovered_mass"] = r.k_times_uncovered_mass;
  }
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

json cell_to_json(const AnnexCell& c) {
  json j;
  j["id"] = to_string(c.id);
  j["k"] = c.params.k;
  j["m"] = c.params.m;
  if (c.params.j >= 0) j["j"] = c.params.j;
  if (!std::isnan(c.params.a)) j["a"] = c.params.a;
  if (!std::isnan(c.params.s)) j["s"] = c.params.s;
  if (!std::isnan(c.params.x)) j["x"] = c.params.x;
  if (c.skipped) {
    j["skipped"] = true;
    j["reason"] = c.skip_reason;
  } else {
    j["lhs_log"] = c.report.lhs_log;
    j["rhs_log"] = c.report.rhs_log;
    j["margin"] = c.report.margin;
    j["holds"] = c.report.holds;
  }
  return j;
}

}  // namespace

MultiplicityArray load_array(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_object() || !j.contains("k") || !j.contains("nodes"))
    throw std::runtime_error(path + ": expected an object with k and nodes");
  MultiplicityArray arr;
  if (!j["k"].is_number_integer())
    throw std::runtime_error(path + ": k must be an integer");
  arr.k = j["k"].get<int>();
  if (!j["nodes"].is_array())
    throw std::runtime_error(path + ": nodes must be an array");
  for (const auto& n : j["nodes"]) {
    if (!n.is_object() || !n.contains("re") || !n.contains("im"))
      throw std::runtime_error(path + ": each node needs re and im");
    ArrayNode node;
    node.point = PlanePoint(n["re"].get<double>(), n["im"].get<double>());
    node.multiplicity = n.value("m", 1);
    arr.nodes.push_back(node);
  }
  validate_array(arr, false);
  return arr;
}

void save_array(const MultiplicityArray& arr, const std::string& path) {
  json j;
  j["k"] = arr.k;
  j["nodes"] = json::array();
  for (const auto& n : arr.nodes)
    j["nodes"].push_back({{"re", n.point.real()},
                          {"im", n.point.imag()},
                          {"m", n.multiplicity}});
  atomic_write_text(path, j.dump(2) + "\n");
}

void atomic_write_text(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename " + tmp + " -> " + path + ": " +
                             std::strerror(errno));
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "k,total_multiplicity,lower_frame_bound,upper_frame_bound,"
         "conditioning,interpolation_constant,overlap_count,"
         "separation_margin_dilated,separation_margin_contracted,"
         "uncovered_mass_dilated,uncovered_mass_contracted,"
         "k_times_uncovered_mass,wall_time_ms,error\n";
  for (const auto& r : rows) {
    out << r.k << ',';
    if (r.error.empty()) {
      out << r.total_multiplicity << ',' << num(r.lower_frame_bound) << ','
          << num(r.upper_frame_bound) << ',' << num(r.conditioning) << ',';
      if (r.interpolation_constant) out << num(*r.interpolation_constant);
      out << ',' << r.overlap_count << ','
          << num(r.separation_margin_dilated) << ','
          << num(r.separation_margin_contracted) << ','
          << num(r.uncovered_mass_dilated) << ','
          << num(r.uncovered_mass_contracted) << ','
          << num(r.k_times_uncovered_mass) << ',';
    } else {
      out << ",,,,,,,,,,,";
    }
    out << r.wall_time_ms << ',' << csv_escape(r.error) << '\n';
  }
  return out.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  json j = json::array();
  for (const auto& r : rows) j.push_back(row_to_json(r));
  return j.dump(2) + "\n";
}

void save_sweep(const std::vector<SweepRow>& rows, const std::string& path,
                OutputFormat fmt) {
  atomic_write_text(path,
                    fmt == OutputFormat::kCsv ? sweep_csv(rows) : sweep_json(rows));
}

std::string frame_report_json(const FrameReport& rep) {
  json j;
  j["k"] = rep.k;
  j["total_multiplicity"] = rep.total_multiplicity;
  j["lower_frame_bound"] = rep.lower;
  j["upper_frame_bound"] = rep.upper;
  j["conditioning"] = rep.conditioning;
  j["rank"] = rep.rank;
  j["singular_values"] = json::array();
  for (int i = 0; i < rep.singular_values.size(); ++i)
    j["singular_values"].push_back(rep.singular_values(i));
  return j.dump(2) + "\n";
}

std::string geometry_report_json(const GeometryReport& rep) {
  json j;
  j["k"] = rep.k;
  j["mesh_n"] = rep.mesh_n;
  j["c"] = rep.c;
  j["overlap_count"] = rep.overlap;
  j["separation_margin_dilated"] = rep.margin_dilated;
  j["separation_margin_contracted"] = rep.margin_contracted;
  j["uncovered_mass_dilated"] = rep.uncovered_dilated;
  j["uncovered_mass_contracted"] = rep.uncovered_contracted;
  j["k_times_uncovered_mass"] = rep.k_uncovered_zero;
  j["multiplicity_mass"] = rep.multiplicity_mass;
  return j.dump(2) + "\n";
}

std::string annex_suite_csv(const AnnexSuiteResult& res) {
  std::ostringstream out;
  out << "id,k,m,j,a,s,x,lhs_log,rhs_log,margin,holds,skipped,reason\n";
  for (const auto& c : res.cells) {
    out << to_string(c.id) << ',' << c.params.k << ',' << c.params.m << ',';
    if (c.params.j >= 0) out << c.params.j;
    out << ',';
    if (!std::isnan(c.params.a)) out << num(c.params.a);
    out << ',';
    if (!std::isnan(c.params.s)) out << num(c.params.s);
    out << ',';
    if (!std::isnan(c.params.x)) out << num(c.params.x);
    out << ',';
    if (c.skipped) {
      out << ",,,," << "true," << csv_escape(c.skip_reason) << '\n';
    } else {
      out << num(c.report.lhs_log) << ',' << num(c.report.rhs_log) << ','
          << num(c.report.margin) << ',' << (c.report.holds ? "true" : "false")
          << ",false,\n";
    }
  }
  return out.str();
}

std::string annex_suite_json(const AnnexSuiteResult& res) {
  json j;
  j["checked"] = res.checked;
  j["held"] = res.held;
  j["failed"] = res.failed;
  j["skipped"] = res.skipped;
  j["min_margin"] = res.min_margin;
  j["all_hold"] = res.all_hold;
  j["cells"] = json::array();
  for (const auto& c : res.cells) j["cells"].push_back(cell_to_json(c));
  return j.dump(2) + "\n";
}

BaselineTable BaselineTable::load(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_object())
    throw std::runtime_error(path + ": expected an object keyed by inequality id");
  BaselineTable t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    annex_inequality_from_string(it.key());  // reject unknown ids
    const json& e = it.value();
    AnnexRegime r;
    r.k_min = e.at("k_min").get<int>();
    r.m_min = e.at("m_min").get<int>();
    r.m_frac_max = e.at("m_frac_max").get<double>();
    if (e.contains("floor")) r.floor = e["floor"].get<double>();
    t.entries[it.key()] = r;
  }
  return t;
}

void BaselineTable::save(const std::string& path) const {
  json j = json::object();
  for (const auto& [name, r] : entries) {
    json e;
    e["k_min"] = r.k_min;
    e["m_min"] = r.m_min;
    e["m_frac_max"] = r.m_frac_max;
    if (r.floor) e["floor"] = *r.floor;
    j[name] = e;
  }
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace bombieri
