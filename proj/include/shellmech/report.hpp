#pragma once

// Analysis report document. Numeric fields are serialized with 17 significant
// digits so a re-parsed report reproduces every value exactly.

#include "shellmech/analysis.hpp"
#include "shellmech/cell.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace shellmech {

struct AnalysisReport {
  std::string timestamp;
  std::string cell_path;
  int nodes = 0;
  int bars = 0;
  double area = 0.0;
  std::map<std::string, std::string> metadata;
  Matrix6 a = Matrix6::Zero();
  KernelReport kernel;
  PoissonIdentity poisson;
  double assemble_ms = 0.0;
  double solve_ms = 0.0;
  double analysis_ms = 0.0;
};

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string num17(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class JsonWriter {
 public:
  std::string str() const { return out_; }

  void begin() { out_ += "{"; }
  void end() { out_ += "\n}\n"; }

  void field(const std::string& key, const std::string& value) {
    key_(key);
    out_ += "\"" + json_escape(value) + "\"";
  }
  void field(const std::string& key, double value) {
    key_(key);
    out_ += num17(value);
  }
  void field(const std::string& key, int value) {
    key_(key);
    out_ += std::to_string(value);
  }
  void field(const std::string& key, bool value) {
    key_(key);
    out_ += value ? "true" : "false";
  }
  void field_raw(const std::string& key, const std::string& raw) {
    key_(key);
    out_ += raw;
  }

  void open(const std::string& key) {
    key_(key);
    out_ += "{";
    fresh_ = true;
  }
  void close() {
    out_ += "}";
    fresh_ = false;
  }

 private:
  void key_(const std::string& key) {
    if (!fresh_) out_ += ",";
    out_ += "\n  \"" + json_escape(key) + "\": ";
    fresh_ = false;
  }

  std::string out_;
  bool fresh_ = true;
};

inline std::string matrix_json(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (int r = 0; r < m.rows(); ++r) {
    out += r ? ",[" : "[";
    for (int c = 0; c < m.cols(); ++c)
      out += (c ? "," : "") + num17(m(r, c));
    out += "]";
  }
  return out + "]";
}

inline std::string vector_json(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) out += (i ? "," : "") + num17(v(i));
  return out + "]";
}

}  // namespace detail

inline std::string report_to_json(const AnalysisReport& r) {
  detail::JsonWriter w;
  w.begin();
  w.field("timestamp", r.timestamp);
  w.open("cell");
  w.field("path", r.cell_path);
  w.field("nodes", r.nodes);
  w.field("bars", r.bars);
  w.field("area", r.area);
  {
    std::string meta = "{";
    bool first = true;
    for (const auto& [k, v] : r.metadata) {
      meta += (first ? "" : ",") + ("\"" + detail::json_escape(k) + "\":\"" +
                                    detail::json_escape(v) + "\"");
      first = false;
    }
    w.field_raw("metadata", meta + "}");
  }
  w.close();
  w.field_raw("effective_tensor", detail::matrix_json(r.a));
  w.field_raw("eigenvalues", detail::vector_json(r.kernel.eigenvalues));
  w.field("kernel_dim", r.kernel.kernel_dim);
  w.field("gap_ratio", r.kernel.gap_ratio);
  w.field_raw("kernel_basis", detail::matrix_json(r.kernel.kernel_basis));
  w.open("classification");
  w.field("pure_membrane", r.kernel.pure_membrane_dim);
  w.field("pure_flexure", r.kernel.pure_flexure_dim);
  w.field("mixed", r.kernel.mixed_dim);
  w.close();
  w.field("residual_aja", r.kernel.residual_aja);
  w.field("symplectic_residual", r.kernel.symplectic_residual);
  w.field_raw("symplectic_pairings", detail::matrix_json(r.kernel.pairings));
  w.open("poisson");
  w.field("canonical", r.poisson.canonical);
  if (r.poisson.canonical) {
    w.field("nu_membrane", r.poisson.nu_membrane);
    w.field("nu_flexure", r.poisson.nu_flexure);
  } else {
    w.field("message", r.poisson.message);
  }
  w.field("residual", r.poisson.residual);
  w.close();
  {
    std::string flags = "[";
    for (std::size_t i = 0; i < r.kernel.flags.size(); ++i)
      flags += (i ? "," : "") +
               ("\"" + detail::json_escape(r.kernel.flags[i]) + "\"");
    w.field_raw("flags", flags + "]");
  }
  w.open("timings_ms");
  w.field("assemble", r.assemble_ms);
  w.field("solve", r.solve_ms);
  w.field("analysis", r.analysis_ms);
  w.close();
  w.end();
  return w.str();
}

inline AnalysisReport report_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  AnalysisReport r;
  r.timestamp = doc.at("timestamp");
  r.cell_path = doc.at("cell").at("path");
  r.nodes = doc.at("cell").at("nodes");
  r.bars = doc.at("cell").at("bars");
  r.area = doc.at("cell").at("area");
  for (const auto& [k, v] : doc.at("cell").at("metadata").items())
    r.metadata[k] = v.get<std::string>();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      r.a(i, j) = doc.at("effective_tensor").at(i).at(j);
  for (int i = 0; i < 6; ++i)
    r.kernel.eigenvalues(i) = doc.at("eigenvalues").at(i);
  r.kernel.kernel_dim = doc.at("kernel_dim");
  if (doc.at("gap_ratio").is_string()) {
    const std::string s = doc.at("gap_ratio");
    r.kernel.gap_ratio = s == "nan"
                             ? std::numeric_limits<double>::quiet_NaN()
                             : (s == "-inf" ? -1.0 : 1.0) *
                                   std::numeric_limits<double>::infinity();
  } else {
    r.kernel.gap_ratio = doc.at("gap_ratio").get<double>();
  }
  const auto& basis = doc.at("kernel_basis");
  r.kernel.kernel_basis.resize(6, r.kernel.kernel_dim);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < r.kernel.kernel_dim; ++j)
      r.kernel.kernel_basis(i, j) = basis.at(i).at(j);
  r.kernel.pure_membrane_dim = doc.at("classification").at("pure_membrane");
  r.kernel.pure_flexure_dim = doc.at("classification").at("pure_flexure");
  r.kernel.mixed_dim = doc.at("classification").at("mixed");
  r.kernel.residual_aja = doc.at("residual_aja");
  r.kernel.symplectic_residual = doc.at("symplectic_residual");
  const auto& pairings = doc.at("symplectic_pairings");
  r.kernel.pairings.resize(r.kernel.kernel_dim, r.kernel.kernel_dim);
  for (int i = 0; i < r.kernel.kernel_dim; ++i)
    for (int j = 0; j < r.kernel.kernel_dim; ++j)
      r.kernel.pairings(i, j) = pairings.at(i).at(j);
  for (const auto& f : doc.at("flags"))
    r.kernel.flags.push_back(f.get<std::string>());
  r.poisson.canonical = doc.at("poisson").at("canonical");
  if (r.poisson.canonical) {
    r.poisson.nu_membrane = doc.at("poisson").at("nu_membrane");
    r.poisson.nu_flexure = doc.at("poisson").at("nu_flexure");
  } else {
    r.poisson.message = doc.at("poisson").at("message");
  }
  r.poisson.residual = doc.at("poisson").at("residual");
  r.assemble_ms = doc.at("timings_ms").at("assemble");
  r.solve_ms = doc.at("timings_ms").at("solve");
  r.analysis_ms = doc.at("timings_ms").at("analysis");
  return r;
}

}  // namespace shellmech
