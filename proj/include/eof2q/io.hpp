#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decomposition.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "oracle.hpp"
#include "quantum.hpp"

namespace eof2q::io {

using json = nlohmann::ordered_json;

/// Error in the structure of an input file (malformed JSON, wrong schema).
struct parse_error : error {
  using error::error;
};

inline constexpr const char* kBasisLabel = "up-up, up-down, down-up, down-down";

/// One entry of a matrix file: either a structurally valid 4x4 complex matrix
/// or a list of diagnostics saying why it could not be read.
struct file_entry {
  std::string label;
  std::optional<cmat> matrix;
  std::vector<std::string> issues;
};

namespace detail {

inline std::string loc(int r, int c) {
  return "(row " + std::to_string(r) + ", col " + std::to_string(c) + ")";
}

inline file_entry read_entry(const json& j, int index) {
  file_entry e;
  e.label = "entry " + std::to_string(index);
  if (!j.is_object()) {
    e.issues.push_back("entry is not an object");
    return e;
  }
  if (j.contains("label") && j["label"].is_string()) e.label = j["label"].get<std::string>();
  if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].size() != 4) {
    e.issues.push_back("missing or malformed \"matrix\": expected 4 rows");
    return e;
  }
  cmat m(4);
  for (int r = 0; r < 4; ++r) {
    const json& row = j["matrix"][r];
    if (!row.is_array() || row.size() != 4) {
      e.issues.push_back("row " + std::to_string(r) + " is not an array of 4 entries");
      continue;
    }
    for (int c = 0; c < 4; ++c) {
      const json& cell = row[c];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number()) {
        e.issues.push_back("entry is not a [re, im] pair at " + loc(r, c));
        continue;
      }
      const double re = cell[0].get<double>();
      const double im = cell[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        e.issues.push_back("non-finite entry at " + loc(r, c));
        continue;
      }
      m(r, c) = cplx(re, im);
    }
  }
  if (e.issues.empty()) e.matrix = m;
  return e;
}

}  // namespace detail

/// Reads a matrix file. Throws parse_error for file-level problems (invalid
/// JSON, missing fields, wrong basis declaration); per-entry problems are
/// reported inside the returned entries instead.
inline std::vector<file_entry> read_matrix_file(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw parse_error(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw parse_error("top-level value must be an object");
  if (!j.contains("basis") || !j["basis"].is_string())
    throw parse_error("missing \"basis\" declaration");
  if (j["basis"].get<std::string>() != kBasisLabel)
    throw parse_error(std::string("unsupported basis, expected \"") + kBasisLabel + "\"");
  if (!j.contains("matrices") || !j["matrices"].is_array())
    throw parse_error("missing \"matrices\" array");

  std::vector<file_entry> entries;
  int index = 0;
  for (const auto& je : j["matrices"]) entries.push_back(detail::read_entry(je, index++));
  return entries;
}

inline json matrix_to_json(const cmat& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline void write_matrix_file(std::ostream& out,
                              const std::vector<std::pair<std::string, cmat>>& entries) {
  json j;
  j["basis"] = kBasisLabel;
  j["matrices"] = json::array();
  for (const auto& [label, m] : entries)
    j["matrices"].push_back(json{{"label", label}, {"matrix", matrix_to_json(m)}});
  out << j.dump(2) << "\n";
}

/// Validates one structurally sound entry as a density matrix. With
/// `normalize`, a trace within [0.9, 1.1] is rescaled to 1 first.
inline std::optional<density_matrix> validate_entry(const cmat& m, bool normalize,
                                                    std::vector<std::string>& issues) {
  cmat w = m;
  if (normalize) {
    const double tr = std::real(trace(w));
    if (tr < 0.9 || tr > 1.1) {
      issues.push_back("trace " + std::to_string(tr) + " outside [0.9, 1.1], cannot normalize");
      return std::nullopt;
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w(i, j) /= tr;
  }
  {
    double worst = 0.0;
    int wr = 0, wc = 0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double dev = std::abs(w(r, c) - std::conj(w(c, r)));
        if (dev > worst) worst = dev, wr = r, wc = c;
      }
    if (worst > 1e-10) {
      issues.push_back("not Hermitian at " + detail::loc(wr, wc) + ", deviation " +
                       std::to_string(worst));
      return std::nullopt;
    }
  }
  try {
    return density_matrix(w);
  } catch (const invalid_density_matrix& ex) {
    issues.push_back(ex.what());
    return std::nullopt;
  }
}

inline const char* source_name(ensemble_source s) {
  switch (s) {
    case ensemble_source::eigen: return "eigen";
    case ensemble_source::tilde_orthogonal: return "tilde_orthogonal";
    case ensemble_source::phase_adjusted: return "phase_adjusted";
    case ensemble_source::optimal: return "optimal";
    case ensemble_source::zero_concurrence: return "zero_concurrence";
    case ensemble_source::sampled: return "sampled";
  }
  return "unknown";
}

/// Result record for one density matrix, emitted as one JSON object per line.
inline json result_record(const std::string& label, const density_matrix& rho) {
  const auto ls = compute_lambdas(rho);
  const double c = std::max(0.0, ls.lambdas[0] - ls.lambdas[1] - ls.lambdas[2] - ls.lambdas[3]);
  json rec;
  rec["label"] = label;
  rec["concurrence"] = c;
  rec["eof"] = eof_from_concurrence(c);
  rec["lambdas"] = ls.lambdas;
  rec["rank"] = ls.rank;
  return rec;
}

inline json decomposition_record(const std::string& label, const density_matrix& rho) {
  json rec = result_record(label, rho);
  const decomposition d = optimal_decomposition(rho);
  json members = json::array();
  for (const auto& w : d.members) {
    json amps = json::array();
    for (const auto& a : w.amp) amps.push_back(json::array({a.real(), a.imag()}));
    const double p = norm_sq(w);
    json jm;
    jm["amplitudes"] = amps;
    jm["probability"] = p;
    jm["concurrence"] = p > 1e-14 ? concurrence(scaled(w, 1.0 / std::sqrt(p))) : 0.0;
    members.push_back(jm);
  }
  json jd;
  jd["source"] = source_name(d.source);
  jd["members"] = members;
  jd["avg_entanglement"] = average_entanglement(d);
  jd["reconstruction_error"] = reconstruction_error(d, rho);
  rec["decomposition"] = jd;
  return rec;
}

inline json verification_record(const std::string& label, const verification_report& rep) {
  json rec;
  rec["label"] = label;
  rec["formula_value"] = rep.formula_value;
  rec["constructed_avg_entanglement"] = rep.constructed_avg_entanglement;
  rec["min_sampled_avg_entanglement"] = rep.min_sampled_avg_entanglement;
  rec["min_sampled_avg_concurrence"] = rep.min_sampled_avg_concurrence;
  rec["samples"] = rep.samples;
  rec["violations"] = rep.violations;
  return rec;
}

}  // namespace eof2q::io
