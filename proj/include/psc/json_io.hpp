#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "psc/analysis.hpp"
#include "psc/channels.hpp"
#include "psc/complex_matrix.hpp"
#include "psc/weyl_frame.hpp"

namespace psc {

// Insertion-ordered JSON keeps report field order stable for golden files.
using ojson = nlohmann::ordered_json;

//--------------------------------------------------------------------------
// Matrix interchange: {"rows": r, "cols": c, "re": [...], "im": [...]}
//--------------------------------------------------------------------------

inline ojson matrix_to_json(const ComplexMatrix& m) {
  ojson j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(m.entries().size());
  im.reserve(m.entries().size());
  for (const auto& z : m.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline ComplexMatrix matrix_from_json(const ojson& j, const std::string& where) {
  for (const char* field : {"rows", "cols", "re", "im"})
    if (!j.contains(field))
      throw ValidationError(where + ": missing field '" + std::string(field) + "'");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw ValidationError(where + ": 'rows'/'cols' must be integers");
  const std::size_t rows = j["rows"].get<std::size_t>();
  const std::size_t cols = j["cols"].get<std::size_t>();
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (!re.is_array() || !im.is_array() || re.size() != rows * cols || im.size() != rows * cols)
    throw ValidationError(where + ": 're' and 'im' must be arrays of rows*cols numbers");
  std::vector<cdouble> entries(rows * cols);
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i] = cdouble(re[i].get<double>(), im[i].get<double>());
  return ComplexMatrix(rows, cols, std::move(entries));
}

inline ojson parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline ComplexMatrix load_matrix(const std::string& path) {
  return matrix_from_json(parse_json_file(path), path);
}

//--------------------------------------------------------------------------
// Gamma interchange: {"d":, "n":, "q":, "table": [[[coords...], value], ...]}
//--------------------------------------------------------------------------

inline GammaFunction gamma_from_json(const ojson& j, const std::string& where) {
  for (const char* field : {"d", "n", "q", "table"})
    if (!j.contains(field))
      throw ValidationError(where + ": missing field '" + std::string(field) + "'");
  const int d = j["d"].get<int>();
  const int n = j["n"].get<int>();
  const PhaseSpace space(d, n);
  const int expected_q = d == 2 ? 4 : d;
  if (j["q"].get<int>() != expected_q)
    throw ValidationError(where + ": field 'q' must be " + std::to_string(expected_q) +
                          " for d=" + std::to_string(d));
  if (!j["table"].is_array())
    throw ValidationError(where + ": field 'table' must be an array of [coords, value] pairs");
  std::vector<int> table(space.size(), -1);
  for (const auto& entry : j["table"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
      throw ValidationError(where + ": each table entry must be [[coords...], value]");
    if (entry[0].size() != static_cast<std::size_t>(2 * n))
      throw ValidationError(where + ": coordinate arrays must have 2n entries");
    std::vector<int> coords;
    for (const auto& c : entry[0]) coords.push_back(c.get<int>());
    const std::size_t idx = point_index(space, reduce(space, PhasePoint(coords)));
    table[idx] = entry[1].get<int>();
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i] < 0)
      throw ValidationError(where + ": table does not cover point " +
                            format_point(point_at(space, i)));
  return GammaFunction(space, std::move(table), where);
}

inline ojson gamma_to_json(const GammaFunction& gamma) {
  ojson j;
  j["d"] = gamma.space.d;
  j["n"] = gamma.space.n;
  j["q"] = gamma.q;
  ojson table = ojson::array();
  for (std::size_t i = 0; i < gamma.table.size(); ++i)
    table.push_back(ojson::array({point_at(gamma.space, i).coords, gamma.table[i]}));
  j["table"] = std::move(table);
  return j;
}

inline GammaFunction load_gamma(const std::string& path) {
  return gamma_from_json(parse_json_file(path), path);
}

//--------------------------------------------------------------------------
// Kraus interchange: JSON array of matrix objects
//--------------------------------------------------------------------------

inline KrausChannel kraus_from_json(const ojson& j, const std::string& where,
                                    const std::string& label) {
  if (!j.is_array() || j.empty())
    throw ValidationError(where + ": expected a nonempty array of matrix objects");
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < j.size(); ++k)
    ops.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  return KrausChannel(std::move(ops), label);
}

inline KrausChannel load_kraus(const std::string& path, const std::string& label) {
  return kraus_from_json(parse_json_file(path), path, label);
}

//--------------------------------------------------------------------------
// Report serialization
//--------------------------------------------------------------------------

inline ojson point_to_json(const PhasePoint& pt) { return ojson(pt.coords); }

inline ojson affine_to_json(const AffineSymplectic& m) {
  ojson rows = ojson::array();
  for (std::size_t r = 0; r < m.linear.rows; ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < m.linear.cols; ++c) row.push_back(m.linear(r, c));
    rows.push_back(std::move(row));
  }
  ojson j;
  j["S"] = std::move(rows);
  j["a"] = m.shift.coords;
  return j;
}

inline ojson certificate_to_json(const CovarianceCertificate& cert) {
  ojson j;
  j["transformation"] = cert.target;
  j["status"] = cert.covariant ? "covariant" : "non-covariant";
  j["affine"] = cert.affine ? affine_to_json(*cert.affine) : ojson(nullptr);
  j["witness"] = cert.witness ? point_to_json(*cert.witness) : ojson(nullptr);
  j["note"] = cert.note;
  j["decomposition_unitary"] = cert.decomposition_unitary;
  j["channel_matrix_nonnegative"] = cert.channel_matrix_nonnegative;
  j["channel_matrix_negativity"] = cert.channel_matrix_negativity;
  ojson per_kraus = ojson::array();
  for (const auto& entry : cert.per_kraus) {
    ojson e;
    e["index"] = entry.index;
    e["status"] = entry.covariant ? "covariant" : "non-covariant";
    e["affine"] = entry.affine ? affine_to_json(*entry.affine) : ojson(nullptr);
    e["witness"] = entry.witness ? point_to_json(*entry.witness) : ojson(nullptr);
    per_kraus.push_back(std::move(e));
  }
  j["per_kraus"] = std::move(per_kraus);
  j["remix"] = {{"trials", cert.remix_trials},
                {"informative", cert.remix_informative},
                {"consistent", cert.remix_consistent}};
  j["method"] = cert.method;
  return j;
}

inline ojson obstruction_to_json(const Obstruction& o, const PhaseSpace& space) {
  ojson j;
  j["kind"] = o.kind;
  j["label"] = o.label;
  j["point"] = point_to_json(point_at(space, o.point));
  j["value"] = o.value;
  return j;
}

inline ojson tnc_verdict_to_json(const TncVerdict& v) {
  ojson j;
  j["status"] = v.noncontextual ? "noncontextual" : "contextual";
  j["max_discrepancy"] = v.max_discrepancy;
  j["pair"] = v.distinguishing_pair
                  ? ojson::array({v.distinguishing_pair->first, v.distinguishing_pair->second})
                  : ojson(nullptr);
  return j;
}

inline ojson positivity_to_json(const PositivityVerdict& v) {
  ojson j;
  j["status"] = v.preserving ? "preserving" : "violated";
  j["min_value"] = v.min_value;
  if (!v.preserving) {
    ojson witness;
    witness["transformation"] = v.worst_transformation;
    witness["state"] = v.worst_state;
    witness["point"] = v.worst_point ? ojson(v.worst_point->coords) : ojson(nullptr);
    witness["value"] = v.min_value;
    j["witness"] = std::move(witness);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline ojson tolerances_json() {
  ojson j;
  j["matrix"] = kDefaultTol;
  j["negativity"] = kNegativityTol;
  j["choi"] = kDefaultTol;
  j["statistics"] = 1e-8;
  j["hull"] = 1e-7;
  j["self_check"] = kSelfCheckTol;
  return j;
}

inline ojson classicality_report_to_json(const ClassicalityReport& report,
                                         const PhaseSpace& space) {
  ojson j;
  j["subtheory"] = report.subtheory;
  j["frame"] = report.frame;

  ojson covariance = ojson::array();
  for (const auto& cert : report.covariance) covariance.push_back(certificate_to_json(cert));
  j["covariance"] = std::move(covariance);

  ojson tnc;
  tnc["model"] = "wigner";
  tnc["representable"] = report.wigner_model_built;
  tnc["status"] = report.wigner_model_built ? "noncontextual" : "not-representable";
  ojson obstructions = ojson::array();
  for (std::size_t i = 0; i < report.wigner_obstructions.size() && i < 8; ++i)
    obstructions.push_back(obstruction_to_json(report.wigner_obstructions[i], space));
  tnc["obstructions"] = std::move(obstructions);
  tnc["eight_state"] =
      report.eight_state_tnc ? tnc_verdict_to_json(*report.eight_state_tnc) : ojson(nullptr);
  j["tnc"] = std::move(tnc);

  j["positivity"] = positivity_to_json(report.positivity);

  ojson theorems;
  theorems["theorem1"] = {{"all_covariant", report.theorem1.all_covariant},
                          {"wigner_model_built", report.theorem1.wigner_model_built},
                          {"equivalence_holds", report.theorem1.equivalence_holds}};
  theorems["theorem2"] = {{"all_covariant", report.theorem2.all_covariant},
                          {"positivity_preserving", report.theorem2.positivity_preserving},
                          {"implication_holds", report.theorem2.implication_holds},
                          {"converse_counterexample", report.theorem2.converse_counterexample}};
  ojson t3 = {{"wigner_model_noncontextual", report.theorem3.wigner_model_noncontextual},
              {"positivity_preserving", report.theorem3.positivity_preserving},
              {"implication_holds", report.theorem3.implication_holds},
              {"converse_counterexample", report.theorem3.converse_counterexample}};
  t3["eight_state"] =
      report.theorem3.eight_state ? tnc_verdict_to_json(*report.theorem3.eight_state) : ojson(nullptr);
  theorems["theorem3"] = std::move(t3);
  j["theorems"] = std::move(theorems);

  ojson negativity;
  negativity["states"] = report.state_negativity;
  negativity["channels"] = report.channel_negativity;
  negativity["effects"] = report.effect_negativity;
  j["negativity_totals"] = std::move(negativity);

  j["tolerances"] = tolerances_json();
  return j;
}

}  // namespace psc
