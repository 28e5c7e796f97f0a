#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psc/analysis.hpp"
#include "psc/json_io.hpp"
#include "psc/subtheory.hpp"

namespace psc::cli {

// Exit codes: 0 = verdict classical (or plain listing), 1 = nonclassicality
// witness found, 2 = usage or input error.
inline constexpr int kExitClassical = 0;
inline constexpr int kExitWitness = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline WignerFrame resolve_frame(const std::string& label) {
  if (label == "wg-plus") return wg_plus();
  if (label == "wg-minus") return wg_minus();
  if (label == "gross") return gross_frame();
  if (label == "wg-multi") return wg_multi_frame(2);
  if (label.rfind("custom:", 0) == 0) {
    const std::string path = label.substr(7);
    return custom_frame(load_gamma(path), label);
  }
  throw ValidationError("unknown frame label '" + label +
                        "' (expected wg-plus, wg-minus, gross, wg-multi or custom:<path>)");
}

inline Subtheory load_custom_subtheory(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto sorted_files = [](const fs::path& p) {
    std::vector<fs::path> files;
    if (fs::is_directory(p))
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
  };

  Subtheory sub;
  sub.label = "custom:" + dir;
  for (const auto& f : sorted_files(fs::path(dir) / "states"))
    sub.states.push_back({f.stem().string(), load_matrix(f.string())});
  if (sub.states.empty())
    throw ValidationError(dir + ": no states/*.json files found");
  sub.dim = sub.states.front().rho.rows();
  for (const auto& f : sorted_files(fs::path(dir) / "channels"))
    sub.transformations.push_back(load_kraus(f.string(), f.stem().string()));
  for (const auto& f : sorted_files(fs::path(dir) / "povms")) {
    const ojson j = parse_json_file(f.string());
    if (!j.is_array())
      throw ValidationError(f.string() + ": expected an array of matrix objects");
    std::vector<ComplexMatrix> effects;
    for (std::size_t k = 0; k < j.size(); ++k)
      effects.push_back(matrix_from_json(j[k], f.string() + "[" + std::to_string(k) + "]"));
    sub.povms.emplace_back(f.stem().string(), std::move(effects));
  }
  return sub;
}

inline Subtheory resolve_subtheory(const std::string& label) {
  if (label == "qubit-stab") return build_single_qubit_stabilizer();
  if (label == "qutrit-stab") return build_qutrit_stabilizer();
  if (label == "2qubit-stab") return build_two_qubit_stabilizer();
  if (label.rfind("custom:", 0) == 0) return load_custom_subtheory(label.substr(7));
  throw ValidationError("unknown subtheory label '" + label +
                        "' (expected qubit-stab, qutrit-stab, 2qubit-stab or custom:<dir>)");
}

inline std::optional<ComplexMatrix> named_matrix(const std::string& name) {
  if (name == "hadamard") return hadamard();
  if (name == "phase") return phase_gate();
  if (name == "t") return t_gate();
  if (name == "pauli-x") return sigma_x();
  if (name == "pauli-y") return sigma_y();
  if (name == "pauli-z") return sigma_z();
  if (name == "fourier3") return fourier(3);
  if (name == "qutrit-phase") return qutrit_phase();
  if (name == "cnot") return cnot();
  return std::nullopt;
}

inline KrausChannel resolve_channel(const std::string& spec, std::size_t dim_hint) {
  if (spec == "id") return identity_channel(dim_hint == 0 ? 2 : dim_hint);
  if (spec == "depol-eps1") return depolarizing_eps1();
  if (spec == "depol-eps2") return depolarizing_eps2();
  if (spec.rfind("unitary:", 0) == 0) {
    const std::string name = spec.substr(8);
    if (const auto builtin = named_matrix(name)) return unitary_channel(*builtin, spec);
    return unitary_channel(load_matrix(name), spec);
  }
  if (spec.rfind("pauli-mix:", 0) == 0) {
    std::array<double, 4> w{};
    std::stringstream ss(spec.substr(10));
    std::string token;
    std::size_t i = 0;
    while (std::getline(ss, token, ',') && i < 4) {
      try {
        w[i++] = std::stod(token);
      } catch (const std::exception&) {
        throw ValidationError(spec + ": weight '" + token + "' is not a number");
      }
    }
    if (i != 4) throw ValidationError(spec + ": expected four weights w0,w1,w2,w3");
    return pauli_mixture(w, spec);
  }
  if (spec.rfind("kraus:", 0) == 0) return load_kraus(spec.substr(6), spec);
  throw ValidationError("unknown channel specifier '" + spec + "'");
}

inline ComplexMatrix resolve_state(const std::string& spec, std::size_t dim_hint) {
  const std::size_t d = dim_hint == 0 ? 2 : dim_hint;
  const double r = 1.0 / std::sqrt(2.0);
  if (spec == "zero") return basis_projector(static_cast<int>(d), 0);
  if (spec == "one") return basis_projector(static_cast<int>(d), 1);
  if (spec == "two" && d >= 3) return basis_projector(static_cast<int>(d), 2);
  if (spec == "mixed") return (1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d);
  if (spec == "plus") return ket_density({r, r});
  if (spec == "minus") return ket_density({r, -r});
  if (spec == "plus-i") return ket_density({r, cdouble(0.0, 1.0) * r});
  if (spec == "minus-i") return ket_density({r, cdouble(0.0, -1.0) * r});
  if (spec == "magic-h") {
    const double a = std::numbers::pi / 8.0;
    return ket_density({std::cos(a), std::sin(a)});
  }
  if (spec.find('.') != std::string::npos || spec.find('/') != std::string::npos)
    return load_matrix(spec);
  throw ValidationError("unknown state specifier '" + spec + "'");
}

// A --pair value is two channel specifiers joined by a comma; pauli-mix
// weights also use commas, so tokens are greedily reattached to the last
// specifier opener.
inline std::pair<std::string, std::string> split_pair(const std::string& value) {
  std::vector<std::string> specs;
  std::stringstream ss(value);
  std::string token;
  const auto opens_spec = [](const std::string& t) {
    return t == "id" || t == "depol-eps1" || t == "depol-eps2" ||
           t.rfind("unitary:", 0) == 0 || t.rfind("pauli-mix:", 0) == 0 ||
           t.rfind("kraus:", 0) == 0;
  };
  while (std::getline(ss, token, ',')) {
    if (opens_spec(token))
      specs.push_back(token);
    else if (!specs.empty())
      specs.back() += "," + token;
    else
      throw ValidationError("--pair: '" + token + "' does not start a channel specifier");
  }
  if (specs.size() != 2)
    throw ValidationError("--pair: expected exactly two channel specifiers, got " +
                          std::to_string(specs.size()));
  return {specs[0], specs[1]};
}

inline std::string format_values(const WignerFrame& frame, const std::vector<double>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i)
    os << "  " << format_point(point_at(frame.space(), i)) << "  " << values[i] << "\n";
  return os.str();
}

inline ojson points_json(const WignerFrame& frame) {
  ojson pts = ojson::array();
  for (std::size_t i = 0; i < frame.point_count(); ++i)
    pts.push_back(point_at(frame.space(), i).coords);
  return pts;
}

}  // namespace detail

struct Invocation {
  std::string frame;
  std::string subtheory;
  std::string channel;
  std::string state;
  std::string pair;
  std::string model = "wigner";
  std::string output = "text";
  double tol = kDefaultTol;
  std::uint64_t seed = 2718281828;
};

namespace detail {

inline int cmd_frames(const Invocation& inv, std::ostream& out) {
  const std::vector<std::array<std::string, 3>> rows = {{"wg-plus", "2", "1"},
                                                        {"wg-minus", "2", "1"},
                                                        {"gross", "3", "1"},
                                                        {"wg-multi", "2", "2"}};
  if (inv.output == "json") {
    ojson j;
    ojson list = ojson::array();
    for (const auto& r : rows)
      list.push_back({{"label", r[0]}, {"d", std::stoi(r[1])}, {"n", std::stoi(r[2])}});
    j["frames"] = std::move(list);
    j["custom"] = "custom:<gamma.json>";
    out << j.dump(2) << "\n";
  } else {
    for (const auto& r : rows) out << r[0] << "  (d=" << r[1] << ", n=" << r[2] << ")\n";
    out << "custom:<gamma.json>\n";
  }
  return kExitClassical;
}

inline int cmd_subtheories(const Invocation& inv, std::ostream& out) {
  const std::vector<std::array<std::string, 2>> rows = {
      {"qubit-stab", "6 states, 24 clifford channels, X/Y/Z measurements"},
      {"qutrit-stab", "12 states, 216 clifford channels, X/Z/XZ/XZ2 measurements"},
      {"2qubit-stab", "60 states, 11520 clifford channels, two-qubit Pauli measurements"}};
  if (inv.output == "json") {
    ojson j;
    ojson list = ojson::array();
    for (const auto& r : rows) list.push_back({{"label", r[0]}, {"summary", r[1]}});
    j["subtheories"] = std::move(list);
    j["custom"] = "custom:<dir> with states/*.json, channels/*.json, povms/*.json";
    out << j.dump(2) << "\n";
  } else {
    for (const auto& r : rows) out << r[0] << "  " << r[1] << "\n";
    out << "custom:<dir>\n";
  }
  return kExitClassical;
}

inline int cmd_wigner(const Invocation& inv, std::ostream& out) {
  if (inv.channel.empty() == inv.state.empty())
    throw ValidationError("wigner: provide exactly one of --state or --channel");
  const WignerFrame frame = resolve_frame(inv.frame);

  ojson j;
  j["frame"] = frame.label();
  std::vector<double> values;
  if (!inv.state.empty()) {
    const ComplexMatrix rho = resolve_state(inv.state, frame.dim());
    values = wigner_of_state(frame, rho).values;
    j["kind"] = "state";
    j["target"] = inv.state;
    j["points"] = points_json(frame);
    j["values"] = values;
  } else {
    const KrausChannel channel = resolve_channel(inv.channel, frame.dim());
    const WignerChannelMatrix w = wigner_of_channel(frame, channel);
    values = w.values;
    j["kind"] = "channel";
    j["target"] = inv.channel;
    j["points"] = points_json(frame);
    ojson rows = ojson::array();
    for (std::size_t to = 0; to < w.size; ++to) {
      ojson row = ojson::array();
      for (std::size_t from = 0; from < w.size; ++from) row.push_back(w(to, from));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  }
  const double neg = negativity(values);
  const bool nonneg = min_entry(values) >= -kNegativityTol;
  j["negativity"] = neg;
  j["min_entry"] = min_entry(values);
  j["status"] = nonneg ? "non-negative" : "negative";

  if (inv.output == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << "frame: " << frame.label() << "\n";
    out << "target: " << (inv.state.empty() ? inv.channel : inv.state) << "\n";
    if (!inv.state.empty()) out << format_values(frame, values);
    out << "negativity: " << neg << "\n";
    out << "status: " << (nonneg ? "non-negative" : "negative") << "\n";
  }
  return nonneg ? kExitClassical : kExitWitness;
}

inline int cmd_covariance(const Invocation& inv, std::ostream& out) {
  const WignerFrame frame = resolve_frame(inv.frame);
  if (inv.channel.empty()) throw ValidationError("covariance: --channel is required");
  const KrausChannel channel = resolve_channel(inv.channel, frame.dim());
  CovarianceOptions options;
  options.tol = inv.tol;
  options.seed = inv.seed;
  const CovarianceCertificate cert = check_channel_covariance(frame, channel, options);

  if (inv.output == "json") {
    ojson j;
    j["frame"] = frame.label();
    j["channel"] = inv.channel;
    j["certificate"] = certificate_to_json(cert);
    out << j.dump(2) << "\n";
  } else {
    out << "frame: " << frame.label() << "\n";
    out << "channel: " << inv.channel << "\n";
    out << "status: " << (cert.covariant ? "covariant" : "non-covariant") << "\n";
    if (cert.affine) {
      out << "S:";
      for (std::size_t r = 0; r < cert.affine->linear.rows; ++r) {
        out << " [";
        for (std::size_t c = 0; c < cert.affine->linear.cols; ++c)
          out << (c ? "," : "") << cert.affine->linear(r, c);
        out << "]";
      }
      out << "\na: " << format_point(cert.affine->shift) << "\n";
    }
    if (cert.witness) out << "witness: " << format_point(*cert.witness) << "\n";
    if (!cert.note.empty()) out << "note: " << cert.note << "\n";
    out << "method: " << cert.method << "\n";
  }
  return cert.covariant ? kExitClassical : kExitWitness;
}

inline int cmd_positivity(const Invocation& inv, std::ostream& out) {
  const WignerFrame frame = resolve_frame(inv.frame);
  const Subtheory sub = resolve_subtheory(inv.subtheory);
  const PositivityVerdict verdict = check_positivity_preservation(frame, sub, inv.tol);

  if (inv.output == "json") {
    ojson j;
    j["frame"] = frame.label();
    j["subtheory"] = sub.label;
    j["positivity"] = positivity_to_json(verdict);
    out << j.dump(2) << "\n";
  } else {
    out << "frame: " << frame.label() << "\n";
    out << "subtheory: " << sub.label << "\n";
    out << "status: " << (verdict.preserving ? "preserving" : "violated") << "\n";
    out << "min wigner entry: " << verdict.min_value << "\n";
    if (!verdict.preserving) {
      out << "witness: transformation " << verdict.worst_transformation << " on state "
          << verdict.worst_state;
      if (verdict.worst_point) out << " at " << format_point(*verdict.worst_point);
      out << "\n";
    }
  }
  return verdict.preserving ? kExitClassical : kExitWitness;
}

inline int cmd_tnc(const Invocation& inv, std::ostream& out) {
  if (inv.pair.empty()) throw ValidationError("tnc: --pair is required");
  if (inv.model != "8state" && inv.model != "wigner")
    throw ValidationError("tnc: --model must be 8state or wigner");

  ojson j;
  j["model"] = inv.model;

  if (inv.model == "8state") {
    Subtheory sub = resolve_subtheory(inv.subtheory.empty() ? "qubit-stab" : inv.subtheory);
    if (sub.dim != 2) throw ValidationError("tnc: the 8state model requires a qubit subtheory");
    const auto [spec_a, spec_b] = split_pair(inv.pair);
    const KrausChannel a = resolve_channel(spec_a, 2);
    const KrausChannel b = resolve_channel(spec_b, 2);
    sub.transformations.push_back(a);
    sub.transformations.push_back(b);
    const OntologicalModel model = build_8state_model(sub);
    const TncVerdict verdict =
        check_transformation_noncontextuality(model, {{a, b}}, inv.tol);
    j["subtheory"] = sub.label;
    j["pair"] = ojson::array({spec_a, spec_b});
    j["verdict"] = tnc_verdict_to_json(verdict);
    if (inv.output == "json") {
      out << j.dump(2) << "\n";
    } else {
      out << "model: 8state\npair: " << spec_a << " vs " << spec_b << "\n";
      out << "status: " << (verdict.noncontextual ? "noncontextual" : "contextual") << "\n";
      out << "max discrepancy: " << verdict.max_discrepancy << "\n";
    }
    return verdict.noncontextual ? kExitClassical : kExitWitness;
  }

  // Wigner-representation model.
  if (inv.frame.empty()) throw ValidationError("tnc: --frame is required for the wigner model");
  if (inv.subtheory.empty())
    throw ValidationError("tnc: --subtheory is required for the wigner model");
  const WignerFrame frame = resolve_frame(inv.frame);
  Subtheory sub = resolve_subtheory(inv.subtheory);
  const auto [spec_a, spec_b] = split_pair(inv.pair);
  const KrausChannel a = resolve_channel(spec_a, frame.dim());
  const KrausChannel b = resolve_channel(spec_b, frame.dim());
  sub.transformations.push_back(a);
  sub.transformations.push_back(b);
  const WignerModelResult result = build_wigner_model(frame, sub, inv.tol);
  j["frame"] = frame.label();
  j["subtheory"] = sub.label;
  j["pair"] = ojson::array({spec_a, spec_b});
  if (!result.built()) {
    j["verdict"] = {{"status", "not-representable"}};
    ojson obstructions = ojson::array();
    for (std::size_t i = 0; i < result.obstructions.size() && i < 8; ++i)
      obstructions.push_back(obstruction_to_json(result.obstructions[i], frame.space()));
    j["obstructions"] = std::move(obstructions);
    if (inv.output == "json") {
      out << j.dump(2) << "\n";
    } else {
      out << "model: wigner\nstatus: not-representable (negative entries)\n";
      for (std::size_t i = 0; i < result.obstructions.size() && i < 8; ++i) {
        const Obstruction& o = result.obstructions[i];
        out << "  " << o.kind << " " << o.label << " at "
            << format_point(point_at(frame.space(), o.point)) << " value " << o.value << "\n";
      }
    }
    return kExitWitness;
  }
  const TncVerdict verdict = check_transformation_noncontextuality(*result.model, {{a, b}}, inv.tol);
  j["verdict"] = tnc_verdict_to_json(verdict);
  if (inv.output == "json") {
    out << j.dump(2) << "\n";
  } else {
    out << "model: wigner\npair: " << spec_a << " vs " << spec_b << "\n";
    out << "status: " << (verdict.noncontextual ? "noncontextual" : "contextual") << "\n";
    out << "max discrepancy: " << verdict.max_discrepancy << "\n";
  }
  return verdict.noncontextual ? kExitClassical : kExitWitness;
}

inline int cmd_theorems(const Invocation& inv, std::ostream& out) {
  const WignerFrame frame = resolve_frame(inv.frame);
  const Subtheory sub = resolve_subtheory(inv.subtheory);
  if (frame.dim() != sub.dim)
    throw ValidationError("theorems: frame dimension " + std::to_string(frame.dim()) +
                          " does not match subtheory dimension " + std::to_string(sub.dim));
  CovarianceOptions options;
  options.tol = inv.tol;
  options.seed = inv.seed;
  const ClassicalityReport report = build_classicality_report(frame, sub, options);

  if (inv.output == "json") {
    out << classicality_report_to_json(report, frame.space()).dump(2) << "\n";
  } else {
    out << "subtheory: " << report.subtheory << "\nframe: " << report.frame << "\n";
    out << "covariance: " << (report.all_covariant ? "all covariant" : "broken") << "\n";
    if (!report.all_covariant && report.theorem1.first_noncovariant)
      out << "  first non-covariant: " << *report.theorem1.first_noncovariant << "\n";
    out << "tnc (wigner model): "
        << (report.wigner_model_built ? "noncontextual" : "not-representable") << "\n";
    if (report.eight_state_tnc)
      out << "tnc (8-state, eps1 vs eps2): "
          << (report.eight_state_tnc->noncontextual ? "noncontextual" : "contextual")
          << " (max discrepancy " << report.eight_state_tnc->max_discrepancy << ")\n";
    out << "positivity: " << (report.positivity.preserving ? "preserving" : "violated") << "\n";
    out << "theorem1 equivalence: " << (report.theorem1.equivalence_holds ? "holds" : "FAILS")
        << "\n";
    out << "theorem2 implication: " << (report.theorem2.implication_holds ? "holds" : "FAILS")
        << (report.theorem2.converse_counterexample ? " (converse counterexample shown)" : "")
        << "\n";
    out << "theorem3 implication: " << (report.theorem3.implication_holds ? "holds" : "FAILS")
        << (report.theorem3.converse_counterexample ? " (converse counterexample shown)" : "")
        << "\n";
    out << "verdict: " << (report.classical() ? "classical" : "nonclassical") << "\n";
  }
  return report.classical() ? kExitClassical : kExitWitness;
}

}  // namespace detail

/// Parses argv (without the program name) and runs one command.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phase-space classicality toolkit"};
  app.require_subcommand(1);

  Invocation inv;
  const auto add_common = [&](CLI::App* cmd, bool frame, bool subtheory, bool channel,
                              bool state, bool pair, bool model) {
    if (frame) cmd->add_option("--frame", inv.frame, "frame label");
    if (subtheory) cmd->add_option("--subtheory", inv.subtheory, "subtheory label");
    if (channel) cmd->add_option("--channel", inv.channel, "channel specifier");
    if (state) cmd->add_option("--state", inv.state, "state specifier");
    if (pair) cmd->add_option("--pair", inv.pair, "two channel specifiers, comma separated");
    if (model) cmd->add_option("--model", inv.model, "ontological model: 8state or wigner");
    cmd->add_option("--output", inv.output, "output mode: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--tol", inv.tol, "tolerance override");
    cmd->add_option("--seed", inv.seed, "seed for remix spot checks");
  };

  CLI::App* frames = app.add_subcommand("frames", "list built-in frames");
  add_common(frames, false, false, false, false, false, false);
  CLI::App* subtheories = app.add_subcommand("subtheories", "list built-in subtheories");
  add_common(subtheories, false, false, false, false, false, false);
  CLI::App* wigner = app.add_subcommand("wigner", "phase-space representation of a state or channel");
  add_common(wigner, true, false, true, true, false, false);
  wigner->get_option("--frame")->required();
  CLI::App* covariance = app.add_subcommand("covariance", "covariance certificate for a channel");
  add_common(covariance, true, false, true, false, false, false);
  covariance->get_option("--frame")->required();
  CLI::App* positivity = app.add_subcommand("positivity", "positivity preservation audit");
  add_common(positivity, true, true, false, false, false, false);
  positivity->get_option("--frame")->required();
  positivity->get_option("--subtheory")->required();
  CLI::App* tnc = app.add_subcommand("tnc", "transformation noncontextuality test");
  add_common(tnc, true, true, false, false, true, true);
  tnc->get_option("--pair")->required();
  CLI::App* theorems = app.add_subcommand("theorems", "full classicality report");
  add_common(theorems, true, true, false, false, false, false);
  theorems->get_option("--frame")->required();
  theorems->get_option("--subtheory")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClassical : kExitUsage;
  }

  try {
    if (frames->parsed()) return detail::cmd_frames(inv, out);
    if (subtheories->parsed()) return detail::cmd_subtheories(inv, out);
    if (wigner->parsed()) return detail::cmd_wigner(inv, out);
    if (covariance->parsed()) return detail::cmd_covariance(inv, out);
    if (positivity->parsed()) return detail::cmd_positivity(inv, out);
    if (tnc->parsed()) return detail::cmd_tnc(inv, out);
    if (theorems->parsed()) return detail::cmd_theorems(inv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace psc::cli
