#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "psc/channels.hpp"
#include "psc/parallel.hpp"
#include "psc/phase_space.hpp"
#include "psc/subtheory.hpp"
#include "psc/weyl_frame.hpp"

namespace psc {

// Values in (-kNegativityTol, 0) are floating-point dust, clamped to zero
// before any stochasticity or classicality verdict.
inline constexpr double kNegativityTol = 1e-9;

inline void clamp_dust(std::vector<double>& values, double tol = kNegativityTol) {
  for (double& v : values)
    if (v < 0.0 && v >= -tol) v = 0.0;
}

//--------------------------------------------------------------------------
// Covariance certification
//--------------------------------------------------------------------------

struct CovarianceCertificate {
  std::string target;
  bool covariant = false;

  // Unitary targets: the fitted affine symplectic motion.
  std::optional<AffineSymplectic> affine;
  // First phase-space point where point-mass matching fails.
  std::optional<PhasePoint> witness;
  std::string note;

  struct KrausEntry {
    std::size_t index = 0;
    bool covariant = false;
    std::optional<AffineSymplectic> affine;
    std::optional<PhasePoint> witness;
  };
  std::vector<KrausEntry> per_kraus;

  bool decomposition_unitary = false;
  bool decomposition_checked = false;
  bool channel_matrix_nonnegative = false;
  double channel_matrix_negativity = 0.0;
  bool kraus_ops_all_permutation = false;

  int remix_trials = 0;
  int remix_informative = 0;
  bool remix_consistent = true;

  std::string method;
};

namespace detail {

// For a failed qubit point, name the catalog operator the image landed on.
inline std::string describe_qubit_image(const WignerFrame& frame, const ComplexMatrix& image,
                                        const PhasePoint& at) {
  if (frame.space().d != 2 || frame.space().n != 1) return {};
  for (int sx : {+1, -1})
    for (int sy : {+1, -1})
      for (int sz : {+1, -1}) {
        const WignerFrame other = wootters_qubit_frame(sx, sy, sz);
        for (std::size_t i = 0; i < other.point_count(); ++i) {
          if (frob_dist(image, other.phase_point(i)) < 1e-8 &&
              !(other.label() == frame.label())) {
            return "image of A" + format_point(at) + " equals A" +
                   format_point(point_at(other.space(), i)) + " of frame " + other.label() +
                   ", outside this frame";
          }
        }
      }
  return "image of A" + format_point(at) + " leaves the phase-point basis";
}

}  // namespace detail

/// Tests U A(lambda) U^dag = A(S lambda + a) for all lambda. The point map is
/// read off from the A-basis expansion of each conjugated operator (a 0/1
/// point mass when covariant), then (S, a) is fitted from the images of the
/// origin and the unit vectors and verified on every point.
inline CovarianceCertificate check_unitary_covariance(const WignerFrame& frame,
                                                      const ComplexMatrix& u,
                                                      std::string label = "unitary",
                                                      double tol = kDefaultTol) {
  if (u.rows() != frame.dim() || u.cols() != frame.dim())
    throw ShapeError("check_unitary_covariance: dimension mismatch");
  if (!is_unitary(u, std::max(tol, kDefaultTol)))
    throw ValidationError("check_unitary_covariance: input is not unitary");

  CovarianceCertificate cert;
  cert.target = std::move(label);
  cert.method = "point-mass-expansion+affine-fit";
  const PhaseSpace& space = frame.space();
  const std::size_t count = frame.point_count();
  const ComplexMatrix udag = dagger(u);

  std::vector<std::size_t> map(count);
  for (std::size_t from = 0; from < count; ++from) {
    const ComplexMatrix image = matmul(matmul(u, frame.phase_point(from)), udag);
    const std::vector<double> coeffs = wigner_coefficients(frame, image);
    std::size_t best = 0;
    for (std::size_t j = 1; j < count; ++j)
      if (coeffs[j] > coeffs[best]) best = j;
    bool point_mass = std::abs(coeffs[best] - 1.0) <= tol;
    for (std::size_t j = 0; j < count && point_mass; ++j)
      if (j != best && std::abs(coeffs[j]) > tol) point_mass = false;
    if (!point_mass) {
      cert.covariant = false;
      cert.witness = point_at(space, from);
      cert.note = detail::describe_qubit_image(frame, image, *cert.witness);
      return cert;
    }
    map[from] = best;
  }

  // Fit a = image of the origin, S columns from images of the unit vectors.
  const std::size_t m = 2 * static_cast<std::size_t>(space.n);
  const PhasePoint origin(std::vector<int>(m, 0));
  const PhasePoint a = point_at(space, map[point_index(space, origin)]);
  IntMatrix s(m, m);
  for (std::size_t col = 0; col < m; ++col) {
    std::vector<int> unit(m, 0);
    unit[col] = 1;
    const PhasePoint image = point_at(space, map[point_index(space, PhasePoint(unit))]);
    for (std::size_t row = 0; row < m; ++row)
      s(row, col) = imod(image.coords[row] - a.coords[row], space.d);
  }

  if (!is_symplectic(space, s)) {
    cert.covariant = false;
    cert.note = "fitted point map is not symplectic";
    return cert;
  }
  const AffineSymplectic affine = make_affine(space, s, a);
  for (std::size_t from = 0; from < count; ++from) {
    const PhasePoint expected = apply_affine(space, affine, point_at(space, from));
    if (point_index(space, expected) != map[from]) {
      cert.covariant = false;
      cert.witness = point_at(space, from);
      cert.note = "point map is a permutation but not affine";
      return cert;
    }
  }
  cert.covariant = true;
  cert.affine = affine;
  return cert;
}

struct CovarianceOptions {
  double tol = kDefaultTol;
  int remix_trials = 8;
  std::uint64_t seed = 2718281828;
};

/// Covariance certificate for a CPTP map. Two-part decidable certificate:
/// (a) when the given decomposition is proportional-unitary, every factor is
///     tested for unitary covariance (equivalently, its phase-space matrix is
///     a 0/1 permutation);
/// (b) the channel's phase-space matrix must be entrywise non-negative.
/// The quantification over all unitary Kraus decompositions is additionally
/// spot-checked on a finite number of random remixings.
inline CovarianceCertificate check_channel_covariance(const WignerFrame& frame,
                                                      const KrausChannel& channel,
                                                      const CovarianceOptions& options = {}) {
  CovarianceCertificate cert;
  cert.target = channel.label();

  const WignerChannelMatrix matrix = wigner_of_channel(frame, channel);
  cert.channel_matrix_negativity = negativity(matrix);
  cert.channel_matrix_nonnegative = min_entry(matrix.values) >= -kNegativityTol;

  const UnitaryKrausReport factors = unitary_kraus_decomposition(channel, options.tol);
  cert.decomposition_unitary = factors.proportional_unitary;
  cert.decomposition_checked = factors.proportional_unitary;

  if (factors.proportional_unitary) {
    cert.kraus_ops_all_permutation = true;
    for (std::size_t k = 0; k < factors.unitaries.size(); ++k) {
      CovarianceCertificate sub = check_unitary_covariance(
          frame, factors.unitaries[k], channel.label() + "[" + std::to_string(k) + "]",
          options.tol);
      if (!sub.covariant) cert.kraus_ops_all_permutation = false;
      if (!sub.covariant && cert.note.empty()) cert.note = sub.note;
      if (!cert.witness && sub.witness) cert.witness = sub.witness;
      cert.per_kraus.push_back({k, sub.covariant, sub.affine, sub.witness});
    }
    cert.covariant = cert.channel_matrix_nonnegative && cert.kraus_ops_all_permutation;
    if (channel.kraus_ops().size() == 1 && cert.per_kraus.front().affine)
      cert.affine = cert.per_kraus.front().affine;
    cert.method = "theorem-certificate:channel-nonnegativity+per-operator-permutation";
  } else {
    cert.covariant = cert.channel_matrix_nonnegative;
    cert.method = "theorem-certificate:channel-nonnegativity"
                  ";decomposition-check-skipped(kraus-operators-not-proportional-unitary)";
    if (factors.counterexample_index)
      cert.note = "kraus operator " + std::to_string(*factors.counterexample_index) +
                  " is not proportional to a unitary";
  }

  // Random remix spot checks of the decomposition quantifier.
  std::mt19937_64 rng(options.seed);
  cert.remix_trials = options.remix_trials;
  for (int t = 0; t < options.remix_trials; ++t) {
    const std::size_t m = channel.kraus_ops().size();
    const KrausChannel mixed = remix_kraus(channel, random_unitary(m, rng));
    const WignerChannelMatrix mixed_matrix = wigner_of_channel(frame, mixed);
    double drift = 0.0;
    for (std::size_t i = 0; i < matrix.values.size(); ++i)
      drift = std::max(drift, std::abs(matrix.values[i] - mixed_matrix.values[i]));
    if (drift > 1e-8) cert.remix_consistent = false;

    const UnitaryKrausReport mixed_factors = unitary_kraus_decomposition(mixed, options.tol);
    if (mixed_factors.proportional_unitary) {
      ++cert.remix_informative;
      bool all_cov = true;
      for (const auto& uk : mixed_factors.unitaries)
        if (!check_unitary_covariance(frame, uk, "remixed", options.tol).covariant)
          all_cov = false;
      const bool expected = cert.channel_matrix_nonnegative && all_cov;
      if (expected != cert.covariant) cert.remix_consistent = false;
    }
  }
  cert.method += ";remix-spot-checks=" + std::to_string(options.remix_trials);
  return cert;
}

//--------------------------------------------------------------------------
// Ontological models
//--------------------------------------------------------------------------

struct StochasticMatrix {
  std::size_t size = 0;
  std::vector<double> values;  // row-major, entry (to, from)

  StochasticMatrix() = default;
  explicit StochasticMatrix(std::size_t n) : size(n), values(n * n, 0.0) {}
  double operator()(std::size_t to, std::size_t from) const { return values[to * size + from]; }
  double& at(std::size_t to, std::size_t from) { return values[to * size + from]; }
};

/// An ontic space with state distributions, transition matrices and response
/// functions reproducing a subtheory's statistics by total probability.
struct OntologicalModel {
  std::string kind;  // "wigner" or "8state"
  std::size_t ontic_size = 0;
  std::map<std::string, std::vector<double>> state_dists;
  std::map<std::string, StochasticMatrix> transition_mats;
  std::map<std::string, std::vector<std::vector<double>>> response_fns;  // povm -> outcomes
};

inline void validate_model(const OntologicalModel& model, double tol = kDefaultTol) {
  for (const auto& [label, mu] : model.state_dists) {
    double sum = 0.0;
    for (double v : mu) {
      if (v < 0.0) throw ValidationError("model state '" + label + "' has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw ValidationError("model state '" + label + "' is not normalized");
  }
  for (const auto& [label, gamma] : model.transition_mats) {
    for (double v : gamma.values)
      if (v < 0.0)
        throw ValidationError("model transition '" + label + "' has a negative entry");
    for (std::size_t from = 0; from < gamma.size; ++from) {
      double col = 0.0;
      for (std::size_t to = 0; to < gamma.size; ++to) col += gamma(to, from);
      if (std::abs(col - 1.0) > tol)
        throw ValidationError("model transition '" + label + "' is not column stochastic");
    }
  }
  for (const auto& [label, outcomes] : model.response_fns) {
    std::vector<double> total(model.ontic_size, 0.0);
    for (const auto& xi : outcomes)
      for (std::size_t i = 0; i < xi.size(); ++i) {
        if (xi[i] < -tol || xi[i] > 1.0 + tol)
          throw ValidationError("model response '" + label + "' leaves [0,1]");
        total[i] += xi[i];
      }
    for (double v : total)
      if (std::abs(v - 1.0) > tol)
        throw ValidationError("model responses for '" + label + "' do not sum to 1 pointwise");
  }
}

struct StatisticsReport {
  double max_error = 0.0;
  std::string worst_triple;
  bool ok(double tol = 1e-8) const { return max_error <= tol; }
};

/// Classical total probability against the Born rule on every
/// (state, transformation, outcome) triple of the subtheory.
inline StatisticsReport check_model_statistics(const OntologicalModel& model,
                                               const Subtheory& sub) {
  StatisticsReport report;
  for (const auto& state : sub.states) {
    const auto& mu = model.state_dists.at(state.label);
    for (const auto& channel : sub.transformations) {
      const auto& gamma = model.transition_mats.at(channel.label());
      std::vector<double> pushed(model.ontic_size, 0.0);
      for (std::size_t to = 0; to < model.ontic_size; ++to) {
        double acc = 0.0;
        for (std::size_t from = 0; from < model.ontic_size; ++from)
          acc += gamma(to, from) * mu[from];
        pushed[to] = acc;
      }
      const ComplexMatrix image = apply(channel, state.rho);
      for (const auto& povm : sub.povms) {
        const auto& outcomes = model.response_fns.at(povm.label);
        for (std::size_t k = 0; k < povm.effects.size(); ++k) {
          double p_model = 0.0;
          for (std::size_t i = 0; i < model.ontic_size; ++i) p_model += outcomes[k][i] * pushed[i];
          const double p_born = trace(matmul(image, povm.effects[k])).real();
          const double err = std::abs(p_model - p_born);
          if (err > report.max_error) {
            report.max_error = err;
            report.worst_triple =
                state.label + " / " + channel.label() + " / " + povm.label + ":" +
                std::to_string(k);
          }
        }
      }
    }
  }
  return report;
}

struct Obstruction {
  std::string kind;   // "state", "transformation", "effect"
  std::string label;  // object label (povm label gets ":outcome" appended)
  std::size_t point = 0;
  double value = 0.0;
};

struct WignerModelResult {
  std::optional<OntologicalModel> model;
  std::vector<Obstruction> obstructions;
  bool built() const { return model.has_value(); }
};

/// The ontological model induced by the Wigner representation: mu from the
/// state functions, Gamma from the channel matrices, xi from the effect
/// functions. Succeeds iff every entry is non-negative within tolerance;
/// otherwise the negative entries are returned as obstruction witnesses.
inline WignerModelResult build_wigner_model(const WignerFrame& frame, const Subtheory& sub,
                                            double tol = kNegativityTol) {
  if (sub.frame_tag && *sub.frame_tag != frame.label())
    throw PreconditionError("build_wigner_model: subtheory is tagged for frame '" +
                            *sub.frame_tag + "', not '" + frame.label() + "'");
  if (sub.dim != frame.dim())
    throw ShapeError("build_wigner_model: subtheory dimension does not match frame");

  WignerModelResult result;
  OntologicalModel model;
  model.kind = "wigner";
  model.ontic_size = frame.point_count();

  const auto record = [&](const std::string& kind, const std::string& label,
                          const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] < -tol) result.obstructions.push_back({kind, label, i, values[i]});
  };

  for (const auto& state : sub.states) {
    std::vector<double> mu = wigner_of_state(frame, state.rho).values;
    record("state", state.label, mu);
    clamp_dust(mu, tol);
    model.state_dists[state.label] = std::move(mu);
  }

  std::vector<WignerChannelMatrix> matrices(sub.transformations.size());
  parallel_for(sub.transformations.size(), [&](std::size_t i) {
    matrices[i] = wigner_of_channel(frame, sub.transformations[i]);
  });
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    record("transformation", sub.transformations[i].label(), matrices[i].values);
    clamp_dust(matrices[i].values, tol);
    StochasticMatrix gamma(frame.point_count());
    gamma.values = std::move(matrices[i].values);
    model.transition_mats[sub.transformations[i].label()] = std::move(gamma);
  }

  for (const auto& povm : sub.povms) {
    std::vector<std::vector<double>> outcomes;
    for (std::size_t k = 0; k < povm.effects.size(); ++k) {
      std::vector<double> xi = wigner_of_effect(frame, povm.effects[k]).values;
      record("effect", povm.label + ":" + std::to_string(k), xi);
      clamp_dust(xi, tol);
      outcomes.push_back(std::move(xi));
    }
    model.response_fns[povm.label] = std::move(outcomes);
  }

  if (result.obstructions.empty()) {
    validate_model(model);
    result.model = std::move(model);
  }
  return result;
}

/// The 8-state model of the single-qubit stabilizer theory: ontic space
/// Lambda x {+,-} ordered plus-sector first. States and effects average the
/// two Wigner functions; a transformation given as proportional-unitary
/// Kraus operators c_k U_k with Clifford U_k becomes the mixture
/// sum_k c_k^2 P_{U_k} of basis permutations.
inline OntologicalModel build_8state_model(const Subtheory& sub) {
  if (sub.dim != 2) throw PreconditionError("build_8state_model: requires a qubit subtheory");

  const WignerFrame plus = wg_plus();
  const WignerFrame minus = wg_minus();
  const std::array<const WignerFrame*, 2> frames = {&plus, &minus};

  std::vector<ComplexMatrix> basis;  // the eight phase-point operators
  for (const WignerFrame* f : frames)
    for (std::size_t i = 0; i < 4; ++i) basis.push_back(f->phase_point(i));

  OntologicalModel model;
  model.kind = "8state";
  model.ontic_size = 8;

  for (const auto& state : sub.states) {
    std::vector<double> mu(8, 0.0);
    for (int sector = 0; sector < 2; ++sector) {
      const std::vector<double> w = wigner_of_state(*frames[sector], state.rho).values;
      for (std::size_t i = 0; i < 4; ++i) mu[sector * 4 + i] = 0.5 * w[i];
    }
    clamp_dust(mu);
    model.state_dists[state.label] = std::move(mu);
  }

  for (const auto& povm : sub.povms) {
    std::vector<std::vector<double>> outcomes;
    for (const auto& effect : povm.effects) {
      std::vector<double> xi(8, 0.0);
      for (int sector = 0; sector < 2; ++sector) {
        const std::vector<double> w = wigner_of_effect(*frames[sector], effect).values;
        for (std::size_t i = 0; i < 4; ++i) xi[sector * 4 + i] = w[i];
      }
      clamp_dust(xi);
      outcomes.push_back(std::move(xi));
    }
    model.response_fns[povm.label] = std::move(outcomes);
  }

  for (const auto& channel : sub.transformations) {
    const UnitaryKrausReport factors = unitary_kraus_decomposition(channel);
    if (!factors.proportional_unitary)
      throw UnsupportedTransformationError(
          "build_8state_model: transformation '" + channel.label() +
          "' has no proportional-unitary Kraus decomposition");
    StochasticMatrix gamma(8);
    for (std::size_t k = 0; k < factors.unitaries.size(); ++k) {
      const ComplexMatrix& u = factors.unitaries[k];
      const double weight = factors.scales[k] * factors.scales[k];
      const ComplexMatrix udag = dagger(u);
      for (std::size_t from = 0; from < 8; ++from) {
        const ComplexMatrix image = matmul(matmul(u, basis[from]), udag);
        std::size_t to = 8;
        for (std::size_t j = 0; j < 8; ++j)
          if (frob_dist(image, basis[j]) < 1e-8) {
            to = j;
            break;
          }
        if (to == 8)
          throw UnsupportedTransformationError(
              "build_8state_model: operator " + std::to_string(k) + " of '" + channel.label() +
              "' does not permute the eight phase-point operators (not Clifford)");
        gamma.at(to, from) += weight;
      }
    }
    model.transition_mats[channel.label()] = std::move(gamma);
  }

  validate_model(model);
  return model;
}

//--------------------------------------------------------------------------
// Transformation noncontextuality and positivity preservation
//--------------------------------------------------------------------------

struct TncVerdict {
  bool noncontextual = true;
  double max_discrepancy = 0.0;
  std::optional<std::pair<std::string, std::string>> distinguishing_pair;
};

/// Compares the ontic transition matrices of operationally equivalent
/// transformation procedures. Every pair is first verified Choi-equal;
/// comparing inequivalent procedures is meaningless and is a precondition
/// error.
inline TncVerdict check_transformation_noncontextuality(
    const OntologicalModel& model,
    const std::vector<std::pair<KrausChannel, KrausChannel>>& pairs,
    double choi_tol = kDefaultTol, double tol = kNegativityTol) {
  TncVerdict verdict;
  for (const auto& [a, b] : pairs) {
    if (!channels_equal(a, b, choi_tol))
      throw PreconditionError("tnc: procedures '" + a.label() + "' and '" + b.label() +
                              "' are not operationally equivalent");
    const auto ita = model.transition_mats.find(a.label());
    const auto itb = model.transition_mats.find(b.label());
    if (ita == model.transition_mats.end() || itb == model.transition_mats.end())
      throw PreconditionError("tnc: both procedures must be represented in the model");
    double diff = 0.0;
    for (std::size_t i = 0; i < ita->second.values.size(); ++i)
      diff = std::max(diff, std::abs(ita->second.values[i] - itb->second.values[i]));
    if (diff > verdict.max_discrepancy) {
      verdict.max_discrepancy = diff;
      if (diff > tol) verdict.distinguishing_pair = {a.label(), b.label()};
    }
  }
  verdict.noncontextual = verdict.max_discrepancy <= tol;
  return verdict;
}

struct PositivityVerdict {
  bool preserving = false;
  double min_value = 0.0;
  std::string worst_transformation;
  std::string worst_state;
  std::optional<PhasePoint> worst_point;
};

/// Definition check: every transformation must map every (non-negatively
/// represented) state of the subtheory to a non-negatively represented state.
inline PositivityVerdict check_positivity_preservation(const WignerFrame& frame,
                                                       const Subtheory& sub,
                                                       double tol = kNegativityTol) {
  for (const auto& state : sub.states) {
    const double m = min_entry(wigner_of_state(frame, state.rho).values);
    if (m < -tol)
      throw PreconditionError("positivity: state '" + state.label +
                              "' is already negatively represented in frame '" + frame.label() +
                              "'");
  }

  struct Worst {
    double value = 1e300;
    std::size_t state = 0, point = 0;
  };
  std::vector<Worst> per_channel(sub.transformations.size());
  parallel_for(sub.transformations.size(), [&](std::size_t c) {
    Worst w;
    for (std::size_t s = 0; s < sub.states.size(); ++s) {
      const ComplexMatrix image = apply(sub.transformations[c], sub.states[s].rho);
      const std::vector<double> values = wigner_coefficients(frame, image);
      for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < w.value) w = {values[i], s, i};
    }
    per_channel[c] = w;
  });

  PositivityVerdict verdict;
  verdict.min_value = 1e300;
  for (std::size_t c = 0; c < per_channel.size(); ++c) {
    if (per_channel[c].value < verdict.min_value) {
      verdict.min_value = per_channel[c].value;
      verdict.worst_transformation = sub.transformations[c].label();
      verdict.worst_state = sub.states[per_channel[c].state].label;
      verdict.worst_point = point_at(frame.space(), per_channel[c].point);
    }
  }
  if (sub.transformations.empty() || sub.states.empty()) verdict.min_value = 0.0;
  verdict.preserving = verdict.min_value >= -tol;
  return verdict;
}

//--------------------------------------------------------------------------
// Theorem verifiers
//--------------------------------------------------------------------------

struct Theorem1Report {
  bool all_covariant = false;
  bool wigner_model_built = false;
  bool equivalence_holds = false;
  std::optional<std::string> first_noncovariant;
  std::optional<std::string> first_obstruction;
};

/// Checks the biconditional: the subtheory is covariantly represented iff
/// the Wigner representation itself is a (noncontextual) ontological model,
/// i.e. build_wigner_model succeeds.
inline Theorem1Report verify_theorem1(const WignerFrame& frame, const Subtheory& sub,
                                      const CovarianceOptions& options = {}) {
  Theorem1Report report;
  std::vector<CovarianceCertificate> certs(sub.transformations.size());
  parallel_for(sub.transformations.size(), [&](std::size_t i) {
    certs[i] = check_channel_covariance(frame, sub.transformations[i], options);
  });
  report.all_covariant = true;
  for (const auto& cert : certs)
    if (!cert.covariant) {
      report.all_covariant = false;
      if (!report.first_noncovariant) report.first_noncovariant = cert.target;
    }

  const WignerModelResult model = build_wigner_model(frame, sub);
  report.wigner_model_built = model.built();
  if (!model.obstructions.empty()) {
    const Obstruction& o = model.obstructions.front();
    report.first_obstruction =
        o.kind + " '" + o.label + "' at point " +
        format_point(point_at(frame.space(), o.point)) + " with value " + std::to_string(o.value);
  }
  report.equivalence_holds = report.all_covariant == report.wigner_model_built;
  return report;
}

struct Theorem2Report {
  bool all_covariant = false;
  bool positivity_preserving = false;
  bool implication_holds = false;        // covariant => positivity preserving
  bool converse_counterexample = false;  // positivity preserving but not covariant
};

inline Theorem2Report verify_theorem2(const WignerFrame& frame, const Subtheory& sub,
                                      const CovarianceOptions& options = {}) {
  Theorem2Report report;
  std::vector<char> covariant(sub.transformations.size(), 0);
  parallel_for(sub.transformations.size(), [&](std::size_t i) {
    covariant[i] = check_channel_covariance(frame, sub.transformations[i], options).covariant;
  });
  report.all_covariant =
      std::all_of(covariant.begin(), covariant.end(), [](char c) { return c != 0; });
  report.positivity_preserving = check_positivity_preservation(frame, sub).preserving;
  report.implication_holds = !report.all_covariant || report.positivity_preserving;
  report.converse_counterexample = report.positivity_preserving && !report.all_covariant;
  return report;
}

struct Theorem3Report {
  bool wigner_model_noncontextual = false;  // the Wigner model exists
  bool positivity_preserving = false;
  bool implication_holds = false;        // noncontextual model => positivity preserving
  std::optional<TncVerdict> eight_state;  // qubit subtheories: eps1 vs eps2
  bool converse_counterexample = false;  // positivity preserved, 8-state contextual
};

inline Theorem3Report verify_theorem3(const WignerFrame& frame, const Subtheory& sub) {
  Theorem3Report report;
  report.wigner_model_noncontextual = build_wigner_model(frame, sub).built();
  report.positivity_preserving = check_positivity_preservation(frame, sub).preserving;
  report.implication_holds = !report.wigner_model_noncontextual || report.positivity_preserving;

  if (sub.dim == 2) {
    Subtheory extended = sub;
    extended.transformations.push_back(depolarizing_eps1());
    extended.transformations.push_back(depolarizing_eps2());
    const OntologicalModel model = build_8state_model(extended);
    report.eight_state = check_transformation_noncontextuality(
        model, {{depolarizing_eps1(), depolarizing_eps2()}});
    report.converse_counterexample =
        report.positivity_preserving && !report.eight_state->noncontextual;
  }
  return report;
}

//--------------------------------------------------------------------------
// Full classicality report
//--------------------------------------------------------------------------

struct ClassicalityReport {
  std::string subtheory;
  std::string frame;
  std::vector<CovarianceCertificate> covariance;
  bool all_covariant = false;

  bool wigner_model_built = false;
  std::vector<Obstruction> wigner_obstructions;
  std::optional<TncVerdict> eight_state_tnc;

  PositivityVerdict positivity;

  Theorem1Report theorem1;
  Theorem2Report theorem2;
  Theorem3Report theorem3;

  double state_negativity = 0.0;
  double channel_negativity = 0.0;
  double effect_negativity = 0.0;

  bool classical() const {
    return all_covariant && wigner_model_built && positivity.preserving &&
           (!eight_state_tnc || eight_state_tnc->noncontextual);
  }
};

/// Runs every analysis on one (subtheory, frame) pair and asserts the
/// implication chain covariant => noncontextual => positivity preserving on
/// the produced verdicts.
inline ClassicalityReport build_classicality_report(const WignerFrame& frame,
                                                    const Subtheory& sub,
                                                    const CovarianceOptions& options = {}) {
  ClassicalityReport report;
  report.subtheory = sub.label;
  report.frame = frame.label();

  report.covariance.resize(sub.transformations.size());
  parallel_for(sub.transformations.size(), [&](std::size_t i) {
    report.covariance[i] = check_channel_covariance(frame, sub.transformations[i], options);
  });
  report.all_covariant = std::all_of(report.covariance.begin(), report.covariance.end(),
                                     [](const CovarianceCertificate& c) { return c.covariant; });

  const WignerModelResult model = build_wigner_model(frame, sub);
  report.wigner_model_built = model.built();
  report.wigner_obstructions = model.obstructions;

  for (const auto& state : sub.states)
    report.state_negativity += negativity(wigner_of_state(frame, state.rho));
  for (const auto& channel : sub.transformations)
    report.channel_negativity += negativity(wigner_of_channel(frame, channel));
  for (const auto& povm : sub.povms)
    for (const auto& effect : povm.effects)
      report.effect_negativity += negativity(wigner_of_effect(frame, effect));

  report.positivity = check_positivity_preservation(frame, sub);
  report.theorem1 = verify_theorem1(frame, sub, options);
  report.theorem2 = verify_theorem2(frame, sub, options);
  report.theorem3 = verify_theorem3(frame, sub);
  if (report.theorem3.eight_state) report.eight_state_tnc = report.theorem3.eight_state;

  // No verdict combination may violate the implication chain.
  if (report.all_covariant && !report.wigner_model_built)
    throw Error("classicality report: covariant subtheory without a Wigner model");
  if (report.wigner_model_built && !report.positivity.preserving)
    throw Error("classicality report: noncontextual Wigner model without positivity");
  return report;
}

}  // namespace psc
