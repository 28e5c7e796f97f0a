#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "psc/analysis.hpp"

using namespace psc;

namespace {

ComplexMatrix magic_h_state() {
  const double angle = std::numbers::pi / 8.0;
  return ket_density({std::cos(angle), std::sin(angle)});
}

Subtheory pauli_only_qubit_subtheory() {
  Subtheory sub = build_single_qubit_stabilizer();
  sub.label = "qubit-pauli";
  sub.transformations.clear();
  sub.transformations.push_back(identity_channel(2));
  sub.transformations.push_back(unitary_channel(sigma_x(), "x"));
  sub.transformations.push_back(unitary_channel(sigma_y(), "y"));
  sub.transformations.push_back(unitary_channel(sigma_z(), "z"));
  return sub;
}

bool is_permutation_column(const StochasticMatrix& gamma, std::size_t from, double tol) {
  int ones = 0;
  for (std::size_t to = 0; to < gamma.size; ++to) {
    const double v = gamma(to, from);
    if (std::abs(v - 1.0) <= tol)
      ++ones;
    else if (std::abs(v) > tol)
      return false;
  }
  return ones == 1;
}

}  // namespace

TEST_CASE("unitary covariance certification") {
  const WignerFrame plus = wg_plus();
  const WignerFrame gross = gross_frame();

  SECTION("identity is covariant with S = I, a = 0") {
    const auto cert = check_unitary_covariance(plus, ComplexMatrix::identity(2), "id");
    REQUIRE(cert.covariant);
    CHECK(cert.affine->linear == IntMatrix::identity(2));
    CHECK(cert.affine->shift == PhasePoint(0, 0));
  }

  SECTION("the Pauli X is the translation by (1,0)") {
    const auto cert = check_unitary_covariance(plus, sigma_x(), "x");
    REQUIRE(cert.covariant);
    CHECK(cert.affine->linear == IntMatrix::identity(2));
    CHECK(cert.affine->shift == PhasePoint(1, 0));
  }

  SECTION("the Hadamard breaks covariance with witness at the origin") {
    const auto cert = check_unitary_covariance(plus, hadamard(), "h");
    REQUIRE_FALSE(cert.covariant);
    REQUIRE(cert.witness.has_value());
    CHECK(*cert.witness == PhasePoint(0, 0));
    // The conjugated operator lands in the companion frame's basis.
    CHECK(cert.note.find("wg-minus") != std::string::npos);
    CHECK(cert.note.find("A(1,0)") != std::string::npos);
  }

  SECTION("the qutrit Fourier transform is covariant with a pure rotation") {
    const auto cert = check_unitary_covariance(gross, fourier(3), "F");
    REQUIRE(cert.covariant);
    CHECK(cert.affine->linear == IntMatrix(2, 2, {0, 1, 2, 0}));  // matches the search oracle
    CHECK(cert.affine->shift == PhasePoint(0, 0));
    const auto oracle = psc_test::exhaustive_covariance_search(gross, fourier(3));
    REQUIRE(oracle.has_value());
    CHECK(cert.affine->linear == oracle->linear);
    CHECK(cert.affine->shift == oracle->shift);
  }

  SECTION("non-unitary input is rejected") {
    CHECK_THROWS_AS(check_unitary_covariance(plus, 2.0 * hadamard(), "bad"), ValidationError);
  }
}

TEST_CASE("covariance fitting agrees with the exhaustive affine search") {
  SECTION("all 24 qubit cliffords under wg-plus") {
    const WignerFrame plus = wg_plus();
    int covariant_count = 0;
    for (const auto& u : generate_clifford(2, 1)) {
      const auto fit = check_unitary_covariance(plus, u, "c");
      const auto oracle = psc_test::exhaustive_covariance_search(plus, u);
      CHECK(fit.covariant == oracle.has_value());
      if (fit.covariant) {
        ++covariant_count;
        CHECK(fit.affine->linear == oracle->linear);
        CHECK(fit.affine->shift == oracle->shift);
      }
    }
    // Pauli translations and their phase-space rotations stay inside the
    // frame; the Hadamard-like elements do not.
    CHECK(covariant_count > 0);
    CHECK(covariant_count < 24);
  }

  SECTION("a deterministic sample of qutrit cliffords under gross") {
    const WignerFrame gross = gross_frame();
    const auto group = generate_clifford(3, 1);
    for (std::size_t i = 0; i < group.size(); i += 9) {
      const auto fit = check_unitary_covariance(gross, group[i], "c");
      const auto oracle = psc_test::exhaustive_covariance_search(gross, group[i]);
      REQUIRE(fit.covariant);
      REQUIRE(oracle.has_value());
      CHECK(fit.affine->linear == oracle->linear);
      CHECK(fit.affine->shift == oracle->shift);
    }
  }
}

TEST_CASE("two-qubit covariance fits a 4x4 symplectic") {
  const WignerFrame multi = wg_multi_frame(2);
  const PhaseSpace& space = multi.space();

  SECTION("single-qubit Paulis act as translations of their coordinate pair") {
    const auto cx = check_unitary_covariance(multi, tensor(sigma_x(), ComplexMatrix::identity(2)),
                                             "x0");
    REQUIRE(cx.covariant);
    CHECK(cx.affine->linear == IntMatrix::identity(4));
    CHECK(cx.affine->shift == PhasePoint({1, 0, 0, 0}));

    const auto cz = check_unitary_covariance(multi, tensor(ComplexMatrix::identity(2), sigma_z()),
                                             "z1");
    REQUIRE(cz.covariant);
    CHECK(cz.affine->shift == PhasePoint({0, 0, 0, 1}));
  }

  SECTION("the swap gate exchanges the two coordinate pairs") {
    ComplexMatrix swap(4, 4);
    swap(0, 0) = 1.0;
    swap(1, 2) = 1.0;
    swap(2, 1) = 1.0;
    swap(3, 3) = 1.0;
    const auto cert = check_unitary_covariance(multi, swap, "swap");
    REQUIRE(cert.covariant);
    CHECK(cert.affine->linear == IntMatrix(4, 4, {0, 0, 1, 0,
                                                  0, 0, 0, 1,
                                                  1, 0, 0, 0,
                                                  0, 1, 0, 0}));
    CHECK(cert.affine->shift == PhasePoint({0, 0, 0, 0}));
    const auto oracle = psc_test::exhaustive_covariance_search(multi, swap);
    REQUIRE(oracle.has_value());
    CHECK(oracle->linear == cert.affine->linear);
  }

  SECTION("the cnot leaves the product frame, matching the exhaustive search") {
    const auto fit = check_unitary_covariance(multi, cnot(), "cnot");
    const auto oracle = psc_test::exhaustive_covariance_search(multi, cnot());
    CHECK(fit.covariant == oracle.has_value());
    CHECK_FALSE(fit.covariant);
    CHECK(fit.witness.has_value());
    CHECK(is_symplectic(space, IntMatrix::identity(4)));  // sanity on the space
  }
}

TEST_CASE("channel covariance certification") {
  const WignerFrame plus = wg_plus();

  SECTION("eps1 is covariant: every Pauli operator is a translation") {
    const auto cert = check_channel_covariance(plus, depolarizing_eps1());
    CHECK(cert.covariant);
    CHECK(cert.decomposition_checked);
    CHECK(cert.channel_matrix_nonnegative);
    CHECK(cert.kraus_ops_all_permutation);
    REQUIRE(cert.per_kraus.size() == 4);
    for (const auto& entry : cert.per_kraus) CHECK(entry.covariant);
    CHECK(cert.remix_trials == 8);
    CHECK(cert.remix_consistent);
  }

  SECTION("eps2 is non-covariant: every HR operator fails") {
    const auto cert = check_channel_covariance(plus, depolarizing_eps2());
    CHECK_FALSE(cert.covariant);
    CHECK(cert.channel_matrix_nonnegative);  // same channel as eps1
    CHECK_FALSE(cert.kraus_ops_all_permutation);
    REQUIRE(cert.per_kraus.size() == 4);
    for (const auto& entry : cert.per_kraus) CHECK_FALSE(entry.covariant);
    CHECK(cert.remix_consistent);
  }

  SECTION("identity channel is trivially covariant") {
    const auto cert = check_channel_covariance(plus, identity_channel(2));
    CHECK(cert.covariant);
    REQUIRE(cert.affine.has_value());
    CHECK(cert.affine->linear == IntMatrix::identity(2));
  }

  SECTION("non proportional-unitary decompositions skip the operator check") {
    ComplexMatrix e0(2, 2), e1(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(0.5);
    e1(0, 1) = std::sqrt(0.5);
    const auto cert = check_channel_covariance(plus, KrausChannel({e0, e1}, "damp"));
    CHECK_FALSE(cert.decomposition_checked);
    CHECK(cert.per_kraus.empty());
    CHECK(cert.method.find("skipped") != std::string::npos);
  }

  SECTION("certificates are deterministic for a fixed seed") {
    CovarianceOptions options;
    options.seed = 7;
    const auto a = check_channel_covariance(plus, depolarizing_eps1(), options);
    const auto b = check_channel_covariance(plus, depolarizing_eps1(), options);
    CHECK(a.covariant == b.covariant);
    CHECK(a.remix_informative == b.remix_informative);
  }
}

TEST_CASE("wigner model construction") {
  SECTION("qutrit stabilizer theory: model built, all transitions are permutations") {
    const WignerFrame gross = gross_frame();
    const Subtheory sub = build_qutrit_stabilizer();
    const WignerModelResult result = build_wigner_model(gross, sub);
    REQUIRE(result.built());
    CHECK(result.model->transition_mats.size() == 216);
    for (const auto& [label, gamma] : result.model->transition_mats)
      for (std::size_t from = 0; from < gamma.size; ++from)
        CHECK(is_permutation_column(gamma, from, 1e-9));
  }

  SECTION("qubit stabilizer theory under wg-plus fails on a Hadamard-like channel") {
    const WignerFrame plus = wg_plus();
    const WignerModelResult result = build_wigner_model(plus, build_single_qubit_stabilizer());
    REQUIRE_FALSE(result.built());
    bool transformation_obstruction = false;
    for (const auto& o : result.obstructions)
      if (o.kind == "transformation") transformation_obstruction = true;
    CHECK(transformation_obstruction);
  }

  SECTION("the Pauli-only qubit subtheory is representable") {
    const WignerModelResult result = build_wigner_model(wg_plus(), pauli_only_qubit_subtheory());
    CHECK(result.built());
  }

  SECTION("the qutrit wigner model reproduces the full triple product statistics") {
    const Subtheory sub = build_qutrit_stabilizer();
    const WignerModelResult result = build_wigner_model(gross_frame(), sub);
    REQUIRE(result.built());
    CHECK(check_model_statistics(*result.model, sub).max_error < 1e-8);
  }

  SECTION("frame tag mismatch is a precondition error") {
    Subtheory sub = pauli_only_qubit_subtheory();
    sub.frame_tag = "wg-minus";
    CHECK_THROWS_AS(build_wigner_model(wg_plus(), sub), PreconditionError);
  }
}

TEST_CASE("8-state model") {
  Subtheory sub = build_single_qubit_stabilizer();
  sub.transformations.push_back(depolarizing_eps1());
  sub.transformations.push_back(depolarizing_eps2());
  const OntologicalModel model = build_8state_model(sub);

  SECTION("every stabilizer state is uniform over 4 of the 8 ontic points") {
    for (const auto& [label, mu] : model.state_dists) {
      int quarter = 0, zero = 0;
      for (double v : mu) {
        if (std::abs(v - 0.25) < 1e-12)
          ++quarter;
        else if (std::abs(v) < 1e-12)
          ++zero;
      }
      CHECK(quarter == 4);
      CHECK(zero == 4);
    }
  }

  SECTION("the Hadamard permutes the ontic space across the two sectors") {
    const auto h_label = [&]() -> std::string {
      for (const auto& ch : sub.transformations)
        if (ch.kraus_ops().size() == 1 && frob_dist(detail::phase_canonical(ch.kraus_ops()[0]),
                                                    detail::phase_canonical(hadamard())) < 1e-9)
          return ch.label();
      return {};
    }();
    REQUIRE_FALSE(h_label.empty());
    const StochasticMatrix& gamma = model.transition_mats.at(h_label);
    for (std::size_t from = 0; from < 8; ++from) {
      REQUIRE(is_permutation_column(gamma, from, 1e-12));
      for (std::size_t to = 0; to < 8; ++to)
        if (gamma(to, from) > 0.5) CHECK((from < 4) != (to < 4));  // sector swap
    }
  }

  SECTION("eps1 is block-diagonal and eps2 block-off-diagonal, exactly") {
    const StochasticMatrix& g1 = model.transition_mats.at("depol-eps1");
    const StochasticMatrix& g2 = model.transition_mats.at("depol-eps2");
    for (std::size_t to = 0; to < 8; ++to)
      for (std::size_t from = 0; from < 8; ++from) {
        const bool same_sector = (to < 4) == (from < 4);
        // Zero blocks are exact; the quarter weights carry at most one ulp
        // from the 1/sqrt(2) in the Hadamard factors.
        if (same_sector) {
          CHECK(g1(to, from) == 0.25);
          CHECK(g2(to, from) == 0.0);
        } else {
          CHECK(g1(to, from) == 0.0);
          CHECK(g2(to, from) == Catch::Approx(0.25).margin(1e-12));
        }
      }
  }

  SECTION("statistics reproduce the Born rule on all triples") {
    const StatisticsReport stats = check_model_statistics(model, sub);
    CHECK(stats.max_error < 1e-9);
  }

  SECTION("marginalization over sectors") {
    for (const auto& [label, mu] : model.state_dists) {
      double plus_half = 0.0, minus_half = 0.0;
      for (std::size_t i = 0; i < 4; ++i) plus_half += mu[i];
      for (std::size_t i = 4; i < 8; ++i) minus_half += mu[i];
      CHECK(plus_half == Catch::Approx(0.5).margin(1e-12));
      CHECK(minus_half == Catch::Approx(0.5).margin(1e-12));
    }
    // Sector sums of the eps1 transitions recover its wg-plus channel matrix.
    const StochasticMatrix& g1 = model.transition_mats.at("depol-eps1");
    const WignerChannelMatrix w1 = wigner_of_channel(wg_plus(), depolarizing_eps1());
    for (std::size_t to = 0; to < 4; ++to)
      for (std::size_t from = 0; from < 4; ++from)
        CHECK(g1(to, from) + g1(to + 4, from) ==
              Catch::Approx(w1(to, from)).margin(1e-12));
  }

  SECTION("non-Clifford transformations are unsupported") {
    Subtheory bad = build_single_qubit_stabilizer();
    bad.transformations.push_back(unitary_channel(t_gate(), "t"));
    CHECK_THROWS_AS(build_8state_model(bad), UnsupportedTransformationError);
  }

  SECTION("qutrit input violates the precondition") {
    CHECK_THROWS_AS(build_8state_model(build_qutrit_stabilizer()), PreconditionError);
  }
}

TEST_CASE("transformation noncontextuality checks") {
  SECTION("the 8-state model distinguishes eps1 from eps2 by exactly 1/4") {
    Subtheory sub = build_single_qubit_stabilizer();
    sub.transformations.push_back(depolarizing_eps1());
    sub.transformations.push_back(depolarizing_eps2());
    const OntologicalModel model = build_8state_model(sub);
    const TncVerdict verdict = check_transformation_noncontextuality(
        model, {{depolarizing_eps1(), depolarizing_eps2()}});
    CHECK_FALSE(verdict.noncontextual);
    CHECK(verdict.max_discrepancy == Catch::Approx(0.25).margin(1e-9));
    REQUIRE(verdict.distinguishing_pair.has_value());
  }

  SECTION("the wigner model is noncontextual under Kraus remixing by construction") {
    const WignerFrame gross = gross_frame();
    Subtheory sub = build_qutrit_stabilizer();
    std::mt19937_64 rng(5);
    const KrausChannel mixture = weyl_mixture(3, {0.4, 0.2, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05}, "wmix");
    const KrausChannel remixed = remix_kraus(mixture, random_unitary(9, rng));
    sub.transformations.push_back(mixture);
    sub.transformations.push_back(remixed);
    const WignerModelResult result = build_wigner_model(gross, sub);
    REQUIRE(result.built());
    const TncVerdict verdict =
        check_transformation_noncontextuality(*result.model, {{mixture, remixed}});
    CHECK(verdict.noncontextual);
    CHECK(verdict.max_discrepancy < 1e-9);
  }

  SECTION("a pair with itself is noncontextual") {
    Subtheory sub = build_single_qubit_stabilizer();
    const OntologicalModel model = build_8state_model(sub);
    const KrausChannel id = identity_channel(2);
    // The identity sits in the subtheory as the first clifford channel.
    const std::string first = sub.transformations.front().label();
    REQUIRE(channels_equal(sub.transformations.front(), id));
    const TncVerdict verdict = check_transformation_noncontextuality(
        model, {{sub.transformations.front(), sub.transformations.front()}});
    CHECK(verdict.noncontextual);
  }

  SECTION("inequivalent procedures violate the precondition") {
    Subtheory sub = pauli_only_qubit_subtheory();
    const WignerModelResult result = build_wigner_model(wg_plus(), sub);
    REQUIRE(result.built());
    CHECK_THROWS_AS(
        check_transformation_noncontextuality(
            *result.model, {{sub.transformations[1], sub.transformations[3]}}),
        PreconditionError);
  }
}

TEST_CASE("positivity preservation") {
  SECTION("qubit stabilizer theory preserves positivity under wg-plus") {
    const PositivityVerdict verdict =
        check_positivity_preservation(wg_plus(), build_single_qubit_stabilizer());
    CHECK(verdict.preserving);
    CHECK(verdict.min_value >= -1e-9);
  }

  SECTION("qutrit stabilizer theory preserves positivity under gross") {
    const PositivityVerdict verdict =
        check_positivity_preservation(gross_frame(), build_qutrit_stabilizer());
    CHECK(verdict.preserving);
  }

  SECTION("adding the T gate breaks positivity on the X+ state") {
    Subtheory sub = build_single_qubit_stabilizer();
    sub.transformations.clear();
    sub.transformations.push_back(unitary_channel(t_gate(), "t"));
    const PositivityVerdict verdict = check_positivity_preservation(wg_plus(), sub);
    CHECK_FALSE(verdict.preserving);
    CHECK(verdict.worst_transformation == "t");
    CHECK(verdict.worst_state == "X+");
    CHECK(verdict.min_value == Catch::Approx((1.0 - std::sqrt(2.0)) / 4.0).margin(1e-9));
  }

  SECTION("negatively represented input states violate the precondition") {
    Subtheory sub = build_single_qubit_stabilizer();
    sub.states.push_back({"magic-h", magic_h_state()});
    CHECK_THROWS_AS(check_positivity_preservation(wg_plus(), sub), PreconditionError);
  }
}

TEST_CASE("theorem 1: covariance iff wigner-model noncontextuality") {
  SECTION("qutrit stabilizer theory: both sides true") {
    const Theorem1Report report = verify_theorem1(gross_frame(), build_qutrit_stabilizer());
    CHECK(report.all_covariant);
    CHECK(report.wigner_model_built);
    CHECK(report.equivalence_holds);
  }

  SECTION("qubit stabilizer theory under wg-plus: both sides false") {
    const Theorem1Report report = verify_theorem1(wg_plus(), build_single_qubit_stabilizer());
    CHECK_FALSE(report.all_covariant);
    CHECK_FALSE(report.wigner_model_built);
    CHECK(report.equivalence_holds);
    CHECK(report.first_noncovariant.has_value());
    CHECK(report.first_obstruction.has_value());
  }

  SECTION("Pauli-only qubit subtheory: both sides true") {
    const Theorem1Report report = verify_theorem1(wg_plus(), pauli_only_qubit_subtheory());
    CHECK(report.all_covariant);
    CHECK(report.wigner_model_built);
    CHECK(report.equivalence_holds);
  }
}

TEST_CASE("theorem 1 converse mechanics: row sums force point masses") {
  const WignerFrame gross = gross_frame();
  const auto group = generate_clifford(3, 1);
  for (std::size_t i = 0; i < group.size(); i += 13) {
    const WignerChannelMatrix w = wigner_of_channel(gross, unitary_channel(group[i], "c"));
    for (std::size_t row = 0; row < 9; ++row) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t col = 0; col < 9; ++col) {
        sum += w(row, col);
        sum2 += w(row, col) * w(row, col);
      }
      CHECK(sum == Catch::Approx(1.0).margin(1e-8));
      CHECK(sum2 == Catch::Approx(1.0).margin(1e-8));
    }
    // Non-negative rows with both identities are 0/1 point masses.
    if (min_entry(w.values) >= -1e-9) {
      for (std::size_t row = 0; row < 9; ++row) {
        int ones = 0;
        for (std::size_t col = 0; col < 9; ++col) {
          if (std::abs(w(row, col) - 1.0) < 1e-7) ++ones;
          else CHECK(std::abs(w(row, col)) < 1e-7);
        }
        CHECK(ones == 1);
      }
    }
  }
}

TEST_CASE("theorem 2: covariance implies positivity preservation, not conversely") {
  SECTION("qubit stabilizer theory is the counterexample") {
    const Theorem2Report report = verify_theorem2(wg_plus(), build_single_qubit_stabilizer());
    CHECK_FALSE(report.all_covariant);
    CHECK(report.positivity_preserving);
    CHECK(report.implication_holds);
    CHECK(report.converse_counterexample);
  }

  SECTION("qutrit stabilizer theory satisfies both sides") {
    const Theorem2Report report = verify_theorem2(gross_frame(), build_qutrit_stabilizer());
    CHECK(report.all_covariant);
    CHECK(report.positivity_preserving);
    CHECK(report.implication_holds);
    CHECK_FALSE(report.converse_counterexample);
  }
}

TEST_CASE("theorem 3: noncontextuality implies positivity preservation, not conversely") {
  SECTION("qubit stabilizer theory: positivity holds, 8-state model is contextual") {
    const Theorem3Report report = verify_theorem3(wg_plus(), build_single_qubit_stabilizer());
    CHECK_FALSE(report.wigner_model_noncontextual);
    CHECK(report.positivity_preserving);
    CHECK(report.implication_holds);
    REQUIRE(report.eight_state.has_value());
    CHECK_FALSE(report.eight_state->noncontextual);
    CHECK(report.eight_state->max_discrepancy == Catch::Approx(0.25).margin(1e-9));
    CHECK(report.converse_counterexample);
  }

  SECTION("qutrit stabilizer theory: all verdicts classical") {
    const Theorem3Report report = verify_theorem3(gross_frame(), build_qutrit_stabilizer());
    CHECK(report.wigner_model_noncontextual);
    CHECK(report.positivity_preserving);
    CHECK(report.implication_holds);
    CHECK_FALSE(report.eight_state.has_value());
  }
}

TEST_CASE("classicality report") {
  SECTION("qutrit stabilizer theory under gross is classical on all counts") {
    const ClassicalityReport report =
        build_classicality_report(gross_frame(), build_qutrit_stabilizer());
    CHECK(report.all_covariant);
    CHECK(report.wigner_model_built);
    CHECK(report.positivity.preserving);
    CHECK(report.classical());
    CHECK(report.state_negativity < 1e-9);
    CHECK(report.channel_negativity < 1e-9);
    CHECK(report.effect_negativity < 1e-9);

    // Every covariant certificate carries a form-preserving permutation.
    const PhaseSpace space(3, 1);
    for (const auto& cert : report.covariance) {
      REQUIRE(cert.covariant);
      REQUIRE(cert.affine.has_value());
      CHECK(is_symplectic(space, cert.affine->linear));
      std::set<std::size_t> image;
      for (std::size_t i = 0; i < space.size(); ++i)
        image.insert(point_index(space, apply_affine(space, *cert.affine, point_at(space, i))));
      CHECK(image.size() == space.size());
    }
  }

  SECTION("qubit stabilizer theory under wg-plus is nonclassical but consistent") {
    const ClassicalityReport report =
        build_classicality_report(wg_plus(), build_single_qubit_stabilizer());
    CHECK_FALSE(report.all_covariant);
    CHECK_FALSE(report.wigner_model_built);
    CHECK(report.positivity.preserving);
    CHECK_FALSE(report.classical());
    CHECK(report.channel_negativity > 0.1);  // Hadamard-like channels carry negativity
    REQUIRE(report.eight_state_tnc.has_value());
    CHECK_FALSE(report.eight_state_tnc->noncontextual);
  }
}
