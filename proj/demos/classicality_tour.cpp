// Walks the three classicality notions on the two canonical subtheories.
#include <cstdio>

#include "psc/analysis.hpp"

using namespace psc;

int main() {
  const WignerFrame plus = wg_plus();
  const Subtheory qubit = build_single_qubit_stabilizer();

  std::puts("single-qubit stabilizer theory, wg-plus frame");
  const auto h_cert = check_unitary_covariance(plus, hadamard(), "H");
  std::printf("  hadamard covariant: %s\n", h_cert.covariant ? "yes" : "no");
  if (h_cert.witness) std::printf("  witness: %s\n", format_point(*h_cert.witness).c_str());

  const auto positivity = check_positivity_preservation(plus, qubit);
  std::printf("  positivity preserving: %s (min entry %.3g)\n",
              positivity.preserving ? "yes" : "no", positivity.min_value);

  Subtheory extended = qubit;
  extended.transformations.push_back(depolarizing_eps1());
  extended.transformations.push_back(depolarizing_eps2());
  const OntologicalModel eight = build_8state_model(extended);
  const TncVerdict tnc = check_transformation_noncontextuality(
      eight, {{depolarizing_eps1(), depolarizing_eps2()}});
  std::printf("  8-state model, eps1 vs eps2: %s (max discrepancy %.3g)\n",
              tnc.noncontextual ? "noncontextual" : "contextual", tnc.max_discrepancy);

  std::puts("single-qutrit stabilizer theory, gross frame");
  const WignerFrame gross = gross_frame();
  const Subtheory qutrit = build_qutrit_stabilizer();
  const auto thm1 = verify_theorem1(gross, qutrit);
  std::printf("  all 216 cliffords covariant: %s\n", thm1.all_covariant ? "yes" : "no");
  std::printf("  wigner model built: %s\n", thm1.wigner_model_built ? "yes" : "no");
  return 0;
}
