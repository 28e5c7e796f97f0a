#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "psc/cli.hpp"

using namespace psc;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / fs::path("psc_cli_test")) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p);
  f << content;
}

}  // namespace

TEST_CASE("exit codes encode verdicts") {
  SECTION("classical analyses exit 0") {
    CHECK(run_cli({"theorems", "--subtheory", "qutrit-stab", "--frame", "gross"}).code == 0);
    CHECK(run_cli({"covariance", "--frame", "wg-plus", "--channel", "depol-eps1"}).code == 0);
    CHECK(run_cli({"positivity", "--frame", "wg-plus", "--subtheory", "qubit-stab"}).code == 0);
    CHECK(run_cli({"wigner", "--frame", "wg-plus", "--state", "zero"}).code == 0);
    CHECK(run_cli({"frames"}).code == 0);
    CHECK(run_cli({"subtheories"}).code == 0);
  }

  SECTION("nonclassicality witnesses exit 1") {
    const RunResult h = run_cli({"covariance", "--frame", "wg-plus", "--channel", "unitary:hadamard"});
    CHECK(h.code == 1);
    CHECK(h.out.find("non-covariant") != std::string::npos);
    CHECK(h.out.find("witness: (0,0)") != std::string::npos);
    CHECK(h.out.find("wg-minus") != std::string::npos);

    const RunResult tnc =
        run_cli({"tnc", "--model", "8state", "--pair", "depol-eps1,depol-eps2"});
    CHECK(tnc.code == 1);
    CHECK(tnc.out.find("contextual") != std::string::npos);
    CHECK(tnc.out.find("0.25") != std::string::npos);

    CHECK(run_cli({"wigner", "--frame", "wg-plus", "--state", "magic-h"}).code == 1);
    CHECK(run_cli({"theorems", "--subtheory", "qubit-stab", "--frame", "wg-plus"}).code == 1);
  }

  SECTION("usage and input errors exit 2 before any computation") {
    CHECK(run_cli({"covariance", "--frame", "nope", "--channel", "id"}).code == 2);
    CHECK(run_cli({"theorems", "--subtheory", "nope", "--frame", "gross"}).code == 2);
    CHECK(run_cli({"covariance", "--frame", "wg-plus", "--channel", "warp"}).code == 2);
    CHECK(run_cli({"wigner", "--frame", "wg-plus"}).code == 2);  // neither state nor channel
    CHECK(run_cli({"wigner", "--frame", "wg-plus", "--state", "zero", "--channel", "id"}).code == 2);
    CHECK(run_cli({"nonsense"}).code == 2);
    CHECK(run_cli({}).code == 2);
    // Dimension mismatch between frame and subtheory.
    CHECK(run_cli({"theorems", "--subtheory", "qubit-stab", "--frame", "gross"}).code == 2);
    // Inequivalent pair is a precondition error, not a verdict.
    CHECK(run_cli({"tnc", "--model", "8state", "--pair",
                   "unitary:pauli-x,unitary:pauli-z"}).code == 2);
  }
}

TEST_CASE("json output is deterministic and carries the published schema") {
  const std::vector<std::string> argv = {"theorems", "--subtheory", "qubit-stab",
                                         "--frame", "wg-plus", "--output", "json"};
  const RunResult first = run_cli(argv);
  const RunResult second = run_cli(argv);
  CHECK(first.code == 1);
  CHECK(first.out == second.out);  // byte identical

  const ojson j = ojson::parse(first.out);
  const std::vector<std::string> expected_order = {"subtheory", "frame",    "covariance",
                                                   "tnc",       "positivity", "theorems"};
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  // The six schema fields appear in order; tolerances closes the object.
  std::size_t pos = 0;
  for (const auto& want : expected_order) {
    const auto found = std::find(keys.begin() + pos, keys.end(), want);
    REQUIRE(found != keys.end());
    pos = static_cast<std::size_t>(found - keys.begin());
  }
  CHECK(keys.back() == "tolerances");

  CHECK(j["subtheory"] == "qubit-stab");
  CHECK(j["frame"] == "wg-plus");
  CHECK(j["covariance"].is_array());
  CHECK(j["covariance"].size() == 24);
  CHECK(j["tnc"]["status"] == "not-representable");
  CHECK(j["tnc"]["eight_state"]["status"] == "contextual");
  CHECK(std::abs(j["tnc"]["eight_state"]["max_discrepancy"].get<double>() - 0.25) < 1e-9);
  CHECK(j["positivity"]["status"] == "preserving");
  CHECK(j["theorems"]["theorem1"]["equivalence_holds"] == true);
  CHECK(j["theorems"]["theorem2"]["converse_counterexample"] == true);
  CHECK(j["theorems"]["theorem3"]["converse_counterexample"] == true);
  CHECK(j["tolerances"]["negativity"].get<double>() == 1e-9);
}

TEST_CASE("wigner command on channels") {
  const RunResult flat = run_cli({"wigner", "--frame", "wg-plus", "--channel", "depol-eps1",
                                  "--output", "json"});
  CHECK(flat.code == 0);
  const ojson j = ojson::parse(flat.out);
  CHECK(j["kind"] == "channel");
  CHECK(j["matrix"].size() == 4);
  CHECK(std::abs(j["matrix"][0][0].get<double>() - 0.25) < 1e-12);
  CHECK(j["negativity"].get<double>() < 1e-12);

  const RunResult h = run_cli({"wigner", "--frame", "wg-plus", "--channel", "unitary:hadamard"});
  CHECK(h.code == 1);  // negative entries witness the broken covariance
  CHECK(h.out.find("negative") != std::string::npos);

  const RunResult id = run_cli({"wigner", "--frame", "gross", "--channel", "id"});
  CHECK(id.code == 0);
}

TEST_CASE("covariance json carries the affine motion") {
  const RunResult r = run_cli({"covariance", "--frame", "gross", "--channel",
                               "unitary:fourier3", "--output", "json"});
  CHECK(r.code == 0);
  const ojson j = ojson::parse(r.out);
  CHECK(j["certificate"]["status"] == "covariant");
  CHECK(j["certificate"]["affine"]["S"] == ojson::parse("[[0,1],[2,0]]"));
  CHECK(j["certificate"]["affine"]["a"] == ojson::parse("[0,0]"));
}

TEST_CASE("file-based inputs") {
  TempDir tmp;

  SECTION("matrix json drives unitary channels") {
    const ojson j = matrix_to_json(hadamard());
    const fs::path p = tmp.path() / "h.json";
    write_file(p, j.dump());
    const RunResult r =
        run_cli({"covariance", "--frame", "wg-plus", "--channel", "unitary:" + p.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("non-covariant") != std::string::npos);
  }

  SECTION("kraus json files build channels") {
    ojson arr = ojson::array();
    const KrausChannel eps2 = depolarizing_eps2();
    for (const auto& e : eps2.kraus_ops()) arr.push_back(matrix_to_json(e));
    const fs::path p = tmp.path() / "eps2.json";
    write_file(p, arr.dump());
    const RunResult r = run_cli({"tnc", "--model", "8state", "--pair",
                                 "depol-eps1,kraus:" + p.string()});
    CHECK(r.code == 1);
  }

  SECTION("custom gamma json reproduces a built-in frame") {
    const GammaFunction gamma = gamma_qubit_signs(+1, +1, +1, "file");
    const fs::path p = tmp.path() / "gamma.json";
    write_file(p, gamma_to_json(gamma).dump());
    const RunResult r = run_cli({"wigner", "--frame", "custom:" + p.string(), "--state", "zero",
                                 "--output", "json"});
    CHECK(r.code == 0);
    const ojson j = ojson::parse(r.out);
    CHECK(std::abs(j["values"][0].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(j["values"][1].get<double>() - 0.5) < 1e-12);
  }

  SECTION("malformed files exit 2 with the path in the diagnostic") {
    const fs::path p = tmp.path() / "broken.json";
    write_file(p, "{\"rows\": 2, \"cols\": 2, \"re\": [1,0,0]}");
    const RunResult r =
        run_cli({"covariance", "--frame", "wg-plus", "--channel", "unitary:" + p.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("broken.json") != std::string::npos);
    CHECK(r.err.find("im") != std::string::npos);

    const fs::path g = tmp.path() / "gamma_bad.json";
    write_file(g, "{\"d\": 2, \"n\": 1, \"q\": 3, \"table\": []}");
    const RunResult rg = run_cli({"wigner", "--frame", "custom:" + g.string(), "--state", "zero"});
    CHECK(rg.code == 2);
    CHECK(rg.err.find("gamma_bad.json") != std::string::npos);
    CHECK(rg.err.find("q") != std::string::npos);

    const RunResult rm = run_cli({"wigner", "--frame", "custom:/no/such/file.json",
                                  "--state", "zero"});
    CHECK(rm.code == 2);
    CHECK(rm.err.find("/no/such/file.json") != std::string::npos);
  }

  SECTION("custom subtheory directories") {
    const fs::path dir = tmp.path() / "sub";
    const auto states = enumerate_stabilizer_states(2, 1);
    for (const auto& s : states)
      write_file(dir / "states" / (s.label + ".json"), matrix_to_json(s.rho).dump());
    ojson id_kraus = ojson::array({matrix_to_json(ComplexMatrix::identity(2))});
    write_file(dir / "channels" / "id.json", id_kraus.dump());
    ojson povm = ojson::array({matrix_to_json(basis_projector(2, 0)),
                               matrix_to_json(basis_projector(2, 1))});
    write_file(dir / "povms" / "Z.json", povm.dump());

    const RunResult r = run_cli({"positivity", "--frame", "wg-plus", "--subtheory",
                                 "custom:" + dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("preserving") != std::string::npos);
  }
}

TEST_CASE("pair parsing keeps pauli-mix weights together") {
  const RunResult r = run_cli({"tnc", "--model", "8state", "--pair",
                               "pauli-mix:0.25,0.25,0.25,0.25,depol-eps2"});
  CHECK(r.code == 1);  // same contextual pair as eps1 vs eps2

  const RunResult bad = run_cli({"tnc", "--model", "8state", "--pair", "depol-eps1"});
  CHECK(bad.code == 2);
}

TEST_CASE("thread cap does not change output") {
  const std::vector<std::string> argv = {"theorems", "--subtheory", "qutrit-stab",
                                         "--frame", "gross", "--output", "json"};
  const RunResult parallel = run_cli(argv);
  setenv("PSC_THREADS", "1", 1);
  const RunResult serial = run_cli(argv);
  unsetenv("PSC_THREADS");
  CHECK(parallel.code == serial.code);
  CHECK(parallel.out == serial.out);
}

TEST_CASE("seed option changes spot checks but not verdicts") {
  const RunResult a = run_cli({"covariance", "--frame", "wg-plus", "--channel", "depol-eps1",
                               "--seed", "1", "--output", "json"});
  const RunResult b = run_cli({"covariance", "--frame", "wg-plus", "--channel", "depol-eps1",
                               "--seed", "99", "--output", "json"});
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  const ojson ja = ojson::parse(a.out), jb = ojson::parse(b.out);
  CHECK(ja["certificate"]["status"] == jb["certificate"]["status"]);
  CHECK(ja["certificate"]["remix"]["consistent"] == true);
  CHECK(jb["certificate"]["remix"]["consistent"] == true);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli({"--help"}).code == 0);
}
