#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gms/cli.hpp"
#include "gms/model.hpp"

using namespace gms;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gms_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gms_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("help documents every flag") {
  const auto top = cli({"--help"});
  CHECK(top.code == 0);
  for (const char* word : {"simulate", "clt", "fitness-dist", "mu", "drift", "stable", "lil",
                           "sandwich", "recurrence", "correction", "analytic", "suite", "replay",
                           "--p", "--f", "GMS_THREADS"}) {
    CHECK(top.out.find(word) != std::string::npos);
  }
  const auto sub = cli({"clt", "--help"});
  CHECK(sub.code == 0);
  for (const char* flag : {"--p", "--f", "--n", "--replicas", "--seed", "--mode", "--out",
                           "--format", "--threads"}) {
    CHECK(sub.out.find(flag) != std::string::npos);
  }
  const auto sim = cli({"simulate", "--help"});
  for (const char* flag : {"--every", "--checkpoints"}) {
    CHECK(sim.out.find(flag) != std::string::npos);
  }
  CHECK(cli({"suite", "--help"}).out.find("--quick") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  const auto bad_p = cli({"--p", "0.4"});
  CHECK(bad_p.code == 2);
  CHECK(bad_p.err.find("p > 1/2") != std::string::npos);

  const auto bad_sim = cli({"simulate", "--p", "0.4"});
  CHECK(bad_sim.code == 2);
  CHECK(bad_sim.err.find("p > 1/2") != std::string::npos);

  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"simulate", "--f", "abc"}).code == 2);
  CHECK(cli({"simulate", "--f", "1.5"}).code == 2);
  CHECK(cli({"simulate", "--format", "xml"}).code == 2);
  CHECK(cli({"clt", "--f", "0.5"}).code == 2);  // clt needs f = f_c
  CHECK(cli({"clt", "--mode", "full", "--n", "10", "--replicas", "2"}).code == 2);
  CHECK(cli({"simulate", "--n", "10", "--checkpoints", "5,3"}).code == 2);
  CHECK(cli({"analytic", "eval", "nope", "1"}).code == 2);
  CHECK(cli({"analytic", "eval", "stable_cdf", "1"}).code == 2);
  CHECK(cli({"analytic", "eval", "lil_envelope", "3", "0.4"}).code == 2);
}

TEST_CASE("simulate prints a csv trajectory") {
  const auto r = cli({"simulate", "--p", "0.6", "--f", "critical", "--n", "1000", "--seed", "7"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row, last;
  std::getline(lines, header);
  CHECK(header == "step,X,L,R,B,Delta,eta,C");
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    last = row;
  }
  CHECK(rows == 100);

  const auto expected = run_trajectory(ModelParams::critical(0.6), 1000, 7, SimMode::kReduced).terminal;
  std::ostringstream want;
  want << 1000 << ',' << expected.X << ',' << expected.L << ',' << expected.R() << ','
       << expected.B << ',' << expected.Delta << ',' << expected.eta << ',' << expected.C;
  CHECK(last == want.str());

  // Model flags before the subcommand apply too.
  CHECK(cli({"--p", "0.6", "simulate", "--n", "1000", "--seed", "7"}).out == r.out);

  const auto json_run = cli({"simulate", "--n", "50", "--every", "10", "--format", "json",
                             "--mode", "full"});
  REQUIRE(json_run.code == 0);
  const auto doc = nlohmann::json::parse(json_run.out);
  CHECK(doc.at("snapshots").size() == 5);
  CHECK(doc.contains("fitness_above_fc"));
}

TEST_CASE("analytic eval prints 17 significant digits") {
  const auto r = cli({"analytic", "eval", "critical_fitness", "0.6"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.66666666666666674\n");
  CHECK(cli({"analytic", "eval", "stable_laplace", "1", "1"}).out == "0.24311673443421419\n");
  CHECK(cli({"analytic", "eval", "expected_mu", "0.6", "0.5"}).code == 0);
}

TEST_CASE("experiment subcommands report verdicts and write outputs") {
  const fs::path dir = scratch("mu");
  const auto r = cli({"mu", "--p", "0.6", "--f", "0.5", "--n", "20000", "--out", dir.string(),
                      "--threads", "1"});
  CHECK((r.code == 0 || r.code == 1));
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("experiment") == "mu");
  CHECK(doc.at("spec").at("f") == 0.5);
  CHECK(r.code == (doc.at("passed").get<bool>() ? 0 : 1));
  CHECK(fs::exists(dir / "manifest.json"));

  std::ifstream in(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(in);
  for (const char* flag : {"p", "f", "n", "replicas", "seed", "mode", "out", "format", "threads"}) {
    CHECK(manifest.at("flags").contains(flag));
  }

  const auto replay = cli({"replay", dir.string()});
  CHECK(replay.code == 0);
  CHECK(nlohmann::json::parse(replay.out).at("reproduced") == true);

  const auto csv = cli({"mu", "--p", "0.6", "--f", "0.5", "--n", "2000", "--format", "csv"});
  CHECK(csv.out.rfind("experiment,p,f,n,replicas,statistic,p_value,verdict\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("simulate manifests replay byte for byte") {
  const fs::path dir = scratch("sim");
  CHECK(cli({"simulate", "--n", "5000", "--mode", "full", "--seed", "3", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "fitness_above_fc.txt"));
  const auto replay = cli({"replay", (dir / "manifest.json").string()});
  CHECK(replay.code == 0);

  { std::ofstream(dir / "trajectory.csv", std::ios::app) << "tampered\n"; }
  // The replay regenerates into <dir>/replay and compares against the
  // recorded digests, which still match the regenerated files.
  CHECK(cli({"replay", dir.string()}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("i/o errors exit 3") {
  CHECK(cli({"replay", "/nonexistent/manifest.json"}).code == 3);
  CHECK(cli({"simulate", "--n", "10", "--out", "/proc/gms_no/such"}).code == 3);
}
