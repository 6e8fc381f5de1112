#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "bdg/benchmark.hpp"
#include "bdg/cli.hpp"
#include "bdg/io.hpp"
#include "bdg/timecourse.hpp"

using namespace bdg;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bdg_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bdg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

NumericTable parse(const std::string& text, HeaderMode mode = HeaderMode::Auto) {
  std::istringstream in(text);
  return read_numeric_csv(in, mode);
}

// Message of the ParseError raised for text, empty if none.
std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

const std::vector<std::string> kFitOutputs = {"phat.csv",      "khat.csv",      "graph_probs.csv",
                                              "trace.csv",     "occupancy.csv", "diagnostics.txt",
                                              "run_manifest.txt"};

}  // namespace

TEST_CASE("numeric CSV reader examples") {
  const NumericTable t = parse("a,b\n1,2\n3,4.5\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.values.rows() == 2);
  CHECK(t.values(1, 1) == 4.5);

  const NumericTable bare = parse("1,2\n3,4\n");
  CHECK(bare.header.empty());
  CHECK(bare.values.rows() == 2);
  CHECK(parse("1,2\n3,4\n", HeaderMode::Present).values.rows() == 1);

  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("x,y\n"), ParseError);
  CHECK(parse_error("x,y\n").find("no data rows") != std::string::npos);
  const std::string ragged = parse_error("1,2\n3\n");
  CHECK(ragged.find("row 2") != std::string::npos);
  const std::string bad = parse_error("a,b\n1,2\n3,oops\n");
  CHECK(bad.find("row 3") != std::string::npos);
  CHECK(bad.find("col 2") != std::string::npos);
  CHECK_THROWS_AS(parse("1,nan\n"), ParseError);
  CHECK_THROWS_AS(parse("1,inf\n"), ParseError);
}

TEST_CASE("property: 17-digit CSV round trip is lossless") {
  Rng rng = make_stream(8);
  MatrixXd m(6, 6);
  for (Index r = 0; r < 6; ++r)
    for (Index c = 0; c < 6; ++c) m(r, c) = standard_normal(rng) * std::pow(10.0, static_cast<double>(r - 3) * 7.0);
  m(0, 0) = 0.1;
  m(1, 1) = 1.0 / 3.0;
  m(2, 2) = -0.0;
  m(3, 3) = 5e-324;
  m(4, 4) = 1.7976931348623157e308;
  std::ostringstream out;
  write_matrix_csv(out, m);
  const NumericTable back = parse(out.str(), HeaderMode::Absent);
  CHECK(back.values == m);
}

TEST_CASE("key=value parsing") {
  std::istringstream in("# comment\n\nb = 3\nseed=7\nout=dir=x\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(kv.at("b") == "3");
  CHECK(kv.at("seed") == "7");
  CHECK(kv.at("out") == "dir=x");
  std::istringstream bad("novalue\n");
  CHECK_THROWS_AS(parse_key_values(bad), ParseError);
  std::istringstream empty_key("=3\n");
  CHECK_THROWS_AS(parse_key_values(empty_key), ParseError);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("fit writes every output and rejects bad data") {
  const fs::path dir = scratch("fit");
  REQUIRE(run_cli({"simulate", "--model", "circle", "--p", "5", "--n", "40", "--seed", "3", "--out", dir.string()})
              .code == cli::kExitOk);
  const fs::path out = dir / "fit";
  const RunResult r = run_cli({"fit", "--data", (dir / "data.csv").string(), "--iterations", "400", "--burn-in",
                               "100", "--out", out.string()});
  REQUIRE(r.code == cli::kExitOk);
  for (const auto& name : kFitOutputs) CHECK(fs::exists(out / name));
  const MatrixXd phat = read_numeric_csv_file((out / "phat.csv").string()).values;
  CHECK(phat.rows() == 5);
  CHECK(phat == phat.transpose());

  write_text(dir / "empty.csv", "");
  write_text(dir / "header.csv", "a,b,c\n");
  write_text(dir / "bad.csv", "a,b\n1,2\n3,x\n");
  for (const char* name : {"empty.csv", "header.csv", "bad.csv"})
    CHECK(run_cli({"fit", "--data", (dir / name).string(), "--out", (dir / "x").string()}).code == cli::kExitParse);
  CHECK(run_cli({"fit", "--data", (dir / "missing.csv").string(), "--out", (dir / "x").string()}).code ==
        cli::kExitConfig);
  CHECK(run_cli({"fit", "--out", (dir / "x").string()}).code == cli::kExitConfig);
  CHECK(run_cli({"fit", "--no-such-flag", "1"}).code == cli::kExitConfig);

  // Finite cells whose scatter overflows: a numerical failure.
  write_text(dir / "huge.csv", "1e200,2,3\n1,-1e200,2\n3,1,1\n");
  CHECK(run_cli({"fit", "--data", (dir / "huge.csv").string(), "--iterations", "100", "--burn-in", "10", "--out",
                 (dir / "x").string()})
            .code == cli::kExitNumerical);
}

TEST_CASE("simulate examples") {
  const fs::path dir = scratch("simulate");
  REQUIRE(run_cli({"simulate", "--model", "scale-free", "--p", "50", "--n", "10", "--out", dir.string()}).code ==
          cli::kExitOk);
  const MatrixXd k = read_numeric_csv_file((dir / "true_k.csv").string()).values;
  int edges = 0;
  for (Index i = 0; i < 50; ++i)
    for (Index j = i + 1; j < 50; ++j) edges += k(i, j) != 0.0;
  CHECK(edges == 49);
  CHECK(read_numeric_csv_file((dir / "data.csv").string()).values.rows() == 10);

  const fs::path c6 = scratch("simulate_circle");
  REQUIRE(run_cli({"simulate", "--model", "circle", "--p", "6", "--out", c6.string()}).code == cli::kExitOk);
  const MatrixXd kc = read_numeric_csv_file((c6 / "true_k.csv").string()).values;
  CHECK(kc == generate_model({ModelKind::Circle, 6, 0}).k.matrix());

  const RunResult bad = run_cli({"simulate", "--model", "torus", "--out", dir.string()});
  CHECK(bad.code == cli::kExitConfig);
  CHECK(bad.err.find("circle") != std::string::npos);
  CHECK(bad.err.find("scale-free") != std::string::npos);
}

TEST_CASE("rerunning from a manifest reproduces byte-identical outputs") {
  const fs::path dir = scratch("manifest");
  REQUIRE(run_cli({"simulate", "--model", "ar1", "--p", "4", "--n", "25", "--out", dir.string()}).code ==
          cli::kExitOk);
  const fs::path a = dir / "a", b = dir / "b";
  REQUIRE(run_cli({"fit", "--data", (dir / "data.csv").string(), "--iterations", "500", "--burn-in", "100",
                   "--seed", "11", "--svg", "true", "--out", a.string()})
              .code == cli::kExitOk);
  REQUIRE(run_cli({"fit", "--config", (a / "run_manifest.txt").string(), "--out", b.string()}).code == cli::kExitOk);
  for (const auto& name : kFitOutputs) CHECK(read_file((a / name).string()) == read_file((b / name).string()));
  CHECK(read_file((a / "occupancy.svg").string()) == read_file((b / "occupancy.svg").string()));

  // The manifest records the data hash and the seed.
  const KeyValues kv = read_key_values_file((a / "run_manifest.txt").string());
  CHECK(kv.at("seed") == "11");
  CHECK(kv.at("data_hash") == hex64(fnv1a64(read_file((dir / "data.csv").string()))));
  CHECK(kv.at("command") == "fit");

  // A manifest for another command is rejected.
  CHECK(run_cli({"simulate", "--config", (a / "run_manifest.txt").string()}).code == cli::kExitConfig);
}

TEST_CASE("BDG_SEED overrides the config file and the flag overrides both") {
  const fs::path dir = scratch("seed");
  const auto seed_of = [&](const fs::path& out) {
    return read_key_values_file((out / "run_manifest.txt").string()).at("seed");
  };
  write_text(dir / "sim.conf", "command=simulate\nmodel=ar1\np=4\nn=5\nseed=3\n");
  ::setenv("BDG_SEED", "21", 1);
  REQUIRE(run_cli({"simulate", "--config", (dir / "sim.conf").string(), "--out", (dir / "env").string()}).code ==
          cli::kExitOk);
  REQUIRE(run_cli({"simulate", "--config", (dir / "sim.conf").string(), "--seed", "5", "--out",
                   (dir / "flag").string()})
              .code == cli::kExitOk);
  ::unsetenv("BDG_SEED");
  REQUIRE(run_cli({"simulate", "--config", (dir / "sim.conf").string(), "--out", (dir / "file").string()}).code ==
          cli::kExitOk);
  CHECK(seed_of(dir / "env") == "21");
  CHECK(seed_of(dir / "flag") == "5");
  CHECK(seed_of(dir / "file") == "3");
}

TEST_CASE("bench reports and exit codes") {
  const fs::path dir = scratch("bench");
  write_text(dir / "ok.csv", "model,p,n,reps,iterations,burn_in\nar1,4,30,2,300,100\n");
  const RunResult ok = run_cli({"bench", "--scenarios", (dir / "ok.csv").string(), "--out", (dir / "ok").string()});
  CHECK(ok.code == cli::kExitOk);
  CHECK(fs::exists(dir / "ok" / "report.csv"));
  CHECK(fs::exists(dir / "ok" / "reps.csv"));

  write_text(dir / "zero.csv", "model,p,n,reps\nar1,4,30,0\n");
  CHECK(run_cli({"bench", "--scenarios", (dir / "zero.csv").string(), "--out", (dir / "z").string()}).code ==
        cli::kExitConfig);

  // The second scenario cannot be generated, so its reps fail and the run is partial.
  write_text(dir / "mixed.csv", "model,p,n,reps,iterations,burn_in\nar1,4,30,2,300,100\nar2,2,30,2,300,100\n");
  const fs::path mixed = dir / "mixed";
  CHECK(run_cli({"bench", "--scenarios", (dir / "mixed.csv").string(), "--out", mixed.string()}).code ==
        cli::kExitPartial);
  const std::string reps = read_file((mixed / "reps.csv").string());
  CHECK(reps.find(",failed,") != std::string::npos);
  CHECK(reps.find(",ok,") != std::string::npos);

  write_text(dir / "allbad.csv", "model,p,n,reps,iterations,burn_in\nar2,2,30,2,300,100\n");
  CHECK(run_cli({"bench", "--scenarios", (dir / "allbad.csv").string(), "--out", (dir / "ab").string()}).code ==
        cli::kExitNumerical);

  write_text(dir / "badhdr.csv", "kind,p,n,reps\nar1,4,30,1\n");
  CHECK(run_cli({"bench", "--scenarios", (dir / "badhdr.csv").string(), "--out", (dir / "bh").string()}).code ==
        cli::kExitParse);
}

TEST_CASE("timecourse command: time column rules") {
  const fs::path dir = scratch("timecourse_rules");
  write_text(dir / "notime.csv", "a,b,c\n1,2,3\n2,3,1\n3,1,2\n4,2,2\n");
  CHECK(run_cli({"timecourse", "--data", (dir / "notime.csv").string(), "--out", (dir / "x").string()}).code ==
        cli::kExitParse);

  // Times out of order are fine: every sum over t is order free.
  std::ostringstream csv;
  csv << "time,a,b\n";
  Rng rng = make_stream(5);
  for (int t : {3, 0, 7, 1, 5, 2, 6, 4, 9, 8})
    csv << t << ',' << standard_normal(rng) << ',' << standard_normal(rng) << '\n';
  write_text(dir / "shuffled.csv", csv.str());
  const fs::path out = dir / "out";
  CHECK(run_cli({"timecourse", "--data", (dir / "shuffled.csv").string(), "--basis-size", "3", "--iterations",
                 "200", "--burn-in", "50", "--out", out.string()})
            .code == cli::kExitOk);
  CHECK(fs::exists(out / "beta_trace.csv"));
  CHECK(fs::exists(out / "beta_mean.csv"));
  CHECK(fs::exists(out / "phat.csv"));
}

TEST_CASE("timecourse command recovers a planted graph from p=5, T=18 spline data") {
  // Planted truth: the 5-node circle for the residual precision, and mean
  // curves h(t)^T beta_i drawn inside a 4-knot natural spline basis. A single
  // draw of 18 time points is noisy, so F1 is averaged over 10 fixed draws.
  const fs::path dir = scratch("timecourse_fixture");
  const int p = 5, T = 18, draws = 10;
  const TrueModel truth = generate_model({ModelKind::Circle, p, 0});
  const VectorXd times = VectorXd::LinSpaced(T, 0.0, 17.0);
  const SplineBasis basis = natural_cubic_basis(times, 4);
  double f1_sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    Rng rng = make_stream(static_cast<std::uint64_t>(d + 1));
    MatrixXd beta(4, p);
    for (Index r = 0; r < 4; ++r)
      for (Index i = 0; i < p; ++i) beta(r, i) = 2.0 * standard_normal(rng);
    const MvnSample noise = sample_mvn(truth.sigma, T, rng);
    const MatrixXd x = basis.design(times) * beta + noise.x;
    std::ostringstream csv;
    csv << "time,g0,g1,g2,g3,g4\n";
    for (Index t = 0; t < T; ++t) {
      csv << format_double(times(t));
      for (Index i = 0; i < p; ++i) csv << ',' << format_double(x(t, i));
      csv << '\n';
    }
    const fs::path data = dir / ("data" + std::to_string(d) + ".csv");
    const fs::path out = dir / ("out" + std::to_string(d));
    write_text(data, csv.str());
    REQUIRE(run_cli({"timecourse", "--data", data.string(), "--basis-size", "4", "--iterations", "20000",
                     "--burn-in", "5000", "--seed", "1", "--out", out.string()})
                .code == cli::kExitOk);
    const MatrixXd phat = read_numeric_csv_file((out / "phat.csv").string()).values;
    f1_sum += f1_score(threshold_graph(phat, 0.5), truth.graph);
  }
  const double f1 = f1_sum / draws;
  MESSAGE("timecourse fixture mean F1 = " << f1);
  CHECK(f1 >= 0.8);
}

TEST_CASE("version flag") {
  const RunResult r = run_cli({"--version"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find(cli::version()) != std::string::npos);
  CHECK(run_cli({}).code == cli::kExitConfig);
}
