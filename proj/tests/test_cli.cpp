#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("s2an2_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::string cli_binary() {
  const char* env = std::getenv("S2AN2_CLI");
  REQUIRE_MESSAGE(env != nullptr, "S2AN2_CLI must point at the CLI binary");
  return env;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const TempDir& dir) {
  const fs::path log = dir.path / "out.log";
  const std::string command =
      "cd '" + dir.path.string() + "' && '" + cli_binary() + "' " + args + " > '" + log.string() +
      "' 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log, std::ios::binary);
  result.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  CHECK(run("synth-tabular --seed 7", dir).exit_code == 2);  // missing --out
  CHECK(run("", dir).exit_code == 2);                        // missing subcommand
  CHECK(run("no-such-command", dir).exit_code == 2);
  CHECK(run("train --data x.csv --mode nope --out-model m.txt", dir).exit_code == 2);
  CHECK(run("--help", dir).exit_code == 0);
}

TEST_CASE("synth-tabular is deterministic and writes both files") {
  TempDir dir;
  const std::string flags = "synth-tabular --seed 7 --n 200 --d 13 --k 10 --informative 0,1,2,3,4";
  const RunResult a = run(flags + " --out run_a", dir);
  CHECK(a.exit_code == 0);
  CHECK(a.output.find("run_a.csv") != std::string::npos);
  CHECK(fs::exists(dir.path / "run_a.csv"));
  CHECK(fs::exists(dir.path / "run_a.truth.json"));

  const RunResult b = run(flags + " --out run_b", dir);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir.path / "run_a.csv") == slurp(dir.path / "run_b.csv"));
}

TEST_CASE("tabular pipeline: train, rank, refine, eval, report") {
  TempDir dir;
  REQUIRE(run("synth-tabular --seed 3 --n 300 --d 8 --k 4 --informative 0,1,2 --out data", dir)
              .exit_code == 0);

  // --lr 0 saves a model identical to a freshly built one (same seed)
  const RunResult zero_a =
      run("train --data data.csv --mode tabular --out-model zero_a.txt --seed 5 --lr 0 "
          "--epochs 2",
          dir);
  CHECK(zero_a.exit_code == 0);
  const RunResult zero_b =
      run("train --data data.csv --mode tabular --out-model zero_b.txt --seed 5 --lr 0 "
          "--epochs 1",
          dir);
  CHECK(zero_b.exit_code == 0);
  CHECK(slurp(dir.path / "zero_a.txt") == slurp(dir.path / "zero_b.txt"));

  // real training run reaches the target and is flag-deterministic
  const std::string train_flags =
      "train --data data.csv --mode tabular --seed 5 --target-mse 0.05 --epochs 200 "
      "--class-hidden 10,2 --integrator-hidden 8";
  const RunResult t1 = run(train_flags + " --out-model model1.txt --stats-out stats1.json", dir);
  CHECK(t1.exit_code == 0);
  CHECK(t1.output.find("epoch 1 mse") != std::string::npos);
  const RunResult t2 = run(train_flags + " --out-model model2.txt", dir);
  CHECK(t2.exit_code == 0);
  CHECK(slurp(dir.path / "model1.txt") == slurp(dir.path / "model2.txt"));

  // nonexistent data path: runtime error, exit 1
  CHECK(run("train --data missing.csv --mode tabular --out-model x.txt", dir).exit_code == 1);

  // rank: sorted by normalized score descending; informative features on top
  const RunResult ranked = run("rank --model model1.txt --out plan.csv --cutoff 0.5", dir);
  CHECK(ranked.exit_code == 0);
  {
    std::ifstream in(dir.path / "plan.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,raw_score,normalized_score,kept");
    double previous = 2.0;
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const std::size_t c1 = line.find(',');
      const std::size_t c2 = line.find(',', c1 + 1);
      const std::size_t c3 = line.find(',', c2 + 1);
      const double normalized = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
      CHECK(normalized <= previous);
      previous = normalized;
      ++rows;
    }
    CHECK(rows == 8);
  }

  // impossible cutoff: runtime error, exit 1
  CHECK(run("rank --model model1.txt --out bad.csv --cutoff 1.1", dir).exit_code == 1);

  // refine in both modes
  const RunResult pruned =
      run("refine --model model1.txt --plan plan.csv --prune --out-model pruned.txt", dir);
  CHECK(pruned.exit_code == 0);
  CHECK(pruned.output.find("mode prune") != std::string::npos);
  CHECK(pruned.output.find("parameters before") != std::string::npos);

  const RunResult retrained = run(
      "refine --model model1.txt --plan plan.csv --retrain --data data.csv --seed 5 "
      "--target-mse 0.05 --epochs 200 --out-model refined.txt --stats-out rstats.json",
      dir);
  CHECK(retrained.exit_code == 0);
  CHECK(retrained.output.find("mode retrain") != std::string::npos);

  // refine without a mode flag: usage error
  CHECK(run("refine --model model1.txt --plan plan.csv --out-model x.txt", dir).exit_code == 2);
  CHECK(run("refine --model model1.txt --plan plan.csv --retrain --out-model x.txt", dir)
            .exit_code == 2);

  // eval original and refined (the plan reduces the data for the refined model)
  REQUIRE(run("synth-tabular --seed 31 --n 200 --d 8 --k 4 --informative 0,1,2 --out test", dir)
              .exit_code == 0);
  const RunResult e1 =
      run("eval --model model1.txt --data test.csv --out orig.json --train-stats stats1.json",
          dir);
  CHECK(e1.exit_code == 0);
  CHECK(e1.output.find("accuracy") != std::string::npos);
  const RunResult e2 =
      run("eval --model refined.txt --data test.csv --plan plan.csv --out refined.json", dir);
  CHECK(e2.exit_code == 0);

  // pruned model evaluates identically to the original on reduced inputs? No:
  // pruned drops inputs entirely; here we just check it loads and runs.
  const RunResult e3 =
      run("eval --model pruned.txt --data test.csv --plan plan.csv --out pruned.json", dir);
  CHECK(e3.exit_code == 0);

  // report merges the two JSONs
  const RunResult rep = run("report --original orig.json --refined refined.json "
                            "--out-prefix cmp", dir);
  CHECK(rep.exit_code == 0);
  CHECK(rep.output.find("classification") != std::string::npos);
  CHECK(rep.output.find("parameter count") != std::string::npos);
  CHECK(rep.output.find("train seconds") != std::string::npos);
  CHECK(fs::exists(dir.path / "cmp.csv"));
  const std::string csv = slurp(dir.path / "cmp.csv");
  CHECK(csv.find("section,metric,original,refined,ratio") != std::string::npos);
  // train seconds of the refined side were never provided
  CHECK(csv.find("n/a") != std::string::npos);
}

TEST_CASE("movie pipeline: synth, train, rank, refine, eval") {
  TempDir dir;
  REQUIRE(run("synth-movies --seed 2 --n 24 --frames 4 --height 8 --width 8 --bbox 2,2,3,3 "
              "--signal-frames 1,2 --out mov",
              dir)
              .exit_code == 0);
  CHECK(fs::exists(dir.path / "mov.manifest.csv"));
  CHECK(fs::exists(dir.path / "mov_0000.s2frm"));

  const RunResult trained =
      run("train --data mov.manifest.csv --mode movie --out-model movie.txt --seed 2 "
          "--epochs 8 --lr 0.05 --frame-hidden 6 --class-hidden 4 --integrator-hidden 3",
          dir);
  CHECK(trained.exit_code == 0);

  const RunResult ranked =
      run("rank --model movie.txt --out movplan.csv --cutoff-rule meanvar --alpha 0.3", dir);
  CHECK(ranked.exit_code == 0);
  CHECK(ranked.output.find("bbox") != std::string::npos);
  CHECK(fs::exists(dir.path / "movplan.pixels.s2frm"));
  const std::string plan_text = slurp(dir.path / "movplan.csv");
  CHECK(plan_text.find("# bbox,") != std::string::npos);

  const RunResult pruned =
      run("refine --model movie.txt --plan movplan.csv --prune --out-model movpruned.txt", dir);
  CHECK(pruned.exit_code == 0);

  const RunResult retrained =
      run("refine --model movie.txt --plan movplan.csv --retrain --data mov.manifest.csv "
          "--seed 2 --epochs 4 --lr 0.05 --out-model movrefined.txt",
          dir);
  CHECK(retrained.exit_code == 0);

  const RunResult evaluated =
      run("eval --model movrefined.txt --data mov.manifest.csv --plan movplan.csv "
          "--out movref.json",
          dir);
  CHECK(evaluated.exit_code == 0);
}

TEST_CASE("gradcheck presets") {
  TempDir dir;
  const RunResult tab = run("gradcheck --spec-preset tiny-tabular --seeds 20", dir);
  CHECK(tab.exit_code == 0);
  CHECK(tab.output.find("gradcheck PASS") != std::string::npos);
  CHECK(tab.output.find("worst") != std::string::npos);

  const RunResult mov = run("gradcheck --spec-preset tiny-movie --seeds 5", dir);
  CHECK(mov.exit_code == 0);

  // an impossible tolerance must flip the exit code
  const RunResult strict = run("gradcheck --spec-preset tiny-tabular --seeds 2 --tolerance 0", dir);
  CHECK(strict.exit_code == 1);
  CHECK(strict.output.find("gradcheck FAIL") != std::string::npos);

  CHECK(run("gradcheck --spec-preset nope", dir).exit_code == 2);
}
