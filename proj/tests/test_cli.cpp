// Spawns the actual CLI binary (path given as argv[1]) and checks exit codes,
// artifacts and the error reporting contract.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAIL: " << what << "\n";
  }
}

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  std::string full = cmd + " 2>/tmp/mvnw_cli_stderr.txt";
  int status = std::system(full.c_str());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f("/tmp/mvnw_cli_stderr.txt");
  std::ostringstream ss;
  ss << f.rdbuf();
  r.stderr_text = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <mvnw binary>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const std::string dir = (fs::temp_directory_path() / "mvnw_cli_test").string();
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::string micro =
      " --set bank.speech_clips=4 --set bank.noise_clips=4"
      " --set model.hidden=4 --set train.epochs=1 --set train.batches_per_epoch=2"
      " --set train.batch_size=2 --set train.channels=2 --set train.val_mixtures=2"
      " --set eval.k_values=2 --set eval.runs=1 --set eval.mixtures_per_row=1"
      " --set eval.schemes=decreasing --set data.mixtures=6";

  // gen-data: determinism across runs of the same seed
  check(run(bin + " gen-data --out " + dir + "/g1 --seed 3" + micro).exit_code == 0,
        "gen-data exit 0");
  check(run(bin + " gen-data --out " + dir + "/g2 --seed 3" + micro).exit_code == 0,
        "gen-data twice");
  check(slurp(dir + "/g1/manifest.txt") == slurp(dir + "/g2/manifest.txt"),
        "identical manifests for one seed");
  check(!slurp(dir + "/g1/manifest.txt").empty(), "manifest not empty");
  check(fs::exists(dir + "/g1/config_resolved.cfg"), "resolved config written");

  // train -> eval -> plot
  check(run(bin + " train --out " + dir + "/t --seed 3" + micro).exit_code == 0,
        "train exit 0");
  check(fs::exists(dir + "/t/checkpoint.bin"), "checkpoint written");
  check(fs::exists(dir + "/t/training_curve.csv"), "curve written");
  check(run(bin + " eval --checkpoint " + dir + "/t/checkpoint.bin --out " + dir +
            "/e --seed 3" + micro)
                .exit_code == 0,
        "eval exit 0");
  check(fs::exists(dir + "/e/report_raw.csv"), "raw report written");
  check(fs::exists(dir + "/e/report_agg.csv"), "aggregate report written");
  check(run(bin + " plot --report " + dir + "/e/report_raw.csv --out " + dir + "/p")
                .exit_code == 0,
        "plot exit 0");
  check(fs::exists(dir + "/p/plot_decreasing.svg"), "svg written");

  // simulate
  check(run(bin + " simulate --out " + dir + "/s --seed 4 --set room.scenes=2"
                  " --set room.mics=3")
                .exit_code == 0,
        "simulate exit 0");

  // config file + override
  {
    std::ofstream f(dir + "/run.cfg");
    f << "config_version=1\nseed=11\ndata.mixtures=3\nbank.speech_clips=4\n"
         "bank.noise_clips=4\ndata.channels=2\n";
  }
  check(run(bin + " gen-data --config " + dir + "/run.cfg --out " + dir + "/gc").exit_code ==
            0,
        "gen-data from config file");

  // failure contract: nonzero exit, single-line machine-readable category
  RunResult bad = run(bin + " gen-data --out " + dir + "/bad --set data.channels=0" + micro);
  check(bad.exit_code != 0, "invalid config fails");
  check(bad.stderr_text.rfind("error:config:", 0) == 0, "error category line");
  check(bad.stderr_text.find('\n') == bad.stderr_text.size() - 1, "single-line error");

  RunResult bad2 = run(bin + " train --out " + dir + "/bad2 --set data.manifest=/nope.txt" +
                       micro);
  check(bad2.exit_code != 0, "missing manifest fails");
  check(bad2.stderr_text.rfind("error:io:", 0) == 0, "io error category");
  check(!fs::exists(dir + "/bad2/checkpoint.bin"), "no checkpoint on failure");

  RunResult badcfg = run(bin + " gen-data --config /does/not/exist.cfg --out " + dir + "/x");
  check(badcfg.exit_code != 0, "missing config file fails");

  fs::remove_all(dir);
  if (failures == 0) {
    std::puts("test_cli: all checks passed");
    return 0;
  }
  std::cerr << failures << " CLI checks failed\n";
  return 1;
}
