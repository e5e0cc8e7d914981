// Drives the built CLI binary end to end: synth -> extract -> rank, plus
// error-path exit codes. The binary path arrives as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        std::fprintf(stderr, "FAIL: %s\n", what.c_str());
    }
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_smoke <path-to-respire-binary>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path work = fs::temp_directory_path() / "respire_cli_smoke";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string corpus = (work / "corpus").string();
    const std::string data = (work / "data").string();
    const std::string ranked = (work / "ranked").string();
    const std::string log = (work / "out.log").string();
    const std::string errlog = (work / "err.log").string();

    check(run(cli + " synth --out " + corpus + " --n 4 --seed 5 > " + log) == 0,
          "synth exits 0");
    check(fs::exists(fs::path(corpus) / "manifest.csv"), "manifest written");

    check(run(cli + " extract --manifest " + corpus + "/manifest.csv --out " + data +
              " --seed 5 --workers 2 > " + log) == 0,
          "extract exits 0");
    check(fs::exists(fs::path(data) / "dataset_bc.csv"), "datasets written");

    check(run(cli + " rank --data " + data + " --out " + ranked +
              " --models lr --subsets time --sample-types b --folds 2 --seed 5 > " +
              log) == 0,
          "rank exits 0");
    check(fs::exists(fs::path(ranked) / "report.json"), "report written");
    check(fs::exists(fs::path(ranked) / "table.txt"), "table written");

    // config file + --set override path
    const fs::path cfg = work / "run.cfg";
    std::ofstream(cfg) << "seed=5\nn_folds=2\nmodels=lr\nsubsets=time\n"
                       << "sample_types=b\n";
    check(run(cli + " rank --config " + cfg.string() + " --set plots=1 --data " +
              data + " --out " + ranked + "2 > " + log) == 0,
          "rank with config file exits 0");
    check(fs::exists(fs::path(ranked + "2") / "plots" / "roc_B.svg"),
          "plots emitted when requested");

    // error paths: non-zero exit and machine-readable JSON on stderr
    const int rc_missing =
        run(cli + " extract --manifest " + data + "/nope.csv --out " + data + " 2> " +
            errlog + " > " + log);
    check(rc_missing != 0, "missing manifest exits non-zero");
    const std::string err = slurp(errlog);
    check(err.find("\"error\"") != std::string::npos, "error JSON on stderr");
    check(err.find("\"code\"") != std::string::npos, "error JSON carries a code");

    const int rc_badkey = run(cli + " rank --data " + data + " --out " + ranked +
                              " --set nonsense=1 2> " + errlog + " > " + log);
    check(rc_badkey != 0, "unknown config key exits non-zero");

    const int rc_badflag =
        run(cli + " frobnicate 2> " + errlog + " > " + log);
    check(rc_badflag != 0, "unknown subcommand exits non-zero");

    if (g_failures == 0) {
        std::printf("cli_smoke: all checks passed\n");
    }
    return g_failures == 0 ? 0 : 1;
}
