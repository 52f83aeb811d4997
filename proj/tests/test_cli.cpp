#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bie/dataset_io.hpp"
#include "bie/trig.hpp"

// BIE_CLI_PATH is injected by the build: absolute path of the bie binary.

namespace {

namespace fs = std::filesystem;

struct cli_env {
    fs::path dir;
    explicit cli_env(const std::string& name) {
        dir = fs::path("/tmp") /
              ("bie_cli_" + std::to_string(::getpid()) + "_" + name);
        fs::create_directories(dir);
    }
    ~cli_env() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& leaf) const {
        return (dir / leaf).string();
    }
};

struct run_result {
    int status = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Runs the CLI with the given arguments; stdout/stderr captured via files.
run_result run(const cli_env& env, const std::string& args,
               const std::string& tag, const std::string& env_prefix = "") {
    const std::string so = env.path(tag + ".out");
    const std::string se = env.path(tag + ".err");
    const std::string cmd = env_prefix + std::string(BIE_CLI_PATH) + " " +
                            args + " > " + so + " 2> " + se;
    run_result r;
    const int rc = std::system(cmd.c_str());
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// First line that starts with the prefix.
std::string line_with(const std::string& text, const std::string& prefix) {
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind(prefix, 0) == 0) return line;
    return {};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(s);
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

bool has_png_signature(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    unsigned char sig[8] = {};
    f.read(reinterpret_cast<char*>(sig), 8);
    const unsigned char want[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    for (int i = 0; i < 8; ++i)
        if (sig[i] != want[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("end-to-end workflow: generate, train, evaluate, reconstruct") {
    cli_env env("flow");

    // --- boundaries: deterministic in file and on stdout
    const std::string bfile = env.path("b.bieb");
    run_result gb1 = run(env,
                         "gen-boundaries --count 6 --order 6 --seed 3 --out " +
                             bfile,
                         "gb1");
    REQUIRE(gb1.status == 0);
    CHECK(contains(gb1.out, "boundaries: 6 -> "));
    CHECK(contains(gb1.out, "acceptance rate:"));
    CHECK(contains(gb1.out, "max-curvature histogram"));

    const std::string bfile2 = env.path("b2.bieb");
    run_result gb2 = run(env,
                         "gen-boundaries --count 6 --order 6 --seed 3 --out " +
                             bfile2,
                         "gb2");
    REQUIRE(gb2.status == 0);
    CHECK(bie::files_identical(bfile, bfile2));
    // stdout identical apart from the output path itself
    CHECK(line_with(gb1.out, "acceptance rate:") ==
          line_with(gb2.out, "acceptance rate:"));

    // --- dataset: record count, rerun byte-identical, thread-invariant
    const std::string dfile = env.path("ds.bied");
    const std::string gen_args =
        "gen-dataset --boundaries " + bfile +
        " --per-boundary 3 --n-f 6 --seed 4 --out ";
    run_result gd1 = run(env, gen_args + dfile, "gd1");
    REQUIRE(gd1.status == 0);
    CHECK(contains(gd1.out, "records: 18 -> "));
    CHECK(contains(gd1.out, "worst round-trip residual:"));

    const bie::dataset ds = bie::read_dataset(dfile);
    CHECK(ds.records.size() == 18);
    CHECK(ds.n_f == 6);
    CHECK(ds.n_b == 6);

    const std::string dfile2 = env.path("ds2.bied");
    run_result gd2 = run(env, gen_args + dfile2, "gd2");
    REQUIRE(gd2.status == 0);
    CHECK(bie::files_identical(dfile, dfile2));

    const std::string dfile3 = env.path("ds3.bied");
    run_result gd3 = run(env, gen_args + dfile3, "gd3", "BIE_THREADS=2 ");
    REQUIRE(gd3.status == 0);
    CHECK(bie::files_identical(dfile, dfile3));

    // --- training: artifacts exist, reruns are bitwise identical
    const std::string train_args = "train --dataset " + dfile +
                                   " --model tdonet --hidden 16,16 --epochs 5"
                                   " --batch 8 --split 0.75 --seed 9 --out ";
    run_result tr1 = run(env, train_args + env.path("run1"), "tr1");
    REQUIRE(tr1.status == 0);
    CHECK(contains(tr1.out, "model: tdonet"));
    CHECK(contains(tr1.out, "parameters: "));
    CHECK(contains(tr1.out, "best test loss: "));
    CHECK(fs::exists(env.path("run1") + "/checkpoint.biop"));
    CHECK(fs::exists(env.path("run1") + "/training_log.csv"));

    run_result tr2 = run(env, train_args + env.path("run2"), "tr2");
    REQUIRE(tr2.status == 0);
    CHECK(bie::files_identical(env.path("run1") + "/checkpoint.biop",
                               env.path("run2") + "/checkpoint.biop"));
    CHECK(bie::files_identical(env.path("run1") + "/training_log.csv",
                               env.path("run2") + "/training_log.csv"));
    CHECK(line_with(tr1.out, "best test loss:") ==
          line_with(tr2.out, "best test loss:"));

    // --- eval: exact header, metrics deterministic except the timing column
    const std::string eval_args = "eval --dataset " + dfile + " --checkpoint " +
                                  env.path("run1") + "/checkpoint.biop" +
                                  " --split 0.75 --seed 9";
    run_result ev1 = run(env, eval_args, "ev1");
    REQUIRE(ev1.status == 0);
    const std::vector<std::string> lines1 = split(ev1.out, '\n');
    REQUIRE(lines1.size() >= 2);
    CHECK(lines1[0] == "MNE,MRE,variance-MNE,variance-MRE,Mean-Time/ms");
    const std::vector<std::string> row1 = split(lines1[1], ',');
    REQUIRE(row1.size() == 5);

    run_result ev2 = run(env, eval_args, "ev2");
    REQUIRE(ev2.status == 0);
    const std::vector<std::string> row2 = split(split(ev2.out, '\n')[1], ',');
    REQUIRE(row2.size() == 5);
    for (int c = 0; c < 4; ++c) CHECK(row1[c] == row2[c]);

    // --full evaluates all records instead of the held-out split
    run_result evf = run(env, eval_args + " --full", "evf");
    REQUIRE(evf.status == 0);

    // --- field reconstruction artifacts
    const std::string fdir = env.path("fld");
    run_result fd = run(env,
                        "field --dataset " + dfile + " --checkpoint " +
                            env.path("run1") + "/checkpoint.biop" +
                            " --record 0 --nx 24 --ny 24 --quad 256 --out " +
                            fdir,
                        "fd");
    REQUIRE(fd.status == 0);
    CHECK(contains(fd.out, "field points: "));
    CHECK(contains(fd.out, "max abs error vs stored density: "));
    CHECK(fs::exists(fdir + "/field.csv"));
    CHECK(has_png_signature(fdir + "/u.png"));
    CHECK(has_png_signature(fdir + "/reference.png"));
    CHECK(has_png_signature(fdir + "/abs_error.png"));
    std::ifstream csv(fdir + "/field.csv");
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header.rfind("x,y,v0", 0) == 0);
}

TEST_CASE("solve on the default unit circle pins the analytic density") {
    cli_env env("solve");
    run_result r = run(env,
                       "solve --kind interior_dirichlet --n 8 --rhs 0,1"
                       " --cross-check",
                       "sv");
    REQUIRE(r.status == 0);

    const std::string res = line_with(r.out, "galerkin residual:");
    REQUIRE(!res.empty());
    CHECK(std::stod(split(res, ':')[1]) <= 1e-10);

    // f = cos t on the unit circle: density = -2 cos t
    const std::string dens = line_with(r.out, "density:");
    REQUIRE(!dens.empty());
    const std::vector<std::string> toks = split(dens, ' ');
    REQUIRE(toks.size() == 2 + 2 * 8);  // "density:" + 17 coefficients
    CHECK(std::fabs(std::stod(toks[1]) - 0.0) <= 1e-10);   // c0
    CHECK(std::fabs(std::stod(toks[2]) - (-2.0)) <= 1e-8);  // a1
    for (std::size_t i = 3; i < toks.size(); ++i)
        CHECK(std::fabs(std::stod(toks[i])) <= 1e-8);

    const std::string cross = line_with(r.out, "cross-check relative l2:");
    REQUIRE(!cross.empty());
    CHECK(std::stod(split(cross, ':')[1]) <= 1e-6);

    // density csv on demand
    const std::string csv = env.path("density.csv");
    run_result r2 = run(env,
                        "solve --kind interior_dirichlet --n 4 --rhs 0,1"
                        " --out " + csv,
                        "sv2");
    REQUIRE(r2.status == 0);
    std::ifstream f(csv);
    std::string header;
    REQUIRE(std::getline(f, header));
    CHECK(header == "index,coefficient");
    std::size_t rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    CHECK(rows == bie::coeff_len(4));
}

TEST_CASE("named presets resolve relative to the binary") {
    cli_env env("preset");
    run_result r = run(env, "solve --preset desk", "ps");
    REQUIRE(r.status == 0);
    CHECK(contains(r.out, "galerkin residual:"));
    CHECK(contains(r.out, "density:"));

    run_result bad = run(env, "solve --preset no_such_preset", "psbad");
    CHECK(bad.status == 2);
    CHECK(contains(bad.err, "error: io_error"));
}

TEST_CASE("failures map to named error classes and exit codes") {
    cli_env env("errors");

    run_result bad_kind =
        run(env, "solve --kind poisson --n 4", "badkind");
    CHECK(bad_kind.status == 2);
    CHECK(contains(bad_kind.err, "error: invalid_argument"));

    run_result missing = run(env,
                             "gen-dataset --boundaries " +
                                 env.path("absent.bieb"),
                             "missing");
    CHECK(missing.status == 2);
    CHECK(contains(missing.err, "error: io_error"));

    run_result no_flag = run(env, "train", "noflag");
    CHECK(no_flag.status != 0);
    CHECK(!no_flag.err.empty());

    run_result no_sub = run(env, "", "nosub");
    CHECK(no_sub.status != 0);
}
