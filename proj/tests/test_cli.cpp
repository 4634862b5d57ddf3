// Exercises the installed command line end to end: spawns the real binary,
// checks exit codes, output files and determinism contracts. The binary
// path arrives as the first non-flag argument (wired up by ctest).

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "relsim/parallel.hpp"

namespace {

std::string g_cli;
std::string g_dir;

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd = g_cli + " " + args + " > " + stdout_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string planted_dataset(int n) {
    std::ostringstream ss;
    ss << "vertex_type Node color:discrete\n";
    ss << "edge_type Link 2\n";
    ss << "target Node\n";
    for (int i = 0; i < n; ++i) {
        const bool first = i < n / 2;
        ss << "v Node n" << i << " color=" << (first ? "red" : "blue") << "\n";
        ss << "label n" << i << " " << (first ? "r" : "b") << "\n";
    }
    return ss.str();
}

std::string fig3_dataset() {
    return "vertex_type object Attr1:discrete\n"
           "vertex_type element\n"
           "edge_type R 2\n"
           "edge_type F 3\n"
           "target object\n"
           "v object A Attr1=X\n"
           "v object B Attr1=Y\n"
           "v element C\nv element D\nv element E\n"
           "e R A C\ne R A D\ne R B E\ne F A B D\n";
}

} // namespace

TEST_CASE("distances: defaults, components, determinism, failures") {
    const std::string ds = g_dir + "/planted.rsd";
    spit(ds, planted_dataset(16));

    SUBCASE("default run writes a parsable matrix") {
        CHECK(run("distances " + ds + " --out " + g_dir + "/m.csv") == 0);
        const std::string text = slurp(g_dir + "/m.csv");
        CHECK(text.substr(0, 5) == "n0,n1");
        CHECK(std::count(text.begin(), text.end(), '\n') == 17); // header + 16 rows
    }
    SUBCASE("defaults are weights 0.2 each at depth 1") {
        CHECK(run("distances " + ds + " --out " + g_dir + "/def.csv") == 0);
        CHECK(run("distances " + ds +
                  " --depth 1 --weights 0.2 0.2 0.2 0.2 0.2 --out " + g_dir + "/expl.csv") == 0);
        const std::string a = slurp(g_dir + "/def.csv");
        CHECK(!a.empty());
        CHECK(a == slurp(g_dir + "/expl.csv"));
    }
    SUBCASE("projection weights reproduce the ad component file") {
        CHECK(run("distances " + ds + " --weights 1 0 0 0 0 --out " + g_dir +
                  "/proj.csv --emit-components " + g_dir + "/comp") == 0);
        CHECK(slurp(g_dir + "/proj.csv") == slurp(g_dir + "/comp.ad.csv"));
    }
    SUBCASE("worker count does not change the output bytes") {
        CHECK(run("distances " + ds + " --workers 1 --out " + g_dir + "/w1.csv") == 0);
        CHECK(run("distances " + ds + " --workers 8 --out " + g_dir + "/w8.csv") == 0);
        const std::string a = slurp(g_dir + "/w1.csv");
        CHECK(!a.empty());
        CHECK(a == slurp(g_dir + "/w8.csv"));
    }
    SUBCASE("weights that do not sum to 1 are a usage error") {
        CHECK(run("distances " + ds + " --weights 1 1 0 0 0 --out " + g_dir + "/x.csv") == 2);
    }
    SUBCASE("depth 0 is a usage error") {
        CHECK(run("distances " + ds + " --depth 0 --out " + g_dir + "/x.csv") == 2);
    }
    SUBCASE("a malformed dataset is a data error") {
        spit(g_dir + "/broken.rsd", "vertex_type T\ntarget T\ne Nope a b\n");
        CHECK(run("distances " + g_dir + "/broken.rsd --out " + g_dir + "/x.csv") == 1);
    }
    SUBCASE("a missing file is a data error") {
        CHECK(run("distances " + g_dir + "/absent.rsd --out " + g_dir + "/x.csv") == 1);
    }
}

TEST_CASE("cluster: assignment, report, usage errors") {
    const std::string ds = g_dir + "/planted2.rsd";
    spit(ds, planted_dataset(12));
    REQUIRE(run("distances " + ds + " --weights 1 0 0 0 0 --out " + g_dir + "/pm.csv") == 0);
    std::ostringstream labels;
    for (int i = 0; i < 12; ++i) labels << "n" << i << " " << (i < 6 ? "r" : "b") << "\n";
    spit(g_dir + "/labels.txt", labels.str());

    SUBCASE("agglomerative recovers the classes and reports ARI 1") {
        CHECK(run("cluster " + g_dir + "/pm.csv --k 2 --labels " + g_dir +
                  "/labels.txt --ari --out " + g_dir + "/assign.txt --report " + g_dir +
                  "/rep.json") == 0);
        const auto rep = nlohmann::json::parse(slurp(g_dir + "/rep.json"));
        CHECK(rep.at("task") == "clustering");
        CHECK(rep.at("ari").get<double>() == 1.0);
        const std::string assign = slurp(g_dir + "/assign.txt");
        CHECK(assign.find("n0 0\n") != std::string::npos);
        CHECK(assign.find("n11 1\n") != std::string::npos);
    }
    SUBCASE("spectral method works through the CLI") {
        CHECK(run("cluster " + g_dir + "/pm.csv --k 2 --method spectral --seed 3 --labels " +
                  g_dir + "/labels.txt --report " + g_dir + "/rep2.json") == 0);
        const auto rep = nlohmann::json::parse(slurp(g_dir + "/rep2.json"));
        CHECK(rep.at("ari").get<double>() == 1.0);
    }
    SUBCASE("requesting ARI without labels is a usage error") {
        CHECK(run("cluster " + g_dir + "/pm.csv --k 2 --ari") == 2);
    }
    SUBCASE("bad k is a usage error") {
        CHECK(run("cluster " + g_dir + "/pm.csv --k 0") == 2);
    }
}

TEST_CASE("knn: reports, tuning, determinism") {
    const std::string ds = g_dir + "/planted3.rsd";
    spit(ds, planted_dataset(20));

    SUBCASE("plain cross-validation is seed-stable") {
        CHECK(run("knn " + ds + " --no-tune --folds 5 --k 3 --seed 11 --report " + g_dir +
                  "/k1.json") == 0);
        CHECK(run("knn " + ds + " --no-tune --folds 5 --k 3 --seed 11 --report " + g_dir +
                  "/k2.json") == 0);
        const auto a = nlohmann::json::parse(slurp(g_dir + "/k1.json"));
        const auto b = nlohmann::json::parse(slurp(g_dir + "/k2.json"));
        CHECK(a.at("fold_accuracy") == b.at("fold_accuracy"));
        CHECK(a.at("mean_accuracy") == b.at("mean_accuracy"));
        CHECK(a.at("task") == "classification");
    }
    SUBCASE("tuning with a degenerate grid equals the untuned run") {
        CHECK(run("knn " + ds + " --no-tune --folds 4 --k 3 --seed 5 --weights 1 0 0 0 0 "
                  "--report " + g_dir + "/plain.json") == 0);
        CHECK(run("knn " + ds + " --tune --grid-step 0 --folds 4 --k 3 --seed 5 "
                  "--weights 1 0 0 0 0 --report " + g_dir + "/tuned.json") == 0);
        const auto plain = nlohmann::json::parse(slurp(g_dir + "/plain.json"));
        const auto tuned = nlohmann::json::parse(slurp(g_dir + "/tuned.json"));
        CHECK(plain.at("fold_accuracy") == tuned.at("fold_accuracy"));
    }
    SUBCASE("unlabeled data cannot be evaluated") {
        spit(g_dir + "/nolabels.rsd",
             "vertex_type T c:discrete\ntarget T\nv T a c=x\nv T b c=y\n");
        CHECK(run("knn " + g_dir + "/nolabels.rsd --no-tune") == 2);
    }
    SUBCASE("fewer than two folds is a usage error") {
        CHECK(run("knn " + ds + " --no-tune --folds 1") == 2);
    }
    SUBCASE("a bad grid step is a usage error") {
        CHECK(run("knn " + ds + " --tune --grid-step 0.3") == 2);
    }
}

TEST_CASE("RELSIM_WORKERS is the fallback for --workers") {
    setenv("RELSIM_WORKERS", "3", 1);
    CHECK(relsim::resolve_workers(0) == 3);
    CHECK(relsim::resolve_workers(5) == 5); // explicit flag wins
    unsetenv("RELSIM_WORKERS");
    CHECK(relsim::resolve_workers(0) >= 1);
}

TEST_CASE("inspect-tree") {
    const std::string ds = g_dir + "/fig3.rsd";
    spit(ds, fig3_dataset());

    SUBCASE("depth-1 dump of the worked example") {
        CHECK(run("inspect-tree " + ds + " --vertex A --depth 1", g_dir + "/tree.txt") == 0);
        const std::string text = slurp(g_dir + "/tree.txt");
        CHECK(text == "root A\ndepth 1\nlevel 1\n  v B x1\n  v C x1\n  v D x1\n"
                      "  e (F,1) x1\n  e (R,1) x2\n");
    }
    SUBCASE("unknown vertex is a usage error") {
        CHECK(run("inspect-tree " + ds + " --vertex ZZ --depth 1") == 2);
    }
    SUBCASE("depth 0 is a usage error") {
        CHECK(run("inspect-tree " + ds + " --vertex A --depth 0") == 2);
    }
}

int main(int argc, char** argv) {
    doctest::Context context;
    std::vector<char*> pass;
    pass.push_back(argv[0]);
    for (int i = 1; i < argc; ++i) {
        if (g_cli.empty() && argv[i][0] != '-') {
            g_cli = argv[i];
            continue;
        }
        pass.push_back(argv[i]);
    }
    if (g_cli.empty()) {
        if (const char* env = std::getenv("RELSIM_CLI")) g_cli = env;
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-relsim> [doctest args]\n");
        return 1;
    }
    char scratch[] = "/tmp/relsim_cli_XXXXXX";
    if (!mkdtemp(scratch)) {
        std::fprintf(stderr, "cannot create scratch directory\n");
        return 1;
    }
    g_dir = scratch;
    context.applyCommandLine(static_cast<int>(pass.size()), pass.data());
    const int rc = context.run();
    std::system(("rm -rf " + g_dir).c_str());
    return rc;
}
