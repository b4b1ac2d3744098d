#include "duhem/io/config.hpp"

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "duhem_cli_test";

struct Run {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    fs::create_directories(work);
    const auto out = work / "stdout.txt", err = work / "stderr.txt";
    const std::string cmd = std::string(DUHEM_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string cfg(const std::string& name) { return std::string(DUHEM_CONFIG_DIR) + "/" + name + ".json"; }

} // namespace

TEST_CASE("simulate writes a CSV trajectory") {
    const auto r = run("simulate --config " + cfg("fig3") + " --output -");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("step,t,u,y,branch\n0,0,-1,0,1\n", 0) == 0);

    const auto file = work / "fig3.csv";
    CHECK(run("simulate --config " + cfg("fig3") + " --output " + file.string()).status == 0);
    CHECK(slurp(file) == r.out);
}

TEST_CASE("constant input keeps y at y0") {
    const auto r = run("simulate --config " + cfg("constant") + " --output -");
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find(",0.5,0.25,0") != std::string::npos);
    }
    CHECK(rows >= 2);
}

TEST_CASE("divergent simulation leaves a truncated file and exits 3") {
    const auto file = work / "fig4.csv";
    const auto r = run("simulate --config " + cfg("fig4") + " --output " + file.string());
    CHECK(r.status == 3);
    CHECK(r.err.find("diverg") != std::string::npos);
    const auto csv = slurp(file);
    CHECK(csv.rfind("step,t,u,y,branch\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') > 100);
}

TEST_CASE("analyze reports status, conditions and loop class") {
    auto json = [](const Run& r) { return duhem::io::Json::parse(r.out); };
    const auto fig3 = run("analyze --config " + cfg("fig3") + " --output -");
    REQUIRE(fig3.status == 0);
    const auto j3 = json(fig3);
    CHECK(j3["accommodation"]["status"] == "Converged");
    CHECK(j3["conditions"]["boucwen_class"] == "ConvergenceCertified");
    CHECK(j3["orbit"]["loop_class"] == "SimpleCW");
    CHECK(j3["orbit"]["closure_residual"].get<double>() <= 1e-6);

    const auto fig4 = run("analyze --config " + cfg("fig4") + " --output -");
    CHECK(fig4.status == 3);
    const auto j4 = json(fig4);
    CHECK(j4["accommodation"]["status"] == "Diverged");
    CHECK(j4["conditions"]["boucwen_class"] == "DivergenceCertified");
    CHECK(j4["orbit"].is_null());

    const auto fig5 = run("analyze --config " + cfg("fig5") + " --output -");
    REQUIRE(fig5.status == 0);
    const auto j5 = json(fig5);
    CHECK(j5["orbit"]["loop_class"] == "Butterfly");
    CHECK(j5["orbit"]["intersections"].size() == 1);
}

TEST_CASE("plot writes SVG") {
    const auto file = work / "fig7.svg";
    CHECK(run("plot --config " + cfg("fig7") + " --output " + file.string()).status == 0);
    CHECK(slurp(file).rfind("<svg", 0) == 0);
    CHECK(run("plot --config " + cfg("fig4") + " --output -").status == 3);
}

TEST_CASE("verify suites") {
    CHECK(run("verify lemma5 --model cubic-default").status == 0);
    const auto p3 = run("verify prop3 --model cubic-default --seed-upsilon -2");
    REQUIRE(p3.status == 0);
    const auto j = duhem::io::Json::parse(p3.out);
    CHECK(j["results"][0]["details"]["ordered"] == true);
    CHECK(j["results"][0]["details"]["v_x"].get<double>() > -2.0);
    CHECK(run("verify prop1 --model boucwen --params 1,1,2,1").status == 0);
    CHECK(run("verify --suite cor1 --model boucwen --params 0.1,0.1,-0.2,1").status == 0);
    CHECK(run("verify all --model cubic-default").status == 0);
    CHECK(run("verify all --model boucwen").status == 0);
    CHECK(run("verify all --model multiloop").status == 0);
    CHECK(run("verify all --config " + cfg("fig5")).status == 0);
}

TEST_CASE("configuration errors exit 2") {
    CHECK(run("verify lemma9").status == 2);
    CHECK(run("verify all --model spring").status == 2);
    CHECK(run("verify all --model boucwen --params 1,2").status == 2);
    const auto bad = work / "bad.json";
    fs::create_directories(work);
    std::ofstream(bad) << "{\n  \"model\": {\"type\": \"bouc_wen\",\n}\n";
    const auto r = run("simulate --config " + bad.string());
    CHECK(r.status == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
    CHECK(run("simulate --config " + cfg("fig3") + " --h -1").status == 2);
}
