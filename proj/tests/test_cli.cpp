#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef RFQLAB_CLI_PATH
#define RFQLAB_CLI_PATH "rfqlab"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RFQLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kScenario = R"(
[scenario]
n_rfqs = 800
seed = 7
force_pd = 0
force_ia = 0
[sampler]
n_client = 2
[reservation]
intercept = 1.6
sigma = 0.5
client = 0.25, -0.3
bond = 0.2, -0.25, 0.3, 0.2, -0.2
rfq = -0.2, 0.25
sd = 0.35
[sep]
location = 1.2
scale = 0.45
shape = 1.7
asym = 1.25
[dealer_shift]
sigma = 0.4
client = 0.2, -0.2
bond = 0.25, 0.2, -0.2, 0.15, 0.25
rfq = -0.1, 0.15
[params]
p_quote = 0.65
[policy]
mode = historical
g0 = 0.75
g1_sigma = 0.35
bond_weights = 0.15, 0, 0, 0, 0.1
g3_axe = -0.15
noise_sd = 0.4
)";

} // namespace

TEST_CASE("simulate is byte-deterministic and produces the sidecars") {
    fs::create_directories("cli_t");
    write_file("cli_t/scenario.ini", kScenario);
    REQUIRE(run_cli("simulate -c cli_t/scenario.ini -o cli_t/a") == 0);
    REQUIRE(run_cli("simulate -c cli_t/scenario.ini -o cli_t/b") == 0);
    CHECK(slurp("cli_t/a/dataset.csv") == slurp("cli_t/b/dataset.csv"));
    CHECK(slurp("cli_t/a/latents.csv") == slurp("cli_t/b/latents.csv"));
    CHECK(!slurp("cli_t/a/dataset.csv").empty());
    // 800 rows + header
    std::ifstream in("cli_t/a/dataset.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 801);
}

TEST_CASE("price reproduces the worked end-of-day example") {
    fs::create_directories("cli_t");
    write_file("cli_t/price.ini", R"(
[pricing]
objective = eod
gamma = 0.1
volume = 2
side = 1
inventory = 10
sigma = 0.2
horizon = 1
[model]
kind = exponential
p0 = 0.8
alpha = 2
)");
    REQUIRE(run_cli("price -c cli_t/price.ini -o cli_t/p") == 0);
    const std::string out = slurp("cli_t/p/price.csv");
    // delta_opt = 0.044 + 5 ln(1.1) = 0.52055089902...
    CHECK(out.find("0.5205508990") != std::string::npos);
}

TEST_CASE("fit-lr then evaluate round trip") {
    fs::create_directories("cli_t");
    write_file("cli_t/scenario.ini", kScenario);
    REQUIRE(run_cli("simulate -c cli_t/scenario.ini -o cli_t/d") == 0);
    REQUIRE(run_cli("fit-lr --data cli_t/d/dataset.csv -o cli_t/m") == 0);
    REQUIRE(run_cli("evaluate --data cli_t/d/dataset.csv --model cli_t/m/logistic.json -o cli_t/e") == 0);
    CHECK(slurp("cli_t/e/evaluation.csv").find("auc") != std::string::npos);
    CHECK(fs::exists("cli_t/e/figures/roc_model.svg"));
}

TEST_CASE("bad config exits 1, missing subcommand exits nonzero") {
    fs::create_directories("cli_t");
    write_file("cli_t/bad.ini", "[policy]\nmode = nonsense\n");
    CHECK(run_cli("simulate -c cli_t/bad.ini -o cli_t/x") == 1);
    CHECK(run_cli("") != 0);
    fs::remove_all("cli_t");
}
