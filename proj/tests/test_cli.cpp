#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pcbs/cli.hpp"
#include "pcbs/io_synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"pcbs"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return pcbs::cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pcbs_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json slurp_json(const fs::path& path) { return json::parse(slurp(path)); }

} // namespace

TEST_CASE("cli sample: synth ratio run produces the requested count and sidecar") {
    const fs::path dir = temp_dir("sample_synth");
    const fs::path out = dir / "sampled.bin";
    const int rc = run_cli({"sample", "--synth", "n=100000", "--method", "pcb-rs",
                            "--ratio", "0.25", "--grid", "64x64x16", "--seed", "7",
                            "--out", out.string()});
    REQUIRE(rc == 0);
    CHECK(fs::file_size(out) == 25000 * 16);

    const json side = slurp_json(dir / "sampled.json");
    CHECK(side["method"] == "pcb-rs");
    CHECK(side["seed"] == 7);
    CHECK(side["m"] == 25000);
    CHECK(side["points_out"] == 25000);
    CHECK(side["grid"]["n_radial"] == 64);
    CHECK(side["grid"]["rho_max"] == "max");
    CHECK(side["input"]["kind"] == "synth");
    CHECK(side["duplicated"] == false);
}

TEST_CASE("cli sample: identical flags give byte-identical outputs") {
    const fs::path dir = temp_dir("sample_determinism");
    const fs::path scan = dir / "scan.bin";
    {
        pcbs::SynthConfig cfg;
        cfg.n_points = 5000;
        cfg.seed = 12;
        pcbs::write_kitti_bin(scan, pcbs::generate_long_tail(cfg));
    }
    const fs::path out1 = dir / "a.bin";
    const fs::path out2 = dir / "b.bin";
    for (const auto& out : {out1, out2}) {
        const int rc = run_cli({"sample", "--in", scan.string(), "--method", "rs", "--m",
                                "1024", "--seed", "1", "--out", out.string()});
        REQUIRE(rc == 0);
    }
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("cli sample: labels follow the sampled points") {
    const fs::path dir = temp_dir("sample_labels");
    const fs::path scan = dir / "scan.bin";
    const fs::path labels = dir / "scan.label";
    {
        pcbs::SynthConfig cfg;
        cfg.n_points = 300;
        cfg.seed = 4;
        pcbs::write_kitti_bin(scan, pcbs::generate_long_tail(cfg));
        std::vector<std::uint32_t> lab(300);
        for (std::size_t i = 0; i < lab.size(); ++i) lab[i] = i % 20;
        pcbs::write_labels(labels, lab);
    }
    const fs::path out = dir / "out.bin";
    const int rc = run_cli({"sample", "--in", scan.string(), "--labels", labels.string(),
                            "--method", "rs", "--m", "100", "--seed", "3", "--out",
                            out.string()});
    REQUIRE(rc == 0);
    CHECK(pcbs::read_labels(dir / "out.label", 100).size() == 100);
    CHECK(slurp_json(dir / "out.json")["has_labels"] == true);
}

TEST_CASE("cli sample: fps oversampling is a data error (exit 2)") {
    const fs::path dir = temp_dir("sample_fps_err");
    const fs::path scan = dir / "scan.bin";
    {
        pcbs::SynthConfig cfg;
        cfg.n_points = 50;
        cfg.seed = 2;
        pcbs::write_kitti_bin(scan, pcbs::generate_long_tail(cfg));
    }
    const int rc = run_cli({"sample", "--in", scan.string(), "--method", "fps", "--m",
                            "51", "--out", (dir / "out.bin").string()});
    CHECK(rc == 2);
    CHECK(!fs::exists(dir / "out.bin")); // no partial outputs
}

TEST_CASE("cli sample: usage errors exit 1") {
    const fs::path dir = temp_dir("sample_usage");
    // --in and --synth together
    CHECK(run_cli({"sample", "--in", "x.bin", "--synth", "n=10", "--method", "rs", "--m",
                   "5", "--out", (dir / "o.bin").string()}) == 1);
    // neither --m nor --ratio
    CHECK(run_cli({"sample", "--synth", "n=10", "--method", "rs", "--out",
                   (dir / "o.bin").string()}) == 1);
    // both --m and --ratio
    CHECK(run_cli({"sample", "--synth", "n=10", "--method", "rs", "--m", "5", "--ratio",
                   "0.5", "--out", (dir / "o.bin").string()}) == 1);
    // bad ratio
    CHECK(run_cli({"sample", "--synth", "n=10", "--method", "rs", "--ratio", "1.5",
                   "--out", (dir / "o.bin").string()}) == 1);
    // bad grid string
    CHECK(run_cli({"sample", "--synth", "n=10", "--method", "rs", "--m", "5", "--grid",
                   "64x64", "--out", (dir / "o.bin").string()}) == 1);
    // unknown method is caught by the library (data error)
    CHECK(run_cli({"sample", "--synth", "n=10", "--method", "xyz", "--m", "5", "--out",
                   (dir / "o.bin").string()}) == 2);
    // missing input file
    CHECK(run_cli({"sample", "--in", (dir / "missing.bin").string(), "--method", "rs",
                   "--m", "5", "--out", (dir / "o.bin").string()}) == 2);
}

TEST_CASE("cli stats: default bands emit six rows, custom edges resize") {
    const fs::path dir = temp_dir("stats");
    const fs::path out = dir / "hist.csv";
    REQUIRE(run_cli({"stats", "--synth", "n=20000", "--seed", "5", "--out",
                     out.string()}) == 0);
    const auto text = slurp(out);
    const std::string s(text.begin(), text.end());
    CHECK(s.rfind("band_lo_m,band_hi_m,count,fraction\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 7); // header + 6 bands
    CHECK(s.find("50,inf,") != std::string::npos);

    const fs::path out3 = dir / "hist3.csv";
    REQUIRE(run_cli({"stats", "--synth", "n=20000", "--seed", "5", "--edges", "0,5,10",
                     "--out", out3.string()}) == 0);
    const auto text3 = slurp(out3);
    CHECK(std::count(text3.begin(), text3.end(), '\n') == 4); // header + 3 bands
}

TEST_CASE("cli stats: json and csv report identical numbers") {
    const fs::path dir = temp_dir("stats_formats");
    const fs::path csv_path = dir / "h.csv";
    const fs::path json_path = dir / "h.json";
    REQUIRE(run_cli({"stats", "--synth", "n=30000", "--seed", "9", "--out",
                     csv_path.string()}) == 0);
    REQUIRE(run_cli({"stats", "--synth", "n=30000", "--seed", "9", "--format", "json",
                     "--out", json_path.string()}) == 0);

    const json j = slurp_json(json_path);
    const auto csv = slurp(csv_path);
    std::stringstream ss(std::string(csv.begin(), csv.end()));
    std::string line;
    std::getline(ss, line); // header
    for (const auto& band : j["bands"]) {
        REQUIRE(std::getline(ss, line));
        const auto c2 = line.find(',', line.find(',') + 1);
        const auto c3 = line.find(',', c2 + 1);
        CHECK(std::stoull(line.substr(c2 + 1, c3 - c2 - 1)) == band["count"].get<std::size_t>());
    }
}

TEST_CASE("cli stats: compare emits rs and pcb-rs sections") {
    const fs::path dir = temp_dir("stats_compare");
    const fs::path out = dir / "cmp.json";
    REQUIRE(run_cli({"stats", "--synth", "n=30000", "--compare", "--ratio", "0.0625",
                     "--seeds", "5", "--seed", "3", "--format", "json", "--out",
                     out.string()}) == 0);
    const json j = slurp_json(out);
    CHECK(j["m"] == 1875);
    CHECK(j["rs"]["cv_bins"].get<double>() > 0.0);
    CHECK(j["pcb-rs"]["cv_bins"].get<double>() < j["rs"]["cv_bins"].get<double>());
    CHECK(j["source"]["bands"].size() == 6);
}

TEST_CASE("cli stats: grid config file feeds the compare grid") {
    const fs::path dir = temp_dir("stats_config");
    const fs::path cfg_path = dir / "grid.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[stats]\n";
        cfg << "n_radial=8\n";
        cfg << "n_angular=4\n";
        cfg << "n_height=2\n";
        cfg << "rho_min=3\n";
        cfg << "rho_max=max\n";
        cfg << "z_min=-3\n";
        cfg << "z_max=1.5\n";
    }
    const fs::path out = dir / "cmp.json";
    REQUIRE(run_cli({"--config", cfg_path.string(), "stats", "--synth", "n=5000",
                     "--compare", "--seeds", "2", "--seed", "1", "--format", "json",
                     "--out", out.string()}) == 0);
    const json j = slurp_json(out);
    CHECK(j["m"] == 1250);
}

TEST_CASE("cli bench: tiny custom cascade emits csv rows") {
    const fs::path dir = temp_dir("bench");
    const fs::path out = dir / "bench.csv";
    REQUIRE(run_cli({"bench", "--sizes", "256,64", "--repeats", "1", "--harness-runs",
                     "1", "--seed", "2", "--out", out.string()}) == 0);
    const auto text = slurp(out);
    const std::string s(text.begin(), text.end());
    CHECK(s.rfind("cascade,method,seconds,mad_seconds,unstable\n", 0) == 0);
    CHECK(s.find("(256->64) x 1,rs,") != std::string::npos);
    CHECK(s.find("(256->64) x 1,pcb-rs,") != std::string::npos);
    CHECK(s.find("(256->64) x 1,fps,") != std::string::npos);
}

TEST_CASE("cli bench: usage errors") {
    CHECK(run_cli({"bench", "--preset", "nope"}) == 1);
    CHECK(run_cli({"bench"}) == 1);
    CHECK(run_cli({"bench", "--preset", "table4", "--sizes", "64,16"}) == 1);
}

TEST_CASE("cli loss-check: passes and is deterministic") {
    CHECK(run_cli({"loss-check"}) == 0);
    CHECK(run_cli({"loss-check", "--trials", "1000", "--seed", "3"}) == 0);
}

TEST_CASE("cli: unknown subcommand or flag is a usage error") {
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({"stats", "--synth", "n=10", "--no-such-flag"}) == 1);
    CHECK(run_cli({}) == 1);
}
