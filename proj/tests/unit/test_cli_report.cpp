#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "blockprop/propagation.hpp"
#include "report/commands.hpp"

using namespace blockprop;
using namespace blockprop::report;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("blockprop_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(600.0) == "600");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(format_number(0.5764859290985032) == "0.5764859290985032");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-1.0 / 0.0) == "-inf");
    for (double v : {1.0 / 3.0, 2.0 / 7.0, 6.02214076e23, 4140.858122402303}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_cell(Cell{42LL}) == "42");
}

TEST_CASE("csv layout") {
    Table t;
    t.columns = {"name", "value"};
    t.add({std::string("a,b"), 0.25});
    t.add({std::string("say \"hi\""), 3LL});
    const Header h{"analyze", "0123456789abcdef", 5, {{"mode", "propagation"}}};
    const std::string expect = "# tool: blockprop " + tool_version() +
                               "\n# command: analyze\n# config_hash: 0123456789abcdef\n# seed: 5\n"
                               "# mode: propagation\nname,value\n\"a,b\",0.25\n\"say \"\"hi\"\"\",3\n";
    CHECK(to_csv(h, t) == expect);
    CHECK_THROWS(t.add({1LL}));
    const auto json = nlohmann::json::parse(to_json(h, t));
    CHECK(json["meta"]["seed"] == "5");
    CHECK(json["rows"][0][1] == 0.25);
}

TEST_CASE("config defaults and overrides") {
    const auto cfg = parse_config(R"({"grid": {"servers": [10, 20], "fanout": "all"}, "simulation": {"seed": 9}})");
    CHECK(cfg.sim.seed == 9);
    CHECK(cfg.points().size() == 9 + 19);
    CHECK(cfg.points().back().chain == ChainParams{20, 19});

    Options opts;
    opts.seed = 4;
    opts.format = "json";
    const auto over = with_options(cfg, opts);
    CHECK(over.sim.seed == 4);
    CHECK(over.format == "json");
    opts.format = "xml";
    CHECK_THROWS_AS(with_options(cfg, opts), ConfigError);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error(R"({"grid": {"servers": [10], "fanout": [12]}})").find("grid.fanout[0]") == 0);
    CHECK(config_error(R"({"grid": {"server": [10]}})").find("grid.server") == 0);
    CHECK(config_error(R"({"grid": {"data_rate_mbps": [10, -1]}})").find("grid.data_rate_mbps[1]") == 0);
    CHECK(config_error(R"({"simulation": {"replications": 0}})").find("simulation.replications") == 0);
    CHECK(config_error(R"({"simulation": {"mode": "gossip"}})").find("simulation.mode") == 0);
    CHECK(config_error(R"({"extra": 1})").find("extra") == 0);
    CHECK(config_error("{\n  \"grid\": {\n    \"servers\": [10,]\n  }\n}").find("line 3") != std::string::npos);
}

TEST_CASE("config hash follows content") {
    const auto a = parse_config(R"({"grid": {"servers": 10, "fanout": 2}})");
    const auto b = parse_config(R"({ "grid" : { "fanout": 2, "servers": 10 } })");
    const auto c = parse_config(R"({"grid": {"servers": 10, "fanout": 3}})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("analyze output is byte-identical across runs") {
    const auto cfg = parse_config(R"({"grid": {"servers": [2, 10], "fanout": 1}})");
    const auto d1 = scratch("analyze1");
    const auto d2 = scratch("analyze2");
    Options o1, o2;
    o1.out = d1;
    o2.out = d2;
    const auto r1 = cmd_analyze(cfg, o1);
    cmd_analyze(cfg, o2);
    REQUIRE(r1.files.size() == 3);
    for (const auto& f : r1.files) {
        const auto rel = std::filesystem::relative(f, d1);
        CHECK(slurp(f) == slurp(d2 / rel));
    }
    const auto csv = slurp(d1 / "analyze.csv");
    CHECK(csv.find("\n2,1,10,1,600,6,0.1,0.8,0,") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("simulate records seed and race cap column") {
    auto cfg = parse_config(R"({"grid": {"servers": 10, "fanout": 2},
                                "simulation": {"replications": 500, "seed": 77, "mode": "race", "threads": 1}})");
    const auto dir = scratch("simulate");
    Options o;
    o.out = dir;
    const auto r = cmd_simulate(cfg, o);
    const auto csv = slurp(r.files.front());
    CHECK(csv.find("# seed: 77\n") != std::string::npos);
    CHECK(csv.find("# rng: philox4x32-10\n") != std::string::npos);
    CHECK(csv.find("cap_hit_freq") != std::string::npos);
}

TEST_CASE("sweep recipes") {
    const auto names = recipe_names();
    CHECK(names.size() == 21);
    RunConfig cfg;
    cfg.sim.threads = 1;
    CHECK_THROWS_AS(run_recipe("fig9z", cfg), ConfigError);
    try {
        run_recipe("fig9z", cfg);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("fig4a") != std::string::npos);
    }

    const auto tables = run_recipe("fig6e", cfg);
    REQUIRE(tables.size() == 1);
    bool baseline = false;
    for (const auto& row : tables[0].table.rows) baseline |= std::get<std::string>(row[0]) == "baseline";
    CHECK(baseline);

    // Mirror shapes: p_k rises as t_b falls and as s_b grows.
    const auto a = run_recipe("fig5a", cfg)[0].table;
    const auto b = run_recipe("fig5b", cfg)[0].table;
    for (std::size_t i = 1; i < 17; ++i) {
        CHECK(std::get<double>(a.rows[i][2]) < std::get<double>(a.rows[i - 1][2]));
        CHECK(std::get<double>(b.rows[i][2]) > std::get<double>(b.rows[i - 1][2]));
    }
    CHECK(std::get<double>(a.rows[0][2]) > 0.99);
    CHECK(std::get<double>(b.rows[16][2]) > 0.99);
}

TEST_CASE("fig4g matches the library search") {
    RunConfig cfg;
    cfg.sim.threads = 1;
    const auto net = NetworkParams::from_megabytes(10.0, 1.0, 600.0);
    const auto t = run_recipe("fig4g", cfg)[0].table;
    REQUIRE(t.rows.size() == 3 * 49);
    for (const auto& row : t.rows) {
        const int n = static_cast<int>(std::get<long long>(row[1]));
        if (n % 7 != 0 && n != 2) continue;
        CHECK(std::get<long long>(row[2]) == min_fanout_for_accuracy(n, net, std::get<double>(row[0])));
    }
}
