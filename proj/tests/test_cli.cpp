#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "app/cli.hpp"
#include "app/format.hpp"

using namespace nhxy;
using namespace nhxy::app;
namespace fs = std::filesystem;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nhxy_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = fs::temp_directory_path() / ("nhxy_test_cli_" + name + ".json");
    std::ofstream(p) << j.dump();
    return p;
}

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream s(text);
    for (std::string line; std::getline(s, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

TEST_CASE("number formatting round-trips", "[cli][format]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    const double third = 1.0 / 3.0;
    CHECK(std::stod(format_double(third)) == third);
    CHECK(format_double(third).size() == 18); // "0." plus 16 digits
    CHECK(format_cell(json(nullptr)).empty());
    CHECK(format_cell(json(true)) == "true");
    CHECK(format_cell(json("a,b")) == "\"a,b\"");
    CHECK(format_cell(json("say \"hi\"")) == "\"say \"\"hi\"\"\"");
}

TEST_CASE("csv table", "[cli][format]") {
    CsvTable t({"a", "b"});
    t.add_row({1, 0.5}).add_row({nullptr, "x"});
    CHECK(t.str() == "a,b\n1,0.5\n,x\n");
    CHECK(t.rows() == 2);
    CHECK_THROWS_AS(t.add_row({1}), std::logic_error);
    CHECK(dump_json(json{{"b", 1}, {"a", 2}}) == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST_CASE("parse_config examples", "[cli][config]") {
    const auto f = parse_config({"flow", "--d", "3", "--phase", "broken", "--kappa", "0.25", "--y", "0", "--ytilde", "0.7", "--lmax", "20"});
    CHECK(f.command == "flow");
    CHECK(f.parameters["d"] == 3.0);
    CHECK(f.parameters["kappa"] == 0.25);
    CHECK(f.parameters["ytilde"] == 0.7);
    CHECK(f.parameters["lmax"] == 20.0);
    CHECK(f.parameters["rel_tol"] == 1e-9);
    CHECK(f.parameters["abs_tol"] == 1e-12);
    CHECK(f.workers == 1);
    CHECK(f.seed == 0);

    const auto defaults = parse_config({"fixed-points"});
    CHECK(defaults.parameters["d"] == 3.0);
    CHECK(defaults.parameters["phase"] == "broken");

    const auto sweep = parse_config({"sweep", "--command", "qm-spectrum", "--axis", "J=1,2", "--axis", "K=1,2", "--workers", "4"});
    CHECK(sweep.workers == 4);
    CHECK(sweep.parameters["axes"].size() == 2);
    CHECK(sweep.parameters["axes"][0]["values"] == json::array({1.0, 2.0}));
}

TEST_CASE("config file with flag overrides", "[cli][config]") {
    const auto path = write_config("override", {{"command", "flow"},
                                                {"parameters", {{"kappa", 0.4}, {"lmax", 5}}},
                                                {"seed", 7},
                                                {"workers", 2},
                                                {"output_dir", "somewhere"}});
    const auto c = parse_config({"--config", path.string(), "flow", "--lmax", "3"});
    CHECK(c.command == "flow");
    CHECK(c.parameters["kappa"] == 0.4);
    CHECK(c.parameters["lmax"] == 3.0);
    CHECK(c.seed == 7);
    CHECK(c.workers == 2);
    CHECK(c.output_dir == "somewhere");
    const auto d = parse_config({"flow", "--config", path.string(), "--out", "elsewhere"});
    CHECK(d.output_dir == "elsewhere");
    CHECK(d.parameters["lmax"] == 5.0);
    const auto e = parse_config({"--config", path.string()});
    CHECK(e.command == "flow");
}

TEST_CASE("strict keys and config errors", "[cli][config][errors]") {
    const auto bad_top = write_config("bad_top", {{"command", "flow"}, {"colour", "red"}});
    CHECK(throws_kind(ErrorKind::config, [&] { (void)parse_config({"--config", bad_top.string()}); }));
    const auto bad_param = write_config("bad_param", {{"command", "flow"}, {"parameters", {{"kapa", 0.2}}}});
    try {
        (void)parse_config({"--config", bad_param.string()});
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("kapa") != std::string::npos);
    }
    const auto mismatch = write_config("mismatch", {{"command", "flow"}});
    CHECK(throws_kind(ErrorKind::config, [&] { (void)parse_config({"--config", mismatch.string(), "exponents"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"--config", "/nonexistent/nhxy.json"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"flow", "--kappa", "abc"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"flow", "--phase", "sideways"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"flow", "--workers", "0"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"flow", "--seed", "-1"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"sweep", "--command", "flow", "--axis", "dd=1,2"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"sweep", "--command", "sweep", "--axis", "d=3"}); }));
    CHECK(throws_kind(ErrorKind::config, [] { (void)parse_config({"sweep", "--command", "collision-scan", "--axis", "d_values=2.1"}); }));
}

TEST_CASE("usage errors", "[cli][config][errors]") {
    CHECK(throws_kind(ErrorKind::usage, [] { (void)parse_config({}); }));
    CHECK(throws_kind(ErrorKind::usage, [] { (void)parse_config({"flow", "--no-such-flag", "1"}); }));
    CHECK(throws_kind(ErrorKind::usage, [] { (void)parse_config({"sweep", "--command", "flow"}); }));
    CHECK(throws_kind(ErrorKind::usage, [] { (void)parse_config({"sweep", "--axis", "d=3"}); }));
    CHECK(throws_kind(ErrorKind::usage, [] { (void)parse_config({"sweep", "--command", "flow", "--axis", "d"}); }));
    const auto r = run({"flow", "--bogus"});
    CHECK(r.code == exit_config);
    CHECK(json::parse(r.err)["error"]["kind"] == "usage_error");
}

TEST_CASE("help and version", "[cli]") {
    const auto h = run({"--help"});
    CHECK(h.code == exit_ok);
    CHECK(h.out.find("collision-scan") != std::string::npos);
    const auto sub = run({"flow", "--help"});
    CHECK(sub.out.find("--ytilde") != std::string::npos);
    CHECK(run({"--version"}).out == std::string(version) + "\n");
}

TEST_CASE("exponents report at d = 3", "[cli][run]") {
    const auto r = execute(parse_config({"exponents", "--d", "3", "--regime", "pt_broken"}));
    CHECK(r.exit_code == exit_ok);
    CHECK(std::abs(r.summary["nu"].get<double>() - 0.375) < 1e-12);
    const auto sym = execute(parse_config({"exponents", "--d", "3", "--regime", "hermitian_xy"}));
    CHECK(std::abs(sym.summary["nu"].get<double>() - 0.5) < 1e-12);
}

TEST_CASE("numeric errors give exit code 3 and error json", "[cli][run][errors]") {
    const auto dir = scratch("domain");
    const auto r = run({"flow", "--d", "5", "--out", dir.string()});
    CHECK(r.code == exit_numeric);
    const auto err = json::parse(r.err);
    CHECK(err["error"]["kind"] == "domain_error");
    CHECK(err["error"]["exit_code"] == 3);
    REQUIRE(fs::exists(dir / "error.json"));
    CHECK(json::parse(slurp(dir / "error.json")) == err);
    CHECK(json::parse(slurp(dir / "manifest.json"))["exit_code"] == 3);
}

TEST_CASE("fixed-points artifacts", "[cli][run]") {
    const auto dir = scratch("fp");
    const auto r = run({"fixed-points", "--d", "3", "--phase", "broken", "--out", dir.string()});
    REQUIRE(r.code == exit_ok);
    const auto report = json::parse(slurp(dir / "fixed-points.json"));
    const double pi = std::numbers::pi;
    bool saw_p1 = false, saw_p2 = false;
    for (const auto& fp : report["fixed_points"]) {
        if (fp["label"] == "P1") {
            saw_p1 = true;
            CHECK(std::abs(fp["location"][0].get<double>() - 6.0 / pi) < 1e-12);
            CHECK(std::abs(fp["location"][1].get<double>() - std::sqrt(pi / 6.0)) < 1e-12);
        }
        if (fp["label"] == "P2") {
            saw_p2 = true;
            CHECK(std::abs(fp["location"][0].get<double>() - 2.0 / (3.0 * pi)) < 1e-12);
            CHECK(fp["eigenvalues"].size() == 3);
            for (const auto& ev : fp["eigenvalues"]) CHECK((ev.contains("re") && ev.contains("im")));
        }
    }
    CHECK(saw_p1);
    CHECK(saw_p2);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "fixed-points");
    CHECK(manifest["artifacts"] == json::array({"fixed-points.csv", "fixed-points.json", "manifest.json"}));
    CHECK(manifest["config"]["parameters"]["d"] == 3.0);
    CHECK(manifest.contains("wall_time_s"));
    CHECK(manifest["versions"]["nhxy"] == version);
}

TEST_CASE("csv headers", "[cli][run]") {
    const std::vector<std::pair<std::string, std::string>> expected{
        {"flow", "l,kappa,y,y_tilde"},
        {"walking-flow", "l,X,Y,Y_tilde,c2"},
        {"xi-scan", "K_minus_Kc,l_star,log_inv_xi"},
        {"collision-scan", "d,kappa1,kappa2,lambda0_re"},
        {"qm-spectrum", "index,re,im"}};
    for (const auto& [cmd, header] : expected) {
        const auto r = execute(parse_config({cmd}));
        const auto& csv = r.files.at(0);
        REQUIRE(csv.first == cmd + ".csv");
        INFO(cmd);
        CHECK(csv_lines(csv.second).front().rfind(header, 0) == 0);
        CHECK(csv.second.find('\r') == std::string::npos);
        CHECK(csv.second.back() == '\n');
    }
}

TEST_CASE("xi-scan default records r^2 in the manifest", "[cli][run]") {
    const auto dir = scratch("xi");
    REQUIRE(run({"xi-scan", "--out", dir.string()}).code == exit_ok);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["summary"]["r_squared"].get<double>() >= 0.99);
    CHECK(manifest["summary"]["n_samples"] == 8);
    CHECK(csv_lines(slurp(dir / "xi-scan.csv")).size() == 9);
}

TEST_CASE("gnuplot script is optional", "[cli][run]") {
    const auto plain = execute(parse_config({"walking-flow"}));
    CHECK(plain.files.size() == 2);
    const auto with = execute(parse_config({"walking-flow", "--gnuplot"}));
    REQUIRE(with.files.size() == 3);
    CHECK(with.files[2].first == "walking-flow.gp");
    CHECK(with.files[2].second.find("walking-flow.csv") != std::string::npos);
}

TEST_CASE("2x2 qm-spectrum sweep", "[cli][sweep]") {
    const auto r = execute(parse_config({"sweep", "--command", "qm-spectrum", "--axis", "J=1,2", "--axis", "K=1,2"}));
    CHECK(r.exit_code == exit_ok);
    const auto lines = csv_lines(r.files.at(0).second);
    REQUIRE(lines.size() == 5);
    const auto header = split(lines[0]);
    const auto col = std::find(header.begin(), header.end(), "pt_phase_label") - header.begin();
    REQUIRE(col < static_cast<long>(header.size()));
    const std::vector<std::string> labels{"exceptional", "broken", "symmetric", "exceptional"};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        CHECK(cells[0] == std::to_string(i - 1));
        CHECK(cells[static_cast<std::size_t>(col)] == labels[i - 1]);
    }
    const auto report = json::parse(r.files.at(1).second);
    CHECK(report["n_points"] == 4);
    CHECK(report["rows"][1]["parameters"] == json{{"J", 1.0}, {"K", 2.0}});
}

TEST_CASE("d sweep of fixed-points shows the closing gap", "[cli][sweep]") {
    const auto r = execute(parse_config({"sweep", "--command", "fixed-points", "--axis", "d=2.1,2.05,2.01"}));
    const auto report = json::parse(r.files.at(1).second);
    REQUIRE(report["rows"].size() == 3);
    double prev = INFINITY;
    for (const auto& row : report["rows"]) {
        const double gap = row["summary"]["kappa_gap"].get<double>();
        CHECK(gap < prev);
        CHECK(gap > 0.0);
        prev = gap;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("sweep output is independent of the worker count", "[cli][sweep]") {
    const std::vector<std::string> base{"sweep", "--command", "flow", "--axis", "kappa=0.2,0.3,0.5,0.8,1.2",
                                        "--axis", "ytilde=0,0.3,0.7", "--set", "lmax=5"};
    auto one = base, four = base;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    const auto a = execute(parse_config(one));
    const auto b = execute(parse_config(four));
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == b.files[i]);
    CHECK(a.summary == b.summary);
}

TEST_CASE("sweep failures are recorded per row", "[cli][sweep][errors]") {
    // d = 5 fails, d = 3 and d = 2.5 succeed: partial failure, no sweep error
    const auto r = execute(parse_config({"sweep", "--command", "fixed-points", "--axis", "d=3,5,2.5"}));
    CHECK(r.exit_code == exit_partial_sweep);
    CHECK(r.error.is_null());
    const auto report = json::parse(r.files.at(1).second);
    CHECK(report["n_failed"] == 1);
    CHECK(report["rows"][1]["status"] == "error");
    CHECK(report["rows"][1]["error"]["kind"] == "domain_error");
    CHECK(report["rows"][2]["status"] == "ok");

    const auto most = execute(parse_config({"sweep", "--command", "fixed-points", "--axis", "d=5,6,3"}));
    CHECK(most.exit_code == exit_partial_sweep);
    CHECK(most.error["error"]["kind"] == "sweep_error");

    const auto dir = scratch("sweep_fail");
    const auto cli = run({"sweep", "--command", "fixed-points", "--axis", "d=5,6,3", "--out", dir.string()});
    CHECK(cli.code == exit_partial_sweep);
    CHECK(fs::exists(dir / "error.json"));
    CHECK(fs::exists(dir / "sweep.csv"));
}

TEST_CASE("sweep from a config file", "[cli][sweep][config]") {
    const auto path = write_config("sweep", {{"command", "sweep"},
                                             {"workers", 2},
                                             {"parameters",
                                              {{"command", "toy-z"},
                                               {"axes", json::array({{{"name", "K"}, {"values", {0.0, 1.0, 2.0}}}})},
                                               {"base", {{"beta", 0.5}}}}}});
    const auto c = parse_config({"--config", path.string()});
    CHECK(c.workers == 2);
    const auto r = execute(c);
    const auto report = json::parse(r.files.at(1).second);
    CHECK(report["n_points"] == 3);
    CHECK(report["base"]["beta"] == 0.5);
    const auto bad = write_config("sweep_bad", {{"command", "sweep"}, {"parameters", {{"command", "toy-z"}, {"grid", 1}}}});
    CHECK(throws_kind(ErrorKind::config, [&] { (void)parse_config({"--config", bad.string()}); }));
}

TEST_CASE("repeated runs are byte-identical", "[cli][determinism]") {
    for (const auto& cmd : command_registry()) {
        const auto a = execute(parse_config({cmd.name}));
        const auto b = execute(parse_config({cmd.name}));
        INFO(cmd.name);
        CHECK(a.files == b.files);
    }
    // deleting the output directory and rerunning reproduces the artifacts
    const auto dir = scratch("rerun");
    REQUIRE(run({"walking-flow", "--out", dir.string()}).code == exit_ok);
    const auto first = slurp(dir / "walking-flow.csv");
    fs::remove_all(dir);
    REQUIRE(run({"walking-flow", "--out", dir.string()}).code == exit_ok);
    CHECK(slurp(dir / "walking-flow.csv") == first);
}
