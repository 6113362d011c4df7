#include "catch_amalgamated.hpp"

#include "mobdyn/emit.hpp"

#include "json.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <sys/wait.h>

using namespace mobdyn;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("mobdyn_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Run {
    int code = -1;
    std::string out, err;
};

// Runs the CLI with `args` (already shell-safe); env is an optional prefix.
Run cli(const std::string& args, const std::string& env = "env -u MOBDYN_SEED") {
    static int counter = 0;
    const fs::path o = scratch_dir() / ("stdout_" + std::to_string(counter));
    const fs::path e = scratch_dir() / ("stderr_" + std::to_string(counter++));
    const std::string cmd =
        env + " " + MOBDYN_CLI_PATH + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

Trajectory awkward_trajectory(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<TrajectorySample> s;
    double t = -0.1;
    for (int i = 0; i < 50; ++i) {
        t += std::ldexp(1.0 + u(rng), -(i % 7));
        if (i == 17)
            s.push_back({t, ExtPoint::infinity()});
        else
            s.push_back({t, ExtPoint(std::ldexp(u(rng), i % 40 - 20), u(rng) / 3.0)});
    }
    return Trajectory(std::move(s));
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("trajectory JSON round-trips bit for bit", "[emit]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Trajectory traj = awkward_trajectory(seed);
        const RunMeta meta{seed * 977, "stretch", 0.1 + 1.0 / 3.0, std::nextafter(4.0, 5.0)};
        const ParsedTrajectory back = parse_trajectory_json(trajectory_json(traj, meta));
        CHECK(back.meta == meta);
        REQUIRE(back.traj.size() == traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto& a = traj.samples()[i];
            const auto& b = back.traj.samples()[i];
            CHECK(same_bits(a.t, b.t));
            REQUIRE(a.z.is_infinite() == b.z.is_infinite());
            if (a.z.is_finite()) {
                CHECK(same_bits(a.z.re(), b.z.re()));
                CHECK(same_bits(a.z.im(), b.z.im()));
            }
        }
    }
}

TEST_CASE("two-sample trajectory JSON has the documented shape", "[emit]") {
    const Trajectory traj({{0.0, ExtPoint(1.0, 2.0)}, {1.0, ExtPoint::infinity()}});
    const json j = json::parse(trajectory_json(traj, RunMeta{}));
    REQUIRE(j.at("samples").size() == 2);
    CHECK(j["samples"][0]["re"] == 1.0);
    CHECK(j["samples"][0]["im"] == 2.0);
    CHECK(j["samples"][0]["infinite"] == false);
    CHECK(j["samples"][1]["infinite"] == true);
    CHECK(j["meta"]["model"] == "shear");
    CHECK(j["meta"]["seed"] == 1);
}

TEST_CASE("emitters refuse an empty trajectory and bad input", "[emit]") {
    const Trajectory empty(std::vector<TrajectorySample>{});
    CHECK_THROWS_AS(trajectory_json(empty, RunMeta{}), std::invalid_argument);
    CHECK_THROWS_AS(trajectory_svg(empty), std::invalid_argument);
    CHECK_THROWS_AS(parse_trajectory_json("{\"meta\":{}}"), EmitError);
    CHECK_THROWS_AS(parse_trajectory_json("not json"), EmitError);
    CHECK_THROWS_AS(write_text_file("/nonexistent_dir_for_mobdyn/x.json", "x"), EmitError);
}

TEST_CASE("SVG breaks the polyline near infinity", "[emit]") {
    const Trajectory traj({{0.0, ExtPoint(0.5, 0.5)},
                           {1.0, ExtPoint(1.0, 1.0)},
                           {2.0, ExtPoint(1e4, 1e4)},
                           {3.0, ExtPoint::infinity()},
                           {4.0, ExtPoint(-1.0, 1.0)},
                           {5.0, ExtPoint(-0.5, 0.5)}});
    const std::string svg = trajectory_svg(traj);
    const std::regex poly("class=\"path\"");
    const std::regex marker("class=\"infinity\"");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator()) == 2);
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), marker), std::sregex_iterator()) == 1);
}

TEST_CASE("cli exit codes", "[cli]") {
    const Run ok = cli("normalize-saddle --matrix 2,0,0,3");
    REQUIRE(ok.code == 0);
    const json j = json::parse(ok.out);
    CHECK(std::abs(j.at("lambda").get<double>() - std::sqrt(2.0 / 3.0)) < 1e-12);
    CHECK(j.at("residual").get<double>() < 1e-12);

    const Run conformal = cli("normalize-saddle --matrix 1,0,0,1");
    CHECK(conformal.code == 1);
    CHECK(conformal.err.find("conformal input") != std::string::npos);

    CHECK(cli("normalize-saddle --matrix 2,0,0,3 --bogus").code == 2);
    CHECK(cli("normalize-saddle --matrix 2,0,0").code == 2);
    CHECK(cli("no-such-command").code == 2);
    CHECK(cli("").code == 2);
    CHECK(cli("fundamental --stages 0").code == 2);
    CHECK(cli("fundamental --stages 13").code == 2);
    CHECK(cli("fundamental --model spiral").code == 2);
    CHECK(cli("fundamental --eps -1").code == 2);
    CHECK(cli("cone-constants --alpha 2").code == 2);
    CHECK(cli("cone-constants --svg x.svg").code == 2);
    CHECK(cli("cone-constants", "MOBDYN_SEED=abc").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("cli seed falls back to the environment", "[cli]") {
    const Run env = cli("cone-constants", "MOBDYN_SEED=41");
    REQUIRE(env.code == 0);
    CHECK(json::parse(env.out)["meta"]["seed"] == 41);
    const Run flag = cli("cone-constants --seed 41");
    REQUIRE(flag.code == 0);
    CHECK(flag.out == env.out);
    const Run none = cli("cone-constants");
    REQUIRE(none.code == 0);
    CHECK(json::parse(none.out)["meta"]["seed"] == 1);
}

TEST_CASE("cli output is deterministic for a fixed seed", "[cli]") {
    const fs::path a = scratch_dir() / "cone_a.json", b = scratch_dir() / "cone_b.json";
    REQUIRE(cli("cone-constants --seed 9 --out " + a.string()).code == 0);
    REQUIRE(cli("cone-constants --seed 9 --out " + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());

    const fs::path ta = scratch_dir() / "chi_a.json", tb = scratch_dir() / "chi_b.json";
    REQUIRE(cli("crossing --seed 4 --trajectory " + ta.string()).code == 0);
    REQUIRE(cli("crossing --seed 4 --trajectory " + tb.string()).code == 0);
    CHECK(slurp(ta) == slurp(tb));
}

TEST_CASE("fundamental orbit SVG stays in the upper half-plane", "[cli]") {
    const fs::path svg = scratch_dir() / "fundamental.svg", traj = scratch_dir() / "fundamental.json";
    REQUIRE(cli("fundamental --svg " + svg.string() + " --trajectory " + traj.string()).code == 0);
    const std::string text = slurp(svg);
    const std::regex poly("class=\"path\"[^>]*points=\"([^\"]*)\"");
    int polylines = 0, points = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), poly); it != std::sregex_iterator(); ++it) {
        ++polylines;
        std::istringstream pts((*it)[1].str());
        std::string pair;
        while (pts >> pair) {
            const auto comma = pair.find(',');
            REQUIRE(comma != std::string::npos);
            CHECK(std::stod(pair.substr(comma + 1)) > 0.0);
            ++points;
        }
    }
    CHECK(polylines >= 1);
    CHECK(points > 100);
    // The orbit runs off to infinity, so the plot marks it.
    CHECK(text.find("class=\"infinity\"") != std::string::npos);

    const ParsedTrajectory back = parse_trajectory_json(slurp(traj));
    CHECK(back.traj.size() == 2001);
}

TEST_CASE("cli reports an unwritable output path", "[cli]") {
    const Run r = cli("normalize-saddle --matrix 2,0,0,3 --out /nonexistent_dir_for_mobdyn/out.json");
    CHECK(r.code == 1);
    CHECK(r.err.find("/nonexistent_dir_for_mobdyn/out.json") != std::string::npos);
}

TEST_CASE("cli figure-eight certificate", "[cli]") {
    const fs::path out = scratch_dir() / "cert.json";
    const Run r = cli("figure-eight --seed 7 --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("certified") == true);
    CHECK(j.at("word_length") == 2);
    CHECK(j.at("word") == j.at("prototype"));
    for (const auto& res : j.at("fixed_point_residuals")) CHECK(res.get<double>() < 1e-6);
}
