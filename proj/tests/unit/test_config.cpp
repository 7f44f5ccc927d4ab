#include "lindrec/config.hpp"
#include "lindrec/runner.hpp"

#include "doctest.h"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lindrec;
namespace fs = std::filesystem;

namespace
{
    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    fs::path scratch_dir(const std::string& name)
    {
        const auto dir = fs::temp_directory_path() / ("lindrec_test_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }

    int error_line(const std::string& text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError& e)
        {
            return e.line();
        }
        return -1;
    }

    const char* kExample = R"(# positive drift pair
experiment = classify
seed = 42
law = joint{ (-1,1):1/4, (-1,2):1/4,
             (1,-1):1/4, (2,-1):1/4 }
replicas = 20
horizon = 2000
backward_runs = 200
)";
}

TEST_CASE("config keys are sorted")
{
    const auto& keys = config_keys();
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("parse a config with a multi-line law block")
{
    const auto cfg = parse_config(kExample);
    CHECK(cfg.kind == ExperimentKind::Classify);
    REQUIRE(cfg.seed.has_value());
    CHECK(*cfg.seed == 42);
    CHECK(cfg.replicas == 20);
    REQUIRE(cfg.law.has_value());
    const auto& law = std::get<VectorLaw>(*cfg.law);
    CHECK(law.dim() == 2);
    CHECK(law.atoms().size() == 4);
}

TEST_CASE("law grammar")
{
    const auto fin = std::get<IncrementLaw>(parse_law("finite{ -1:3/10, 0:0.4, 1:3/10 }"));
    CHECK(fin.exact_probs()[1] == Rational(2, 5));
    CHECK(*fin.exact_mean() == 0);

    const auto st = std::get<IncrementLaw>(parse_law("stable{ alpha=1.5, beta=-1, scale=1 }"));
    REQUIRE(st.stable() != nullptr);
    CHECK(st.stable()->stable.rho == doctest::Approx(2.0 / 3.0));

    const auto prod = std::get<VectorLaw>(parse_law("product{ finite{-1:1/2, 1:1/2} x stable{alpha=1.5, beta=1} }"));
    CHECK(prod.is_product());
    CHECK(prod.dim() == 2);

    CHECK_THROWS_AS(parse_law("finite{ -1:1/2, 1 }"), std::invalid_argument);
    CHECK_THROWS_AS(parse_law("stable{ alpha=1.5, gamma=2 }"), std::invalid_argument);
    CHECK_THROWS_AS(parse_law("gaussian{ }"), std::invalid_argument);
}

TEST_CASE("config errors carry line numbers")
{
    CHECK(error_line("seed = 1\nreplicas = 10\nbogus = 3\n") == 3);
    CHECK(error_line("seed = 1\n\nseed = 2\n") == 3);
    CHECK(error_line("# comment\nreplicas = ten\n") == 2);
    CHECK(error_line("law = finite{ -1:1/2,\n 1:1/2\n") == 1);
    CHECK(error_line("seed 5\n") == 1);
    CHECK(error_line("experiment = plot\n") == 1);
    CHECK(error_line("seed = 1\nreplicas = 10\n") == -1);
}

TEST_CASE("comments and whitespace")
{
    const auto a = parse_config("seed = 7   # master\n  replicas=   30\n");
    const auto b = parse_config("replicas = 30\nseed = 7\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
}

TEST_CASE("hash ignores output location and threads")
{
    auto a = parse_config(kExample);
    auto b = a;
    set_config_value(b, "out", "/somewhere/else", 0);
    set_config_value(b, "threads", "3", 0);
    CHECK(a.hash() == b.hash());
    set_config_value(b, "replicas", "21", 0);
    CHECK(a.hash() != b.hash());
}

TEST_CASE("fnv1a reference values")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("missing seed is rejected")
{
    auto cfg = parse_config("experiment = ladder\n");
    RunResult res;
    CHECK_THROWS_AS(render_experiment(cfg, res), ConfigError);
}

TEST_CASE("classify on the positive drift joint law")
{
    auto cfg = parse_config(kExample);
    const auto dir = scratch_dir("classify");
    set_config_value(cfg, "out", dir.string(), 0);
    set_config_value(cfg, "format", "json", 0);
    const auto res = run_experiment(cfg);
    const auto j = nlohmann::json::parse(slurp(dir / "classify.json"));
    CHECK(j["class"] == "PositiveRecurrent");
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m["seed"] == 42);
    CHECK(m["experiment"] == "classify");
    CHECK(m["outputs"].size() == 1);
    CHECK(fs::exists(dir / "classify.json"));
    for (const auto& e : fs::directory_iterator(dir))
    {
        CHECK(e.path().extension() != ".partial");
    }
    fs::remove_all(dir);
}

TEST_CASE("identical configs give identical bytes")
{
    for (const char* kind : {"simulate", "ladder", "maxdist", "subordinate", "renewal", "backward", "essential"})
    {
        auto cfg = parse_config("seed = 99\nreplicas = 50\nhorizon = 200\n");
        set_config_value(cfg, "experiment", kind, 0);
        set_config_value(cfg, "green_K", "200", 0);
        set_config_value(cfg, "backward_runs", "50", 0);
        RunResult r1, r2;
        const auto a = render_experiment(cfg, r1);
        const auto b = render_experiment(cfg, r2);
        CHECK(a == b);
        CHECK(r1.summary == r2.summary);
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("atomic writes leave no partial file")
{
    const auto dir = scratch_dir("atomic");
    const auto path = (dir / "x.csv").string();
    write_atomic(path, "a,b\n1,2\n");
    CHECK(slurp(path) == "a,b\n1,2\n");
    CHECK_FALSE(fs::exists(path + ".partial"));
    fs::remove_all(dir);
}
