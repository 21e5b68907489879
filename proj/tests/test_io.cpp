#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "dyncert/errors.hpp"
#include "dyncert/io.hpp"

using namespace dyncert;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("dyncert-io-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("models round-trip through JSON") {
    const ModelSystem models[] = {ModelSystem::harmonic(), ModelSystem::kerr(-0.013), ModelSystem::pendulum(-0.02),
                                  ModelSystem::morse(7.3), ModelSystem::infinite_well()};
    for (const auto& m : models) {
        ModelSystem back = model_from_json(json::parse(to_json(m).dump()));
        CHECK(back.kind == m.kind);
        CHECK(back.alpha == m.alpha);
        CHECK(back.lambda == m.lambda);
    }
    CHECK_THROWS(model_from_json(json{{"kind", "pendulum"}, {"alpha", 0.1}}));
    CHECK_THROWS(model_from_json(json{{"kind", "spring"}}));
}

TEST_CASE("slices round-trip bit for bit") {
    for (const auto& m : {ModelSystem::morse(10), ModelSystem::pendulum(-0.02), ModelSystem::infinite_well()}) {
        SpectrumSlice s = build_slice(m, levels_upto(m, 5));
        SpectrumSlice back = slice_from_json(json::parse(to_json(s).dump()));
        CHECK(back.indices == s.indices);
        CHECK(back.energies == s.energies);
        CHECK(back.sgn == s.sgn);
    }
    json bad = to_json(build_slice(ModelSystem::harmonic(), levels_upto(ModelSystem::harmonic(), 2)));
    bad["sgn_matrix"].erase(0);
    CHECK_THROWS_AS(slice_from_json(bad), DomainError);
}

TEST_CASE("unbounded windows serialize with a null upper edge") {
    json j = to_json(EnergyWindow{0.0, std::numeric_limits<double>::infinity()});
    CHECK(j["e_min"] == 0.0);
    CHECK(j["e_max"].is_null());
    CHECK(to_json(EnergyWindow{0.5625, 2.25})["e_max"] == 2.25);
}

TEST_CASE("slice cache stores, reloads and keys by model and selector") {
    fs::path dir = scratch("cache");
    ModelSystem m = ModelSystem::kerr(0.02);
    std::string key = slice_cache_key(m, "tau=1");
    CHECK(key.size() == 16);
    CHECK(key == slice_cache_key(ModelSystem::kerr(0.02), "tau=1"));
    CHECK(key != slice_cache_key(ModelSystem::kerr(0.0200001), "tau=1"));
    CHECK(key != slice_cache_key(m, "tau=1.1"));
    CHECK_FALSE(cache_load(dir, key).has_value());

    SpectrumSlice s = build_slice(m, energy_window(m, 1.0));
    cache_store(dir, key, s);
    auto hit = cache_load(dir, key);
    REQUIRE(hit.has_value());
    CHECK(hit->sgn == s.sgn);
    CHECK(to_json(*hit).dump() == to_json(s).dump());
    std::string first = read_all(dir / ("slice-" + key + ".json"));
    cache_store(dir, key, *hit);
    CHECK(read_all(dir / ("slice-" + key + ".json")) == first);

    std::ofstream(dir / ("slice-" + key + ".json")) << "{ truncated";
    CHECK_FALSE(cache_load(dir, key).has_value());
    fs::remove_all(dir);
}

TEST_CASE("score records load back as states") {
    fs::path dir = scratch("state");
    auto s = std::make_shared<SpectrumSlice>(build_slice(ModelSystem::pendulum(-0.02), levels_upto(ModelSystem::pendulum(-0.02), 6)));
    ScoreResult r = max_score(s, 1.0);
    std::ofstream(dir / "opt.json") << to_json(r).dump(2);
    QuantumState st = load_state(dir / "opt.json");
    CHECK(st.slice->indices == s->indices);
    CHECK(std::abs(score_state(st, 1.0) - r.p3_max) < 1e-10);

    std::ofstream(dir / "partial.json") << R"({"model":{"kind":"harmonic"},"indices":[0,1]})";
    CHECK_THROWS_AS(load_state(dir / "partial.json"), UsageError);
    std::ofstream(dir / "mismatch.json") << R"({"model":{"kind":"harmonic"},"indices":[0,1],"amplitudes":[[1,0]]})";
    CHECK_THROWS_AS(load_state(dir / "mismatch.json"), UsageError);
    CHECK_THROWS_AS(load_state(dir / "missing.json"), UsageError);
    fs::remove_all(dir);
}

TEST_CASE("unnormalized amplitudes are normalized on load") {
    fs::path dir = scratch("norm");
    std::ofstream(dir / "s.json") << R"({"model":{"kind":"harmonic"},"indices":[0,1],"amplitudes":[[3,0],[0,4]]})";
    QuantumState st = load_state(dir / "s.json");
    CHECK(st.amplitudes.norm() == doctest::Approx(1.0));
    CHECK(st.amplitudes(1).imag() == doctest::Approx(0.8));
    fs::remove_all(dir);
}

TEST_CASE("CSV layouts carry axis headers") {
    WignerGrid g;
    g.q_axis = {-1.0, 1.0};
    g.p_axis = {0.0, 0.5, 1.0};
    g.values = Eigen::MatrixXd::Constant(2, 3, 0.25);
    std::string csv = grid_csv(g);
    CHECK(csv.rfind("q\\p,0,0.5,1\n", 0) == 0);
    CHECK(csv.find("-1,0.25,0.25,0.25\n") != std::string::npos);
    g.angular = true;
    CHECK(grid_csv(g).rfind("phi\\m,", 0) == 0);

    RealGrid d({0.0, 1.0}, {0.5, 0.25});
    CHECK(density_csv(d) == "q,density\n0,0.5\n1,0.25\n");
}

TEST_CASE("McEstimate and scenario records serialize their fields") {
    json e = to_json(McEstimate{0.687, 0.0005, 1000000, 7});
    CHECK(e["seed"] == 7);
    CHECK(e["n_rounds"] == 1000000);
    CHECK(e.contains("stderr"));
    json t = to_json(scenario_compare(ModelSystem::kerr(-0.02), 6));
    REQUIRE(t["records"].size() == 3);
    CHECK(t["records"][0]["score"].get<double>() >= t["records"][1]["score"].get<double>());
}
