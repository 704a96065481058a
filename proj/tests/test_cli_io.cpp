#include <doctest.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "elastoborn/config.hpp"
#include "elastoborn/error.hpp"
#include "elastoborn/field_io.hpp"
#include "elastoborn/run.hpp"
#include "helpers.hpp"

using namespace elastoborn;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("elastoborn_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int line_of_error(const std::string& text) {
    try {
        parse_config_text(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("field files round trip bitwise") {
    TempDir t("fields");
    Grid g(16, 2.0);
    auto B = th::bump(g, {0.1, 0.2, -0.1}, 0.6, -0.37);
    B.support = Support::upstream;
    write_field(t.path, "b", B);
    auto R = read_field(t.path / "b");
    CHECK(th::bitwise_equal(R, B));
    CHECK(R.support == Support::upstream);
    CHECK(th::bitwise_equal(read_field(t.path / "b.f64"), B));
    CHECK(field_exists(t.path, "b"));
    CHECK_FALSE(field_exists(t.path, "nope"));

    VectorField V(g);
    V[0] = B;
    V[2] = -1.0 * B;
    write_field(t.path, "v", V);
    auto W = read_vector_field(t.path, "v");
    for (int a = 0; a < 3; ++a) CHECK(th::bitwise_equal(W[a], V[a]));
}

TEST_CASE("damaged field files are rejected") {
    TempDir t("damaged");
    Grid g(8, 2.0);
    auto B = th::bump(g);
    write_field(t.path, "b", B);

    // truncated payload
    fs::resize_file(t.path / "b.f64", fs::file_size(t.path / "b.f64") - 8);
    CHECK_THROWS_AS(read_field(t.path / "b"), Error);

    // sidecar N disagrees with the payload
    write_field(t.path, "c", B);
    {
        std::ofstream js(t.path / "c.json");
        js << R"({"N": 16, "L": 2.0, "support_tag": "compact", "name": "c"})";
    }
    CHECK_THROWS_WITH_AS(read_field(t.path / "c"), doctest::Contains("shape mismatch"), Error);

    // non-finite values
    auto D = B;
    D.v[5] = std::nan("");
    write_field(t.path, "d", D);
    CHECK_THROWS_AS(read_field(t.path / "d"), Error);

    // missing sidecar
    write_field(t.path, "e", B);
    fs::remove(t.path / "e.json");
    CHECK_THROWS_AS(read_field(t.path / "e"), Error);
}

TEST_CASE("tensor bundles") {
    TempDir t("bundle");
    Grid g(8, 2.0);
    PerturbationSpec s;
    s.mode = PerturbationSpec::Mode::random;
    s.seed = 4;
    auto P = generate_perturbation(s, g);
    write_tensor_bundle(t.path, P, R"({"seed": 4})");
    for (int A = 1; A <= 6; ++A)
        for (int Bv = A; Bv <= 6; ++Bv)
            CHECK(fs::exists(t.path / ("c" + std::to_string(A) + std::to_string(Bv) + ".f64")));
    auto Q = read_tensor_bundle(t.path);
    for (int k = 0; k < kVoigtSlots; ++k) CHECK(th::bitwise_equal(Q.C.slot(k), P.C.slot(k)));
    CHECK(th::bitwise_equal(Q.rho, P.rho));
}

TEST_CASE("config defaults and effective config") {
    auto c = parse_config_text("{}");
    CHECK(c.grid.N == 64);
    CHECK(c.grid.L == 2.0);
    CHECK(c.background.lambda0 == 2.0);
    CHECK(c.channel == "pp");
    CHECK(c.kernel_samples == 200);
    CHECK(c.perturbation.mode == PerturbationSpec::Mode::none);

    const std::string text = R"({
  "grid": {"N": 32},
  "perturbation": {"mode": "random", "seed": 9, "bumps_per_component": 2},
  "expansion": {"channel": "ss", "theta": "-e3", "alpha": "e1", "rule": "fourier"},
  "roundtrip": {"n": 48, "tolerance": {"lambda": 0.2}},
  "out": "somewhere"
})";
    auto a = parse_config_text(text);
    CHECK(a.grid.N == 32);
    CHECK(a.theta == Axis{2, -1});
    CHECK(a.rule == RayRule::fourier);
    CHECK(a.tol_lambda == 0.2);
    CHECK(a.tol_mu == 0.01);
    const std::string eff = effective_config(a);
    auto b = parse_config_text(eff, "effective");
    CHECK(effective_config(b) == eff);
    CHECK(th::bitwise_equal(generate_perturbation(a.perturbation, a.grid).rho,
                            generate_perturbation(b.perturbation, b.grid).rho));
}

TEST_CASE("config errors are line anchored") {
    CHECK(line_of_error("{\n  \"grid\": {\"N\": 64},\n  \"bogus\": 1\n}") == 3);
    CHECK(line_of_error("{\n  \"grid\": {\n    \"N\": 7\n  }\n}") == 3);
    CHECK(line_of_error("{\n  \"background\": {\"lambda0\": -2.0, \"mu0\": 1.0}\n}") == 2);
    CHECK(line_of_error("{\n\n  \"expansion\": {\"channel\": \"pq\"}\n}") == 3);
    const std::string bad_bump = R"({
  "perturbation": {
    "mode": "components",
    "components": {"c11": [{"center": [0.5, 0.0, 0.0], "radius": 0.6}]}
  }
})";
    CHECK(line_of_error(bad_bump) == 4);
    CHECK(line_of_error("{\"grid\": ") == 1);
    try {
        parse_config_text("{\n\"kernel\": {\"samples\": 5}\n}", "k.json");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("k.json:2:", 0) == 0);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("generate_perturbation") {
    Grid g(32, 2.0);
    CHECK(generate_perturbation(PerturbationSpec{}, g).C.is_zero());

    PerturbationSpec s;
    s.mode = PerturbationSpec::Mode::components;
    const BumpSpec b{{0.0, 0.0, 0.0}, 0.5, 1.0};
    s.components["c16"] = {b};
    auto P = generate_perturbation(s, g);
    double worst = 0.0;
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j)
            for (int k = 0; k < g.N; ++k) {
                const std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                const double s2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.25;
                const double want = s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
                worst = std::max(worst, std::abs(P.C.voigt_component(1, 6).at(i, j, k) - want));
            }
    CHECK(worst <= 1e-14);
    for (int k = 0; k < kVoigtSlots; ++k)
        if (k != voigt_slot(0, 5)) CHECK(P.C.slot(k).is_zero());

    PerturbationSpec r;
    r.mode = PerturbationSpec::Mode::random;
    r.seed = 12;
    auto A = generate_perturbation(r, g), B = generate_perturbation(r, g);
    bool same = th::bitwise_equal(A.rho, B.rho);
    for (int k = 0; k < kVoigtSlots; ++k) same = same && th::bitwise_equal(A.C.slot(k), B.C.slot(k));
    CHECK(same);
    r.seed = 13;
    CHECK_FALSE(th::bitwise_equal(generate_perturbation(r, g).rho, A.rho));

    PerturbationSpec iso;
    iso.mode = PerturbationSpec::Mode::random;
    iso.random_isotropic = true;
    auto I = generate_perturbation(iso, g);
    CHECK(I.iso.has_value());
    CHECK(I.C.voigt_component(1, 6).is_zero());
    CHECK(std::string(kPrngName) == "mt19937_64");
}

TEST_CASE("run: forward on a zero perturbation") {
    TempDir t("fwd");
    RunConfig c;
    c.grid = Grid(16, 2.0);
    c.out = t.path.string();
    std::ostringstream log;
    CHECK(run("forward", c, log) == kExitPass);
    int files = 0;
    for (const auto& e : fs::directory_iterator(t.path))
        if (e.path().extension() == ".f64") {
            ++files;
            CHECK(read_field(e.path()).is_zero());
        }
    CHECK(files >= 4);
    CHECK(fs::exists(t.path / "forward.json"));
    CHECK(fs::exists(t.path / "effective_config.json"));
    // the emitted effective config reproduces the run
    auto again = load_config((t.path / "effective_config.json").string());
    CHECK(effective_config(again) == effective_config(c));
}

TEST_CASE("run: exit codes") {
    TempDir t("codes");
    RunConfig c;
    c.grid = Grid(16, 2.0);
    c.out = (t.path / "k").string();
    std::ostringstream log;
    CHECK(run("kernel-test", c, log) == kExitPass);
    std::ifstream csv(t.path / "k" / "kernel_test.csv");
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line.rfind("xi1,xi2,xi3,sigma_min", 0) == 0);
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 200);

    c.kernel_tolerance = 1.0;  // no sample reaches it
    c.out = (t.path / "k2").string();
    CHECK(run("kernel-test", c, log) == kExitFail);

    c.out = (t.path / "r").string();
    c.input = (t.path / "missing").string();
    CHECK(run("reconstruct", c, log) == kExitError);
    CHECK(run("no-such-command", c, log) == kExitError);
    CHECK(log.str().find("error:") != std::string::npos);
}

TEST_CASE("run: reports are deterministic") {
    TempDir t("det");
    RunConfig c;
    c.grid = Grid(24, 2.0);
    c.perturbation.mode = PerturbationSpec::Mode::random;
    c.perturbation.seed = 3;
    c.channel = "sp";
    c.out = t.path.string();
    std::ostringstream log;
    REQUIRE(run("forward", c, log) == kExitPass);
    const auto first = strip_timing(slurp(t.path / "forward.json"));
    const auto fields = slurp(t.path / "sp_w1.f64");
    REQUIRE(run("forward", c, log) == kExitPass);
    CHECK(strip_timing(slurp(t.path / "forward.json")) == first);
    CHECK(slurp(t.path / "sp_w1.f64") == fields);
}

TEST_CASE("run: fast round trip profile") {
    TempDir t("rt");
    RunConfig c;
    c.roundtrip_n = 32;
    c.tol_lambda = 0.1;
    c.out = t.path.string();
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    CHECK(run("roundtrip", c, log) == kExitPass);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("N=32 round trip " << sec << " s");
    CHECK(sec < 20.0);
    CHECK(fs::exists(t.path / "roundtrip_seed1"));
}

}
