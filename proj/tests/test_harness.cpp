#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vms/harness.hpp"

using namespace vms;

namespace {

const std::string minimal = R"(# smallest useful run
kind = stationary-adr
gamma = 1
c = 10
mu = 1
n_elements = 20
mode = galerkin
)";

int parse_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigParseError& e) {
        return e.line();
    }
    return -1;
}

std::string validation_field(const std::string& text) {
    try {
        for (const auto& c : parse_config(text)) c.validate();
    } catch (const ConfigValidationError& e) {
        return e.field();
    }
    return "";
}

const CsvArtifact& artifact(const RunResult& r, const std::string& suffix) {
    for (const auto& a : r.artifacts) {
        if (a.filename.size() >= suffix.size() && a.filename.ends_with(suffix)) return a;
    }
    throw std::runtime_error("missing artifact " + suffix);
}

}  // namespace

TEST_CASE("minimal config runs") {
    const auto cfgs = parse_config(minimal);
    REQUIRE(cfgs.size() == 1);
    const RunConfig& c = cfgs[0];
    CHECK(c.kind == ProblemKind::stationary);
    CHECK(c.gamma == 1.0);
    CHECK(c.n_elements == 20);
    CHECK(c.modes == std::vector<std::string>{"galerkin"});
    c.validate();
    const auto r = execute(c);
    REQUIRE(r.solution);
    CHECK(r.solution->x.size() == 21);
    const auto& csv = artifact(r, "_solution.csv");
    const auto t = parse_csv(csv.render());
    CHECK(t.column("x").size() == 21);
    CHECK(t.column("galerkin") == r.solution->curve("galerkin").levels.at(0));
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(parse_error_line("kind = stationary-adr\ngamma 1\n") == 2);
    CHECK(parse_error_line("kind = stationary-adr\n\n# note\nbogus = 3\n") == 4);
    CHECK(parse_error_line("kind = stationary-adr\nmu = 1\nmu = 2\n") == 3);
    CHECK(parse_error_line("kind = stationary-adr\nmu = one\n") == 2);
    CHECK(parse_error_line("kind = stationary-adr\nn_elements = 2.5\n") == 2);
    CHECK(parse_error_line("kind = planetary\n") == 1);
    CHECK(parse_error_line("[a]\nkind = evolutive-ad\n[b\n") == 3);
    CHECK(parse_error_line(minimal) == -1);
}

TEST_CASE("validation errors name the field") {
    auto with = [](const std::string& line) { return minimal + line + "\n"; };
    std::string no_mu = minimal;
    no_mu.replace(no_mu.find("mu = 1"), 6, "mu = 0");
    CHECK(validation_field(no_mu) == "mu");
    std::string small = minimal;
    small.replace(small.find("n_elements = 20"), 15, "n_elements = 1");
    CHECK(validation_field(small) == "n_elements");
    std::string bad_mode = minimal;
    bad_mode.replace(bad_mode.find("mode = galerkin"), 15, "mode = spectral-vms:0");
    CHECK(validation_field(bad_mode) == "mode");
    CHECK(validation_field(with("k = 0.1")) == "k");
    CHECK(validation_field(with("initial = box")) == "initial");

    const std::string ev = "kind = evolutive-ad\nc = 1\nmu = 1\nn_elements = 10\nmode = galerkin\n";
    CHECK(validation_field(ev + "k = 0.1\nT = 0.25\n") == "T");
    CHECK(validation_field(ev + "T = 0.2\n") == "k");
    CHECK(validation_field(ev + "k = 0.1\nT = 0.2\n") == "");
    CHECK(validation_field(ev + "k = 0.1\nT = 0.2\ngamma = 3\n") == "gamma");
    CHECK(validation_field(ev + "k = 0.1\nT = 0.2\nreference = fine-galerkin\ncomparison = fine\n") == "");
    CHECK(validation_field(ev + "k = 0.1\nT = 0.2\nsweep = M\nsweep_values = 3, 5, 7\n") == "sweep");
}

TEST_CASE("every preset round-trips through the config format") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto cfgs = preset_configs(name);
        REQUIRE_FALSE(cfgs.empty());
        for (const auto& c : cfgs) CHECK_NOTHROW(c.validate());
        const std::string text = serialize(cfgs);
        const auto back = parse_config(text);
        CHECK(back == cfgs);
        CHECK(serialize(back) == text);
    }
    CHECK_THROWS_AS(preset_configs("fig-nope"), UnknownPreset);
}

TEST_CASE("preset catalog values") {
    const auto a = preset_configs("fig-rcd1a").at(0);
    CHECK(a.gamma == 1.0);
    CHECK(a.c == 400.0);
    CHECK(a.n_elements == 40);
    CHECK(a.modes == std::vector<std::string>{"galerkin", "spectral-vms:2", "spectral-vms:3", "spectral-vms:14", "spectral-vms:15"});
    const auto s = preset_configs("fig-ev1step").at(0);
    CHECK(s.time_step() == 1e-5);
    CHECK(s.final_time() == 1e-5);
    CHECK(s.reference == ReferencePolicy::fine_galerkin);
    const auto h = preset_configs("fig-hauke").at(0);
    CHECK(h.time_step() == doctest::Approx(9.2593e-6).epsilon(1e-4));
    const auto m = preset_configs("conv-m-evolutive").at(0);
    CHECK(m.time_step() / (1.0 / m.n_elements) == doctest::Approx(5.0));
    CHECK(preset_configs("conv-m-stationary").size() == 2);
}

TEST_CASE("config file equals preset byte for byte") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "vms_harness_test";
    fs::create_directories(dir);
    for (const std::string name : {"fig-rcd1b", "fig-ev1"}) {
        const fs::path cfg = dir / (name + ".cfg");
        std::ofstream(cfg) << serialize(preset_configs(name));
        const auto a = run_preset(name);
        const auto b = run_config(cfg.string());
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a[i].artifacts.size() == b[i].artifacts.size());
            for (std::size_t j = 0; j < a[i].artifacts.size(); ++j) {
                CHECK(a[i].artifacts[j].filename == b[i].artifacts[j].filename);
                CHECK(a[i].artifacts[j].render() == b[i].artifacts[j].render());
            }
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("solution CSVs round-trip the nodal vectors") {
    const auto r = run_preset("fig-ev1").at(0);
    const auto t = parse_csv(artifact(r, "_solution.csv").render());
    const auto& sol = *r.solution;
    const auto step = t.column("step");
    for (const auto& curve : sol.curves) {
        const auto col = t.column(curve.label);
        std::size_t row = 0;
        for (std::size_t n = 0; n < curve.levels.size(); ++n) {
            for (double v : curve.levels[n]) {
                REQUIRE(row < col.size());
                CHECK(step[row] == static_cast<double>(n));
                CHECK(col[row] == v);
                ++row;
            }
        }
        CHECK(row == col.size());
    }
    CHECK(t.comments.at(0) == "vms-spectral 1.0.0");
    CHECK(t.comments.at(1) == "run: fig-ev1");
}

TEST_CASE("number formatting") {
    CHECK(format_number(1.0) == "1.0000000000000000e+00");
    CHECK(format_number(-2.5) == "-2.5000000000000000e+00");
    CHECK(format_number(-2.5e-7) == "-2.4999999999999999e-07");
    for (double v : {0.1, 1.0 / 3, 6.02214076e23, -1e-300}) CHECK(std::stod(format_number(v)) == v);
    CsvArtifact a{"x.csv", {"hello"}, {"a", "b"}, {{"1", "2"}}};
    CHECK(a.render() == "# hello\na,b\n1,2\n");
}

TEST_CASE("artifacts are deterministic") {
    const auto c = preset_configs("fig-rcd1a").at(0);
    const auto a = execute(c), b = execute(c);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].render() == b.artifacts[i].render());
}

TEST_CASE("mode tokens") {
    CHECK(std::holds_alternative<Galerkin>(parse_mode("galerkin")));
    CHECK(std::get<SpectralVMS>(parse_mode("spectral-vms:15")).M == 15);
    CHECK(std::get<SpectralVMS>(parse_mode("spectral-vms", 7)).M == 7);
    CHECK_FALSE(std::get<TauVMS>(parse_mode("tau-vms:exact")).M.has_value());
    CHECK(std::get<TauVMS>(parse_mode("tau-vms:9")).M == 9);
    for (const std::string bad : {"spectral-vms", "spectral-vms:x", "spectral-vms:0", "tau-vms:", "supg"}) {
        CAPTURE(bad);
        try {
            parse_mode(bad);
            FAIL("accepted");
        } catch (const ConfigValidationError& e) {
            CHECK(e.field() == "mode");
        }
    }
}

TEST_CASE("convergence and tau artifacts") {
    auto c = preset_configs("conv-h-stationary").at(0);
    const auto r = execute(c);
    REQUIRE(r.convergence);
    const auto slopes = parse_csv(artifact(r, "_slopes.csv").render());
    CHECK(slopes.header == std::vector<std::string>{"comparison", "parameter", "norm", "slope", "min_pairwise", "max_pairwise"});
    CHECK(slopes.rows.size() == 8);
    const auto errs = parse_csv(artifact(r, "_errors.csv").render());
    CHECK(errs.rows.size() == 10);

    const auto tau = execute(preset_configs("tau-table").at(0));
    REQUIRE(tau.tau);
    CHECK(tau.tau->rows.size() == 3 * 20);
    CHECK(tau.tau->asymptotic.size() == 4);
    CHECK(tau.artifacts.size() == 3);
}
