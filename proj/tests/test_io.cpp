#include "quadctrl/io.hpp"

#include "quadctrl/scenarios.hpp"
#include "support/test_helpers.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace quadctrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("quadctrl_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("Hamiltonian JSON round trip is bit exact through files") {
    testing::Rng rng(91);
    TempDir tmp;
    for (int trial = 0; trial < 5; ++trial) {
        QuadraticHamiltonian h = rng.hamiltonian(rng.integer(1, 3), 0.4, {});
        h.g(0, 0) += 1.0 / 3.0;  // awkward decimals on purpose
        const fs::path file = tmp.path / "h.json";
        write_json_file(file, hamiltonian_to_json(h));
        const QuadraticHamiltonian back = hamiltonian_from_json(read_json_file(file));
        CHECK(back.n_modes == h.n_modes);
        CHECK(max_abs(Matrix(back.g - h.g)) == 0.0);
        CHECK(max_abs(Matrix(back.b - h.b)) == 0.0);
        CHECK(back.drive_mask == h.drive_mask);
    }
}

TEST_CASE("strict parsing rejects malformed Hamiltonian files") {
    testing::Rng rng(92);
    const Json good = hamiltonian_to_json(rng.hamiltonian(2));
    SUBCASE("unknown key") {
        Json j = good;
        j["extra"] = 1;
        CHECK_THROWS_AS(hamiltonian_from_json(j), InvalidInputError);
    }
    SUBCASE("missing key") {
        Json j = good;
        j.erase("B_im");
        CHECK_THROWS_AS(hamiltonian_from_json(j), InvalidInputError);
    }
    SUBCASE("ragged matrix") {
        Json j = good;
        j["G_re"][0] = Json::array({1.0});
        CHECK_THROWS_AS(hamiltonian_from_json(j), InvalidInputError);
    }
    SUBCASE("driven index out of range") {
        Json j = good;
        j["driven_modes"] = Json::array({5});
        CHECK_THROWS_AS(hamiltonian_from_json(j), InvalidInputError);
    }
    SUBCASE("non-Hermitian payload") {
        Json j = good;
        j["G_im"][0][0] = 0.5;  // imaginary diagonal breaks Hermiticity
        CHECK_THROWS_AS(hamiltonian_from_json(j), InvalidInputError);
    }
}

TEST_CASE("linear-system JSON round trip preserves structure and basis") {
    const Scenario s = make_scenario("ecd");
    const Json j = system_to_json(s.system);
    const LinearControlSystem back = system_from_json(j);
    CHECK(max_abs(Matrix(back.a - s.system.a)) == 0.0);
    CHECK(max_abs(Matrix(back.c - s.system.c)) == 0.0);
    CHECK(back.basis_tag == s.system.basis_tag);

    Json bad = j;
    bad["basis"] = "sideways";
    CHECK_THROWS_AS(system_from_json(bad), InvalidInputError);
}

TEST_CASE("load_system_file sniffs both schemas") {
    testing::Rng rng(93);
    TempDir tmp;
    const QuadraticHamiltonian h = rng.hamiltonian(2);
    write_json_file(tmp.path / "h.json", hamiltonian_to_json(h));
    const LinearControlSystem from_h = load_system_file(tmp.path / "h.json");
    CHECK(from_h.d() == 4);
    CHECK(from_h.basis_tag == BasisTag::mode_basis);

    const Scenario s = make_scenario("ecd");
    write_json_file(tmp.path / "sys.json", system_to_json(s.system));
    const LinearControlSystem from_s = load_system_file(tmp.path / "sys.json");
    CHECK(max_abs(Matrix(from_s.a - s.system.a)) == 0.0);
}

TEST_CASE("format_double round-trips arbitrary doubles") {
    testing::Rng rng(94);
    for (int trial = 0; trial < 500; ++trial) {
        const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.integer(-12, 12));
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("pulse CSV layout") {
    TempDir tmp;
    const ControlPulse pulse(
        1.0, 2,
        [](double t) {
            Vector u(2);
            u << Complex(t, -t), Complex(2.0 * t, 0.5);
            return u;
        },
        PulseProvenance::user);
    const fs::path file = tmp.path / "pulse.csv";
    write_pulse_csv(file, pulse, {0.0, 0.5, 1.0});

    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,u_1_re,u_1_im,u_2_re,u_2_im");
    std::string row;
    std::getline(in, row);
    std::getline(in, row);
    CHECK(row == "0.5,0.5,-0.5,1,0.5");
}

TEST_CASE("kalman report JSON carries the decision data") {
    const Scenario s = make_scenario("two_mode_chain");
    const Json j = kalman_report_to_json(analyze(s.system));
    CHECK(j["numerical_rank"] == 4);
    CHECK(j["controllable"] == true);
    CHECK(j["singular_values"].size() == 4);
    CHECK(j["kalman_re"].size() == 4);
    CHECK(j["kalman_re"][0].size() == 4);
}
