// Tests for configuration parsing, deterministic formatting, and the CLI
// command implementations (called directly, no subprocess).

#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <aaphase/cli.hpp>

using namespace aaphase;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("aaphase-unit-" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : s) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

} // namespace

TEST_CASE("config files parse with comments, blanks, and diagnostics") {
    const fs::path cfg = temp_dir() / "good.cfg";
    spit(cfg,
         "# model\n"
         "eps1 = 0\n"
         "eps2 = 1\n"
         "d0 = 1.7320508075688772\n"
         "omega = 1.0   # resonant-ish\n"
         "\n"
         "branch = integer-n\n"
         "order_n = 2\n"
         "re_c1 = 1\n"
         "im_c1 = 0\n"
         "oracle = true\n"
         "sign = -\n");
    const RunConfig c = parse_config_file(cfg.string());
    CHECK(c.params.d0 == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(c.branch == "integer-n");
    CHECK(c.order_n == 2);
    CHECK(c.oracle);
    CHECK(c.sign == -1);

    const fs::path bad1 = temp_dir() / "bad1.cfg";
    spit(bad1, "eps1 = 0\nnonsense = 3\n");
    try {
        parse_config_file(bad1.string());
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
        CHECK(std::string(e.what()).find("nonsense") != std::string::npos);
    }

    const fs::path bad2 = temp_dir() / "bad2.cfg";
    spit(bad2, "omega = fast\n");
    CHECK_THROWS_AS(parse_config_file(bad2.string()), config_error);
    const fs::path bad3 = temp_dir() / "bad3.cfg";
    spit(bad3, "just a line\n");
    CHECK_THROWS_AS(parse_config_file(bad3.string()), config_error);
    CHECK_THROWS_AS(parse_config_file((temp_dir() / "missing.cfg").string()),
                    config_error);
}

TEST_CASE("overrides parse and win over file values") {
    RunConfig c;
    c.params.omega = 1.0;
    apply_override(c, "omega=2.5");
    CHECK(c.params.omega == 2.5);
    apply_override(c, " tol = 1e-9 ");
    CHECK(c.tol == 1e-9);
    CHECK_THROWS_AS(apply_override(c, "omega"), config_error);
    CHECK_THROWS_AS(apply_override(c, "=3"), config_error);
    CHECK_THROWS_AS(apply_override(c, "bogus=1"), config_error);
}

TEST_CASE("doubles format round-trippable and locale-free") {
    for (double v : {0.5, 1.0 / 3.0, pi, -0.0, 1e-300, 12345.678901234567}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV rendering uses LF and no trailing separators") {
    Table t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}, {"3", ""}};
    CHECK(render_csv(t) == "a,b\n1,2\n3,\n");
}

TEST_CASE("evolve writes the advertised table and is reproducible") {
    RunConfig c;
    c.params = {0.0, 1.0, 0.8, 1.1, 0.3};
    c.t_max = 10.0;
    c.n_points = 17;
    c.out = (temp_dir() / "evolve1.csv").string();
    REQUIRE(cmd_evolve(c) == 0);
    const std::string first = slurp(c.out);
    const auto lines = split_lines(first);
    REQUIRE(lines.size() == 18);  // header + 17 rows
    CHECK(lines[0] == "t,re_c1,im_c1,re_c2,im_c2,pop1,pop2,mean_energy");
    CHECK(lines[1].substr(0, 2) == "0,");
    c.out = (temp_dir() / "evolve2.csv").string();
    REQUIRE(cmd_evolve(c) == 0);
    CHECK(slurp(c.out) == first);

    // Degenerate grids and bad formats are configuration errors.
    RunConfig bad = c;
    bad.t_max = 0.0;
    CHECK_THROWS_AS(cmd_evolve(bad), config_error);
    bad = c;
    bad.n_points = 1;
    CHECK_THROWS_AS(cmd_evolve(bad), config_error);
    bad = c;
    bad.format = "yaml";
    CHECK_THROWS_AS(cmd_evolve(bad), config_error);
}

TEST_CASE("evolve against the oracle stays within the advertised bound") {
    RunConfig c;
    c.params = {0.0, 1.0, 1.2, 0.9, 0.0};
    c.t_max = 20.0;
    c.n_points = 21;
    c.oracle = true;
    c.tol = 1e-10;
    c.format = "json";
    c.out = (temp_dir() / "evolve_oracle.json").string();
    REQUIRE(cmd_evolve(c) == 0);
    const auto j = nlohmann::json::parse(slurp(c.out));
    REQUIRE(j["columns"].back() == "oracle_dev");
    for (const auto& row : j["rows"]) {
        CHECK(row.size() == j["columns"].size());
        CHECK(row.back().get<double>() <= 1e-7);
    }
}

TEST_CASE("phase emits a complete record for every branch") {
    RunConfig c;
    c.params = {0.0, 1.0, std::sqrt(3.0), 1.0, 0.0};
    c.branch = "integer-n";
    c.order_n = 2;
    c.out = (temp_dir() / "phase.json").string();
    REQUIRE(cmd_phase(c) == 0);
    const auto j = nlohmann::json::parse(slurp(c.out));
    CHECK(j["branch"] == "integer-n");
    CHECK(j["tau"].get<double>() == Catch::Approx(2.0 * pi).epsilon(1e-15));
    CHECK(j["fidelity_defect"].get<double>() <= 1e-9);
    CHECK(j["cross_check_deviation"].get<double>() <= 1e-8);
    CHECK(principal_angle(j["beta"].get<double>()) ==
          Catch::Approx(-1.2489046653423497).margin(1e-9));
    CHECK(std::abs(j["beta"].get<double>() -
                   (j["phi"].get<double>() + j["dyn"].get<double>())) < 1e-10);

    // The generic branch emits its own state.
    RunConfig g;
    g.params = {0.0, 1.0, 0.5, 0.7, 0.0};
    g.branch = "generic-T-minus";
    g.out = (temp_dir() / "phase_gen.json").string();
    REQUIRE(cmd_phase(g) == 0);
    const auto jg = nlohmann::json::parse(slurp(g.out));
    CHECK(jg["branch"] == "generic-T-minus");
    const double re1 = jg["s0"]["re_c1"].get<double>();
    CHECK(re1 >= 0.0);
    CHECK(jg["s0"]["im_c1"].get<double>() == Catch::Approx(0.0).margin(1e-12));

    RunConfig bad;
    bad.branch = "numeric";  // tau left unset
    CHECK_THROWS_AS(cmd_phase(bad), config_error);
    bad.branch = "unheard-of";
    bad.tau = 1.0;
    CHECK_THROWS_AS(cmd_phase(bad), config_error);
}

TEST_CASE("phase on the numeric branch certifies a commensurate return") {
    RunConfig c;
    c.params = {0.0, 1.0, std::sqrt(1.0625), 3.0, 0.0};  // Gamma/omega = 3/4
    c.branch = "numeric";
    c.tau = 2.0 * rabi(c.params).t_field;
    c.re_c1 = 0.6;
    c.im_c1 = 0.0;
    c.re_c2 = 0.0;
    c.im_c2 = 0.8;
    c.out = (temp_dir() / "phase_num.json").string();
    REQUIRE(cmd_phase(c) == 0);
    const auto j = nlohmann::json::parse(slurp(c.out));
    CHECK(j["branch"] == "numeric");
    CHECK(j["fidelity_defect"].get<double>() <= 1e-9);
    // Cross-check on this branch: closed dynamical phase vs quadrature.
    CHECK(j["cross_check_deviation"].get<double>() <= 1e-9);
    const double phi = j["phi"].get<double>();
    CHECK(angle_diff(phi, commensurate(c.params, 3, 2).phi) < 1e-9);
}

TEST_CASE("scan classifies loci, keeps off-locus rows, and is thread-invariant") {
    RunConfig c;
    c.params = {0.0, 1.0, std::sqrt(3.0), 1.0, 0.0};
    c.axis = "omega";
    c.axis_min = 0.5;
    c.axis_max = 1.5;
    c.axis_steps = 3;  // {0.5, 1.0, 1.5}; omega = 1 sits on the n = 2 locus
    c.out = (temp_dir() / "scan1.csv").string();
    REQUIRE(cmd_scan(c) == 0);
    const std::string first = slurp(c.out);
    const auto lines = split_lines(first);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] ==
          "value,omega,d0,gamma_over_omega,branch,status,beta_e1,beta_e2,beta_sym");
    CHECK(lines[1].find("not-cyclic") != std::string::npos);
    CHECK(lines[1].back() == ',');  // empty beta cells survive
    CHECK(lines[2].find("integer-n,ok") != std::string::npos);
    CHECK(lines[3].find("not-cyclic") != std::string::npos);

    // Same rows regardless of the thread count.
    setenv("AA_PHASE_THREADS", "3", 1);
    c.out = (temp_dir() / "scan2.csv").string();
    REQUIRE(cmd_scan(c) == 0);
    unsetenv("AA_PHASE_THREADS");
    CHECK(slurp(c.out) == first);

    // steps = 0: header-only output, exit 0.
    RunConfig empty = c;
    empty.axis_steps = 0;
    empty.out = (temp_dir() / "scan_empty.csv").string();
    REQUIRE(cmd_scan(empty) == 0);
    CHECK(split_lines(slurp(empty.out)).size() == 1);

    RunConfig bad = c;
    bad.axis = "temperature";
    CHECK_THROWS_AS(cmd_scan(bad), config_error);
    bad = c;
    bad.axis_steps = -1;
    CHECK_THROWS_AS(cmd_scan(bad), config_error);
    bad = c;
    bad.axis_min = 2.0;  // min > max
    CHECK_THROWS_AS(cmd_scan(bad), config_error);
}

TEST_CASE("scan over the adiabatic order reports the solved frequencies") {
    RunConfig c;
    c.params = {0.0, 1.0, 0.25, 1.0, 0.0};  // d0 reused as the fixed coupling
    c.axis = "order-n";
    c.axis_min = 10.0;
    c.axis_max = 12.0;
    c.axis_steps = 3;
    c.format = "json";
    c.out = (temp_dir() / "scan_n.json").string();
    REQUIRE(cmd_scan(c) == 0);
    const auto j = nlohmann::json::parse(slurp(c.out));
    REQUIRE(j.size() == 3);
    const auto rows = adiabatic_berry_scan(1.0, 0.25, {10, 11, 12});
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(j[k]["status"] == "ok");
        CHECK(j[k]["omega"].get<double>() ==
              Catch::Approx(rows[k].omega_n).epsilon(1e-12));
        CHECK(j[k]["beta_e1"].get<double>() ==
              Catch::Approx(rows[k].beta1).margin(1e-10));
    }
}
