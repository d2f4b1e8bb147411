#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "shapeflow/artifacts.hpp"
#include "shapeflow/bspline.hpp"
#include "shapeflow/errors.hpp"
#include "support/rng.hpp"

using namespace shapeflow;

namespace {

std::string tmp_path(const std::string& name) {
    static const std::string dir = [] {
        auto d = std::filesystem::temp_directory_path() / "shapeflow_artifact_tests";
        std::filesystem::create_directories(d);
        return d.string();
    }();
    return dir + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

/** Random run history with awkward decimal expansions in every column. */
OptimizerResult fake_run(int records, testsupport::Rng& rng) {
    OptimizerResult result;
    result.q = Eigen::VectorXd::Zero(2);
    for (int k = 0; k < records; ++k) {
        EnergyRecord e;
        e.k = k;
        e.t = k * 0.004;
        e.e_pot = rng.uniform(0.0, 5.0);
        e.e_kin = rng.uniform(0.0, 3.0);
        e.e_tot = e.e_pot + e.e_kin;
        result.energy.push_back(e);
        ObjectiveValue b;
        b.j1 = rng.uniform(0.0, 1.0);
        b.j2 = rng.uniform(0.0, 1.0);
        b.j3 = rng.uniform(0.0, 1e-4);
        b.j_lambda = 0.4 * b.j1 + 0.3 * b.j2 + 0.3 * b.j3;
        result.breakdown.push_back(b);
    }
    return result;
}

ShapeParams demo_params() {
    ShapeParams p;
    p.meanline = Eigen::VectorXd(5);
    p.meanline << 0.1, 0.13, 1.0 / 3.0, 0.2 - 0.07, 0.1;
    p.thickness = Eigen::VectorXd(5);
    p.thickness << 0.2, 0.1 + 0.2, 0.15, 1e-3, 0.2;
    p.free_mask = {false, true, true, true, false, false, true, true, true, false};
    return p;
}

} // namespace

TEST_SUITE("artifacts") {

TEST_CASE("energy csv: 251 records produce a 252 line file that reads back exactly") {
    testsupport::Rng rng(0x5eed040u);
    const OptimizerResult run = fake_run(251, rng);
    const std::string path = tmp_path("energy_roundtrip.csv");
    write_energy_csv(run, path);

    const std::string text = slurp(path);
    CHECK(count_occurrences(text, "\n") == 252);
    CHECK(text.rfind("k,t,e_pot,e_kin,e_tot,j1,j2,j3\n", 0) == 0);

    const auto rows = read_energy_csv(path);
    REQUIRE(rows.size() == 251);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].k == run.energy[i].k);
        CHECK(rows[i].t == run.energy[i].t);
        CHECK(rows[i].e_pot == run.energy[i].e_pot);
        CHECK(rows[i].e_kin == run.energy[i].e_kin);
        CHECK(rows[i].e_tot == run.energy[i].e_tot);
        CHECK(rows[i].j1 == run.breakdown[i].j1);
        CHECK(rows[i].j2 == run.breakdown[i].j2);
        CHECK(rows[i].j3 == run.breakdown[i].j3);
    }
}

TEST_CASE("energy csv: repeated writes are byte identical") {
    testsupport::Rng rng(0x5eed041u);
    const OptimizerResult run = fake_run(40, rng);
    const std::string a = tmp_path("energy_det_a.csv");
    const std::string b = tmp_path("energy_det_b.csv");
    write_energy_csv(run, a);
    write_energy_csv(run, b);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("energy csv: breakdown and energy record counts must match") {
    testsupport::Rng rng(0x5eed042u);
    OptimizerResult run = fake_run(5, rng);
    run.breakdown.pop_back();
    CHECK_THROWS_AS(write_energy_csv(run, tmp_path("never_written.csv")), ContractError);
}

TEST_CASE("energy csv: unwritable and unreadable paths raise io errors") {
    testsupport::Rng rng(0x5eed043u);
    const OptimizerResult run = fake_run(2, rng);
    CHECK_THROWS_AS(write_energy_csv(run, "/nonexistent_dir_shapeflow/x.csv"), IoError);
    CHECK_THROWS_AS(read_energy_csv(tmp_path("does_not_exist.csv")), IoError);
}

TEST_CASE("energy csv: malformed content is rejected with the offending line") {
    const std::string path = tmp_path("energy_bad.csv");

    std::ofstream(path) << "time,energy\n";
    CHECK_THROWS_WITH_AS(read_energy_csv(path), doctest::Contains("missing header"), IoError);

    std::ofstream(path) << "k,t,e_pot,e_kin,e_tot,j1,j2,j3\n0,0.0,1.0\n";
    CHECK_THROWS_WITH_AS(read_energy_csv(path), doctest::Contains("line 2"), IoError);

    std::ofstream(path) << "k,t,e_pot,e_kin,e_tot,j1,j2,j3\n0,0.0,oops,0,0,0,0,0\n";
    CHECK_THROWS_WITH_AS(read_energy_csv(path), doctest::Contains("bad number"), IoError);

    std::ofstream(path) << "k,t,e_pot,e_kin,e_tot,j1,j2,j3\n0.5,0,0,0,0,0,0,0\n";
    CHECK_THROWS_WITH_AS(read_energy_csv(path), doctest::Contains("integer"), IoError);
}

TEST_CASE("front csv: header grows one column per coefficient") {
    FrontPoint a;
    a.weight = 1.0 / 22.0;
    a.q_opt = Eigen::Vector3d(0.1, 0.2, 1.0 / 7.0);
    a.j1 = 0.25;
    a.j2 = 0.5;
    a.converged = true;
    FrontPoint b = a;
    b.weight = 2.0 / 22.0;
    b.converged = false;

    const std::string path = tmp_path("front.csv");
    write_front_csv({a, b}, path);
    const std::string text = slurp(path);
    CHECK(text.rfind("weight,j1,j2,converged,q0,q1,q2\n", 0) == 0);
    CHECK(count_occurrences(text, "\n") == 3);
    CHECK(count_occurrences(text, ",1,") == 1);  // converged flag of point a
    CHECK(count_occurrences(text, ",0,") == 1);  // converged flag of point b

    write_front_csv({}, path);
    CHECK(slurp(path) == "weight,j1,j2,converged\n");

    b.q_opt = Eigen::Vector2d(0.1, 0.2);
    CHECK_THROWS_AS(write_front_csv({a, b}, path), ContractError);
}

TEST_CASE("svg: one closed outline polygon, one true-radius circle, equal aspect") {
    const auto basis = BSplineBasis::clamped_uniform(5, 3);
    ShapeParams p = demo_params();
    const auto mesh = shape_from_params(p, basis, 21, 5, 1.0);
    ObstacleCircle circle{Eigen::Vector2d(0.5, 0.26), 0.05};

    const std::string path = tmp_path("shape.svg");
    export_shape_svg(mesh, circle, path);
    const std::string text = slurp(path);

    CHECK(count_occurrences(text, "<polygon") == 1);
    CHECK(count_occurrences(text, "<circle") == 1);
    CHECK(count_occurrences(text, "<path") == 0);
    CHECK(count_occurrences(text, "r=\"0.05\"") == 1);
    CHECK(count_occurrences(text, "cx=\"0.5\"") == 1);
    CHECK(count_occurrences(text, "cy=\"-0.26\"") == 1);

    // Perimeter nodes appear once each in the outline.
    std::size_t points_start = text.find("points=\"");
    REQUIRE(points_start != std::string::npos);
    std::size_t points_end = text.find('"', points_start + 8);
    const std::string points = text.substr(points_start + 8, points_end - points_start - 8);
    CHECK(count_occurrences(points, ",") == 2 * 21 + 2 * (5 - 2));

    // Pixel rectangle and view box share the same aspect ratio, so one user
    // unit renders the same length along both axes.
    std::size_t vb = text.find("viewBox=\"");
    REQUIRE(vb != std::string::npos);
    std::istringstream vbs(text.substr(vb + 9, text.find('"', vb + 9) - vb - 9));
    double vx = 0, vy = 0, vw = 0, vh = 0;
    vbs >> vx >> vy >> vw >> vh;
    REQUIRE(vw > 0);
    REQUIRE(vh > 0);
    std::size_t wpos = text.find("width=\"");
    std::size_t hpos = text.find("height=\"");
    const double px_w = std::stod(text.substr(wpos + 7));
    const double px_h = std::stod(text.substr(hpos + 8));
    CHECK(px_w == 800.0);
    CHECK(px_h / px_w == doctest::Approx(vh / vw).epsilon(2.0 / 800.0));

    // View box covers shape and obstacle (plot y is world -y).
    CHECK(vx <= 0.0);
    CHECK(vx + vw >= 1.0);
    CHECK(vy <= -(0.26 + 0.05));
    CHECK(vy + vh >= -(0.26 - 0.05));

    // Determinism and the mesh-edge overlay variant.
    const std::string path2 = tmp_path("shape_again.svg");
    export_shape_svg(mesh, circle, path2);
    CHECK(slurp(path2) == text);

    const std::string path3 = tmp_path("shape_mesh.svg");
    export_shape_svg(mesh, circle, path3, true);
    const std::string overlay = slurp(path3);
    CHECK(count_occurrences(overlay, "<path") == 1);
    CHECK(count_occurrences(overlay, "<polygon") == 1);
}

TEST_CASE("coefficient files: round trip is bit exact") {
    testsupport::Rng rng(0x5eed044u);
    for (int trial = 0; trial < 20; ++trial) {
        ShapeParams p = demo_params();
        for (int j = 0; j < 5; ++j) {
            p.meanline[j] = rng.uniform(-0.3, 0.4);
            p.thickness[j] = rng.uniform(0.01, 0.4);
        }
        const std::string path = tmp_path("coeffs.txt");
        write_coefficients(p, path);
        const ShapeParams back = read_coefficients(path);
        REQUIRE(back.meanline.size() == 5);
        for (int j = 0; j < 5; ++j) {
            CHECK(back.meanline[j] == p.meanline[j]);
            CHECK(back.thickness[j] == p.thickness[j]);
        }
        CHECK(back.free_mask == p.free_mask);
    }
}

TEST_CASE("coefficient files: malformed inputs are rejected") {
    const std::string path = tmp_path("coeffs_bad.txt");

    std::ofstream(path) << "meanline = [0.1, 0.2, 0.1]\nthickness = [0.2, 0.2, 0.2]\n";
    CHECK_THROWS_WITH_AS(read_coefficients(path), doctest::Contains("free_mask"), IoError);

    std::ofstream(path) << "meanline = [0.1]\nthickness = [0.2, 0.2]\n"
                        << "free_mask = [0, 1, 0, 1]\n";
    CHECK_THROWS_WITH_AS(read_coefficients(path), doctest::Contains("inconsistent"), IoError);

    std::ofstream(path) << "meanline = [0.1]\nthickness = [0.2]\nfree_mask = [0, 2]\n";
    CHECK_THROWS_WITH_AS(read_coefficients(path), doctest::Contains("0 or 1"), IoError);

    std::ofstream(path) << "meanline = [0.1]\nthickness = [0.2]\nfree_mask = [1, 1]\n"
                        << "extra = [1]\n";
    CHECK_THROWS_WITH_AS(read_coefficients(path), doctest::Contains("unknown key"), IoError);

    std::ofstream(path) << "meanline = 0.1\nthickness = [0.2]\nfree_mask = [1, 1]\n";
    CHECK_THROWS_WITH_AS(read_coefficients(path), doctest::Contains("bracketed"), IoError);

    ShapeParams p = demo_params();
    p.free_mask.pop_back();
    CHECK_THROWS_AS(write_coefficients(p, path), ContractError);
}

TEST_CASE("coefficient files: comments and blank lines are tolerated") {
    const std::string path = tmp_path("coeffs_comments.txt");
    std::ofstream(path) << "# snapshot\n\nmeanline = [0.1, 0.25]\n"
                        << "thickness = [0.2, 0.3]\n\nfree_mask = [0, 1, 1, 0]\n";
    const ShapeParams p = read_coefficients(path);
    CHECK(p.meanline[1] == 0.25);
    CHECK(p.thickness[0] == 0.2);
    CHECK(p.free_mask == std::vector<bool>{false, true, true, false});
}

} // TEST_SUITE

