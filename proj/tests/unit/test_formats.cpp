#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ploewner/formats.hpp"
#include "tempdir.hpp"

using namespace ploewner;
using namespace ploewner::formats;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("fmt17 round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(fmt17(v)) == v);
    CHECK(fmt17(0.1) == "0.10000000000000001");
}

TEST_CASE("binary matrices are column-major little-endian float64") {
    TempDir tmp;
    MatR M(2, 3);
    M << 1, 2, 3, 4, 5, 6;
    write_matrix_bin(tmp / "m.bin", M);
    const std::string raw = slurp(tmp / "m.bin");
    REQUIRE(raw.size() == 6 * sizeof(double));
    double second = 0;
    std::memcpy(&second, raw.data() + sizeof(double), sizeof(double));
    CHECK(second == 4.0); // entry (1, 0)
    CHECK(read_matrix_bin(tmp / "m.bin", 2, 3) == M);
    CHECK_THROWS_AS(read_matrix_bin(tmp / "m.bin", 3, 3), FormatError);
    CHECK_THROWS_AS(read_matrix_bin(tmp / "absent.bin", 1, 1), FormatError);
}

TEST_CASE("CSV matrices") {
    const MatR M = parse_matrix_csv("1, 2.5\n-3,4e-2\n\n");
    CHECK(M.rows() == 2);
    CHECK(M(1, 1) == 0.04);
    CHECK_THROWS_AS(parse_matrix_csv("1,2\n3\n"), FormatError);
    CHECK_THROWS_AS(parse_matrix_csv("1,x\n"), FormatError);

    TempDir tmp;
    std::mt19937_64 rng(1);
    const MatR R = oracle::random_matrix(rng, 3, 4);
    write_matrix_csv(tmp / "r.csv", R);
    CHECK(read_matrix_csv(tmp / "r.csv") == R);
}

TEST_CASE("model manifests") {
    TempDir tmp;
    const ParametricModel poly = builtin("polynomial");
    const fs::path manifest = save_model_manifest(tmp.path(), poly);
    const ModelSource src = load_model_manifest(manifest);
    REQUIRE(src.model);
    CHECK_FALSE(src.snapshots);
    CHECK(src.model->degree() == 3);
    for (std::size_t k = 0; k < 4; ++k) CHECK(src.model->gamma()[k] == poly.gamma()[k]);

    // mixed csv / inline entries
    write_matrix_csv(tmp / "g0.csv", builtin("toy").gamma()[0]);
    std::ofstream(tmp / "mixed.json") << R"({"n": 3, "n_i": 1, "n_o": 1, "degree": 1,
        "gamma": ["g0.csv", [[0,1,0,0],[-1,0,0,0],[0,0,0,0],[0,0,0,0]]]})";
    const ModelSource mixed = load_model_manifest(tmp / "mixed.json");
    REQUIRE(mixed.model);
    CHECK(mixed.model->gamma()[1] == builtin("toy").gamma()[1]);
    CHECK(mixed.model->gamma()[0] == builtin("toy").gamma()[0]);

    std::ofstream(tmp / "snaps.json") << R"({"n": 1, "n_i": 1, "n_o": 1,
        "snapshots": [{"p": 0, "G": [[-1, 1], [1, 0]]}, {"p": 2, "G": [[-3, 1], [1, 0]]}]})";
    const ModelSource snaps = load_model_manifest(tmp / "snaps.json");
    REQUIRE(snaps.snapshots);
    CHECK(snaps.snapshots->size() == 2);
    CHECK(snaps.snapshots->params() == std::vector<double>{0, 2});

    std::ofstream(tmp / "bad_shape.json") << R"({"n": 3, "n_i": 1, "n_o": 1, "gamma": [[[1, 2]]]})";
    CHECK_THROWS_WITH_AS(load_model_manifest(tmp / "bad_shape.json"), doctest::Contains("expected 4x4"), FormatError);
    std::ofstream(tmp / "bad_degree.json") << R"({"n": 0, "n_i": 1, "n_o": 1, "degree": 2, "gamma": [[[1]]]})";
    CHECK_THROWS_AS(load_model_manifest(tmp / "bad_degree.json"), FormatError);
    std::ofstream(tmp / "neither.json") << R"({"n": 1, "n_i": 1, "n_o": 1})";
    CHECK_THROWS_AS(load_model_manifest(tmp / "neither.json"), FormatError);
    std::ofstream(tmp / "broken.json") << "{";
    CHECK_THROWS_AS(load_model_manifest(tmp / "broken.json"), FormatError);
}

TEST_CASE("realization round trip is bit exact") {
    TempDir tmp;
    const ParametricModel toy = builtin("toy");
    const std::vector<double> params{0.0, 100.0 / 3.0, 200.0 / 3.0, 100.0};
    const ParametricRealization real = realize(build_pencil(sample(toy, params), alternating_partition(params)), 6);
    save_realization(tmp.path(), real);
    const ParametricRealization back = load_realization(tmp.path());
    CHECK(back.E() == real.E());
    CHECK(back.A() == real.A());
    CHECK(back.B() == real.B());
    CHECK(back.C() == real.C());
    CHECK(back.X() == real.X());
    CHECK(back.Y() == real.Y());
    for (double w : {0.01, 1.0, 100.0}) {
        const Complex s(0, w);
        CHECK(eval(back, s, 12.0).value == eval(real, s, 12.0).value);
    }
    const auto meta = nlohmann::json::parse(slurp(tmp / "realization.json"));
    CHECK(meta["format"] == "ploewner-realization");
    CHECK(meta["r"] == 6);
    CHECK(meta["files"]["E"] == "E.bin");
    CHECK(fs::file_size(tmp / "X.bin") == 6 * 3 * sizeof(double));

    fs::remove(tmp / "Y.bin");
    CHECK_THROWS_AS(load_realization(tmp.path()), FormatError);
}

TEST_CASE("error grid CSV layout") {
    ErrorGrid g;
    g.omegas = {0.5, 2.0};
    g.params = {1.0};
    g.cells.resize(2);
    g.cells[0].delta = 1.0 / 3.0;
    g.cells[0].formula = Formula::precise;
    g.cells[0].cond_estimate = 1e7;
    g.cells[1].failed = true;
    g.cells[1].delta = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    write_error_grid_csv(os, g);
    CHECK(os.str() == "omega,p,delta,formula,cond_estimate\n"
                      "0.5,1,0.33333333333333331,precise,10000000\n"
                      "2,1,nan,failed,0\n");
}

TEST_CASE("rank report and partition JSON") {
    RankReport rep;
    rep.rank_L = 2;
    rep.rank_Ls = 6;
    rep.rank_gamma = {4, 2};
    rep.rank_xi = {0, 1, 2};
    rep.bound_L = 2;
    rep.bound_Ls = 8;
    rep.holds = {true, true};
    rep.affine = true;
    rep.affine_equality = true;
    const auto j = rank_report_json(rep);
    CHECK(j["rank_L"] == 2);
    CHECK(j["bounds"]["Ls"] == 8);
    CHECK(j["holds"] == nlohmann::json::array({true, true}));
    CHECK(j["per_xi"].size() == 3);

    const std::vector<double> params{3.0, 1.0};
    const auto pj = partition_json(alternating_partition(params));
    CHECK(pj["left"][0]["value"] == 1.0);
    CHECK(pj["left"][0]["index"] == 1);
    CHECK(pj["right"][0]["value"] == 3.0);
}
