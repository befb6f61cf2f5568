#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flagdecomp/cli.hpp"
#include "flagdecomp/io.hpp"
#include "flagdecomp/synthgen.hpp"
#include "support/oracles.hpp"

using namespace flagdecomp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("flagdecomp_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write_json(const std::string& name, const json& j) const { io::write_text(dir_ / name, j.dump(2)); }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

json read_json(const fs::path& p) { return json::parse(io::read_text(p)); }

}  // namespace

TEST_F(CliTest, HelpAndVersion) {
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out_.str().find("decompose"), std::string::npos);
    EXPECT_EQ(run({"--version"}), 0);
    EXPECT_NE(out_.str().find(cli::kVersion), std::string::npos);
    EXPECT_EQ(run({"bogus"}), 1);
    EXPECT_EQ(run({}), 1);
}

TEST_F(CliTest, DecomposeIdentity) {
    io::write_matrix_csv(dir_ / "eye.csv", MatrixXd::Identity(5, 5));
    io::write_text(dir_ / "h.json", R"({"levels": [[0, 1], [0, 1, 2, 3, 4]]})");
    ASSERT_EQ(run({"decompose", "--data", path("eye.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "2,5", "--out", path("res")}),
              0)
        << err_.str();
    const MatrixXd q = io::read_matrix_csv(dir_ / "res/Q.csv");
    const MatrixXd r = io::read_matrix_csv(dir_ / "res/R.csv");
    const MatrixXd p = io::read_matrix_csv(dir_ / "res/P.csv");
    EXPECT_LT((q * r * p.transpose() - MatrixXd::Identity(5, 5)).norm(), 1e-12);
    EXPECT_LT((q.transpose() * q - MatrixXd::Identity(5, 5)).norm(), 1e-12);
    EXPECT_LT(r.bottomLeftCorner(3, 2).norm(), 1e-15);
    const json meta = read_json(dir_ / "res/meta.json");
    EXPECT_LT(meta["residual"].get<double>(), 1e-12);
    EXPECT_EQ(meta["signature"], json::array({2, 5}));

    const json manifest = read_json(dir_ / "res/manifest.json");
    EXPECT_EQ(manifest["command"], "decompose");
    ASSERT_EQ(manifest["inputs"].size(), 2u);
    EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(manifest.contains("version"));
    EXPECT_TRUE(manifest.contains("duration_seconds"));

    ASSERT_EQ(run({"reconstruct", "--from", path("res"), "--out", path("rec")}), 0) << err_.str();
    EXPECT_LT((io::read_matrix_csv(dir_ / "rec/D_hat.csv") - MatrixXd::Identity(5, 5)).norm(), 1e-12);
}

TEST_F(CliTest, DecomposePlantedWithTruth) {
    const auto inst = gen_noise_instance(FlagType({2, 4}, 10), {20, 20}, {NoiseDistribution::gaussian, 0.0, 3});
    io::write_matrix_csv(dir_ / "d.csv", inst.observed);
    io::write_matrix_csv(dir_ / "x.csv", inst.truth.coordinates());
    io::write_hierarchy_json(dir_ / "h.json", inst.hierarchy);
    for (const bool robust : {false, true}) {
        std::vector<std::string> args{"decompose", "--data", path("d.csv"), "--hierarchy", path("h.json"),
                                      "--flag-type", "2,4", "--truth", path("x.csv"), "--out", path("o")};
        if (robust) args.push_back("--robust");
        ASSERT_EQ(run(args), 0) << err_.str();
        EXPECT_LT(read_json(dir_ / "o/meta.json")["chordal_to_truth"].get<double>(), 1e-8);
    }
}

TEST_F(CliTest, InputErrorsExitOne) {
    io::write_text(dir_ / "ragged.csv", "1,2\n3\n");
    io::write_text(dir_ / "h.json", R"({"levels": [[0], [0, 1]]})");
    EXPECT_EQ(run({"decompose", "--data", path("ragged.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "1,2", "--out", path("o")}),
              1);
    io::write_matrix_csv(dir_ / "ok.csv", MatrixXd::Identity(2, 2));
    EXPECT_EQ(run({"decompose", "--data", path("ok.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "1,x", "--out", path("o")}),
              1);
    EXPECT_EQ(run({"decompose", "--data", path("missing.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "1,2", "--out", path("o")}),
              1);
    EXPECT_EQ(run({"decompose", "--data", path("ok.csv"), "--out", path("o")}), 1);
    io::write_text(dir_ / "bad.json", "{\"levels\": [[0], ");
    EXPECT_EQ(run({"decompose", "--data", path("ok.csv"), "--hierarchy", path("bad.json"),
                   "--flag-type", "1,2", "--out", path("o")}),
              1);
    write_json("sim.json", {{"schema", 1}, {"model", "noise"}, {"surprise", 3}});
    EXPECT_EQ(run({"simulate", "--config", path("sim.json"), "--out", path("o")}), 1);
}

TEST_F(CliTest, DomainErrorsExitTwo) {
    io::write_text(dir_ / "h.json", R"({"levels": [[0, 1], [0, 1, 2, 3]]})");
    io::write_matrix_csv(dir_ / "d.csv", oracle::gaussian(6, 4, 1));
    EXPECT_EQ(run({"decompose", "--data", path("d.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "2,40", "--out", path("o")}),
              2);
    // Level 2 adds columns that are copies of level 1: the rank does not grow.
    MatrixXd plateau(6, 4);
    plateau.leftCols(2) = oracle::gaussian(6, 2, 2);
    plateau.rightCols(2) = plateau.leftCols(2);
    io::write_matrix_csv(dir_ / "p.csv", plateau);
    EXPECT_EQ(run({"decompose", "--data", path("p.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "2,4", "--out", path("o")}),
              2);
    EXPECT_NE(err_.str().find("level"), std::string::npos);
    EXPECT_EQ(run({"decompose", "--data", path("p.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "2,4", "--no-validate", "--out", path("o")}),
              2);
}

TEST_F(CliTest, NumericalFailureExitThree) {
    io::write_matrix_csv(dir_ / "huge.csv", MatrixXd::Constant(3, 3, 1.5e308) - 1e307 * MatrixXd::Identity(3, 3));
    io::write_text(dir_ / "h.json", R"({"levels": [[0], [0, 1, 2]]})");
    EXPECT_EQ(run({"decompose", "--data", path("huge.csv"), "--hierarchy", path("h.json"),
                   "--flag-type", "1,3", "--no-validate", "--out", path("o")}),
              3)
        << err_.str();
}

TEST_F(CliTest, DistmatMdsKnnPipeline) {
    ClusterSimConfig cfg;
    cfg.per_cluster = 4;
    cfg.noise_sigma = 0.0;
    const auto sim = gen_cluster_sim(cfg);
    json items = json::array();
    for (std::size_t i = 0; i < sim.instances.size(); ++i) {
        const std::string name = "item" + std::to_string(i) + ".csv";
        io::write_matrix_csv(dir_ / name, sim.instances[i].observed);
        items.push_back(name);
    }
    io::write_hierarchy_json(dir_ / "h.json", sim.instances[0].hierarchy);
    write_json("m.json", {{"schema", 1}, {"items", items}, {"labels", sim.labels},
                          {"hierarchy", "h.json"}, {"flag_type", "2,4"}});
    ASSERT_EQ(run({"distmat", "--manifest", path("m.json"), "--out", path("dm")}), 0) << err_.str();
    const MatrixXd d = io::read_matrix_csv(dir_ / "dm/dist.csv");
    ASSERT_EQ(d.rows(), 12);
    for (Index a = 0; a < 12; ++a)
        for (Index b = 0; b < 12; ++b) {
            if (a / 4 == b / 4) {
                EXPECT_LT(d(a, b), 1e-7);
            } else {
                EXPECT_GT(d(a, b), 0.1);
            }
        }
    EXPECT_EQ(io::read_labels_csv(dir_ / "dm/labels.csv"), sim.labels);

    ASSERT_EQ(run({"mds", "--dist", path("dm/dist.csv"), "--dim", "2", "--out", path("mds")}), 0) << err_.str();
    const MatrixXd coords = io::read_matrix_csv(dir_ / "mds/coords.csv");
    EXPECT_EQ(coords.rows(), 12);
    EXPECT_EQ(coords.cols(), 2);

    ASSERT_EQ(run({"knn", "--dist", path("dm/dist.csv"), "--labels", path("dm/labels.csv"),
                   "--k-min", "1", "--k-max", "2", "--trials", "3", "--out", path("knn"), "--seed", "4"}),
              0)
        << err_.str();
    std::ifstream summary(dir_ / "knn/accuracy_summary.csv");
    std::string header;
    std::getline(summary, header);
    EXPECT_FALSE(header.empty());
    EXPECT_TRUE(fs::exists(dir_ / "knn/accuracy.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "knn/manifest.json"));
}

TEST_F(CliTest, FewshotPlantedAndShotsTooFew) {
    const Index n = 30;
    const MatrixXd basis = oracle::stiefel(n, 4 * 5, 9);
    json classes = json::array();
    for (int c = 0; c < 5; ++c) {
        const MatrixXd u = basis.middleCols(4 * c, 2);
        const MatrixXd w = basis.middleCols(4 * c + 2, 2);
        const MatrixXd mix = oracle::gaussian(2, 12, 100 + c);
        io::write_matrix_csv(dir_ / ("l1_" + std::to_string(c) + ".csv"), MatrixXd(u * mix));
        io::write_matrix_csv(dir_ / ("f_" + std::to_string(c) + ".csv"), MatrixXd(w * mix));
        classes.push_back({{"label", c}, {"level1", "l1_" + std::to_string(c) + ".csv"},
                           {"final", "f_" + std::to_string(c) + ".csv"}});
    }
    write_json("fs.json", {{"schema", 1}, {"ways", 5}, {"shots", 3}, {"tasks", 10}, {"queries", 10},
                           {"classes", classes}});
    ASSERT_EQ(run({"fewshot", "--manifest", path("fs.json"), "--method", "flag", "--trials", "2",
                   "--out", path("fs")}),
              0)
        << err_.str();
    std::ifstream acc(dir_ / "fs/accuracy.csv");
    std::string header;
    std::string row;
    std::getline(acc, header);
    std::getline(acc, row);
    EXPECT_EQ(row.substr(0, 7), "flag,1,");

    write_json("fs1.json", {{"schema", 1}, {"ways", 5}, {"shots", 1}, {"classes", classes}});
    EXPECT_EQ(run({"fewshot", "--manifest", path("fs1.json"), "--method", "flag", "--out", path("fs1")}), 2);
}

TEST_F(CliTest, SimulateIsSeededAndDumpsInstances) {
    write_json("sim.json", {{"schema", 1}, {"model", "noise"}, {"trials", 2}, {"dump", true},
                            {"noise", {{"dist", "gaussian"}, {"scales", {0.0, 0.3}}}},
                            {"methods", {"fd", "svd"}}});
    ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--seed", "5", "--out", path("a")}), 0) << err_.str();
    ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--seed", "5", "--out", path("b")}), 0);
    EXPECT_EQ(io::read_text(dir_ / "a/trials.csv"), io::read_text(dir_ / "b/trials.csv"));
    EXPECT_EQ(read_json(dir_ / "a/manifest.json")["seed"], 5);
    EXPECT_TRUE(fs::exists(dir_ / "a/instance/observed.csv"));
    ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--seed", "6", "--out", path("c")}), 0);
    EXPECT_NE(io::read_text(dir_ / "a/trials.csv"), io::read_text(dir_ / "c/trials.csv"));
}
