#include "ivfs/ivfs_all.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(IVFS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("ivfs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string out(const std::string& sub = "out") const { return "--output-dir " + (dir / sub).string(); }

    fs::path dir;
};

const std::string kData = "--synthetic 40,12,3 ";

}  // namespace

TEST_F(Cli, SelectWritesRankedFeatures) {
    ASSERT_EQ(run(out() + " --seed 3 select " + kData + "--method ivfs-linf --k 100 --d-tilde 0.3 --n-tilde 0.5 --d0 5"), 0);
    std::istringstream in(slurp(dir / "out" / "selected_features.csv"));
    std::vector<std::size_t> got;
    for (std::size_t v; in >> v;) got.push_back(v);
    EXPECT_EQ(got.size(), 5u);
    const auto meta = nlohmann::json::parse(slurp(dir / "out" / "run_meta.json"));
    EXPECT_EQ(meta["seed"], 3);
    EXPECT_EQ(meta["version"], ivfs::kVersion);
    EXPECT_EQ(meta["resolved"]["d_tilde"], "4");
    EXPECT_EQ(meta["resolved"]["n_tilde"], "20");
    EXPECT_TRUE(fs::exists(dir / "out" / "timing.json"));
}

TEST_F(Cli, SameSeedSameSelection) {
    const std::string args = " --seed 11 select " + kData + "--method ivfs-l1 --k 80 --d0 4";
    ASSERT_EQ(run(out("a") + args), 0);
    ASSERT_EQ(run(out("b") + args), 0);
    EXPECT_EQ(slurp(dir / "a" / "selected_features.csv"), slurp(dir / "b" / "selected_features.csv"));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run(out() + " select " + kData + "--d0 0"), 2);
    EXPECT_EQ(run(out() + " select " + kData + "--method nope --d0 2"), 2);
    EXPECT_EQ(run(out() + " select --d0 2"), 2);  // no data source
    EXPECT_EQ(run(out() + " select --data /nonexistent.csv --d0 2"), 2);
    EXPECT_EQ(run(out() + " frobnicate"), 2);
    EXPECT_EQ(run(out() + " select " + kData + "--d0 2 --k 0"), 2);
    EXPECT_EQ(run("--help"), 0);
    // k = 1 with d_tilde = 1 samples one feature, fewer than d0 = 3.
    EXPECT_EQ(run(out() + " select " + kData + "--k 1 --d-tilde abs:1 --d0 3"), 1);
}

TEST_F(Cli, EnvironmentOverridesFlags) {
    const std::string cmd = "IVFS_D0=3 IVFS_K=50 IVFS_METHOD=ivfs-l2 " + std::string(IVFS_CLI_PATH) + " " + out() +
                            " select " + kData + " >/dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    std::istringstream in(slurp(dir / "out" / "selected_features.csv"));
    std::size_t count = 0;
    for (std::size_t v; in >> v;) ++count;
    EXPECT_EQ(count, 3u);
}

TEST_F(Cli, CsvDatasetAndEvaluate) {
    {
        std::ofstream csv(dir / "data.csv");
        csv << "a,b,c,label\n";
        const auto X = ivfs::synthesize(30, 3, 1, 1.0, ivfs::RngHandle{1, 1});
        for (std::size_t i = 0; i < X.n(); ++i)
            csv << X.values(i, 0) << "," << X.values(i, 1) << "," << X.values(i, 2) << "," << (*X.labels)[i] * 5 << "\n";
        std::ofstream all(dir / "all.txt");
        all << "0\n1\n2\n";
        std::ofstream bad(dir / "bad.txt");
        bad << "0\n3\n";
    }
    const std::string data = "--data " + (dir / "data.csv").string() + " --label-column label ";
    ASSERT_EQ(run(out() + " evaluate " + data + "--features " + (dir / "all.txt").string() + " --max-points 20"), 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    for (const char* k : {"w1", "w_inf", "l_inf", "l1_over_n2", "l2"}) EXPECT_EQ(rep[k], 0.0) << k;
    for (const char* k : {"knn_accuracy", "kmeans_accuracy", "nmi"}) EXPECT_TRUE(rep[k].is_number()) << k;
    EXPECT_EQ(run(out() + " evaluate " + data + "--features " + (dir / "bad.txt").string()), 2);
    EXPECT_EQ(run(out() + " evaluate " + data + "--features " + (dir / "missing.txt").string()), 2);
    EXPECT_EQ(run(out() + " evaluate " + data + "--features " + (dir / "all.txt").string() + " --metrics bogus"), 2);
}

TEST_F(Cli, SweepCsvParsesBack) {
    ASSERT_EQ(run(out() + " sweep " + kData + "--methods ivfs-l2,spec --k 60 --start 2 --stop 4 --step 1 --metrics l2,l_inf --max-points 20"), 0);
    std::istringstream in(slurp(dir / "out" / "sweep.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "method,n_features,metric,value");
    std::set<std::tuple<std::string, int, std::string>> cells;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string m, k, metric, v;
        std::getline(ls, m, ',');
        std::getline(ls, k, ',');
        std::getline(ls, metric, ',');
        std::getline(ls, v, ',');
        EXPECT_TRUE(std::isfinite(std::stod(v)));
        cells.insert({m, std::stoi(k), metric});
        ++rows;
    }
    EXPECT_EQ(rows, 2u * 3u * 2u);
    EXPECT_EQ(cells.size(), rows);  // no duplicate grid cells
    EXPECT_EQ(run(out() + " sweep " + kData + "--start 5 --stop 3"), 2);
}

TEST_F(Cli, StabilityTradeoffOracle) {
    ASSERT_EQ(run(out() + " stability " + kData + "--methods spec,ivfs-linf --k-grid 20,40 --reps 2 --d0 3"), 0);
    const auto st = slurp(dir / "out" / "stability.csv");
    EXPECT_EQ(st.substr(0, st.find('\n')), "method,k,reps,mean_difference");
    EXPECT_EQ(std::count(st.begin(), st.end(), '\n'), 4);

    ASSERT_EQ(run(out() + " tradeoff " + kData + "--k-grid 20,40 --n-tilde-grid 0.3,0.5 --base-k 20 --base-n-tilde 0.3 --d0 3 --max-points 20"), 0);
    const auto tr = slurp(dir / "out" / "tradeoff.csv");
    EXPECT_NE(tr.find("20,0.3,l2,"), std::string::npos);
    EXPECT_EQ(run(out() + " tradeoff " + kData + "--k-grid 20 --n-tilde-grid 0.3 --base-k 30 --base-n-tilde 0.3 --d0 3"), 2);

    ASSERT_EQ(run(out() + " oracle --synthetic 20,6,2 --d-tilde abs:2 --k 200 --d0 2 --trials 2"), 0);
    const auto orc = nlohmann::json::parse(slurp(dir / "out" / "oracle.json"));
    EXPECT_EQ(orc["trials"].size(), 2u);
    EXPECT_EQ(orc["exact_iv"].size(), 6u);
}
