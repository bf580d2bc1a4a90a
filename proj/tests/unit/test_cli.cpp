#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mggd/cli.hpp"
#include "mggd/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = mggd::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// An error is exactly one line starting with "error:".
bool single_error_line(const std::string& err) {
    return err.rfind("error:", 0) == 0 && err.find('\n') == err.size() - 1;
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("mggd_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

}  // namespace

TEST_CASE("cli sample and fit") {
    TempDir tmp;
    const std::string data = tmp.file("d.csv");
    const std::vector<std::string> sample{"sample", "--p", "3", "--beta", "0.2", "--m", "1", "--rho", "0.8",
                                          "--n", "200", "--seed", "42", "--out", data};
    const Result s = run_cli(sample);
    REQUIRE(s.code == 0);
    CHECK(json::parse(s.out)["n"] == 200);
    const std::string first = mggd::io::read_file(data);
    CHECK(mggd::io::read_dataset(data).size() == 200);
    CHECK(run_cli(sample).code == 0);
    CHECK(mggd::io::read_file(data) == first);

    SUBCASE("known-shape fit converges") {
        const Result f = run_cli({"fit", "--data", data, "--beta", "0.2", "--seed", "42"});
        REQUIRE(f.code == 0);
        const json report = json::parse(f.out);
        CHECK(report["converged"] == true);
        CHECK(report["iterations"].get<int>() <= 100);
        CHECK(report["beta"] == 0.2);
        CHECK(report["master_seed"] == 42);
    }

    SUBCASE("joint fit to a file") {
        const std::string out = tmp.file("r.json");
        REQUIRE(run_cli({"fit", "--data", data, "--out", out}).code == 0);
        const auto report = mggd::io::report_from_json(json::parse(mggd::io::read_file(out)));
        CHECK(report.report.converged);
        CHECK(report.report.beta > 0.05);
        CHECK(report.report.beta < 0.5);
    }

    SUBCASE("budget exhausted") {
        const Result f = run_cli({"fit", "--data", data, "--beta", "0.2", "--max-iter", "2"});
        CHECK(f.code == 4);
        CHECK(json::parse(f.out)["converged"] == false);
    }

    SUBCASE("initial matrix from a file") {
        const std::string good = tmp.file("good.csv");
        mggd::io::write_file(good, "2,0,0\n0,2,0\n0,0,2\n");
        CHECK(run_cli({"fit", "--data", data, "--beta", "0.2", "--init", "file:" + good}).code == 0);
        const std::string bad = tmp.file("bad.csv");
        mggd::io::write_file(bad, "1,2,0\n2,1,0\n0,0,1\n");
        const Result r = run_cli({"fit", "--data", data, "--beta", "0.2", "--init", "file:" + bad});
        CHECK(r.code == 3);
        CHECK(single_error_line(r.err));
    }

    SUBCASE("off-trace scatter file is renormalized") {
        const std::string scatter = tmp.file("s.csv");
        mggd::io::write_file(scatter, "2,0\n0,4\n");
        const Result r = run_cli({"sample", "--p", "2", "--beta", "0.5", "--m", "1", "--scatter-file", scatter, "--n",
                                  "10", "--seed", "1", "--out", tmp.file("s_data.csv")});
        CHECK(r.code == 0);
        CHECK(r.err.rfind("warning:", 0) == 0);
        CHECK(json::parse(r.out)["scatter"][1][1] == doctest::Approx(4.0 / 3.0));
    }
}

TEST_CASE("cli error paths") {
    TempDir tmp;
    const auto expect = [](const Result& r, int code) {
        CHECK(r.code == code);
        CHECK(single_error_line(r.err));
    };
    expect(run_cli({"sample", "--p", "3", "--beta", "0.2", "--m", "1", "--rho", "1.0", "--n", "10", "--seed", "1",
                    "--out", tmp.file("x.csv")}),
           2);
    expect(run_cli({"sample", "--p", "3", "--beta", "0.2", "--m", "1", "--n", "10", "--seed", "1", "--out",
                    tmp.file("x.csv")}),
           2);
    expect(run_cli({"fit"}), 2);
    expect(run_cli({"frobnicate"}), 2);
    expect(run_cli({}), 2);
    expect(run_cli({"fit", "--data", tmp.file("missing.csv")}), 2);

    const std::string zero = tmp.file("zero.csv");
    mggd::io::write_file(zero, "x0,x1\n1,0\n0,0\n0,1\n1,1\n");
    const Result z = run_cli({"fit", "--data", zero, "--beta", "0.5"});
    expect(z, 5);
    CHECK(z.err.find("(row 1)") != std::string::npos);

    const std::string collinear = tmp.file("collinear.csv");
    mggd::io::write_file(collinear, "1,1\n2,2\n-1,-1\n");
    expect(run_cli({"fit", "--data", collinear}), 5);

    const std::string config = tmp.file("empty_grid.json");
    mggd::io::write_file(config, R"({"experiment": "bias_consistency", "p": 3, "rho": 0.8, "n_grid": [], "master_seed": 1})");
    const Result e = run_cli({"experiment", "--config", config, "--out-dir", tmp.file("out")});
    expect(e, 2);
    CHECK(e.err.find("$.n_grid") != std::string::npos);
}

TEST_CASE("cli trace") {
    TempDir tmp;
    SUBCASE("a data set at its own fixed point gives a zero criterion") {
        const std::string data = tmp.file("cross.csv");
        mggd::io::write_file(data, "1,0\n0,1\n-1,0\n0,-1\n");
        const Result r = run_cli({"trace", "--data", data, "--beta", "0.5", "--inits", "identity,scm"});
        REQUIRE(r.code == 0);
        std::istringstream in(r.out);
        std::string line;
        std::getline(in, line);
        CHECK(line == "k,C_identity,C_scm,D_normalized,D_unnormalized");
        int rows = 0;
        while (std::getline(in, line)) {
            const auto a = line.find(',');
            const auto b = line.find(',', a + 1);
            const auto c = line.find(',', b + 1);
            for (const std::string cell : {line.substr(a + 1, b - a - 1), line.substr(b + 1, c - b - 1)})
                if (!cell.empty()) CHECK(mggd::io::parse_double(cell) == 0.0);
            ++rows;
        }
        CHECK(rows >= 1);
    }

    SUBCASE("simulated scenario") {
        const std::string out = tmp.file("trace.csv");
        const std::vector<std::string> args{"trace", "--p", "3", "--beta", "0.2", "--rho", "0.8", "--n", "200",
                                            "--seed", "3", "--max-iter", "300", "--out", out};
        REQUIRE(run_cli(args).code == 0);
        const std::string first = mggd::io::read_file(out);
        CHECK(first.rfind("k,C_identity,C_scm,C_true,D_normalized,D_unnormalized\n", 0) == 0);
        REQUIRE(run_cli(args).code == 0);
        CHECK(mggd::io::read_file(out) == first);
    }

    CHECK(run_cli({"trace", "--p", "3", "--beta", "0.2", "--rho", "0.8"}).code == 2);
    CHECK(run_cli({"trace", "--p", "3", "--beta", "0.2", "--rho", "0.8", "--n", "50", "--seed", "1", "--inits",
                   "moments"})
              .code == 2);
}

TEST_CASE("cli experiment") {
    TempDir tmp;
    const std::string config = tmp.file("exp.json");
    mggd::io::write_file(config, R"({"experiment": "bias_consistency", "p": 3, "rho": 0.8, "beta_true": 0.5,
        "n_grid": [50, 200], "runs": 4, "master_seed": 9, "trace": {"n": 100}})");
    const Result a = run_cli({"experiment", "--config", config, "--out-dir", tmp.file("a")});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("consistency") != std::string::npos);
    const Result b = run_cli({"experiment", "--config", config, "--out-dir", tmp.file("b")});
    REQUIRE(b.code == 0);
    const std::string metrics = mggd::io::read_file(tmp.file("a") + "/metrics.csv");
    CHECK(metrics == mggd::io::read_file(tmp.file("b") + "/metrics.csv"));
    CHECK(mggd::io::read_file(tmp.file("a") + "/trace.csv") == mggd::io::read_file(tmp.file("b") + "/trace.csv"));
    CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 3);
}

TEST_CASE("shipped presets parse") {
    const fs::path presets = fs::path(MGGD_SOURCE_DIR) / "presets";
    int count = 0;
    for (const auto& entry : fs::directory_iterator(presets)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(mggd::io::parse_experiment(json::parse(mggd::io::read_file(entry.path()))));
        ++count;
    }
    CHECK(count > 0);
}
