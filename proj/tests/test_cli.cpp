#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vsc/cli.hpp"
#include "vsc/data.hpp"
#include "vsc/records.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vsc::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vsc_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("gen writes a reproducible csv") {
  TempDir tmp;
  const auto a = tmp / "a.csv";
  const auto b = tmp / "b.csv";
  REQUIRE(run({"gen", "twonorm", "--n", "2000", "--dim", "20", "--seed", "1", "--out", a}).code == 0);
  REQUIRE(run({"gen", "--dataset", "twonorm", "--n", "2000", "--seed", "1", "--out", b}).code == 0);
  const std::string text = vsc::read_text_file(a);
  CHECK(count_lines(text) == 2001);
  CHECK(text == vsc::read_text_file(b));

  const Run to_stdout = run({"gen", "xor_blobs", "--n", "10", "--seed", "1"});
  CHECK(to_stdout.code == 0);
  CHECK(count_lines(to_stdout.out) == 11);

  const Run bad = run({"gen", "spirals"});
  CHECK(bad.code != 0);
  CHECK(bad.err.rfind("error: ", 0) == 0);
  CHECK(run({"gen"}).code != 0);
}

TEST_CASE("cv happy path and failures") {
  TempDir tmp;
  const auto data = tmp / "t.csv";
  REQUIRE(run({"gen", "twonorm", "--n", "300", "--seed", "2", "--out", data}).code == 0);

  const Run table = run({"cv", "--data", data, "--k", "20", "--seed", "2"});
  CHECK(table.code == 0);
  CHECK(table.out.find("mean") != std::string::npos);

  const auto rec_path = tmp / "r.jsonl";
  REQUIRE(run({"cv", "--data", data, "--k", "20", "--seed", "2", "--out", rec_path}).code == 0);
  const auto recs = vsc::read_records(rec_path);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].result.fold_f1.size() == 10);
  CHECK(recs[0].result.mean_f1 > 0.9);
  CHECK(recs[0].result.spec.k == 20);

  const Run jl = run({"cv", "--data", data, "--k", "20", "--seed", "2", "--format", "json-lines"});
  CHECK(jl.out == vsc::read_text_file(rec_path));

  for (const char* model : {"vsc-noconf", "vsc-uniform", "elm", "knn"}) {
    const Run r = run({"cv", "--data", data, "--model", model, "--k", "20", "--seed", "2",
                       "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 2);
  }

  const auto missing = tmp / "nope.csv";
  const Run m = run({"cv", "--data", missing});
  CHECK(m.code == 1);
  CHECK(m.err.find(missing) != std::string::npos);

  CHECK(run({"cv", "--data", data, "--model", "mlp"}).code != 0);
  CHECK(run({"cv", "--data", data, "--lambda", "-1"}).code != 0);
  CHECK(run({"cv", "--data", data, "--folds", "1"}).code != 0);
  CHECK(run({"cv"}).code == 2);
}

TEST_CASE("keel input through the cli") {
  TempDir tmp;
  const auto path = tmp / "toy.dat";
  std::ofstream(path) << "@relation toy\n@attribute a real\n@attribute class {p, q}\n"
                         "@inputs a\n@outputs class\n@data\n";
  {
    std::ofstream f(path, std::ios::app);
    for (int i = 0; i < 40; ++i) f << (i % 2 ? -1.0 - i * 0.01 : 1.0 + i * 0.01) << ", " << (i % 2 ? "q" : "p") << "\n";
  }
  const Run r = run({"cv", "--data", path, "--k", "5", "--folds", "4", "--format", "csv"});
  CHECK(r.code == 0);
}

TEST_CASE("sweep records") {
  TempDir tmp;
  const auto data = tmp / "t.csv";
  REQUIRE(run({"gen", "twonorm", "--n", "200", "--dim", "5", "--seed", "4", "--out", data}).code == 0);
  const auto out = tmp / "s.jsonl";
  const Run r = run({"sweep", "--data", data, "--k-list", "5,10,20", "--lambda-list", "0.1,1,10",
                     "--normalize-ref", "k=10,lambda=1", "--folds", "5", "--out", out});
  REQUIRE(r.code == 0);
  const auto recs = vsc::read_records(out);
  REQUIRE(recs.size() == 9);
  std::size_t refs = 0;
  for (const auto& rec : recs) {
    CHECK(rec.kind == "sweep");
    REQUIRE(rec.normalized_f1.has_value());
    if (rec.is_reference) {
      ++refs;
      CHECK(*rec.normalized_f1 == 1.0);
      CHECK(rec.result.spec.k == 10);
    }
  }
  CHECK(refs == 1);
  CHECK(run({"sweep", "--data", data, "--k-list", "5", "--lambda-list", "1",
             "--normalize-ref", "k=7,lambda=1"}).code != 0);
}

TEST_CASE("sweep default grid has fifteen points") {
  TempDir tmp;
  const auto data = tmp / "t.csv";
  REQUIRE(run({"gen", "twonorm", "--n", "100", "--dim", "4", "--seed", "4", "--out", data}).code == 0);
  const Run r = run({"sweep", "--data", data, "--folds", "3", "--format", "json-lines"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 15);
}

TEST_CASE("compare through the cli") {
  TempDir tmp;
  const auto data = tmp / "t.csv";
  REQUIRE(run({"gen", "ringnorm", "--n", "300", "--dim", "5", "--seed", "5", "--out", data}).code == 0);
  const auto a = tmp / "a.jsonl";
  const auto a2 = tmp / "a2.jsonl";
  const auto k = tmp / "k.jsonl";
  const auto e = tmp / "e.jsonl";
  const auto other = tmp / "o.jsonl";
  REQUIRE(run({"cv", "--data", data, "--k", "20", "--out", a}).code == 0);
  REQUIRE(run({"cv", "--data", data, "--k", "20", "--out", a2}).code == 0);
  REQUIRE(run({"cv", "--data", data, "--model", "knn", "--out", k}).code == 0);
  REQUIRE(run({"cv", "--data", data, "--model", "elm", "--k", "20", "--out", e}).code == 0);
  REQUIRE(run({"cv", "--data", data, "--k", "20", "--fold-seed", "99", "--out", other}).code == 0);

  const Run same = run({"compare", a, a2, "--format", "csv"});
  REQUIRE(same.code == 0);
  CHECK(same.out.find("vsc#2") != std::string::npos);
  std::istringstream lines(same.out);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    CHECK(line.find(",false,,1") != std::string::npos);
  }

  const Run three = run({"compare", a, k, e, "--format", "json-lines"});
  REQUIRE(three.code == 0);
  CHECK(count_lines(three.out) == 3);
  CHECK(three.out.find("\"model\":\"knn\"") != std::string::npos);

  const Run table = run({"compare", a, k, e});
  CHECK(table.code == 0);
  CHECK(table.out.find("rank") != std::string::npos);

  const Run unpaired = run({"compare", a, other});
  CHECK(unpaired.code == 1);
  CHECK(unpaired.err.rfind("error: ", 0) == 0);
  CHECK(run({"compare", a, k, "--reference", "mlp"}).code != 0);
}

TEST_CASE("heatmap") {
  TempDir tmp;
  const auto out = tmp / "h.csv";
  REQUIRE(run({"heatmap", "--plus=-5,0", "--minus", "5,0", "--out", out}).code == 0);
  std::ifstream in(out);
  std::string line;
  std::vector<std::vector<double>> grid;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    grid.push_back(row);
  }
  REQUIRE(grid.size() == 201);
  for (const auto& row : grid) {
    REQUIRE(row.size() == 201);
    for (double v : row) REQUIRE((v > 0.0 && v <= 1.0));
  }
  CHECK(grid[100][100] == 0.5);
  CHECK(run({"heatmap", "--plus", "0,0", "--minus", "0,0"}).code != 0);
  CHECK(run({"heatmap", "--resolution", "1"}).code != 0);
}

TEST_CASE("seed falls back to the environment") {
  TempDir tmp;
  ::setenv("VSC_SEED", "77", 1);
  const Run env = run({"gen", "twonorm", "--n", "20"});
  ::unsetenv("VSC_SEED");
  const Run flag = run({"gen", "twonorm", "--n", "20", "--seed", "77"});
  const Run dflt = run({"gen", "twonorm", "--n", "20"});
  const Run fortytwo = run({"gen", "twonorm", "--n", "20", "--seed", "42"});
  CHECK(env.out == flag.out);
  CHECK(dflt.out == fortytwo.out);
  CHECK(env.out != dflt.out);
}

TEST_CASE("failed runs leave no output file behind") {
  TempDir tmp;
  const auto data = tmp / "one_class.csv";
  std::ofstream(data) << "a,class\n1,x\n2,x\n3,x\n4,x\n";
  const auto out = tmp / "r.jsonl";
  const Run r = run({"cv", "--data", data, "--folds", "2", "--out", out});
  CHECK(r.code == 1);
  CHECK_FALSE(fs::exists(out));
  for (const auto& entry : fs::directory_iterator(tmp.path))
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
}
