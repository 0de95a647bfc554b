#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "t_table.hpp"
#include "vsc/data.hpp"
#include "vsc/eval.hpp"

using vsc::CvResult;
using vsc::Dataset;
using vsc::Matrix;
using vsc::Vector;

namespace {

class Constant final : public vsc::Classifier {
 public:
  explicit Constant(vsc::Label v) : v_(v) {}
  vsc::Label predict(vsc::Point) const override { return v_; }

 private:
  vsc::Label v_;
};

Dataset index_dataset(std::size_t n) {
  Dataset d;
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = i % 3 == 0 ? -1.0 : 1.0;
  }
  d.x = Matrix(n, 1, x);
  d.y = Vector(y);
  return d;
}

CvResult fake_result(std::string id, std::vector<double> f1) {
  CvResult r;
  r.classifier_id = std::move(id);
  r.dataset_hash = 7;
  r.fold_seed = 1;
  r.n_folds = f1.size();
  r.fold_f1 = std::move(f1);
  r.summarize();
  return r;
}

}  // namespace

TEST_CASE("f1 examples") {
  CHECK(vsc::f1_score({5, 0, 0, 0}) == 1.0);
  CHECK(vsc::f1_score({3, 1, 2, 0}) == doctest::Approx(2.0 / 3.0));
  CHECK(vsc::f1_score({0, 0, 4, 0}) == 0.0);
  CHECK(vsc::f1_score({0, 0, 0, 9}) == 0.0);

  const std::vector<double> truth{1, 1, -1, -1, 1};
  const std::vector<vsc::Label> pred{1, -1, 1, -1, 1};
  const auto c = vsc::confusion(truth, pred);
  CHECK(c.tp == 2);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
}

TEST_CASE("t distribution tail against reference table") {
  for (const auto& row : reference::kTTable) {
    const double p = vsc::student_t_two_tailed_p(row.t, row.dof);
    CHECK(std::abs(p - row.p) <= 1e-3);
    CHECK(std::abs(p - row.p) <= 1e-9);
    CHECK(std::abs(p - oracle::t_two_tailed_p_quadrature(row.t, row.dof)) <= 1e-6);
    CHECK(vsc::student_t_two_tailed_p(-row.t, row.dof) == p);
  }
  CHECK(vsc::regularized_incomplete_beta(0.0, 2, 3) == 0.0);
  CHECK(vsc::regularized_incomplete_beta(1.0, 2, 3) == 1.0);
  // I_x(1, 1) = x, I_x(a, 1) = x^a.
  CHECK(vsc::regularized_incomplete_beta(0.3, 1, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(vsc::regularized_incomplete_beta(0.6, 3, 1) == doctest::Approx(0.216).epsilon(1e-12));
}

TEST_CASE("paired t-test examples") {
  const std::vector<double> a{0.9, 0.8, 0.85, 0.95, 0.7, 0.9, 0.8, 0.85, 0.95, 0.7};
  const auto same = vsc::paired_t_test(a, a);
  CHECK(same.t_stat == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK_FALSE(same.significant);
  CHECK(same.dof == 9);

  // Differences 1 +- sqrt(0.9) alternating: mean 1, sample sd 1.
  std::vector<double> x(10), y(10, 0.0);
  for (int i = 0; i < 10; ++i) x[i] = 1.0 + (i % 2 ? -1 : 1) * std::sqrt(0.9);
  const auto r = vsc::paired_t_test(x, y);
  CHECK(r.t_stat == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.011507985165943651).epsilon(1e-9));
  CHECK(r.significant);

  for (auto& v : x) v -= 0.9;
  const auto small = vsc::paired_t_test(x, y);
  CHECK(small.t_stat == doctest::Approx(0.31622776601683794).epsilon(1e-9));
  CHECK(small.p_value == doctest::Approx(0.7590406544641439).epsilon(1e-9));
  CHECK_FALSE(small.significant);

  const std::vector<double> shifted{1.1, 1.1, 1.1};
  const std::vector<double> base{1.0, 1.0, 1.0};
  const auto inf = vsc::paired_t_test(shifted, base);
  CHECK(std::isinf(inf.t_stat));
  CHECK(inf.t_stat > 0);
  CHECK(inf.p_value == 0.0);

  CHECK_THROWS_AS(vsc::paired_t_test(std::vector<double>{1}, std::vector<double>{2}),
                  vsc::ParameterError);
  CHECK_THROWS_AS(vsc::paired_t_test(std::vector<double>{1, 2}, std::vector<double>{2}),
                  vsc::ParameterError);
}

TEST_CASE("paired t-test symmetry and scale invariance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(10), b(10), a2(10), b2(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      a2[i] = 3.5 * a[i] + 2.0;
      b2[i] = 3.5 * b[i] + 2.0;
    }
    const auto ab = vsc::paired_t_test(a, b);
    const auto ba = vsc::paired_t_test(b, a);
    REQUIRE(ab.t_stat == doctest::Approx(-ba.t_stat).epsilon(1e-12));
    REQUIRE(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    const auto scaled = vsc::paired_t_test(a2, b2);
    REQUIRE(scaled.t_stat == doctest::Approx(ab.t_stat).epsilon(1e-9));
    REQUIRE(scaled.p_value >= 0.0);
    REQUIRE(scaled.p_value <= 1.0);
  }
}

TEST_CASE("compare") {
  const std::vector<CvResult> self{fake_result("a", {0.8, 0.9, 0.85}),
                                   fake_result("a2", {0.8, 0.9, 0.85})};
  const auto c = vsc::compare(self);
  CHECK(c.cells[0][1].direction == 0);
  CHECK_FALSE(c.cells[0][1].test.significant);
  CHECK(c.cells[0][1].test.p_value == 1.0);

  const std::vector<CvResult> mixed{fake_result("good", {1, 1, 1, 1, 1}),
                                    fake_result("bad", {0, 0.1, 0, 0.05, 0})};
  const auto m = vsc::compare(mixed);
  CHECK(m.cells[0][1].direction == 1);
  CHECK(m.cells[1][0].direction == -1);
  CHECK(m.cells[0][1].test.significant);
  CHECK(m.cells[0][1].test.t_stat == doctest::Approx(-m.cells[1][0].test.t_stat));
  CHECK(m.cells[0][0].direction == 0);

  auto other_fold = fake_result("x", {0.8, 0.9, 0.85});
  other_fold.fold_seed = 2;
  std::vector<CvResult> bad{self[0], other_fold};
  CHECK_THROWS_AS(vsc::compare(bad), vsc::ParameterError);
  auto other_data = self[0];
  other_data.dataset_hash = 99;
  bad = {self[0], other_data};
  CHECK_THROWS_AS(vsc::compare(bad), vsc::ParameterError);
}

TEST_CASE("rankings") {
  using Score = std::pair<std::string, double>;
  const std::vector<Score> s{{"A", 0.95}, {"B", 0.9502}, {"C", 0.90}};
  const auto r = vsc::rankings(s);
  std::map<std::string, int> by;
  for (const auto& [id, rank] : r) by[id] = rank;
  CHECK(by["A"] == 1);
  CHECK(by["B"] == 1);
  CHECK(by["C"] == 3);
  CHECK(r.front().first == "B");

  const std::vector<Score> equal{{"x", 0.5}, {"y", 0.5}, {"z", 0.5}};
  for (const auto& [id, rank] : vsc::rankings(equal)) CHECK(rank == 1);

  const std::vector<Score> spaced{{"x", 0.7}, {"y", 0.9}, {"z", 0.8}};
  const auto sp = vsc::rankings(spaced);
  CHECK(sp[0] == std::pair<std::string, int>{"y", 1});
  CHECK(sp[1] == std::pair<std::string, int>{"z", 2});
  CHECK(sp[2] == std::pair<std::string, int>{"x", 3});
}

TEST_CASE("run_cv with a constant classifier") {
  Dataset d;
  d.x = Matrix(20, 1);
  d.y = Vector(std::vector<double>(20, 1.0));
  vsc::Rng rng(1);
  // All-positive labels cannot be stratified into 2 classes but the plan still works.
  const auto plan = vsc::stratified_folds(d.y, 5, rng);
  const vsc::ClassifierFactory always_pos = [](const Dataset&, std::uint64_t) {
    return std::make_unique<Constant>(1);
  };
  const CvResult r = vsc::run_cv(d, always_pos, plan, {});
  CHECK(r.fold_f1 == std::vector<double>(5, 1.0));
  CHECK(r.mean_f1 == 1.0);
  CHECK(r.std_f1 == 0.0);
}

TEST_CASE("run_cv hands disjoint covering splits to the factory") {
  const Dataset d = index_dataset(47);
  vsc::Rng rng(2);
  const auto plan = vsc::stratified_folds(d.y, 10, rng);
  std::vector<std::set<std::size_t>> train_sets;
  std::set<std::uint64_t> seeds;
  const vsc::ClassifierFactory spy = [&](const Dataset& train, std::uint64_t seed) {
#pragma omp critical
    {
      std::set<std::size_t> ids;
      for (std::size_t i = 0; i < train.size(); ++i) ids.insert(static_cast<std::size_t>(train.x(i, 0)));
      train_sets.push_back(ids);
      seeds.insert(seed);
    }
    return std::make_unique<Constant>(1);
  };
  vsc::CvOptions opts;
  opts.scale_mode = vsc::ScaleMode::None;
  opts.model_seed = 5;
  vsc::run_cv(d, spy, plan, opts);
  REQUIRE(train_sets.size() == 10);
  CHECK(seeds.size() == 10);
  std::vector<int> held_out(47, 0);
  for (const auto& s : train_sets) {
    CHECK(s.size() >= 41);
    for (std::size_t i = 0; i < 47; ++i) held_out[i] += s.count(i) == 0;
  }
  for (int c : held_out) CHECK(c == 1);
  CHECK(vsc::fold_model_seed(5, 0) != vsc::fold_model_seed(5, 1));
}

TEST_CASE("run_cv determinism and parallel folds") {
  vsc::Rng g(3);
  const Dataset d = vsc::gen_twonorm(300, 5, g);
  vsc::Rng r1(11);
  const auto plan = vsc::stratified_folds(d.y, 10, r1);
  vsc::ModelSpec spec;
  spec.k = 20;
  const auto factory = vsc::make_factory(spec);
  vsc::CvOptions opts;
  opts.model_seed = 9;
  const CvResult a = vsc::run_cv(d, factory, plan, opts);
  const CvResult b = vsc::run_cv(d, factory, plan, opts);
  opts.jobs = 4;
  const CvResult c = vsc::run_cv(d, factory, plan, opts);
  CHECK(a.fold_f1 == b.fold_f1);
  CHECK(a.fold_f1 == c.fold_f1);
  CHECK(a.mean_f1 > 0.9);
  double sq = 0;
  for (double f : a.fold_f1) sq += (f - a.mean_f1) * (f - a.mean_f1);
  CHECK(a.std_f1 == doctest::Approx(std::sqrt(sq / 9)));

  opts.jobs = 1;
  opts.scale_mode = vsc::ScaleMode::Global;
  CHECK(vsc::run_cv(d, factory, plan, opts).mean_f1 > 0.9);
}

TEST_CASE("run_cv wraps fold failures") {
  const Dataset d = index_dataset(30);
  vsc::Rng rng(2);
  const auto plan = vsc::stratified_folds(d.y, 3, rng);
  const vsc::ClassifierFactory failing = [](const Dataset&, std::uint64_t) -> std::unique_ptr<vsc::Classifier> {
    throw vsc::DegeneracyError("boom");
  };
  try {
    vsc::run_cv(d, failing, plan, {});
    FAIL("expected FoldError");
  } catch (const vsc::FoldError& e) {
    CHECK(e.fold() == 0);
    try {
      std::rethrow_if_nested(e);
      FAIL("expected nested exception");
    } catch (const vsc::DegeneracyError& inner) {
      CHECK(std::string(inner.what()) == "boom");
    }
  }

  vsc::Rng other(1);
  const auto wrong = vsc::stratified_folds(Vector{1, -1, 1, -1}, 2, other);
  CHECK_THROWS_AS(vsc::run_cv(d, failing, wrong, {}), vsc::ParameterError);
}

TEST_CASE("sweep grid") {
  vsc::Rng g(4);
  const Dataset d = vsc::gen_twonorm(200, 5, g);
  vsc::Rng r(5);
  const auto plan = vsc::stratified_folds(d.y, 5, r);
  vsc::SweepOptions opts;
  opts.k_list = {5, 10};
  opts.lambda_list = {0.1, 1.0};
  opts.reference = vsc::SweepKey{10, 1.0};
  opts.cv.model_seed = 3;
  const auto grid = vsc::sweep(d, vsc::ModelSpec{}, plan, opts);
  REQUIRE(grid.entries.size() == 4);
  CHECK(grid.entries[1].key == vsc::SweepKey{5, 1.0});
  REQUIRE(grid.reference.has_value());
  CHECK(grid.normalized(*grid.reference) == 1.0);
  CHECK(grid.find({10, 0.1}) == &grid.entries[2]);
  CHECK(grid.find({7, 0.1}) == nullptr);

  opts.cv.jobs = 4;
  const auto parallel = vsc::sweep(d, vsc::ModelSpec{}, plan, opts);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(parallel.entries[i].result.fold_f1 == grid.entries[i].result.fold_f1);

  opts.reference = vsc::SweepKey{100, 1.0};
  CHECK_THROWS_AS(vsc::sweep(d, vsc::ModelSpec{}, plan, opts), vsc::ParameterError);
}

TEST_CASE("confidence grid") {
  const vsc::Pair p{{-5, 0}, {5, 0}};
  const auto g = vsc::confidence_grid(p, {-10, 10}, {-10, 10}, 201, 201);
  REQUIRE(g.values.size() == 201 * 201);
  CHECK(g.xs[100] == 0.0);
  CHECK(g.ys[100] == 0.0);
  CHECK(g.at(100, 100) == 0.5);
  CHECK(g.at(100, 50) >= 0.999);   // x = -5
  CHECK(g.at(100, 150) >= 0.999);  // x = +5
  for (std::size_t iy = 0; iy < 201; ++iy) {
    for (std::size_t ix = 0; ix < 201; ++ix) {
      REQUIRE(std::abs(g.at(iy, ix) - g.at(iy, 200 - ix)) <= 1e-12);
      REQUIRE(std::abs(g.at(iy, ix) - g.at(200 - iy, ix)) <= 1e-12);
      REQUIRE(g.at(iy, ix) > 0.0);
      REQUIRE(g.at(iy, ix) <= 1.0);
    }
  }
  CHECK_THROWS_AS(vsc::confidence_grid(p, {-1, 1}, {-1, 1}, 1, 5), vsc::ParameterError);
}
