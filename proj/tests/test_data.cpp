#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cdprune/data.hpp"
#include "cdprune/errors.hpp"

using namespace cdprune;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("cdprune_test_data_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

Dataset labelled(std::size_t n_neg, std::size_t n_pos) {
  Dataset ds;
  ds.X = Matrix(static_cast<Eigen::Index>(n_neg + n_pos), 1);
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) ds.X(i, 0) = static_cast<double>(i);
  ds.y.assign(n_neg, 0);
  ds.y.insert(ds.y.end(), n_pos, 1);
  ds.recount();
  return ds;
}

}  // namespace

TEST_CASE("gen_gaussians shape, counts and determinism") {
  GaussianSpec spec;
  spec.seed = 17;
  const auto a = gen_gaussians(spec);
  CHECK(a.size() == 2400);
  CHECK(a.n_pos == 400);
  CHECK(a.n_neg == 2000);
  CHECK(a.dim() == 2);
  CHECK(static_cast<std::size_t>(std::count(a.y.begin(), a.y.end(), 1)) == 400);
  const auto b = gen_gaussians(spec);
  CHECK(std::memcmp(a.X.data(), b.X.data(), sizeof(double) * static_cast<std::size_t>(a.X.size())) == 0);
  CHECK(a.y == b.y);
  spec.seed = 18;
  CHECK(gen_gaussians(spec).y != a.y);
}

TEST_CASE("gen_gaussians places positives along the first axis") {
  GaussianSpec spec;
  spec.n_pos = 4000;
  spec.n_neg = 4000;
  spec.dim = 3;
  spec.separation = 3.0;
  spec.spread = 0.5;
  spec.seed = 2;
  const auto ds = gen_gaussians(spec);
  Eigen::RowVectorXd pos = Eigen::RowVectorXd::Zero(3), neg = Eigen::RowVectorXd::Zero(3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.y[i] == 1 ? pos : neg) += ds.X.row(static_cast<Eigen::Index>(i));
  }
  pos /= 4000.0;
  neg /= 4000.0;
  CHECK(pos(0) == doctest::Approx(3.0).epsilon(0.01));
  CHECK(std::abs(pos(1)) < 0.05);
  CHECK(std::abs(neg(0)) < 0.05);
  const double var = (ds.X.col(2).array() - ds.X.col(2).mean()).square().mean();
  CHECK(std::sqrt(var) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("gen_gaussians rejects bad parameters") {
  GaussianSpec spec;
  spec.spread = 0.0;
  CHECK_THROWS_AS(gen_gaussians(spec), DomainError);
  spec = GaussianSpec{};
  spec.dim = 1;
  CHECK_THROWS_AS(gen_gaussians(spec), DomainError);
  spec = GaussianSpec{};
  spec.n_pos = 0;
  CHECK_THROWS_AS(gen_gaussians(spec), DomainError);
  spec = GaussianSpec{};
  spec.separation = -1.0;
  CHECK_THROWS_AS(gen_gaussians(spec), DomainError);
}

TEST_CASE("load_csv parses with and without header") {
  TempDir dir("load");
  const auto plain = load_csv(dir.write("a.csv", "1.0,2.0,0\n2.0,1.0,1\n0.0,0.0,0\n"));
  CHECK(plain.size() == 3);
  CHECK(plain.n_pos == 1);
  CHECK(plain.n_neg == 2);
  CHECK(plain.X(1, 0) == 2.0);
  const auto headed = load_csv(dir.write("b.csv", "f1,f2,label\n1.0,2.0,0\n2.0,1.0,1\n0.0,0.0,0\n"));
  CHECK(headed.X == plain.X);
  CHECK(headed.y == plain.y);
  CHECK(plain.provenance.find("a.csv") != std::string::npos);
}

TEST_CASE("load_csv error paths") {
  TempDir dir("errors");
  SUBCASE("label out of range names the row") {
    try {
      load_csv(dir.write("c.csv", "1,2,0\n3,4,2\n"));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("non-numeric feature gives row and column") {
    try {
      load_csv(dir.write("d.csv", "1,2,0\n3,abc,1\n"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 2") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("empty file") { CHECK_THROWS_AS(load_csv(dir.write("e.csv", "")), SchemaError); }
  SUBCASE("header only") { CHECK_THROWS_AS(load_csv(dir.write("f.csv", "a,b,label\n")), SchemaError); }
  SUBCASE("ragged rows") { CHECK_THROWS_AS(load_csv(dir.write("g.csv", "1,2,0\n1,0\n")), SchemaError); }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_csv(dir.path / "nope.csv"), FilesystemError); }
}

TEST_CASE("write_csv round-trips exactly") {
  TempDir dir("roundtrip");
  GaussianSpec spec;
  spec.n_pos = 20;
  spec.n_neg = 30;
  spec.dim = 4;
  spec.seed = 5;
  const auto ds = gen_gaussians(spec);
  write_csv(ds, dir.path / "x.csv");
  const auto back = load_csv(dir.path / "x.csv");
  CHECK(back.X == ds.X);
  CHECK(back.y == ds.y);
}

TEST_CASE("stratified split counts") {
  SplitSpec spec;
  spec.seed = 3;
  const auto ds = labelled(80, 20);
  const auto s = split(ds, spec);
  CHECK(s.train.n_neg == 56);
  CHECK(s.train.n_pos == 14);
  CHECK(s.val.n_neg == 12);
  CHECK(s.val.n_pos == 3);
  CHECK(s.test.n_neg == 12);
  CHECK(s.test.n_pos == 3);
}

TEST_CASE("split is disjoint, exhaustive, stratified and deterministic") {
  GaussianSpec gspec;
  gspec.seed = 9;
  const auto ds = gen_gaussians(gspec);
  SplitSpec spec;
  spec.seed = 21;
  const auto idx = split_indices(ds, spec);
  std::vector<std::size_t> all;
  for (const auto* part : {&idx.train, &idx.val, &idx.test}) all.insert(all.end(), part->begin(), part->end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(ds.size());
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);

  const auto s = split(ds, spec);
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    const double frac = static_cast<double>(part->size()) / static_cast<double>(ds.size());
    const double expect_pos = frac * static_cast<double>(ds.n_pos);
    CHECK(std::abs(static_cast<double>(part->n_pos) - expect_pos) <= 1.0);
  }

  const auto again = split_indices(ds, spec);
  CHECK(again.train == idx.train);
  CHECK(again.test == idx.test);
  spec.seed = 22;
  CHECK(split_indices(ds, spec).train != idx.train);
}

TEST_CASE("split edge cases") {
  const auto ds = labelled(80, 20);
  SplitSpec all_train{1.0, 0.0, 0.0, false, 1};
  const auto s = split(ds, all_train);
  CHECK(s.train.size() == 100);
  CHECK(s.val.size() == 0);
  CHECK(s.test.size() == 0);

  SplitSpec bad{0.5, 0.2, 0.2, true, 1};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  SplitSpec zero_strat{1.0, 0.0, 0.0, true, 1};
  CHECK_THROWS_AS(zero_strat.validate(), ValidationError);

  CHECK_THROWS_AS(split(labelled(80, 2), SplitSpec{}), StratificationError);
}

TEST_CASE("standardize uses training statistics only") {
  Splits s;
  s.train.X = Matrix{{1.0, 7.0}, {2.0, 7.0}, {3.0, 7.0}, {4.0, 7.0}};
  s.train.y = {0, 1, 0, 1};
  s.train.recount();
  s.val.X = Matrix{{5.0, 7.0}};
  s.val.y = {1};
  s.val.recount();
  s.test.X = Matrix{{2.5, 3.0}};
  s.test.y = {0};
  s.test.recount();
  const auto scaling = standardize(s);
  CHECK(scaling.means[0] == 2.5);
  CHECK(scaling.stds[0] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(s.val.X(0, 0) == doctest::Approx(2.236068).epsilon(1e-6));
  CHECK(s.test.X(0, 0) == 0.0);
  // Constant column passes through unchanged.
  CHECK(s.train.X.col(1).isConstant(7.0));
  CHECK(s.test.X(0, 1) == 3.0);
  CHECK(s.train.feature_means == scaling.means);
}

TEST_CASE("standardized train columns have zero mean and unit std") {
  GaussianSpec gspec;
  gspec.dim = 5;
  gspec.separation = 1.0;
  gspec.spread = 2.0;
  gspec.seed = 4;
  auto s = split(gen_gaussians(gspec), SplitSpec{});
  standardize(s);
  for (Eigen::Index c = 0; c < s.train.X.cols(); ++c) {
    const auto col = s.train.X.col(c).array();
    const double mean = col.mean();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt((col - mean).square().mean()) - 1.0) < 1e-9);
  }
}
