#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gpmm/io.hpp"
#include "support.hpp"

using gpmm::Matrix;
using gpmm::Vector;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gpmm-io-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("csv round-trips data and headers at full precision") {
  TempDir dir;
  std::mt19937 gen(101);
  const Matrix data = support::random_matrix(gen, 3, 17, 1e6);
  const auto headers = gpmm::default_headers("x", 3);
  CHECK(headers == std::vector<std::string>{"x1", "x2", "x3"});
  const std::string path = dir.file("data.csv");
  gpmm::write_csv(path, data, headers);

  const auto table = gpmm::read_csv(path);
  CHECK(table.headers == headers);
  REQUIRE(table.data.rows() == 3);
  REQUIRE(table.data.cols() == 17);
  CHECK((table.data - data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv reader handles windows line endings and reports bad cells") {
  TempDir dir;
  {
    std::ofstream out(dir.file("crlf.csv"), std::ios::binary);
    out << "a,b\r\n1.5,2.5\r\n-3,4e2\r\n";
  }
  const auto table = gpmm::read_csv(dir.file("crlf.csv"));
  CHECK(table.headers == std::vector<std::string>{"a", "b"});
  CHECK(table.data(0, 1) == -3.0);
  CHECK(table.data(1, 1) == 400.0);

  {
    std::ofstream out(dir.file("bad.csv"));
    out << "a,b\n1,2\nx,4\n";
  }
  CHECK_THROWS_AS(gpmm::read_csv(dir.file("bad.csv")), std::runtime_error);
  try {
    gpmm::read_csv(dir.file("bad.csv"));
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("bad.csv") != std::string::npos);
    CHECK(what.find("3") != std::string::npos);  // offending line number
  }

  CHECK_THROWS_AS(gpmm::read_csv(dir.file("missing.csv")), std::runtime_error);
  CHECK_THROWS_AS(gpmm::write_csv(dir.file("x.csv"), Matrix::Zero(2, 2), {"only_one"}),
                  std::invalid_argument);
}

TEST_CASE("model persistence round-trips every field") {
  TempDir dir;
  std::mt19937 gen(102);
  gpmm::StoredModel model;
  model.kind = "sequential";
  model.params = support::random_model(gen, 3, 4, 2);
  model.tau = 7;
  model.converged = false;
  gpmm::Normalization norm;
  norm.mean = support::random_vector(gen, 4);
  norm.std_dev = support::random_vector(gen, 4).cwiseAbs() + Vector::Ones(4);
  model.norm_x = norm;

  const std::string path = dir.file("model.gpmm");
  gpmm::save_model(path, model);
  const auto loaded = gpmm::load_model(path);
  CHECK(loaded.kind == "sequential");
  CHECK(loaded.tau == 7);
  CHECK(loaded.converged == false);
  CHECK((loaded.params.u_mat - model.params.u_mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.params.v_mat - model.params.v_mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.params.w_diag - model.params.w_diag).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.params.lambda_y - model.params.lambda_y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.params.lambda_x - model.params.lambda_x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.params.c_x - model.params.c_x).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(loaded.norm_x.has_value());
  CHECK((loaded.norm_x->mean - norm.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.norm_x->std_dev - norm.std_dev).cwiseAbs().maxCoeff() == 0.0);
  CHECK(!loaded.norm_y.has_value());
}

TEST_CASE("model loader rejects foreign, truncated, and inconsistent files") {
  TempDir dir;
  {
    std::ofstream out(dir.file("foreign.gpmm"));
    out << "some-other-format\n";
  }
  CHECK_THROWS_AS(gpmm::load_model(dir.file("foreign.gpmm")), std::runtime_error);

  std::mt19937 gen(103);
  gpmm::StoredModel model;
  model.params = support::random_model(gen, 2, 2, 1);
  const std::string path = dir.file("model.gpmm");
  gpmm::save_model(path, model);
  // Truncate the file mid-matrix.
  std::ifstream in(path);
  std::string contents((std::istreambuf_iterator<char>(in)), {});
  in.close();
  {
    std::ofstream out(dir.file("trunc.gpmm"));
    out << contents.substr(0, contents.size() / 2);
  }
  CHECK_THROWS_AS(gpmm::load_model(dir.file("trunc.gpmm")), std::runtime_error);

  // A coupling entry that disagrees with 1 - lambda^2 must not load.
  gpmm::StoredModel broken = model;
  broken.params.lambda_eps_diag[0] += 0.25;
  gpmm::save_model(dir.file("broken.gpmm"), broken);
  CHECK_THROWS_AS(gpmm::load_model(dir.file("broken.gpmm")), std::runtime_error);
}
