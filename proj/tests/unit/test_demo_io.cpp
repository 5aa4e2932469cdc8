#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "vic/demo_io.hpp"
#include "vic/errors.hpp"

using namespace vic;

namespace {

DemoDataset random_dataset(int demos, int rows) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DemoDataset d;
  d.axes = {"x", "z"};
  for (int id = 0; id < demos; ++id)
    for (int i = 0; i < rows; ++i) {
      DemoRow r;
      r.demo_id = id;
      r.t = 0.05 * i + 1e-3 * u(rng) * 0.1;
      r.x = Eigen::Vector2d(u(rng), u(rng) * 1e-7);
      r.xd = Eigen::Vector2d(u(rng) / 3.0, u(rng));
      r.f = Eigen::Vector2d(u(rng) * 1e5, -15.0 + u(rng));
      d.rows.push_back(r);
    }
  return d;
}

}  // namespace

TEST(DemoCsv, RoundTripIsLossless) {
  const auto d = random_dataset(3, 40);
  const auto back = parse_demo_csv(format_demo_csv(d));
  ASSERT_EQ(back.axes, d.axes);
  ASSERT_EQ(back.rows.size(), d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].demo_id, d.rows[i].demo_id);
    EXPECT_NEAR(back.rows[i].t, d.rows[i].t, 1e-12);
    EXPECT_LT((back.rows[i].x - d.rows[i].x).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.rows[i].xd - d.rows[i].xd).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.rows[i].f - d.rows[i].f).cwiseAbs().maxCoeff(), 1e-12 * 1e5);
  }
  EXPECT_EQ(back.demo_ids(), (std::vector<int>{0, 1, 2}));
}

TEST(DemoCsv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "vic_demo_io_test" / "demo.csv";
  const auto d = random_dataset(1, 20);
  write_demo_csv(path, d);
  EXPECT_EQ(format_demo_csv(read_demo_csv(path)), format_demo_csv(d));
  std::filesystem::remove_all(path.parent_path());
}

TEST(DemoCsv, EmptyStreamThrows) {
  EXPECT_THROW(parse_demo_csv(""), DataError);
  EXPECT_THROW(parse_demo_csv("demo_id,t,x_z,xd_z,f_z\n"), DataError);
  EXPECT_THROW(format_demo_csv(DemoDataset{{"z"}, {}}), DataError);
}

TEST(DemoCsv, CorruptRowNamesLine) {
  const std::string text = "demo_id,t,x_z,xd_z,f_z\n0,0.0,0.1,0.0,1.0\n0,0.1,abc,0.0,1.0\n";
  try {
    parse_demo_csv(text, "demo.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("demo.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_demo_csv("demo_id,t,x_z,f_z\n0,0,0,0\n"), DataError);
  EXPECT_THROW(parse_demo_csv("demo_id,t,x_z,xd_z,f_z\n0,0.1,0,0,0\n0,0.1,0,0,0\n"), DataError);
}

TEST(DemoCsv, MissingFileIsIoError) { EXPECT_THROW(read_demo_csv("/nonexistent/demo.csv"), IoError); }

TEST(MixtureJson, RoundTrip) {
  GaussianMixture g;
  g.axes = {"z"};
  g.output_dims = {1, 2, 3};
  g.input_min = 0.0;
  g.input_max = 3.5;
  for (int k = 0; k < 2; ++k) {
    GaussianComponent c;
    c.weight = k == 0 ? 0.3 : 0.7;
    c.mean = Eigen::Vector4d(k, 0.1 * k, -0.2, 15.0 / 7.0);
    Eigen::Matrix4d a = Eigen::Matrix4d::Random();
    c.covariance = a * a.transpose() + Eigen::Matrix4d::Identity();
    g.components.push_back(c);
  }
  const auto back = mixture_from_json(mixture_to_json(g));
  ASSERT_EQ(back.size(), 2);
  EXPECT_EQ(back.axes, g.axes);
  EXPECT_EQ(back.output_dims, g.output_dims);
  EXPECT_EQ(back.input_max, g.input_max);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(back.components[k].weight, g.components[k].weight);
    EXPECT_EQ(back.components[k].mean, g.components[k].mean);
    EXPECT_EQ(back.components[k].covariance, g.components[k].covariance);
  }
  EXPECT_THROW(mixture_from_json("{\"format\": \"other\"}"), DataError);
  EXPECT_THROW(mixture_from_json("not json"), DataError);
}
