#include <gtest/gtest.h>

#include <filesystem>

#include "stackeval/similarity.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

TrajectoryTrace trace_of(std::vector<Vec3> coms, Rotation end = Rotation::Identity()) {
  TrajectoryTrace t;
  t.object_id = "x";
  for (std::size_t i = 0; i < coms.size(); ++i) {
    t.samples.push_back({static_cast<int>(i), coms[i], i + 1 == coms.size() ? end : Rotation::Identity()});
  }
  return t;
}

LabeledFeatures sample(const std::string& shape, GroundLabel label, std::vector<double> f, int k) {
  LabeledFeatures s;
  s.features = Eigen::Map<Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  s.label = label;
  s.shape = shape;
  s.orientation = "+y";
  s.trace_id = shape + "/+y/" + std::to_string(k);
  return s;
}

std::vector<LabeledFeatures> toy_data(Rng& rng, int per_label, double noise) {
  std::vector<LabeledFeatures> out;
  for (int k = 0; k < per_label; ++k) {
    auto n = [&] { return noise * rng.normal(); };
    out.push_back(sample("cube", GroundLabel::Flat, {n(), n(), n(), 0, 1, 0, 0, 2}, k));
    out.push_back(sample("sphere", GroundLabel::Round, {1 + n(), 1 + n(), 1.5 + n(), 1, 0, 1, 0, 30}, k));
  }
  return out;
}

}  // namespace

TEST(Similarity, FeaturizeResting) {
  const SceneObject cube = make_object("x", "cube", Vec3::Zero());
  const auto f = featurize(trace_of({Vec3(0, 1.5, 0), Vec3(0, 1.5, 0)}), cube, kb()->lookup("cube"));
  ASSERT_EQ(f.size(), kFeatureDim);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(f[2], 0.0);
  EXPECT_EQ(f[3], 0.0);
  EXPECT_EQ(f[4], 1.0);
  EXPECT_EQ(f[5] + f[6], 0.0);
  EXPECT_EQ(f[7], 2.0);
}

TEST(Similarity, FeaturizeFall) {
  const SceneObject cube = make_object("x", "cube", Vec3::Zero());
  const Rotation tipped(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  const auto f = featurize(trace_of({Vec3(0, 1.5, 0), Vec3(0.5, 1.0, 0), Vec3(1, 0.5, 0)}, tipped), cube,
                           kb()->lookup("cube"));
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0);
  EXPECT_NEAR(f[2], M_PI / 2, 1e-12);
  EXPECT_EQ(f[3], 1.0);
  EXPECT_EQ(f[7], 3.0);
}

TEST(Similarity, FeaturizeRoundContact) {
  const SceneObject ball = make_object("x", "sphere", Vec3::Zero());
  const auto f = featurize(trace_of({Vec3(0, 1.5, 0), Vec3(0, 0.5, 0)}), ball, kb()->lookup("sphere"));
  EXPECT_EQ(f[5], 1.0);
  EXPECT_EQ(f[4] + f[6], 0.0);
}

TEST(Similarity, DegenerateTrace) {
  const SceneObject cube = make_object("x", "cube", Vec3::Zero());
  try {
    featurize(trace_of({Vec3(0, 1.5, 0)}), cube, kb()->lookup("cube"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTrace);
  }
}

TEST(Similarity, TrainingRejections) {
  Rng rng(1);
  auto data = toy_data(rng, 4, 0.05);
  std::vector<LabeledFeatures> flat_only;
  for (const auto& s : data) {
    if (s.label == GroundLabel::Flat) flat_only.push_back(s);
  }
  try {
    train_similarity(flat_only, 0, *kb());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
  data.push_back(sample("cylinder", GroundLabel::Flat, {0, 0, 0, 0, 1, 0, 0, 2}, 9));
  try {
    train_similarity(data, 0, *kb());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Similarity, SeparatesToyClusters) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 100);
    const GroundingModel m = train_similarity(toy_data(rng, 8, 0.05), seed, *kb());
    const auto [same, diff] = cluster_similarity(m);
    EXPECT_GT(same, 0.8) << seed;
    EXPECT_LT(diff, 0.0) << seed;
    for (const auto& r : m.references) EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
    Rng probe(seed + 200);
    for (const auto& s : toy_data(probe, 3, 0.05)) {
      EXPECT_EQ(ground(m, m.embed(s.features)).label, s.label);
    }
  }
}

TEST(Similarity, DuplicatedSamplesSeparate) {
  std::vector<LabeledFeatures> data;
  for (int k = 0; k < 5; ++k) {
    data.push_back(sample("cube", GroundLabel::Flat, {0, 0, 0, 0, 1, 0, 0, 2}, k));
    data.push_back(sample("egg", GroundLabel::Round, {1, 1, 1, 1, 0, 1, 0, 20}, k));
  }
  const GroundingModel m = train_similarity(data, 4, *kb());
  const auto [same, diff] = cluster_similarity(m);
  EXPECT_NEAR(same, 1.0, 1e-9);
  EXPECT_LT(diff, -0.2 + 1e-9);
}

TEST(Similarity, ZeroDistanceNeighbour) {
  Rng rng(9);
  const GroundingModel m = train_similarity(toy_data(rng, 6, 0.1), 2, *kb());
  for (std::size_t i = 0; i < m.references.size(); ++i) {
    const Grounding g = ground(m, m.references[i]);
    ASSERT_EQ(g.neighbors.size(), static_cast<std::size_t>(kNeighbors));
    EXPECT_NEAR(g.neighbors.front().similarity, 1.0, 1e-12);
    EXPECT_EQ(*m.references[g.neighbors.front().index].label, *m.references[i].label);
    for (std::size_t k = 1; k < g.neighbors.size(); ++k) {
      EXPECT_GE(g.neighbors[k - 1].similarity, g.neighbors[k].similarity);
    }
  }
}

TEST(Similarity, ModelPersistence) {
  Rng rng(5);
  const GroundingModel m = train_similarity(toy_data(rng, 4, 0.1), 3, *kb());
  const std::string text = serialize_model(m);
  const GroundingModel back = parse_model(text);
  EXPECT_EQ(serialize_model(back), text);
  EXPECT_EQ(back.transform, m.transform);
  EXPECT_EQ(back.mean, m.mean);

  const auto path = std::filesystem::temp_directory_path() / "stackeval_model_test.txt";
  save_model(m, path);
  EXPECT_EQ(serialize_model(load_model(path)), text);
  std::filesystem::remove(path);

  EXPECT_THROW(parse_model("stackeval-grounding 2\n"), Error);
  EXPECT_THROW(parse_model(text.substr(0, text.size() / 2)), Error);
}

TEST(Similarity, Deterministic) {
  Rng a(8), b(8);
  const GroundingModel x = train_similarity(toy_data(a, 4, 0.1), 6, *kb());
  const GroundingModel y = train_similarity(toy_data(b, 4, 0.1), 6, *kb());
  EXPECT_EQ(serialize_model(x), serialize_model(y));
}
