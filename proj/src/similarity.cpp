#include "stackeval/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stackeval/error.hpp"
#include "stackeval/physics.hpp"
#include "stackeval/rng.hpp"

namespace stackeval {

namespace {

constexpr const char* kModelMagic = "stackeval-grounding";
constexpr int kModelVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double unhex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::Parse, "bad number '" + s + "'");
  return v;
}

Eigen::VectorXd normalized_or_zero(const Eigen::VectorXd& v) {
  const double n = v.norm();
  return n > 0.0 ? Eigen::VectorXd(v / n) : Eigen::VectorXd::Zero(v.size());
}

}  // namespace

std::string_view to_string(GroundLabel label) { return label == GroundLabel::Flat ? "flat" : "round"; }

GroundLabel parse_label(std::string_view text) {
  if (text == "flat") return GroundLabel::Flat;
  if (text == "round") return GroundLabel::Round;
  throw Error(ErrorCode::Parse, "bad label '" + std::string(text) + "'");
}

Eigen::VectorXd featurize(const TrajectoryTrace& trace, const SceneObject& object, const Voxeme& voxeme) {
  if (trace.samples.size() < 2) {
    throw Error(ErrorCode::DegenerateTrace, "trace of '" + trace.object_id + "' has fewer than two samples");
  }
  const TraceSample& first = trace.samples.front();
  const TraceSample& last = trace.samples.back();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kFeatureDim);
  f[0] = first.position.y() - last.position.y();
  f[1] = std::hypot(last.position.x() - first.position.x(), last.position.z() - first.position.z());
  double tilt = 0.0;
  for (const TraceSample& s : trace.samples) tilt = std::max(tilt, rotation_distance(first.rotation, s.rotation));
  f[2] = tilt;
  SceneObject end = object;
  end.rotation = last.rotation;
  const double bottom = last.position.y() - world_half_extents(end, voxeme).y();
  f[3] = bottom <= kContactTolerance ? 1.0 : 0.0;
  switch (active_habitat(voxeme, first.rotation).support) {
    case SurfaceClass::Flat: f[4] = 1.0; break;
    case SurfaceClass::Round: f[5] = 1.0; break;
    case SurfaceClass::Point: f[6] = 1.0; break;
  }
  f[7] = static_cast<double>(trace.samples.size());
  return f;
}

BehaviorEmbedding GroundingModel::embed(const Eigen::VectorXd& features) const {
  BehaviorEmbedding e;
  const Eigen::VectorXd standardized = (features - mean).cwiseQuotient(scale);
  e.vector = normalized_or_zero(transform * standardized);
  return e;
}

GroundingModel train_similarity(const std::vector<LabeledFeatures>& samples, std::uint64_t seed, const VoxKb& kb,
                                const TrainOptions& options) {
  std::size_t flat = 0;
  std::size_t round = 0;
  for (const auto& s : samples) {
    if (kb.lookup(s.shape).intrinsic_class == IntrinsicClass::Mixed) {
      throw Error(ErrorCode::InvalidArgument, "mixed shape '" + s.shape + "' cannot be a training sample");
    }
    if (s.features.size() != kFeatureDim) throw Error(ErrorCode::InvalidArgument, "feature vector has wrong length");
    (s.label == GroundLabel::Flat ? flat : round) += 1;
  }
  if (flat < 2 || round < 2) {
    throw Error(ErrorCode::InsufficientData, "need at least two samples of each label");
  }

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, kFeatureDim);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = samples[static_cast<std::size_t>(i)].features.transpose();

  GroundingModel model;
  model.mean = x.colwise().mean().transpose();
  model.scale = Eigen::VectorXd::Ones(kFeatureDim);
  for (int c = 0; c < kFeatureDim; ++c) {
    const double var = (x.col(c).array() - model.mean[c]).square().mean();
    if (var > 1e-24) model.scale[c] = std::sqrt(var);
  }
  Eigen::MatrixXd xs = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.row(i) = (x.row(i).transpose() - model.mean).cwiseQuotient(model.scale).transpose();
  }

  Rng rng(seed);
  Eigen::MatrixXd w(kEmbeddingDim, kFeatureDim);
  for (int r = 0; r < kEmbeddingDim; ++r) {
    for (int c = 0; c < kFeatureDim; ++c) w(r, c) = 0.5 * rng.normal();
  }

  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  for (int it = 0; it < options.iterations; ++it) {
    const Eigen::MatrixXd z = w * xs.transpose();  // D x N
    Eigen::VectorXd norms(n);
    Eigen::MatrixXd e(kEmbeddingDim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      norms[i] = z.col(i).norm();
      e.col(i) = norms[i] > 1e-12 ? Eigen::VectorXd(z.col(i) / norms[i]) : Eigen::VectorXd::Zero(kEmbeddingDim);
    }
    Eigen::MatrixXd gz = Eigen::MatrixXd::Zero(kEmbeddingDim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double c = e.col(i).dot(e.col(j));
        double dl = 0.0;
        if (samples[static_cast<std::size_t>(i)].label == samples[static_cast<std::size_t>(j)].label) {
          if (c < options.same_margin) dl = -1.0;
        } else if (c > options.different_margin) {
          dl = 1.0;
        }
        if (dl == 0.0) continue;
        if (norms[i] > 1e-12) gz.col(i) += dl * (e.col(j) - c * e.col(i)) / norms[i];
        if (norms[j] > 1e-12) gz.col(j) += dl * (e.col(i) - c * e.col(j)) / norms[j];
      }
    }
    w -= options.learning_rate * (gz * xs) / pairs;
  }
  model.transform = w;

  for (const auto& s : samples) {
    BehaviorEmbedding e = model.embed(s.features);
    e.shape = s.shape;
    e.orientation = s.orientation;
    e.trace_id = s.trace_id;
    e.label = s.label;
    model.references.push_back(std::move(e));
  }
  return model;
}

Grounding ground(const GroundingModel& model, const BehaviorEmbedding& embedding) {
  if (model.references.empty()) throw Error(ErrorCode::InsufficientData, "grounding model has no references");
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < model.references.size(); ++i) {
    all.push_back({i, model.references[i].vector.dot(embedding.vector)});
  }
  std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) { return a.similarity > b.similarity; });
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(model.k, 1)), all.size());
  Grounding g;
  g.neighbors.assign(all.begin(), all.begin() + static_cast<long>(k));
  int flat = 0;
  for (const Neighbor& nb : g.neighbors) flat += model.references[nb.index].label == GroundLabel::Flat ? 1 : -1;
  g.label = flat > 0 ? GroundLabel::Flat : GroundLabel::Round;
  if (flat == 0) g.label = *model.references[g.neighbors.front().index].label;
  return g;
}

std::pair<double, double> cluster_similarity(const GroundingModel& model) {
  double same = 0.0;
  double diff = 0.0;
  std::size_t ns = 0;
  std::size_t nd = 0;
  const auto& refs = model.references;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) {
      const double c = refs[i].vector.dot(refs[j].vector);
      if (refs[i].label == refs[j].label) {
        same += c;
        ++ns;
      } else {
        diff += c;
        ++nd;
      }
    }
  }
  return {ns ? same / static_cast<double>(ns) : 0.0, nd ? diff / static_cast<double>(nd) : 0.0};
}

std::string serialize_model(const GroundingModel& model) {
  std::ostringstream out;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "k " << model.k << '\n';
  out << "dims " << model.transform.cols() << ' ' << model.transform.rows() << '\n';
  out << "mean";
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) out << ' ' << hex(model.mean[i]);
  out << "\nscale";
  for (Eigen::Index i = 0; i < model.scale.size(); ++i) out << ' ' << hex(model.scale[i]);
  out << '\n';
  for (Eigen::Index r = 0; r < model.transform.rows(); ++r) {
    out << "row";
    for (Eigen::Index c = 0; c < model.transform.cols(); ++c) out << ' ' << hex(model.transform(r, c));
    out << '\n';
  }
  out << "references " << model.references.size() << '\n';
  for (const auto& ref : model.references) {
    out << (ref.label ? to_string(*ref.label) : "none") << ' ' << ref.shape << ' ' << ref.orientation << ' '
        << ref.trace_id;
    for (Eigen::Index i = 0; i < ref.vector.size(); ++i) out << ' ' << hex(ref.vector[i]);
    out << '\n';
  }
  return out.str();
}

GroundingModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) throw Error(ErrorCode::Parse, "grounding model: expected '" + word + "'");
  };
  auto number = [&]() {
    std::string tok;
    if (!(in >> tok)) throw Error(ErrorCode::Parse, "grounding model: truncated");
    return unhex(tok);
  };
  expect(kModelMagic);
  int version = 0;
  if (!(in >> version) || version != kModelVersion) throw Error(ErrorCode::Parse, "grounding model: bad version");
  GroundingModel model;
  expect("k");
  in >> model.k;
  expect("dims");
  Eigen::Index features = 0;
  Eigen::Index dim = 0;
  if (!(in >> features >> dim) || features <= 0 || dim <= 0) throw Error(ErrorCode::Parse, "grounding model: bad dims");
  model.mean.resize(features);
  model.scale.resize(features);
  model.transform.resize(dim, features);
  expect("mean");
  for (Eigen::Index i = 0; i < features; ++i) model.mean[i] = number();
  expect("scale");
  for (Eigen::Index i = 0; i < features; ++i) model.scale[i] = number();
  for (Eigen::Index r = 0; r < dim; ++r) {
    expect("row");
    for (Eigen::Index c = 0; c < features; ++c) model.transform(r, c) = number();
  }
  expect("references");
  std::size_t count = 0;
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    BehaviorEmbedding e;
    std::string label;
    if (!(in >> label >> e.shape >> e.orientation >> e.trace_id)) throw Error(ErrorCode::Parse, "grounding model: truncated");
    if (label != "none") e.label = parse_label(label);
    e.vector.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) e.vector[k] = number();
    model.references.push_back(std::move(e));
  }
  return model;
}

void save_model(const GroundingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << serialize_model(model);
}

GroundingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace stackeval
