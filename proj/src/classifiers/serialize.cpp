#include <cmath>

#include "classifiers/classifiers.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

namespace {

constexpr std::string_view kMagic = "ARTC";
constexpr std::uint32_t kVersion = 1;

void put_matrix(ByteWriter& out, const Matrix& m) {
  out.u64(static_cast<std::uint64_t>(m.rows()));
  out.u64(static_cast<std::uint64_t>(m.cols()));
  out.array(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

Matrix get_matrix(ByteReader& in, std::uint64_t rows_expected, std::uint64_t cols_expected, bool any_rows) {
  const auto rows = in.u64();
  const auto cols = in.u64();
  if ((!any_rows && rows != rows_expected) || cols != cols_expected) in.corrupt("matrix shape mismatch");
  if (cols > 0 && rows > in.remaining() / (cols * sizeof(double))) in.corrupt("matrix larger than payload");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.array(std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

void put_doubles(ByteWriter& out, const std::vector<double>& v) {
  out.array(std::span<const double>(v));
}

std::vector<double> get_doubles(ByteReader& in, std::size_t n) {
  if (n > in.remaining() / sizeof(double)) in.corrupt("array larger than payload");
  std::vector<double> v(n);
  in.array(std::span<double>(v));
  return v;
}

void put_tree(ByteWriter& out, const DecisionTree& tree) {
  out.u32(static_cast<std::uint32_t>(tree.nodes.size()));
  for (const auto& node : tree.nodes) {
    out.put<std::int32_t>(node.feature);
    out.f64(node.threshold);
    out.u32(node.left);
    out.u32(node.right);
    out.u32(static_cast<std::uint32_t>(node.value.size()));
    put_doubles(out, node.value);
  }
}

// Leaves must carry `value_size` entries; internal nodes point forward to
// existing nodes so traversal always terminates.
DecisionTree get_tree(ByteReader& in, std::size_t dim, std::size_t value_size) {
  DecisionTree tree;
  const auto count = in.u32();
  if (count == 0) in.corrupt("empty tree");
  for (std::uint32_t i = 0; i < count; ++i) {
    TreeNode node;
    node.feature = in.get<std::int32_t>();
    node.threshold = in.f64();
    node.left = in.u32();
    node.right = in.u32();
    node.value = get_doubles(in, in.u32());
    if (node.is_leaf()) {
      if (node.value.size() != value_size) in.corrupt("tree leaf has the wrong value size");
    } else if (static_cast<std::size_t>(node.feature) >= dim || node.left <= i || node.right <= i ||
               node.left >= count || node.right >= count) {
      in.corrupt("tree node " + std::to_string(i) + " is malformed");
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

}  // namespace

std::vector<char> encode_model(const ClassifierModel& model) {
  ByteWriter out;
  out.raw(kMagic);
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(model.kind()));
  out.u32(static_cast<std::uint32_t>(model.num_classes));
  out.u32(static_cast<std::uint32_t>(model.dim));
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SvmModel>) {
          out.u32(static_cast<std::uint32_t>(m.machines.size()));
          for (const auto& s : m.machines) {
            out.u32(static_cast<std::uint32_t>(s.kernel.type));
            out.f64(s.kernel.gamma);
            out.put<std::int32_t>(s.kernel.degree);
            out.f64(s.bias);
            put_matrix(out, s.support_vectors);
            put_doubles(out, s.coef);
          }
        } else if constexpr (std::is_same_v<M, KnnModel>) {
          out.u64(m.k);
          put_matrix(out, m.x);
          out.array(std::span<const std::uint32_t>(m.y));
        } else if constexpr (std::is_same_v<M, GaussianNbModel>) {
          put_matrix(out, m.mean);
          put_matrix(out, m.variance);
          put_doubles(out, m.log_prior);
        } else if constexpr (std::is_same_v<M, LogregModel>) {
          put_matrix(out, m.weights);
          put_doubles(out, m.bias);
        } else if constexpr (std::is_same_v<M, TreeModel>) {
          put_tree(out, m.tree);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          out.u32(static_cast<std::uint32_t>(m.trees.size()));
          for (const auto& t : m.trees) put_tree(out, t);
        } else if constexpr (std::is_same_v<M, AdaboostModel>) {
          out.u32(static_cast<std::uint32_t>(m.learners.size()));
          for (std::size_t i = 0; i < m.learners.size(); ++i) {
            put_tree(out, m.learners[i]);
            out.f64(m.alphas[i]);
            out.f64(m.errors[i]);
          }
        } else {
          out.f64(m.eta);
          put_doubles(out, m.base_score);
          out.u32(static_cast<std::uint32_t>(m.rounds.size()));
          for (const auto& round : m.rounds)
            for (const auto& t : round) put_tree(out, t);
        }
      },
      model.state);
  return out.bytes();
}

ClassifierModel decode_model(std::span<const char> bytes) {
  ByteReader in(bytes, "classifier model");
  expect_header(in, kMagic, kVersion);
  const auto kind_raw = in.u32();
  if (kind_raw > static_cast<std::uint32_t>(Kind::Gbt)) in.corrupt("unknown classifier kind " + std::to_string(kind_raw));
  ClassifierModel model;
  model.num_classes = in.u32();
  model.dim = in.u32();
  const auto k = model.num_classes, d = model.dim;
  if (k < 2 || d == 0) in.corrupt("invalid class count or dimension");

  switch (static_cast<Kind>(kind_raw)) {
    case Kind::Svm: {
      SvmModel m;
      const auto machines = in.u32();
      if (machines != (k == 2 ? 1u : k)) in.corrupt("wrong number of SVM machines");
      for (std::uint32_t i = 0; i < machines; ++i) {
        SvmBinaryState s;
        const auto type = in.u32();
        if (type > static_cast<std::uint32_t>(KernelType::Poly)) in.corrupt("unknown kernel type");
        s.kernel.type = static_cast<KernelType>(type);
        s.kernel.gamma = in.f64();
        s.kernel.degree = in.get<std::int32_t>();
        s.bias = in.f64();
        s.support_vectors = get_matrix(in, 0, d, true);
        s.coef = get_doubles(in, static_cast<std::size_t>(s.support_vectors.rows()));
        m.machines.push_back(std::move(s));
      }
      model.state = std::move(m);
      break;
    }
    case Kind::Knn: {
      KnnModel m;
      m.k = in.u64();
      m.x = get_matrix(in, 0, d, true);
      m.y.resize(static_cast<std::size_t>(m.x.rows()));
      if (m.x.rows() == 0 || m.k == 0) in.corrupt("empty k-NN model");
      in.array(std::span<std::uint32_t>(m.y));
      for (auto label : m.y)
        if (label >= k) in.corrupt("k-NN label out of range");
      model.state = std::move(m);
      break;
    }
    case Kind::GaussianNb: {
      GaussianNbModel m;
      m.mean = get_matrix(in, k, d, false);
      m.variance = get_matrix(in, k, d, false);
      m.log_prior = get_doubles(in, k);
      model.state = std::move(m);
      break;
    }
    case Kind::Logreg: {
      LogregModel m;
      m.weights = get_matrix(in, k, d, false);
      m.bias = get_doubles(in, k);
      model.state = std::move(m);
      break;
    }
    case Kind::Tree: model.state = TreeModel{get_tree(in, d, k)}; break;
    case Kind::Forest: {
      ForestModel m;
      const auto count = in.u32();
      if (count == 0) in.corrupt("empty forest");
      for (std::uint32_t i = 0; i < count; ++i) m.trees.push_back(get_tree(in, d, k));
      model.state = std::move(m);
      break;
    }
    case Kind::Adaboost: {
      AdaboostModel m;
      const auto count = in.u32();
      for (std::uint32_t i = 0; i < count; ++i) {
        m.learners.push_back(get_tree(in, d, k));
        m.alphas.push_back(in.f64());
        m.errors.push_back(in.f64());
      }
      model.state = std::move(m);
      break;
    }
    case Kind::Gbt: {
      GbtModel m;
      m.eta = in.f64();
      m.base_score = get_doubles(in, k);
      const auto rounds = in.u32();
      for (std::uint32_t r = 0; r < rounds; ++r) {
        std::vector<DecisionTree> trees;
        for (std::size_t c = 0; c < k; ++c) trees.push_back(get_tree(in, d, 1));
        m.rounds.push_back(std::move(trees));
      }
      model.state = std::move(m);
      break;
    }
  }
  in.expect_end();
  return model;
}

void save_model(const std::string& path, const ClassifierModel& model) { write_file(path, encode_model(model)); }

ClassifierModel load_model(const std::string& path) { return decode_model(read_file(path)); }

}  // namespace artpipe::classifiers
