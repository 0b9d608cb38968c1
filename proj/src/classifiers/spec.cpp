#include <cmath>
#include <json.hpp>
#include <set>

#include "classifiers/classifiers.hpp"
#include "common/error.hpp"

namespace artpipe::classifiers {

using nlohmann::json;

namespace {

std::string_view kernel_name(KernelType type) {
  switch (type) {
    case KernelType::Linear: return "linear";
    case KernelType::Rbf: return "rbf";
    case KernelType::Poly: return "poly";
  }
  return "rbf";
}

KernelType parse_kernel(const std::string& name) {
  if (name == "linear") return KernelType::Linear;
  if (name == "rbf") return KernelType::Rbf;
  if (name == "poly") return KernelType::Poly;
  fail(ErrorCode::InvalidArgument, "unknown kernel '" + name + "' (expected linear, rbf or poly)");
}

class Reader {
 public:
  Reader(const json& object, std::string_view kind) : object_(object), kind_(kind) {}

  double real(const char* key, double fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) bad(key, "a number");
    return v->get<double>();
  }

  std::size_t count(const char* key, std::size_t fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    return as_count(key, *v);
  }

  std::optional<std::size_t> optional_count(const char* key, std::optional<std::size_t> fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (v->is_null()) return std::nullopt;
    return as_count(key, *v);
  }

  bool flag(const char* key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad(key, "a boolean");
    return v->get<bool>();
  }

  const json* take(const char* key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : object_.items())
      if (key != "kind" && !seen_.contains(key))
        fail(ErrorCode::InvalidArgument, "unknown parameter '" + key + "' for classifier " + std::string(kind_));
  }

  [[noreturn]] void bad(const char* key, const char* expected) const {
    fail(ErrorCode::InvalidArgument,
         std::string(kind_) + " parameter '" + key + "' must be " + expected);
  }

 private:
  std::size_t as_count(const char* key, const json& v) const {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x >= 0.0 && x == std::floor(x) && x < 1e15) return static_cast<std::size_t>(x);
    }
    bad(key, "a non-negative integer");
  }

  const json& object_;
  std::string_view kind_;
  std::set<std::string> seen_;
};

json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::Svm: return "svm";
    case Kind::Knn: return "knn";
    case Kind::GaussianNb: return "gaussian_nb";
    case Kind::Logreg: return "logreg";
    case Kind::Tree: return "tree";
    case Kind::Forest: return "forest";
    case Kind::Adaboost: return "adaboost";
    case Kind::Gbt: return "gbt";
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  for (std::uint32_t k = 0; k <= static_cast<std::uint32_t>(Kind::Gbt); ++k)
    if (kind_name(static_cast<Kind>(k)) == name) return static_cast<Kind>(k);
  fail(ErrorCode::InvalidArgument,
       "unknown classifier kind '" + std::string(name) +
           "' (expected svm, knn, gaussian_nb, logreg, tree, forest, adaboost or gbt)");
}

ClassifierSpec ClassifierSpec::defaults(Kind kind) {
  ClassifierSpec spec;
  switch (kind) {
    case Kind::Svm: spec.params = SvmParams{}; break;
    case Kind::Knn: spec.params = KnnParams{}; break;
    case Kind::GaussianNb: spec.params = GaussianNbParams{}; break;
    case Kind::Logreg: spec.params = LogregParams{}; break;
    case Kind::Tree: spec.params = TreeParams{}; break;
    case Kind::Forest: spec.params = ForestParams{}; break;
    case Kind::Adaboost: spec.params = AdaboostParams{}; break;
    case Kind::Gbt: spec.params = GbtParams{}; break;
  }
  return spec;
}

void ClassifierSpec::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  switch (kind()) {
    case Kind::Svm: {
      const auto& p = std::get<SvmParams>(params);
      require(positive(p.c), "svm: C must be positive");
      require(!p.gamma || positive(*p.gamma), "svm: gamma must be positive or \"scale\"");
      require(p.degree >= 1, "svm: degree must be at least 1");
      require(positive(p.tol), "svm: tol must be positive");
      require(positive(p.max_iter_factor), "svm: max_iter_factor must be positive");
      break;
    }
    case Kind::Knn: {
      const auto k = std::get<KnnParams>(params).k;
      require(k >= 1 && k % 2 == 1, "knn: k must be an odd integer >= 1, got " + std::to_string(k));
      break;
    }
    case Kind::GaussianNb:
      require(positive(std::get<GaussianNbParams>(params).var_floor), "gaussian_nb: var_floor must be positive");
      break;
    case Kind::Logreg: {
      const auto& p = std::get<LogregParams>(params);
      require(p.l2 >= 0.0 && std::isfinite(p.l2), "logreg: l2 must be non-negative");
      require(positive(p.lr), "logreg: lr must be positive");
      break;
    }
    case Kind::Tree: {
      const auto& p = std::get<TreeParams>(params);
      require(p.min_samples_leaf >= 1, "tree: min_samples_leaf must be at least 1");
      break;
    }
    case Kind::Forest: {
      const auto& p = std::get<ForestParams>(params);
      require(p.n_trees >= 1, "forest: n_trees must be at least 1");
      require(p.min_samples_leaf >= 1, "forest: min_samples_leaf must be at least 1");
      require(p.feature_subsample > 0.0 && p.feature_subsample <= 1.0,
              "forest: feature_subsample must lie in (0, 1]");
      break;
    }
    case Kind::Adaboost: {
      const auto& p = std::get<AdaboostParams>(params);
      require(p.n_rounds >= 1, "adaboost: n_rounds must be at least 1");
      require(p.stump_depth >= 1, "adaboost: stump_depth must be at least 1");
      break;
    }
    case Kind::Gbt: {
      const auto& p = std::get<GbtParams>(params);
      require(p.n_rounds >= 1, "gbt: n_rounds must be at least 1");
      require(p.eta >= 0.0 && std::isfinite(p.eta), "gbt: eta must be non-negative");
      require(p.lambda >= 0.0 && std::isfinite(p.lambda), "gbt: lambda must be non-negative");
      require(p.max_depth >= 1, "gbt: max_depth must be at least 1");
      break;
    }
  }
}

std::string ClassifierSpec::to_json() const {
  json j;
  j["kind"] = std::string(kind_name(kind()));
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SvmParams>) {
          j["C"] = p.c;
          j["gamma"] = p.gamma ? json(*p.gamma) : json("scale");
          j["kernel"] = std::string(kernel_name(p.kernel));
          if (p.kernel == KernelType::Poly) j["degree"] = p.degree;
          j["tol"] = p.tol;
          j["max_iter_factor"] = p.max_iter_factor;
        } else if constexpr (std::is_same_v<P, KnnParams>) {
          j["k"] = p.k;
        } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
          j["var_floor"] = p.var_floor;
        } else if constexpr (std::is_same_v<P, LogregParams>) {
          j["l2"] = p.l2;
          j["lr"] = p.lr;
          j["iters"] = p.iters;
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          j["max_depth"] = optional_json(p.max_depth);
          j["min_samples_leaf"] = p.min_samples_leaf;
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          j["n_trees"] = p.n_trees;
          j["max_depth"] = optional_json(p.max_depth);
          j["min_samples_leaf"] = p.min_samples_leaf;
          j["feature_subsample"] = p.feature_subsample;
          j["bootstrap"] = p.bootstrap;
        } else if constexpr (std::is_same_v<P, AdaboostParams>) {
          j["n_rounds"] = p.n_rounds;
          j["stump_depth"] = p.stump_depth;
        } else {
          j["n_rounds"] = p.n_rounds;
          j["eta"] = p.eta;
          j["lambda"] = p.lambda;
          j["max_depth"] = p.max_depth;
        }
      },
      params);
  return j.dump();
}

ClassifierSpec ClassifierSpec::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, std::string("classifier spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "classifier spec must be a JSON object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string())
    fail(ErrorCode::InvalidArgument, "classifier spec needs a string \"kind\"");
  const Kind kind = parse_kind(kind_it->get<std::string>());
  ClassifierSpec spec = defaults(kind);
  Reader r(j, kind_name(kind));
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SvmParams>) {
          p.c = r.real("C", p.c);
          if (const json* g = r.take("gamma")) {
            if (g->is_string() && g->get<std::string>() == "scale")
              p.gamma.reset();
            else if (g->is_number())
              p.gamma = g->get<double>();
            else
              r.bad("gamma", "a number or \"scale\"");
          }
          if (const json* k = r.take("kernel")) {
            if (!k->is_string()) r.bad("kernel", "a string");
            p.kernel = parse_kernel(k->get<std::string>());
          }
          p.degree = static_cast<int>(r.count("degree", static_cast<std::size_t>(p.degree)));
          p.tol = r.real("tol", p.tol);
          p.max_iter_factor = r.real("max_iter_factor", p.max_iter_factor);
        } else if constexpr (std::is_same_v<P, KnnParams>) {
          p.k = r.count("k", p.k);
        } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
          p.var_floor = r.real("var_floor", p.var_floor);
        } else if constexpr (std::is_same_v<P, LogregParams>) {
          p.l2 = r.real("l2", p.l2);
          p.lr = r.real("lr", p.lr);
          p.iters = r.count("iters", p.iters);
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          p.max_depth = r.optional_count("max_depth", p.max_depth);
          p.min_samples_leaf = r.count("min_samples_leaf", p.min_samples_leaf);
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          p.n_trees = r.count("n_trees", p.n_trees);
          p.max_depth = r.optional_count("max_depth", p.max_depth);
          p.min_samples_leaf = r.count("min_samples_leaf", p.min_samples_leaf);
          p.feature_subsample = r.real("feature_subsample", p.feature_subsample);
          p.bootstrap = r.flag("bootstrap", p.bootstrap);
        } else if constexpr (std::is_same_v<P, AdaboostParams>) {
          p.n_rounds = r.count("n_rounds", p.n_rounds);
          p.stump_depth = r.count("stump_depth", p.stump_depth);
        } else {
          p.n_rounds = r.count("n_rounds", p.n_rounds);
          p.eta = r.real("eta", p.eta);
          p.lambda = r.real("lambda", p.lambda);
          p.max_depth = r.count("max_depth", p.max_depth);
        }
      },
      spec.params);
  r.finish();
  spec.validate();
  return spec;
}

}  // namespace artpipe::classifiers
