#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "tuning/tuning.hpp"

namespace artpipe::tuning {

using nlohmann::json;
namespace cls = artpipe::classifiers;

namespace {

enum class DimType { Fixed, List, LogUniform, Uniform, IntRange };

struct Dimension {
  std::string name;
  DimType type = DimType::Fixed;
  std::vector<json> values;  // Fixed: one value; List: candidates
  double lo = 0.0, hi = 0.0;
};

struct Space {
  std::string kind;
  std::vector<Dimension> dims;  // key order
};

[[noreturn]] void bad_space(const std::string& what) { fail(ErrorCode::InvalidArgument, "search space: " + what); }

std::pair<double, double> parse_range(const std::string& name, const json& range) {
  if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
    bad_space("range for '" + name + "' must be [lo, hi]");
  const double lo = range[0].get<double>(), hi = range[1].get<double>();
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) bad_space("range for '" + name + "' needs lo <= hi");
  return {lo, hi};
}

Dimension parse_dimension(const std::string& name, const json& value, bool allow_distributions) {
  Dimension dim;
  dim.name = name;
  if (value.is_array()) {
    if (value.empty()) bad_space("list for '" + name + "' is empty");
    dim.type = DimType::List;
    dim.values.assign(value.begin(), value.end());
    return dim;
  }
  if (value.is_object()) {
    if (value.size() != 1) bad_space("distribution for '" + name + "' must have exactly one key");
    if (!allow_distributions) bad_space("'" + name + "' uses a distribution, which grid search does not accept");
    const auto& [key, range] = *value.items().begin();
    std::tie(dim.lo, dim.hi) = parse_range(name, range);
    if (key == "log_uniform") {
      if (dim.lo <= 0.0) bad_space("log_uniform range for '" + name + "' must be positive");
      dim.type = DimType::LogUniform;
    } else if (key == "uniform") {
      dim.type = DimType::Uniform;
    } else if (key == "int_range") {
      if (dim.lo != std::floor(dim.lo) || dim.hi != std::floor(dim.hi))
        bad_space("int_range bounds for '" + name + "' must be integers");
      dim.type = DimType::IntRange;
    } else {
      bad_space("unknown distribution '" + key + "' for '" + name + "'");
    }
    return dim;
  }
  dim.values = {value};
  return dim;
}

std::vector<Space> parse_spaces(std::string_view text, bool allow_distributions) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_space(std::string("not valid JSON: ") + e.what());
  }
  if (root.is_object()) root = json::array({root});
  if (!root.is_array() || root.empty()) bad_space("expected an object or a nonempty array of objects");
  std::vector<Space> spaces;
  for (const auto& entry : root) {
    if (!entry.is_object()) bad_space("each entry must be an object");
    for (const auto& [key, v] : entry.items())
      if (key != "kind" && key != "params") bad_space("unknown key '" + key + "'");
    if (!entry.contains("kind") || !entry["kind"].is_string()) bad_space("each entry needs a string \"kind\"");
    Space space;
    space.kind = std::string(cls::kind_name(cls::parse_kind(entry["kind"].get<std::string>())));
    if (entry.contains("params")) {
      if (!entry["params"].is_object()) bad_space("\"params\" must be an object");
      for (const auto& [name, value] : entry["params"].items())
        space.dims.push_back(parse_dimension(name, value, allow_distributions));
    }
    spaces.push_back(std::move(space));
  }
  return spaces;
}

// Canonical spec JSON for one assignment; validation happens here so a bad
// value is reported before any fitting starts.
std::string make_config(const Space& space, const std::vector<json>& values) {
  json obj;
  obj["kind"] = space.kind;
  for (std::size_t i = 0; i < space.dims.size(); ++i) obj[space.dims[i].name] = values[i];
  return cls::ClassifierSpec::from_json(obj.dump()).to_json();
}

struct GridPoint {
  std::size_t space = 0;
  std::vector<std::size_t> index;  // per dimension, into the list values
  std::string config;
};

std::vector<GridPoint> expand_grid(const std::vector<Space>& spaces) {
  std::vector<GridPoint> points;
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const auto& dims = spaces[s].dims;
    std::vector<std::size_t> index(dims.size(), 0);
    for (;;) {
      std::vector<json> values;
      for (std::size_t i = 0; i < dims.size(); ++i) values.push_back(dims[i].values[index[i]]);
      points.push_back({s, index, make_config(spaces[s], values)});
      bool carry = true;
      for (std::size_t i = dims.size(); carry && i-- > 0;) {
        if (++index[i] < dims[i].values.size())
          carry = false;
        else
          index[i] = 0;
      }
      if (carry) break;
    }
  }
  return points;
}

json sample_value(const Dimension& dim, Rng& rng) {
  switch (dim.type) {
    case DimType::Fixed: return dim.values[0];
    case DimType::List: return dim.values[uniform_index(rng, dim.values.size())];
    case DimType::LogUniform: return std::exp(uniform(rng, std::log(dim.lo), std::log(dim.hi)));
    case DimType::Uniform: return uniform(rng, dim.lo, dim.hi);
    case DimType::IntRange: {
      const auto span = static_cast<std::size_t>(dim.hi - dim.lo) + 1;
      return static_cast<std::int64_t>(dim.lo) + static_cast<std::int64_t>(uniform_index(rng, span));
    }
  }
  return nullptr;
}

// Hyper-parameters that take continuous values and can be refined between grid points.
bool is_real_parameter(std::string_view kind, std::string_view name) {
  static const std::set<std::pair<std::string_view, std::string_view>> real = {
      {"svm", "C"},          {"svm", "gamma"}, {"svm", "tol"},          {"logreg", "l2"},
      {"logreg", "lr"},      {"gaussian_nb", "var_floor"},             {"forest", "feature_subsample"},
      {"gbt", "eta"},        {"gbt", "lambda"}};
  return real.contains({kind, name});
}

// `count` points from `from` to `to` inclusive; geometric when the coarse
// values are positive and span at least a decade.
std::vector<double> refine_points(double from, double to, bool geometric, std::size_t count) {
  std::vector<double> out{from};
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(geometric ? std::exp(std::log(from) + t * (std::log(to) - std::log(from)))
                            : from + t * (to - from));
  }
  out.push_back(to);
  return out;
}

constexpr std::size_t kRefinePoints = 5;

Trial run_trial(std::size_t id, std::string stage, const std::string& config, const TrialRunner& run) {
  Trial trial;
  trial.id = id;
  trial.stage = std::move(stage);
  trial.spec = cls::ClassifierSpec::from_json(config);
  const auto start = std::chrono::steady_clock::now();
  trial.cv = run(trial.spec);
  trial.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trial;
}

TrialRunner cv_runner(const dataset::FeatureMatrix& data, const SearchOptions& options) {
  return [&data, options](const cls::ClassifierSpec& spec) {
    return cross_validate(spec, data, options.folds, options.seed);
  };
}

std::size_t best_trial(const std::vector<Trial>& trials) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i)
    if (trials[i].cv.mean > trials[best].cv.mean) best = i;
  return best;
}

// Refined grid spanning one coarse step from the best point toward its
// better-scoring neighbour, for each real-valued list parameter.
std::vector<std::string> refinement(const std::vector<Space>& spaces, const std::vector<GridPoint>& points,
                                    const std::vector<Trial>& trials, std::size_t best) {
  const auto& point = points[best];
  const auto& space = spaces[point.space];
  std::map<std::string, double> mean_of;
  for (std::size_t i = 0; i < points.size(); ++i) mean_of.emplace(points[i].config, trials[i].cv.mean);

  std::vector<json> base;
  for (std::size_t i = 0; i < space.dims.size(); ++i) base.push_back(space.dims[i].values[point.index[i]]);

  std::vector<std::vector<json>> axes;
  for (std::size_t i = 0; i < space.dims.size(); ++i) {
    const auto& dim = space.dims[i];
    axes.push_back({base[i]});
    if (dim.type != DimType::List || !is_real_parameter(space.kind, dim.name) || !base[i].is_number()) continue;
    std::vector<double> numeric;
    for (const auto& v : dim.values)
      if (v.is_number()) numeric.push_back(v.get<double>());
    std::sort(numeric.begin(), numeric.end());
    numeric.erase(std::unique(numeric.begin(), numeric.end()), numeric.end());
    if (numeric.size() < 2) continue;
    const double at = base[i].get<double>();
    const auto pos = static_cast<std::size_t>(std::lower_bound(numeric.begin(), numeric.end(), at) - numeric.begin());

    auto neighbour_mean = [&](double value) {
      auto values = base;
      values[i] = value;
      auto it = mean_of.find(make_config(space, values));
      return it == mean_of.end() ? -1.0 : it->second;
    };
    std::optional<double> target;
    double target_mean = -std::numeric_limits<double>::infinity();
    if (pos > 0) {
      target = numeric[pos - 1];
      target_mean = neighbour_mean(*target);
    }
    if (pos + 1 < numeric.size() && neighbour_mean(numeric[pos + 1]) > target_mean) target = numeric[pos + 1];

    const bool geometric = numeric.front() > 0.0 && numeric.back() / numeric.front() >= 10.0;
    axes[i].clear();
    for (double v : refine_points(at, *target, geometric, kRefinePoints)) axes[i].push_back(v);
  }

  std::vector<std::string> configs;
  std::set<std::string> seen;
  for (const auto& p : points) seen.insert(p.config);
  std::vector<std::size_t> index(axes.size(), 0);
  for (bool done = false; !done;) {
    std::vector<json> values;
    for (std::size_t i = 0; i < axes.size(); ++i) values.push_back(axes[i][index[i]]);
    auto config = make_config(space, values);
    if (seen.insert(config).second) configs.push_back(std::move(config));
    done = true;
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++index[i] < axes[i].size()) {
        done = false;
        break;
      }
      index[i] = 0;
    }
  }
  return configs;
}

}  // namespace

std::vector<std::string> grid_configurations(std::string_view space_json) {
  std::vector<std::string> out;
  for (auto& p : expand_grid(parse_spaces(space_json, false))) out.push_back(std::move(p.config));
  return out;
}

std::vector<std::string> sample_configurations(std::string_view space_json, std::size_t budget, std::uint64_t seed) {
  const auto spaces = parse_spaces(space_json, true);
  Rng rng(derive_seed(seed, 0x5a3c));
  std::vector<std::string> out;
  for (std::size_t t = 0; t < budget; ++t) {
    const auto& space = spaces[spaces.size() == 1 ? 0 : uniform_index(rng, spaces.size())];
    std::vector<json> values;
    for (const auto& dim : space.dims) values.push_back(sample_value(dim, rng));
    out.push_back(make_config(space, values));
  }
  return out;
}

SearchResult grid_search(std::string_view space_json, bool gradual, const TrialRunner& run) {
  const auto spaces = parse_spaces(space_json, false);
  const auto points = expand_grid(spaces);
  SearchResult result;
  for (const auto& p : points) result.trials.push_back(run_trial(result.trials.size(), "grid", p.config, run));
  if (gradual) {
    const auto coarse_best = best_trial(result.trials);
    for (const auto& config : refinement(spaces, points, result.trials, coarse_best))
      result.trials.push_back(run_trial(result.trials.size(), "refine", config, run));
  }
  result.best = best_trial(result.trials);
  return result;
}

SearchResult random_search(std::string_view space_json, std::size_t budget, std::uint64_t seed,
                           const TrialRunner& run) {
  require(budget >= 1, "random search budget must be at least 1");
  SearchResult result;
  for (const auto& config : sample_configurations(space_json, budget, seed))
    result.trials.push_back(run_trial(result.trials.size(), "random", config, run));
  result.best = best_trial(result.trials);
  return result;
}

SearchResult grid_search(std::string_view space_json, const dataset::FeatureMatrix& data,
                         const SearchOptions& options) {
  return grid_search(space_json, options.gradual, cv_runner(data, options));
}

SearchResult random_search(std::string_view space_json, std::size_t budget, const dataset::FeatureMatrix& data,
                           const SearchOptions& options) {
  return random_search(space_json, budget, options.seed, cv_runner(data, options));
}

}  // namespace artpipe::tuning
