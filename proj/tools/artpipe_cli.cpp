// artpipe command-line front end. Talks to the library through the C API only.
#include <artpipe/artpipe.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  artpipe_status status;
  std::string message;
};

void check(artpipe_status status) {
  if (status != ARTPIPE_OK) throw Failure{status, artpipe_last_error()};
}

[[noreturn]] void invalid(const std::string& message) { throw Failure{ARTPIPE_ERR_INVALID_ARGUMENT, message}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImageSet = std::unique_ptr<artpipe_image_set, Deleter<artpipe_image_set, artpipe_image_set_free>>;
using Backbone = std::unique_ptr<artpipe_backbone, Deleter<artpipe_backbone, artpipe_backbone_free>>;
using History = std::unique_ptr<artpipe_history, Deleter<artpipe_history, artpipe_history_free>>;
using Features = std::unique_ptr<artpipe_features, Deleter<artpipe_features, artpipe_features_free>>;
using Classifier = std::unique_ptr<artpipe_classifier, Deleter<artpipe_classifier, artpipe_classifier_free>>;
using Trials = std::unique_ptr<artpipe_trials, Deleter<artpipe_trials, artpipe_trials_free>>;
using Report = std::unique_ptr<artpipe_report, Deleter<artpipe_report, artpipe_report_free>>;

ImageSet load_images(const std::string& path) {
  artpipe_image_set* raw = nullptr;
  check(artpipe_image_set_load(path.c_str(), &raw));
  return ImageSet(raw);
}

Features load_features(const std::string& path) {
  artpipe_features* raw = nullptr;
  check(artpipe_features_read(path.c_str(), &raw));
  return Features(raw);
}

std::string sha256_of(const std::string& path) {
  char hex[65];
  check(artpipe_sha256_file(path.c_str(), hex, sizeof hex));
  return hex;
}

std::string sha256_text(const std::string& text) {
  char hex[65];
  check(artpipe_sha256_bytes(text.data(), text.size(), hex, sizeof hex));
  return hex;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// `@path` reads the text from a file, anything else is taken literally.
std::string inline_or_file(const std::string& value) {
  if (value.empty() || value[0] != '@') return value;
  std::ifstream in(value.substr(1));
  if (!in) throw Failure{ARTPIPE_ERR_IO, "cannot open " + value.substr(1)};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{ARTPIPE_ERR_IO, "cannot create directory " + dir + ": " + ec.message()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{ARTPIPE_ERR_IO, "cannot write " + path};
}

// Run record: flags, seeds, input fingerprint, emitted artifacts with hashes.
class Manifest {
 public:
  explicit Manifest(std::string command) : started_(utc_now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = artpipe_version();
    doc_["config"] = json::object();
    doc_["seeds"] = json::object();
    doc_["artifacts"] = json::array();
  }

  json& config() { return doc_["config"]; }
  json& seeds() { return doc_["seeds"]; }
  json& summary() { return doc_["summary"]; }
  void fingerprint(const std::string& hash) { doc_["dataset_fingerprint"] = hash; }
  void artifact(const std::string& path) { doc_["artifacts"].push_back({{"path", path}, {"sha256", sha256_of(path)}}); }

  void write(const std::string& path) {
    doc_["started_at"] = started_;
    doc_["finished_at"] = utc_now();
    write_text(path, doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::string started_;
};

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      widths.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      invalid("--widths must be a comma-separated list of positive integers, got '" + text + "'");
    }
  }
  if (widths.empty()) invalid("--widths must not be empty");
  return widths;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string root, out;
  std::size_t min_count = 270, size = 256;
  double train = 0.6, val = 0.2, test = 0.2;
  std::uint64_t seed = 0;
};

void run_ingest(const IngestArgs& a) {
  Manifest manifest("ingest");
  manifest.config() = {{"root", a.root}, {"out", a.out}, {"min_count", a.min_count}, {"size", a.size},
                       {"train", a.train}, {"val", a.val}, {"test", a.test}};
  manifest.seeds()["split"] = a.seed;

  artpipe_ingest_options options{a.min_count, a.size, a.size};
  artpipe_image_set* raw = nullptr;
  check(artpipe_ingest(a.root.c_str(), &options, &raw));
  ImageSet all(raw);
  const std::size_t n = artpipe_image_set_size(all.get());
  std::vector<std::uint8_t> assignment(n);
  artpipe_image_set *tr = nullptr, *va = nullptr, *te = nullptr;
  check(artpipe_image_set_split(all.get(), a.train, a.val, a.test, a.seed, &tr, &va, &te, assignment.data()));
  ImageSet train(tr), val(va), test(te);

  ensure_directory(a.out);
  const fs::path dir(a.out);
  const std::string splits_path = (dir / "splits.csv").string();
  static const char* kPart[] = {"train", "val", "test"};
  std::string splits = "path,class,split\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::string path = artpipe_image_set_path(all.get(), i);
    if (path.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : path) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      path = q + "\"";
    }
    splits += path + "," + artpipe_image_set_class_name(all.get(), artpipe_image_set_label(all.get(), i)) + "," +
              kPart[assignment[i]] + "\n";
  }
  write_text(splits_path, splits);

  std::string fingerprint_input;
  for (const auto& [name, set] : {std::pair{"train.arti", train.get()}, {"val.arti", val.get()}, {"test.arti", test.get()}}) {
    const std::string path = (dir / name).string();
    check(artpipe_image_set_save(set, path.c_str()));
    manifest.artifact(path);
    fingerprint_input += sha256_of(path) + "\n";
  }
  manifest.artifact(splits_path);
  manifest.fingerprint(sha256_text(fingerprint_input));

  json counts = json::object();
  const std::size_t k = artpipe_image_set_class_count(all.get());
  std::vector<std::size_t> per_class(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++per_class[artpipe_image_set_label(all.get(), i)];
  for (std::size_t c = 0; c < k; ++c) counts[artpipe_image_set_class_name(all.get(), c)] = per_class[c];
  manifest.summary() = {{"images", n},
                        {"classes", k},
                        {"class_counts", counts},
                        {"train", artpipe_image_set_size(train.get())},
                        {"val", artpipe_image_set_size(val.get())},
                        {"test", artpipe_image_set_size(test.get())}};
  manifest.write((dir / "manifest.json").string());
  std::cout << "ingested " << n << " images in " << k << " classes (train " << artpipe_image_set_size(train.get())
            << ", val " << artpipe_image_set_size(val.get()) << ", test " << artpipe_image_set_size(test.get())
            << ")\n";
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::size_t classes = 20, per_class = 100, size = 64;
  double noise = 0.08;
  std::uint64_t seed = 7;
};

void run_synth(const SynthArgs& a) {
  artpipe_image_set* raw = nullptr;
  check(artpipe_synthetic(a.classes, a.per_class, a.size, a.noise, a.seed, &raw));
  ImageSet set(raw);
  ensure_directory(a.out);
  check(artpipe_image_set_write_directory(set.get(), a.out.c_str()));
  std::cout << "wrote " << artpipe_image_set_size(set.get()) << " images to " << a.out << "\n";
}

// ---------------------------------------------------------------- train-backbone

struct TrainArgs {
  std::string train, val, out_dir;
  std::string widths = "8,16,32,64,128";
  std::size_t head_hidden = 0;
  double dropout = 0.0;
  artpipe_train_config cfg = artpipe_train_defaults();
  bool no_augment = false;
  bool quiet = false;
};

void epoch_report(size_t epoch, double loss, double train_acc, double val_acc, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::cerr << "epoch " << epoch + 1 << ": loss " << loss << ", train accuracy " << train_acc;
  if (!std::isnan(val_acc)) std::cerr << ", val accuracy " << val_acc;
  std::cerr << "\n";
}

void run_train(TrainArgs a) {
  Manifest manifest("train-backbone");
  const auto widths = parse_widths(a.widths);
  a.cfg.augment = a.no_augment ? 0 : 1;
  manifest.config() = {{"train", a.train},
                       {"val", a.val},
                       {"out_dir", a.out_dir},
                       {"widths", widths},
                       {"head_hidden", a.head_hidden},
                       {"dropout", a.dropout},
                       {"epochs", a.cfg.epochs},
                       {"batch_size", a.cfg.batch_size},
                       {"lr", a.cfg.learning_rate},
                       {"label_smoothing", a.cfg.label_smoothing},
                       {"freeze_layers", a.cfg.frozen_layers},
                       {"warmup_layers", a.cfg.warmup_layers},
                       {"warmup_epochs", a.cfg.warmup_epochs},
                       {"augment", !a.no_augment},
                       {"crop_padding", a.cfg.crop_padding},
                       {"flip_prob", a.cfg.flip_probability}};
  manifest.seeds()["train"] = a.cfg.seed;

  ImageSet train = load_images(a.train);
  ImageSet val;
  if (!a.val.empty()) val = load_images(a.val);
  manifest.fingerprint(sha256_of(a.train));

  artpipe_backbone_config bc{widths.data(),
                             widths.size(),
                             a.head_hidden,
                             a.dropout,
                             artpipe_image_set_class_count(train.get()),
                             artpipe_image_set_height(train.get()),
                             artpipe_image_set_width(train.get())};
  artpipe_backbone* raw = nullptr;
  check(artpipe_backbone_create(&bc, a.cfg.seed, &raw));
  Backbone model(raw);

  artpipe_history* hist = nullptr;
  check(artpipe_backbone_train(model.get(), train.get(), val.get(), &a.cfg, epoch_report, &a.quiet, &hist));
  History history(hist);

  ensure_directory(a.out_dir);
  const fs::path dir(a.out_dir);
  const std::string ckpt = (dir / "backbone.artb").string();
  const std::string hist_path = (dir / "history.csv").string();
  check(artpipe_backbone_save(model.get(), ckpt.c_str()));
  check(artpipe_history_write_csv(history.get(), hist_path.c_str()));
  manifest.artifact(ckpt);
  manifest.artifact(hist_path);
  const std::size_t epochs = artpipe_history_epochs(history.get());
  double loss = NAN, acc = NAN, vacc = NAN;
  if (epochs > 0) check(artpipe_history_get(history.get(), epochs - 1, &loss, &acc, &vacc));
  manifest.summary() = {{"epochs", epochs},
                        {"parameters", artpipe_backbone_parameter_count(model.get())},
                        {"feature_dim", artpipe_backbone_feature_dim(model.get())},
                        {"final_train_loss", loss},
                        {"final_train_accuracy", acc}};
  if (!std::isnan(vacc)) manifest.summary()["final_val_accuracy"] = vacc;
  manifest.write((dir / "manifest.json").string());
  std::cout << "trained " << epochs << " epochs; checkpoint " << ckpt << "\n";
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string checkpoint, images, import_csv, out;
};

void run_extract(const ExtractArgs& a) {
  Manifest manifest("extract");
  manifest.config() = {{"checkpoint", a.checkpoint}, {"images", a.images}, {"import_csv", a.import_csv}, {"out", a.out}};
  artpipe_features* raw = nullptr;
  if (!a.import_csv.empty()) {
    if (!a.checkpoint.empty() || !a.images.empty()) invalid("--import-csv cannot be combined with --checkpoint/--images");
    check(artpipe_features_import_csv(a.import_csv.c_str(), &raw));
    manifest.fingerprint(sha256_of(a.import_csv));
  } else {
    if (a.checkpoint.empty() || a.images.empty()) invalid("extract needs --checkpoint and --images, or --import-csv");
    artpipe_backbone* bb = nullptr;
    check(artpipe_backbone_load(a.checkpoint.c_str(), &bb));
    Backbone model(bb);
    ImageSet images = load_images(a.images);
    check(artpipe_backbone_extract(model.get(), images.get(), &raw));
    manifest.fingerprint(sha256_of(a.images));
  }
  Features features(raw);
  check(artpipe_features_write(features.get(), a.out.c_str()));
  manifest.artifact(a.out);
  manifest.summary() = {{"rows", artpipe_features_rows(features.get())},
                        {"dim", artpipe_features_dim(features.get())},
                        {"classes", artpipe_features_class_count(features.get())}};
  manifest.write(a.out + ".manifest.json");
  std::cout << "wrote " << artpipe_features_rows(features.get()) << " x " << artpipe_features_dim(features.get())
            << " features to " << a.out << "\n";
}

// ---------------------------------------------------------------- tune

struct TuneArgs {
  std::string features, space, mode = "grid", out;
  bool gradual = false, no_timing = false;
  std::size_t budget = 20, folds = 5;
  std::uint64_t seed = 0;
};

void run_tune(const TuneArgs& a) {
  Manifest manifest("tune");
  const std::string space = inline_or_file(a.space);
  manifest.config() = {{"features", a.features}, {"space", json::parse(space, nullptr, false)},
                       {"mode", a.mode},         {"gradual", a.gradual},
                       {"budget", a.budget},     {"folds", a.folds},
                       {"out", a.out},           {"timing", !a.no_timing}};
  if (manifest.config()["space"].is_discarded()) manifest.config()["space"] = space;
  manifest.seeds()["cv"] = a.seed;
  Features data = load_features(a.features);
  manifest.fingerprint(sha256_of(a.features));

  artpipe_trials* raw = nullptr;
  if (a.mode == "grid") {
    check(artpipe_search_grid(space.c_str(), data.get(), a.folds, a.seed, a.gradual ? 1 : 0, &raw));
  } else {
    if (a.gradual) invalid("--gradual applies to grid search only");
    check(artpipe_search_random(space.c_str(), a.budget, data.get(), a.folds, a.seed, &raw));
  }
  Trials trials(raw);
  check(artpipe_trials_write_csv(trials.get(), a.out.c_str(), a.no_timing ? 0 : 1));
  manifest.artifact(a.out);
  const std::size_t best = artpipe_trials_best(trials.get());
  manifest.summary() = {{"trials", artpipe_trials_count(trials.get())},
                        {"best_trial", best},
                        {"best_spec", json::parse(artpipe_trials_spec(trials.get(), best))},
                        {"best_mean", artpipe_trials_mean(trials.get(), best)},
                        {"best_std", artpipe_trials_std(trials.get(), best)}};
  manifest.write(a.out + ".manifest.json");
  std::cout << "best trial " << best << " of " << artpipe_trials_count(trials.get()) << ": "
            << artpipe_trials_spec(trials.get(), best) << " mean " << artpipe_trials_mean(trials.get(), best)
            << " std " << artpipe_trials_std(trials.get(), best) << "\n";
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string features, spec, out;
  std::uint64_t seed = 0;
};

void run_fit(const FitArgs& a) {
  Manifest manifest("fit");
  const std::string spec = inline_or_file(a.spec);
  manifest.config() = {{"features", a.features}, {"spec", spec}, {"out", a.out}};
  manifest.seeds()["fit"] = a.seed;
  Features data = load_features(a.features);
  manifest.fingerprint(sha256_of(a.features));
  artpipe_classifier* raw = nullptr;
  check(artpipe_classifier_fit(spec.c_str(), data.get(), a.seed, &raw));
  Classifier model(raw);
  check(artpipe_classifier_save(model.get(), a.out.c_str()));
  manifest.artifact(a.out);
  manifest.write(a.out + ".manifest.json");
  std::cout << "fitted " << artpipe_classifier_kind(model.get()) << " on " << artpipe_features_rows(data.get())
            << " rows; model " << a.out << "\n";
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model, features, out_dir, classifier_name, dataset_name;
};

void run_evaluate(const EvaluateArgs& a) {
  Manifest manifest("evaluate");
  manifest.config() = {{"model", a.model}, {"features", a.features}, {"out_dir", a.out_dir}};
  artpipe_classifier* raw = nullptr;
  check(artpipe_classifier_load(a.model.c_str(), &raw));
  Classifier model(raw);
  Features test = load_features(a.features);
  manifest.fingerprint(sha256_of(a.features));
  artpipe_report* rep = nullptr;
  check(artpipe_evaluate(model.get(), test.get(), &rep));
  Report report(rep);
  ensure_directory(a.out_dir);
  const std::string classifier = a.classifier_name.empty() ? artpipe_classifier_kind(model.get()) : a.classifier_name;
  const std::string dataset = a.dataset_name.empty() ? fs::path(a.features).stem().string() : a.dataset_name;
  check(artpipe_report_write(report.get(), a.out_dir.c_str(), classifier.c_str(), dataset.c_str()));
  const fs::path dir(a.out_dir);
  for (const char* name : {"report.csv", "confusion.csv", "confusion.svg", "confused_pairs.csv"})
    manifest.artifact((dir / name).string());
  manifest.summary() = {{"accuracy", artpipe_report_accuracy(report.get())},
                        {"rows", artpipe_features_rows(test.get())}};
  manifest.write((dir / "manifest.json").string());
  std::cout << "accuracy " << artpipe_report_accuracy(report.get()) << " on " << artpipe_features_rows(test.get())
            << " rows\n";
}

// ---------------------------------------------------------------- scatter

struct ScatterArgs {
  std::string input, out;
};

void run_scatter(const ScatterArgs& a) {
  check(artpipe_scatter_svg(a.input.c_str(), a.out.c_str()));
  std::cout << "wrote " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"artpipe: painter attribution from CNN features and classical classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(artpipe_version()));

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Read <root>/<artist>/<images>, split train/val/test, write archives");
  c_ingest->add_option("--root", ingest.root, "Dataset root with one directory per artist")->required();
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();
  c_ingest->add_option("--min-count", ingest.min_count, "Drop artists with fewer images")->capture_default_str();
  c_ingest->add_option("--size", ingest.size, "Images are resized to size x size")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_ingest->add_option("--train", ingest.train, "Train fraction")->capture_default_str();
  c_ingest->add_option("--val", ingest.val, "Validation fraction")->capture_default_str();
  c_ingest->add_option("--test", ingest.test, "Test fraction")->capture_default_str();
  c_ingest->add_option("--seed", ingest.seed, "Split seed")->capture_default_str();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic painter dataset as PNG files");
  c_synth->add_option("--out", synth.out, "Output root")->required();
  c_synth->add_option("--classes", synth.classes, "Number of artists")->capture_default_str();
  c_synth->add_option("--per-class", synth.per_class, "Images per artist")->capture_default_str();
  c_synth->add_option("--size", synth.size, "Image side in pixels")->capture_default_str();
  c_synth->add_option("--noise", synth.noise, "Pixel noise standard deviation")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-backbone", "Train the CNN backbone and its softmax head");
  c_train->add_option("--train", train.train, "Training image archive (.arti)")->required();
  c_train->add_option("--val", train.val, "Validation image archive (.arti)");
  c_train->add_option("--out-dir", train.out_dir, "Directory for backbone.artb, history.csv, manifest.json")
      ->required();
  c_train->add_option("--widths", train.widths, "Channels of each conv block, comma-separated")
      ->capture_default_str();
  c_train->add_option("--head-hidden", train.head_hidden, "Hidden units in the head (0 = linear)")
      ->capture_default_str();
  c_train->add_option("--dropout", train.dropout, "Dropout rate before the head")->capture_default_str();
  c_train->add_option("--epochs", train.cfg.epochs, "Training epochs")->capture_default_str();
  c_train->add_option("--batch-size", train.cfg.batch_size, "Mini-batch size")->capture_default_str();
  c_train->add_option("--lr", train.cfg.learning_rate, "SGD learning rate")->capture_default_str();
  c_train->add_option("--label-smoothing", train.cfg.label_smoothing, "Label smoothing epsilon")
      ->capture_default_str();
  c_train->add_option("--freeze-layers", train.cfg.frozen_layers, "Bottom layer groups kept frozen after warm-up")
      ->capture_default_str();
  c_train->add_option("--warmup-layers", train.cfg.warmup_layers, "Top layer groups trained during warm-up")
      ->capture_default_str();
  c_train->add_option("--warmup-epochs", train.cfg.warmup_epochs, "Warm-up length in epochs")
      ->capture_default_str();
  c_train->add_flag("--no-augment", train.no_augment, "Disable crop and flip augmentation");
  c_train->add_option("--crop-padding", train.cfg.crop_padding, "Reflect padding for random crops")
      ->capture_default_str();
  c_train->add_option("--flip-prob", train.cfg.flip_probability, "Horizontal flip probability")
      ->capture_default_str();
  c_train->add_option("--seed", train.cfg.seed, "Initialization and shuffling seed")->capture_default_str();
  c_train->add_flag("--quiet", train.quiet, "Do not print per-epoch progress");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Write backbone features (.artf) or convert a feature CSV");
  c_extract->add_option("--checkpoint", extract.checkpoint, "Backbone checkpoint (.artb)");
  c_extract->add_option("--images", extract.images, "Image archive (.arti)");
  c_extract->add_option("--import-csv", extract.import_csv, "CSV with header label,f0,...,f{d-1}");
  c_extract->add_option("--out", extract.out, "Output feature file (.artf)")->required();

  TuneArgs tune;
  auto* c_tune = app.add_subcommand("tune", "Cross-validated grid or random hyper-parameter search");
  c_tune->add_option("--features", tune.features, "Training features (.artf)")->required();
  c_tune->add_option("--space", tune.space, "Search space JSON, inline or @file")->required();
  c_tune->add_option("--mode", tune.mode, "grid or random")
      ->capture_default_str()
      ->check(CLI::IsMember({"grid", "random"}));
  c_tune->add_flag("--gradual", tune.gradual, "Grid only: add one refinement round around the coarse optimum");
  c_tune->add_option("--budget", tune.budget, "Random search trial count")->capture_default_str();
  c_tune->add_option("--folds", tune.folds, "Cross-validation folds")->capture_default_str();
  c_tune->add_option("--seed", tune.seed, "Fold and sampling seed")->capture_default_str();
  c_tune->add_option("--out", tune.out, "Trial log CSV")->required();
  c_tune->add_flag("--no-timing", tune.no_timing, "Leave the seconds column empty for reproducible logs");

  FitArgs fitargs;
  auto* c_fit = app.add_subcommand("fit", "Fit one classifier on a feature file");
  c_fit->add_option("--features", fitargs.features, "Training features (.artf)")->required();
  c_fit->add_option("--spec", fitargs.spec, "Classifier spec JSON, inline or @file")->required();
  c_fit->add_option("--seed", fitargs.seed, "Seed for randomized classifiers")->capture_default_str();
  c_fit->add_option("--out", fitargs.out, "Model file (.artc)")->required();

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Accuracy, per-class metrics and confusion analysis");
  c_eval->add_option("--model", evaluate.model, "Model file (.artc)")->required();
  c_eval->add_option("--features", evaluate.features, "Test features (.artf)")->required();
  c_eval->add_option("--out-dir", evaluate.out_dir, "Directory for the report files")->required();
  c_eval->add_option("--classifier-name", evaluate.classifier_name, "Name in report.csv (default: model kind)");
  c_eval->add_option("--dataset-name", evaluate.dataset_name, "Name in report.csv (default: feature file stem)");

  ScatterArgs scatter;
  auto* c_scatter = app.add_subcommand("scatter", "Scatter plot of accuracy against number of artists");
  c_scatter->add_option("--input", scatter.input, "CSV rows label,n_artists,accuracy,group")->required();
  c_scatter->add_option("--out", scatter.out, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_ingest->parsed()) run_ingest(ingest);
    else if (c_synth->parsed()) run_synth(synth);
    else if (c_train->parsed()) run_train(train);
    else if (c_extract->parsed()) run_extract(extract);
    else if (c_tune->parsed()) run_tune(tune);
    else if (c_fit->parsed()) run_fit(fitargs);
    else if (c_eval->parsed()) run_evaluate(evaluate);
    else if (c_scatter->parsed()) run_scatter(scatter);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ARTPIPE_ERR_INTERNAL;
  }
  return 0;
}
