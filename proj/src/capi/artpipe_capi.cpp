#include "artpipe/artpipe.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "backbone/backbone.hpp"
#include "classifiers/classifiers.hpp"
#include "common/binary_io.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/fingerprint.hpp"
#include "dataset/dataset.hpp"
#include "report/report.hpp"
#include "tuning/tuning.hpp"

namespace ds = artpipe::dataset;
namespace bb = artpipe::backbone;
namespace cls = artpipe::classifiers;
namespace tn = artpipe::tuning;

struct artpipe_image_set {
  ds::ImageSet set;
};
struct artpipe_backbone {
  bb::BackboneModel model;
};
struct artpipe_history {
  bb::TrainHistory history;
};
struct artpipe_features {
  ds::FeatureMatrix features;
};
struct artpipe_classifier {
  cls::ClassifierModel model;
};
struct artpipe_trials {
  tn::SearchResult result;
  std::vector<std::string> specs;
};
struct artpipe_report {
  tn::EvaluationReport report;
};

namespace {

thread_local std::string last_error;

class NullArgument : public artpipe::Error {
 public:
  explicit NullArgument(const char* name)
      : Error(artpipe::ErrorCode::InvalidArgument, std::string(name) + " must not be NULL") {}
};

template <typename T>
T& deref(T* p, const char* name) {
  if (!p) throw NullArgument(name);
  return *p;
}

const char* text(const char* s, const char* name) {
  if (!s) throw NullArgument(name);
  return s;
}

template <typename F>
artpipe_status guard(F&& body) {
  try {
    body();
    return ARTPIPE_OK;
  } catch (const artpipe::Error& e) {
    last_error = e.what();
    return static_cast<artpipe_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return ARTPIPE_ERR_INTERNAL;
}

template <typename Handle, typename Value>
void emit(Handle** out, Value&& value) {
  *out = new Handle{std::forward<Value>(value)};
}

}  // namespace

extern "C" {

const char* artpipe_last_error(void) { return last_error.c_str(); }

const char* artpipe_status_name(artpipe_status status) {
  switch (status) {
    case ARTPIPE_OK: return "ok";
    case ARTPIPE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ARTPIPE_ERR_IO: return "i/o error";
    case ARTPIPE_ERR_FORMAT: return "format error";
    case ARTPIPE_ERR_DATA: return "data error";
    case ARTPIPE_ERR_CONVERGENCE: return "convergence failure";
    case ARTPIPE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* artpipe_version(void) { return "0.1.0"; }

// ---- image sets

artpipe_ingest_options artpipe_ingest_defaults(void) {
  const ds::IngestOptions d;
  return {d.min_count, d.height, d.width};
}

artpipe_status artpipe_ingest(const char* root, const artpipe_ingest_options* options, artpipe_image_set** out) {
  return guard([&] {
    deref(out, "out");
    ds::IngestOptions o;
    if (options) o = {options->min_count, options->height, options->width};
    emit(out, ds::ingest_directory(text(root, "root"), o));
  });
}

artpipe_status artpipe_synthetic(size_t classes, size_t per_class, size_t size, double noise, uint64_t seed,
                                 artpipe_image_set** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, ds::synthetic_painters({classes, per_class, size, noise, seed}));
  });
}

artpipe_status artpipe_image_set_write_directory(const artpipe_image_set* set, const char* root) {
  return guard([&] { ds::write_image_directory(deref(set, "set").set, text(root, "root")); });
}

artpipe_status artpipe_image_set_load(const char* path, artpipe_image_set** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, ds::read_image_archive(text(path, "path")));
  });
}

artpipe_status artpipe_image_set_save(const artpipe_image_set* set, const char* path) {
  return guard([&] { ds::write_image_archive(text(path, "path"), deref(set, "set").set); });
}

void artpipe_image_set_free(artpipe_image_set* set) { delete set; }

size_t artpipe_image_set_size(const artpipe_image_set* set) { return set ? set->set.size() : 0; }
size_t artpipe_image_set_height(const artpipe_image_set* set) { return set ? set->set.height : 0; }
size_t artpipe_image_set_width(const artpipe_image_set* set) { return set ? set->set.width : 0; }
size_t artpipe_image_set_class_count(const artpipe_image_set* set) { return set ? set->set.class_names.size() : 0; }

const char* artpipe_image_set_class_name(const artpipe_image_set* set, size_t index) {
  return set && index < set->set.class_names.size() ? set->set.class_names[index].c_str() : nullptr;
}

uint32_t artpipe_image_set_label(const artpipe_image_set* set, size_t index) {
  return set && index < set->set.labels.size() ? set->set.labels[index] : UINT32_MAX;
}

const char* artpipe_image_set_path(const artpipe_image_set* set, size_t index) {
  return set && index < set->set.source_paths.size() ? set->set.source_paths[index].c_str() : nullptr;
}

artpipe_status artpipe_image_set_split(const artpipe_image_set* set, double train_fraction, double val_fraction,
                                       double test_fraction, uint64_t seed, artpipe_image_set** train,
                                       artpipe_image_set** val, artpipe_image_set** test, uint8_t* assignment) {
  return guard([&] {
    deref(train, "train");
    deref(val, "val");
    deref(test, "test");
    auto splits = ds::stratified_split(deref(set, "set").set, {train_fraction, val_fraction, test_fraction, seed});
    if (assignment)
      for (std::size_t i = 0; i < splits.assignment.size(); ++i)
        assignment[i] = static_cast<uint8_t>(splits.assignment[i]);
    emit(train, std::move(splits.train));
    emit(val, std::move(splits.val));
    emit(test, std::move(splits.test));
  });
}

// ---- backbone

artpipe_train_config artpipe_train_defaults(void) {
  const bb::TrainConfig d;
  return {d.epochs,         d.batch_size,    d.learning_rate, d.label_smoothing,
          d.frozen_layers,  d.warmup_layers, d.warmup_epochs, d.seed,
          d.augment.enabled, d.augment.crop_padding, d.augment.flip_probability};
}

artpipe_status artpipe_backbone_create(const artpipe_backbone_config* config, uint64_t seed,
                                       artpipe_backbone** out) {
  return guard([&] {
    deref(out, "out");
    const auto& c = deref(config, "config");
    if (c.block_count > 0 && !c.block_widths) throw NullArgument("config->block_widths");
    bb::BackboneConfig bc;
    bc.block_widths.assign(c.block_widths, c.block_widths + c.block_count);
    bc.head_hidden = c.head_hidden;
    bc.dropout_rate = c.dropout;
    bc.num_classes = c.num_classes;
    bc.input_height = c.input_height;
    bc.input_width = c.input_width;
    emit(out, bb::build_backbone(bc, seed));
  });
}

void artpipe_backbone_free(artpipe_backbone* backbone) { delete backbone; }

size_t artpipe_backbone_group_count(const artpipe_backbone* backbone) {
  return backbone ? backbone->model.config.group_count() : 0;
}
size_t artpipe_backbone_feature_dim(const artpipe_backbone* backbone) {
  return backbone ? backbone->model.config.feature_dim() : 0;
}
size_t artpipe_backbone_parameter_count(const artpipe_backbone* backbone) {
  return backbone ? backbone->model.config.parameter_count() : 0;
}

artpipe_status artpipe_backbone_train(artpipe_backbone* backbone, const artpipe_image_set* train,
                                      const artpipe_image_set* val, const artpipe_train_config* config,
                                      artpipe_epoch_callback callback, void* user, artpipe_history** history) {
  return guard([&] {
    auto& model = deref(backbone, "backbone").model;
    const auto& c = deref(config, "config");
    bb::TrainConfig tc;
    tc.epochs = c.epochs;
    tc.batch_size = c.batch_size;
    tc.learning_rate = c.learning_rate;
    tc.label_smoothing = c.label_smoothing;
    tc.frozen_layers = c.frozen_layers;
    tc.warmup_layers = c.warmup_layers;
    tc.warmup_epochs = c.warmup_epochs;
    tc.seed = c.seed;
    tc.augment.enabled = c.augment != 0;
    tc.augment.crop_padding = c.crop_padding;
    tc.augment.flip_probability = c.flip_probability;
    bb::EpochCallback on_epoch;
    if (callback)
      on_epoch = [&](std::size_t epoch, const bb::TrainHistory& h, const bb::BackboneModel&) {
        callback(epoch, h.train_loss[epoch], h.train_accuracy[epoch], h.val_accuracy[epoch], user);
      };
    auto result = bb::fit_backbone(model, deref(train, "train").set, val ? &val->set : nullptr, tc, on_epoch);
    if (history) emit(history, std::move(result));
  });
}

artpipe_status artpipe_backbone_save(const artpipe_backbone* backbone, const char* path) {
  return guard([&] { bb::save_checkpoint(text(path, "path"), deref(backbone, "backbone").model); });
}

artpipe_status artpipe_backbone_load(const char* path, artpipe_backbone** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, bb::load_checkpoint(text(path, "path")));
  });
}

artpipe_status artpipe_backbone_extract(const artpipe_backbone* backbone, const artpipe_image_set* images,
                                        artpipe_features** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, bb::extract_features(deref(backbone, "backbone").model, deref(images, "images").set));
  });
}

artpipe_status artpipe_backbone_head_accuracy(const artpipe_backbone* backbone, const artpipe_image_set* images,
                                              double* accuracy) {
  return guard([&] {
    const auto& set = deref(images, "images").set;
    deref(accuracy, "accuracy");
    if (set.size() == 0) artpipe::fail(artpipe::ErrorCode::Data, "image set is empty");
    const auto predicted = bb::predict_head(deref(backbone, "backbone").model, set);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == set.labels[i];
    *accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  });
}

size_t artpipe_history_epochs(const artpipe_history* history) { return history ? history->history.epochs() : 0; }

artpipe_status artpipe_history_get(const artpipe_history* history, size_t epoch, double* train_loss,
                                   double* train_accuracy, double* val_accuracy) {
  return guard([&] {
    const auto& h = deref(history, "history").history;
    artpipe::require(epoch < h.epochs(), "epoch out of range");
    if (train_loss) *train_loss = h.train_loss[epoch];
    if (train_accuracy) *train_accuracy = h.train_accuracy[epoch];
    if (val_accuracy) *val_accuracy = h.val_accuracy[epoch];
  });
}

artpipe_status artpipe_history_write_csv(const artpipe_history* history, const char* path) {
  return guard([&] {
    const auto& h = deref(history, "history").history;
    std::string out = "epoch,train_loss,train_accuracy,val_accuracy\n";
    for (std::size_t e = 0; e < h.epochs(); ++e)
      out += std::to_string(e + 1) + ',' + artpipe::csv::format_number(h.train_loss[e]) + ',' +
             artpipe::csv::format_number(h.train_accuracy[e]) + ',' +
             artpipe::csv::format_number(h.val_accuracy[e]) + '\n';
    artpipe::write_file(text(path, "path"), out);
  });
}

void artpipe_history_free(artpipe_history* history) { delete history; }

// ---- features

artpipe_status artpipe_features_read(const char* path, artpipe_features** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, ds::read_features(text(path, "path")));
  });
}

artpipe_status artpipe_features_write(const artpipe_features* features, const char* path) {
  return guard([&] { ds::write_features(text(path, "path"), deref(features, "features").features); });
}

artpipe_status artpipe_features_import_csv(const char* path, artpipe_features** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, ds::import_features_csv(text(path, "path")));
  });
}

void artpipe_features_free(artpipe_features* features) { delete features; }
size_t artpipe_features_rows(const artpipe_features* f) { return f ? f->features.n : 0; }
size_t artpipe_features_dim(const artpipe_features* f) { return f ? f->features.d : 0; }
size_t artpipe_features_class_count(const artpipe_features* f) { return f ? f->features.class_names.size() : 0; }

const char* artpipe_features_class_name(const artpipe_features* f, size_t index) {
  return f && index < f->features.class_names.size() ? f->features.class_names[index].c_str() : nullptr;
}

uint32_t artpipe_features_label(const artpipe_features* f, size_t row) {
  return f && row < f->features.labels.size() ? f->features.labels[row] : UINT32_MAX;
}

const float* artpipe_features_data(const artpipe_features* f) { return f ? f->features.values.data() : nullptr; }

// ---- classifiers

artpipe_status artpipe_classifier_fit(const char* spec_json, const artpipe_features* train, uint64_t seed,
                                      artpipe_classifier** out) {
  return guard([&] {
    deref(out, "out");
    const auto spec = cls::ClassifierSpec::from_json(text(spec_json, "spec_json"));
    emit(out, cls::fit(spec, deref(train, "train").features, seed));
  });
}

artpipe_status artpipe_classifier_predict(const artpipe_classifier* model, const artpipe_features* features,
                                          uint32_t* out) {
  return guard([&] {
    deref(out, "out");
    const auto& f = deref(features, "features").features;
    f.validate();
    const auto predicted = cls::predict(deref(model, "model").model, cls::to_matrix(f));
    std::copy(predicted.begin(), predicted.end(), out);
  });
}

artpipe_status artpipe_classifier_save(const artpipe_classifier* model, const char* path) {
  return guard([&] { cls::save_model(text(path, "path"), deref(model, "model").model); });
}

artpipe_status artpipe_classifier_load(const char* path, artpipe_classifier** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, cls::load_model(text(path, "path")));
  });
}

const char* artpipe_classifier_kind(const artpipe_classifier* model) {
  return model ? cls::kind_name(model->model.kind()).data() : nullptr;
}

void artpipe_classifier_free(artpipe_classifier* model) { delete model; }

// ---- search

namespace {

void emit_trials(artpipe_trials** out, tn::SearchResult result) {
  std::vector<std::string> specs;
  for (const auto& t : result.trials) specs.push_back(t.spec.to_json());
  *out = new artpipe_trials{std::move(result), std::move(specs)};
}

}  // namespace

artpipe_status artpipe_search_grid(const char* space_json, const artpipe_features* data, size_t folds, uint64_t seed,
                                   int gradual, artpipe_trials** out) {
  return guard([&] {
    deref(out, "out");
    tn::SearchOptions options{folds, seed, gradual != 0};
    emit_trials(out, tn::grid_search(text(space_json, "space_json"), deref(data, "data").features, options));
  });
}

artpipe_status artpipe_search_random(const char* space_json, size_t budget, const artpipe_features* data,
                                     size_t folds, uint64_t seed, artpipe_trials** out) {
  return guard([&] {
    deref(out, "out");
    tn::SearchOptions options{folds, seed, false};
    emit_trials(out,
                tn::random_search(text(space_json, "space_json"), budget, deref(data, "data").features, options));
  });
}

size_t artpipe_trials_count(const artpipe_trials* t) { return t ? t->result.trials.size() : 0; }
size_t artpipe_trials_best(const artpipe_trials* t) { return t ? t->result.best : 0; }

const char* artpipe_trials_spec(const artpipe_trials* t, size_t index) {
  return t && index < t->specs.size() ? t->specs[index].c_str() : nullptr;
}

double artpipe_trials_mean(const artpipe_trials* t, size_t index) {
  return t && index < t->result.trials.size() ? t->result.trials[index].cv.mean : NAN;
}

double artpipe_trials_std(const artpipe_trials* t, size_t index) {
  return t && index < t->result.trials.size() ? t->result.trials[index].cv.std : NAN;
}

artpipe_status artpipe_trials_write_csv(const artpipe_trials* trials, const char* path, int include_timing) {
  return guard(
      [&] { tn::write_trials_csv(text(path, "path"), deref(trials, "trials").result, include_timing != 0); });
}

void artpipe_trials_free(artpipe_trials* trials) { delete trials; }

// ---- evaluation

artpipe_status artpipe_evaluate(const artpipe_classifier* model, const artpipe_features* test, artpipe_report** out) {
  return guard([&] {
    deref(out, "out");
    emit(out, tn::evaluate(deref(model, "model").model, deref(test, "test").features));
  });
}

double artpipe_report_accuracy(const artpipe_report* report) { return report ? report->report.accuracy : NAN; }

size_t artpipe_report_confusion(const artpipe_report* report, size_t true_class, size_t predicted_class) {
  if (!report) return 0;
  const auto& c = report->report.confusion;
  return true_class < c.size() && predicted_class < c.size() ? c[true_class][predicted_class] : 0;
}

artpipe_status artpipe_report_write(const artpipe_report* report, const char* out_dir, const char* classifier_name,
                                    const char* dataset_name) {
  return guard([&] {
    const auto& r = deref(report, "report").report;
    const std::filesystem::path dir(text(out_dir, "out_dir"));
    if (!std::filesystem::is_directory(dir))
      artpipe::fail(artpipe::ErrorCode::Io, "output directory does not exist: " + dir.string());
    tn::write_report_csv((dir / "report.csv").string(), r, text(classifier_name, "classifier_name"),
                         text(dataset_name, "dataset_name"));
    tn::write_confusion_csv((dir / "confusion.csv").string(), r);
    const auto svg = artpipe::report::confusion_svg(r);
    artpipe::write_file((dir / "confusion.svg").string(), svg);
    tn::write_confused_pairs_csv((dir / "confused_pairs.csv").string(), r);
  });
}

void artpipe_report_free(artpipe_report* report) { delete report; }

artpipe_status artpipe_scatter_svg(const char* csv_path, const char* svg_path) {
  return guard([&] {
    const auto points = artpipe::report::read_scatter_csv(text(csv_path, "csv_path"));
    const auto svg = artpipe::report::scatter_svg(points);
    artpipe::write_file(text(svg_path, "svg_path"), svg);
  });
}

artpipe_status artpipe_sha256_file(const char* path, char* out, size_t out_size) {
  return guard([&] {
    deref(out, "out");
    artpipe::require(out_size >= 65, "output buffer needs at least 65 bytes");
    const auto hex = artpipe::sha256_file(text(path, "path"));
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

artpipe_status artpipe_sha256_bytes(const void* data, size_t size, char* out, size_t out_size) {
  return guard([&] {
    deref(out, "out");
    if (size > 0 && !data) throw NullArgument("data");
    artpipe::require(out_size >= 65, "output buffer needs at least 65 bytes");
    const auto hex = artpipe::sha256_hex({static_cast<const char*>(data), size});
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

}  // extern "C"
