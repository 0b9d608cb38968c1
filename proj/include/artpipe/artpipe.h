/* artpipe: painter attribution pipeline, C interface.
 *
 * Every fallible call returns an artpipe_status; on failure the message is
 * available from artpipe_last_error() (per thread, valid until the next
 * failing call on that thread). Objects are opaque handles released with the
 * matching *_free function; free functions accept NULL. */
#ifndef ARTPIPE_ARTPIPE_H
#define ARTPIPE_ARTPIPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ARTPIPE_BUILDING_LIBRARY)
#define ARTPIPE_API __attribute__((visibility("default")))
#else
#define ARTPIPE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum artpipe_status {
  ARTPIPE_OK = 0,
  ARTPIPE_ERR_INVALID_ARGUMENT = 1,
  ARTPIPE_ERR_IO = 2,
  ARTPIPE_ERR_FORMAT = 3,
  ARTPIPE_ERR_DATA = 4,
  ARTPIPE_ERR_CONVERGENCE = 5,
  ARTPIPE_ERR_INTERNAL = 6
} artpipe_status;

ARTPIPE_API const char* artpipe_last_error(void);
ARTPIPE_API const char* artpipe_status_name(artpipe_status status);
ARTPIPE_API const char* artpipe_version(void);

typedef struct artpipe_image_set artpipe_image_set;
typedef struct artpipe_backbone artpipe_backbone;
typedef struct artpipe_history artpipe_history;
typedef struct artpipe_features artpipe_features;
typedef struct artpipe_classifier artpipe_classifier;
typedef struct artpipe_trials artpipe_trials;
typedef struct artpipe_report artpipe_report;

/* ---- image sets ---------------------------------------------------------- */

typedef struct artpipe_ingest_options {
  size_t min_count;
  size_t height;
  size_t width;
} artpipe_ingest_options;

ARTPIPE_API artpipe_ingest_options artpipe_ingest_defaults(void);

/* Reads <root>/<artist>/<image files>, keeping artists with >= min_count images. */
ARTPIPE_API artpipe_status artpipe_ingest(const char* root, const artpipe_ingest_options* options,
                                          artpipe_image_set** out);

/* Procedural painter-like classes for tests and demos. */
ARTPIPE_API artpipe_status artpipe_synthetic(size_t classes, size_t per_class, size_t size, double noise,
                                             uint64_t seed, artpipe_image_set** out);
ARTPIPE_API artpipe_status artpipe_image_set_write_directory(const artpipe_image_set* set, const char* root);

ARTPIPE_API artpipe_status artpipe_image_set_load(const char* path, artpipe_image_set** out);
ARTPIPE_API artpipe_status artpipe_image_set_save(const artpipe_image_set* set, const char* path);
ARTPIPE_API void artpipe_image_set_free(artpipe_image_set* set);

ARTPIPE_API size_t artpipe_image_set_size(const artpipe_image_set* set);
ARTPIPE_API size_t artpipe_image_set_height(const artpipe_image_set* set);
ARTPIPE_API size_t artpipe_image_set_width(const artpipe_image_set* set);
ARTPIPE_API size_t artpipe_image_set_class_count(const artpipe_image_set* set);
/* NULL when out of range. */
ARTPIPE_API const char* artpipe_image_set_class_name(const artpipe_image_set* set, size_t index);
ARTPIPE_API uint32_t artpipe_image_set_label(const artpipe_image_set* set, size_t index);
ARTPIPE_API const char* artpipe_image_set_path(const artpipe_image_set* set, size_t index);

/* Stratified split. `assignment`, when not NULL, receives size() entries
 * (0 = train, 1 = val, 2 = test). */
ARTPIPE_API artpipe_status artpipe_image_set_split(const artpipe_image_set* set, double train_fraction,
                                                   double val_fraction, double test_fraction, uint64_t seed,
                                                   artpipe_image_set** train, artpipe_image_set** val,
                                                   artpipe_image_set** test, uint8_t* assignment);

/* ---- backbone ------------------------------------------------------------ */

typedef struct artpipe_backbone_config {
  const size_t* block_widths; /* output channels of each conv block */
  size_t block_count;
  size_t head_hidden; /* 0 = linear head */
  double dropout;
  size_t num_classes;
  size_t input_height;
  size_t input_width;
} artpipe_backbone_config;

typedef struct artpipe_train_config {
  size_t epochs;
  size_t batch_size;
  double learning_rate;
  double label_smoothing;
  size_t frozen_layers;
  size_t warmup_layers;
  size_t warmup_epochs;
  uint64_t seed;
  int augment;
  size_t crop_padding;
  double flip_probability;
} artpipe_train_config;

ARTPIPE_API artpipe_train_config artpipe_train_defaults(void);

ARTPIPE_API artpipe_status artpipe_backbone_create(const artpipe_backbone_config* config, uint64_t seed,
                                                   artpipe_backbone** out);
ARTPIPE_API void artpipe_backbone_free(artpipe_backbone* backbone);
ARTPIPE_API size_t artpipe_backbone_group_count(const artpipe_backbone* backbone);
ARTPIPE_API size_t artpipe_backbone_feature_dim(const artpipe_backbone* backbone);
ARTPIPE_API size_t artpipe_backbone_parameter_count(const artpipe_backbone* backbone);

/* Called after every epoch; val_accuracy is NaN without a validation set. */
typedef void (*artpipe_epoch_callback)(size_t epoch, double train_loss, double train_accuracy,
                                       double val_accuracy, void* user);

/* Fits the input normalizer on `train`, then trains. `val` may be NULL.
 * `history` may be NULL. */
ARTPIPE_API artpipe_status artpipe_backbone_train(artpipe_backbone* backbone, const artpipe_image_set* train,
                                                  const artpipe_image_set* val, const artpipe_train_config* config,
                                                  artpipe_epoch_callback callback, void* user,
                                                  artpipe_history** history);
ARTPIPE_API artpipe_status artpipe_backbone_save(const artpipe_backbone* backbone, const char* path);
ARTPIPE_API artpipe_status artpipe_backbone_load(const char* path, artpipe_backbone** out);
ARTPIPE_API artpipe_status artpipe_backbone_extract(const artpipe_backbone* backbone, const artpipe_image_set* images,
                                                    artpipe_features** out);
/* Accuracy of the softmax head itself on labelled images. */
ARTPIPE_API artpipe_status artpipe_backbone_head_accuracy(const artpipe_backbone* backbone,
                                                          const artpipe_image_set* images, double* accuracy);

ARTPIPE_API size_t artpipe_history_epochs(const artpipe_history* history);
ARTPIPE_API artpipe_status artpipe_history_get(const artpipe_history* history, size_t epoch, double* train_loss,
                                               double* train_accuracy, double* val_accuracy);
/* Columns: epoch,train_loss,train_accuracy,val_accuracy */
ARTPIPE_API artpipe_status artpipe_history_write_csv(const artpipe_history* history, const char* path);
ARTPIPE_API void artpipe_history_free(artpipe_history* history);

/* ---- feature matrices ---------------------------------------------------- */

ARTPIPE_API artpipe_status artpipe_features_read(const char* path, artpipe_features** out);
ARTPIPE_API artpipe_status artpipe_features_write(const artpipe_features* features, const char* path);
/* CSV with header label,f0,...,f{d-1}. */
ARTPIPE_API artpipe_status artpipe_features_import_csv(const char* path, artpipe_features** out);
ARTPIPE_API void artpipe_features_free(artpipe_features* features);
ARTPIPE_API size_t artpipe_features_rows(const artpipe_features* features);
ARTPIPE_API size_t artpipe_features_dim(const artpipe_features* features);
ARTPIPE_API size_t artpipe_features_class_count(const artpipe_features* features);
ARTPIPE_API const char* artpipe_features_class_name(const artpipe_features* features, size_t index);
ARTPIPE_API uint32_t artpipe_features_label(const artpipe_features* features, size_t row);
/* Row-major n*d values. */
ARTPIPE_API const float* artpipe_features_data(const artpipe_features* features);

/* ---- classifiers --------------------------------------------------------- */

/* spec_json, e.g. {"kind":"svm","C":10,"gamma":"scale","kernel":"rbf"} */
ARTPIPE_API artpipe_status artpipe_classifier_fit(const char* spec_json, const artpipe_features* train,
                                                  uint64_t seed, artpipe_classifier** out);
/* `out` receives rows() class indices. */
ARTPIPE_API artpipe_status artpipe_classifier_predict(const artpipe_classifier* model,
                                                      const artpipe_features* features, uint32_t* out);
ARTPIPE_API artpipe_status artpipe_classifier_save(const artpipe_classifier* model, const char* path);
ARTPIPE_API artpipe_status artpipe_classifier_load(const char* path, artpipe_classifier** out);
ARTPIPE_API const char* artpipe_classifier_kind(const artpipe_classifier* model);
ARTPIPE_API void artpipe_classifier_free(artpipe_classifier* model);

/* ---- hyper-parameter search ---------------------------------------------- */

/* Search space: {"kind": ..., "params": {name: value-or-list}} or an array of
 * those. Random search also accepts {"log_uniform":[lo,hi]},
 * {"uniform":[lo,hi]} and {"int_range":[lo,hi]} values. */
ARTPIPE_API artpipe_status artpipe_search_grid(const char* space_json, const artpipe_features* data, size_t folds,
                                               uint64_t seed, int gradual, artpipe_trials** out);
ARTPIPE_API artpipe_status artpipe_search_random(const char* space_json, size_t budget,
                                                 const artpipe_features* data, size_t folds, uint64_t seed,
                                                 artpipe_trials** out);
ARTPIPE_API size_t artpipe_trials_count(const artpipe_trials* trials);
ARTPIPE_API size_t artpipe_trials_best(const artpipe_trials* trials);
ARTPIPE_API const char* artpipe_trials_spec(const artpipe_trials* trials, size_t index);
ARTPIPE_API double artpipe_trials_mean(const artpipe_trials* trials, size_t index);
ARTPIPE_API double artpipe_trials_std(const artpipe_trials* trials, size_t index);
/* Columns: trial_id,kind,params_json,fold_accuracies,mean,std,seconds.
 * With include_timing = 0 the seconds column is left empty so identical
 * searches produce identical files. */
ARTPIPE_API artpipe_status artpipe_trials_write_csv(const artpipe_trials* trials, const char* path,
                                                    int include_timing);
ARTPIPE_API void artpipe_trials_free(artpipe_trials* trials);

/* ---- evaluation and plots ------------------------------------------------ */

ARTPIPE_API artpipe_status artpipe_evaluate(const artpipe_classifier* model, const artpipe_features* test,
                                            artpipe_report** out);
ARTPIPE_API double artpipe_report_accuracy(const artpipe_report* report);
ARTPIPE_API size_t artpipe_report_confusion(const artpipe_report* report, size_t true_class,
                                            size_t predicted_class);
/* Writes report.csv, confusion.csv, confusion.svg and confused_pairs.csv
 * into an existing directory. */
ARTPIPE_API artpipe_status artpipe_report_write(const artpipe_report* report, const char* out_dir,
                                                const char* classifier_name, const char* dataset_name);
ARTPIPE_API void artpipe_report_free(artpipe_report* report);

/* CSV rows label,n_artists,accuracy,group -> SVG scatter plot. */
ARTPIPE_API artpipe_status artpipe_scatter_svg(const char* csv_path, const char* svg_path);

/* SHA-256 of a file as lowercase hex into `out` (at least 65 bytes). */
ARTPIPE_API artpipe_status artpipe_sha256_file(const char* path, char* out, size_t out_size);
ARTPIPE_API artpipe_status artpipe_sha256_bytes(const void* data, size_t size, char* out, size_t out_size);

#ifdef __cplusplus
}
#endif

#endif
