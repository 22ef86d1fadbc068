#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>

#include "resub/betweenness.hpp"
#include "resub/models.hpp"

namespace resub {

// A historical plan used as supervision: one network plus the assignment that
// was (or could have been) operated on it.
struct RefSolution {
  std::shared_ptr<const Instance> instance;
  Assignment assignment;
};

// Categorical vocabulary with index 0 reserved for tokens unseen in training.
struct CategoricalEncoder {
  std::vector<std::string> names;  // sorted; token names[i] encodes as i + 1

  int32_t encode(const std::string& token) const;
  int32_t cardinality() const { return static_cast<int32_t>(names.size()) + 1; }
};

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
  double scale(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

// Min-max ranges of one instance's numeric arc attributes; every instance is
// normalized against itself so weekly pools stay comparable.
struct InstanceScale {
  ValueRange volume, tod, tow, miles;
  static InstanceScale of(const Instance& inst);
};

struct FeatureVector {
  int32_t origin = 0;
  int32_t destination = 0;
  double volume = 0.0;
  int32_t origin_scheduler = 0;
  int32_t destination_scheduler = 0;
  double time_of_day = 0.0;
  double time_of_week = 0.0;
  double miles = 0.0;
  int32_t size_class = 0;
};

struct FeatureEncoder {
  CategoricalEncoder origin, destination, scheduler, size_class;
  // Pooled training ranges, kept for reference; encoding uses the instance's
  // own scale.
  ValueRange volume, tod, tow, miles;

  FeatureVector encode_arc(const Instance& inst, const InstanceScale& scale, int32_t arc) const;
};

enum class Split : int8_t { Train = 0, Validation = 1, Test = 2 };

struct TrainingExample {
  FeatureVector x;
  std::vector<double> y;  // distribution over TrainingSet::resources
};

struct TrainingSet {
  std::vector<std::string> resources;  // label order (sorted union)
  FeatureEncoder encoder;
  std::vector<TrainingExample> examples;
  std::vector<Split> split;
  std::vector<std::string> arc_keys;  // "<instance digest>/<arc id>", diagnostics

  std::vector<int32_t> indices_of(Split s) const;
};

// Deduplicates identical references, groups them by instance, derives one
// example per (instance, arc) with frequency labels, and splits 60/20/20
// stratified by each example's modal resource.
TrainingSet build_training_set(const std::vector<RefSolution>& refs, uint64_t seed);

struct TrainConfig {
  std::vector<int32_t> hidden = {128, 64};
  int32_t embedding_dim = 8;
  double learning_rate = 1e-3;
  double dropout = 0.3;
  int32_t epochs = 50;
  int32_t batch_size = 32;
  int32_t eval_every = 10;         // validation cadence, in epochs
  int32_t early_stop_declines = 2; // consecutive validation drops that halt
  int32_t early_stop_kappa = 3;    // TOP_k watched by early stopping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  static TrainConfig from_json(const json& j);
  json to_json() const;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual const std::vector<std::string>& resources() const = 0;
  virtual const FeatureEncoder& encoder() const = 0;
  virtual std::vector<double> predict(const FeatureVector& x) const = 0;
};

// Feedforward scorer: learned embeddings for the categorical fields, two ReLU
// hidden layers, softmax over the resource classes.  Parameters live in one
// flat vector so the optimizer and the finite-difference check share a layout.
class ScorerModel : public Predictor {
 public:
  ScorerModel() = default;
  ScorerModel(FeatureEncoder encoder, std::vector<std::string> resources,
              const TrainConfig& config, uint64_t init_seed);

  const std::vector<std::string>& resources() const override { return resource_ids_; }
  std::vector<double> predict(const FeatureVector& x) const override;
  std::vector<double> predict_arc(const Instance& inst, int32_t arc) const;

  const FeatureEncoder& encoder() const override { return encoder_; }
  const std::vector<int32_t>& hidden() const { return hidden_; }
  int32_t embedding_dim() const { return embedding_dim_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  json to_json() const;
  static ScorerModel from_json(const json& j);
  void save_file(const std::string& path) const;
  static ScorerModel load_file(const std::string& path);

  json meta;  // training provenance: seed, epochs run, validation history

 private:
  friend struct ScorerNet;
  FeatureEncoder encoder_;
  std::vector<std::string> resource_ids_;
  std::vector<int32_t> hidden_;
  int32_t embedding_dim_ = 8;
  std::vector<double> params_;
};

ScorerModel train_scorer(const TrainingSet& ts, const TrainConfig& config, uint64_t seed);

// Mean cross entropy over `examples` with dropout off, plus the gradient in
// the model's flat parameter layout.  Exposed for the finite-difference test.
double loss_and_gradient(const ScorerModel& model, const TrainingSet& ts,
                         const std::vector<int32_t>& examples, std::vector<double>& grad);

// Share of label mass captured by each example's kappa highest-scored
// resources (ties broken by ascending resource position).
double top_kappa_metric(const std::vector<std::vector<double>>& predictions,
                        const std::vector<std::vector<double>>& labels, int32_t kappa);

double split_top_kappa(const Predictor& p, const TrainingSet& ts, Split which, int32_t kappa);

// Empirical (origin, destination, size class) resource frequencies with a
// global backoff for unseen keys.
class FrequencyBaseline : public Predictor {
 public:
  const std::vector<std::string>& resources() const override { return resource_ids_; }
  const FeatureEncoder& encoder() const override { return encoder_; }
  std::vector<double> predict(const FeatureVector& x) const override;

  friend FrequencyBaseline frequency_baseline(const std::vector<RefSolution>& refs);
  friend FrequencyBaseline baseline_from_examples(const TrainingSet& ts,
                                                  const std::vector<int32_t>& examples);

 private:
  FeatureEncoder encoder_;
  std::vector<std::string> resource_ids_;
  std::map<std::array<int32_t, 3>, std::vector<double>> table_;
  std::vector<double> global_;
};

FrequencyBaseline frequency_baseline(const std::vector<RefSolution>& refs);
FrequencyBaseline baseline_from_examples(const TrainingSet& ts,
                                         const std::vector<int32_t>& examples);

// Candidate filtering: keep each arc's kappa_a best-scored compatible
// resources and always retain the initial one.
CandidateSets top_kappa_candidates(const Instance& inst, const Predictor& p,
                                   const std::vector<int32_t>& kappa_per_arc);

}  // namespace resub
