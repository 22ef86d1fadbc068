#include "resub/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace resub {

int32_t CategoricalEncoder::encode(const std::string& token) const {
  auto it = std::lower_bound(names.begin(), names.end(), token);
  if (it != names.end() && *it == token)
    return static_cast<int32_t>(it - names.begin()) + 1;
  return 0;
}

InstanceScale InstanceScale::of(const Instance& inst) {
  InstanceScale s;
  bool first = true;
  for (const Arc& a : inst.arcs()) {
    if (first) {
      s.volume = {a.volume, a.volume};
      s.tod = {a.tod, a.tod};
      s.tow = {a.tow, a.tow};
      s.miles = {a.miles, a.miles};
      first = false;
      continue;
    }
    s.volume.lo = std::min(s.volume.lo, a.volume);
    s.volume.hi = std::max(s.volume.hi, a.volume);
    s.tod.lo = std::min(s.tod.lo, a.tod);
    s.tod.hi = std::max(s.tod.hi, a.tod);
    s.tow.lo = std::min(s.tow.lo, a.tow);
    s.tow.hi = std::max(s.tow.hi, a.tow);
    s.miles.lo = std::min(s.miles.lo, a.miles);
    s.miles.hi = std::max(s.miles.hi, a.miles);
  }
  return s;
}

FeatureVector FeatureEncoder::encode_arc(const Instance& inst, const InstanceScale& scale,
                                         int32_t arc) const {
  const Arc& a = inst.arcs()[arc];
  FeatureVector x;
  x.origin = origin.encode(inst.nodes()[a.from]);
  x.destination = destination.encode(inst.nodes()[a.to]);
  x.volume = scale.volume.scale(a.volume);
  x.origin_scheduler = scheduler.encode(inst.schedulers()[inst.scheduler_of_node(a.from)]);
  x.destination_scheduler = scheduler.encode(inst.schedulers()[inst.scheduler_of_node(a.to)]);
  x.time_of_day = scale.tod.scale(a.tod);
  x.time_of_week = scale.tow.scale(a.tow);
  x.miles = scale.miles.scale(a.miles);
  x.size_class = size_class.encode(a.size_class);
  return x;
}

std::vector<int32_t> TrainingSet::indices_of(Split s) const {
  std::vector<int32_t> out;
  for (size_t i = 0; i < split.size(); ++i)
    if (split[i] == s) out.push_back(static_cast<int32_t>(i));
  return out;
}

TrainingSet build_training_set(const std::vector<RefSolution>& refs, uint64_t seed) {
  if (refs.empty()) throw Error("build_training_set: no reference solutions");

  // Drop exact duplicates, then bucket the survivors by instance content.
  struct Group {
    std::shared_ptr<const Instance> instance;
    std::vector<const Assignment*> assigns;
  };
  std::vector<Group> groups;
  std::map<uint64_t, size_t> group_of;
  std::set<std::pair<uint64_t, std::string>> seen;
  for (const RefSolution& ref : refs) {
    if (!ref.instance) throw Error("build_training_set: reference without an instance");
    uint64_t h = ref.instance->content_hash();
    json amap = json::object();
    for (const auto& [k, v] : ref.assignment.to_map(*ref.instance)) amap[k] = v;
    if (!seen.insert({h, amap.dump()}).second) continue;
    auto it = group_of.find(h);
    if (it == group_of.end()) {
      group_of[h] = groups.size();
      groups.push_back({ref.instance, {&ref.assignment}});
    } else {
      groups[it->second].assigns.push_back(&ref.assignment);
    }
  }

  TrainingSet ts;
  std::set<std::string> res_union, node_union, sched_union, size_union;
  bool have_range = false;
  for (const Group& g : groups) {
    const Instance& inst = *g.instance;
    res_union.insert(inst.resources().begin(), inst.resources().end());
    node_union.insert(inst.nodes().begin(), inst.nodes().end());
    sched_union.insert(inst.schedulers().begin(), inst.schedulers().end());
    for (const Arc& a : inst.arcs()) {
      size_union.insert(a.size_class);
      if (!have_range) {
        ts.encoder.volume = {a.volume, a.volume};
        ts.encoder.tod = {a.tod, a.tod};
        ts.encoder.tow = {a.tow, a.tow};
        ts.encoder.miles = {a.miles, a.miles};
        have_range = true;
      } else {
        ts.encoder.volume.lo = std::min(ts.encoder.volume.lo, a.volume);
        ts.encoder.volume.hi = std::max(ts.encoder.volume.hi, a.volume);
        ts.encoder.tod.lo = std::min(ts.encoder.tod.lo, a.tod);
        ts.encoder.tod.hi = std::max(ts.encoder.tod.hi, a.tod);
        ts.encoder.tow.lo = std::min(ts.encoder.tow.lo, a.tow);
        ts.encoder.tow.hi = std::max(ts.encoder.tow.hi, a.tow);
        ts.encoder.miles.lo = std::min(ts.encoder.miles.lo, a.miles);
        ts.encoder.miles.hi = std::max(ts.encoder.miles.hi, a.miles);
      }
    }
  }
  ts.resources.assign(res_union.begin(), res_union.end());
  ts.encoder.origin.names.assign(node_union.begin(), node_union.end());
  ts.encoder.destination.names = ts.encoder.origin.names;
  ts.encoder.scheduler.names.assign(sched_union.begin(), sched_union.end());
  ts.encoder.size_class.names.assign(size_union.begin(), size_union.end());

  std::map<std::string, int32_t> res_pos;
  for (size_t i = 0; i < ts.resources.size(); ++i)
    res_pos[ts.resources[i]] = static_cast<int32_t>(i);

  for (const Group& g : groups) {
    const Instance& inst = *g.instance;
    InstanceScale scale = InstanceScale::of(inst);
    std::string digest = to_hex(inst.content_hash()).substr(8);
    for (int32_t a = 0; a < inst.num_arcs(); ++a) {
      TrainingExample ex;
      ex.x = ts.encoder.encode_arc(inst, scale, a);
      ex.y.assign(ts.resources.size(), 0.0);
      for (const Assignment* phi : g.assigns)
        ex.y[res_pos[inst.resources()[phi->res[a]]]] += 1.0;
      for (double& v : ex.y) v /= static_cast<double>(g.assigns.size());
      ts.examples.push_back(std::move(ex));
      ts.arc_keys.push_back(digest + "/" + inst.arcs()[a].id);
    }
  }

  // 60/20/20 split, stratified by modal resource, largest-remainder rounding.
  std::map<int32_t, std::vector<int32_t>> by_modal;
  for (size_t i = 0; i < ts.examples.size(); ++i) {
    const auto& y = ts.examples[i].y;
    int32_t modal = static_cast<int32_t>(std::max_element(y.begin(), y.end()) - y.begin());
    by_modal[modal].push_back(static_cast<int32_t>(i));
  }
  ts.split.assign(ts.examples.size(), Split::Train);
  Rng rng(mix_seed(seed, 0x59117));
  const int64_t weights[3] = {6, 2, 2};
  for (auto& [modal, idxs] : by_modal) {
    rng.shuffle(idxs);
    int64_t k = static_cast<int64_t>(idxs.size());
    int64_t base[3], rem_frac[3], assigned = 0;
    for (int s = 0; s < 3; ++s) {
      base[s] = k * weights[s] / 10;
      rem_frac[s] = k * weights[s] % 10;
      assigned += base[s];
    }
    int64_t left = k - assigned;
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return rem_frac[x] > rem_frac[y]; });
    for (int64_t i = 0; i < left; ++i) base[order[i]]++;
    int64_t at = 0;
    for (int s = 0; s < 3; ++s)
      for (int64_t i = 0; i < base[s]; ++i) ts.split[idxs[at++]] = static_cast<Split>(s);
  }
  return ts;
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int32_t>>();
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.dropout = j.value("dropout", c.dropout);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.early_stop_declines = j.value("early_stop_declines", c.early_stop_declines);
  c.early_stop_kappa = j.value("early_stop_kappa", c.early_stop_kappa);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  if (c.hidden.empty() || c.embedding_dim < 1 || c.epochs < 1 || c.batch_size < 1 ||
      c.eval_every < 1 || c.dropout < 0 || c.dropout >= 1)
    throw Error("TrainConfig: invalid settings");
  return c;
}

json TrainConfig::to_json() const {
  return json{{"hidden", hidden},
              {"embedding_dim", embedding_dim},
              {"learning_rate", learning_rate},
              {"dropout", dropout},
              {"epochs", epochs},
              {"batch_size", batch_size},
              {"eval_every", eval_every},
              {"early_stop_declines", early_stop_declines},
              {"early_stop_kappa", early_stop_kappa},
              {"adam_beta1", adam_beta1},
              {"adam_beta2", adam_beta2},
              {"adam_eps", adam_eps}};
}

// Flat-parameter layout and forward/backward passes.
struct ScorerNet {
  int32_t d, in_dim, out_dim;
  std::array<int32_t, 5> cards;   // origin, destination, o-sched, d-sched, size
  std::array<size_t, 5> emb_off;
  std::array<int32_t, 5> seg_off; // embedding segment starts inside the input
  struct Dense {
    size_t w_off, b_off;
    int32_t rows, cols;
  };
  std::vector<Dense> dense;  // hidden layers then the output layer
  size_t total = 0;

  explicit ScorerNet(const ScorerModel& m) {
    d = m.embedding_dim();
    const FeatureEncoder& e = m.encoder();
    cards = {e.origin.cardinality(), e.destination.cardinality(), e.scheduler.cardinality(),
             e.scheduler.cardinality(), e.size_class.cardinality()};
    in_dim = 5 * d + 4;
    out_dim = static_cast<int32_t>(m.resources().size());
    seg_off = {0, d, 2 * d + 1, 3 * d + 1, 4 * d + 4};
    size_t at = 0;
    for (int k = 0; k < 5; ++k) {
      emb_off[k] = at;
      at += static_cast<size_t>(cards[k]) * d;
    }
    int32_t prev = in_dim;
    std::vector<int32_t> widths = m.hidden();
    widths.push_back(out_dim);
    for (int32_t w : widths) {
      Dense l;
      l.rows = w;
      l.cols = prev;
      l.w_off = at;
      at += static_cast<size_t>(w) * prev;
      l.b_off = at;
      at += w;
      prev = w;
      dense.push_back(l);
    }
    total = at;
  }

  std::array<int32_t, 5> cat_indices(const FeatureVector& x) const {
    return {x.origin, x.destination, x.origin_scheduler, x.destination_scheduler, x.size_class};
  }

  struct Cache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;  // hidden pre-activations
    std::vector<std::vector<double>> act;  // post relu (and dropout)
    std::vector<double> logits;
    std::vector<double> prob;
  };

  void forward(const std::vector<double>& p, const FeatureVector& x, Cache& c,
               const std::vector<std::vector<double>>* masks) const {
    c.input.assign(in_dim, 0.0);
    auto cats = cat_indices(x);
    for (int k = 0; k < 5; ++k) {
      const double* row = p.data() + emb_off[k] + static_cast<size_t>(cats[k]) * d;
      std::copy(row, row + d, c.input.begin() + seg_off[k]);
    }
    c.input[2 * d] = x.volume;
    c.input[4 * d + 1] = x.time_of_day;
    c.input[4 * d + 2] = x.time_of_week;
    c.input[4 * d + 3] = x.miles;

    size_t nh = dense.size() - 1;
    c.pre.assign(nh, {});
    c.act.assign(nh, {});
    const std::vector<double>* prev = &c.input;
    for (size_t l = 0; l < nh; ++l) {
      const Dense& dn = dense[l];
      c.pre[l].assign(dn.rows, 0.0);
      for (int32_t r = 0; r < dn.rows; ++r) {
        const double* wrow = p.data() + dn.w_off + static_cast<size_t>(r) * dn.cols;
        double acc = p[dn.b_off + r];
        for (int32_t j = 0; j < dn.cols; ++j) acc += wrow[j] * (*prev)[j];
        c.pre[l][r] = acc;
      }
      c.act[l].resize(dn.rows);
      for (int32_t r = 0; r < dn.rows; ++r) {
        double v = c.pre[l][r] > 0 ? c.pre[l][r] : 0.0;
        if (masks) v *= (*masks)[l][r];
        c.act[l][r] = v;
      }
      prev = &c.act[l];
    }
    const Dense& out = dense.back();
    c.logits.assign(out.rows, 0.0);
    for (int32_t r = 0; r < out.rows; ++r) {
      const double* wrow = p.data() + out.w_off + static_cast<size_t>(r) * out.cols;
      double acc = p[out.b_off + r];
      for (int32_t j = 0; j < out.cols; ++j) acc += wrow[j] * (*prev)[j];
      c.logits[r] = acc;
    }
    double mx = *std::max_element(c.logits.begin(), c.logits.end());
    double sum = 0.0;
    c.prob.assign(out.rows, 0.0);
    for (int32_t r = 0; r < out.rows; ++r) {
      c.prob[r] = std::exp(c.logits[r] - mx);
      sum += c.prob[r];
    }
    for (double& v : c.prob) v /= sum;
  }

  double loss(const Cache& c, const std::vector<double>& y) const {
    double mx = *std::max_element(c.logits.begin(), c.logits.end());
    double sum = 0.0;
    for (double l : c.logits) sum += std::exp(l - mx);
    double lse = mx + std::log(sum);
    double out = 0.0;
    for (size_t r = 0; r < y.size(); ++r)
      if (y[r] != 0.0) out -= y[r] * (c.logits[r] - lse);
    return out;
  }

  void backward(const std::vector<double>& p, const FeatureVector& x, const Cache& c,
                const std::vector<double>& y, const std::vector<std::vector<double>>* masks,
                std::vector<double>& grad) const {
    size_t nh = dense.size() - 1;
    std::vector<double> dcur(c.prob);
    for (size_t r = 0; r < y.size(); ++r) dcur[r] -= y[r];

    std::vector<double> dprev;
    for (size_t l = dense.size(); l-- > 0;) {
      const Dense& dn = dense[l];
      const std::vector<double>& below = l == 0 ? c.input : c.act[l - 1];
      dprev.assign(dn.cols, 0.0);
      for (int32_t r = 0; r < dn.rows; ++r) {
        double g = dcur[r];
        if (g == 0.0) continue;
        double* wg = grad.data() + dn.w_off + static_cast<size_t>(r) * dn.cols;
        const double* w = p.data() + dn.w_off + static_cast<size_t>(r) * dn.cols;
        for (int32_t j = 0; j < dn.cols; ++j) {
          wg[j] += g * below[j];
          dprev[j] += g * w[j];
        }
        grad[dn.b_off + r] += g;
      }
      if (l > 0) {
        size_t hl = l - 1;
        for (int32_t j = 0; j < dn.cols; ++j) {
          double m = masks ? (*masks)[hl][j] : 1.0;
          dprev[j] *= m * (c.pre[hl][j] > 0 ? 1.0 : 0.0);
        }
        dcur = dprev;
      }
    }
    // dprev now holds the input gradient; scatter the embedding segments.
    (void)nh;
    auto cats = cat_indices(x);
    for (int k = 0; k < 5; ++k) {
      double* row = grad.data() + emb_off[k] + static_cast<size_t>(cats[k]) * d;
      for (int32_t t = 0; t < d; ++t) row[t] += dprev[seg_off[k] + t];
    }
  }
};

ScorerModel::ScorerModel(FeatureEncoder encoder, std::vector<std::string> resources,
                         const TrainConfig& config, uint64_t init_seed)
    : encoder_(std::move(encoder)),
      resource_ids_(std::move(resources)),
      hidden_(config.hidden),
      embedding_dim_(config.embedding_dim) {
  if (resource_ids_.empty()) throw Error("ScorerModel: empty resource list");
  ScorerNet net(*this);
  params_.assign(net.total, 0.0);
  Rng rng(mix_seed(init_seed, 0xd15ea5e));
  for (int k = 0; k < 5; ++k) {
    double* blk = params_.data() + net.emb_off[k];
    size_t count = static_cast<size_t>(net.cards[k]) * embedding_dim_;
    for (size_t i = 0; i < count; ++i) blk[i] = rng.next_in(-0.05, 0.05);
  }
  for (const ScorerNet::Dense& dn : net.dense) {
    double limit = std::sqrt(6.0 / (dn.rows + dn.cols));
    double* w = params_.data() + dn.w_off;
    for (size_t i = 0; i < static_cast<size_t>(dn.rows) * dn.cols; ++i)
      w[i] = rng.next_in(-limit, limit);
    // biases stay zero
  }
}

std::vector<double> ScorerModel::predict(const FeatureVector& x) const {
  ScorerNet net(*this);
  ScorerNet::Cache c;
  net.forward(params_, x, c, nullptr);
  return c.prob;
}

std::vector<double> ScorerModel::predict_arc(const Instance& inst, int32_t arc) const {
  return predict(encoder_.encode_arc(inst, InstanceScale::of(inst), arc));
}

namespace {

json encoder_to_json(const FeatureEncoder& e) {
  return json{{"origin", e.origin.names},
              {"destination", e.destination.names},
              {"scheduler", e.scheduler.names},
              {"size_class", e.size_class.names},
              {"ranges",
               {{"volume", {e.volume.lo, e.volume.hi}},
                {"tod", {e.tod.lo, e.tod.hi}},
                {"tow", {e.tow.lo, e.tow.hi}},
                {"miles", {e.miles.lo, e.miles.hi}}}}};
}

FeatureEncoder encoder_from_json(const json& j) {
  FeatureEncoder e;
  e.origin.names = j.at("origin").get<std::vector<std::string>>();
  e.destination.names = j.at("destination").get<std::vector<std::string>>();
  e.scheduler.names = j.at("scheduler").get<std::vector<std::string>>();
  e.size_class.names = j.at("size_class").get<std::vector<std::string>>();
  auto rng = [&](const char* k) {
    auto v = j.at("ranges").at(k).get<std::vector<double>>();
    return ValueRange{v.at(0), v.at(1)};
  };
  e.volume = rng("volume");
  e.tod = rng("tod");
  e.tow = rng("tow");
  e.miles = rng("miles");
  return e;
}

}  // namespace

json ScorerModel::to_json() const {
  json j;
  j["format"] = "resub-scorer-v1";
  j["resources"] = resource_ids_;
  j["hidden"] = hidden_;
  j["embedding_dim"] = embedding_dim_;
  j["encoder"] = encoder_to_json(encoder_);
  j["params"] = params_;
  j["meta"] = meta.is_null() ? json::object() : meta;
  return j;
}

ScorerModel ScorerModel::from_json(const json& j) {
  if (j.value("format", "") != "resub-scorer-v1")
    throw Error("scorer model: unrecognized format tag");
  TrainConfig cfg;
  cfg.hidden = j.at("hidden").get<std::vector<int32_t>>();
  cfg.embedding_dim = j.at("embedding_dim").get<int32_t>();
  ScorerModel m(encoder_from_json(j.at("encoder")), j.at("resources").get<std::vector<std::string>>(),
                cfg, 0);
  std::vector<double> p = j.at("params").get<std::vector<double>>();
  if (p.size() != m.params_.size())
    throw Error("scorer model: parameter vector size mismatch");
  m.params_ = std::move(p);
  m.meta = j.value("meta", json::object());
  return m;
}

void ScorerModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path);
  out << to_json().dump(2) << "\n";
}

ScorerModel ScorerModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("model json parse failed for " + path + ": " + e.what());
  }
  return from_json(j);
}

double top_kappa_metric(const std::vector<std::vector<double>>& predictions,
                        const std::vector<std::vector<double>>& labels, int32_t kappa) {
  if (predictions.size() != labels.size())
    throw Error("top_kappa_metric: prediction/label count mismatch");
  if (kappa < 1) throw Error("top_kappa_metric: kappa must be at least 1");
  double hit = 0.0, mass = 0.0;
  for (size_t e = 0; e < predictions.size(); ++e) {
    const auto& p = predictions[e];
    const auto& y = labels[e];
    if (p.size() != y.size()) throw Error("top_kappa_metric: vector size mismatch");
    std::vector<int32_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int32_t a, int32_t b) { return p[a] > p[b]; });
    int32_t take = std::min<int32_t>(kappa, static_cast<int32_t>(order.size()));
    for (int32_t i = 0; i < take; ++i) hit += y[order[i]];
    for (double v : y) mass += v;
  }
  return mass > 0 ? hit / mass : 0.0;
}

double split_top_kappa(const Predictor& p, const TrainingSet& ts, Split which, int32_t kappa) {
  std::vector<std::vector<double>> preds, labels;
  for (int32_t i : ts.indices_of(which)) {
    preds.push_back(p.predict(ts.examples[i].x));
    labels.push_back(ts.examples[i].y);
  }
  if (preds.empty()) return 0.0;
  return top_kappa_metric(preds, labels, kappa);
}

double loss_and_gradient(const ScorerModel& model, const TrainingSet& ts,
                         const std::vector<int32_t>& examples, std::vector<double>& grad) {
  if (examples.empty()) throw Error("loss_and_gradient: empty example list");
  ScorerNet net(model);
  grad.assign(net.total, 0.0);
  ScorerNet::Cache cache;
  double loss = 0.0;
  for (int32_t i : examples) {
    const TrainingExample& ex = ts.examples[i];
    net.forward(model.params(), ex.x, cache, nullptr);
    loss += net.loss(cache, ex.y);
    net.backward(model.params(), ex.x, cache, ex.y, nullptr, grad);
  }
  double inv = 1.0 / static_cast<double>(examples.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

ScorerModel train_scorer(const TrainingSet& ts, const TrainConfig& config, uint64_t seed) {
  if (ts.examples.empty()) throw Error("train_scorer: empty training set");
  ScorerModel model(ts.encoder, ts.resources, config, seed);
  ScorerNet net(model);
  Rng shuffle_rng(mix_seed(seed, 11));
  Rng drop_rng(mix_seed(seed, 12));

  std::vector<int32_t> train_idx = ts.indices_of(Split::Train);
  if (train_idx.empty()) throw Error("train_scorer: empty train split");
  bool have_val = !ts.indices_of(Split::Validation).empty();
  int32_t val_kappa =
      std::min<int32_t>(config.early_stop_kappa, static_cast<int32_t>(ts.resources.size()));

  std::vector<double> m(net.total, 0.0), v(net.total, 0.0), grad(net.total, 0.0);
  int64_t t = 0;
  std::vector<std::vector<double>> masks(net.dense.size() - 1);
  for (size_t l = 0; l + 1 < net.dense.size(); ++l) masks[l].resize(net.dense[l].rows);
  ScorerNet::Cache cache;

  json val_history = json::array();
  double prev_val = -1.0;
  int declines = 0;
  int epochs_run = config.epochs;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    for (size_t start = 0; start < train_idx.size(); start += config.batch_size) {
      size_t stop = std::min(train_idx.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (size_t bi = start; bi < stop; ++bi) {
        const TrainingExample& ex = ts.examples[train_idx[bi]];
        const std::vector<std::vector<double>>* mp = nullptr;
        if (config.dropout > 0) {
          for (auto& layer : masks)
            for (double& mm : layer)
              mm = drop_rng.next_unit() >= config.dropout ? 1.0 / (1.0 - config.dropout) : 0.0;
          mp = &masks;
        }
        net.forward(model.params(), ex.x, cache, mp);
        net.backward(model.params(), ex.x, cache, ex.y, mp, grad);
      }
      double inv = 1.0 / static_cast<double>(stop - start);
      ++t;
      double c1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(t));
      double c2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(t));
      std::vector<double>& p = model.params();
      for (size_t i = 0; i < net.total; ++i) {
        double g = grad[i] * inv;
        m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * g;
        v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * g * g;
        p[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.adam_eps);
      }
    }
    if (have_val && epoch % config.eval_every == 0) {
      double cur = split_top_kappa(model, ts, Split::Validation, val_kappa);
      val_history.push_back(cur);
      if (prev_val >= 0 && cur < prev_val) ++declines; else declines = 0;
      prev_val = cur;
      if (declines >= config.early_stop_declines) {
        epochs_run = epoch;
        break;
      }
    }
  }

  model.meta = json{{"seed", seed},
                    {"epochs_run", epochs_run},
                    {"val_top_kappa", val_history},
                    {"val_kappa", val_kappa},
                    {"examples", ts.examples.size()},
                    {"train_size", train_idx.size()},
                    {"config", config.to_json()}};
  return model;
}

FrequencyBaseline baseline_from_examples(const TrainingSet& ts,
                                         const std::vector<int32_t>& examples) {
  FrequencyBaseline b;
  b.encoder_ = ts.encoder;
  b.resource_ids_ = ts.resources;
  b.global_.assign(ts.resources.size(), 0.0);
  double total = 0.0;
  for (int32_t i : examples) {
    const TrainingExample& ex = ts.examples[i];
    std::array<int32_t, 3> key{ex.x.origin, ex.x.destination, ex.x.size_class};
    auto& row = b.table_[key];
    if (row.empty()) row.assign(ts.resources.size(), 0.0);
    for (size_t r = 0; r < ex.y.size(); ++r) {
      row[r] += ex.y[r];
      b.global_[r] += ex.y[r];
    }
    total += 1.0;
  }
  for (auto& [key, row] : b.table_) {
    double s = std::accumulate(row.begin(), row.end(), 0.0);
    if (s > 0)
      for (double& v : row) v /= s;
  }
  if (total > 0)
    for (double& v : b.global_) v /= total;
  return b;
}

FrequencyBaseline frequency_baseline(const std::vector<RefSolution>& refs) {
  TrainingSet ts = build_training_set(refs, 0);
  std::vector<int32_t> all(ts.examples.size());
  std::iota(all.begin(), all.end(), 0);
  return baseline_from_examples(ts, all);
}

std::vector<double> FrequencyBaseline::predict(const FeatureVector& x) const {
  auto it = table_.find({x.origin, x.destination, x.size_class});
  return it != table_.end() ? it->second : global_;
}

CandidateSets top_kappa_candidates(const Instance& inst, const Predictor& p,
                                   const std::vector<int32_t>& kappa_per_arc) {
  if (kappa_per_arc.size() != static_cast<size_t>(inst.num_arcs()))
    throw Error("top_kappa_candidates: kappa list must cover every arc");
  std::map<std::string, int32_t> model_pos;
  for (size_t i = 0; i < p.resources().size(); ++i)
    model_pos[p.resources()[i]] = static_cast<int32_t>(i);
  InstanceScale scale = InstanceScale::of(inst);

  CandidateSets out(inst.num_arcs());
  for (int32_t a = 0; a < inst.num_arcs(); ++a) {
    if (kappa_per_arc[a] < 1) throw Error("top_kappa_candidates: kappa must be at least 1");
    std::vector<double> prob = p.predict(p.encoder().encode_arc(inst, scale, a));
    const Arc& arc = inst.arcs()[a];
    std::vector<int32_t> ranked = arc.candidates;  // ascending, the tie order
    std::stable_sort(ranked.begin(), ranked.end(), [&](int32_t r1, int32_t r2) {
      auto score = [&](int32_t r) {
        auto it = model_pos.find(inst.resources()[r]);
        return it == model_pos.end() ? 0.0 : prob[it->second];
      };
      return score(r1) > score(r2);
    });
    int32_t take = std::min<int32_t>(kappa_per_arc[a], static_cast<int32_t>(ranked.size()));
    std::vector<int32_t>& cs = out[a];
    cs.assign(ranked.begin(), ranked.begin() + take);
    cs.push_back(arc.initial);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  }
  return out;
}

}  // namespace resub
