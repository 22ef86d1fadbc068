#include "resub/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "resub/betweenness.hpp"
#include "resub/instance_gen.hpp"
#include "resub/portfolio.hpp"
#include "resub/scorer.hpp"
#include "resub/solver.hpp"

namespace resub {
namespace {

namespace fs = std::filesystem;

// Relative output paths land under $RESUB_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute()) return path;
  const char* base = std::getenv("RESUB_OUT_DIR");
  if (base == nullptr || *base == '\0') return path;
  return (fs::path(base) / p).string();
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path);
}

void write_json_file(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  return j;
}

// Hash of the canonical serialized parameter set; embedded in every artifact
// so outputs can be traced back to the run that produced them.
std::string config_hash(const json& cfg) { return to_hex(fnv1a64(cfg.dump())); }

std::string csv_comment(const std::string& hash, uint64_t seed) {
  return "# config=" + hash + " seed=" + std::to_string(seed) + "\n";
}

json config_field(const json& cfg, uint64_t seed) {
  return json{{"hash", config_hash(cfg)}, {"seed", seed}};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  while (!parts.empty() && parts.back().empty()) parts.pop_back();
  return parts;
}

std::vector<Rational> parse_weights(const std::string& text, const char* what) {
  std::vector<Rational> out;
  for (const std::string& p : split_list(text)) {
    if (p.empty()) throw Error(std::string(what) + ": empty entry in list '" + text + "'");
    out.push_back(Rational::parse(p));
  }
  return out;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  for (const std::string& p : split_list(text)) {
    size_t pos = 0;
    double v = std::stod(p, &pos);
    if (pos != p.size()) throw Error("levels: bad number '" + p + "'");
    out.push_back(v);
  }
  return out;
}

std::array<int32_t, 3> parse_kappas(const std::string& text) {
  auto parts = split_list(text);
  if (parts.size() != 3) throw Error("kappas: expected three comma-separated integers (low,medium,high)");
  std::array<int32_t, 3> k{};
  for (size_t i = 0; i < 3; ++i) k[i] = static_cast<int32_t>(std::stol(parts[i]));
  return k;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int64_t pair_count(const CandidateSets& cands) {
  int64_t n = 0;
  for (const auto& c : cands) n += static_cast<int64_t>(c.size());
  return n;
}

CandidateSets load_candidates(const Instance& inst, const std::string& path) {
  if (path.empty()) return full_candidates(inst);
  json j = read_json_file(path);
  const json& body = j.is_object() && j.contains("candidates") ? j.at("candidates") : j;
  return candidates_from_json(inst, body);
}

// Stage 2 needs the Stage-1 optimum for the same candidate sets.  A stage-1
// solution artifact carries both the value and the candidate fingerprint; a
// mismatched fingerprint means the cap would be checked against different
// decision variables, so the run is refused.
int64_t resolve_istar(int64_t flag_value, const std::string& file, const Instance& inst,
                      const CandidateSets& cands, const char* cmd) {
  if (flag_value >= 0 && !file.empty())
    throw Error(std::string(cmd) + ": give either --istar or --istar-file, not both");
  if (flag_value >= 0) return flag_value;
  if (file.empty())
    throw Error(std::string(cmd) +
                ": stage-2 models need --istar <value> or --istar-file <stage1 solution>");
  json j = read_json_file(file);
  if (!j.contains("istar")) throw Error(file + ": no 'istar' field (not a stage-1 solution artifact?)");
  if (j.contains("fingerprint")) {
    std::string recorded = j.at("fingerprint").get<std::string>();
    std::string current = to_hex(candidate_fingerprint(inst, cands));
    if (recorded != current)
      throw Error(std::string(cmd) + ": candidate fingerprint mismatch (stage 1 solved " + recorded +
                  ", current candidate sets are " + current +
                  "); rerun stage 1 on these candidates or pass --istar explicitly");
  }
  return j.at("istar").get<int64_t>();
}

Solution run_backend(const ModelSpec& spec, Backend backend, const SolveLimits& limits,
                     uint64_t seed) {
  switch (backend) {
    case Backend::Exact: {
      ExactOptions opts;
      opts.limits = limits;
      return solve_exact(spec, opts);
    }
    case Backend::Brute:
      return solve_brute_force(spec);
    case Backend::Ils:
      return solve_ils(spec, seed);
  }
  throw Error("unknown backend");
}

int status_exit(SolveStatus s) {
  return (s == SolveStatus::Optimal || s == SolveStatus::Feasible) ? 0 : 2;
}

json solution_artifact(const ModelSpec& spec, const Solution& sol, const json& cfg, uint64_t seed) {
  json j = solution_to_json(spec, sol);
  j["_config"] = config_field(cfg, seed);
  j["fingerprint"] = to_hex(candidate_fingerprint(*spec.instance, spec.candidates));
  if (spec.kind == ModelKind::Stage1 && sol.objective.has_value())
    j["istar"] = sol.objective->imbalance;
  return j;
}

ModelSpec build_spec(const Instance& inst, CandidateSets cands, ModelKind kind, int64_t istar,
                     const Rational& alpha, const Rational& omega) {
  switch (kind) {
    case ModelKind::Stage1:
      return build_stage1(inst, std::move(cands));
    case ModelKind::Stage2Efficient:
      return build_stage2_efficient(inst, std::move(cands), istar);
    case ModelKind::Stage2Minimax:
      return build_stage2_minimax(inst, std::move(cands), istar);
    case ModelKind::Stage2Weighted:
      return build_stage2_weighted(inst, std::move(cands), istar, alpha);
    case ModelKind::Stage2Gini:
      return build_stage2_gini(inst, std::move(cands), istar, omega);
  }
  throw Error("unknown model kind");
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  std::string label = "custom";
  int32_t schedulers = 2;
  int32_t nodes = 12;
  int32_t arcs = 30;
  int32_t resources = 6;
  double collab = 0.3;
  int64_t i_lo = 1;
  int64_t i_hi = -1;
  uint64_t seed = 1;
  std::string matrix_path;
  int32_t retry = 200;
  std::string out = "instance.json";
  int32_t pool = 0;
  int32_t alternates = 2;
  std::string out_dir = "pool";
};

ClassParams to_class_params(const GenOpts& o) {
  ClassParams p;
  p.label = o.label;
  p.schedulers = o.schedulers;
  p.nodes = o.nodes;
  p.arcs = o.arcs;
  p.resources = o.resources;
  p.collaboration_ratio = o.collab;
  p.imbalance_lo = o.i_lo;
  p.imbalance_hi = o.i_hi;
  p.seed = o.seed;
  p.retry_budget = o.retry;
  if (!o.matrix_path.empty()) p.matrix = load_compat_file(o.matrix_path);
  return p;
}

json gen_config(const GenOpts& o) {
  return json{{"cmd", "gen"},           {"label", o.label},
              {"schedulers", o.schedulers}, {"nodes", o.nodes},
              {"arcs", o.arcs},         {"resources", o.resources},
              {"collab", o.collab},     {"imbalance_lo", o.i_lo},
              {"imbalance_hi", o.i_hi}, {"seed", o.seed},
              {"matrix", o.matrix_path}, {"retry", o.retry},
              {"pool", o.pool},         {"alternates", o.alternates}};
}

int run_gen(const GenOpts& o) {
  json cfg = gen_config(o);
  ClassParams params = to_class_params(o);
  if (o.pool <= 0) {
    Instance inst = generate_instance(params);
    json j = inst.to_json();
    j["meta"]["config"] = config_field(cfg, o.seed);
    std::string path = resolve_out(o.out);
    write_json_file(path, j);
    Assignment phi0 = Assignment::initial_of(inst);
    std::cout << "wrote " << path << " (nodes=" << inst.num_nodes() << " arcs=" << inst.num_arcs()
              << " i0=" << total_imbalance(inst, phi0).total << ")\n";
    return 0;
  }

  auto refs = generate_reference_pool({params}, o.pool, o.seed, o.alternates);
  std::string dir = resolve_out(o.out_dir);
  std::string hash = config_hash(cfg);

  int width = o.pool >= 100 ? 3 : 2;
  auto week_name = [&](int32_t w) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "week%0*d.json", width, w);
    return std::string(buf);
  };

  std::ostringstream manifest, refs_csv;
  manifest << csv_comment(hash, o.seed) << "file,class,seed,i0\n";
  refs_csv << csv_comment(hash, o.seed) << "instance,reference\n";

  const Instance* last = nullptr;
  int32_t week = 0, ref_no = 0;
  for (const RefSolution& r : refs) {
    if (r.instance.get() != last) {
      last = r.instance.get();
      ++week;
      ref_no = 0;
      const Instance& inst = *r.instance;
      json j = inst.to_json();
      j["meta"]["config"] = config_field(cfg, o.seed);
      write_json_file((fs::path(dir) / week_name(week)).string(), j);
      Assignment phi0 = Assignment::initial_of(inst);
      uint64_t week_seed = inst.meta().contains("generator")
                               ? inst.meta()["generator"].value("seed", uint64_t{0})
                               : 0;
      manifest << week_name(week) << "," << o.label << "," << week_seed << ","
               << total_imbalance(inst, phi0).total << "\n";
    }
    ++ref_no;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "week%0*d_ref%d.json", width, week, ref_no);
    json rj{{"_config", config_field(cfg, o.seed)},
            {"instance", week_name(week)},
            {"assignment", r.assignment.to_map(*r.instance)}};
    write_json_file((fs::path(dir) / buf).string(), rj);
    refs_csv << week_name(week) << "," << buf << "\n";
  }
  write_text((fs::path(dir) / "manifest.csv").string(), manifest.str());
  write_text((fs::path(dir) / "refs.csv").string(), refs_csv.str());
  std::cout << "wrote " << week << " instances, " << refs.size() << " references to " << dir
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- betweenness

struct BetweennessOpts {
  std::string instance;
  int32_t samples = 0;
  uint64_t seed = 1;
  bool weighted = false;
  double q1 = 0.6, q2 = 0.9;
  std::string kappas = "1,3,5";
  std::string out = "betweenness.csv";
  bool summary = false;
};

int run_betweenness(const BetweennessOpts& o) {
  json cfg{{"cmd", "betweenness"}, {"instance", o.instance}, {"samples", o.samples},
           {"seed", o.seed},       {"weighted", o.weighted}, {"q1", o.q1},
           {"q2", o.q2},           {"kappas", o.kappas}};
  Instance inst = Instance::load_file(o.instance);
  BetweennessReport rep = o.samples > 0
                              ? edge_betweenness_sampled(inst, o.samples, o.seed, o.weighted)
                              : edge_betweenness_exact(inst, o.weighted);
  auto taus = quantile_thresholds(rep, o.q1, o.q2);
  KappaAssignment ka = assign_kappa(rep, taus, parse_kappas(o.kappas));

  std::ostringstream body;
  body << csv_comment(config_hash(cfg), o.seed);
  write_kappa_csv(inst, rep, ka, body);
  std::string path = resolve_out(o.out);
  write_text(path, body.str());

  std::array<int64_t, 3> counts{0, 0, 0};
  for (ArcBand b : ka.bands) ++counts[static_cast<int>(b)];
  double mean_kappa = 0;
  for (int32_t k : ka.kappa) mean_kappa += k;
  if (!ka.kappa.empty()) mean_kappa /= static_cast<double>(ka.kappa.size());
  std::cout << "wrote " << path << " (tau1=" << format_double(ka.tau1)
            << " tau2=" << format_double(ka.tau2) << " low/med/high=" << counts[0] << "/"
            << counts[1] << "/" << counts[2] << " mean_kappa=" << fixed4(mean_kappa) << ")\n";
  if (o.summary) {
    std::cout << "band    arcs    kappa\n";
    const char* names[3] = {"low", "medium", "high"};
    for (int b = 0; b < 3; ++b)
      std::printf("%-7s %-7ld %d\n", names[b], static_cast<long>(counts[b]), ka.class_kappas[b]);
  }
  return 0;
}

// ---------------------------------------------------------------- reference loading

std::vector<RefSolution> load_refs_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open " + csv_path);
  fs::path base = fs::path(csv_path).parent_path();
  std::map<std::string, std::shared_ptr<const Instance>> instances;
  std::vector<RefSolution> refs;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "instance,reference") continue;
      // fall through: headerless files are accepted
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(csv_path + ": bad row '" + line + "'");
    std::string inst_file = line.substr(0, comma);
    std::string ref_file = line.substr(comma + 1);
    auto it = instances.find(inst_file);
    if (it == instances.end()) {
      auto inst = std::make_shared<const Instance>(
          Instance::load_file((base / inst_file).string()));
      it = instances.emplace(inst_file, std::move(inst)).first;
    }
    json rj = read_json_file((base / ref_file).string());
    if (!rj.contains("assignment")) throw Error(ref_file + ": no 'assignment' field");
    std::map<std::string, std::string> m;
    for (auto& [k, v] : rj.at("assignment").items()) m[k] = v.get<std::string>();
    refs.push_back({it->second, Assignment::from_map(*it->second, m)});
  }
  if (refs.empty()) throw Error(csv_path + ": no reference rows");
  return refs;
}

// ---------------------------------------------------------------- train

struct TrainOpts {
  std::string refs;
  std::string out = "model.json";
  uint64_t seed = 1;
  std::string config_path;
  int32_t epochs = -1;
  int32_t embedding_dim = -1;
  double lr = -1;
  double dropout = -1;
  int32_t batch = -1;
  std::string hidden;
  bool summary = false;
};

std::vector<int32_t> metric_kappas(int32_t num_resources) {
  std::vector<int32_t> ks;
  for (int32_t k = 1; k <= std::min<int32_t>(5, num_resources); ++k) ks.push_back(k);
  if (num_resources > 5) ks.push_back(num_resources);
  return ks;
}

int run_train(const TrainOpts& o) {
  TrainConfig tc;
  if (!o.config_path.empty()) tc = TrainConfig::from_json(read_json_file(o.config_path));
  if (o.epochs > 0) tc.epochs = o.epochs;
  if (o.embedding_dim > 0) tc.embedding_dim = o.embedding_dim;
  if (o.lr > 0) tc.learning_rate = o.lr;
  if (o.dropout >= 0) tc.dropout = o.dropout;
  if (o.batch > 0) tc.batch_size = o.batch;
  if (!o.hidden.empty()) {
    tc.hidden.clear();
    for (const std::string& p : split_list(o.hidden))
      tc.hidden.push_back(static_cast<int32_t>(std::stol(p)));
  }
  json cfg{{"cmd", "train"}, {"refs", o.refs}, {"seed", o.seed}, {"train", tc.to_json()}};

  std::vector<RefSolution> refs = load_refs_csv(o.refs);
  TrainingSet ts = build_training_set(refs, o.seed);
  std::cout << "training set: " << ts.examples.size() << " examples ("
            << ts.indices_of(Split::Train).size() << " train / "
            << ts.indices_of(Split::Validation).size() << " val / "
            << ts.indices_of(Split::Test).size() << " test), " << ts.resources.size()
            << " resource classes\n";

  auto t0 = std::chrono::steady_clock::now();
  ScorerModel model = train_scorer(ts, tc, o.seed);
  auto train_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();

  // The baseline is fitted on the training split only, so both predictors see
  // identical supervision when compared on the test split.
  FrequencyBaseline baseline = baseline_from_examples(ts, ts.indices_of(Split::Train));
  json net_metrics = json::object(), base_metrics = json::object();
  std::cout << "test TOP_k (" << ts.indices_of(Split::Test).size() << " examples):\n";
  std::cout << "kappa   net      baseline\n";
  for (int32_t k : metric_kappas(static_cast<int32_t>(ts.resources.size()))) {
    double net = split_top_kappa(model, ts, Split::Test, k);
    double base = split_top_kappa(baseline, ts, Split::Test, k);
    net_metrics[std::to_string(k)] = net;
    base_metrics[std::to_string(k)] = base;
    std::printf("%-7d %-8s %-8s\n", k, fixed4(net).c_str(), fixed4(base).c_str());
  }
  model.meta["config"] = config_field(cfg, o.seed);
  model.meta["test_top_kappa"] = net_metrics;
  model.meta["baseline_test_top_kappa"] = base_metrics;

  std::string path = resolve_out(o.out);
  write_json_file(path, model.to_json());
  std::cout << "wrote " << path << " (train time " << train_ms << " ms)\n";
  if (o.summary && model.meta.contains("validation")) {
    std::cout << "validation history (epoch, TOP_" << tc.early_stop_kappa << "):\n";
    for (const auto& row : model.meta["validation"])
      std::cout << "  " << row[0].get<int64_t>() << "  " << fixed4(row[1].get<double>()) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreOpts {
  std::string instance;
  std::string scorer;
  double q1 = 0.6, q2 = 0.9;
  std::string kappas = "1,3,5";
  int32_t samples = 0;
  uint64_t seed = 1;
  bool weighted = false;
  std::string out = "candidates.json";
  std::string kappa_csv;
  bool summary = false;
};

int run_score(const ScoreOpts& o) {
  json cfg{{"cmd", "score"},   {"instance", o.instance}, {"scorer", o.scorer},
           {"q1", o.q1},       {"q2", o.q2},             {"kappas", o.kappas},
           {"samples", o.samples}, {"seed", o.seed},     {"weighted", o.weighted}};
  Instance inst = Instance::load_file(o.instance);
  ScorerModel model = ScorerModel::load_file(o.scorer);
  BetweennessReport rep = o.samples > 0
                              ? edge_betweenness_sampled(inst, o.samples, o.seed, o.weighted)
                              : edge_betweenness_exact(inst, o.weighted);
  auto taus = quantile_thresholds(rep, o.q1, o.q2);
  KappaAssignment ka = assign_kappa(rep, taus, parse_kappas(o.kappas));
  CandidateSets cands = top_kappa_candidates(inst, model, ka.kappa);

  int64_t before = pair_count(full_candidates(inst));
  int64_t after = pair_count(cands);
  json artifact{{"_config", config_field(cfg, o.seed)},
                {"instance", fs::path(o.instance).filename().string()},
                {"fingerprint", to_hex(candidate_fingerprint(inst, cands))},
                {"pairs_before", before},
                {"pairs_after", after},
                {"candidates", candidates_to_json(inst, cands)}};
  std::string path = resolve_out(o.out);
  write_json_file(path, artifact);
  if (!o.kappa_csv.empty()) {
    std::ostringstream body;
    body << csv_comment(config_hash(cfg), o.seed);
    write_kappa_csv(inst, rep, ka, body);
    write_text(resolve_out(o.kappa_csv), body.str());
  }
  double red = before > 0 ? 100.0 * static_cast<double>(before - after) / static_cast<double>(before)
                          : 0.0;
  std::cout << "wrote " << path << " (pairs " << before << " -> " << after << ", reduction "
            << fixed4(red) << "%)\n";
  if (o.summary) {
    std::cout << "arc     band    kappa  candidates\n";
    for (int32_t a = 0; a < inst.num_arcs(); ++a)
      std::printf("%-7s %-7s %-6d %d\n", inst.arcs()[a].id.c_str(), band_name(ka.bands[a]),
                  ka.kappa[a], static_cast<int>(cands[a].size()));
  }
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveOpts {
  std::string instance;
  std::string model = "stage1";
  std::string candidates;
  int64_t istar = -1;
  std::string istar_file;
  std::string alpha = "0.5";
  std::string omega = "0.5";
  std::string backend = "exact";
  uint64_t seed = 1;
  int64_t time_limit_ms = -1;
  int64_t node_limit = -1;
  std::string out = "solution.json";
  bool summary = false;
};

int run_solve(const SolveOpts& o) {
  json cfg{{"cmd", "solve"},       {"instance", o.instance}, {"model", o.model},
           {"candidates", o.candidates}, {"istar", o.istar}, {"istar_file", o.istar_file},
           {"alpha", o.alpha},     {"omega", o.omega},       {"backend", o.backend},
           {"seed", o.seed},       {"time_limit_ms", o.time_limit_ms},
           {"node_limit", o.node_limit}};
  Instance inst = Instance::load_file(o.instance);
  CandidateSets cands = load_candidates(inst, o.candidates);
  ModelKind kind = kind_from_name(o.model);
  int64_t istar = kind == ModelKind::Stage1
                      ? -1
                      : resolve_istar(o.istar, o.istar_file, inst, cands, "solve");
  ModelSpec spec = build_spec(inst, std::move(cands), kind, istar, Rational::parse(o.alpha),
                              Rational::parse(o.omega));
  SolveLimits limits{o.time_limit_ms, o.node_limit};
  Solution sol = run_backend(spec, backend_from_name(o.backend), limits, o.seed);

  std::string path = resolve_out(o.out);
  write_json_file(path, solution_artifact(spec, sol, cfg, o.seed));
  std::cout << "status=" << status_name(sol.status);
  if (sol.objective) {
    const ObjectiveValue& ov = *sol.objective;
    std::cout << " value=" << format_double(ov.value()) << " imbalance=" << ov.imbalance
              << " changes=" << ov.changes << " max_burden=" << ov.max_burden;
  }
  std::cout << " nodes=" << sol.nodes << " wall_ms=" << sol.wall_ms << " -> " << path << "\n";
  if (o.summary && sol.assignment) {
    SolutionAnalytics an = analyze_solution(inst, *sol.assignment);
    std::cout << "scheduler  burden  share\n";
    for (int32_t s = 0; s < inst.num_schedulers(); ++s)
      std::printf("%-10s %-7ld %s\n", inst.schedulers()[s].c_str(),
                  static_cast<long>(an.burdens.per_scheduler[s]), fixed4(an.shares[s]).c_str());
    std::cout << "gini=" << fixed4(an.gini) << " internal=" << an.internal_changes
              << " collaborative=" << an.collaborative_changes << "\n";
  }
  return status_exit(sol.status);
}

// ---------------------------------------------------------------- sweep / portfolio reporting

std::string entries_csv(const Instance& inst, const Portfolio& pf, const std::string& hash,
                        uint64_t seed) {
  (void)inst;
  std::ostringstream out;
  out << csv_comment(hash, seed)
      << "label,status,imbalance,changes,max_burden,gini,internal,collaborative,value,on_front\n";
  for (const PortfolioEntry& e : pf.entries) {
    out << e.label << "," << status_name(e.solution.status) << ",";
    if (e.solution.objective) {
      const ObjectiveValue& ov = *e.solution.objective;
      out << ov.imbalance << "," << ov.changes << "," << ov.max_burden << ",";
      out << (e.analytics ? fixed4(e.analytics->gini) : "") << ",";
      out << (e.analytics ? std::to_string(e.analytics->internal_changes) : "") << ",";
      out << (e.analytics ? std::to_string(e.analytics->collaborative_changes) : "") << ",";
      out << fixed4(ov.value()) << ",";
    } else {
      out << ",,,,,,,";
    }
    out << (e.on_front ? 1 : 0) << "\n";
  }
  return out.str();
}

int portfolio_exit(const Portfolio& pf) {
  for (const PortfolioEntry& e : pf.entries)
    if (status_exit(e.solution.status) != 0) return 2;
  return 0;
}

void print_portfolio(const Portfolio& pf) {
  std::cout << "label            status      changes  max_burden  gini    front\n";
  for (const PortfolioEntry& e : pf.entries) {
    const char* st = status_name(e.solution.status);
    if (e.solution.objective) {
      std::printf("%-16s %-11s %-8ld %-11ld %-7s %s\n", e.label.c_str(), st,
                  static_cast<long>(e.solution.objective->changes),
                  static_cast<long>(e.solution.objective->max_burden),
                  e.analytics ? fixed4(e.analytics->gini).c_str() : "-",
                  e.on_front ? "yes" : "no");
    } else {
      std::printf("%-16s %-11s %-8s %-11s %-7s %s\n", e.label.c_str(), st, "-", "-", "-", "no");
    }
  }
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
  std::string instance;
  std::string candidates;
  int64_t istar = -1;
  std::string istar_file;
  std::string alphas;
  std::string omegas;
  std::string backend = "exact";
  uint64_t seed = 1;
  int64_t time_limit_ms = -1;
  int64_t node_limit = -1;
  std::string out = "portfolio.json";
  std::string report;
  bool summary = false;
};

int run_sweep(const SweepOpts& o) {
  if (o.alphas.empty() == o.omegas.empty())
    throw Error("sweep: give exactly one of --alphas or --omegas");
  json cfg{{"cmd", "sweep"},     {"instance", o.instance}, {"candidates", o.candidates},
           {"istar", o.istar},   {"istar_file", o.istar_file}, {"alphas", o.alphas},
           {"omegas", o.omegas}, {"backend", o.backend},   {"seed", o.seed},
           {"time_limit_ms", o.time_limit_ms}, {"node_limit", o.node_limit}};
  Instance inst = Instance::load_file(o.instance);
  CandidateSets cands = load_candidates(inst, o.candidates);
  int64_t istar = resolve_istar(o.istar, o.istar_file, inst, cands, "sweep");
  SolveLimits limits{o.time_limit_ms, o.node_limit};
  Backend backend = backend_from_name(o.backend);

  Portfolio pf = o.alphas.empty()
                     ? sweep_omega(inst, cands, istar, parse_weights(o.omegas, "sweep"), backend,
                                   limits, o.seed)
                     : sweep_alpha(inst, cands, istar, parse_weights(o.alphas, "sweep"), backend,
                                   limits, o.seed);

  json j = portfolio_to_json(inst, pf);
  j["_config"] = config_field(cfg, o.seed);
  j["istar"] = istar;
  j["fingerprint"] = to_hex(candidate_fingerprint(inst, cands));
  std::string path = resolve_out(o.out);
  write_json_file(path, j);
  if (!o.report.empty())
    write_text(resolve_out(o.report), entries_csv(inst, pf, config_hash(cfg), o.seed));
  std::cout << "wrote " << path << " (" << pf.entries.size() << " entries)\n";
  if (o.summary) print_portfolio(pf);
  return portfolio_exit(pf);
}

// ---------------------------------------------------------------- portfolio

struct PortfolioOpts {
  std::string instance;
  std::string scorer;
  double q1 = 0.6, q2 = 0.9;
  std::string kappas = "1,3,5";
  std::string alphas = "0,0.25,0.5,0.75,1";
  std::string omegas;
  std::string backend = "exact";
  uint64_t seed = 1;
  int64_t time_limit_ms = -1;
  int64_t node_limit = -1;
  std::string levels = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::string out_dir = "portfolio";
  bool summary = false;
};

int run_portfolio(const PortfolioOpts& o) {
  json cfg{{"cmd", "portfolio"}, {"instance", o.instance}, {"scorer", o.scorer},
           {"q1", o.q1},         {"q2", o.q2},             {"kappas", o.kappas},
           {"alphas", o.alphas}, {"omegas", o.omegas},     {"backend", o.backend},
           {"seed", o.seed},     {"time_limit_ms", o.time_limit_ms},
           {"node_limit", o.node_limit}, {"levels", o.levels}};
  std::string hash = config_hash(cfg);
  Instance inst = Instance::load_file(o.instance);
  fs::path dir = resolve_out(o.out_dir);
  SolveLimits limits{o.time_limit_ms, o.node_limit};
  Backend backend = backend_from_name(o.backend);

  CandidateSets cands;
  if (o.scorer.empty()) {
    cands = full_candidates(inst);
  } else {
    ScorerModel model = ScorerModel::load_file(o.scorer);
    BetweennessReport rep = edge_betweenness_exact(inst);
    auto taus = quantile_thresholds(rep, o.q1, o.q2);
    KappaAssignment ka = assign_kappa(rep, taus, parse_kappas(o.kappas));
    cands = top_kappa_candidates(inst, model, ka.kappa);
  }

  ModelSpec s1 = build_stage1(inst, cands);
  Solution sol1 = run_backend(s1, backend, limits, mix_seed(o.seed, 1));
  write_json_file((dir / "stage1.json").string(), solution_artifact(s1, sol1, cfg, o.seed));
  if (!sol1.assignment || !sol1.objective) {
    std::cerr << "stage 1 " << status_name(sol1.status) << "; stopping\n";
    return 2;
  }
  int64_t istar = sol1.objective->imbalance;

  Portfolio pf;
  auto add = [&](const std::string& label, ModelKind kind, const Rational& w, uint64_t salt) {
    ModelSpec spec = build_spec(inst, cands, kind, istar, w, w);
    PortfolioEntry e;
    e.label = label;
    e.params = json{{"kind", kind_name(kind)}, {"istar", istar}};
    if (kind == ModelKind::Stage2Weighted)
      e.params["alpha"] = json{{"num", w.num}, {"den", w.den}};
    if (kind == ModelKind::Stage2Gini) e.params["omega"] = json{{"num", w.num}, {"den", w.den}};
    e.solution = run_backend(spec, backend, limits, mix_seed(o.seed, salt));
    if (e.solution.assignment) e.analytics = analyze_solution(inst, *e.solution.assignment);
    pf.entries.push_back(std::move(e));
  };

  add("efficient", ModelKind::Stage2Efficient, Rational{}, 100);
  add("minimax", ModelKind::Stage2Minimax, Rational{}, 101);
  std::vector<Rational> alphas =
      o.alphas.empty() ? std::vector<Rational>{} : parse_weights(o.alphas, "portfolio");
  for (size_t i = 0; i < alphas.size(); ++i)
    add("alpha=" + format_double(alphas[i].value()), ModelKind::Stage2Weighted, alphas[i],
        200 + i);
  std::vector<Rational> omegas =
      o.omegas.empty() ? std::vector<Rational>{} : parse_weights(o.omegas, "portfolio");
  for (size_t i = 0; i < omegas.size(); ++i)
    add("omega=" + format_double(omegas[i].value()), ModelKind::Stage2Gini, omegas[i], 300 + i);
  mark_pareto_front(pf);

  json j = portfolio_to_json(inst, pf);
  j["_config"] = config_field(cfg, o.seed);
  j["istar"] = istar;
  j["fingerprint"] = to_hex(candidate_fingerprint(inst, cands));
  write_json_file((dir / "portfolio.json").string(), j);
  write_text((dir / "entries.csv").string(), entries_csv(inst, pf, hash, o.seed));

  // Headline comparison: the pure-efficiency plan against the minimax-fair one.
  const PortfolioEntry* eff = pf.find("efficient");
  const PortfolioEntry* fair = pf.find("minimax");
  std::ostringstream sum;
  sum << csv_comment(hash, o.seed)
      << "istar,delta_efficient,z_efficient,delta_fair,z_fair,delta_increase_pct,"
         "z_reduction_pct,time_efficient_ms,time_fair_ms\n";
  if (eff && fair && eff->solution.objective && fair->solution.objective) {
    const ObjectiveValue& a = *eff->solution.objective;
    const ObjectiveValue& b = *fair->solution.objective;
    double dpct = a.changes > 0 ? 100.0 * static_cast<double>(b.changes - a.changes) /
                                      static_cast<double>(a.changes)
                                : 0.0;
    double zpct = a.max_burden > 0 ? 100.0 * static_cast<double>(a.max_burden - b.max_burden) /
                                         static_cast<double>(a.max_burden)
                                   : 0.0;
    sum << istar << "," << a.changes << "," << a.max_burden << "," << b.changes << ","
        << b.max_burden << "," << fixed4(dpct) << "," << fixed4(zpct) << ","
        << eff->solution.wall_ms << "," << fair->solution.wall_ms << "\n";
  }
  write_text((dir / "summary.csv").string(), sum.str());

  if (!alphas.empty()) {
    std::ostringstream ac;
    ac << csv_comment(hash, o.seed) << "alpha,changes,max_burden,delta_increase_pct,z_reduction_pct\n";
    for (const Rational& a : alphas) {
      const PortfolioEntry* e = pf.find("alpha=" + format_double(a.value()));
      if (!e || !e->solution.objective || !eff || !eff->solution.objective) continue;
      const ObjectiveValue& ov = *e->solution.objective;
      const ObjectiveValue& ef = *eff->solution.objective;
      double dpct = ef.changes > 0 ? 100.0 * static_cast<double>(ov.changes - ef.changes) /
                                         static_cast<double>(ef.changes)
                                   : 0.0;
      double zpct = ef.max_burden > 0
                        ? 100.0 * static_cast<double>(ef.max_burden - ov.max_burden) /
                              static_cast<double>(ef.max_burden)
                        : 0.0;
      ac << format_double(a.value()) << "," << ov.changes << "," << ov.max_burden << ","
         << fixed4(dpct) << "," << fixed4(zpct) << "\n";
    }
    write_text((dir / "alpha_curve.csv").string(), ac.str());
  }

  std::vector<double> levels = parse_levels(o.levels);
  std::ostringstream cc;
  cc << csv_comment(hash, o.seed) << "label,fraction,imbalance\n";
  for (const char* label : {"efficient", "minimax"}) {
    const PortfolioEntry* e = pf.find(label);
    if (!e || !e->solution.assignment) continue;
    for (auto& [f, im] : partial_implementation_curve(inst, *e->solution.assignment, levels))
      cc << label << "," << format_double(f) << "," << im << "\n";
  }
  write_text((dir / "curves.csv").string(), cc.str());

  std::cout << "wrote " << dir.string() << " (istar=" << istar << ", " << pf.entries.size()
            << " entries)\n";
  if (o.summary) print_portfolio(pf);
  return portfolio_exit(pf);
}

// ---------------------------------------------------------------- export-lp

struct ExportOpts {
  std::string instance;
  std::string model = "stage1";
  std::string candidates;
  int64_t istar = -1;
  std::string istar_file;
  std::string alpha = "0.5";
  std::string omega = "0.5";
  std::string out = "model.lp";
};

int run_export(const ExportOpts& o) {
  json cfg{{"cmd", "export-lp"}, {"instance", o.instance}, {"model", o.model},
           {"candidates", o.candidates}, {"istar", o.istar}, {"istar_file", o.istar_file},
           {"alpha", o.alpha},   {"omega", o.omega}};
  Instance inst = Instance::load_file(o.instance);
  CandidateSets cands = load_candidates(inst, o.candidates);
  ModelKind kind = kind_from_name(o.model);
  int64_t istar = kind == ModelKind::Stage1
                      ? -1
                      : resolve_istar(o.istar, o.istar_file, inst, cands, "export-lp");
  ModelSpec spec = build_spec(inst, std::move(cands), kind, istar, Rational::parse(o.alpha),
                              Rational::parse(o.omega));
  std::string path = resolve_out(o.out);
  write_text(path, "\\ config=" + config_hash(cfg) + "\n" + export_lp(spec));
  std::cout << "wrote " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchOpts {
  std::vector<std::string> instances;
  std::string scorer;
  double q1 = 0.6, q2 = 0.9;
  std::string kappas = "1,3,5";
  std::string backend = "exact";
  uint64_t seed = 1;
  int64_t time_limit_ms = -1;
  int64_t node_limit = -1;
  std::string out = "bench.csv";
  bool summary = false;
};

int run_bench(const BenchOpts& o) {
  json cfg{{"cmd", "bench"},   {"instances", o.instances}, {"scorer", o.scorer},
           {"q1", o.q1},       {"q2", o.q2},               {"kappas", o.kappas},
           {"backend", o.backend}, {"seed", o.seed},       {"time_limit_ms", o.time_limit_ms},
           {"node_limit", o.node_limit}};
  ScorerModel model = ScorerModel::load_file(o.scorer);
  SolveLimits limits{o.time_limit_ms, o.node_limit};
  Backend backend = backend_from_name(o.backend);

  std::ostringstream out;
  out << csv_comment(config_hash(cfg), o.seed)
      << "instance,arcs,arcs_before,arcs_after,reduction_pct,istar_full,istar_filtered,"
         "istar_match,delta_full,delta_filtered,delta_match,time_full_ms,time_filtered_ms,"
         "runtime_ratio\n";
  int rc = 0;
  for (const std::string& file : o.instances) {
    Instance inst = Instance::load_file(file);
    CandidateSets full = full_candidates(inst);

    BetweennessReport rep = edge_betweenness_exact(inst);
    auto taus = quantile_thresholds(rep, o.q1, o.q2);
    KappaAssignment ka = assign_kappa(rep, taus, parse_kappas(o.kappas));
    CandidateSets filtered = top_kappa_candidates(inst, model, ka.kappa);

    auto pipeline = [&](const CandidateSets& cands) {
      ModelSpec s1 = build_stage1(inst, cands);
      Solution r1 = run_backend(s1, backend, limits, mix_seed(o.seed, 11));
      if (!r1.objective) return std::tuple<int64_t, int64_t, int64_t, bool>{-1, -1, 0, false};
      ModelSpec s2 = build_stage2_efficient(inst, cands, r1.objective->imbalance);
      Solution r2 = run_backend(s2, backend, limits, mix_seed(o.seed, 12));
      int64_t delta = r2.objective ? r2.objective->changes : -1;
      bool ok = status_exit(r1.status) == 0 && status_exit(r2.status) == 0;
      return std::tuple<int64_t, int64_t, int64_t, bool>{r1.objective->imbalance, delta,
                                                         r1.wall_ms + r2.wall_ms, ok};
    };
    auto [i_full, d_full, t_full, ok_full] = pipeline(full);
    auto [i_filt, d_filt, t_filt, ok_filt] = pipeline(filtered);
    if (!ok_full || !ok_filt) rc = 2;

    int64_t before = pair_count(full), after = pair_count(filtered);
    double red = before > 0
                     ? 100.0 * static_cast<double>(before - after) / static_cast<double>(before)
                     : 0.0;
    double ratio = t_filt > 0 ? static_cast<double>(t_full) / static_cast<double>(t_filt) : 0.0;
    out << fs::path(file).filename().string() << "," << inst.num_arcs() << "," << before << ","
        << after << "," << fixed4(red) << "," << i_full << "," << i_filt << ","
        << (i_full == i_filt ? 1 : 0) << "," << d_full << "," << d_filt << ","
        << (d_full == d_filt ? 1 : 0) << "," << t_full << "," << t_filt << "," << fixed4(ratio)
        << "\n";
    std::cout << file << ": pairs " << before << " -> " << after << " (" << fixed4(red)
              << "%), istar " << i_full << (i_full == i_filt ? " == " : " != ") << i_filt << "\n";
  }
  std::string path = resolve_out(o.out);
  write_text(path, out.str());
  std::cout << "wrote " << path << "\n";
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"fair resource substitution toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  GenOpts g;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic instance or a weekly pool");
  gen->add_option("--label", g.label, "class label recorded in the instance");
  gen->add_option("--schedulers", g.schedulers, "scheduler count");
  gen->add_option("--nodes", g.nodes, "node count");
  gen->add_option("--arcs", g.arcs, "arc count (>= nodes)");
  gen->add_option("--resources", g.resources, "resource count drawn from the matrix");
  gen->add_option("--collab", g.collab, "target share of cross-scheduler arcs");
  gen->add_option("--imbalance-min", g.i_lo, "inclusive lower bound on initial imbalance");
  gen->add_option("--imbalance-max", g.i_hi, "inclusive upper bound (-1: none)");
  gen->add_option("--seed", g.seed, "master seed");
  gen->add_option("--matrix", g.matrix_path, "compatibility CSV (default: builtin fleet table)");
  gen->add_option("--retry-budget", g.retry, "attempts to hit the imbalance band");
  gen->add_option("--out", g.out, "instance output path (single mode)");
  gen->add_option("--pool", g.pool, "if > 0, generate a weekly pool with references");
  gen->add_option("--alternates", g.alternates, "tied reference optima kept per week");
  gen->add_option("--out-dir", g.out_dir, "pool output directory");
  gen->callback([&] { rc = run_gen(g); });

  BetweennessOpts b;
  CLI::App* bw = app.add_subcommand("betweenness", "edge betweenness and kappa bands");
  bw->add_option("--instance", b.instance, "instance JSON")->required();
  bw->add_option("--samples", b.samples, "pivot sources (0: exact over all nodes)");
  bw->add_option("--seed", b.seed, "pivot sampling seed");
  bw->add_flag("--weighted", b.weighted, "miles-weighted shortest paths");
  bw->add_option("--q1", b.q1, "low/medium quantile");
  bw->add_option("--q2", b.q2, "medium/high quantile");
  bw->add_option("--kappas", b.kappas, "per-band candidate budgets low,medium,high");
  bw->add_option("--out", b.out, "CSV output path");
  bw->add_flag("--summary", b.summary, "print band table");
  bw->callback([&] { rc = run_betweenness(b); });

  TrainOpts t;
  CLI::App* tr = app.add_subcommand("train", "fit the resource scorer on a reference pool");
  tr->add_option("--refs", t.refs, "refs.csv from gen --pool")->required();
  tr->add_option("--out", t.out, "model output path");
  tr->add_option("--seed", t.seed, "init and batch-order seed");
  tr->add_option("--config", t.config_path, "training config JSON");
  tr->add_option("--epochs", t.epochs, "override: training epochs");
  tr->add_option("--embedding-dim", t.embedding_dim, "override: embedding width");
  tr->add_option("--lr", t.lr, "override: learning rate");
  tr->add_option("--dropout", t.dropout, "override: dropout rate");
  tr->add_option("--batch", t.batch, "override: batch size");
  tr->add_option("--hidden", t.hidden, "override: hidden widths, e.g. 128,64");
  tr->add_flag("--summary", t.summary, "print validation history");
  tr->callback([&] { rc = run_train(t); });

  ScoreOpts sc;
  CLI::App* scc = app.add_subcommand("score", "score one instance into filtered candidate sets");
  scc->add_option("--instance", sc.instance, "instance JSON")->required();
  scc->add_option("--scorer", sc.scorer, "trained model JSON")->required();
  scc->add_option("--q1", sc.q1, "low/medium quantile");
  scc->add_option("--q2", sc.q2, "medium/high quantile");
  scc->add_option("--kappas", sc.kappas, "per-band candidate budgets low,medium,high");
  scc->add_option("--samples", sc.samples, "betweenness pivots (0: exact)");
  scc->add_option("--seed", sc.seed, "pivot sampling seed");
  scc->add_flag("--weighted", sc.weighted, "miles-weighted betweenness");
  scc->add_option("--out", sc.out, "candidate-set output path");
  scc->add_option("--kappa-csv", sc.kappa_csv, "also write the betweenness/kappa CSV here");
  scc->add_flag("--summary", sc.summary, "print per-arc candidate table");
  scc->callback([&] { rc = run_score(sc); });

  SolveOpts so;
  CLI::App* sv = app.add_subcommand("solve", "solve one model with a chosen backend");
  sv->add_option("--instance", so.instance, "instance JSON")->required();
  sv->add_option("--model,--kind", so.model,
                 "stage1 | stage2-efficient | stage2-minimax | stage2-weighted | stage2-gini");
  sv->add_option("--candidates", so.candidates, "filtered candidate sets from score");
  sv->add_option("--istar", so.istar, "stage-1 optimum for the stage-2 cap");
  sv->add_option("--istar-file", so.istar_file, "stage-1 solution artifact carrying istar");
  sv->add_option("--alpha", so.alpha, "weighted model weight in [0,1]");
  sv->add_option("--omega", so.omega, "gini model weight in [0,1]");
  sv->add_option("--backend", so.backend, "exact | ils | brute");
  sv->add_option("--seed", so.seed, "heuristic seed");
  sv->add_option("--time-limit-ms", so.time_limit_ms, "exact-search time limit (-1: none)");
  sv->add_option("--node-limit", so.node_limit, "exact-search node limit (-1: none)");
  sv->add_option("--out", so.out, "solution output path");
  sv->add_flag("--summary", so.summary, "print burden table");
  sv->callback([&] { rc = run_solve(so); });

  SweepOpts sw;
  CLI::App* swc = app.add_subcommand("sweep", "solve a weight grid into a portfolio");
  swc->add_option("--instance", sw.instance, "instance JSON")->required();
  swc->add_option("--candidates", sw.candidates, "filtered candidate sets from score");
  swc->add_option("--istar", sw.istar, "stage-1 optimum");
  swc->add_option("--istar-file", sw.istar_file, "stage-1 solution artifact");
  swc->add_option("--alphas", sw.alphas, "weighted-model grid, e.g. 0,0.25,0.5,1");
  swc->add_option("--omegas", sw.omegas, "gini-model grid (mutually exclusive with --alphas)");
  swc->add_option("--backend", sw.backend, "exact | ils | brute");
  swc->add_option("--seed", sw.seed, "per-member heuristic seeds derive from this");
  swc->add_option("--time-limit-ms", sw.time_limit_ms, "per-member time limit");
  swc->add_option("--node-limit", sw.node_limit, "per-member node limit");
  swc->add_option("--out", sw.out, "portfolio JSON path");
  swc->add_option("--report", sw.report, "also write a per-entry CSV here");
  swc->add_flag("--summary", sw.summary, "print entry table");
  swc->callback([&] { rc = run_sweep(sw); });

  PortfolioOpts po;
  CLI::App* pc = app.add_subcommand("portfolio", "full pipeline: filter, stage 1, stage-2 suite");
  pc->add_option("--instance", po.instance, "instance JSON")->required();
  pc->add_option("--scorer", po.scorer, "trained model (omit to skip filtering)");
  pc->add_option("--q1", po.q1, "low/medium quantile");
  pc->add_option("--q2", po.q2, "medium/high quantile");
  pc->add_option("--kappas", po.kappas, "per-band candidate budgets low,medium,high");
  pc->add_option("--alphas", po.alphas, "weighted-model grid (empty: skip)");
  pc->add_option("--omegas", po.omegas, "gini-model grid (empty: skip)");
  pc->add_option("--backend", po.backend, "exact | ils | brute");
  pc->add_option("--seed", po.seed, "master seed");
  pc->add_option("--time-limit-ms", po.time_limit_ms, "per-solve time limit");
  pc->add_option("--node-limit", po.node_limit, "per-solve node limit");
  pc->add_option("--levels", po.levels, "partial-implementation fractions");
  pc->add_option("--out-dir", po.out_dir, "output directory");
  pc->add_flag("--summary", po.summary, "print entry table");
  pc->callback([&] { rc = run_portfolio(po); });

  ExportOpts ex;
  CLI::App* exc = app.add_subcommand("export-lp", "write one model as CPLEX-LP text");
  exc->add_option("--instance", ex.instance, "instance JSON")->required();
  exc->add_option("--model,--kind", ex.model, "model kind (as in solve)");
  exc->add_option("--candidates", ex.candidates, "filtered candidate sets");
  exc->add_option("--istar", ex.istar, "stage-1 optimum for stage-2 kinds");
  exc->add_option("--istar-file", ex.istar_file, "stage-1 solution artifact");
  exc->add_option("--alpha", ex.alpha, "weighted model weight");
  exc->add_option("--omega", ex.omega, "gini model weight");
  exc->add_option("--out", ex.out, "LP output path");
  exc->callback([&] { rc = run_export(ex); });

  BenchOpts be;
  CLI::App* bec = app.add_subcommand("bench", "compare solving with and without filtering");
  bec->add_option("instances", be.instances, "instance JSON files")->required();
  bec->add_option("--scorer", be.scorer, "trained model JSON")->required();
  bec->add_option("--q1", be.q1, "low/medium quantile");
  bec->add_option("--q2", be.q2, "medium/high quantile");
  bec->add_option("--kappas", be.kappas, "per-band candidate budgets low,medium,high");
  bec->add_option("--backend", be.backend, "exact | ils | brute");
  bec->add_option("--seed", be.seed, "seed");
  bec->add_option("--time-limit-ms", be.time_limit_ms, "per-solve time limit");
  bec->add_option("--node-limit", be.node_limit, "per-solve node limit");
  bec->add_option("--out", be.out, "bench CSV path");
  bec->add_flag("--summary", be.summary, "print per-instance lines");
  bec->callback([&] { rc = run_bench(be); });

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("resub");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace resub
