// etlra: experiment runner for entrywise-transformed low-rank approximation.
//
//   etlra lra    --task relative|additive ...   sketch-and-solve LRA per seed
//   etlra reduce --instance file.json ...       OVP reduction harness per seed
//   etlra gen    --kind random-factors|planted-ovp|unit-norm ...
//   etlra bench  --task matvec-bench|leverage-check ...
//
// Exit codes: 0 ok, 1 runtime failure, 2 invalid config or generator
// parameters, 3 resource ceiling exceeded.

#include "etlra/etlra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace etlra;
using nlohmann::json;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string task = "relative";
  Index n = 64;
  Index d = 64;
  Index r = 3;
  int p = 2;
  Index k = 4;
  double eps = 0.5;
  std::vector<std::uint64_t> seeds{0};
  std::optional<Index> mS;
  std::optional<Index> mR;
  std::optional<Index> mT;
  int repetitions = 3;
  bool oracle = true;
  std::string output;
  unsigned threads = 0;

  // lra: optional factor files instead of generated instances.
  std::string u_path;
  std::string v_path;

  // reduce / gen planted-ovp.
  std::string instance;
  std::string backend = "sketch";
  Index s = 12;
  Index pairs = 1;
  double alpha = 0.25;
  Index planted_bound = 8;
  std::optional<double> tau;
  std::optional<Index> max_candidates;

  // gen.
  std::string kind = "random-factors";

  // bench.
  std::string transform = "power";
  Index t = 16;
};

const std::vector<std::string> kTasks{"relative", "additive", "reduction", "matvec-bench", "leverage-check", "gen"};

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  take(j, key, value);
  out = value;
}

void apply_json(const json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{
      "task", "n", "d", "r", "p", "k", "eps", "seeds", "seed", "mS", "mR", "mT", "repetitions", "oracle",
      "output", "threads", "U", "V", "instance", "backend", "s", "pairs", "alpha", "planted_bound", "tau",
      "max_candidates", "kind", "transform", "t"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");
  take(j, "task", cfg.task);
  take(j, "n", cfg.n);
  take(j, "d", cfg.d);
  take(j, "r", cfg.r);
  take(j, "p", cfg.p);
  take(j, "k", cfg.k);
  take(j, "eps", cfg.eps);
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    take(j, "seed", seed);
    cfg.seeds = {seed};
  }
  take(j, "seeds", cfg.seeds);
  take(j, "mS", cfg.mS);
  take(j, "mR", cfg.mR);
  take(j, "mT", cfg.mT);
  take(j, "repetitions", cfg.repetitions);
  take(j, "oracle", cfg.oracle);
  take(j, "output", cfg.output);
  take(j, "threads", cfg.threads);
  take(j, "U", cfg.u_path);
  take(j, "V", cfg.v_path);
  take(j, "instance", cfg.instance);
  take(j, "backend", cfg.backend);
  take(j, "s", cfg.s);
  take(j, "pairs", cfg.pairs);
  take(j, "alpha", cfg.alpha);
  take(j, "planted_bound", cfg.planted_bound);
  take(j, "tau", cfg.tau);
  take(j, "max_candidates", cfg.max_candidates);
  take(j, "kind", cfg.kind);
  take(j, "transform", cfg.transform);
  take(j, "t", cfg.t);
}

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  apply_json(j, cfg);
}

void validate(const ExperimentConfig& cfg) {
  if (std::find(kTasks.begin(), kTasks.end(), cfg.task) == kTasks.end())
    throw ConfigError("unknown task '" + cfg.task + "'");
  if (cfg.n < 1 || cfg.d < 1 || cfg.r < 1) throw ConfigError("n, d and r must be positive");
  if (cfg.p < 1) throw ConfigError("p must be positive");
  if (cfg.k < 1) throw ConfigError("k must be positive");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be positive");
  for (const auto& m : {cfg.mS, cfg.mR, cfg.mT})
    if (m && *m < 1) throw ConfigError("sketch dimensions must be positive");
  if (cfg.u_path.empty() != cfg.v_path.empty()) throw ConfigError("U and V files must be given together");
  if (cfg.task == "reduction") {
    if (cfg.p % 2 == 0) throw ConfigError("reduction needs odd p");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) throw ConfigError("alpha must lie in (0, 2)");
    if (cfg.backend != "sketch" && cfg.backend != "oracle") throw ConfigError("backend must be sketch or oracle");
    if (cfg.tau && !(*cfg.tau > 0.0 && *cfg.tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  }
  if ((cfg.task == "relative" || cfg.task == "additive") && cfg.p % 2 != 0)
    throw ConfigError(cfg.task + " LRA needs even p");
  if (cfg.task == "matvec-bench" && cfg.transform != "power" && cfg.transform != "abs-power" &&
      cfg.transform != "log1p-abs")
    throw ConfigError("transform must be power, abs-power or log1p-abs");
  if (cfg.task == "leverage-check" && cfg.t < 1) throw ConfigError("t must be positive");
}

// Runs fn(i) for i in [0, count) on a pool; results are placed by index.
std::vector<json> run_pool(std::size_t count, unsigned threads, const std::function<json(std::size_t)>& fn) {
  std::vector<json> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(count)));
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json stage_json(const StageTimes& t) {
  return {{"expand", t.expand}, {"sketch", t.sketch}, {"solve", t.solve}, {"verify", t.verify}};
}

json lra_record(const ExperimentConfig& cfg, std::uint64_t seed) {
  const FactoredMatrix fm = cfg.u_path.empty()
                                ? instances::random_factors(cfg.n, cfg.d, cfg.r, seed)
                                : FactoredMatrix(io::load_matrix_any(cfg.u_path), io::load_matrix_any(cfg.v_path));
  LraConfig lc;
  lc.rows_s = cfg.mS;
  lc.cols_r = cfg.mR;
  lc.tensor_m = cfg.mT;
  lc.repetitions = cfg.repetitions;
  const bool additive = cfg.task == "additive";
  RankKFactors rk = additive ? additive_lra(fm, cfg.p, cfg.k, cfg.eps, seed, lc)
                             : relative_lra(fm, cfg.p, cfg.k, cfg.eps, seed, lc);

  json rec;
  rec["task"] = cfg.task;
  rec["seed"] = seed;
  rec["n"] = fm.rows();
  rec["d"] = fm.cols();
  rec["r"] = fm.inner();
  rec["p"] = cfg.p;
  rec["k"] = cfg.k;
  rec["eps"] = cfg.eps;
  rec["degenerate"] = rk.degenerate;
  rec["repetition"] = rk.repetition;
  rec["surrogate_error"] = rk.surrogate_error;
  json times = stage_json(rk.timings);
  if (cfg.oracle) {
    const auto start = std::chrono::steady_clock::now();
    const Matrix dense = oracle::materialize(fm, ScalarTransform::power(cfg.p));
    const double achieved = oracle::eval_error(dense, rk);
    const Index kk = std::min<Index>(cfg.k, std::min(dense.rows(), dense.cols()));
    const double opt = oracle::best_rank_k_error(dense, kk);
    double bound = (1.0 + cfg.eps) * opt;
    if (additive) {
      const double l2 = compute_L2(fm, cfg.p);
      rec["l2"] = l2;
      bound += cfg.eps * cfg.eps * l2;
    }
    times["oracle"] = seconds(start);
    rec["achieved_error"] = achieved;
    rec["oracle_opt"] = opt;
    rec["bound"] = bound;
    rec["bound_satisfied"] = achieved <= bound;
  } else {
    rec["achieved_error"] = nullptr;
    rec["oracle_opt"] = nullptr;
    rec["bound_satisfied"] = nullptr;
  }
  rec["times"] = times;
  return rec;
}

json reduction_record(const ExperimentConfig& cfg, const std::optional<OvpInstance>& fixed, std::uint64_t seed) {
  OvpInstance inst;
  if (fixed) {
    inst = *fixed;
  } else {
    instances::PlantedOvpParams params;
    params.n = cfg.n;
    params.d = cfg.d;
    params.s = cfg.s;
    params.pairs = cfg.pairs;
    inst = instances::planted_ovp(params, seed);
  }
  ReductionConfig rc;
  rc.alpha = cfg.alpha;
  rc.planted_bound = cfg.planted_bound;
  rc.tau = cfg.tau;
  rc.max_candidates = cfg.max_candidates;
  const LraBackend backend = cfg.backend == "oracle" ? oracle_backend() : sketch_backend(cfg.eps);
  const auto start = std::chrono::steady_clock::now();
  const ReductionTrace trace = run_reduction(inst, cfg.p, backend, seed, rc);
  const double elapsed = seconds(start);

  json rec;
  rec["task"] = "reduction";
  rec["seed"] = seed;
  rec["n"] = inst.n();
  rec["d"] = inst.d();
  rec["s"] = inst.s();
  rec["p"] = cfg.p;
  rec["backend"] = cfg.backend;
  rec["decision"] = to_string(trace.decision);
  rec["decision_path"] = to_string(trace.path);
  rec["max_residual"] = trace.max_residual;
  rec["k"] = trace.k;
  rec["basis_width"] = trace.basis_width;
  rec["tau"] = trace.tau;
  rec["candidates"] = trace.candidates.size();
  rec["bailed_out"] = trace.bailed_out;
  rec["found_pair"] = trace.found_pair ? json{trace.found_pair->first, trace.found_pair->second} : json(nullptr);
  json planted = json::array();
  for (const auto& [i, j] : inst.planted) {
    json flipped = nullptr;
    if (inst.n() == inst.d()) flipped = trace.sign_column(i) * trace.sign_column(j) < 0.0;
    planted.push_back({{"pair", {i, j}}, {"flipped", flipped}});
  }
  rec["planted"] = planted;
  rec["times"] = {{"total", elapsed}};
  return rec;
}

ScalarTransform bench_transform(const ExperimentConfig& cfg) {
  if (cfg.transform == "abs-power") return ScalarTransform::abs_power(cfg.p);
  if (cfg.transform == "log1p-abs") return ScalarTransform::log1p_abs();
  return ScalarTransform::power(cfg.p);
}

json matvec_record(const ExperimentConfig& cfg, std::uint64_t seed) {
  const FactoredMatrix fm = instances::random_factors(cfg.n, cfg.d, cfg.r, seed);
  const Vector z = rng::uniform_matrix(cfg.d, 1, rng::hash(seed, 9));
  const ScalarTransform t = bench_transform(cfg);
  json rec;
  rec["task"] = "matvec-bench";
  rec["seed"] = seed;
  rec["n"] = cfg.n;
  rec["d"] = cfg.d;
  rec["r"] = cfg.r;
  rec["transform"] = t.name();
  auto start = std::chrono::steady_clock::now();
  const Vector dense = transformed_matvec(fm, t, z, MatvecMode::Dense);
  json times{{"dense", seconds(start)}};
  if (t.admits_linearization()) {
    start = std::chrono::steady_clock::now();
    const Vector implicit = transformed_matvec(fm, t, z, MatvecMode::Implicit);
    times["implicit"] = seconds(start);
    const double scale = std::max(dense.norm(), 1e-300);
    rec["relative_difference"] = (dense - implicit).norm() / scale;
  } else {
    rec["relative_difference"] = nullptr;
  }
  rec["times"] = times;
  return rec;
}

json leverage_record(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Matrix m = rng::uniform_matrix(cfg.n, cfg.t, seed);
  const auto start = std::chrono::steady_clock::now();
  const LeverageScores exact = exact_leverage(m);
  const double t_exact = seconds(start);
  const auto start2 = std::chrono::steady_clock::now();
  const LeverageScores approx = sketched_leverage(m, rng::hash(seed, 5));
  const double t_sketch = seconds(start2);
  Index good = 0;
  for (Index i = 0; i < m.rows(); ++i)
    if (approx.scores(i) >= 0.5 * exact.scores(i) && approx.scores(i) <= 2.0 * exact.scores(i)) ++good;
  json rec;
  rec["task"] = "leverage-check";
  rec["seed"] = seed;
  rec["n"] = cfg.n;
  rec["t"] = cfg.t;
  rec["rank"] = oracle::rank(m);
  rec["exact_sum"] = exact.rank_estimate;
  rec["sketched_sum"] = approx.rank_estimate;
  rec["fraction_within_2"] = static_cast<double>(good) / static_cast<double>(m.rows());
  rec["fell_back"] = approx.fell_back;
  rec["times"] = {{"exact", t_exact}, {"sketched", t_sketch}};
  return rec;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string summary_csv(const std::vector<json>& records) {
  if (records.empty()) return "";
  std::vector<std::string> columns;
  for (const auto& [key, value] : records.front().items())
    if (!value.is_object() && !value.is_array()) columns.push_back(key);
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << ",time_total\n";
  for (const auto& rec : records) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << (rec.contains(columns[c]) ? csv_cell(rec.at(columns[c])) : "");
    double total = 0.0;
    if (rec.contains("times"))
      for (const auto& [key, value] : rec.at("times").items()) total += value.get<double>();
    out << "," << total << "\n";
  }
  return out.str();
}

std::string summary_path(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension(".csv");
  if (p.string() == output) p += ".summary.csv";
  return p.string();
}

void emit(const ExperimentConfig& cfg, const std::vector<json>& records) {
  std::ostringstream lines;
  for (const auto& rec : records) lines << rec.dump() << "\n";
  if (cfg.output.empty()) {
    std::cout << lines.str();
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw io::FormatError("cannot open " + cfg.output + " for writing");
  out << lines.str();
  std::ofstream csv(summary_path(cfg.output));
  if (!csv) throw io::FormatError("cannot open " + summary_path(cfg.output) + " for writing");
  csv << summary_csv(records);
}

int run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::optional<OvpInstance> fixed;
  if (cfg.task == "reduction" && !cfg.instance.empty()) {
    try {
      fixed = io::load_instance(cfg.instance);
    } catch (const io::FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  if (!cfg.u_path.empty())
    for (const auto& path : {cfg.u_path, cfg.v_path})
      if (!std::filesystem::exists(path)) throw ConfigError("input file " + path + " does not exist");

  std::function<json(std::size_t)> job;
  if (cfg.task == "relative" || cfg.task == "additive")
    job = [&](std::size_t i) { return lra_record(cfg, cfg.seeds[i]); };
  else if (cfg.task == "reduction")
    job = [&](std::size_t i) { return reduction_record(cfg, fixed, cfg.seeds[i]); };
  else if (cfg.task == "matvec-bench")
    job = [&](std::size_t i) { return matvec_record(cfg, cfg.seeds[i]); };
  else
    job = [&](std::size_t i) { return leverage_record(cfg, cfg.seeds[i]); };

  emit(cfg, run_pool(cfg.seeds.size(), cfg.threads, job));
  return 0;
}

int run_gen(const ExperimentConfig& cfg) {
  if (cfg.output.empty()) throw ConfigError("gen needs --output");
  if (cfg.n < 1 || cfg.d < 1 || cfg.r < 1) throw ConfigError("n, d and r must be positive");
  const std::uint64_t seed = cfg.seeds.front();
  json summary{{"kind", cfg.kind}, {"seed", seed}};
  if (cfg.kind == "planted-ovp") {
    instances::PlantedOvpParams params;
    params.n = cfg.n;
    params.d = cfg.d;
    params.s = cfg.s;
    params.pairs = cfg.pairs;
    OvpInstance inst;
    try {
      inst = instances::planted_ovp(params, seed);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
    io::save_instance(cfg.output, inst);
    summary["files"] = {cfg.output};
    summary["orthogonal_pairs"] = orthogonal_pairs(inst).size();
  } else if (cfg.kind == "random-factors" || cfg.kind == "unit-norm") {
    const FactoredMatrix fm = cfg.kind == "unit-norm" ? instances::unit_norm_factors(cfg.n, cfg.d, cfg.r, seed)
                                                      : instances::random_factors(cfg.n, cfg.d, cfg.r, seed);
    io::save_matrix(cfg.output + ".U.bin", fm.u());
    io::save_matrix(cfg.output + ".V.bin", fm.v());
    summary["files"] = {cfg.output + ".U.bin", cfg.output + ".V.bin"};
    summary["l2_p"] = cfg.p;
    summary["l2"] = compute_L2(fm, cfg.p);
  } else {
    throw ConfigError("unknown generator kind '" + cfg.kind + "'");
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

// Options are bound to scratch holders; after parsing, only flags that were
// actually given override the config file.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> entries;

  template <typename T, typename Member>
  CLI::Option* add(CLI::App* app, const std::string& name, Member ExperimentConfig::*member,
                   const std::string& desc) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *holder, desc);
    entries.emplace_back(opt, [holder, member](ExperimentConfig& c) { c.*member = *holder; });
    return opt;
  }

  void apply(ExperimentConfig& cfg) const {
    for (const auto& [opt, fn] : entries)
      if (opt->count() > 0) fn(cfg);
  }
};

void add_common(CLI::App* app, Overrides& ov, std::string& config_path, std::optional<std::uint64_t>& num_seeds) {
  app->add_option("--config", config_path, "JSON experiment config; flags override its keys");
  ov.add<Index>(app, "--n", &ExperimentConfig::n, "rows");
  ov.add<Index>(app, "--d", &ExperimentConfig::d, "columns");
  ov.add<Index>(app, "--r", &ExperimentConfig::r, "factor width");
  ov.add<int>(app, "--p", &ExperimentConfig::p, "degree");
  ov.add<std::vector<std::uint64_t>>(app, "--seeds", &ExperimentConfig::seeds, "seed list")->delimiter(',');
  app->add_option("--num-seeds", num_seeds, "use seeds 0..N-1");
  ov.add<std::string>(app, "--output,-o", &ExperimentConfig::output, "output path (JSON-lines; CSV summary alongside)");
  ov.add<unsigned>(app, "--threads", &ExperimentConfig::threads, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"etlra: low-rank approximation of entrywise-transformed factored matrices"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::optional<std::uint64_t> num_seeds;

  auto* lra = app.add_subcommand("lra", "run relative_lra or additive_lra over seeds");
  add_common(lra, ov, config_path, num_seeds);
  ov.add<std::string>(lra, "--task", &ExperimentConfig::task, "relative or additive")
      ->check(CLI::IsMember({"relative", "additive"}));
  ov.add<Index>(lra, "--k", &ExperimentConfig::k, "target rank");
  ov.add<double>(lra, "--eps", &ExperimentConfig::eps, "accuracy");
  ov.add<Index>(lra, "--mS", &ExperimentConfig::mS, "rows of S");
  ov.add<Index>(lra, "--mR", &ExperimentConfig::mR, "columns of R");
  ov.add<Index>(lra, "--mT", &ExperimentConfig::mT, "TensorSketch rows");
  ov.add<int>(lra, "--repetitions", &ExperimentConfig::repetitions, "independent sketch draws per seed");
  ov.add<bool>(lra, "--oracle", &ExperimentConfig::oracle, "evaluate against the dense oracle (true/false)");
  ov.add<std::string>(lra, "--U", &ExperimentConfig::u_path, "left factor file (.bin or .csv)");
  ov.add<std::string>(lra, "--V", &ExperimentConfig::v_path, "right factor file (.bin or .csv)");

  auto* reduce = app.add_subcommand("reduce", "run the OVP reduction harness over seeds");
  add_common(reduce, ov, config_path, num_seeds);
  ov.add<std::string>(reduce, "--instance", &ExperimentConfig::instance, "instance JSON; otherwise planted per seed");
  ov.add<std::string>(reduce, "--backend", &ExperimentConfig::backend, "sketch or oracle");
  ov.add<Index>(reduce, "--s", &ExperimentConfig::s, "vector length for generated instances");
  ov.add<Index>(reduce, "--pairs", &ExperimentConfig::pairs, "planted pairs for generated instances");
  ov.add<double>(reduce, "--alpha", &ExperimentConfig::alpha, "additive budget");
  ov.add<double>(reduce, "--eps", &ExperimentConfig::eps, "sketch backend accuracy");
  ov.add<Index>(reduce, "--planted-bound", &ExperimentConfig::planted_bound, "bound on orthogonal pairs");
  ov.add<double>(reduce, "--tau", &ExperimentConfig::tau, "leverage threshold");
  ov.add<Index>(reduce, "--max-candidates", &ExperimentConfig::max_candidates, "bail out above this |S|");

  auto* gen = app.add_subcommand("gen", "generate an instance");
  add_common(gen, ov, config_path, num_seeds);
  ov.add<std::string>(gen, "--kind", &ExperimentConfig::kind, "random-factors, planted-ovp or unit-norm");
  ov.add<Index>(gen, "--s", &ExperimentConfig::s, "vector length (planted-ovp)");
  ov.add<Index>(gen, "--pairs", &ExperimentConfig::pairs, "planted pairs (planted-ovp)");

  auto* bench = app.add_subcommand("bench", "matvec and leverage diagnostics");
  add_common(bench, ov, config_path, num_seeds);
  ov.add<std::string>(bench, "--task", &ExperimentConfig::task, "matvec-bench or leverage-check")
      ->check(CLI::IsMember({"matvec-bench", "leverage-check"}));
  ov.add<std::string>(bench, "--transform", &ExperimentConfig::transform, "power, abs-power or log1p-abs");
  ov.add<Index>(bench, "--t", &ExperimentConfig::t, "matrix width (leverage-check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  if (*reduce) cfg.task = "reduction";
  if (*bench) cfg.task = "matvec-bench";
  if (*gen) cfg.task = "gen";
  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
    ov.apply(cfg);
    if (num_seeds) {
      cfg.seeds.resize(*num_seeds);
      for (std::uint64_t i = 0; i < *num_seeds; ++i) cfg.seeds[i] = i;
    }
    const bool task_ok = (*lra && (cfg.task == "relative" || cfg.task == "additive")) ||
                         (*reduce && cfg.task == "reduction") ||
                         (*bench && (cfg.task == "matvec-bench" || cfg.task == "leverage-check")) ||
                         (*gen && cfg.task == "gen");
    if (!task_ok) throw ConfigError("task '" + cfg.task + "' does not belong to this subcommand");
    if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
    return *gen ? run_gen(cfg) : run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "etlra: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "etlra: resource limit: " << e.what() << "\n";
    return 3;
  } catch (const ContractViolation& e) {
    std::cerr << "etlra: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "etlra: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedTransform& e) {
    std::cerr << "etlra: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const io::FormatError& e) {
    std::cerr << "etlra: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "etlra: " << e.what() << "\n";
    return 1;
  }
}
