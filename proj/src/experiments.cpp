#include "abcmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "abcmc/compat.hpp"
#include "abcmc/format.hpp"
#include "abcmc/parallel.hpp"

namespace abcmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kConfigVersion = "abcmc-config-v1";
constexpr const char* kSummaryVersion = "abcmc-summary-v1";
constexpr const char* kRecordsBanner = "# abcmc records v1";

constexpr std::uint64_t kTableTag = 1;
constexpr std::uint64_t kObservedTag = 2;

bool is_popgen_id(const std::string& id) { return id.rfind("popgen", 0) == 0; }

std::string join_params(const std::vector<double>& params) {
  std::string out;
  for (double p : params) {
    if (!out.empty()) out += ';';
    out += format_double(p);
  }
  return out;
}

std::vector<double> split_params(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ';')) out.push_back(parse_double(cell));
  return out;
}

const json& require_field(const json& j, const char* key,
                          const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(path, "missing field");
  }
  return j.at(key);
}

template <typename T>
T field_as(const json& j, const char* key, const std::string& path) {
  const json& node = require_field(j, key, path);
  try {
    return node.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(path, "invalid value");
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j["experiment"] = cfg.experiment;
  j["model1"] = cfg.model1;
  j["model2"] = cfg.model2;
  json sets = json::array();
  for (const auto& set : cfg.statistic_sets) {
    json names = json::array();
    for (const auto& spec : set) names.push_back(spec.name());
    sets.push_back(std::move(names));
  }
  j["statistic_sets"] = std::move(sets);
  j["sample_sizes"] = cfg.sample_sizes;
  j["replications"] = cfg.replications;
  j["abc"] = {
      {"n_total", cfg.abc.n_total},
      {"tolerance_quantile", cfg.abc.tolerance_quantile},
      {"distance",
       {{"kind", distance_kind_name(cfg.abc.distance.kind)},
        {"weights", cfg.abc.distance.weights}}},
  };
  if (cfg.popgen.has_value()) {
    j["popgen"] = {
        {"ne", cfg.popgen->ne},
        {"t_recent", cfg.popgen->t_recent},
        {"t_ancient", cfg.popgen->t_ancient},
        {"n_diploid", cfg.popgen->n_diploid},
        {"n_loci", cfg.popgen->n_loci},
    };
  } else {
    j["popgen"] = nullptr;
  }
  if (cfg.validation.has_value()) {
    j["validation"] = {
        {"n_predictive", cfg.validation->n_predictive},
        {"alpha", cfg.validation->alpha},
    };
  } else {
    j["validation"] = nullptr;
  }
  j["true_param_m1"] = cfg.true_param_m1;
  j["true_param_m2"] = cfg.true_param_m2;
  j["seed"] = {{"root_seed", cfg.seed.root_seed},
               {"stream_id", cfg.seed.stream_id}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::string csv_optional(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

std::string csv_optional(const std::optional<std::size_t>& v) {
  return v.has_value() ? std::to_string(*v) : std::string();
}

}  // namespace

void ExperimentConfig::validate() const {
  auto check_model = [&](const std::string& id, const char* field) {
    try {
      model_by_name(id, popgen);
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  };
  check_model(model1, "model1");
  check_model(model2, "model2");
  if (is_popgen_id(model1) != is_popgen_id(model2)) {
    throw ConfigError("model2", "cannot mix scalar and population models");
  }
  const bool popgen_pair = is_popgen_id(model1);

  if (statistic_sets.empty()) {
    throw ConfigError("statistic_sets", "at least one statistic set required");
  }
  for (std::size_t i = 0; i < statistic_sets.size(); ++i) {
    const auto& set = statistic_sets[i];
    const std::string path = "statistic_sets[" + std::to_string(i) + "]";
    if (set.empty()) throw ConfigError(path, "empty statistic set");
    for (const auto& spec : set) {
      const bool needs_popgen = spec.kind == StatisticSpec::Kind::delta_mu_sq;
      if (needs_popgen != popgen_pair) {
        throw ConfigError(path, "statistic '" + spec.name() +
                                    "' does not apply to model '" + model1 +
                                    "'");
      }
    }
  }

  if (sample_sizes.empty()) {
    throw ConfigError("sample_sizes", "at least one sample size required");
  }
  for (std::size_t n : sample_sizes) {
    if (n < 2) throw ConfigError("sample_sizes", "sample sizes must be >= 2");
  }
  if (replications == 0) {
    throw ConfigError("replications", "must be >= 1");
  }

  try {
    abc.validate();
  } catch (const std::exception& e) {
    throw ConfigError("abc", e.what());
  }
  if (!abc.distance.weights.empty()) {
    for (const auto& set : statistic_sets) {
      if (set.size() != abc.distance.weights.size()) {
        throw ConfigError("abc.distance.weights",
                          "weight length does not match every statistic set");
      }
    }
  }
  if (popgen.has_value()) {
    try {
      popgen->validate();
    } catch (const std::exception& e) {
      throw ConfigError("popgen", e.what());
    }
  }

  const ModelSpec spec1 = model_by_name(model1, popgen);
  const ModelSpec spec2 = model_by_name(model2, popgen);
  if (true_param_m1.size() != spec1.param_dim) {
    throw ConfigError("true_param_m1", "expected dimension " +
                                           std::to_string(spec1.param_dim));
  }
  if (true_param_m2.size() != spec2.param_dim) {
    throw ConfigError("true_param_m2", "expected dimension " +
                                           std::to_string(spec2.param_dim));
  }

  if (validation.has_value()) {
    if (validation->n_predictive < 2) {
      throw ConfigError("validation.n_predictive", "must be >= 2");
    }
    if (!(validation->alpha > 0.0 && validation->alpha < 1.0)) {
      throw ConfigError("validation.alpha", "must lie in (0,1)");
    }
  }
}

std::string ExperimentConfig::to_json_string() const {
  return config_to_json(*this).dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.experiment = field_as<std::string>(j, "experiment", "experiment");
  cfg.model1 = field_as<std::string>(j, "model1", "model1");
  cfg.model2 = field_as<std::string>(j, "model2", "model2");

  const json& sets = require_field(j, "statistic_sets", "statistic_sets");
  if (!sets.is_array()) throw ConfigError("statistic_sets", "expected array");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string path = "statistic_sets[" + std::to_string(i) + "]";
    if (!sets[i].is_array()) throw ConfigError(path, "expected array");
    std::vector<StatisticSpec> parsed;
    for (const auto& name : sets[i]) {
      try {
        parsed.push_back(StatisticSpec::parse(name.get<std::string>()));
      } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
      }
    }
    cfg.statistic_sets.push_back(std::move(parsed));
  }

  cfg.sample_sizes =
      field_as<std::vector<std::size_t>>(j, "sample_sizes", "sample_sizes");
  cfg.replications = field_as<std::size_t>(j, "replications", "replications");

  const json& abc = require_field(j, "abc", "abc");
  cfg.abc.n_total = field_as<std::size_t>(abc, "n_total", "abc.n_total");
  cfg.abc.tolerance_quantile =
      field_as<double>(abc, "tolerance_quantile", "abc.tolerance_quantile");
  const json& dist = require_field(abc, "distance", "abc.distance");
  try {
    cfg.abc.distance.kind = parse_distance_kind(
        field_as<std::string>(dist, "kind", "abc.distance.kind"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("abc.distance.kind", e.what());
  }
  cfg.abc.distance.weights =
      field_as<std::vector<double>>(dist, "weights", "abc.distance.weights");

  if (j.contains("popgen") && !j.at("popgen").is_null()) {
    const json& pg = j.at("popgen");
    PopGenConfig p;
    p.ne = field_as<double>(pg, "ne", "popgen.ne");
    p.t_recent = field_as<double>(pg, "t_recent", "popgen.t_recent");
    p.t_ancient = field_as<double>(pg, "t_ancient", "popgen.t_ancient");
    p.n_diploid = field_as<std::size_t>(pg, "n_diploid", "popgen.n_diploid");
    p.n_loci = field_as<std::size_t>(pg, "n_loci", "popgen.n_loci");
    cfg.popgen = p;
  }
  if (j.contains("validation") && !j.at("validation").is_null()) {
    const json& val = j.at("validation");
    ValidationParams v;
    v.n_predictive =
        field_as<std::size_t>(val, "n_predictive", "validation.n_predictive");
    v.alpha = field_as<double>(val, "alpha", "validation.alpha");
    cfg.validation = v;
  }

  cfg.true_param_m1 =
      field_as<std::vector<double>>(j, "true_param_m1", "true_param_m1");
  cfg.true_param_m2 =
      field_as<std::vector<double>>(j, "true_param_m2", "true_param_m2");

  const json& seed = require_field(j, "seed", "seed");
  cfg.seed.root_seed =
      field_as<std::uint64_t>(seed, "root_seed", "seed.root_seed");
  cfg.seed.stream_id =
      field_as<std::uint64_t>(seed, "stream_id", "seed.stream_id");
  cfg.output_dir = field_as<std::string>(j, "output_dir", "output_dir");
  cfg.validate();
  return cfg;
}

ExperimentConfig expand_config(const std::string& experiment_id) {
  ExperimentConfig cfg;
  cfg.experiment = experiment_id;
  cfg.output_dir = "abcmc_out_" + experiment_id;

  auto scalar_sets = [](std::vector<std::vector<std::string>> names) {
    std::vector<std::vector<StatisticSpec>> sets;
    for (auto& list : names) sets.push_back(parse_statistic_list(list));
    return sets;
  };

  if (experiment_id == "fig1" || experiment_id == "fig2" ||
      experiment_id == "fig3" || experiment_id == "fig4" ||
      experiment_id == "validate_gl") {
    cfg.model1 = "gaussian";
    cfg.model2 = "laplace";
    cfg.true_param_m1 = {0.0};
    cfg.true_param_m2 = {0.0};
    cfg.replications = 100;
    cfg.abc.n_total = 10000;
    cfg.abc.tolerance_quantile = 0.01;
    cfg.abc.distance.kind = DistanceKind::euclidean;
    if (experiment_id == "fig1") {
      cfg.statistic_sets = scalar_sets({{"mean", "median", "variance"}});
      cfg.sample_sizes = {10, 100, 1000};
    } else if (experiment_id == "fig2") {
      cfg.statistic_sets = scalar_sets({{"mad"}});
      cfg.sample_sizes = {10, 100, 1000};
    } else if (experiment_id == "fig3") {
      cfg.statistic_sets = scalar_sets({{"moment4"}});
      cfg.sample_sizes = {100, 1000, 10000};
    } else if (experiment_id == "fig4") {
      cfg.statistic_sets = scalar_sets({{"moment4", "moment6"}});
      cfg.sample_sizes = {100, 1000, 10000};
      cfg.abc.distance.weights = {1.0, 0.01};
    } else {
      cfg.statistic_sets = scalar_sets(
          {{"mean", "median", "variance"}, {"mean", "median", "variance", "mad"}});
      cfg.sample_sizes = {1000};
      cfg.abc.n_total = 100000;
      cfg.validation = ValidationParams{500, 0.05};
    }
    return cfg;
  }

  if (experiment_id == "fig5") {
    cfg.model1 = "gk1";
    cfg.model2 = "gk2";
    cfg.statistic_sets =
        scalar_sets({{"q10"}, {"q10", "q90"}, {"q10", "q40", "q60", "q90"}});
    cfg.sample_sizes = {100, 1000, 10000};
    cfg.replications = 100;
    cfg.abc.n_total = 10000;
    cfg.abc.tolerance_quantile = 0.01;
    cfg.abc.distance.kind = DistanceKind::l1;
    cfg.true_param_m1 = {2.0};
    cfg.true_param_m2 = {1.0, 2.0};
    return cfg;
  }

  if (experiment_id == "fig6" || experiment_id == "validate_popgen") {
    cfg.model1 = "popgen1";
    cfg.model2 = "popgen2";
    cfg.popgen = PopGenConfig{};
    cfg.replications = 100;
    cfg.abc.n_total = 200000;
    cfg.abc.tolerance_quantile = 0.005;
    cfg.abc.distance.kind = DistanceKind::euclidean;
    cfg.true_param_m1 = {0.005};
    cfg.true_param_m2 = {0.005};
    if (experiment_id == "fig6") {
      cfg.statistic_sets = scalar_sets(
          {{"dmu12"}, {"dmu13", "dmu23"}, {"dmu12", "dmu13", "dmu23"}});
      cfg.sample_sizes = {5, 50, 100};
    } else {
      cfg.statistic_sets = scalar_sets({{"dmu12"}, {"dmu13", "dmu23"}});
      cfg.sample_sizes = {100};
      cfg.validation = ValidationParams{500, 0.05};
    }
    return cfg;
  }

  throw ConfigError("experiment", "unknown experiment '" + experiment_id + "'");
}

void apply_scale(ExperimentConfig& cfg, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("scale", "must be a positive number");
  }
  if (scale == 1.0) return;
  auto scaled = [scale](std::size_t x) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(x) * scale)));
  };
  cfg.abc.n_total = 2 * scaled(cfg.abc.n_total / 2);
  cfg.replications = scaled(cfg.replications);
  if (cfg.popgen.has_value()) {
    cfg.popgen->n_loci = scaled(cfg.popgen->n_loci);
    cfg.popgen->n_diploid = scaled(cfg.popgen->n_diploid);
    for (auto& n : cfg.sample_sizes) n = std::max<std::size_t>(2, scaled(n));
  }
}

std::string records_csv_header() {
  return "stat_set,n,replication,true_model,true_params,tolerance,"
         "accepted_total,accepted_m1,accepted_m2,posterior_prob_m1,"
         "bayes_factor_12,val_statistic,val_dof,val_p_value,val_regularized,"
         "val_decision,val_tolerance_m1,val_tolerance_m2";
}

std::string record_to_csv_line(const ReplicationRecord& r) {
  std::ostringstream out;
  out << r.stat_set << ',' << r.sample_size << ',' << r.replication << ','
      << r.true_model << ',' << join_params(r.true_params) << ','
      << csv_optional(r.tolerance) << ',' << csv_optional(r.accepted_total)
      << ',' << csv_optional(r.accepted_m1) << ','
      << csv_optional(r.accepted_m2) << ','
      << csv_optional(r.posterior_prob_m1) << ','
      << csv_optional(r.bayes_factor_12) << ','
      << csv_optional(r.val_statistic) << ',' << csv_optional(r.val_dof)
      << ',' << csv_optional(r.val_p_value) << ','
      << (r.val_regularized.has_value() ? (*r.val_regularized ? "1" : "0") : "")
      << ',' << r.val_decision.value_or("") << ','
      << csv_optional(r.val_tolerance_m1) << ','
      << csv_optional(r.val_tolerance_m2);
  return out.str();
}

std::vector<ReplicationRecord> parse_records_csv(const std::string& text) {
  std::vector<ReplicationRecord> records;
  std::stringstream lines(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(18);
    ReplicationRecord r;
    r.stat_set = cells[0];
    r.sample_size = std::stoull(cells[1]);
    r.replication = std::stoull(cells[2]);
    r.true_model = std::stoi(cells[3]);
    r.true_params = split_params(cells[4]);
    auto opt_double = [&](const std::string& c) -> std::optional<double> {
      if (c.empty()) return std::nullopt;
      return parse_double(c);
    };
    auto opt_size = [&](const std::string& c) -> std::optional<std::size_t> {
      if (c.empty()) return std::nullopt;
      return std::stoull(c);
    };
    r.tolerance = opt_double(cells[5]);
    r.accepted_total = opt_size(cells[6]);
    r.accepted_m1 = opt_size(cells[7]);
    r.accepted_m2 = opt_size(cells[8]);
    r.posterior_prob_m1 = opt_double(cells[9]);
    r.bayes_factor_12 = opt_double(cells[10]);
    r.val_statistic = opt_double(cells[11]);
    r.val_dof = opt_size(cells[12]);
    r.val_p_value = opt_double(cells[13]);
    if (!cells[14].empty()) r.val_regularized = cells[14] == "1";
    if (!cells[15].empty()) r.val_decision = cells[15];
    r.val_tolerance_m1 = opt_double(cells[16]);
    r.val_tolerance_m2 = opt_double(cells[17]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

using RecordKey = std::tuple<std::string, std::size_t, std::size_t, int>;

RecordKey key_of(const ReplicationRecord& r) {
  return {r.stat_set, r.sample_size, r.replication, r.true_model};
}

AbcConfig config_for_set(const ExperimentConfig& cfg,
                         const std::vector<StatisticSpec>& set) {
  AbcConfig out = cfg.abc;
  if (out.distance.weights.empty()) {
    out.distance = WeightedDistanceSpec::unit(out.distance.kind, set.size());
  }
  return out;
}

json summary_cell(const std::string& stat_set, std::size_t n, int true_model,
                  const std::string& metric, std::vector<double> values) {
  json cell;
  cell["stat_set"] = stat_set;
  cell["n"] = n;
  cell["true_model"] = true_model;
  cell["metric"] = metric;
  cell["count"] = values.size();
  const Sample as_sample = Sample::from_values(values);
  cell["min"] = *std::min_element(values.begin(), values.end());
  cell["q25"] = empirical_quantile(values, 0.25);
  cell["median"] = stat_median(as_sample);
  cell["q75"] = empirical_quantile(values, 0.75);
  cell["max"] = *std::max_element(values.begin(), values.end());
  return cell;
}

}  // namespace

ExperimentOutputs run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path out_dir = cfg.output_dir.empty() ? fs::path(".")
                                                  : fs::path(cfg.output_dir);
  fs::create_directories(out_dir);

  const ModelSpec m1 = model_by_name(cfg.model1, cfg.popgen);
  const ModelSpec m2 = model_by_name(cfg.model2, cfg.popgen);
  const bool validation_mode = cfg.is_validation();
  const int truths_per_replication = validation_mode ? 1 : 2;

  ExperimentOutputs outputs;
  outputs.config_path = (out_dir / "config_expanded.json").string();
  outputs.records_path = (out_dir / "records.csv").string();
  outputs.summary_path = (out_dir / "summary.json").string();

  {
    std::ofstream config_file(outputs.config_path);
    if (!config_file) throw DomainError("cannot write " + outputs.config_path);
    config_file << cfg.to_json_string();
  }

  // Resume: records already on disk keep their slot and are not recomputed.
  std::map<RecordKey, ReplicationRecord> existing;
  if (fs::exists(outputs.records_path)) {
    std::ifstream in(outputs.records_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    for (auto& r : parse_records_csv(buffer.str())) {
      existing.emplace(key_of(r), std::move(r));
    }
  }

  std::vector<ReplicationRecord> records;
  for (std::size_t si = 0; si < cfg.statistic_sets.size(); ++si) {
    const auto& set = cfg.statistic_sets[si];
    const std::string set_name = statistic_set_name(set);
    const AbcConfig set_cfg = config_for_set(cfg, set);

    for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
      const std::size_t n = cfg.sample_sizes[ni];
      const std::size_t jobs =
          cfg.replications * static_cast<std::size_t>(truths_per_replication);

      std::vector<ReplicationRecord> cell(jobs);
      std::vector<std::size_t> missing;
      for (std::size_t job = 0; job < jobs; ++job) {
        const std::size_t r = job / truths_per_replication;
        const int truth = static_cast<int>(job % truths_per_replication) + 1;
        const RecordKey key{set_name, n, r, truth};
        auto found = existing.find(key);
        if (found != existing.end()) {
          cell[job] = found->second;
        } else {
          missing.push_back(job);
        }
      }

      if (!missing.empty()) {
        const SeedSpec table_seed =
            cfg.seed.child(kTableTag).child(si).child(ni);
        const SeedSpec observed_seed =
            cfg.seed.child(kObservedTag).child(si).child(ni);

        if (validation_mode) {
          const std::size_t per_model = cfg.abc.n_total / 2;
          const ReferenceTable t1 = build_model_table(
              m1, 1, set, per_model, n, table_seed.child(1));
          const ReferenceTable t2 = build_model_table(
              m2, 2, set, per_model, n, table_seed.child(2));
          parallel_for(missing.size(), [&](std::size_t mi) {
            const std::size_t job = missing[mi];
            const std::size_t r = job;
            const SeedSpec job_seed = observed_seed.child(r);
            RngStream rng(job_seed.child(0));
            const Sample observed =
                m1.simulate(cfg.true_param_m1, n, rng);
            const ValidationReport report = validate_with_tables(
                t1, t2, m1, m2, set, observed, set_cfg,
                cfg.validation->n_predictive, cfg.validation->alpha,
                job_seed.child(1));
            ReplicationRecord rec;
            rec.stat_set = set_name;
            rec.sample_size = n;
            rec.replication = r;
            rec.true_model = 1;
            rec.true_params = cfg.true_param_m1;
            rec.accepted_m1 = report.accepted_m1;
            rec.accepted_m2 = report.accepted_m2;
            rec.val_statistic = report.statistic;
            rec.val_dof = report.dof;
            rec.val_p_value = report.p_value;
            rec.val_regularized = report.regularized;
            rec.val_decision = validation_decision_name(report.decision);
            rec.val_tolerance_m1 = report.tolerance_m1;
            rec.val_tolerance_m2 = report.tolerance_m2;
            cell[job] = std::move(rec);
          });
        } else {
          const ReferenceTable table = build_reference_table(
              m1, m2, set, cfg.abc.n_total / 2, n, table_seed);
          parallel_for(missing.size(), [&](std::size_t mi) {
            const std::size_t job = missing[mi];
            const std::size_t r = job / 2;
            const int truth = static_cast<int>(job % 2) + 1;
            RngStream rng(observed_seed.child(job));
            const ModelSpec& truth_model = truth == 1 ? m1 : m2;
            const auto& truth_params =
                truth == 1 ? cfg.true_param_m1 : cfg.true_param_m2;
            const Sample observed = truth_model.simulate(truth_params, n, rng);
            const SummaryVector summary = compose_statistics(set, observed);
            const AbcResult res = run_rejection(table, summary, set_cfg);
            ReplicationRecord rec;
            rec.stat_set = set_name;
            rec.sample_size = n;
            rec.replication = r;
            rec.true_model = truth;
            rec.true_params = truth_params;
            rec.tolerance = res.tolerance;
            rec.accepted_total = res.accepted_total;
            rec.accepted_m1 = res.accepted_per_model[0];
            rec.accepted_m2 = res.accepted_per_model[1];
            rec.posterior_prob_m1 = res.posterior_prob_m1;
            rec.bayes_factor_12 = res.bayes_factor_12;
            cell[job] = std::move(rec);
          });
        }
      }

      for (auto& rec : cell) records.push_back(std::move(rec));
    }
  }

  {
    std::ostringstream out;
    out << kRecordsBanner << "\n" << records_csv_header() << "\n";
    for (const auto& rec : records) out << record_to_csv_line(rec) << "\n";
    std::ofstream file(outputs.records_path);
    if (!file) throw DomainError("cannot write " + outputs.records_path);
    file << out.str();
  }

  {
    json summary;
    summary["version"] = kSummaryVersion;
    summary["experiment"] = cfg.experiment;
    json cells = json::array();
    for (const auto& set : cfg.statistic_sets) {
      const std::string set_name = statistic_set_name(set);
      for (std::size_t n : cfg.sample_sizes) {
        for (int truth = 1; truth <= truths_per_replication; ++truth) {
          std::vector<double> values;
          std::size_t rejections = 0;
          for (const auto& rec : records) {
            if (rec.stat_set != set_name || rec.sample_size != n ||
                rec.true_model != truth) {
              continue;
            }
            if (validation_mode) {
              values.push_back(rec.val_p_value.value());
              if (rec.val_decision.value() == "reject_h0_statistic_usable") {
                ++rejections;
              }
            } else {
              values.push_back(rec.posterior_prob_m1.value());
            }
          }
          if (values.empty()) continue;
          json cell = summary_cell(
              set_name, n, truth,
              validation_mode ? "p_value" : "posterior_prob_m1", values);
          if (validation_mode) {
            cell["rejection_rate"] = static_cast<double>(rejections) /
                                     static_cast<double>(values.size());
          }
          cells.push_back(std::move(cell));
        }
      }
    }
    summary["cells"] = std::move(cells);
    std::ofstream file(outputs.summary_path);
    if (!file) throw DomainError("cannot write " + outputs.summary_path);
    file << summary.dump(2) << "\n";
  }

  outputs.records = std::move(records);
  return outputs;
}

std::string emit_compatibility_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const ModelSpec m1 = model_by_name(cfg.model1, cfg.popgen);
  const ModelSpec m2 = model_by_name(cfg.model2, cfg.popgen);

  std::ostringstream out;
  out << "stat_set,true_model,mu0,inf_m1,inf_m2,compatible_m1,compatible_m2,"
         "verdict\n";
  for (const auto& set : cfg.statistic_sets) {
    for (int truth = 1; truth <= 2; ++truth) {
      const auto& truth_params =
          truth == 1 ? cfg.true_param_m1 : cfg.true_param_m2;
      const CompatibilityReport report =
          compatibility_report(m1, m2, set, truth, truth_params);
      std::string mu0;
      for (double v : report.mu0) {
        if (!mu0.empty()) mu0 += ';';
        mu0 += format_double(v);
      }
      out << statistic_set_name(set) << ',' << truth << ',' << mu0 << ','
          << format_double(report.model1.infimum) << ','
          << format_double(report.model2.infimum) << ','
          << (report.model1.compatible ? 1 : 0) << ','
          << (report.model2.compatible ? 1 : 0) << ','
          << (report.discriminant ? "discriminant" : "non-discriminant")
          << "\n";
    }
  }
  return out.str();
}

}  // namespace abcmc
