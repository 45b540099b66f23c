#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "abcmc/errors.hpp"
#include "abcmc/experiments.hpp"
#include "abcmc/parallel.hpp"
#include "abcmc/rng.hpp"
#include "abcmc/stats.hpp"

using namespace abcmc;

namespace {

const std::vector<std::string> kExperimentIds{
    "fig1", "fig2", "fig3", "fig4", "fig5",
    "fig6", "validate_gl", "validate_popgen"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::filesystem::path scratch_dir(const std::string& leaf) {
  auto dir = std::filesystem::temp_directory_path() / "abcmc_test_experiments" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Tiny two-model setup that runs in well under a second.
ExperimentConfig tiny_config(const std::filesystem::path& out) {
  ExperimentConfig cfg;
  cfg.model1 = "gaussian";
  cfg.model2 = "laplace";
  cfg.statistic_sets = {{StatisticSpec::parse("mad")}};
  cfg.sample_sizes = {40, 60};
  cfg.replications = 3;
  cfg.abc.n_total = 400;
  cfg.abc.tolerance_quantile = 0.05;
  cfg.true_param_m1 = {0.0};
  cfg.true_param_m2 = {0.0};
  cfg.seed = SeedSpec{424242, 0};
  cfg.output_dir = out.string();
  return cfg;
}

std::size_t scaled_oracle(std::size_t x, double s) {
  const auto r = static_cast<std::size_t>(
      std::llround(static_cast<double>(x) * s));
  return r > 0 ? r : 1;
}

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field_path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("named experiments expand to the golden configs") {
  const std::filesystem::path golden_dir(ABCMC_GOLDEN_DIR);
  for (const auto& id : kExperimentIds) {
    CAPTURE(id);
    const ExperimentConfig cfg = expand_config(id);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.experiment == id);
    CHECK(cfg.to_json_string() == read_file(golden_dir / (id + ".json")));
  }
  CHECK_THROWS_AS(expand_config("fig7"), ConfigError);
  CHECK(field_of([] { expand_config("fig7"); }) == "experiment");
}

TEST_CASE("config json round trip preserves every field") {
  for (const auto& id : kExperimentIds) {
    CAPTURE(id);
    const ExperimentConfig cfg = expand_config(id);
    const std::string once = cfg.to_json_string();
    const ExperimentConfig back = ExperimentConfig::from_json_string(once);
    CHECK(back.to_json_string() == once);
    CHECK(back.is_validation() == cfg.is_validation());
    CHECK(back.seed.root_seed == cfg.seed.root_seed);
  }

  CHECK(field_of([] { ExperimentConfig::from_json_string("not json"); }) ==
        "<root>");
  CHECK(field_of([] { ExperimentConfig::from_json_string("{}"); }) != "<no error>");
}

TEST_CASE("config validation names the offending field") {
  const ExperimentConfig base = expand_config("fig2");

  auto mutated = [&](const std::function<void(ExperimentConfig&)>& edit) {
    ExperimentConfig cfg = base;
    edit(cfg);
    return field_of([&] { cfg.validate(); });
  };

  CHECK(mutated([](ExperimentConfig& c) { c.model1 = "cauchy"; }) == "model1");
  CHECK(mutated([](ExperimentConfig& c) { c.model2 = "popgen2"; }) == "model2");
  CHECK(mutated([](ExperimentConfig& c) { c.statistic_sets.clear(); }) ==
        "statistic_sets");
  CHECK(mutated([](ExperimentConfig& c) { c.statistic_sets.push_back({}); }) ==
        "statistic_sets[1]");
  CHECK(mutated([](ExperimentConfig& c) {
          c.statistic_sets[0].push_back(StatisticSpec::parse("dmu12"));
        }) == "statistic_sets[0]");
  CHECK(mutated([](ExperimentConfig& c) { c.sample_sizes.clear(); }) ==
        "sample_sizes");
  CHECK(mutated([](ExperimentConfig& c) { c.sample_sizes = {1}; }) ==
        "sample_sizes");
  CHECK(mutated([](ExperimentConfig& c) { c.replications = 0; }) ==
        "replications");
  CHECK(mutated([](ExperimentConfig& c) { c.abc.n_total = 101; }) == "abc");
  CHECK(mutated([](ExperimentConfig& c) { c.abc.tolerance_quantile = 0.0; }) ==
        "abc");
  CHECK(mutated([](ExperimentConfig& c) {
          c.abc.distance.weights = {1.0, 2.0};
        }) == "abc.distance.weights");
  CHECK(mutated([](ExperimentConfig& c) { c.true_param_m1 = {0.0, 1.0}; }) ==
        "true_param_m1");
  CHECK(mutated([](ExperimentConfig& c) { c.true_param_m2 = {}; }) ==
        "true_param_m2");
  CHECK(mutated([](ExperimentConfig& c) {
          c.validation = ValidationParams{1, 0.05};
        }) == "validation.n_predictive");
  CHECK(mutated([](ExperimentConfig& c) {
          c.validation = ValidationParams{500, 1.0};
        }) == "validation.alpha");

  // Population models reject scalar-only statistics the same way.
  ExperimentConfig pg = expand_config("fig6");
  pg.statistic_sets[0].push_back(StatisticSpec::parse("mad"));
  CHECK(field_of([&] { pg.validate(); }) == "statistic_sets[0]");
}

TEST_CASE("scale factor shrinks budgets but never the quantile levels") {
  for (const auto& id : kExperimentIds) {
    for (double s : {0.1, 0.25, 2.0}) {
      CAPTURE(id);
      CAPTURE(s);
      const ExperimentConfig base = expand_config(id);
      ExperimentConfig cfg = base;
      apply_scale(cfg, s);

      CHECK(cfg.abc.n_total == 2 * scaled_oracle(base.abc.n_total / 2, s));
      CHECK(cfg.replications == scaled_oracle(base.replications, s));
      CHECK(cfg.abc.tolerance_quantile == base.abc.tolerance_quantile);
      if (base.popgen.has_value()) {
        CHECK(cfg.popgen->n_loci == scaled_oracle(base.popgen->n_loci, s));
        CHECK(cfg.popgen->n_diploid == scaled_oracle(base.popgen->n_diploid, s));
        for (std::size_t i = 0; i < base.sample_sizes.size(); ++i) {
          CHECK(cfg.sample_sizes[i] ==
                std::max<std::size_t>(2, scaled_oracle(base.sample_sizes[i], s)));
        }
      } else {
        CHECK(cfg.sample_sizes == base.sample_sizes);
      }
      if (base.validation.has_value()) {
        CHECK(cfg.validation->n_predictive == base.validation->n_predictive);
        CHECK(cfg.validation->alpha == base.validation->alpha);
      }
    }
  }

  ExperimentConfig cfg = expand_config("fig1");
  const std::size_t n_before = cfg.abc.n_total;
  apply_scale(cfg, 1.0);
  CHECK(cfg.abc.n_total == n_before);
  CHECK_THROWS_AS(apply_scale(cfg, 0.0), ConfigError);
  CHECK_THROWS_AS(apply_scale(cfg, -2.0), ConfigError);
}

TEST_CASE("replication records survive the csv round trip") {
  RngStream rng(SeedSpec{31337, 0});
  std::vector<ReplicationRecord> originals;
  for (int rep = 0; rep < 1000; ++rep) {
    ReplicationRecord r;
    r.stat_set = rep % 2 == 0 ? "mean+mad" : "dmu13+dmu23";
    r.sample_size = 1 + rng.uniform_index(10000);
    r.replication = rng.uniform_index(500);
    r.true_model = 1 + static_cast<int>(rng.uniform_index(2));
    const std::size_t dim = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < dim; ++i) r.true_params.push_back(rng.normal());

    if (rng.uniform01() < 0.5) {
      r.tolerance = std::exp(rng.normal());
      r.accepted_total = 1 + rng.uniform_index(1000);
      r.accepted_m1 = rng.uniform_index(*r.accepted_total + 1);
      r.accepted_m2 = *r.accepted_total - *r.accepted_m1;
      r.posterior_prob_m1 = static_cast<double>(*r.accepted_m1) /
                            static_cast<double>(*r.accepted_total);
      r.bayes_factor_12 = *r.accepted_m2 == 0
                              ? std::numeric_limits<double>::infinity()
                              : static_cast<double>(*r.accepted_m1) /
                                    static_cast<double>(*r.accepted_m2);
    } else {
      r.val_statistic = std::abs(rng.normal()) * 10.0;
      r.val_dof = 1 + rng.uniform_index(4);
      r.val_p_value = rng.uniform01();
      r.val_regularized = rng.uniform01() < 0.2;
      r.val_decision = *r.val_p_value < 0.05
                           ? "reject_h0_statistic_usable"
                           : "fail_to_reject_h0_statistic_inadequate";
      r.val_tolerance_m1 = std::exp(rng.normal());
      r.val_tolerance_m2 = std::exp(rng.normal());
    }
    originals.push_back(std::move(r));
  }

  std::ostringstream csv;
  csv << "# free-form comment\n" << records_csv_header() << "\n";
  for (const auto& r : originals) csv << record_to_csv_line(r) << "\n";

  const auto parsed = parse_records_csv(csv.str());
  REQUIRE(parsed.size() == originals.size());
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const auto& a = originals[i];
    const auto& b = parsed[i];
    REQUIRE(a.stat_set == b.stat_set);
    REQUIRE(a.sample_size == b.sample_size);
    REQUIRE(a.replication == b.replication);
    REQUIRE(a.true_model == b.true_model);
    REQUIRE(a.true_params == b.true_params);
    REQUIRE(a.tolerance == b.tolerance);
    REQUIRE(a.accepted_total == b.accepted_total);
    REQUIRE(a.accepted_m1 == b.accepted_m1);
    REQUIRE(a.accepted_m2 == b.accepted_m2);
    REQUIRE(a.posterior_prob_m1 == b.posterior_prob_m1);
    REQUIRE(a.bayes_factor_12 == b.bayes_factor_12);
    REQUIRE(a.val_statistic == b.val_statistic);
    REQUIRE(a.val_dof == b.val_dof);
    REQUIRE(a.val_p_value == b.val_p_value);
    REQUIRE(a.val_regularized == b.val_regularized);
    REQUIRE(a.val_decision == b.val_decision);
    REQUIRE(a.val_tolerance_m1 == b.val_tolerance_m1);
    REQUIRE(a.val_tolerance_m2 == b.val_tolerance_m2);
  }
}

TEST_CASE("run_experiment: outputs, determinism and resume") {
  const auto dir = scratch_dir("tiny");
  const ExperimentConfig cfg = tiny_config(dir);

  const ExperimentOutputs out = run_experiment(cfg);
  // 1 statistic set x 2 sample sizes x 3 replications x 2 true models.
  CHECK(out.records.size() == 12);
  const std::string records_once = read_file(out.records_path);
  const std::string summary_once = read_file(out.summary_path);
  CHECK(read_file(out.config_path) == cfg.to_json_string());
  CHECK(records_once.rfind("# abcmc records v1\n", 0) == 0);

  // Summary quartiles recomputed from the records themselves.
  const auto summary = nlohmann::json::parse(summary_once);
  CHECK(summary.at("version") == "abcmc-summary-v1");
  const auto& cells = summary.at("cells");
  REQUIRE(cells.size() == 4);
  for (const auto& cell : cells) {
    CHECK(cell.at("metric") == "posterior_prob_m1");
    CHECK(cell.at("count") == 3);
    std::vector<double> values;
    for (const auto& rec : out.records) {
      if (rec.stat_set == cell.at("stat_set").get<std::string>() &&
          rec.sample_size == cell.at("n").get<std::size_t>() &&
          rec.true_model == cell.at("true_model").get<int>()) {
        values.push_back(rec.posterior_prob_m1.value());
      }
    }
    REQUIRE(values.size() == 3);
    std::sort(values.begin(), values.end());
    CHECK(cell.at("min").get<double>() == values.front());
    CHECK(cell.at("max").get<double>() == values.back());
    CHECK(cell.at("median").get<double>() == values[1]);
  }

  // A rerun on top of completed outputs reproduces them byte for byte.
  run_experiment(cfg);
  CHECK(read_file(out.records_path) == records_once);
  CHECK(read_file(out.summary_path) == summary_once);

  // Resume: drop the summary and all but five record lines, then rerun.
  {
    std::istringstream in(records_once);
    std::ostringstream trimmed;
    std::string line;
    int kept = 0;
    while (std::getline(in, line) && kept < 7) {
      trimmed << line << "\n";
      kept += 1;
    }
    std::ofstream file(out.records_path, std::ios::binary);
    file << trimmed.str();
    std::filesystem::remove(out.summary_path);
  }
  run_experiment(cfg);
  CHECK(read_file(out.records_path) == records_once);
  CHECK(read_file(out.summary_path) == summary_once);

  // Worker count changes nothing.
  const auto dir4 = scratch_dir("tiny_threads");
  ExperimentConfig cfg4 = cfg;
  cfg4.output_dir = dir4.string();
  set_max_threads(4);
  run_experiment(cfg4);
  set_max_threads(0);
  CHECK(read_file(dir4 / "records.csv") == records_once);

  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir4);
}

TEST_CASE("run_experiment: validation mode emits p-values and decisions") {
  const auto dir = scratch_dir("tiny_validation");
  ExperimentConfig cfg;
  cfg.model1 = "gaussian";
  cfg.model2 = "laplace";
  cfg.statistic_sets = {{StatisticSpec::parse("mean")}};
  cfg.sample_sizes = {30};
  cfg.replications = 2;
  cfg.abc.n_total = 200;
  cfg.abc.tolerance_quantile = 0.1;
  cfg.validation = ValidationParams{50, 0.05};
  cfg.true_param_m1 = {0.0};
  cfg.true_param_m2 = {0.0};
  cfg.seed = SeedSpec{515151, 0};
  cfg.output_dir = dir.string();

  const ExperimentOutputs out = run_experiment(cfg);
  REQUIRE(out.records.size() == 2);
  for (const auto& rec : out.records) {
    CHECK(rec.true_model == 1);
    CHECK_FALSE(rec.posterior_prob_m1.has_value());
    CHECK(rec.val_dof == 1);
    CHECK(rec.val_p_value.has_value());
    CHECK(rec.val_decision.has_value());
    CHECK((*rec.val_p_value < 0.05) ==
          (*rec.val_decision == "reject_h0_statistic_usable"));
  }

  const auto summary = nlohmann::json::parse(read_file(out.summary_path));
  const auto& cells = summary.at("cells");
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].at("metric") == "p_value");
  CHECK(cells[0].at("count") == 2);
  CHECK(cells[0].contains("rejection_rate"));

  std::filesystem::remove_all(dir);
}

TEST_CASE("compatibility table covers every set and truth") {
  const std::string csv = emit_compatibility_table(expand_config("fig2"));
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "stat_set,true_model,mu0,inf_m1,inf_m2,compatible_m1,compatible_m2,"
        "verdict");
  CHECK(lines[1].rfind("mad,1,", 0) == 0);
  CHECK(lines[2].rfind("mad,2,", 0) == 0);
  CHECK(lines[1].find("discriminant") != std::string::npos);

  // Location statistics cannot separate the pair: both rows agree.
  const std::string loc = emit_compatibility_table(expand_config("fig1"));
  std::size_t non = 0;
  std::istringstream lin(loc);
  while (std::getline(lin, line)) {
    if (line.find("non-discriminant") != std::string::npos) non += 1;
  }
  CHECK(non == 2);
}
