#include "abcmc/abc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "abcmc/format.hpp"
#include "abcmc/parallel.hpp"

namespace abcmc {

using nlohmann::json;

void AbcConfig::validate() const {
  if (n_total == 0 || n_total % 2 != 0) {
    throw DomainError("abc.n_total must be positive and even");
  }
  if (!(tolerance_quantile > 0.0 && tolerance_quantile <= 1.0)) {
    throw DomainError("abc.tolerance_quantile must lie in (0,1]");
  }
}

std::array<std::size_t, 2> ReferenceTable::counts_per_model() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (const auto& row : rows) {
    counts[static_cast<std::size_t>(row.model_index - 1)] += 1;
  }
  return counts;
}

void ReferenceTable::validate() const {
  for (const auto& row : rows) {
    if (row.model_index != 1 && row.model_index != 2) {
      throw DomainError("reference table row with model index outside {1,2}");
    }
    if (row.summary.size() != dim()) {
      throw ShapeError("reference table row summary dimension mismatch");
    }
  }
}

namespace {

ReferenceTableRow simulate_row(const ModelSpec& model, int model_index,
                               const std::vector<StatisticSpec>& specs,
                               std::size_t sample_size, const SeedSpec& seed) {
  RngStream rng(seed);
  ReferenceTableRow row;
  row.model_index = model_index;
  row.params = model.sample_prior(rng);
  const Sample sample = model.simulate(row.params, sample_size, rng);
  row.summary = compose_statistics(specs, sample);
  return row;
}

}  // namespace

ReferenceTable build_model_table(const ModelSpec& model, int model_index,
                                 const std::vector<StatisticSpec>& specs,
                                 std::size_t n_rows, std::size_t sample_size,
                                 const SeedSpec& seed) {
  if (model_index != 1 && model_index != 2) {
    throw DomainError("model index must be 1 or 2");
  }
  if (n_rows == 0) throw DomainError("table needs at least one row");
  if (sample_size == 0) throw DomainError("sample size must be positive");
  if (specs.empty()) throw DomainError("empty statistic list");

  ReferenceTable table;
  table.specs = specs;
  table.seed = seed;
  table.sample_size = sample_size;
  table.model_names[static_cast<std::size_t>(model_index - 1)] = model.name;
  table.param_dims = {model.param_dim, model.param_dim};
  table.rows.resize(n_rows);

  const SeedSpec base = seed.child(static_cast<std::uint64_t>(model_index));
  parallel_for(n_rows, [&](std::size_t r) {
    table.rows[r] =
        simulate_row(model, model_index, specs, sample_size, base.child(r));
  });
  return table;
}

ReferenceTable build_reference_table(const ModelSpec& m1, const ModelSpec& m2,
                                     const std::vector<StatisticSpec>& specs,
                                     std::size_t n_per_model,
                                     std::size_t sample_size,
                                     const SeedSpec& seed) {
  ReferenceTable table = build_model_table(m1, 1, specs, n_per_model,
                                           sample_size, seed);
  const ReferenceTable second =
      build_model_table(m2, 2, specs, n_per_model, sample_size, seed);
  table.rows.insert(table.rows.end(), second.rows.begin(), second.rows.end());
  table.model_names = {m1.name, m2.name};
  table.param_dims = {m1.param_dim, m2.param_dim};
  return table;
}

AbcResult run_rejection(const ReferenceTable& table,
                        const SummaryVector& observed, const AbcConfig& cfg) {
  cfg.validate();
  table.validate();
  if (table.rows.empty()) throw DomainError("reference table is empty");
  if (observed.size() != table.dim()) {
    throw ShapeError("observed summary dimension " +
                     std::to_string(observed.size()) +
                     " does not match table dimension " +
                     std::to_string(table.dim()));
  }
  WeightedDistanceSpec dist = cfg.distance;
  if (dist.weights.empty()) {
    dist = WeightedDistanceSpec::unit(dist.kind, table.dim());
  }

  std::vector<double> distances(table.rows.size());
  parallel_for(table.rows.size(), [&](std::size_t i) {
    distances[i] = weighted_distance(table.rows[i].summary, observed, dist);
  });

  AbcResult result;
  result.tolerance = empirical_quantile(distances, cfg.tolerance_quantile);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (distances[i] <= result.tolerance) {
      const auto m = static_cast<std::size_t>(table.rows[i].model_index - 1);
      result.accepted_per_model[m] += 1;
      result.accepted_params[m].push_back(table.rows[i].params);
    }
  }
  result.accepted_total =
      result.accepted_per_model[0] + result.accepted_per_model[1];
  result.posterior_prob_m1 = static_cast<double>(result.accepted_per_model[0]) /
                             static_cast<double>(result.accepted_total);
  result.posterior_prob_m2 = 1.0 - result.posterior_prob_m1;
  result.bayes_factor_12 =
      result.accepted_per_model[1] == 0
          ? std::numeric_limits<double>::infinity()
          : static_cast<double>(result.accepted_per_model[0]) /
                static_cast<double>(result.accepted_per_model[1]);
  return result;
}

std::vector<SummaryVector> posterior_predictive_sample(
    const AbcResult& result, int model_index, const ModelSpec& model,
    const std::vector<StatisticSpec>& specs, std::size_t n_draws,
    std::size_t sample_size, const SeedSpec& seed) {
  if (model_index != 1 && model_index != 2) {
    throw DomainError("model index must be 1 or 2");
  }
  if (n_draws == 0) throw DomainError("predictive sample size must be positive");
  const auto& accepted =
      result.accepted_params[static_cast<std::size_t>(model_index - 1)];
  if (accepted.empty()) {
    throw InsufficientAcceptanceError(
        "no accepted parameters for model " + std::to_string(model_index) +
        "; enlarge the table or the tolerance quantile");
  }
  std::vector<SummaryVector> draws(n_draws);
  parallel_for(n_draws, [&](std::size_t l) {
    RngStream rng(seed.child(l));
    const auto& theta = accepted[rng.uniform_index(accepted.size())];
    const Sample sample = model.simulate(theta, sample_size, rng);
    draws[l] = compose_statistics(specs, sample);
  });
  return draws;
}

std::string AbcResult::to_json_string() const {
  json j;
  j["tolerance"] = tolerance;
  j["accepted_total"] = accepted_total;
  j["accepted_m1"] = accepted_per_model[0];
  j["accepted_m2"] = accepted_per_model[1];
  j["posterior_prob_m1"] = posterior_prob_m1;
  j["posterior_prob_m2"] = posterior_prob_m2;
  if (std::isinf(bayes_factor_12)) {
    j["bayes_factor_12"] = "inf";
  } else {
    j["bayes_factor_12"] = bayes_factor_12;
  }
  j["accepted_params_m1"] = accepted_params[0];
  j["accepted_params_m2"] = accepted_params[1];
  return j.dump(2) + "\n";
}

void ReferenceTable::write_csv(const std::filesystem::path& csv_path,
                               const std::filesystem::path& sidecar_path) const {
  const std::size_t param_cols = std::max(param_dims[0], param_dims[1]);
  std::ostringstream out;
  out << "model_index";
  for (std::size_t k = 1; k <= param_cols; ++k) out << ",param_" << k;
  for (std::size_t k = 1; k <= dim(); ++k) out << ",T_" << k;
  out << "\n";
  for (const auto& row : rows) {
    out << row.model_index;
    for (std::size_t k = 0; k < param_cols; ++k) {
      out << ',';
      if (k < row.params.size()) out << format_double(row.params[k]);
    }
    for (double t : row.summary) out << ',' << format_double(t);
    out << "\n";
  }
  std::ofstream file(csv_path);
  if (!file) throw DomainError("cannot write " + csv_path.string());
  file << out.str();

  json sidecar;
  sidecar["format"] = "abcmc-reference-table-v1";
  std::vector<std::string> spec_names;
  for (const auto& s : specs) spec_names.push_back(s.name());
  sidecar["statistics"] = spec_names;
  sidecar["seed"] = {{"root_seed", seed.root_seed}, {"stream_id", seed.stream_id}};
  sidecar["sample_size"] = sample_size;
  sidecar["model_names"] = model_names;
  sidecar["param_dims"] = param_dims;
  sidecar["n_rows"] = rows.size();
  std::ofstream side(sidecar_path);
  if (!side) throw DomainError("cannot write " + sidecar_path.string());
  side << sidecar.dump(2) << "\n";
}

ReferenceTable ReferenceTable::read_csv(
    const std::filesystem::path& csv_path,
    const std::filesystem::path& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw DomainError("cannot read " + sidecar_path.string());
  json sidecar = json::parse(side);
  ReferenceTable table;
  for (const auto& name : sidecar.at("statistics")) {
    table.specs.push_back(StatisticSpec::parse(name.get<std::string>()));
  }
  table.seed.root_seed = sidecar.at("seed").at("root_seed").get<std::uint64_t>();
  table.seed.stream_id = sidecar.at("seed").at("stream_id").get<std::uint64_t>();
  table.sample_size = sidecar.at("sample_size").get<std::size_t>();
  table.model_names[0] = sidecar.at("model_names")[0].get<std::string>();
  table.model_names[1] = sidecar.at("model_names")[1].get<std::string>();
  table.param_dims[0] = sidecar.at("param_dims")[0].get<std::size_t>();
  table.param_dims[1] = sidecar.at("param_dims")[1].get<std::size_t>();

  std::ifstream file(csv_path);
  if (!file) throw DomainError("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(file, line)) {
    throw DomainError("empty reference table file " + csv_path.string());
  }
  const std::size_t param_cols = std::max(table.param_dims[0], table.param_dims[1]);
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    ReferenceTableRow row;
    std::getline(ss, cell, ',');
    row.model_index = std::stoi(cell);
    for (std::size_t k = 0; k < param_cols; ++k) {
      std::getline(ss, cell, ',');
      if (!cell.empty()) row.params.push_back(parse_double(cell));
    }
    for (std::size_t k = 0; k < table.dim(); ++k) {
      std::getline(ss, cell, ',');
      row.summary.push_back(parse_double(cell));
    }
    table.rows.push_back(std::move(row));
  }
  table.validate();
  return table;
}

}  // namespace abcmc
