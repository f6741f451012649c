// Command-line front end: simulate, rank, infer, plan, breakeven, forecast, figures.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dqa/econ.hpp"
#include "dqa/experiment.hpp"
#include "dqa/infer.hpp"
#include "dqa/io.hpp"
#include "dqa/rank.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericError = 2;

struct Common {
  bool pretty = false;
  std::string out_path;
};

void emit(const Common& common, const std::string& text) {
  if (common.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out_path);
  if (!out) throw dqa::Error(dqa::ErrorCode::InvalidParameters, "cannot write " + common.out_path);
  out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string pretty_rank(const std::vector<dqa::RankEntry>& entries) {
  std::string s = fmt::format("{:<6}{:<24}{:>14}{:>11}{:>9}\n", "rank", "source", "mean_err",
                              "campaigns", "skipped");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    s += fmt::format("{:<6}{:<24}{:>14.6f}{:>11}{:>9}\n", i + 1, e.source_id, e.mean_err,
                     e.per_campaign_err.size(), e.skipped_campaigns);
  }
  return s;
}

std::string pretty_reports(const std::vector<dqa::QualityReport>& reports) {
  std::string s;
  for (const auto& r : reports) {
    s += fmt::format("#{} {}  mean_err={:.6f}  campaigns={}{}\n", r.rank, r.source_id,
                     r.mean_relative_err, r.n_campaigns, r.unique ? "" : "  (non-unique fit)");
    const char* names[] = {"alpha", "beta", "gamma"};
    for (int row = 0; row < 3; ++row) {
      s += fmt::format("  {:<6}", names[row]);
      for (int col = 0; col < 3; ++col) {
        s += fmt::format(" {:>9.6f}", r.inferred->p(row, col));
        if (r.ci_half_widths) s += fmt::format(" ±{:<9.6f}", (*r.ci_half_widths)(row, col));
      }
      s += "\n";
    }
    if (!r.ci_half_widths) s += "  intervals unavailable with 3 campaigns\n";
  }
  return s;
}

std::string pretty_grid(const std::vector<dqa::GridPoint>& grid) {
  std::string s = fmt::format("{:<14}{:>10}{:>8}{:>16}{:>8}\n", "profile", "campaigns", "zeta",
                              "mean|err a1|", "trials");
  for (const auto& g : grid) {
    s += fmt::format("{:<14}{:>10}{:>8.3f}{:>16.6f}{:>8}\n", g.profile, g.num_campaigns, g.zeta,
                     g.mean_abs_err_alpha1, g.trials);
  }
  return s;
}

dqa::Scenario scenario_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  dqa::Scenario s = dqa::load_scenario(path);
  if (seed) s.seed = *seed;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assess tagging data sources against aggregate ground truth"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--pretty", common.pretty, "Human-readable tables instead of JSON/CSV");
  app.add_option("--out", common.out_path, "Write output to this file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run every trial of a scenario file");
  std::string sim_scenario;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--scenario", sim_scenario, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim_seed, "Override the scenario's base seed");

  // rank
  auto* rank = app.add_subcommand("rank", "Rank sources by mean relative error");
  std::string rank_file;
  rank->add_option("--campaigns", rank_file, "Campaign file")->required()->check(CLI::ExistingFile);

  // infer
  auto* infer = app.add_subcommand("infer", "Infer predictive values per source");
  std::string infer_file;
  double xi = dqa::kDefaultXi;
  double delta = 0.05;
  bool no_normalize = false;
  infer->add_option("--campaigns", infer_file, "Campaign file")->required()->check(CLI::ExistingFile);
  infer->add_option("--xi", xi, "Allowed |alpha1 - beta2|")->check(CLI::NonNegativeNumber);
  infer->add_option("--delta", delta, "Interval level is 1 - delta")->check(CLI::Range(0.0, 1.0));
  infer->add_flag("--no-normalize", no_normalize, "Fit raw counts (campaign sizes must match)");

  // plan
  auto* plan = app.add_subcommand("plan", "Impressions needed per source");
  int categories = 2;
  double margin = 0.05, significance = 0.05, power = 0.90;
  std::optional<std::int64_t> sources;
  std::optional<double> plan_cpi;
  plan->add_option("--categories", categories, "Number of categories c")->required();
  plan->add_option("--margin", margin, "Detectable difference");
  plan->add_option("--significance", significance, "Two-sided significance level");
  plan->add_option("--power", power, "Statistical power");
  plan->add_option("--sources", sources, "Number of sources to evaluate (adds total cost)");
  plan->add_option("--cpi", plan_cpi, "Cost per impression (adds total cost)");

  // breakeven
  auto* breakeven = app.add_subcommand("breakeven", "Maximum data cost per impression");
  double cpi = 0.0, alpha1_data = 0.0, alpha1_free = 0.0;
  breakeven->add_option("--cpi", cpi, "Effective cost per impression")->required();
  breakeven->add_option("--alpha1-data", alpha1_data, "Precision with the data source")->required();
  breakeven->add_option("--alpha1-free", alpha1_free, "Precision without targeting data")->required();

  // forecast
  auto* forecast = app.add_subcommand("forecast", "Expected users in the target category");
  std::string tag_file, table_file, combiner = "mean";
  forecast->add_option("--tags", tag_file, "user_id,tags file")->required()->check(CLI::ExistingFile);
  forecast->add_option("--table", table_file, "category,precision file")->required()->check(CLI::ExistingFile);
  forecast->add_option("--combiner", combiner, "max|min|mean|median")
      ->check(CLI::IsMember({"max", "min", "mean", "median"}));

  // figures
  auto* figures = app.add_subcommand("figures", "Plot-ready grids for the synthetic studies");
  std::string fig_scenario;
  int figure = 3;
  std::optional<std::uint64_t> fig_seed;
  figures->add_option("--scenario", fig_scenario, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
  figures->add_option("--figure", figure, "3: error vs campaigns, 4: error vs noise")
      ->required()
      ->check(CLI::IsMember({3, 4}));
  figures->add_option("--seed", fig_seed, "Override the scenario's base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*simulate) {
      const auto s = scenario_with_seed(sim_scenario, sim_seed);
      std::ostringstream out;
      dqa::write_trials_csv(out, dqa::run_scenario(s));
      emit(common, out.str());
    } else if (*rank) {
      const auto entries = dqa::rank_sources(dqa::parse_campaign_file(rank_file));
      if (common.pretty) {
        emit(common, pretty_rank(entries));
      } else {
        nlohmann::json j = nlohmann::json::array();
        for (std::size_t i = 0; i < entries.size(); ++i) {
          auto e = dqa::to_json(entries[i]);
          e["rank"] = i + 1;
          j.push_back(e);
        }
        emit(common, dump(j));
      }
    } else if (*infer) {
      const auto reports =
          dqa::assess_sources(dqa::parse_campaign_file(infer_file), xi, delta, !no_normalize);
      if (common.pretty) {
        emit(common, pretty_reports(reports));
      } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(dqa::to_json(r));
        emit(common, dump(j));
      }
    } else if (*plan) {
      const auto p = dqa::plan_sample_size(categories, margin, significance, power);
      nlohmann::json j = dqa::to_json(p);
      if (sources || plan_cpi) {
        const auto d = sources.value_or(1);
        const double c = plan_cpi.value_or(0.0);
        if (d < 1 || c < 0.0) {
          throw dqa::Error(dqa::ErrorCode::InvalidParameters, "need --sources >= 1 and --cpi >= 0");
        }
        j["sources"] = d;
        j["cpi"] = c;
        j["total_impressions"] = d * p.required_impressions;
        j["total_cost"] = static_cast<double>(d) * static_cast<double>(p.required_impressions) * c;
      }
      if (common.pretty) {
        std::string s = fmt::format("required_impressions {}\n", p.required_impressions);
        if (j.contains("total_cost")) {
          s += fmt::format("total_impressions {}\ntotal_cost {}\n", j["total_impressions"].get<std::int64_t>(),
                           dqa::format_number(j["total_cost"].get<double>()));
        }
        emit(common, s);
      } else {
        emit(common, dump(j));
      }
    } else if (*breakeven) {
      const double threshold = dqa::max_data_cpi(cpi, alpha1_data, alpha1_free);
      if (common.pretty) {
        emit(common, fmt::format("max_data_cpi {}{}\n", dqa::format_number(threshold),
                                 threshold < 0.0 ? "  (source never pays off)" : ""));
      } else {
        emit(common, dump({{"cpi", cpi},
                           {"alpha1_data", alpha1_data},
                           {"alpha1_free", alpha1_free},
                           {"max_data_cpi", threshold},
                           {"worth_buying", threshold > 0.0}}));
      }
    } else if (*forecast) {
      std::ifstream tags(tag_file), table(table_file);
      const auto users = dqa::parse_tagged_users(tags);
      const double expected = dqa::forecast_category(users, dqa::parse_precision_table(table),
                                                     dqa::parse_combiner(combiner));
      if (common.pretty) {
        emit(common, fmt::format("expected_count {} of {} users\n", dqa::format_number(expected),
                                 users.size()));
      } else {
        emit(common, dump({{"expected_count", expected},
                           {"users", users.size()},
                           {"combiner", combiner}}));
      }
    } else if (*figures) {
      const auto s = scenario_with_seed(fig_scenario, fig_seed);
      const auto grid = figure == 3 ? dqa::campaign_count_grid(s) : dqa::noise_grid(s);
      std::ostringstream out;
      if (common.pretty) {
        out << pretty_grid(grid);
      } else {
        dqa::write_grid_csv(out, grid);
      }
      emit(common, out.str());
    }
  } catch (const dqa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dqa::is_input_error(e.code()) ? kInputError : kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
