#include "dqa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace dqa {

InputError::InputError(ErrorCode code, int line, std::string field, const std::string& what)
    : Error(code, fmt::format("line {}{}: {}", line, field.empty() ? "" : ", field " + field, what)),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::int64_t parse_count(const std::string& text, int line, const char* field) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InputError(ErrorCode::ParseError, line, field,
                     fmt::format("expected an integer count, got '{}'", t));
  }
  return v;
}

double parse_double(const std::string& text, int line, const char* field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InputError(ErrorCode::ParseError, line, field,
                     fmt::format("expected a number, got '{}'", t));
  }
  return v;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

SourceCampaigns parse_campaigns(std::istream& in) {
  static constexpr const char* kFields[] = {"campaign_id", "source_id", "population", "d_plus",
                                            "d_minus",     "g_plus",    "g_minus"};
  SourceCampaigns out;
  std::map<std::string, std::pair<CampaignAggregate, int>> truth_by_campaign;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || trim(line).front() == '#') continue;
    const auto cells = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      for (std::size_t i = 0; i < std::size(kFields); ++i) {
        if (i >= cells.size() || trim(cells[i]) != kFields[i]) {
          throw InputError(ErrorCode::ParseError, lineno, kFields[i],
                           fmt::format("header must be '{}'", kCampaignHeader));
        }
      }
      continue;
    }
    if (cells.size() != std::size(kFields)) {
      throw InputError(ErrorCode::ParseError, lineno,
                       cells.size() < std::size(kFields) ? kFields[cells.size()] : "",
                       fmt::format("expected {} fields, got {}", std::size(kFields), cells.size()));
    }
    RawCampaign raw;
    raw.campaign_id = trim(cells[0]);
    const std::string source_id = trim(cells[1]);
    if (raw.campaign_id.empty()) throw InputError(ErrorCode::ParseError, lineno, kFields[0], "empty id");
    if (source_id.empty()) throw InputError(ErrorCode::ParseError, lineno, kFields[1], "empty id");
    raw.population = parse_count(cells[2], lineno, kFields[2]);
    raw.d_plus = parse_count(cells[3], lineno, kFields[3]);
    raw.d_minus = parse_count(cells[4], lineno, kFields[4]);
    raw.g_plus = parse_count(cells[5], lineno, kFields[5]);
    raw.g_minus = parse_count(cells[6], lineno, kFields[6]);

    CampaignAggregate agg;
    try {
      agg = validate_aggregate(raw);
    } catch (const Error& e) {
      throw InputError(ErrorCode::ValidationError, lineno, "", e.what());
    }
    const auto [it, inserted] = truth_by_campaign.try_emplace(raw.campaign_id, agg, lineno);
    if (!inserted && (it->second.first.truth != agg.truth ||
                      it->second.first.population != agg.population)) {
      throw InputError(ErrorCode::ValidationError, lineno, "",
                       fmt::format("campaign '{}' disagrees with line {} on population or "
                                   "ground truth",
                                   raw.campaign_id, it->second.second));
    }
    out[source_id].push_back(std::move(agg));
  }
  return out;
}

SourceCampaigns parse_campaign_file(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_campaigns(in);
}

void write_campaigns(std::ostream& out, const SourceCampaigns& per_source) {
  out << kCampaignHeader << '\n';
  for (const auto& [source_id, campaigns] : per_source) {
    for (const auto& c : campaigns) {
      const RawCampaign r = c.to_raw();
      out << fmt::format("{},{},{},{},{},{},{}\n", r.campaign_id, source_id, r.population,
                         r.d_plus, r.d_minus, r.g_plus, r.g_minus);
    }
  }
}

namespace {

PredictiveValues profile_from_yaml(const YAML::Node& node, const std::string& name) {
  PredictiveValues::Matrix m;
  const char* rows[] = {"alpha", "beta", "gamma"};
  for (int r = 0; r < 3; ++r) {
    const YAML::Node row = node[rows[r]];
    if (!row || !row.IsSequence() || row.size() != 3) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("profile '{}' needs a 3-element '{}' list", name, rows[r]));
    }
    for (int j = 0; j < 3; ++j) m(r, j) = row[static_cast<std::size_t>(j)].as<double>();
  }
  PredictiveValues values(m);
  if (!values.is_valid()) {
    throw Error(ErrorCode::InvalidProfile, fmt::format("profile '{}' has rows that are not "
                                                       "probability distributions", name));
  }
  return values;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  try {
    const YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw Error(ErrorCode::ParseError, "scenario must be a mapping");
    if (!root["seed"]) throw Error(ErrorCode::ParseError, "scenario needs an explicit 'seed'");

    Scenario s;
    s.seed = root["seed"].as<std::uint64_t>();
    if (root["trials"]) s.trials = root["trials"].as<int>();
    if (root["xi"]) s.xi = root["xi"].as<double>();
    if (const auto split = root["split"]) {
      s.split.fixed_per_tag = split["fixed_per_tag"].as<int>(s.split.fixed_per_tag);
      s.split.uniform_remainder = split["uniform_remainder"].as<int>(s.split.uniform_remainder);
    }
    if (root["campaign_counts"]) s.campaign_counts = root["campaign_counts"].as<std::vector<int>>();
    if (root["zeta_grid"]) s.zeta_grid = root["zeta_grid"].as<std::vector<double>>();
    if (root["noise_campaigns"]) s.noise_campaigns = root["noise_campaigns"].as<int>();

    const YAML::Node profiles = root["profiles"];
    if (!profiles || !profiles.IsSequence() || profiles.size() == 0) {
      throw Error(ErrorCode::ParseError, "scenario needs a non-empty 'profiles' list");
    }
    for (const auto& p : profiles) {
      const auto name = p["name"].as<std::string>();
      s.profiles.push_back({name, profile_from_yaml(p, name)});
    }

    if (s.trials < 1) throw Error(ErrorCode::InvalidParameters, "trials must be >= 1");
    if (!(s.xi >= 0.0)) throw Error(ErrorCode::InvalidParameters, "xi must be >= 0");
    if (s.split.fixed_per_tag < 0 || s.split.uniform_remainder < 0 || s.split.total() < 1) {
      throw Error(ErrorCode::InvalidSplit, "split counts must be nonnegative and non-empty");
    }
    for (int k : s.campaign_counts) {
      if (k < 3) throw Error(ErrorCode::InvalidParameters, "campaign counts must be >= 3");
    }
    if (s.noise_campaigns < 3) throw Error(ErrorCode::InvalidParameters, "noise_campaigns must be >= 3");
    for (double z : s.zeta_grid) {
      if (!(z >= 0.0 && z <= 0.35)) throw Error(ErrorCode::InvalidParameters, "zeta outside [0, 0.35]");
    }
    return s;
  } catch (const YAML::Exception& e) {
    throw InputError(ErrorCode::ParseError, e.mark.line + 1, "", e.msg);
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  auto in = open(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

PrecisionTable parse_precision_table(std::istream& in) {
  PrecisionTable table;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || trim(line).front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 2) {
      throw InputError(ErrorCode::ParseError, lineno, "", "expected 'category,precision'");
    }
    const double p = parse_double(cells[1], lineno, "precision");
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError(ErrorCode::ValidationError, lineno, "precision", "must lie in [0, 1]");
    }
    table[trim(cells[0])] = p;
  }
  return table;
}

std::vector<std::vector<std::string>> parse_tagged_users(std::istream& in) {
  std::vector<std::vector<std::string>> users;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || trim(line).front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError(ErrorCode::ParseError, lineno, "tags", "expected 'user_id,tags'");
    }
    std::vector<std::string> tags;
    for (const auto& t : split(line.substr(comma + 1), ';')) {
      if (auto tag = trim(t); !tag.empty()) tags.push_back(std::move(tag));
    }
    users.push_back(std::move(tags));
  }
  return users;
}

nlohmann::json to_json(const PredictiveValues& values) {
  const auto row = [&](int r) {
    return nlohmann::json::array({values.p(r, 0), values.p(r, 1), values.p(r, 2)});
  };
  return {{"alpha", row(0)}, {"beta", row(1)}, {"gamma", row(2)}};
}

PredictiveValues predictive_values_from_json(const nlohmann::json& j) {
  PredictiveValues::Matrix m;
  const char* rows[] = {"alpha", "beta", "gamma"};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j.at(rows[r]).at(static_cast<std::size_t>(c)).get<double>();
  return PredictiveValues(m);
}

nlohmann::json to_json(const QualityReport& report) {
  nlohmann::json j = {
      {"source_id", report.source_id},
      {"rank", report.rank},
      {"mean_relative_err", report.mean_relative_err},
      {"n_campaigns", report.n_campaigns},
      {"skipped_campaigns", report.skipped_campaigns},
      {"ci_level", report.ci_level},
      {"unique", report.unique},
  };
  j["inferred"] = report.inferred ? to_json(*report.inferred) : nlohmann::json(nullptr);
  j["ci_half_widths"] = report.ci_half_widths ? to_json(PredictiveValues(*report.ci_half_widths))
                                              : nlohmann::json(nullptr);
  return j;
}

QualityReport quality_report_from_json(const nlohmann::json& j) {
  QualityReport r;
  r.source_id = j.at("source_id").get<std::string>();
  r.rank = j.at("rank").get<int>();
  r.mean_relative_err = j.at("mean_relative_err").get<double>();
  r.n_campaigns = j.at("n_campaigns").get<int>();
  r.skipped_campaigns = j.value("skipped_campaigns", 0);
  r.ci_level = j.at("ci_level").get<double>();
  r.unique = j.value("unique", true);
  if (!j.at("inferred").is_null()) r.inferred = predictive_values_from_json(j.at("inferred"));
  if (!j.at("ci_half_widths").is_null()) {
    r.ci_half_widths = predictive_values_from_json(j.at("ci_half_widths")).p;
  }
  return r;
}

nlohmann::json to_json(const RankEntry& entry) {
  return {{"source_id", entry.source_id},
          {"mean_err", entry.mean_err},
          {"per_campaign_err", entry.per_campaign_err},
          {"skipped_campaigns", entry.skipped_campaigns}};
}

RankEntry rank_entry_from_json(const nlohmann::json& j) {
  RankEntry e;
  e.source_id = j.at("source_id").get<std::string>();
  e.mean_err = j.at("mean_err").get<double>();
  e.per_campaign_err = j.at("per_campaign_err").get<std::vector<double>>();
  e.skipped_campaigns = j.value("skipped_campaigns", 0);
  return e;
}

nlohmann::json to_json(const SampleSizePlan& plan) {
  return {{"categories", plan.categories},
          {"margin", plan.margin},
          {"significance", plan.significance},
          {"power", plan.power},
          {"required_impressions", plan.required_impressions}};
}

SampleSizePlan sample_size_plan_from_json(const nlohmann::json& j) {
  return SampleSizePlan{j.at("categories").get<int>(), j.at("margin").get<double>(),
                        j.at("significance").get<double>(), j.at("power").get<double>(),
                        j.at("required_impressions").get<std::int64_t>()};
}

std::string format_number(double value) { return fmt::format("{}", value); }

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "profile,num_campaigns,zeta,trial,seed,ok,alpha1_hat,abs_err_alpha1,objective\n";
  for (const auto& t : trials) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", t.profile, t.num_campaigns,
                       format_number(t.zeta), t.trial, t.seed, t.ok ? 1 : 0,
                       t.ok ? format_number(t.estimate.precision()) : "nan",
                       t.ok ? format_number(t.abs_err_alpha1) : "nan",
                       t.ok ? format_number(t.objective) : "nan");
  }
}

void write_grid_csv(std::ostream& out, const std::vector<GridPoint>& grid) {
  out << "profile,num_campaigns,zeta,mean_abs_err_alpha1,trials,failures\n";
  for (const auto& g : grid) {
    out << fmt::format("{},{},{},{},{},{}\n", g.profile, g.num_campaigns, format_number(g.zeta),
                       format_number(g.mean_abs_err_alpha1), g.trials, g.failures);
  }
}

}  // namespace dqa
