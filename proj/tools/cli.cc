// Copyright 2026 The Metric DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <utility>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "metric_dp/auditor.h"
#include "metric_dp/covering.h"
#include "metric_dp/exp_mechanism.h"
#include "metric_dp/json_io.h"
#include "metric_dp/measure.h"
#include "metric_dp/metric_space.h"
#include "metric_dp/status_macros.h"
#include "pipeline_demo.h"

namespace metric_dp {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string space;
  std::string input_space;
  std::string map;
  std::string measure;
  std::string mechanism;
  std::string out;
  std::string x;
  std::string kind = "grid";
  std::vector<std::string> centers;
  double gamma = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double r = 0.0;
  double m = 0.0;
  double eps = 0.0;
  double threshold = 0.0;
  double utility_threshold = 0.5;
  int depth = 0;
  uint64_t seed = 0;
  uint64_t count = 1;
  uint64_t n = 5;
  bool per_pair = false;
};

// Result of a command: the "result" member of the report plus the verdict
// against --threshold (always true without one).
struct Outcome {
  Json result;
  bool passed = true;
};

// Registers options on one subcommand and remembers how to echo them.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name,
          const std::string& description)
      : app_(parent.add_subcommand(name, description)) {}

  template <typename T>
  CLI::Option* Add(const std::string& name, T& target,
                   const std::string& description, bool required = false) {
    CLI::Option* option = app_->add_option("--" + name, target, description);
    if (required) option->required();
    echo_.emplace_back(name, [option, &target]() -> Json {
      return option->count() > 0 ? Json(target) : Json();
    });
    options_[name] = option;
    return option;
  }

  CLI::Option* Flag(const std::string& name, bool& target,
                    const std::string& description) {
    CLI::Option* option = app_->add_flag("--" + name, target, description);
    echo_.emplace_back(name, [option, &target]() -> Json {
      return option->count() > 0 ? Json(target) : Json();
    });
    options_[name] = option;
    return option;
  }

  bool Given(const std::string& name) const {
    auto it = options_.find(name);
    return it != options_.end() && it->second->count() > 0;
  }

  Json Echo() const {
    Json params = Json::object();
    for (const auto& [name, value] : echo_) {
      Json v = value();
      if (!v.is_null()) params[name] = std::move(v);
    }
    return params;
  }

  CLI::App* app() const { return app_; }
  std::string name() const { return app_->get_name(); }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<Json()>>> echo_;
  std::map<std::string, CLI::Option*> options_;
};

absl::StatusOr<SpacePtr> LoadSpacePtr(const std::string& path) {
  METRIC_DP_ASSIGN_OR_RETURN(FiniteMetricSpace space, LoadSpace(path));
  return Share(std::move(space));
}

// Input space, output space, map and base measure shared by the mechanism
// commands. The output space comes from --space; --input-space defaults to
// it; --map defaults to the label identity; --measure defaults to the cover
// measure of the output space at depth --L.
struct Problem {
  SpacePtr input;
  SpacePtr output;
  std::optional<LipschitzMap> map;
  std::optional<DiscreteMeasure> base;
};

absl::StatusOr<Problem> LoadSpaces(const Command& cmd, const Options& opt) {
  Problem problem;
  METRIC_DP_ASSIGN_OR_RETURN(problem.output, LoadSpacePtr(opt.space));
  if (cmd.Given("input-space")) {
    METRIC_DP_ASSIGN_OR_RETURN(problem.input, LoadSpacePtr(opt.input_space));
  } else {
    problem.input = problem.output;
  }
  return problem;
}

absl::Status LoadMap(const Command& cmd, const Options& opt,
                     Problem& problem) {
  if (cmd.Given("map")) {
    METRIC_DP_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(opt.map));
    METRIC_DP_ASSIGN_OR_RETURN(
        LipschitzMap map, MapFromJson(doc, problem.input, problem.output,
                                      fs::path(opt.map).parent_path()));
    problem.map = std::move(map);
    return absl::OkStatus();
  }
  if (problem.input == problem.output) {
    problem.map = LipschitzMap::Identity(problem.output);
    return absl::OkStatus();
  }
  std::map<std::string, std::string> identity;
  for (const std::string& label : problem.input->labels()) {
    identity[label] = label;
  }
  METRIC_DP_ASSIGN_OR_RETURN(
      LipschitzMap map,
      LipschitzMap::Create(problem.input, problem.output, identity));
  problem.map = std::move(map);
  return absl::OkStatus();
}

absl::Status LoadBase(const Command& cmd, const Options& opt,
                      Problem& problem) {
  if (cmd.Given("measure")) {
    METRIC_DP_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(opt.measure));
    METRIC_DP_ASSIGN_OR_RETURN(
        DiscreteMeasure base,
        MeasureFromJson(doc, problem.output,
                        fs::path(opt.measure).parent_path()));
    problem.base = std::move(base);
    return absl::OkStatus();
  }
  const int depth = cmd.Given("L") ? opt.depth : DefaultDepth(*problem.output);
  METRIC_DP_ASSIGN_OR_RETURN(
      UniformlyPositiveMeasure upm,
      BuildUniformlyPositiveMeasure(problem.output, depth));
  problem.base = std::move(upm.measure);
  return absl::OkStatus();
}

absl::StatusOr<Problem> LoadProblem(const Command& cmd, const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadSpaces(cmd, opt));
  METRIC_DP_RETURN_IF_ERROR(LoadMap(cmd, opt, problem));
  METRIC_DP_RETURN_IF_ERROR(LoadBase(cmd, opt, problem));
  return problem;
}

// Accepts a bare table document or a tabulate report wrapping one.
absl::StatusOr<MechanismTable> LoadMechanism(const Options& opt,
                                             const Problem& problem) {
  METRIC_DP_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(opt.mechanism));
  if (!doc.contains("inputs") && doc.contains("result") &&
      doc["result"].contains("table")) {
    doc = doc["result"]["table"];
  }
  return MechanismTableFromJson(doc, problem.input, problem.output);
}

absl::StatusOr<Outcome> RunValidate(const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(opt.space));
  METRIC_DP_ASSIGN_OR_RETURN(RawSpace raw, RawSpaceFromJson(doc));
  if (raw.dist.size() != raw.labels.size()) {
    return ParseError(absl::StrCat(raw.labels.size(), " labels for ",
                                   raw.dist.size(), " distance rows"));
  }
  absl::StatusOr<MetricValidationReport> report = ValidateMetric(raw.dist);
  if (!report.ok()) return ParseError(report.status().message());
  return Outcome{ValidationReportToJson(*report, raw.labels), report->ok()};
}

absl::StatusOr<Outcome> RunNet(const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(SpacePtr space, LoadSpacePtr(opt.space));
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> net,
                             GreedyNet(*space, opt.r));
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> packing,
                             MaxPacking(*space, opt.r));
  return Outcome{Json{{"radius", opt.r},
                      {"net", net},
                      {"net_size", net.size()},
                      {"packing", packing},
                      {"packing_size", packing.size()}}};
}

absl::StatusOr<Outcome> RunBuildMeasure(const Command& cmd,
                                        const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(SpacePtr space, LoadSpacePtr(opt.space));
  const int depth = cmd.Given("L") ? opt.depth : DefaultDepth(*space);
  METRIC_DP_ASSIGN_OR_RETURN(UniformlyPositiveMeasure upm,
                             BuildUniformlyPositiveMeasure(space, depth));
  Json result{{"hierarchy", CoverHierarchyToJson(upm.hierarchy)},
              {"measure", MeasureToJson(upm.measure)},
              {"total_mass", upm.measure.total_mass()},
              {"diameter_exceeds_one", upm.diameter_exceeds_one}};
  if (cmd.Given("r")) {
    METRIC_DP_ASSIGN_OR_RETURN(double modulus,
                               UniformPositivityModulus(upm.measure, opt.r));
    METRIC_DP_ASSIGN_OR_RETURN(PositivityBound bound,
                               PositivityLowerBound(upm.hierarchy, opt.r));
    result["modulus"] = modulus;
    result["positivity_lower_bound"] = Json{{"value", bound.value},
                                            {"level", bound.level},
                                            {"truncated", bound.truncated}};
  }
  return Outcome{std::move(result)};
}

absl::StatusOr<Outcome> RunCalibrate(const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(double beta,
                             CalibrateBeta(opt.gamma, opt.delta, opt.m));
  return Outcome{Json{{"beta", beta}}};
}

absl::StatusOr<Outcome> RunTabulate(const Command& cmd, const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadProblem(cmd, opt));
  METRIC_DP_ASSIGN_OR_RETURN(
      ExpMechParams params,
      ExpMechParams::Create(*problem.map, *problem.base, opt.beta));
  METRIC_DP_ASSIGN_OR_RETURN(MechanismTable table, Tabulate(params));
  const double c = params.map().lipschitz_constant();
  return Outcome{Json{{"table", MechanismTableToJson(table)},
                      {"lipschitz_c", c},
                      {"privacy_bound", PrivacyBound(opt.beta, c)}}};
}

absl::StatusOr<Outcome> RunSample(const Command& cmd, const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadProblem(cmd, opt));
  METRIC_DP_ASSIGN_OR_RETURN(
      ExpMechParams params,
      ExpMechParams::Create(*problem.map, *problem.base, opt.beta));
  METRIC_DP_ASSIGN_OR_RETURN(std::vector<std::string> draws,
                             SampleMany(params, opt.x, opt.seed, opt.count));
  return Outcome{Json{{"x", opt.x}, {"samples", draws}}};
}

absl::StatusOr<Outcome> RunAuditPrivacy(const Command& cmd,
                                        const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadSpaces(cmd, opt));
  METRIC_DP_ASSIGN_OR_RETURN(MechanismTable table,
                             LoadMechanism(opt, problem));
  const PrivacyAuditReport report = AuditPrivacy(table, opt.per_pair);
  const bool passed =
      !cmd.Given("threshold") || report.epsilon_max <= opt.threshold;
  return Outcome{PrivacyAuditReportToJson(report, table), passed};
}

absl::StatusOr<Outcome> RunAuditUtility(const Command& cmd,
                                        const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadSpaces(cmd, opt));
  METRIC_DP_RETURN_IF_ERROR(LoadMap(cmd, opt, problem));
  METRIC_DP_ASSIGN_OR_RETURN(MechanismTable table,
                             LoadMechanism(opt, problem));
  METRIC_DP_ASSIGN_OR_RETURN(UtilityAuditReport report,
                             AuditUtility(table, *problem.map, opt.gamma));
  const bool passed =
      !cmd.Given("threshold") || report.min_mass >= opt.threshold;
  return Outcome{UtilityAuditReportToJson(report, table), passed};
}

// Proposes centers whose images are the greedy r-packing of the output
// space, taking the first preimage of each packed point.
std::vector<std::string> ProposeCenters(const LipschitzMap& map, double r) {
  std::vector<std::string> centers;
  absl::StatusOr<std::vector<size_t>> packing =
      MaxPackingIndices(map.codomain(), r);
  if (!packing.ok()) return centers;
  for (size_t y : *packing) {
    for (size_t x = 0; x < map.domain().size(); ++x) {
      if (map.image(x) == y) {
        centers.push_back(map.domain().label(x));
        break;
      }
    }
  }
  return centers;
}

absl::StatusOr<Outcome> RunLowerBound(const Command& cmd, const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadSpaces(cmd, opt));
  METRIC_DP_RETURN_IF_ERROR(LoadMap(cmd, opt, problem));
  METRIC_DP_ASSIGN_OR_RETURN(MechanismTable table,
                             LoadMechanism(opt, problem));
  const std::vector<std::string> centers =
      cmd.Given("centers") ? opt.centers : ProposeCenters(*problem.map, opt.r);
  METRIC_DP_ASSIGN_OR_RETURN(
      ImpossibilityBound bound,
      ImpossibilityLowerBound(table, *problem.map, centers, opt.r,
                              opt.utility_threshold));
  const bool passed =
      !cmd.Given("threshold") || bound.eps_lower <= opt.threshold;
  return Outcome{Json{{"centers", centers},
                      {"eps_lower", NumberOrInfinity(bound.eps_lower)},
                      {"witness_index", bound.witness_index},
                      {"witness", centers[bound.witness_index]}},
                 passed};
}

absl::StatusOr<Outcome> RunTradeoff(const Command& cmd, const Options& opt) {
  METRIC_DP_ASSIGN_OR_RETURN(Problem problem, LoadSpaces(cmd, opt));
  METRIC_DP_RETURN_IF_ERROR(LoadBase(cmd, opt, problem));
  METRIC_DP_ASSIGN_OR_RETURN(
      TradeoffBound bound,
      TradeoffUpperBound(*problem.base, opt.gamma, opt.delta));
  Json result{{"epsilon", bound.epsilon}, {"beta", bound.beta},
              {"m", bound.m}};
  if (cmd.Given("eps")) {
    METRIC_DP_ASSIGN_OR_RETURN(
        int64_t n, MinDatabaseSize(opt.eps, opt.gamma, opt.delta, bound.m));
    result["min_database_size"] = n;
  }
  return Outcome{std::move(result)};
}

absl::StatusOr<Outcome> RunDemo(const Command& cmd, const Options& opt) {
  DemoConfig config;
  if (cmd.Given("space")) {
    METRIC_DP_ASSIGN_OR_RETURN(config.space, LoadSpacePtr(opt.space));
  } else if (opt.kind == "grid") {
    config.space = Share(FiniteMetricSpace::Grid(opt.n));
  } else if (opt.kind == "discrete") {
    config.space = Share(FiniteMetricSpace::Discrete(opt.n));
  } else {
    return ParseError(absl::StrCat("unknown --kind \"", opt.kind, "\""));
  }
  if (cmd.Given("gamma")) config.gamma = opt.gamma;
  if (cmd.Given("delta")) config.delta = opt.delta;
  if (cmd.Given("L")) config.depth = opt.depth;
  METRIC_DP_ASSIGN_OR_RETURN(Json report, PipelineDemo(config));
  const bool passed = report["privacy_ok"].get<bool>() &&
                      report["utility_ok"].get<bool>();
  return Outcome{std::move(report), passed};
}

absl::Status EmitReport(const Options& opt, const Json& report,
                        std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (opt.out.empty()) {
    out << text;
    return absl::OkStatus();
  }
  return WriteFileAtomically(opt.out, text);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options opt;
  CLI::App app{"Exponential mechanisms, calibration and exact audits over "
               "finite metric spaces",
               "metric_dp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& description) {
    commands.push_back(std::make_unique<Command>(app, name, description));
    Command& cmd = *commands.back();
    cmd.Add("out", opt.out, "Write the JSON report here instead of stdout");
    return &cmd;
  };
  auto add_problem = [&](Command* cmd) {
    cmd->Add("space", opt.space, "Output space file", true);
    cmd->Add("input-space", opt.input_space,
             "Input space file (defaults to --space)");
    cmd->Add("map", opt.map, "Map file (defaults to the label identity)");
  };

  Command* validate = add("validate", "Check the metric axioms of a space");
  validate->Add("space", opt.space, "Space file", true);

  Command* net = add("net", "Greedy r-net and greedy r-packing");
  net->Add("space", opt.space, "Space file", true);
  net->Add("r", opt.r, "Radius", true);

  Command* build = add("build-measure", "Cover hierarchy and cover measure");
  build->Add("space", opt.space, "Space file", true);
  build->Add("L", opt.depth, "Cover depth (default: finest useful level)");
  build->Add("r", opt.r, "Also report the modulus and certified bound at r");

  Command* calibrate = add("calibrate", "Beta for a (gamma, delta) target");
  calibrate->Add("gamma", opt.gamma, "Utility radius", true);
  calibrate->Add("delta", opt.delta, "Failure probability", true);
  calibrate->Add("m", opt.m, "Smallest base mass of a gamma/2 ball", true);

  Command* tabulate = add("tabulate", "Exponential mechanism table");
  add_problem(tabulate);
  tabulate->Add("measure", opt.measure,
                "Base measure file (default: cover measure)");
  tabulate->Add("L", opt.depth, "Cover depth for the default base");
  tabulate->Add("beta", opt.beta, "Inverse temperature", true);

  Command* sample = add("sample", "Seeded draws from the mechanism");
  add_problem(sample);
  sample->Add("measure", opt.measure,
              "Base measure file (default: cover measure)");
  sample->Add("L", opt.depth, "Cover depth for the default base");
  sample->Add("beta", opt.beta, "Inverse temperature", true);
  sample->Add("x", opt.x, "Input label", true);
  sample->Add("seed", opt.seed, "64-bit seed", true);
  sample->Add("count", opt.count, "Number of draws");

  Command* audit_privacy = add("audit-privacy", "Exact privacy level");
  audit_privacy->Add("mechanism", opt.mechanism, "Mechanism table file", true);
  audit_privacy->Add("space", opt.space, "Output space file", true);
  audit_privacy->Add("input-space", opt.input_space,
                     "Input space file (defaults to --space)");
  audit_privacy->Add("threshold", opt.threshold,
                     "Fail (status 1) if epsilon exceeds this");
  audit_privacy->Flag("per-pair", opt.per_pair,
                      "Include the per-pair maximum matrix");

  Command* audit_utility = add("audit-utility", "Exact utility at radius gamma");
  audit_utility->Add("mechanism", opt.mechanism, "Mechanism table file", true);
  add_problem(audit_utility);
  audit_utility->Add("gamma", opt.gamma, "Utility radius", true);
  audit_utility->Add("threshold", opt.threshold,
                     "Fail (status 1) if the minimum ball mass is below this");

  Command* lower = add("lower-bound", "Privacy lower bound from disjoint balls");
  lower->Add("mechanism", opt.mechanism, "Mechanism table file", true);
  add_problem(lower);
  lower->Add("r", opt.r, "Ball radius", true);
  lower->Add("centers", opt.centers,
             "Input labels (default: greedy packing preimages)")
      ->delimiter(',');
  lower->Add("utility-threshold", opt.utility_threshold,
             "Required own-ball mass (default 0.5)");
  lower->Add("threshold", opt.threshold,
             "Fail (status 1) if the lower bound exceeds this epsilon");

  Command* tradeoff = add("tradeoff", "Constructive (epsilon, beta, m) bound");
  tradeoff->Add("space", opt.space, "Output space file", true);
  tradeoff->Add("measure", opt.measure,
                "Base measure file (default: cover measure)");
  tradeoff->Add("L", opt.depth, "Cover depth for the default base");
  tradeoff->Add("gamma", opt.gamma, "Utility radius", true);
  tradeoff->Add("delta", opt.delta, "Failure probability", true);
  tradeoff->Add("eps", opt.eps, "Also report the minimum database size");

  Command* demo = add("demo", "End-to-end pipeline report");
  demo->Add("space", opt.space, "Space file (overrides --kind/--n)");
  demo->Add("kind", opt.kind, "Built-in space: grid or discrete");
  demo->Add("n", opt.n, "Built-in space size");
  demo->Add("gamma", opt.gamma, "Utility radius (default 0.5)");
  demo->Add("delta", opt.delta, "Failure probability (default 0.1)");
  demo->Add("L", opt.depth, "Cover depth");

  std::vector<std::string> argv_storage = {"metric_dp"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParseError;
  }

  const Command* active = nullptr;
  for (const auto& cmd : commands) {
    if (cmd->app()->parsed()) active = cmd.get();
  }
  const std::string name = active->name();

  absl::StatusOr<Outcome> outcome;
  if (name == "validate") {
    outcome = RunValidate(opt);
  } else if (name == "net") {
    outcome = RunNet(opt);
  } else if (name == "build-measure") {
    outcome = RunBuildMeasure(*active, opt);
  } else if (name == "calibrate") {
    outcome = RunCalibrate(opt);
  } else if (name == "tabulate") {
    outcome = RunTabulate(*active, opt);
  } else if (name == "sample") {
    outcome = RunSample(*active, opt);
  } else if (name == "audit-privacy") {
    outcome = RunAuditPrivacy(*active, opt);
  } else if (name == "audit-utility") {
    outcome = RunAuditUtility(*active, opt);
  } else if (name == "lower-bound") {
    outcome = RunLowerBound(*active, opt);
  } else if (name == "tradeoff") {
    outcome = RunTradeoff(*active, opt);
  } else {
    outcome = RunDemo(*active, opt);
  }

  if (!outcome.ok() && IsParseError(outcome.status())) {
    err << "metric_dp " << name << ": " << outcome.status().message() << "\n";
    return kExitParseError;
  }

  Json report{{"command", name},
              {"version", kVersion},
              {"params", active->Echo()}};
  if (name == "sample") report["seed"] = opt.seed;
  int status = kExitOk;
  if (!outcome.ok()) {
    err << "metric_dp " << name << ": " << outcome.status().message() << "\n";
    report["status"] = "error";
    report["error"] = std::string(outcome.status().message());
    status = kExitDomainError;
  } else {
    report["result"] = outcome->result;
    if (name == "validate" && !outcome->passed) {
      report["status"] = "invalid";
      status = kExitDomainError;
    } else if (!outcome->passed) {
      report["status"] = "fail";
      status = kExitThresholdFailed;
    } else {
      report["status"] = "pass";
    }
  }
  absl::Status written = EmitReport(opt, report, out);
  if (!written.ok()) {
    err << "metric_dp " << name << ": " << written.message() << "\n";
    return kExitDomainError;
  }
  return status;
}

}  // namespace metric_dp
