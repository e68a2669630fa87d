// socratic_cli: command-line front end for the label-modeling toolkit.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error
// (unreadable or malformed input, numerical failure).

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "socratic/csv.h"
#include "socratic/error.h"
#include "socratic/report.h"

namespace {

using namespace socratic;
namespace fs = std::filesystem;

// JSON configuration files. Top-level keys set options of the main program;
// an object keyed by a subcommand name sets that subcommand's options, e.g.
// {"run": {"k-max": 5, "labels": "l.csv"}}. Flags given on the command line
// take precedence over the file.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json doc;
    try {
      doc = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(doc, {}, items);
    return items;
  }

 private:
  static void flatten(const Json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("config values must be strings, numbers, booleans or arrays");
  }
};

class FileError : public DataError {
 public:
  using DataError::DataError;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "'");
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Output {
  std::string dir = ".";

  fs::path path(const std::string& name) const { return fs::path(dir) / name; }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path p = path(name);
    std::ofstream out(p);
    if (!out) throw FileError("cannot write '" + p.string() + "'");
    writer(out);
    out.close();
    if (!out) throw FileError("failed writing '" + p.string() + "'");
    std::cout << "wrote " << p.string() << "\n";
  }

  void write_json(const std::string& name, const Json& doc) const {
    write(name, [&](std::ostream& out) { out << doc.dump(2) << "\n"; });
  }
};

BinaryEncoding encoding_of(const std::string& name) {
  return name == "zero_one" ? BinaryEncoding::kZeroOne : BinaryEncoding::kPlusMinusOne;
}

LabelMatrix read_labels(const std::string& path) {
  auto in = open_input(path);
  return load_label_matrix(in, path);
}

FeatureMatrixBinary read_binary(const std::string& path, const std::string& encoding) {
  auto in = open_input(path);
  return load_binary_features(in, encoding_of(encoding), path);
}

FeatureMatrixReal read_real(const std::string& path) {
  auto in = open_input(path);
  return load_real_features(in, path);
}

HardLabelVector read_hard(const std::string& path) {
  auto in = open_input(path);
  return load_hard_labels(in, path);
}

ProbLabelVector read_soft(const std::string& path) {
  auto in = open_input(path);
  return load_prob_labels(in, path);
}

// Hard labels from either a `y` column or the sign of an `expected_label`
// column (sign(0) = +1).
HardLabelVector read_predictions(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream probe(text);
  const CsvTable table = read_csv(probe, path);
  std::istringstream in(text);
  if (table.column_index("y") >= 0) return load_hard_labels(in, path);
  if (table.column_index("expected_label") >= 0) {
    const ProbLabelVector soft = load_prob_labels(in, path);
    VectorXd hard(soft.size());
    for (int o = 0; o < soft.size(); ++o) hard[o] = soft[o] >= 0.0 ? 1.0 : -1.0;
    return HardLabelVector(std::move(hard), soft.object_ids());
  }
  throw DataError(path + ": needs a 'y' or 'expected_label' column");
}

void write_predictions(std::ostream& out, const Prediction& pred) {
  out << "object_id,y,score\n";
  for (int o = 0; o < pred.labels.size(); ++o) {
    out << object_id_at(pred.labels.object_ids(), o) << ','
        << (pred.labels[o] > 0 ? "1" : "-1") << ',' << format_real(pred.scores[o]) << '\n';
  }
}

Json nullable(const std::string& path) { return path.empty() ? Json() : Json(path); }

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  Output out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed (default: $SOCRATIC_SEED or 0)")
      ->capture_default_str();
  sub->add_option("--out-dir", c.out.dir, "Directory for output files")->capture_default_str();
}

void add_encoding(CLI::App* sub, std::string& encoding) {
  sub->add_option("--encoding", encoding, "Binary feature encoding")
      ->check(CLI::IsMember({"pm1", "zero_one"}))
      ->capture_default_str();
}

void add_gen_options(CLI::App* sub, FitConfig& c) {
  sub->add_option("--gen-lr", c.learning_rate, "Generative learning rate")->capture_default_str();
  sub->add_option("--gen-max-iters", c.max_iters, "Generative iteration cap")
      ->capture_default_str();
  sub->add_option("--gen-grad-tol", c.grad_tol, "Generative gradient tolerance")
      ->capture_default_str();
  sub->add_option("--phi-init", c.phi_init, "Initial accuracy parameter")->capture_default_str();
  sub->add_option("--w-l2", c.w_l2, "L2 penalty on W")->capture_default_str();
}

void add_disc_options(CLI::App* sub, DiscConfig& c) {
  sub->add_option("--disc-lr", c.learning_rate, "Discriminative learning rate")
      ->capture_default_str();
  sub->add_option("--disc-max-iters", c.max_iters, "Discriminative iteration cap")
      ->capture_default_str();
  sub->add_option("--disc-grad-tol", c.grad_tol, "Discriminative gradient tolerance")
      ->capture_default_str();
  sub->add_option("--disc-l2", c.l2, "L2 penalty on theta")->capture_default_str();
}

void add_path_options(CLI::App* sub, PathOptions& o) {
  sub->add_option("--grid-size", o.grid_size, "Lambda grid points")->capture_default_str();
  sub->add_option("--lambda-min-ratio", o.lambda_min_ratio, "Smallest lambda / lambda_max")
      ->capture_default_str();
  sub->add_option("--lasso-tol", o.tol, "Coordinate-descent tolerance")->capture_default_str();
  sub->add_option("--lasso-max-sweeps", o.max_sweeps, "Coordinate-descent sweep cap")
      ->capture_default_str();
}

Json trace_json(const FitTrace& t) {
  return {{"iterations", t.iterations},
          {"converged", t.converged},
          {"initial_objective", t.initial_objective},
          {"final_objective", t.final_objective},
          {"final_grad_norm", t.final_grad_norm},
          {"frozen_sources", t.frozen_sources}};
}

// ---- fit-gen ---------------------------------------------------------------

struct FitGenArgs {
  Common common;
  std::string labels, bin_features, encoding = "pm1";
  std::vector<int> select;
  FitConfig gen;
};

void fit_gen(const FitGenArgs& a) {
  FitConfig gen = a.gen;
  gen.seed = a.common.seed;
  const LabelMatrix labels = read_labels(a.labels);
  FitTrace trace;
  GenParams params;
  if (a.select.empty()) {
    params = fit_sp(labels, gen, &trace);
  } else {
    if (a.bin_features.empty()) throw ConfigError("--select requires --bin-features");
    const FeatureMatrixBinary x = read_binary(a.bin_features, a.encoding);
    params = fit_aug(labels, x, a.select, gen, &trace);
  }
  Json doc = gen_model_json(params, gen);
  doc["fit"] = trace_json(trace);
  doc["inputs"] = {{"labels", a.labels},
                   {"bin_features", nullable(a.bin_features)},
                   {"encoding", a.encoding},
                   {"select", a.select}};
  a.common.out.write_json("gen_model.json", doc);
}

// ---- label -----------------------------------------------------------------

struct LabelArgs {
  Common common;
  std::string model, labels, bin_features, encoding = "pm1";
};

void label(const LabelArgs& a) {
  const GenParams params = gen_params_from_json(Json::parse(read_file(a.model), nullptr, false));
  const LabelMatrix labels = read_labels(a.labels);
  ProbLabelVector out = [&] {
    if (const auto* sp = std::get_if<GenParamsSP>(&params)) return label_sp(*sp, labels);
    if (a.bin_features.empty()) {
      throw ConfigError("model has selected features; --bin-features is required");
    }
    return label_aug(std::get<GenParamsAug>(params), labels,
                     read_binary(a.bin_features, a.encoding));
  }();
  a.common.out.write("labels_out.csv", [&](std::ostream& s) { write_prob_labels(s, out); });
}

// ---- train-disc ------------------------------------------------------------

struct TrainDiscArgs {
  Common common;
  std::string real_features, soft_labels;
  bool standardize = false;
  DiscConfig disc;
};

void train_disc(const TrainDiscArgs& a) {
  DiscConfig disc = a.disc;
  disc.seed = a.common.seed;
  FeatureMatrixReal v = read_real(a.real_features);
  const ProbLabelVector soft = read_soft(a.soft_labels);
  std::optional<Standardization> z;
  if (a.standardize) {
    z = Standardization::fit(v);
    v = z->apply(v);
  }
  DiscFitTrace trace;
  const DiscParams params = fit_disc(v, soft, disc, &trace);
  const Prediction pred = predict(params, v);

  Json doc = disc_model_json(params);
  doc["standardization"] =
      z ? Json{{"mean", std::vector<double>(z->mean.begin(), z->mean.end())},
               {"scale", std::vector<double>(z->scale.begin(), z->scale.end())}}
        : Json();
  doc["fit"] = {{"iterations", trace.iterations},
                {"converged", trace.converged},
                {"initial_loss", trace.initial_loss},
                {"final_loss", trace.final_loss},
                {"final_grad_norm", trace.final_grad_norm}};
  doc["config"] = to_json(disc);
  doc["config"]["standardize"] = a.standardize;
  doc["inputs"] = {{"real_features", a.real_features}, {"soft_labels", a.soft_labels}};
  a.common.out.write_json("disc_model.json", doc);
  a.common.out.write("disc_labels.csv", [&](std::ostream& s) { write_predictions(s, pred); });
}

// ---- diff ------------------------------------------------------------------

struct DiffArgs {
  Common common;
  std::string bin_features, encoding = "pm1", disagreement_path, soft_labels, disc_labels;
  int k = 1;
  PathOptions path;
};

void diff(const DiffArgs& a) {
  const FeatureMatrixBinary x = read_binary(a.bin_features, a.encoding);
  const bool from_file = !a.disagreement_path.empty();
  if (from_file == !(a.soft_labels.empty() && a.disc_labels.empty())) {
    throw ConfigError("give either --disagreement or both --soft-labels and --disc-labels");
  }
  if (!from_file && (a.soft_labels.empty() || a.disc_labels.empty())) {
    throw ConfigError("--soft-labels and --disc-labels must be given together");
  }
  const DisagreementVector target = [&] {
    if (from_file) {
      auto in = open_input(a.disagreement_path);
      return load_disagreement(in, a.disagreement_path);
    }
    return disagreement(read_soft(a.soft_labels), read_hard(a.disc_labels));
  }();

  const RegPath path = regularization_path(x, target, a.path);
  bool truncated = false;
  const std::vector<int> selected = select_features(path, a.k, &truncated);
  if (truncated) {
    std::cerr << "warning: only " << selected.size() << " features activate along the path\n";
  }
  const LassoFit* at = nullptr;
  if (!selected.empty()) at = &path.fits[path.entry_grid_index[selected.size() - 1]];

  const auto& names = x.column_names();
  Json doc;
  doc["lambda_max"] = path.lambdas.front();
  doc["lambda_max_unnormalized"] = unnormalized_lambda(path.lambdas.front(), x.num_objects());
  Json order_names = Json::array();
  for (int j : path.entry_order) order_names.push_back(names[j]);
  doc["entry_order"] = path.entry_order;
  doc["entry_order_names"] = order_names;
  doc["selected"] = selected;
  Json selected_names = Json::array();
  Json coefs = Json::array();
  for (int j : selected) {
    selected_names.push_back(names[j]);
    coefs.push_back(at->coef[j]);
  }
  doc["selected_names"] = selected_names;
  doc["truncated"] = truncated;
  doc["lambda_at_selection"] = at ? Json(at->lambda) : Json();
  doc["lambda_at_selection_unnormalized"] =
      at ? Json(unnormalized_lambda(at->lambda, x.num_objects())) : Json();
  doc["coef_at_selection"] = coefs;
  doc["kkt_residual"] = at ? Json(at->kkt_residual) : Json();
  doc["config"] = {{"k", a.k},
                   {"lasso", to_json(a.path)},
                   {"inputs",
                    {{"bin_features", a.bin_features},
                     {"encoding", a.encoding},
                     {"disagreement", nullable(a.disagreement_path)},
                     {"soft_labels", nullable(a.soft_labels)},
                     {"disc_labels", nullable(a.disc_labels)}}}};
  a.common.out.write_json("diff.json", doc);
  if (!from_file) {
    a.common.out.write("disagreement.csv",
                       [&](std::ostream& s) { write_disagreement(s, target); });
  }
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  Common common;
  std::string labels, bin_features, real_features, truth, encoding = "pm1", dev_metric = "accuracy";
  RunConfig run;
};

void run_pipeline(const RunArgs& a) {
  RunConfig config = a.run;
  config.seed = a.common.seed;
  config.gen.seed = a.common.seed;
  config.disc.seed = a.common.seed;
  config.dev_metric = a.dev_metric == "f1" ? DevMetric::kF1 : DevMetric::kAccuracy;
  config.validate();

  Dataset dataset{read_labels(a.labels), read_binary(a.bin_features, a.encoding),
                  read_real(a.real_features), std::nullopt};
  if (!a.truth.empty()) dataset.truth = read_hard(a.truth);
  const ValidationReport validation = validate(dataset);
  for (const auto& f : validation.findings) {
    if (f.severity != ValidationFinding::Severity::kInfo) std::cerr << "warning: " << f.message << "\n";
  }

  const RunReport report = run(dataset, config);
  Json doc = run_report_json(report, dataset);
  doc["validation"] = to_json(validation);
  doc["config"] = to_json(config);
  doc["config"]["inputs"] = {{"labels", a.labels},
                             {"bin_features", a.bin_features},
                             {"real_features", a.real_features},
                             {"truth", nullable(a.truth)},
                             {"encoding", a.encoding}};
  a.common.out.write_json("run_report.json", doc);
  a.common.out.write("labels_out.csv",
                     [&](std::ostream& s) { write_prob_labels(s, report.final_labels); });
}

// ---- check-conditions ------------------------------------------------------

struct ConditionsArgs {
  Common common;
  std::string bin_features, encoding = "pm1", disagreement_path;
  std::vector<int> support;
  double delta = 0.05;
};

void check(const ConditionsArgs& a) {
  const FeatureMatrixBinary x = read_binary(a.bin_features, a.encoding);
  auto in = open_input(a.disagreement_path);
  const DisagreementVector target = load_disagreement(in, a.disagreement_path);
  const ConditionReport report = check_conditions(x, target, a.support, a.delta);
  Json doc = to_json(report);
  doc["config"] = {{"support", a.support},
                   {"delta", a.delta},
                   {"inputs",
                    {{"bin_features", a.bin_features},
                     {"encoding", a.encoding},
                     {"disagreement", a.disagreement_path}}}};
  a.common.out.write_json("conditions.json", doc);
}

// ---- simulate-recovery -----------------------------------------------------

struct RecoveryArgs {
  Common common;
  RecoveryExperiment ex;
  double rho = 0.0;
  std::string policy = "path";
};

void simulate_recovery(RecoveryArgs a, const CLI::App* sub) {
  RecoveryExperiment ex = a.ex;
  ex.seed = a.common.seed;
  if (sub->count("--rho") > 0) ex.rho = a.rho;
  ex.policy = a.policy == "theorem" ? LambdaPolicy::kTheorem : LambdaPolicy::kPath;
  const std::vector<RecoveryRow> rows = run_recovery_experiment(ex);

  a.common.out.write("recovery.csv", [&](std::ostream& s) {
    s << "kappa,n,trials,recovered_fraction,contained_fraction\n";
    for (const auto& r : rows) {
      s << format_real(r.kappa) << ',' << r.n << ',' << r.trials << ','
        << format_real(r.recovered_fraction) << ',' << format_real(r.contained_fraction) << '\n';
    }
  });
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back({{"kappa", r.kappa},
                     {"n", r.n},
                     {"trials", r.trials},
                     {"recovered_fraction", r.recovered_fraction},
                     {"contained_fraction", r.contained_fraction}});
  }
  Json doc;
  doc["rows"] = table;
  doc["config"] = {{"kappas", ex.kappas},
                   {"ns", ex.ns},
                   {"trials", ex.trials},
                   {"p", ex.p},
                   {"s_size", ex.s_size},
                   {"rho", ex.rho ? Json(*ex.rho) : Json("sqrt(kappa)")},
                   {"policy", a.policy},
                   {"delta", ex.delta},
                   {"seed", ex.seed},
                   {"lasso", to_json(ex.path)}};
  a.common.out.write_json("recovery.json", doc);
}

// ---- simulate-e2e ----------------------------------------------------------

struct E2EArgs {
  Common common;
  E2EScenario scenario;
  std::vector<std::string> extra_subsets;
  int jobs = 1;
};

PlantedSubset parse_subset(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  const auto fraction = parts.size() == 3 ? parse_real(parts[0]) : std::nullopt;
  const auto source = parts.size() == 3 ? parse_integer(parts[1]) : std::nullopt;
  const auto accuracy = parts.size() == 3 ? parse_real(parts[2]) : std::nullopt;
  if (!fraction || !source || !accuracy) {
    throw ConfigError("--extra-subset expects FRACTION:SOURCE:ACCURACY, got '" + spec + "'");
  }
  return {*fraction, static_cast<int>(*source), *accuracy};
}

void simulate_e2e(const E2EArgs& a) {
  E2EScenario scenario = a.scenario;
  scenario.seed = a.common.seed;
  for (const auto& spec : a.extra_subsets) scenario.extra_subsets.push_back(parse_subset(spec));
  const Dataset d = gen_e2e(scenario);
  const Output& out = a.common.out;
  out.write("labels.csv", [&](std::ostream& s) { write_label_matrix(s, d.labels); });
  out.write("features_bin.csv", [&](std::ostream& s) { write_binary_features(s, d.bin_features); });
  out.write("features_real.csv",
            [&](std::ostream& s) { write_real_features(s, *d.real_features); });
  out.write("truth.csv", [&](std::ostream& s) { write_hard_labels(s, *d.truth); });
  Json doc;
  doc["config"] = to_json(scenario);
  out.write_json("scenario.json", doc);
}

// ---- metrics ---------------------------------------------------------------

struct MetricsArgs {
  Common common;
  std::string pred, labels, truth;
  int positive_class = 1;
};

void metrics(const MetricsArgs& a) {
  if (a.pred.empty() == a.labels.empty()) {
    throw ConfigError("give exactly one of --pred and --labels (majority vote)");
  }
  const HardLabelVector truth = read_hard(a.truth);
  const HardLabelVector pred =
      a.pred.empty() ? majority_vote(read_labels(a.labels), a.common.seed) : read_predictions(a.pred);
  Json doc = to_json(score(pred, truth, a.positive_class));
  doc["config"] = {{"pred", nullable(a.pred)},
                   {"labels", nullable(a.labels)},
                   {"truth", a.truth},
                   {"positive_class", a.positive_class},
                   {"predictor", a.pred.empty() ? "majority_vote" : "file"},
                   {"seed", a.common.seed}};
  a.common.out.write_json("metrics.json", doc);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("SOCRATIC_SEED");
  if (env == nullptr || *env == '\0') return 0;
  const auto v = parse_integer(env);
  if (!v || *v < 0) throw ConfigError("SOCRATIC_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-supervision label modeling with latent-subset discovery", "socratic_cli"};
  app.set_version_flag("--version", SOCRATIC_VERSION);
  app.set_config("--config", "", "JSON configuration file (flags take precedence)");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  FitGenArgs fg;
  LabelArgs lb;
  TrainDiscArgs td;
  DiffArgs df;
  RunArgs rn;
  ConditionsArgs cc;
  RecoveryArgs sr;
  E2EArgs se;
  MetricsArgs mt;
  for (Common* c : {&fg.common, &lb.common, &td.common, &df.common, &rn.common, &cc.common,
                    &sr.common, &se.common, &mt.common}) {
    c->seed = seed;
  }

  auto* s_fit = app.add_subcommand("fit-gen", "Fit the SP or augmented generative model");
  add_common(s_fit, fg.common);
  s_fit->add_option("--labels", fg.labels, "Label matrix CSV")->required();
  s_fit->add_option("--bin-features", fg.bin_features, "Binary features CSV");
  add_encoding(s_fit, fg.encoding);
  s_fit->add_option("--select", fg.select, "Selected binary feature columns (augmented model)")
      ->delimiter(',');
  add_gen_options(s_fit, fg.gen);

  auto* s_label = app.add_subcommand("label", "Apply a generative model to a label matrix");
  add_common(s_label, lb.common);
  s_label->add_option("--model", lb.model, "gen_model.json")->required();
  s_label->add_option("--labels", lb.labels, "Label matrix CSV")->required();
  s_label->add_option("--bin-features", lb.bin_features, "Binary features CSV");
  add_encoding(s_label, lb.encoding);

  auto* s_disc = app.add_subcommand("train-disc", "Train the noise-aware discriminative model");
  add_common(s_disc, td.common);
  s_disc->add_option("--real-features", td.real_features, "Real features CSV")->required();
  s_disc->add_option("--soft-labels", td.soft_labels, "labels_out.csv from label or run")
      ->required();
  s_disc->add_flag("--standardize", td.standardize, "Z-score features on the training data");
  add_disc_options(s_disc, td.disc);

  auto* s_diff = app.add_subcommand("diff", "Difference model: LASSO path on the disagreement");
  add_common(s_diff, df.common);
  s_diff->add_option("--bin-features", df.bin_features, "Binary features CSV")->required();
  add_encoding(s_diff, df.encoding);
  s_diff->add_option("--disagreement", df.disagreement_path, "Disagreement CSV");
  s_diff->add_option("--soft-labels", df.soft_labels, "Generative labels_out.csv");
  s_diff->add_option("--disc-labels", df.disc_labels, "Discriminative labels CSV (y column)");
  s_diff->add_option("--k", df.k, "Number of features to select")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_path_options(s_diff, df.path);

  auto* s_run = app.add_subcommand("run", "Run the full generative/discriminative loop");
  add_common(s_run, rn.common);
  s_run->add_option("--labels", rn.labels, "Label matrix CSV")->required();
  s_run->add_option("--bin-features", rn.bin_features, "Binary features CSV")->required();
  s_run->add_option("--real-features", rn.real_features, "Real features CSV")->required();
  s_run->add_option("--truth", rn.truth, "Dev truth CSV; switches the tracked metric");
  add_encoding(s_run, rn.encoding);
  s_run->add_option("--k-max", rn.run.k_max, "Largest K")->capture_default_str();
  s_run->add_option("--patience", rn.run.patience, "Non-improving steps before stopping")
      ->capture_default_str();
  s_run->add_option("--dev-metric", rn.dev_metric, "Dev metric when truth is given")
      ->check(CLI::IsMember({"accuracy", "f1"}))
      ->capture_default_str();
  s_run->add_flag("--standardize", rn.run.standardize, "Z-score real features");
  s_run->add_flag("--refresh-disagreement", rn.run.refresh_disagreement,
                  "Recompute the disagreement path at every K");
  add_gen_options(s_run, rn.run.gen);
  add_disc_options(s_run, rn.run.disc);
  add_path_options(s_run, rn.run.path);

  auto* s_check = app.add_subcommand("check-conditions", "Evaluate the recovery conditions");
  add_common(s_check, cc.common);
  s_check->add_option("--bin-features", cc.bin_features, "Binary features CSV")->required();
  add_encoding(s_check, cc.encoding);
  s_check->add_option("--disagreement", cc.disagreement_path, "Disagreement CSV")->required();
  s_check->add_option("--support", cc.support, "Declared relevant columns")
      ->required()
      ->delimiter(',');
  s_check->add_option("--delta", cc.delta, "Failure probability for the sample bound")
      ->capture_default_str();

  auto* s_rec = app.add_subcommand("simulate-recovery", "Support-recovery Monte Carlo");
  add_common(s_rec, sr.common);
  s_rec->add_option("--kappa", sr.ex.kappas, "Target correlations")->delimiter(',');
  s_rec->add_option("--n", sr.ex.ns, "Sample sizes")->delimiter(',');
  s_rec->add_option("--trials", sr.ex.trials, "Trials per cell")->capture_default_str();
  s_rec->add_option("--p", sr.ex.p, "Feature count")->capture_default_str();
  s_rec->add_option("--s-size", sr.ex.s_size, "Relevant feature count")->capture_default_str();
  s_rec->add_option("--rho", sr.rho, "Relevant-column agreement (default sqrt(kappa))");
  s_rec->add_option("--policy", sr.policy, "Feature selection policy")
      ->check(CLI::IsMember({"path", "theorem"}))
      ->capture_default_str();
  s_rec->add_option("--delta", sr.ex.delta, "Failure probability (theorem policy)")
      ->capture_default_str();
  s_rec->add_option("--jobs", sr.ex.jobs, "Worker threads")->capture_default_str();
  add_path_options(s_rec, sr.ex.path);

  auto* s_e2e = app.add_subcommand("simulate-e2e", "Generate a planted latent-subset dataset");
  add_common(s_e2e, se.common);
  E2EScenario& sc = se.scenario;
  s_e2e->add_option("--m", sc.m, "Sources")->capture_default_str();
  s_e2e->add_option("--n", sc.n, "Objects")->capture_default_str();
  s_e2e->add_option("--p", sc.p, "Binary features")->capture_default_str();
  s_e2e->add_option("--base-accuracy", sc.base_accuracies, "Per-source accuracies (default 0.8)")
      ->delimiter(',');
  s_e2e->add_option("--coverage", sc.coverages, "Per-source coverages (default 0.7)")
      ->delimiter(',');
  s_e2e->add_option("--subset-fraction", sc.subset_fraction, "Subset size")->capture_default_str();
  s_e2e->add_option("--flipped-source", sc.flipped_source, "Source whose accuracy flips")
      ->capture_default_str();
  s_e2e->add_option("--flipped-accuracy", sc.flipped_accuracy, "Its accuracy inside the subset")
      ->capture_default_str();
  s_e2e->add_option("--extra-subset", se.extra_subsets,
                    "Further subset FRACTION:SOURCE:ACCURACY (repeatable)");
  s_e2e->add_option("--q-disc", sc.q_disc, "Real features")->capture_default_str();
  s_e2e->add_option("--disc-signal", sc.disc_signal, "Norm of the informative direction")
      ->capture_default_str();
  s_e2e->add_flag("--subset-in-real-features", sc.subset_in_real_features,
                  "Append subset indicators to the real features");
  s_e2e->add_option("--jobs", se.jobs, "Accepted for symmetry; generation is sequential")
      ->capture_default_str();

  auto* s_metrics = app.add_subcommand("metrics", "Score predictions against truth");
  add_common(s_metrics, mt.common);
  s_metrics->add_option("--pred", mt.pred, "Predictions CSV (y or expected_label column)");
  s_metrics->add_option("--labels", mt.labels, "Label matrix CSV, scored by majority vote");
  s_metrics->add_option("--truth", mt.truth, "Truth CSV")->required();
  s_metrics->add_option("--positive-class", mt.positive_class, "Positive class")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*s_fit) fit_gen(fg);
    if (*s_label) label(lb);
    if (*s_disc) train_disc(td);
    if (*s_diff) diff(df);
    if (*s_run) run_pipeline(rn);
    if (*s_check) check(cc);
    if (*s_rec) simulate_recovery(sr, s_rec);
    if (*s_e2e) simulate_e2e(se);
    if (*s_metrics) metrics(mt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
