#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "prodcoef/digest.hpp"
#include "prodcoef/error.hpp"
#include "prodcoef/feature_matrix.hpp"
#include "prodcoef/knn.hpp"
#include "prodcoef/neighborhood_features.hpp"
#include "prodcoef/pca.hpp"
#include "prodcoef/random_forest.hpp"
#include "prodcoef/report.hpp"

namespace prodcoef::cli {

namespace fs = std::filesystem;
using nlohmann::json;

ComponentRange parse_component_range(const std::string& text) {
  const auto bad = [&] {
    return Error(ErrorCode::kConfiguration,
                 "component range '" + text + "' must look like 3..10 or 7");
  };
  const auto parse = [&](const std::string& s) -> std::size_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit)) throw bad();
    return std::stoul(s);
  };
  ComponentRange r;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    r.lo = r.hi = parse(text);
  } else {
    r.lo = parse(text.substr(0, dots));
    r.hi = parse(text.substr(dots + 2));
  }
  if (r.lo < 1 || r.lo > r.hi) {
    throw Error(ErrorCode::kDimension, "component range must satisfy 1 <= lo <= hi");
  }
  return r;
}

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_dir(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

fs::path manifest_path_for(const fs::path& features_csv) {
  fs::path p = features_csv;
  p.replace_extension(".manifest.json");
  return p;
}

std::string resolve_format(const RunConfig& config) {
  if (config.format != "auto") return config.format;
  auto ext = fs::path(config.input).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".las" ? "las" : "csv";
}

struct LoadedCloud {
  PointCloud cloud;
  std::optional<LasHeaderSummary> header;
};

LoadedCloud load_cloud(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::kConfiguration, "--input is required");
  const auto format = resolve_format(config);
  if (format == "las") {
    auto result = read_las(config.input);
    return {std::move(result.cloud), result.header};
  }
  if (format == "csv") return {read_csv(config.input, config.has_label), std::nullopt};
  throw Error(ErrorCode::kConfiguration, "unknown input format '" + config.format + "'");
}

json classifiers_json(const std::vector<ClassifierKind>& kinds) {
  json j = json::array();
  for (const auto k : kinds) j.push_back(to_string(k));
  return j;
}

FeatureMatrix load_features(const RunConfig& config) {
  if (config.features.empty()) throw Error(ErrorCode::kConfiguration, "--features is required");
  auto m = read_feature_csv(config.features);
  m.validate();
  if (m.rows == 0) throw Error(ErrorCode::kEmptyInput, config.features + ": no feature rows");
  return m;
}

RandomForestConfig forest_config(const RunConfig& config) {
  RandomForestConfig rf;
  rf.trees = config.trees;
  rf.max_depth = config.max_depth;
  rf.seed = config.seed;
  return rf;
}

std::size_t single_component(const RunConfig& config) {
  if (config.components.lo != config.components.hi) {
    throw Error(ErrorCode::kConfiguration, "this command takes a single --components value");
  }
  return config.components.lo;
}

void check_components(const RunConfig& config, std::size_t cols) {
  if (config.components.hi > cols) {
    throw Error(ErrorCode::kDimension, "cannot extract " + std::to_string(config.components.hi) +
                                           " principal components from " +
                                           std::to_string(cols) + " features");
  }
}

}  // namespace

json describe(const RunConfig& c, const std::string& command) {
  json j{{"command", command}, {"seed", c.seed}};
  if (command == "features" || command == "ingest") {
    j["input"] = c.input;
    j["format"] = c.format == "auto" && !c.input.empty() ? resolve_format(c) : c.format;
    j["has_label"] = c.has_label;
  }
  if (command == "features") {
    j["normalize"] = to_string(c.normalize);
    j["radius"] = c.radius;
    j["include_center"] = c.include_center;
  }
  if (command == "evaluate") {
    j["table"] = c.table == 0 ? json("both") : json(c.table);
    j["components"] = {c.components.lo, c.components.hi};
    j["classifiers"] = classifiers_json(c.classifiers);
    j["knn_k"] = c.k;
    j["random_forest"] = forest_config(c);
    j["folds"] = c.folds;
    j["stratified"] = true;
    j["f1_average"] = to_string(c.f1);
  }
  if (command == "pca") j["components"] = single_component(c);
  if (command == "train") {
    j["classifier"] = classifiers_json(c.classifiers);
    j["knn_k"] = c.k;
    j["random_forest"] = forest_config(c);
    j["components"] = c.components_given ? json(single_component(c)) : json(nullptr);
  }
  if (command == "synth") j["scene"] = c.scene;
  return j;
}

fs::path cmd_ingest(const RunConfig& config, std::ostream& log) {
  const auto loaded = load_cloud(config);
  const PointCloud& cloud = loaded.cloud;
  if (cloud.empty()) throw Error(ErrorCode::kEmptyInput, config.input + ": no points");

  FeatureMatrix points(cloud.size(), 3, {"x", "y", "z"});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    points.at(i, 0) = cloud.points[i].x;
    points.at(i, 1) = cloud.points[i].y;
    points.at(i, 2) = cloud.points[i].z;
  }
  std::map<int, std::size_t> histogram;
  if (cloud.labeled()) {
    points.labels.emplace();
    for (const auto& p : cloud.points) {
      points.labels->push_back(*p.label);
      ++histogram[*p.label];
    }
  }
  ensure_dir(config.out_dir);
  const fs::path csv = config.out_dir / "points.csv";
  write_feature_csv(points, csv);

  json summary{{"config", describe(config, "ingest")},
               {"input_digest", sha256_file(config.input)},
               {"points", cloud.size()},
               {"bounds", {{"min", cloud.bounds.min}, {"max", cloud.bounds.max}}}};
  json classes = json::object();
  for (const auto& [label, count] : histogram) classes[std::to_string(label)] = count;
  summary["class_counts"] = classes;
  if (loaded.header) {
    const auto& h = *loaded.header;
    summary["las_header"] = {{"version", {h.version.first, h.version.second}},
                             {"point_record_format", h.point_record_format},
                             {"point_count", h.point_count},
                             {"scale", h.scale},
                             {"offset", h.offset}};
  }
  write_json(config.out_dir / "ingest.json", summary);
  log << "ingested " << cloud.size() << " points from " << config.input << '\n';
  return csv;
}

fs::path cmd_synth(const RunConfig& config, std::ostream& log) {
  SceneParams params = config.scene;
  params.seed = config.seed;
  const PointCloud scene = generate_scene(params);
  FeatureMatrix m(scene.size(), 3, {"x", "y", "z"});
  m.labels.emplace();
  for (std::size_t i = 0; i < scene.size(); ++i) {
    m.at(i, 0) = scene.points[i].x;
    m.at(i, 1) = scene.points[i].y;
    m.at(i, 2) = scene.points[i].z;
    m.labels->push_back(*scene.points[i].label);
  }
  const fs::path csv = config.output.empty() ? config.out_dir / "synth.csv" : fs::path(config.output);
  const std::string text = feature_csv_string(m);
  write_text(csv, text);
  RunConfig described = config;
  described.scene = params;
  write_json(manifest_path_for(csv), {{"config", describe(described, "synth")},
                                      {"points", scene.size()},
                                      {"output_digest", sha256_hex(text)}});
  log << "wrote " << scene.size() << " labeled points to " << csv.string() << '\n';
  return csv;
}

fs::path cmd_features(const RunConfig& config, std::ostream& log) {
  const NeighborhoodSpec spec{config.radius, config.include_center};
  spec.validate();
  Stopwatch clock;
  const auto loaded = load_cloud(config);
  if (loaded.cloud.empty()) throw Error(ErrorCode::kEmptyInput, config.input + ": no points");
  const PointCloud cloud = normalize_unit_cube(loaded.cloud, config.normalize);

  ExtractOptions options;
  options.threads = config.threads;
  const auto rows = compute_point_features(cloud, spec, options);
  const FeatureMatrix matrix = assemble_feature_matrix(cloud, rows);

  std::vector<std::size_t> counts;
  counts.reserve(rows.size());
  for (const auto& r : rows) counts.push_back(r.neighbor_count);
  std::sort(counts.begin(), counts.end());

  ensure_dir(config.out_dir);
  const fs::path csv = config.out_dir / "features.csv";
  const std::string text = feature_csv_string(matrix);
  write_text(csv, text);
  write_json(manifest_path_for(csv),
             {{"config", describe(config, "features")},
              {"input_digest", sha256_file(config.input)},
              {"output_digest", sha256_hex(text)},
              {"points", matrix.rows},
              {"labeled", matrix.has_labels()},
              {"columns", matrix.column_names},
              {"neighbor_count",
               {{"min", counts.front()}, {"median", counts[counts.size() / 2]}, {"max", counts.back()}}}});
  log << "[features] " << matrix.rows << " points, median neighborhood "
      << counts[counts.size() / 2] << ", " << fixed(clock.seconds()) << " s\n";
  return csv;
}

fs::path cmd_pca(const RunConfig& config, std::ostream& log) {
  const FeatureMatrix x = load_features(config);
  const std::size_t n = single_component(config);
  check_components(config, x.cols);
  const PcaModel model = fit_pca(x, n);
  ensure_dir(config.out_dir);
  const fs::path out = config.out_dir / "pca_model.json";
  write_json(out, {{"config", describe(config, "pca")},
                   {"features_digest", sha256_file(config.features)},
                   {"model", model}});
  write_feature_csv(transform(model, x), config.out_dir / "projected.csv");
  log << "[pca] " << n << " of " << x.cols << " components, leading eigenvalue "
      << format_double(model.eigenvalues.front()) << '\n';
  return out;
}

fs::path cmd_train(const RunConfig& config, std::ostream& log) {
  if (config.classifiers.size() != 1) {
    throw Error(ErrorCode::kConfiguration, "train needs a single --classifier (knn or rf)");
  }
  FeatureMatrix x = load_features(config);
  x.require_labels();
  json artifact{{"config", describe(config, "train")},
                {"features_digest", sha256_file(config.features)}};
  if (config.components_given) {
    check_components(config, x.cols);
    const PcaModel pca = fit_pca(x, single_component(config));
    x = transform(pca, x);
    artifact["pca"] = pca;
  }
  Stopwatch clock;
  fs::path out;
  ensure_dir(config.out_dir);
  if (config.classifiers.front() == ClassifierKind::kKnn) {
    const KnnModel model(x, config.k);
    artifact["model"] = knn_model_json(model, config.features, artifact["features_digest"]);
    out = config.out_dir / "model_knn.json";
  } else {
    artifact["model"] = rf_fit(x, forest_config(config), config.threads);
    out = config.out_dir / "model_rf.json";
  }
  write_json(out, artifact);
  log << "[train] " << to_string(config.classifiers.front()) << " on " << x.rows << " rows, "
      << fixed(clock.seconds()) << " s\n";
  return out;
}

namespace {

void write_tables(const std::vector<EvaluationReport>& reports, const fs::path& dir,
                  std::ostream& log) {
  const RenderedTables tables = render_report(reports);
  if (tables.table1_rows) {
    write_text(dir / "table1.csv", tables.table1_csv);
    write_text(dir / "table1.txt", tables.table1_text);
    log << '\n' << tables.table1_text;
  }
  if (tables.table2_rows) {
    write_text(dir / "table2.csv", tables.table2_csv);
    write_text(dir / "table2.txt", tables.table2_text);
    log << '\n' << tables.table2_text;
  }
  write_text(dir / "plot.csv", tables.plot_csv);
}

}  // namespace

fs::path cmd_evaluate(const RunConfig& config, std::ostream& log) {
  if (config.table < 0 || config.table > 2) {
    throw Error(ErrorCode::kConfiguration, "--table must be 1 or 2");
  }
  if (config.classifiers.empty()) throw Error(ErrorCode::kConfiguration, "no classifier selected");
  if (config.folds < 2) throw Error(ErrorCode::kConfiguration, "--folds must be at least 2");
  const FeatureMatrix x = load_features(config);
  if (!x.has_labels()) {
    throw Error(ErrorCode::kLabelsRequired, config.features + ": evaluation needs labeled features");
  }
  const bool table1 = config.table != 2;
  const bool table2 = config.table != 1;
  if (table2) check_components(config, x.cols);

  std::vector<PipelineConfig> grid;
  if (table1) {
    for (const auto set : {FeatureSet::kXyz, FeatureSet::kAll}) {
      for (const auto kind : config.classifiers) {
        grid.push_back({set, std::nullopt, kind, config.k, forest_config(config)});
      }
    }
  }
  if (table2) {
    for (std::size_t n = config.components.lo; n <= config.components.hi; ++n) {
      for (const auto kind : config.classifiers) {
        grid.push_back({FeatureSet::kAll, n, kind, config.k, forest_config(config)});
      }
    }
  }

  const CrossValPlan plan{config.folds, config.seed, true};
  std::vector<EvaluationReport> reports;
  json report_list = json::array();
  for (const auto& pc : grid) {
    Stopwatch clock;
    const StandardPipeline pipeline(pc);
    reports.push_back(cross_validate(x, plan, pipeline, config.f1, config.threads));
    report_list.push_back(reports.back());
    log << "[evaluate] " << to_string(pc.features) << " pca="
        << (pc.pca_components ? std::to_string(*pc.pca_components) : std::string("none")) << ' '
        << to_string(pc.classifier) << ": "
        << format_score_cell(reports.back().mean_f1, reports.back().std_f1) << " in "
        << fixed(clock.seconds()) << " s\n";
  }

  const fs::path manifest = manifest_path_for(config.features);
  json generation = nullptr;
  if (fs::exists(manifest)) generation = read_json(manifest).value("config", json(nullptr));

  ensure_dir(config.out_dir);
  const fs::path out = config.out_dir / "reports.json";
  write_json(out, {{"config", describe(config, "evaluate")},
                   {"features_digest", sha256_file(config.features)},
                   {"feature_generation", generation},
                   {"reports", report_list}});
  write_tables(reports, config.out_dir, log);
  return out;
}

fs::path cmd_run(const RunConfig& config, std::ostream& log) {
  // Fail on evaluation settings before spending time on features.
  if (config.table < 0 || config.table > 2) {
    throw Error(ErrorCode::kConfiguration, "--table must be 1 or 2");
  }
  if (config.table != 1) check_components(config, 3 + 7);
  RunConfig next = config;
  next.features = cmd_features(config, log).string();
  return cmd_evaluate(next, log);
}

fs::path cmd_report(const RunConfig& config, std::ostream& log) {
  if (config.reports.empty()) throw Error(ErrorCode::kConfiguration, "--reports is required");
  const json j = read_json(config.reports);
  std::vector<EvaluationReport> reports;
  try {
    for (const auto& r : j.at("reports")) reports.push_back(r.get<EvaluationReport>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, config.reports + ": " + e.what());
  }
  ensure_dir(config.out_dir);
  write_tables(reports, config.out_dir, log);
  return config.out_dir / "plot.csv";
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::string out_dir = ".";
  std::string normalize = "per-axis";
  std::string components;
  std::string classifier = "both";
  std::string f1 = "macro";

  CLI::App app{"Product-coefficient features and classification for LiDAR point clouds",
               "prodcoef"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", config.seed, "Seed for shuffling, bootstraps and synthesis");
  app.add_option("--out-dir", out_dir, "Directory for output artifacts");
  app.add_option("--threads", config.threads, "Worker threads (0 = auto); never changes results");

  const auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "LAS or CSV point file")->required();
    sub->add_option("--format", config.format, "Input format")
        ->check(CLI::IsMember({"las", "csv", "auto"}));
    sub->add_flag("--has-label", config.has_label, "CSV carries a fourth label column");
  };
  const auto add_features = [&](CLI::App* sub) {
    sub->add_option("--normalize", normalize, "Unit-cube mapping")
        ->check(CLI::IsMember({"per-axis", "uniform"}));
    sub->add_option("--radius", config.radius, "Neighborhood radius in normalized units");
    sub->add_flag("--no-include-center{false}", config.include_center,
                  "Exclude each point from its own neighborhood");
  };
  const auto add_evaluation = [&](CLI::App* sub) {
    sub->add_option("--table", config.table, "Experiment set: 1 (no PCA) or 2 (PCA sweep)")
        ->check(CLI::Range(1, 2));
    sub->add_option("--components", components, "PCA components, e.g. 3..10");
    sub->add_option("--classifier", classifier, "knn, rf, or both")
        ->check(CLI::IsMember({"knn", "rf", "both"}));
    sub->add_option("--k", config.k, "KNN neighbors");
    sub->add_option("--trees", config.trees, "Random forest size");
    sub->add_option("--max-depth", config.max_depth, "Tree depth cap (0 = unbounded)");
    sub->add_option("--folds", config.folds, "Cross-validation folds");
    sub->add_option("--f1", f1, "F1 averaging")->check(CLI::IsMember({"macro", "micro", "weighted"}));
  };

  auto* ingest = app.add_subcommand("ingest", "Read a LAS/CSV file and summarize it");
  add_input(ingest);

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic scene");
  synth->add_option("--classes", config.scene.classes, "Number of classes (2-4)");
  synth->add_option("--points-per-class", config.scene.points_per_class, "Points per class");
  synth->add_option("--separation", config.scene.separation, "Class separation (0 = overlap)");
  synth->add_option("--extent", config.scene.extent, "Footprint side length");
  synth->add_option("--terrain-amplitude", config.scene.terrain_amplitude, "Hill height");
  synth->add_option("--noise", config.scene.noise, "Vertical noise");
  synth->add_option("--output", config.output, "Output CSV (default <out-dir>/synth.csv)");

  auto* features = app.add_subcommand("features", "Compute the ten-column feature matrix");
  add_input(features);
  add_features(features);

  auto* pca = app.add_subcommand("pca", "Fit PCA on a feature CSV");
  pca->add_option("--features", config.features, "Feature CSV")->required();
  pca->add_option("--components", components, "Components to keep")->required();

  auto* train = app.add_subcommand("train", "Fit one classifier on a feature CSV");
  train->add_option("--features", config.features, "Feature CSV")->required();
  train->add_option("--classifier", classifier, "knn or rf")
      ->required()
      ->check(CLI::IsMember({"knn", "rf"}));
  train->add_option("--components", components, "Optional PCA components");
  train->add_option("--k", config.k, "KNN neighbors");
  train->add_option("--trees", config.trees, "Random forest size");
  train->add_option("--max-depth", config.max_depth, "Tree depth cap (0 = unbounded)");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the experiment grid");
  evaluate->add_option("--features", config.features, "Labeled feature CSV")->required();
  add_evaluation(evaluate);

  auto* run = app.add_subcommand("run", "features followed by evaluate");
  add_input(run);
  add_features(run);
  add_evaluation(run);

  auto* report = app.add_subcommand("report", "Re-render tables from a reports JSON");
  report->add_option("--reports", config.reports, "reports.json from evaluate or run")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    config.out_dir = out_dir;
    config.normalize = parse_normalize_mode(normalize);
    config.f1 = parse_f1_average(f1);
    if (!components.empty()) {
      config.components = parse_component_range(components);
      config.components_given = true;
    }
    if (classifier == "both") {
      config.classifiers = {ClassifierKind::kKnn, ClassifierKind::kRandomForest};
    } else {
      config.classifiers = {parse_classifier(classifier)};
    }

    if (ingest->parsed()) cmd_ingest(config, out);
    if (synth->parsed()) cmd_synth(config, out);
    if (features->parsed()) cmd_features(config, out);
    if (pca->parsed()) cmd_pca(config, out);
    if (train->parsed()) cmd_train(config, out);
    if (evaluate->parsed()) cmd_evaluate(config, out);
    if (run->parsed()) cmd_run(config, out);
    if (report->parsed()) cmd_report(config, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace prodcoef::cli
