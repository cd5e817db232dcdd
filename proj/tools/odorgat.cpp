// odorgat: train, evaluate and run the molecular odor prediction model.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "odor/checkpoint.hpp"
#include "odor/dataset.hpp"
#include "odor/smiles.hpp"
#include "odor/train.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void report_rejections(const odor::Dataset& ds) {
  for (const auto& row : ds.rejected)
    std::cerr << "rejected line " << row.line << ": " << row.reason << "\n";
  if (!ds.rejected.empty())
    std::cerr << ds.rejected.size() << " of " << ds.total_rows << " rows rejected\n";
}

const odor::ElementTable& element_table(const std::string& path, odor::ElementTable& storage) {
  if (path.empty()) return odor::ElementTable::builtin();
  storage = odor::ElementTable::load(path);
  return storage;
}

std::string table_one_line(const odor::MetricReport& report) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "AUROC %.4f  F1 %.4f", report.mean_auroc, report.macro_f1);
  return buf;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_dir, long long seed_override,
              const std::string& elements_path) {
  odor::TrainConfig config;
  try {
    if (!config_path.empty()) config = odor::train_config_from_json(read_text_file(config_path));
    if (seed_override >= 0) config.seed = static_cast<uint64_t>(seed_override);
    if (config.loss.alpha1_ramp_epochs <= 0) config.loss.alpha1_ramp_epochs = config.epochs;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  odor::ElementTable custom_table;
  try {
    const odor::ElementTable& table = element_table(elements_path, custom_table);
    odor::Dataset ds = odor::load_dataset(data_path, /*require_labels=*/true, table);
    report_rejections(ds);
    if (ds.records.empty()) {
      std::cerr << "data error: no valid records in " << data_path << "\n";
      return kExitData;
    }

    odor::TrainOutput result = odor::train_model(config, ds.records, table);

    std::filesystem::create_directories(out_dir);
    std::ofstream log(out_dir + "/train_log.jsonl");
    for (const auto& line : result.log_lines) log << line << "\n";
    log.close();

    odor::save_checkpoint(out_dir + "/final.ckpt", result.params, config.features, table,
                          result.vocabulary.names(), config.epochs);
    odor::save_checkpoint(out_dir + "/best.ckpt", result.best_params, config.features, table,
                          result.vocabulary.names(),
                          result.best_epoch >= 0 ? result.best_epoch : config.epochs);

    if (result.final_test_metrics) {
      std::ofstream metrics(out_dir + "/metrics.json");
      metrics << result.final_test_metrics->to_json(result.vocabulary.names()) << "\n";
      std::cout << table_one_line(*result.final_test_metrics) << "\n";
    }
    std::cout << "wrote " << out_dir << "/final.ckpt"
              << " (" << result.vocabulary.size() << " labels, " << config.epochs << " epochs)\n";
    return kExitOk;
  } catch (const odor::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const odor::TensorError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path, int batch_size) {
  try {
    odor::LoadedCheckpoint ck = odor::load_checkpoint(checkpoint_path);
    odor::Dataset ds = odor::load_dataset(data_path, /*require_labels=*/true, ck.elements);
    report_rejections(ds);
    if (ds.records.empty()) {
      std::cerr << "data error: no valid records in " << data_path << "\n";
      return kExitData;
    }
    auto vocabulary = odor::LabelVocabulary::from_names(ck.vocabulary);
    odor::MetricReport report = odor::evaluate_model(ck.params, ck.features, vocabulary,
                                                     ds.records, ck.elements, batch_size);
    std::cout << report.to_json(ck.vocabulary) << "\n";
    std::cout << table_one_line(report) << "\n";
    return kExitOk;
  } catch (const odor::TensorError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_predict(const std::string& checkpoint_path, const std::string& input_path, int top_k) {
  try {
    odor::LoadedCheckpoint ck = odor::load_checkpoint(checkpoint_path);
    auto vocabulary = odor::LabelVocabulary::from_names(ck.vocabulary);

    std::vector<std::string> smiles;
    std::istream* in = &std::cin;
    std::ifstream file;
    if (input_path != "-") {
      file.open(input_path);
      if (!file) throw std::runtime_error("cannot open input: " + input_path);
      in = &file;
    }
    std::string line;
    while (std::getline(*in, line)) {
      if (!line.empty()) smiles.push_back(line);
    }

    auto predictions =
        odor::predict_smiles(ck.params, ck.features, vocabulary, smiles, ck.elements, top_k);
    size_t succeeded = 0;
    for (const auto& pred : predictions) {
      if (!pred.ok) {
        std::cerr << "parse error for '" << pred.smiles << "': " << pred.error << "\n";
        continue;
      }
      ++succeeded;
      json out;
      out["smiles"] = pred.smiles;
      json probs = json::array();
      for (const auto& [name, p] : pred.descriptor_probs) probs.push_back(json::array({name, p}));
      out["predictions"] = probs;
      std::cout << out.dump() << "\n";
    }
    return succeeded > 0 || predictions.empty() ? kExitOk : kExitData;
  } catch (const odor::TensorError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_featurize(const std::string& data_path, const std::string& out_path,
                  const std::string& format, const std::string& elements_path,
                  const std::string& patterns_path, const std::string& maccs_path) {
  try {
    odor::ElementTable custom_table;
    const odor::ElementTable& table = element_table(elements_path, custom_table);
    odor::FeatureConfig features;
    if (!patterns_path.empty()) features.pattern_set = odor::load_pattern_file(patterns_path);
    if (!maccs_path.empty()) features.maccs_keys = odor::load_maccs_file(maccs_path);
    features.validate();

    odor::Dataset ds = odor::load_dataset(data_path, /*require_labels=*/false, table);
    report_rejections(ds);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    if (format == "csv")
      out << "smiles,num_atoms,num_edges,atom_dim,bond_dim,node_matrix,edge_index,edge_matrix,"
             "global,group_vector,labels\n";

    auto join = [](const std::vector<double>& v) {
      std::ostringstream os;
      for (size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << json(v[i]).dump();
      return os.str();
    };

    for (const auto& rec : ds.records) {
      odor::MolecularGraph graph = odor::parse_smiles(rec.smiles, table);
      odor::FeatureSet fs = odor::featurize_molecule(graph, features);
      if (format == "json") {
        json j;
        j["smiles"] = rec.smiles;
        j["num_atoms"] = fs.num_atoms;
        j["atom_dim"] = fs.atom_dim;
        j["bond_dim"] = fs.bond_dim;
        json nodes = json::array();
        for (int i = 0; i < fs.num_atoms; ++i)
          nodes.push_back(std::vector<double>(fs.node_matrix.begin() + i * fs.atom_dim,
                                              fs.node_matrix.begin() + (i + 1) * fs.atom_dim));
        j["node_matrix"] = nodes;
        json edges = json::array();
        for (auto& [s, d] : fs.edge_index) edges.push_back(json::array({s, d}));
        j["edge_index"] = edges;
        json edge_rows = json::array();
        for (int e = 0; e < fs.num_edges(); ++e)
          edge_rows.push_back(std::vector<double>(fs.edge_matrix.begin() + e * fs.bond_dim,
                                                  fs.edge_matrix.begin() + (e + 1) * fs.bond_dim));
        j["edge_matrix"] = edge_rows;
        j["global"] = fs.global_vector;
        j["group_vector"] = fs.group_vector;
        j["labels"] = rec.labels;
        out << j.dump() << "\n";
      } else {
        std::ostringstream edge_idx;
        for (size_t e = 0; e < fs.edge_index.size(); ++e)
          edge_idx << (e ? ";" : "") << fs.edge_index[e].first << ">" << fs.edge_index[e].second;
        std::ostringstream labels;
        for (size_t l = 0; l < rec.labels.size(); ++l) labels << (l ? ";" : "") << rec.labels[l];
        out << rec.smiles << "," << fs.num_atoms << "," << fs.num_edges() << "," << fs.atom_dim
            << "," << fs.bond_dim << "," << join(fs.node_matrix) << "," << edge_idx.str() << ","
            << join(fs.edge_matrix) << "," << join(fs.global_vector) << ","
            << join(fs.group_vector) << "," << labels.str() << "\n";
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_stats(const std::string& data_path, const std::string& json_path) {
  try {
    odor::Dataset ds = odor::load_dataset(data_path, /*require_labels=*/false);
    report_rejections(ds);
    odor::DatasetStats stats = odor::dataset_stats(ds.records);
    std::cout << stats.to_table() << "\n";
    if (json_path.empty()) {
      std::cout << stats.to_json() << "\n";
    } else {
      std::ofstream out(json_path);
      if (!out) throw std::runtime_error("cannot write: " + json_path);
      out << stats.to_json() << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molecular odor prediction with an edge-aware graph attention network"};
  app.require_subcommand(1);

  std::string data_path, config_path, out_dir, checkpoint_path, input_path = "-";
  std::string format = "json", elements_path, patterns_path, maccs_path, json_path;
  long long seed_override = -1;
  int top_k = 0, batch_size = 32;

  auto* train = app.add_subcommand("train", "train a model on a labeled CSV");
  train->add_option("--data", data_path, "dataset CSV (header: smiles,labels)")->required();
  train->add_option("--config", config_path, "config JSON path");
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--seed", seed_override, "override the config seed");
  train->add_option("--elements", elements_path, "element property table override");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a labeled CSV");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--data", data_path, "dataset CSV")->required();
  eval->add_option("--batch-size", batch_size, "inference batch size");

  auto* predict = app.add_subcommand("predict", "predict descriptors for SMILES lines");
  predict->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  predict->add_option("--input", input_path, "SMILES file, or - for stdin");
  predict->add_option("--top-k", top_k, "keep only the k most probable descriptors");

  auto* featurize = app.add_subcommand("featurize", "emit per-molecule feature records");
  featurize->add_option("--data", data_path, "dataset CSV")->required();
  featurize->add_option("--out", out_dir, "output file")->required();
  featurize->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  featurize->add_option("--elements", elements_path, "element property table override");
  featurize->add_option("--patterns", patterns_path, "functional-group pattern file override");
  featurize->add_option("--maccs", maccs_path, "MACCS key definition file override");

  auto* stats = app.add_subcommand("stats", "label-count histogram and descriptor frequencies");
  stats->add_option("--data", data_path, "dataset CSV")->required();
  stats->add_option("--json", json_path, "also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (train->parsed()) return cmd_train(data_path, config_path, out_dir, seed_override, elements_path);
  if (eval->parsed()) return cmd_eval(checkpoint_path, data_path, batch_size);
  if (predict->parsed()) return cmd_predict(checkpoint_path, input_path, top_k);
  if (featurize->parsed())
    return cmd_featurize(data_path, out_dir, format, elements_path, patterns_path, maccs_path);
  if (stats->parsed()) return cmd_stats(data_path, json_path);
  return kExitUsage;
}
