#include "odor/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace odor {

namespace {

constexpr char kMagic[8] = {'O', 'D', 'O', 'R', 'C', 'K', 'P', '1'};

using nlohmann::json;

json model_config_to_json(const ModelConfig& c) {
  return json{{"heads", c.heads},
              {"head_dim", c.head_dim},
              {"final_dim", c.final_dim},
              {"global_hidden", c.global_hidden},
              {"global_out", c.global_out},
              {"fusion_hidden", c.fusion_hidden},
              {"labels", c.labels},
              {"leaky_slope", c.leaky_slope},
              {"dropout", c.dropout},
              {"node_dim", c.node_dim},
              {"edge_dim", c.edge_dim},
              {"global_dim", c.global_dim}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.heads = j.at("heads");
  c.head_dim = j.at("head_dim");
  c.final_dim = j.at("final_dim");
  c.global_hidden = j.at("global_hidden");
  c.global_out = j.at("global_out");
  c.fusion_hidden = j.at("fusion_hidden");
  c.labels = j.at("labels");
  c.leaky_slope = j.at("leaky_slope");
  c.dropout = j.at("dropout");
  c.node_dim = j.at("node_dim");
  c.edge_dim = j.at("edge_dim");
  c.global_dim = j.at("global_dim");
  return c;
}

json feature_config_to_json(const FeatureConfig& c) {
  json bounds = json::object();
  for (const auto& [name, range] : c.normalization_bounds)
    bounds[name] = json::array({range.first, range.second});
  json patterns = json::array();
  for (const auto& group : c.groups())
    for (const auto& p : group.patterns) patterns.push_back(json::array({group.name, p.text}));
  json maccs = json::array();
  for (const auto& key : c.keys())
    maccs.push_back(json::array({key.index, key.pattern.text, key.min_count}));
  return json{{"morgan_radius", c.morgan_radius},
              {"morgan_bits", c.morgan_bits},
              {"maccs_bits", c.maccs_bits},
              {"topo_bits", c.topo_bits},
              {"atomic", c.atomic_enabled},
              {"edge", c.edge_enabled},
              {"fingerprint", c.fingerprint_enabled},
              {"groups_per_atom", c.groups_per_atom},
              {"bounds", bounds},
              {"patterns", patterns},
              {"maccs", maccs}};
}

FeatureConfig feature_config_from_json(const json& j) {
  FeatureConfig c;
  c.morgan_radius = j.at("morgan_radius");
  c.morgan_bits = j.at("morgan_bits");
  c.maccs_bits = j.at("maccs_bits");
  c.topo_bits = j.at("topo_bits");
  c.atomic_enabled = j.at("atomic");
  c.edge_enabled = j.at("edge");
  c.fingerprint_enabled = j.at("fingerprint");
  c.groups_per_atom = j.at("groups_per_atom");
  c.normalization_bounds.clear();
  for (auto it = j.at("bounds").begin(); it != j.at("bounds").end(); ++it)
    c.normalization_bounds[it.key()] = {it.value()[0], it.value()[1]};
  c.pattern_set.clear();
  for (const auto& entry : j.at("patterns")) {
    std::string name = entry[0];
    SmartsPattern p = parse_smarts(std::string(entry[1]), name);
    auto it = std::find_if(c.pattern_set.begin(), c.pattern_set.end(),
                           [&](const PatternGroup& g) { return g.name == name; });
    if (it == c.pattern_set.end())
      c.pattern_set.push_back({name, {std::move(p)}});
    else
      it->patterns.push_back(std::move(p));
  }
  c.maccs_keys.clear();
  for (const auto& entry : j.at("maccs")) {
    MaccsKeyLine key;
    key.index = entry[0];
    key.pattern = parse_smarts(std::string(entry[1]), "maccs_" + std::to_string(key.index));
    key.min_count = entry[2];
    c.maccs_keys.push_back(std::move(key));
  }
  return c;
}

std::string element_table_to_text(const ElementTable& table) {
  std::ostringstream os;
  for (const auto& rec : table.records()) {
    os << rec.symbol << " " << rec.atomic_number << " " << rec.electronegativity << " "
       << rec.atomic_volume << " " << rec.electron_affinity << " ";
    for (size_t i = 0; i < rec.default_valences.size(); ++i)
      os << (i ? "," : "") << rec.default_valences[i];
    os << "\n";
  }
  return os.str();
}

struct ArrayRef {
  std::string name;
  std::vector<int> shape;
  const std::vector<double>* data;
};

void collect_arrays(ModelParams& params, const AdamState* optimizer, std::vector<ArrayRef>& out) {
  for (Tensor& t : params.all_parameters()) out.push_back({t.name(), t.shape(), &t.values()});
  int layer_no = 1;
  for (GatLayerParams* layer : {&params.layer1, &params.layer2, &params.layer3}) {
    std::string prefix = "layer" + std::to_string(layer_no++);
    out.push_back({prefix + ".bn_running_mean",
                   {static_cast<int>(layer->bn.running_mean.size())}, &layer->bn.running_mean});
    out.push_back({prefix + ".bn_running_var",
                   {static_cast<int>(layer->bn.running_var.size())}, &layer->bn.running_var});
  }
  if (optimizer) {
    for (size_t i = 0; i < optimizer->m.size(); ++i) {
      out.push_back({"adam.m." + std::to_string(i),
                     {static_cast<int>(optimizer->m[i].size())}, &optimizer->m[i]});
      out.push_back({"adam.v." + std::to_string(i),
                     {static_cast<int>(optimizer->v[i].size())}, &optimizer->v[i]});
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& path, ModelParams& params, const FeatureConfig& features,
                     const ElementTable& elements, const std::vector<std::string>& vocabulary,
                     int epoch, const AdamState* optimizer) {
  std::vector<ArrayRef> arrays;
  collect_arrays(params, optimizer, arrays);

  json manifest = json::array();
  uint64_t offset = 0;
  for (const ArrayRef& a : arrays) {
    manifest.push_back(json{{"name", a.name}, {"shape", a.shape}, {"offset", offset}});
    offset += a.data->size() * sizeof(double);
  }
  json header{{"format_version", 1},
              {"epoch", epoch},
              {"model", model_config_to_json(params.config)},
              {"features", feature_config_to_json(features)},
              {"element_table", element_table_to_text(elements)},
              {"vocabulary", vocabulary},
              {"arrays", manifest}};
  if (optimizer) {
    header["optimizer"] = json{{"lr", optimizer->lr},
                               {"beta1", optimizer->beta1},
                               {"beta2", optimizer->beta2},
                               {"eps", optimizer->eps},
                               {"step", optimizer->step}};
  }
  std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const ArrayRef& a : arrays)
    out.write(reinterpret_cast<const char*>(a.data->data()),
              static_cast<std::streamsize>(a.data->size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not an odorgat checkpoint: " + path);
  uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("truncated checkpoint header: " + path);
  json header = json::parse(header_text);
  if (header.at("format_version") != 1)
    throw std::runtime_error("unsupported checkpoint format version");

  LoadedCheckpoint ck;
  ck.epoch = header.at("epoch");
  ck.features = feature_config_from_json(header.at("features"));
  ck.elements = ElementTable::parse(std::string(header.at("element_table")), path + " element table");
  ck.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
  ModelConfig config = model_config_from_json(header.at("model"));
  ck.params = ModelParams::init(config, /*seed=*/0);

  std::map<std::string, Tensor> by_name;
  for (Tensor& t : ck.params.all_parameters()) by_name.emplace(t.name(), t);

  std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  bool saw_optimizer_arrays = false;
  for (const auto& entry : header.at("arrays")) {
    std::string name = entry.at("name");
    std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    uint64_t offset = entry.at("offset");
    int64_t count = 1;
    for (int d : shape) count *= d;
    if (offset + count * sizeof(double) > payload.size())
      throw std::runtime_error("truncated checkpoint payload at array " + name);
    auto read_into = [&](std::vector<double>& dst) {
      dst.resize(count);
      std::memcpy(dst.data(), payload.data() + offset, count * sizeof(double));
    };

    if (auto it = by_name.find(name); it != by_name.end()) {
      if (it->second.shape() != shape)
        throw std::runtime_error("checkpoint array shape mismatch for " + name);
      read_into(it->second.values());
    } else if (name.ends_with(".bn_running_mean") || name.ends_with(".bn_running_var")) {
      GatLayerParams* layer = name.starts_with("layer1")   ? &ck.params.layer1
                              : name.starts_with("layer2") ? &ck.params.layer2
                                                           : &ck.params.layer3;
      read_into(name.ends_with("mean") ? layer->bn.running_mean : layer->bn.running_var);
    } else if (name.starts_with("adam.")) {
      saw_optimizer_arrays = true;
      size_t dot = name.rfind('.');
      size_t index = std::stoul(name.substr(dot + 1));
      auto& bank = name[5] == 'm' ? ck.optimizer.m : ck.optimizer.v;
      if (bank.size() <= index) bank.resize(index + 1);
      read_into(bank[index]);
    } else {
      throw std::runtime_error("unknown checkpoint array: " + name);
    }
  }
  if (header.contains("optimizer")) {
    ck.has_optimizer = saw_optimizer_arrays;
    const auto& opt = header.at("optimizer");
    ck.optimizer.lr = opt.at("lr");
    ck.optimizer.beta1 = opt.at("beta1");
    ck.optimizer.beta2 = opt.at("beta2");
    ck.optimizer.eps = opt.at("eps");
    ck.optimizer.step = opt.at("step");
  }
  return ck;
}

}  // namespace odor
