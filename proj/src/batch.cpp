#include "odor/batch.hpp"

#include <stdexcept>

namespace odor {

void BatchGraph::validate() const {
  if (static_cast<int>(graph_ids.size()) != num_nodes)
    throw std::runtime_error("batch: graph_ids do not cover the nodes");
  for (int id : graph_ids)
    if (id < 0 || id >= num_graphs) throw std::runtime_error("batch: graph id out of range");
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_src[e] < 0 || edge_src[e] >= num_nodes || edge_dst[e] < 0 || edge_dst[e] >= num_nodes)
      throw std::runtime_error("batch: edge endpoint out of range");
    if (graph_ids[edge_src[e]] != graph_ids[edge_dst[e]])
      throw std::runtime_error("batch: edge connects nodes of different graphs");
  }
}

BatchGraph make_batch(std::span<const FeatureSet> molecules, bool add_self_loops) {
  if (molecules.empty()) throw std::runtime_error("batch: no molecules");
  BatchGraph batch;
  batch.num_graphs = static_cast<int>(molecules.size());
  batch.node_dim = molecules[0].atom_dim;
  batch.edge_dim = molecules[0].bond_dim;
  batch.global_dim = static_cast<int>(molecules[0].global_vector.size());
  batch.label_dim = static_cast<int>(molecules[0].label_vector.size());

  int node_offset = 0;
  for (int g = 0; g < batch.num_graphs; ++g) {
    const FeatureSet& fs = molecules[g];
    if (fs.atom_dim != batch.node_dim || fs.bond_dim != batch.edge_dim ||
        static_cast<int>(fs.global_vector.size()) != batch.global_dim ||
        static_cast<int>(fs.label_vector.size()) != batch.label_dim)
      throw std::runtime_error("batch: molecules featurized with mismatched configs");
    batch.node_features.insert(batch.node_features.end(), fs.node_matrix.begin(),
                               fs.node_matrix.end());
    for (int i = 0; i < fs.num_atoms; ++i) batch.graph_ids.push_back(g);
    for (const auto& [src, dst] : fs.edge_index) {
      batch.edge_src.push_back(src + node_offset);
      batch.edge_dst.push_back(dst + node_offset);
    }
    batch.edge_features.insert(batch.edge_features.end(), fs.edge_matrix.begin(),
                               fs.edge_matrix.end());
    if (add_self_loops) {
      for (int i = 0; i < fs.num_atoms; ++i) {
        batch.edge_src.push_back(i + node_offset);
        batch.edge_dst.push_back(i + node_offset);
        batch.edge_features.insert(batch.edge_features.end(), batch.edge_dim, 0.0);
      }
    }
    batch.global_features.insert(batch.global_features.end(), fs.global_vector.begin(),
                                 fs.global_vector.end());
    batch.labels.insert(batch.labels.end(), fs.label_vector.begin(), fs.label_vector.end());
    node_offset += fs.num_atoms;
  }
  batch.num_nodes = node_offset;
  batch.validate();
  return batch;
}

}  // namespace odor
