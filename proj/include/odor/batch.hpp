#pragma once

#include <span>
#include <vector>

#include "odor/featurize.hpp"

namespace odor {

/// Several molecules packed into one disjoint graph. Edges are directed
/// (both directions per bond); a self-edge with a zero feature vector is
/// appended for every node so no node has an empty in-neighborhood.
struct BatchGraph {
  int num_nodes = 0;
  int num_graphs = 0;
  int node_dim = 0;
  int edge_dim = 0;
  int global_dim = 0;
  int label_dim = 0;

  std::vector<double> node_features;  // num_nodes x node_dim
  std::vector<int> edge_src;
  std::vector<int> edge_dst;
  std::vector<double> edge_features;  // num_edges x edge_dim
  std::vector<int> graph_ids;         // per node
  std::vector<double> global_features;  // num_graphs x global_dim
  std::vector<double> labels;           // num_graphs x label_dim, empty when absent

  int num_edges() const { return static_cast<int>(edge_src.size()); }

  /// Throws when graph_ids do not partition nodes or an edge crosses graphs.
  void validate() const;
};

BatchGraph make_batch(std::span<const FeatureSet> molecules, bool add_self_loops = true);

}  // namespace odor
