#pragma once

#include <vector>

#include "odor/molecule.hpp"

namespace odor {

/// Minimum cycle basis of the molecular graph, as atom-index cycles.
/// Basis size equals bonds - atoms + connected components.
std::vector<std::vector<int>> find_rings(const MolecularGraph& graph);

/// All-pairs hop counts. Entry (i,j) is the minimum number of bonds on a
/// path from i to j, -1 when disconnected, 0 on the diagonal.
std::vector<std::vector<int>> shortest_paths(const MolecularGraph& graph);

int connected_components(const MolecularGraph& graph);

}  // namespace odor
