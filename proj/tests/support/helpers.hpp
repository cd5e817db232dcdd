#pragma once

#include <functional>
#include <string>
#include <vector>

#include "odor/dataset.hpp"
#include "odor/molecule.hpp"
#include "odor/rng.hpp"
#include "odor/smarts.hpp"
#include "odor/tensor.hpp"

namespace odor::test {

/// Random valid SMILES assembled from fragment templates (chains with
/// functional-group heads/tails, occasional rings). Always parses.
std::string random_smiles(Rng& rng);

/// Random SMILES whose parse has at most `max_atoms` heavy atoms.
std::string random_small_smiles(Rng& rng, int max_atoms);

std::vector<int> random_permutation(int n, Rng& rng);

/// Relabels atoms by perm (perm[i] = new index of atom i) and shuffles the
/// bond list; a pure index remap of an already-perceived graph.
MolecularGraph permute_graph(const MolecularGraph& g, const std::vector<int>& perm, Rng& rng);

/// Exhaustive injective embedding enumeration with no search pruning;
/// independent oracle for match_pattern on small graphs.
std::vector<std::vector<int>> brute_force_matches(const SmartsPattern& p, const MolecularGraph& g);

/// O(P*N) concordant/tied pair counter; oracle for auroc.
double auroc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels);

/// Names of the functional groups used to label synthetic molecules.
const std::vector<std::string>& synthetic_label_names();

/// Deterministic rule-labeled dataset: `count` distinct molecules labeled
/// by the shipped functional-group patterns named above.
std::vector<DatasetRecord> synthetic_dataset(int count, uint64_t seed);

/// Random values bounded away from zero so relu/leaky kinks stay clear of
/// finite-difference probes.
Tensor random_safe_tensor(Rng& rng, std::vector<int> shape, double lo = -2.0, double hi = 2.0);

/// Max relative error between backward() and central differences for one
/// primitive, probed through a weighted-sum loss over every coordinate.
double fd_check_primitive(Tensor& input, const std::function<Tensor(Tape&, const Tensor&)>& op,
                          double h = 1e-5);

}  // namespace odor::test
