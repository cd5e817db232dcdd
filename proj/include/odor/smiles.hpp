#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "odor/molecule.hpp"

namespace odor {

enum class SmilesErrorKind {
  kEmptyInput,
  kUnknownElement,
  kUnbalancedRingClosure,
  kUnbalancedParenthesis,
  kValenceViolation,
  kAromaticityError,
  kDuplicateBond,
  kSyntax,
};

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, size_t offset, const std::string& message)
      : std::runtime_error(message + " (at offset " + std::to_string(offset) + ")"),
        kind(kind),
        offset(offset) {}

  SmilesErrorKind kind;
  size_t offset;
};

/// Parses a SMILES string into a molecular graph with perceived
/// aromaticity, filled implicit hydrogens, and computed ring membership.
///
/// Supported dialect: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I),
/// lowercase aromatic atoms, bracket atoms with charge and explicit H
/// counts, ring closures 1-9 and %nn, branches, bond symbols - = # :,
/// and '.' fragment separators. Stereo markers (/ \ @) and isotopes are
/// accepted and ignored with a warning.
MolecularGraph parse_smiles(std::string_view text, const ElementTable& table = ElementTable::builtin(),
                            std::vector<std::string>* warnings = nullptr);

}  // namespace odor
