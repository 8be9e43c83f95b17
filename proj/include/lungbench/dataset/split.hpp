#pragma once

#include <cstddef>
#include <vector>

#include "lungbench/dataset/manifest.hpp"

namespace lungbench::dataset {

// Indices into DatasetManifest::records.
struct FoldAssignment {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Partitions the groups of the non-test records (split train, validation
// or unassigned) into fold_count folds; fold i validates on group-fold i and
// trains on the rest. Deterministic in manifest.seed.
std::vector<FoldAssignment> grouped_kfold(const DatasetManifest& manifest);

}  // namespace lungbench::dataset
