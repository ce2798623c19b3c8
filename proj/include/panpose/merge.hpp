#pragma once

#include "panpose/conversion.hpp"
#include "panpose/dataset.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace panpose {

struct MergeReport {
    std::size_t superset_size = 0;
    // dataset name -> fraction of superset keypoints it annotates (v > 0 somewhere)
    std::map<std::string, double> per_dataset_coverage;
    // fraction of (annotation, keypoint) slots with v == 0 in the merged set
    double sparsity = 0.0;
    // (dataset, source keypoint) pairs with no conversion-table entry
    std::vector<std::pair<std::string, std::string>> unmapped_keypoints;
    std::vector<std::string> warnings;
};

// Union of the datasets' vocabularies after renaming through the table.
// When the table declares a superset its order is authoritative; otherwise
// names appear in first-appearance order across datasets in input order.
// Table entries for datasets not among the inputs are ignored; entries
// naming a keypoint absent from their source vocabulary are errors.
KeypointVocabulary build_superset(const ConversionTable& table,
                                  const std::vector<PoseDataset>& datasets);

// Re-indexes every annotation of ds into superset channel order. Mapped
// keypoints keep their (x, y, v) exactly; channels without a source label
// become (0, 0, 0); unmapped source keypoints are dropped. num_keypoints is
// recomputed. Ids, bboxes and scores pass through unchanged.
PoseDataset project_dataset(const PoseDataset& ds, const ConversionTable& table,
                            const KeypointVocabulary& superset);

// Source keypoints that the table does not map, per dataset, in vocabulary order.
std::vector<std::pair<std::string, std::string>> collect_unmapped(
    const ConversionTable& table, const std::vector<PoseDataset>& datasets);

// Concatenates projected datasets (all sharing one vocabulary) into a single
// "super" dataset. Image and annotation ids are re-assigned 0.. in
// (input order, original id) order. Each image is tagged with its source
// dataset name; untagged images also get their file paths namespaced as
// "<source>/<file_name>". Images already tagged by a previous merge pass
// through untouched, which makes merge idempotent.
std::pair<PoseDataset, MergeReport> merge(const std::vector<PoseDataset>& projected);

// build_superset + project_dataset for each input + merge, with the
// unmapped-keypoint report filled in. This is what the merge CLI runs.
std::pair<PoseDataset, MergeReport> merge_pipeline(const ConversionTable& table,
                                                   const std::vector<PoseDataset>& datasets);

}  // namespace panpose
