#pragma once

#include "panpose/dataset.hpp"

#include <string>
#include <vector>

namespace panpose {

struct ParseResult {
    PoseDataset dataset;
    std::vector<Violation> warnings;  // soft violations found while reading
};

// Reads a COCO-keypoint JSON document:
//   images[{id, file_name, width, height}]
//   annotations[{id, image_id, keypoints[3m], num_keypoints, bbox?, score?}]
//   categories[{id, name, keypoints[m]}]
// The single category's keypoints array defines the vocabulary. Files with
// more than one category are rejected. Unlabeled triples (v == 0) are
// normalized to (0, 0, 0) with a warning; labeled keypoints outside the image
// bounds produce warnings, not errors.
//
// Throws ParseError (with byte offset) on malformed JSON and SchemaError on
// invariant violations (triple-count mismatch, duplicate ids, ...).
ParseResult parse_dataset(const std::string& bytes);

// Inverse of parse_dataset. Deterministic key order, indented output, doubles
// written with shortest round-trip representation, so serializing twice is
// byte-stable and parse(serialize(ds)) == ds.
std::string serialize_dataset(const PoseDataset& ds);

// File helpers. Throw IoError when the path cannot be read/written.
ParseResult load_dataset(const std::string& path);
void save_dataset(const PoseDataset& ds, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace panpose
