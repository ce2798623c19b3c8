#pragma once

#include "panpose/dataset.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace panpose {

// Human-authored mapping of per-dataset keypoint names into the shared
// superset name space. File format: CSV with header
//   source_dataset,source_keypoint,main_name
// plus an optional companion file listing the superset order, one name per
// line. '#' starts a comment in either file.
class ConversionTable {
public:
    struct Entry {
        std::string source_dataset;
        std::string source_keypoint;
        std::string main_name;
    };

    ConversionTable() = default;

    // Adds one mapping. A repeated (dataset, source_keypoint) key keeps the
    // first entry and records a warning; transcribed tables occasionally carry
    // such duplicates. Two different source keypoints of one dataset mapping
    // onto one main name is an injectivity error.
    void add(const std::string& source_dataset, const std::string& source_keypoint,
             const std::string& main_name);

    void declare_superset(KeypointVocabulary superset);

    const std::optional<KeypointVocabulary>& declared_superset() const {
        return declared_superset_;
    }

    // Main name for (dataset, source keypoint), or nullopt when unmapped.
    std::optional<std::string> lookup(const std::string& source_dataset,
                                      const std::string& source_keypoint) const;

    // Source keypoints of one dataset, in insertion (file) order.
    std::vector<Entry> entries_for(const std::string& source_dataset) const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<std::string> source_datasets() const;

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::vector<Entry> entries_;
    std::map<std::pair<std::string, std::string>, std::string> by_key_;
    // (dataset, main_name) -> source keypoint, for the injectivity check
    std::map<std::pair<std::string, std::string>, std::string> by_main_;
    std::optional<KeypointVocabulary> declared_superset_;
    std::vector<std::string> warnings_;
};

// Parses the CSV format above. Throws ParseError on structural problems
// (wrong column count, missing header) and MergeError on injectivity
// collisions.
ConversionTable parse_conversion_table(const std::string& csv_bytes);
ConversionTable load_conversion_table(const std::string& csv_path);

// Reads the companion superset-order file (one name per line) into the table.
KeypointVocabulary parse_superset_list(const std::string& bytes);
void load_superset_list(ConversionTable& table, const std::string& path);

}  // namespace panpose
