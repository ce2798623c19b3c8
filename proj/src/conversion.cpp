#include "panpose/conversion.hpp"

#include "panpose/coco_json.hpp"
#include "panpose/errors.hpp"

#include <algorithm>
#include <sstream>

namespace panpose {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

void ConversionTable::add(const std::string& source_dataset, const std::string& source_keypoint,
                          const std::string& main_name) {
    if (source_dataset.empty() || source_keypoint.empty() || main_name.empty()) {
        throw ParseError("conversion table entry has an empty field");
    }
    auto key = std::make_pair(source_dataset, source_keypoint);
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        if (it->second != main_name) {
            warnings_.push_back("duplicate mapping for (" + source_dataset + ", " +
                                source_keypoint + "): keeping '" + it->second + "', ignoring '" +
                                main_name + "'");
        }
        return;
    }
    auto main_key = std::make_pair(source_dataset, main_name);
    if (auto it = by_main_.find(main_key); it != by_main_.end()) {
        throw MergeError("injectivity violation in dataset '" + source_dataset + "': both '" +
                         it->second + "' and '" + source_keypoint + "' map to '" + main_name +
                         "'");
    }
    by_key_.emplace(std::move(key), main_name);
    by_main_.emplace(std::move(main_key), source_keypoint);
    entries_.push_back({source_dataset, source_keypoint, main_name});
}

void ConversionTable::declare_superset(KeypointVocabulary superset) {
    for (const auto& entry : entries_) {
        if (!superset.contains(entry.main_name)) {
            throw MergeError("main name '" + entry.main_name +
                             "' is not in the declared superset");
        }
    }
    declared_superset_ = std::move(superset);
}

std::optional<std::string> ConversionTable::lookup(const std::string& source_dataset,
                                                   const std::string& source_keypoint) const {
    auto it = by_key_.find(std::make_pair(source_dataset, source_keypoint));
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

std::vector<ConversionTable::Entry> ConversionTable::entries_for(
    const std::string& source_dataset) const {
    std::vector<Entry> out;
    for (const auto& e : entries_) {
        if (e.source_dataset == source_dataset) out.push_back(e);
    }
    return out;
}

std::vector<std::string> ConversionTable::source_datasets() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        if (std::find(out.begin(), out.end(), e.source_dataset) == out.end()) {
            out.push_back(e.source_dataset);
        }
    }
    return out;
}

ConversionTable parse_conversion_table(const std::string& csv_bytes) {
    ConversionTable table;
    std::istringstream ss(csv_bytes);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv_line(t);
        if (fields.size() != 3) {
            throw ParseError("conversion table line " + std::to_string(line_no) + ": expected 3 " +
                             "comma-separated fields, got " + std::to_string(fields.size()));
        }
        if (!header_seen) {
            header_seen = true;
            if (fields[0] == "source_dataset" && fields[1] == "source_keypoint" &&
                fields[2] == "main_name") {
                continue;
            }
            throw ParseError(
                "conversion table must start with header "
                "'source_dataset,source_keypoint,main_name'");
        }
        table.add(fields[0], fields[1], fields[2]);
    }
    if (!header_seen) throw ParseError("conversion table is empty");
    return table;
}

ConversionTable load_conversion_table(const std::string& csv_path) {
    try {
        return parse_conversion_table(read_file(csv_path));
    } catch (const ParseError& e) {
        throw ParseError(csv_path + ": " + e.what());
    }
}

KeypointVocabulary parse_superset_list(const std::string& bytes) {
    std::vector<std::string> names;
    std::istringstream ss(bytes);
    std::string line;
    while (std::getline(ss, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        names.push_back(t);
    }
    if (names.empty()) throw ParseError("superset list is empty");
    return KeypointVocabulary(std::move(names));
}

void load_superset_list(ConversionTable& table, const std::string& path) {
    table.declare_superset(parse_superset_list(read_file(path)));
}

}  // namespace panpose
