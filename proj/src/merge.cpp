#include "panpose/merge.hpp"

#include "panpose/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace panpose {

namespace {

// Each table entry for this dataset must name a real source keypoint.
void check_table_against_vocabulary(const ConversionTable& table, const PoseDataset& ds) {
    for (const auto& entry : table.entries_for(ds.name)) {
        if (!ds.vocabulary.contains(entry.source_keypoint)) {
            throw MergeError("conversion table maps '" + entry.source_keypoint + "' of dataset '" +
                             ds.name + "', but that keypoint is not in the dataset's vocabulary");
        }
    }
}

}  // namespace

KeypointVocabulary build_superset(const ConversionTable& table,
                                  const std::vector<PoseDataset>& datasets) {
    for (const auto& ds : datasets) check_table_against_vocabulary(table, ds);

    if (table.declared_superset()) return *table.declared_superset();

    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& ds : datasets) {
        for (const auto& src_name : ds.vocabulary.names()) {
            auto main = table.lookup(ds.name, src_name);
            if (main && seen.insert(*main).second) names.push_back(*main);
        }
    }
    return KeypointVocabulary(std::move(names));
}

PoseDataset project_dataset(const PoseDataset& ds, const ConversionTable& table,
                            const KeypointVocabulary& superset) {
    check_table_against_vocabulary(table, ds);

    // source channel -> superset channel, -1 for unmapped
    std::vector<int> channel_map(ds.vocabulary.size(), -1);
    for (std::size_t c = 0; c < ds.vocabulary.size(); ++c) {
        if (auto main = table.lookup(ds.name, ds.vocabulary.name(c))) {
            const int k = superset.index_of(*main);
            if (k < 0) {
                throw MergeError("main name '" + *main + "' missing from the superset");
            }
            channel_map[c] = k;
        }
    }

    PoseDataset out;
    out.name = ds.name;
    out.category_name = ds.category_name;
    out.category_id = ds.category_id;
    out.vocabulary = superset;
    out.images = ds.images;
    out.annotations.reserve(ds.annotations.size());
    for (const auto& ann : ds.annotations) {
        Annotation proj;
        proj.id = ann.id;
        proj.image_id = ann.image_id;
        proj.bbox = ann.bbox;
        proj.score = ann.score;
        proj.keypoints.assign(superset.size(), Keypoint{});
        for (std::size_t c = 0; c < ann.keypoints.size(); ++c) {
            if (channel_map[c] >= 0) proj.keypoints[channel_map[c]] = ann.keypoints[c];
        }
        proj.num_keypoints = proj.count_labeled();
        out.annotations.push_back(std::move(proj));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> collect_unmapped(
    const ConversionTable& table, const std::vector<PoseDataset>& datasets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& ds : datasets) {
        for (const auto& src_name : ds.vocabulary.names()) {
            if (!table.lookup(ds.name, src_name)) out.emplace_back(ds.name, src_name);
        }
    }
    return out;
}

std::pair<PoseDataset, MergeReport> merge(const std::vector<PoseDataset>& projected) {
    if (projected.empty()) throw MergeError("merge requires at least one dataset");
    const KeypointVocabulary& vocab = projected.front().vocabulary;
    for (const auto& ds : projected) {
        if (!(ds.vocabulary == vocab)) {
            throw MergeError("vocabulary mismatch: dataset '" + ds.name +
                             "' is not in the shared superset space");
        }
    }

    PoseDataset merged;
    merged.name = "merged";
    merged.category_name = projected.front().category_name;
    merged.category_id = projected.front().category_id;
    merged.vocabulary = vocab;

    MergeReport report;
    report.superset_size = vocab.size();

    std::int64_t next_image_id = 0;
    std::int64_t next_ann_id = 0;
    std::size_t total_slots = 0;
    std::size_t zero_slots = 0;
    for (const auto& ds : projected) {
        std::map<std::int64_t, std::int64_t> id_remap;

        std::vector<const ImageRecord*> ordered_images;
        ordered_images.reserve(ds.images.size());
        for (const auto& img : ds.images) ordered_images.push_back(&img);
        std::sort(ordered_images.begin(), ordered_images.end(),
                  [](const ImageRecord* a, const ImageRecord* b) { return a->id < b->id; });
        for (const ImageRecord* src : ordered_images) {
            ImageRecord img = *src;
            id_remap[img.id] = next_image_id;
            img.id = next_image_id++;
            if (img.source_dataset.empty()) {
                img.source_dataset = ds.name;
                img.file_name = ds.name + "/" + img.file_name;
            }
            merged.images.push_back(std::move(img));
        }

        std::vector<const Annotation*> ordered_anns;
        ordered_anns.reserve(ds.annotations.size());
        for (const auto& ann : ds.annotations) ordered_anns.push_back(&ann);
        std::sort(ordered_anns.begin(), ordered_anns.end(),
                  [](const Annotation* a, const Annotation* b) { return a->id < b->id; });

        std::vector<bool> channel_used(vocab.size(), false);
        for (const Annotation* src : ordered_anns) {
            Annotation ann = *src;
            ann.id = next_ann_id++;
            auto it = id_remap.find(ann.image_id);
            if (it == id_remap.end()) {
                throw MergeError("dataset '" + ds.name + "': annotation " +
                                 std::to_string(src->id) + " references unknown image id " +
                                 std::to_string(src->image_id));
            }
            ann.image_id = it->second;
            for (std::size_t k = 0; k < ann.keypoints.size(); ++k) {
                if (ann.keypoints[k].labeled()) {
                    channel_used[k] = true;
                } else {
                    ++zero_slots;
                }
            }
            total_slots += ann.keypoints.size();
            merged.annotations.push_back(std::move(ann));
        }

        const auto used =
            std::count(channel_used.begin(), channel_used.end(), true);
        report.per_dataset_coverage[ds.name] =
            vocab.empty() ? 0.0 : static_cast<double>(used) / static_cast<double>(vocab.size());
    }
    report.sparsity =
        total_slots == 0 ? 0.0 : static_cast<double>(zero_slots) / static_cast<double>(total_slots);
    return {std::move(merged), std::move(report)};
}

std::pair<PoseDataset, MergeReport> merge_pipeline(const ConversionTable& table,
                                                   const std::vector<PoseDataset>& datasets) {
    const KeypointVocabulary superset = build_superset(table, datasets);
    std::vector<PoseDataset> projected;
    projected.reserve(datasets.size());
    for (const auto& ds : datasets) projected.push_back(project_dataset(ds, table, superset));
    auto [merged, report] = merge(projected);
    report.unmapped_keypoints = collect_unmapped(table, datasets);
    report.warnings = table.warnings();
    return {std::move(merged), std::move(report)};
}

}  // namespace panpose
