#include "panpose/coco_json.hpp"

#include "panpose/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace panpose {

using ordered_json = nlohmann::ordered_json;

namespace {

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw SchemaError(ctx + ": missing required key '" + key + "'");
    }
    return *it;
}

std::int64_t require_int(const ordered_json& obj, const char* key, const std::string& ctx) {
    const auto& v = require(obj, key, ctx);
    if (!v.is_number_integer()) {
        throw SchemaError(ctx + ": key '" + key + "' is not an integer");
    }
    return v.get<std::int64_t>();
}

}  // namespace

ParseResult parse_dataset(const std::string& bytes) {
    ordered_json root;
    try {
        root = ordered_json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                         e.byte);
    }
    if (!root.is_object()) throw SchemaError("top-level JSON value is not an object");

    ParseResult result;
    PoseDataset& ds = result.dataset;
    auto warn = [&result](std::string where, std::string message) {
        result.warnings.push_back({Severity::Warning, std::move(where), std::move(message)});
    };

    if (auto info = root.find("info"); info != root.end() && info->is_object()) {
        if (auto nm = info->find("name"); nm != info->end() && nm->is_string()) {
            ds.name = nm->get<std::string>();
        }
    }

    const auto& categories = require(root, "categories", "document");
    if (!categories.is_array() || categories.empty()) {
        throw SchemaError("'categories' must be a non-empty array");
    }
    if (categories.size() > 1) {
        throw SchemaError("multi-category files are not supported: found " +
                          std::to_string(categories.size()) +
                          " categories, expected exactly one animal category");
    }
    const auto& cat = categories[0];
    ds.category_id = static_cast<int>(require_int(cat, "id", "category"));
    ds.category_name = require(cat, "name", "category").get<std::string>();
    const auto& kp_names = require(cat, "keypoints", "category");
    if (!kp_names.is_array()) throw SchemaError("category 'keypoints' is not an array");
    std::vector<std::string> names;
    names.reserve(kp_names.size());
    for (const auto& n : kp_names) names.push_back(n.get<std::string>());
    ds.vocabulary = KeypointVocabulary(std::move(names));
    const std::size_t m = ds.vocabulary.size();

    const auto& images = require(root, "images", "document");
    if (!images.is_array()) throw SchemaError("'images' is not an array");
    std::set<std::int64_t> image_ids;
    for (const auto& jimg : images) {
        ImageRecord img;
        img.id = require_int(jimg, "id", "image");
        const std::string ctx = "image " + std::to_string(img.id);
        img.file_name = require(jimg, "file_name", ctx).get<std::string>();
        img.width = static_cast<int>(require_int(jimg, "width", ctx));
        img.height = static_cast<int>(require_int(jimg, "height", ctx));
        if (auto src = jimg.find("source_dataset"); src != jimg.end() && src->is_string()) {
            img.source_dataset = src->get<std::string>();
        }
        if (img.width <= 0 || img.height <= 0) {
            throw SchemaError(ctx + ": non-positive dimensions");
        }
        if (!image_ids.insert(img.id).second) {
            throw SchemaError(ctx + ": duplicate image id");
        }
        ds.images.push_back(std::move(img));
    }

    const auto& annotations = require(root, "annotations", "document");
    if (!annotations.is_array()) throw SchemaError("'annotations' is not an array");
    std::set<std::int64_t> ann_ids;
    for (const auto& jann : annotations) {
        Annotation ann;
        ann.id = require_int(jann, "id", "annotation");
        const std::string ctx = "annotation " + std::to_string(ann.id);
        if (!ann_ids.insert(ann.id).second) {
            throw SchemaError(ctx + ": duplicate annotation id");
        }
        ann.image_id = require_int(jann, "image_id", ctx);
        if (image_ids.find(ann.image_id) == image_ids.end()) {
            throw SchemaError(ctx + ": references unknown image id " +
                              std::to_string(ann.image_id));
        }
        const auto& kps = require(jann, "keypoints", ctx);
        if (!kps.is_array() || kps.size() % 3 != 0) {
            throw SchemaError(ctx + ": 'keypoints' is not a flat array of (x, y, v) triples");
        }
        if (kps.size() != 3 * m) {
            std::ostringstream msg;
            msg << ctx << ": has " << kps.size() / 3 << " keypoint triples, vocabulary defines "
                << m;
            throw SchemaError(msg.str());
        }
        ann.keypoints.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            Keypoint& kp = ann.keypoints[k];
            kp.x = kps[3 * k].get<double>();
            kp.y = kps[3 * k + 1].get<double>();
            kp.v = kps[3 * k + 2].get<int>();
            if (kp.v < 0 || kp.v > 2) {
                throw SchemaError(ctx + ": visibility flag " + std::to_string(kp.v) +
                                  " outside {0,1,2}");
            }
            if (kp.v == 0 && (kp.x != 0.0 || kp.y != 0.0)) {
                warn(ctx, "unlabeled keypoint '" + ds.vocabulary.name(k) +
                              "' had nonzero coordinates; normalized to (0, 0, 0)");
                kp.x = 0.0;
                kp.y = 0.0;
            }
        }
        if (auto nk = jann.find("num_keypoints"); nk != jann.end()) {
            ann.num_keypoints = nk->get<int>();
            const int labeled = ann.count_labeled();
            if (ann.num_keypoints != labeled) {
                std::ostringstream msg;
                msg << ctx << ": num_keypoints is " << ann.num_keypoints << " but " << labeled
                    << " triples have v > 0";
                throw SchemaError(msg.str());
            }
        } else {
            ann.num_keypoints = ann.count_labeled();
        }
        if (auto bb = jann.find("bbox"); bb != jann.end() && !bb->is_null()) {
            if (!bb->is_array() || bb->size() != 4) {
                throw SchemaError(ctx + ": 'bbox' is not a 4-element array");
            }
            ann.bbox = {{(*bb)[0].get<double>(), (*bb)[1].get<double>(), (*bb)[2].get<double>(),
                         (*bb)[3].get<double>()}};
        }
        if (auto sc = jann.find("score"); sc != jann.end() && !sc->is_null()) {
            ann.score = sc->get<double>();
        }
        ds.annotations.push_back(std::move(ann));
    }

    // Off-image labels are common in source datasets; report, don't reject.
    for (const auto& v : validate(ds).items) {
        if (v.severity == Severity::Warning) result.warnings.push_back(v);
    }
    return result;
}

std::string serialize_dataset(const PoseDataset& ds) {
    ordered_json root = ordered_json::object();
    if (!ds.name.empty()) {
        root["info"] = ordered_json{{"name", ds.name}};
    }

    ordered_json images = ordered_json::array();
    for (const auto& img : ds.images) {
        ordered_json j{{"id", img.id},
                       {"file_name", img.file_name},
                       {"width", img.width},
                       {"height", img.height}};
        if (!img.source_dataset.empty()) j["source_dataset"] = img.source_dataset;
        images.push_back(std::move(j));
    }
    root["images"] = std::move(images);

    ordered_json annotations = ordered_json::array();
    for (const auto& ann : ds.annotations) {
        ordered_json kps = ordered_json::array();
        for (const auto& kp : ann.keypoints) {
            if (kp.v == 0) {
                // "left as 0s" convention for unlabeled keypoints
                kps.push_back(0.0);
                kps.push_back(0.0);
            } else {
                kps.push_back(kp.x);
                kps.push_back(kp.y);
            }
            kps.push_back(kp.v);
        }
        ordered_json j{{"id", ann.id},
                       {"image_id", ann.image_id},
                       {"keypoints", std::move(kps)},
                       {"num_keypoints", ann.num_keypoints}};
        if (ann.bbox) {
            j["bbox"] = ordered_json{(*ann.bbox)[0], (*ann.bbox)[1], (*ann.bbox)[2],
                                     (*ann.bbox)[3]};
        }
        if (ann.score) j["score"] = *ann.score;
        annotations.push_back(std::move(j));
    }
    root["annotations"] = std::move(annotations);

    root["categories"] = ordered_json::array({ordered_json{
        {"id", ds.category_id},
        {"name", ds.category_name},
        {"keypoints", ds.vocabulary.names()},
    }});

    return root.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << bytes;
    if (!out) throw IoError("failed writing '" + path + "'");
}

ParseResult load_dataset(const std::string& path) {
    try {
        return parse_dataset(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.byte_offset);
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void save_dataset(const PoseDataset& ds, const std::string& path) {
    write_file(path, serialize_dataset(ds));
}

}  // namespace panpose
