#include "panpose/coco_json.hpp"
#include "panpose/dataset.hpp"
#include "panpose/errors.hpp"
#include "panpose/rng.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace panpose;

namespace {

const char* kMinimalJson = R"({
  "images": [{"id": 1, "file_name": "a.png", "width": 100, "height": 80}],
  "annotations": [{
    "id": 1, "image_id": 1,
    "keypoints": [10.5, 20.25, 2, 0, 0, 0, 30, 40, 1],
    "num_keypoints": 2
  }],
  "categories": [{"id": 1, "name": "mouse", "keypoints": ["nose", "leftear", "tailbase"]}]
})";

PoseDataset random_dataset(SplitMix64& rng, std::size_t m, std::size_t n_images) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < m; ++k) names.push_back("kp" + std::to_string(k));
    PoseDataset ds;
    ds.name = "random";
    ds.vocabulary = KeypointVocabulary(names);
    std::int64_t ann_id = 0;
    for (std::size_t i = 0; i < n_images; ++i) {
        const int w = 100 + static_cast<int>(rng.next_below(200));
        const int h = 100 + static_cast<int>(rng.next_below(200));
        ds.images.push_back({static_cast<std::int64_t>(i), "im" + std::to_string(i) + ".png",
                             w, h, ""});
        const std::size_t n_anns = rng.next_below(3);
        for (std::size_t a = 0; a < n_anns; ++a) {
            Annotation ann;
            ann.id = ann_id++;
            ann.image_id = static_cast<std::int64_t>(i);
            for (std::size_t k = 0; k < m; ++k) {
                if (rng.next_below(3) == 0) {
                    ann.keypoints.push_back({});
                } else {
                    ann.keypoints.push_back({rng.next_double() * (w - 1),
                                             rng.next_double() * (h - 1),
                                             rng.next_below(2) == 0 ? 1 : 2});
                }
            }
            ann.num_keypoints = ann.count_labeled();
            if (rng.next_below(2) == 0) ann.bbox = {{1.0, 2.0, 30.0, 40.0}};
            if (rng.next_below(2) == 0) ann.score = rng.next_double();
            ds.annotations.push_back(std::move(ann));
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("parse of a minimal document") {
    const auto result = parse_dataset(kMinimalJson);
    const PoseDataset& ds = result.dataset;
    CHECK(ds.vocabulary.size() == 3);
    CHECK(ds.vocabulary.name(0) == "nose");
    CHECK(ds.images.size() == 1);
    CHECK(ds.annotations.size() == 1);
    CHECK(ds.annotations[0].keypoints[0].x == doctest::Approx(10.5));
    CHECK(ds.annotations[0].keypoints[1].v == 0);
    CHECK(ds.annotations[0].num_keypoints == 2);
}

TEST_CASE("keypoint count mismatch names the annotation") {
    const char* bad = R"({
      "images": [{"id": 1, "file_name": "a.png", "width": 100, "height": 80}],
      "annotations": [{"id": 7, "image_id": 1,
        "keypoints": [1,1,2, 2,2,2, 3,3,2, 4,4,2, 5,5,2, 6,6,2, 7,7,2, 8,8,2],
        "num_keypoints": 8}],
      "categories": [{"id": 1, "name": "m", "keypoints": ["a", "b", "c"]}]
    })";
    CHECK_THROWS_WITH_AS(parse_dataset(bad), doctest::Contains("annotation 7"), SchemaError);
}

TEST_CASE("malformed JSON reports a byte offset") {
    try {
        parse_dataset("{\"images\": [,]}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.byte_offset > 0);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("duplicate ids are schema errors") {
    const char* dup_img = R"({
      "images": [{"id": 1, "file_name": "a.png", "width": 10, "height": 10},
                 {"id": 1, "file_name": "b.png", "width": 10, "height": 10}],
      "annotations": [],
      "categories": [{"id": 1, "name": "m", "keypoints": ["a"]}]
    })";
    CHECK_THROWS_AS(parse_dataset(dup_img), SchemaError);
}

TEST_CASE("multi-category files are rejected") {
    const char* multi = R"({
      "images": [], "annotations": [],
      "categories": [{"id": 1, "name": "a", "keypoints": ["x"]},
                     {"id": 2, "name": "b", "keypoints": ["y"]}]
    })";
    CHECK_THROWS_WITH_AS(parse_dataset(multi), doctest::Contains("multi-category"), SchemaError);
}

TEST_CASE("num_keypoints disagreement is rejected on parse") {
    const char* bad = R"({
      "images": [{"id": 1, "file_name": "a.png", "width": 10, "height": 10}],
      "annotations": [{"id": 1, "image_id": 1, "keypoints": [1,1,2, 2,2,2], "num_keypoints": 5}],
      "categories": [{"id": 1, "name": "m", "keypoints": ["a", "b"]}]
    })";
    CHECK_THROWS_AS(parse_dataset(bad), SchemaError);
}

TEST_CASE("serialize of an empty dataset") {
    PoseDataset ds;
    ds.vocabulary = KeypointVocabulary({"nose"});
    ds.category_name = "mouse";
    const std::string bytes = serialize_dataset(ds);
    const auto parsed = parse_dataset(bytes);
    CHECK(parsed.dataset.images.empty());
    CHECK(parsed.dataset.annotations.empty());
    CHECK(parsed.dataset.vocabulary == ds.vocabulary);
}

TEST_CASE("v = 0 triples serialize as zeros") {
    auto ds = helpers::tiny_dataset({"a", "b"});
    // junk coordinates on the unlabeled keypoint must not survive a round trip
    ds.annotations.push_back(helpers::make_annotation(0, 0, {{5.0, 6.0, 2}, {3.0, 4.0, 0}}));
    const auto back = parse_dataset(serialize_dataset(ds));
    CHECK(back.dataset.annotations[0].keypoints[1] == Keypoint{0.0, 0.0, 0});
}

TEST_CASE("round trip is the identity and byte-stable") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = random_dataset(rng, 1 + rng.next_below(6), 1 + rng.next_below(4));
        const std::string once = serialize_dataset(ds);
        const auto back = parse_dataset(once);
        CHECK(back.dataset == ds);
        CHECK(serialize_dataset(back.dataset) == once);
    }
}

TEST_CASE("a 26-name category parses into a 26-channel vocabulary") {
    const auto superset = read_file(helpers::data_path("conversion_tables/labmice3k_superset.txt"));
    std::vector<std::string> names;
    std::istringstream ss(superset);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty()) names.push_back(line);
    }
    PoseDataset ds;
    ds.vocabulary = KeypointVocabulary(names);
    const auto parsed = parse_dataset(serialize_dataset(ds));
    CHECK(parsed.dataset.vocabulary.size() == 26);
}

TEST_CASE("validate flags the spec'd violations and nothing on clean data") {
    auto ds = helpers::tiny_dataset({"a", "b"});
    ds.annotations.push_back(helpers::make_annotation(0, 0, {{5, 6, 2}, {7, 8, 2}}));
    CHECK(validate(ds).empty());

    SUBCASE("off-image keypoint is a warning") {
        ds.annotations[0].keypoints[0].x = 205.0;  // width is 200
        const auto report = validate(ds);
        CHECK(report.error_count() == 0);
        CHECK(report.warning_count() == 1);
    }
    SUBCASE("count mismatch is an error") {
        ds.annotations[0].num_keypoints = 5;
        const auto report = validate(ds);
        CHECK(report.error_count() == 1);
        CHECK(report.items[0].where == "annotation 0");
    }
    SUBCASE("unknown image id is an error") {
        ds.annotations[0].image_id = 99;
        CHECK(validate(ds).error_count() == 1);
    }
    SUBCASE("validate does not mutate") {
        const PoseDataset copy = ds;
        (void)validate(ds);
        CHECK(ds == copy);
    }
}

TEST_CASE("vocabulary index is injective and survives a round trip") {
    SplitMix64 rng(7);
    const auto ds = random_dataset(rng, 5, 2);
    const auto back = parse_dataset(serialize_dataset(ds)).dataset;
    for (std::size_t k = 0; k < ds.vocabulary.size(); ++k) {
        CHECK(back.vocabulary.index_of(ds.vocabulary.name(k)) == static_cast<int>(k));
    }
}
