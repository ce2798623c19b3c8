#include "panpose/errors.hpp"
#include "panpose/experiments.hpp"
#include "panpose/rng.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <set>

using namespace panpose;

namespace {

PoseDataset sized_dataset(std::size_t n_images, std::size_t m = 4) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < m; ++k) names.push_back("kp" + std::to_string(k));
    PoseDataset ds;
    ds.name = "sized";
    ds.vocabulary = KeypointVocabulary(names);
    for (std::size_t i = 0; i < n_images; ++i) {
        ds.images.push_back({static_cast<std::int64_t>(i), "f.png", 100, 100, ""});
        Annotation ann;
        ann.id = static_cast<std::int64_t>(i);
        ann.image_id = static_cast<std::int64_t>(i);
        for (std::size_t k = 0; k < m; ++k) ann.keypoints.push_back({10.0 + k, 20.0 + k, 2});
        ann.num_keypoints = ann.count_labeled();
        ds.annotations.push_back(std::move(ann));
    }
    return ds;
}

}  // namespace

TEST_CASE("one percent subsampling reproduces the published counts") {
    const std::size_t sizes[4] = {744, 436, 312, 112};
    const std::size_t expected[4] = {7, 4, 3, 1};
    for (int i = 0; i < 4; ++i) {
        const auto ds = sized_dataset(sizes[i]);
        SplitSpec spec{SplitKind::DataRatio, 0.01, 123, RoundingMode::FloorMin1};
        const auto sub = subsample_images(ds, spec);
        CHECK(sub.images.size() == expected[i]);
        CHECK(sub.annotations.size() == expected[i]);
    }
}

TEST_CASE("fraction 1.0 keeps everything") {
    const auto ds = sized_dataset(17);
    SplitSpec spec{SplitKind::DataRatio, 1.0, 9, RoundingMode::FloorMin1};
    CHECK(subsample_images(ds, spec) == ds);
}

TEST_CASE("subsampling is deterministic in the seed") {
    const auto ds = sized_dataset(100);
    SplitSpec spec{SplitKind::DataRatio, 0.25, 77, RoundingMode::FloorMin1};
    const auto a = subsample_images(ds, spec);
    const auto b = subsample_images(ds, spec);
    CHECK(a == b);

    SplitSpec other = spec;
    other.seed = 78;
    CHECK(subsample_images(ds, other) != a);
}

TEST_CASE("rounding modes") {
    const auto ds = sized_dataset(150);
    SplitSpec spec{SplitKind::DataRatio, 0.0101, 5, RoundingMode::FloorMin1};
    CHECK(subsample_images(ds, spec).images.size() == 1);  // floor(1.515) = 1
    spec.rounding = RoundingMode::Ceil;
    CHECK(subsample_images(ds, spec).images.size() == 2);
    spec.rounding = RoundingMode::Round;
    CHECK(subsample_images(ds, spec).images.size() == 2);
}

TEST_CASE("subsample rejects bad input") {
    PoseDataset empty;
    empty.vocabulary = KeypointVocabulary({"a"});
    SplitSpec spec{SplitKind::DataRatio, 0.5, 0, RoundingMode::FloorMin1};
    CHECK_THROWS_AS(subsample_images(empty, spec), ParamError);
    SplitSpec bad{SplitKind::DataRatio, 0.0, 0, RoundingMode::FloorMin1};
    CHECK_THROWS_AS(subsample_images(sized_dataset(5), bad), ParamError);
    SplitSpec wrong_kind{SplitKind::SparseKeypoints, 0.5, 0, RoundingMode::FloorMin1};
    CHECK_THROWS_AS(subsample_images(sized_dataset(5), wrong_kind), ParamError);
}

TEST_CASE("dropping 90 percent of 26 channels removes 24 everywhere") {
    const auto ds = sized_dataset(10, 26);
    SplitSpec spec{SplitKind::SparseKeypoints, 0.9, 42};
    const auto [dropped_ds, names] = drop_keypoints(ds, spec);
    CHECK(names.size() == 24);  // ceil(23.4)
    CHECK(dropped_ds.images.size() == ds.images.size());
    CHECK(dropped_ds.annotations.size() == ds.annotations.size());

    std::set<int> dropped_channels;
    for (const auto& name : names) dropped_channels.insert(ds.vocabulary.index_of(name));
    for (const auto& ann : dropped_ds.annotations) {
        CHECK(ann.num_keypoints == 2);
        for (std::size_t k = 0; k < ann.keypoints.size(); ++k) {
            if (dropped_channels.count(static_cast<int>(k))) {
                CHECK(ann.keypoints[k] == Keypoint{});
            } else {
                CHECK(ann.keypoints[k].labeled());
            }
        }
    }
}

TEST_CASE("fraction 0 sparse drop is a no-op") {
    const auto ds = sized_dataset(3);
    SplitSpec spec{SplitKind::SparseKeypoints, 0.0, 42};
    const auto [out, names] = drop_keypoints(ds, spec);
    CHECK(out == ds);
    CHECK(names.empty());
}

TEST_CASE("the same spec drops the same channels from any dataset") {
    const auto a = sized_dataset(5, 26);
    auto b = sized_dataset(9, 26);
    b.name = "other";
    SplitSpec spec{SplitKind::SparseKeypoints, 0.5, 1234};
    const auto [da, names_a] = drop_keypoints(a, spec);
    const auto [db, names_b] = drop_keypoints(b, spec);
    CHECK(names_a == names_b);
}

TEST_CASE("dropping every channel is an error") {
    const auto ds = sized_dataset(3, 4);
    SplitSpec spec{SplitKind::SparseKeypoints, 1.0, 0};
    CHECK_THROWS_AS(drop_keypoints(ds, spec), ParamError);
}

TEST_CASE("channel choice commutes with image subsampling") {
    const auto ds = sized_dataset(40, 10);
    SplitSpec ratio{SplitKind::DataRatio, 0.5, 9};
    SplitSpec sparse{SplitKind::SparseKeypoints, 0.3, 9};

    const auto [a, names_a] = drop_keypoints(subsample_images(ds, ratio), sparse);
    const auto [tmp, names_b] = drop_keypoints(ds, sparse);
    const auto b = subsample_images(tmp, ratio);
    CHECK(names_a == names_b);
    CHECK(a == b);
}

TEST_CASE("pseudo labels carry v = 2 everywhere and keep low-confidence predictions") {
    auto preds = sized_dataset(2);
    preds.annotations[0].score = 0.01;  // low confidence survives
    preds.annotations[1].score = 0.98;
    preds.annotations[0].keypoints[2].v = 1;  // occluded prediction becomes v = 2
    const auto pseudo = synthesize_pseudo_labels(preds);

    CHECK(pseudo.annotations.size() == 2);
    CHECK(validate(pseudo).error_count() == 0);
    for (const auto& ann : pseudo.annotations) {
        CHECK(!ann.score.has_value());
        CHECK(ann.bbox.has_value());
        for (const auto& kp : ann.keypoints) {
            if (kp.labeled()) CHECK(kp.v == 2);
        }
        CHECK(ann.num_keypoints == 4);
    }
}

TEST_CASE("empty predictions make an empty pseudo dataset") {
    auto preds = sized_dataset(1);
    preds.annotations.clear();
    const auto pseudo = synthesize_pseudo_labels(preds);
    CHECK(pseudo.annotations.empty());
    CHECK(pseudo.images.size() == 1);
}

TEST_CASE("split manifests record the derivation") {
    const auto ds = sized_dataset(20, 5);
    SplitSpec spec{SplitKind::DataRatio, 0.2, 3};
    SplitManifest manifest;
    const auto sub = subsample_images(ds, spec, &manifest);
    CHECK(manifest.kind == "data_ratio");
    CHECK(manifest.fraction == 0.2);
    CHECK(manifest.seed == 3);
    CHECK(manifest.kept_image_ids.size() == sub.images.size());

    SplitSpec sparse{SplitKind::SparseKeypoints, 0.5, 3};
    SplitManifest m2;
    const auto [dropped, names] = drop_keypoints(ds, sparse, &m2);
    CHECK(m2.kind == "sparse_keypoints");
    CHECK(m2.dropped_keypoints == names);
    const std::string json = manifest_to_json(m2);
    CHECK(json.find("sparse_keypoints") != std::string::npos);
}
