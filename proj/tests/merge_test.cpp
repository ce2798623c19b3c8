#include "panpose/coco_json.hpp"
#include "panpose/conversion.hpp"
#include "panpose/errors.hpp"
#include "panpose/merge.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace panpose;

namespace {

PoseDataset source(const std::string& name, const std::vector<std::string>& kps,
                   std::size_t n_images = 1, std::size_t anns_per_image = 1) {
    PoseDataset ds;
    ds.name = name;
    ds.vocabulary = KeypointVocabulary(kps);
    std::int64_t ann_id = 0;
    for (std::size_t i = 0; i < n_images; ++i) {
        ds.images.push_back({static_cast<std::int64_t>(i), name + std::to_string(i) + ".png",
                             400, 300, ""});
        for (std::size_t a = 0; a < anns_per_image; ++a) {
            Annotation ann;
            ann.id = ann_id++;
            ann.image_id = static_cast<std::int64_t>(i);
            for (std::size_t k = 0; k < kps.size(); ++k) {
                ann.keypoints.push_back({10.0 + 5.0 * k, 20.0 + 3.0 * k, 2});
            }
            ann.num_keypoints = ann.count_labeled();
            ds.annotations.push_back(std::move(ann));
        }
    }
    return ds;
}

ConversionTable labmice_table() {
    auto table = load_conversion_table(helpers::data_path("conversion_tables/labmice3k.csv"));
    load_superset_list(table, helpers::data_path("conversion_tables/labmice3k_superset.txt"));
    return table;
}

// Vocabulary-only stand-ins for every source named in a table.
std::vector<PoseDataset> stubs_from_table(const ConversionTable& table) {
    std::vector<PoseDataset> out;
    for (const auto& name : table.source_datasets()) {
        std::vector<std::string> kps;
        for (const auto& e : table.entries_for(name)) {
            if (std::find(kps.begin(), kps.end(), e.source_keypoint) == kps.end()) {
                kps.push_back(e.source_keypoint);
            }
        }
        out.push_back(source(name, kps));
    }
    return out;
}

}  // namespace

TEST_CASE("union semantics on a two-dataset toy example") {
    ConversionTable table;
    table.add("d1", "nose", "nose");
    table.add("d1", "leftear", "leftear");
    table.add("d2", "snout", "nose");
    table.add("d2", "tail", "tail");
    const auto ds1 = source("d1", {"nose", "leftear"});
    const auto ds2 = source("d2", {"snout", "tail"});
    const auto superset = build_superset(table, {ds1, ds2});
    CHECK(superset.size() == 3);
    CHECK(superset.names() == std::vector<std::string>{"nose", "leftear", "tail"});
}

TEST_CASE("superset name set ignores dataset order") {
    ConversionTable table;
    table.add("d1", "a", "A");
    table.add("d2", "b", "B");
    table.add("d2", "c", "A");
    const auto ds1 = source("d1", {"a"});
    const auto ds2 = source("d2", {"b", "c"});
    auto fwd = build_superset(table, {ds1, ds2}).names();
    auto rev = build_superset(table, {ds2, ds1}).names();
    std::sort(fwd.begin(), fwd.end());
    std::sort(rev.begin(), rev.end());
    CHECK(fwd == rev);
}

TEST_CASE("lab-mouse table yields the 26-name superset") {
    const auto table = labmice_table();
    const auto stubs = stubs_from_table(table);
    CHECK(stubs.size() == 11);
    const auto superset = build_superset(table, stubs);
    REQUIRE(superset.size() == 26);
    CHECK(superset.name(24) == "tail_end");
    CHECK(superset.name(25) == "head_midpoint");

    SUBCASE("first-appearance order also ends in tail_end, head_midpoint") {
        ConversionTable undeclared =
            load_conversion_table(helpers::data_path("conversion_tables/labmice3k.csv"));
        const auto by_appearance = build_superset(undeclared, stubs);
        REQUIRE(by_appearance.size() == 26);
        CHECK(by_appearance.name(24) == "tail_end");
        CHECK(by_appearance.name(25) == "head_midpoint");
    }
}

TEST_CASE("quadruped table yields the 39-name superset") {
    auto table = load_conversion_table(helpers::data_path("conversion_tables/quadruped40k.csv"));
    load_superset_list(table, helpers::data_path("conversion_tables/quadruped40k_superset.txt"));
    const auto stubs = stubs_from_table(table);
    CHECK(stubs.size() == 6);
    CHECK(build_superset(table, stubs).size() == 39);
    // the transcribed table carries two duplicate source rows
    CHECK(table.warnings().size() == 2);
}

TEST_CASE("table errors") {
    SUBCASE("mapping a keypoint absent from the source vocabulary") {
        ConversionTable table;
        table.add("d1", "ghost", "nose");
        const auto ds = source("d1", {"nose"});
        CHECK_THROWS_AS(build_superset(table, {ds}), MergeError);
    }
    SUBCASE("two source keypoints colliding on one main name") {
        ConversionTable table;
        table.add("d1", "a", "nose");
        CHECK_THROWS_WITH_AS(table.add("d1", "b", "nose"), doctest::Contains("injectivity"),
                             MergeError);
    }
    SUBCASE("declared superset missing a main name") {
        ConversionTable table;
        table.add("d1", "a", "nose");
        CHECK_THROWS_AS(table.declare_superset(KeypointVocabulary({"tail"})), MergeError);
    }
}

TEST_CASE("projection re-indexes without moving coordinates") {
    ConversionTable table;
    table.add("src", "a", "A");
    table.add("src", "b", "B");
    table.add("src", "c", "C");
    const KeypointVocabulary superset({"X", "C", "B", "Y", "A"});
    auto ds = source("src", {"a", "b", "c"});
    ds.annotations[0].keypoints[1].v = 1;
    ds.annotations[0].num_keypoints = ds.annotations[0].count_labeled();

    const auto projected = project_dataset(ds, table, superset);
    REQUIRE(projected.vocabulary.size() == 5);
    const auto& kps = projected.annotations[0].keypoints;
    CHECK(kps[4] == ds.annotations[0].keypoints[0]);  // a -> A
    CHECK(kps[2] == ds.annotations[0].keypoints[1]);  // b -> B
    CHECK(kps[1] == ds.annotations[0].keypoints[2]);  // c -> C
    CHECK(kps[0] == Keypoint{});
    CHECK(kps[3] == Keypoint{});
    CHECK(projected.annotations[0].num_keypoints == 3);
}

TEST_CASE("openfield-style fixture projects onto exactly 4 superset channels") {
    const auto table = labmice_table();
    const auto of = load_dataset(helpers::data_path("fixtures/openfield_mini.json")).dataset;
    const auto projected = project_dataset(of, table, *table.declared_superset());
    REQUIRE(projected.vocabulary.size() == 26);
    for (const auto& ann : projected.annotations) {
        CHECK(ann.num_keypoints == 4);
        CHECK(ann.keypoints[projected.vocabulary.index_of("nose")].labeled());
        CHECK(ann.keypoints[projected.vocabulary.index_of("left_ear")].labeled());
        CHECK(ann.keypoints[projected.vocabulary.index_of("right_ear")].labeled());
        CHECK(ann.keypoints[projected.vocabulary.index_of("tail_base")].labeled());
    }
}

TEST_CASE("identity projection is the identity") {
    ConversionTable table;
    table.add("src", "a", "a");
    table.add("src", "b", "b");
    const auto ds = source("src", {"a", "b"});
    const auto projected = project_dataset(ds, table, ds.vocabulary);
    CHECK(projected == ds);
}

TEST_CASE("merge concatenates with fresh deterministic ids") {
    ConversionTable table;
    table.add("d1", "a", "A");
    table.add("d2", "a", "A");
    auto d1 = source("d1", {"a"}, 2);
    auto d2 = source("d2", {"a"}, 3);
    const auto superset = build_superset(table, {d1, d2});
    const auto p1 = project_dataset(d1, table, superset);
    const auto p2 = project_dataset(d2, table, superset);
    const auto [merged, report] = merge({p1, p2});

    REQUIRE(merged.images.size() == 5);
    for (std::size_t i = 0; i < merged.images.size(); ++i) {
        CHECK(merged.images[i].id == static_cast<std::int64_t>(i));
    }
    CHECK(merged.annotations.size() == d1.annotations.size() + d2.annotations.size());
    CHECK(merged.images[0].source_dataset == "d1");
    CHECK(merged.images[0].file_name == "d1/d10.png");
    CHECK(merged.images[2].source_dataset == "d2");
}

TEST_CASE("merge is idempotent") {
    ConversionTable table;
    table.add("d1", "a", "A");
    table.add("d1", "b", "B");
    const auto ds = source("d1", {"a", "b"}, 2, 2);
    const auto superset = build_superset(table, {ds});
    const auto projected = project_dataset(ds, table, superset);
    const auto [once, r1] = merge({projected});
    const auto [twice, r2] = merge({once});
    CHECK(once == twice);
    CHECK(r1.sparsity == r2.sparsity);
}

TEST_CASE("merging a single dataset keeps annotations and sparsity") {
    ConversionTable table;
    table.add("d1", "a", "A");
    table.add("d1", "b", "B");
    auto ds = source("d1", {"a", "b"}, 1, 2);
    ds.annotations[1].keypoints[1] = {};
    ds.annotations[1].num_keypoints = ds.annotations[1].count_labeled();
    const auto projected = project_dataset(ds, table, build_superset(table, {ds}));
    const auto [merged, report] = merge({projected});
    REQUIRE(merged.annotations.size() == 2);
    for (std::size_t a = 0; a < merged.annotations.size(); ++a) {
        CHECK(merged.annotations[a].keypoints == projected.annotations[a].keypoints);
    }
    CHECK(report.sparsity == doctest::Approx(0.25));
}

TEST_CASE("coverage fractions on a 4-of-26 and 24-of-26 pair") {
    const auto table = labmice_table();
    const auto of = load_dataset(helpers::data_path("fixtures/openfield_mini.json")).dataset;
    const auto mh = load_dataset(helpers::data_path("fixtures/maushaus_mini.json")).dataset;
    const auto [merged, report] = merge_pipeline(table, {of, mh});
    // 4/26 and 24/26, counted by hand on the fixtures
    CHECK(report.per_dataset_coverage.at("Openfield") == doctest::Approx(4.0 / 26.0).epsilon(1e-9));
    CHECK(report.per_dataset_coverage.at("MausHaus") == doctest::Approx(24.0 / 26.0).epsilon(1e-9));
    CHECK(report.superset_size == 26);
    CHECK(validate(merged).error_count() == 0);
}

TEST_CASE("merge rejects vocabulary mismatches") {
    const auto a = source("a", {"x"});
    const auto b = source("b", {"y"});
    CHECK_THROWS_AS(merge({a, b}), MergeError);
}

TEST_CASE("unmapped source keypoints are dropped and reported") {
    ConversionTable table;
    table.add("d1", "a", "A");
    const auto ds = source("d1", {"a", "mystery"});
    const auto [merged, report] = merge_pipeline(table, {ds});
    CHECK(report.unmapped_keypoints ==
          std::vector<std::pair<std::string, std::string>>{{"d1", "mystery"}});
    CHECK(merged.vocabulary.size() == 1);
}

TEST_CASE("projection into a larger superset never reduces zero slots") {
    ConversionTable table;
    table.add("d", "a", "A");
    table.add("d", "b", "B");
    auto ds = source("d", {"a", "b"});
    ds.annotations[0].keypoints[0].v = 0;
    ds.annotations[0].keypoints[0].x = 0;
    ds.annotations[0].keypoints[0].y = 0;
    ds.annotations[0].num_keypoints = ds.annotations[0].count_labeled();

    const auto small = project_dataset(ds, table, KeypointVocabulary({"A", "B"}));
    const auto large = project_dataset(ds, table, KeypointVocabulary({"A", "B", "C", "D"}));
    auto zeros = [](const Annotation& ann) {
        return static_cast<int>(ann.keypoints.size()) - ann.count_labeled();
    };
    CHECK(zeros(large.annotations[0]) >= zeros(small.annotations[0]));
}
