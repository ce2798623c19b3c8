// panpose: dataset merging, heatmap codec, desk-scale masked training and
// OKS mAP evaluation for multi-dataset animal pose work.
//
// Exit codes: 0 success, 1 domain/validation error, 2 I/O or usage error.

#include "panpose/coco_json.hpp"
#include "panpose/config.hpp"
#include "panpose/conversion.hpp"
#include "panpose/demo.hpp"
#include "panpose/errors.hpp"
#include "panpose/eval.hpp"
#include "panpose/experiments.hpp"
#include "panpose/grouping.hpp"
#include "panpose/heatmap.hpp"
#include "panpose/merge.hpp"
#include "panpose/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace panpose;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

void log_warnings(const std::vector<Violation>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w.where << ": " << w.message << "\n";
    }
}

PoseDataset load_or_die(const std::string& path) {
    auto result = load_dataset(path);
    log_warnings(result.warnings);
    return std::move(result.dataset);
}

ConversionTable load_table(const std::string& table_path, const std::string& superset_path) {
    auto table = load_conversion_table(table_path);
    if (!superset_path.empty()) load_superset_list(table, superset_path);
    for (const auto& w : table.warnings()) std::cerr << "warning: " << w << "\n";
    return table;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

SigmaConfig sigma_from_flags(double sigma_flag, bool coco_mean_flag,
                             const std::string& config_path, std::size_t m) {
    const int picks = (sigma_flag > 0 ? 1 : 0) + (coco_mean_flag ? 1 : 0) +
                      (!config_path.empty() ? 1 : 0);
    if (picks > 1) throw ParamError("pick one of --sigma, --coco-mean, --sigma-config");
    if (coco_mean_flag) return SigmaConfig::coco_mean(m);
    if (!config_path.empty()) return sigma_config_from(Config::load(config_path), m);
    return SigmaConfig::uniform(m, sigma_flag > 0 ? sigma_flag : 0.1);
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path, bool json_out) {
    const std::string bytes = read_file(path);
    ParseResult parsed;
    try {
        parsed = parse_dataset(bytes);
    } catch (const Error& e) {
        if (json_out) {
            nlohmann::ordered_json j;
            j["valid"] = false;
            j["error"] = e.what();
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "invalid: " << e.what() << "\n";
        }
        return kExitDomain;
    }
    const auto report = validate(parsed.dataset);
    if (json_out) {
        nlohmann::ordered_json j;
        j["valid"] = report.error_count() == 0;
        j["errors"] = report.error_count();
        j["warnings"] = report.warning_count() + parsed.warnings.size();
        nlohmann::ordered_json items = nlohmann::ordered_json::array();
        for (const auto& v : report.items) {
            items.push_back({{"severity", v.severity == Severity::Error ? "error" : "warning"},
                             {"where", v.where},
                             {"message", v.message}});
        }
        j["items"] = std::move(items);
        std::cout << j.dump(2) << "\n";
    } else {
        log_warnings(parsed.warnings);
        for (const auto& v : report.items) {
            std::cout << (v.severity == Severity::Error ? "error: " : "warning: ") << v.where
                      << ": " << v.message << "\n";
        }
        std::cout << (report.error_count() == 0 ? "valid" : "invalid") << " ("
                  << report.error_count() << " errors, " << report.warning_count()
                  << " warnings)\n";
    }
    return report.error_count() == 0 ? kExitOk : kExitDomain;
}

// ------------------------------------------------------------------- merge

int cmd_merge(const std::string& table_path, const std::string& superset_path,
              const std::vector<std::string>& dataset_paths, const std::string& out_path,
              const std::string& report_path, bool json_out) {
    const auto table = load_table(table_path, superset_path);
    std::vector<PoseDataset> datasets;
    datasets.reserve(dataset_paths.size());
    for (const auto& p : dataset_paths) datasets.push_back(load_or_die(p));

    auto [merged, report] = merge_pipeline(table, datasets);
    for (const auto& [ds, kp] : report.unmapped_keypoints) {
        std::cerr << "warning: " << ds << ": keypoint '" << kp << "' has no table entry\n";
    }
    save_dataset(merged, out_path);
    if (!report_path.empty()) write_file(report_path, merge_report_to_json(report));

    if (json_out) {
        std::cout << merge_report_to_json(report);
    } else {
        std::cout << "merged " << datasets.size() << " datasets: " << merged.images.size()
                  << " images, " << merged.annotations.size() << " annotations, superset size "
                  << report.superset_size << ", sparsity " << report.sparsity << "\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- project

int cmd_project(const std::string& table_path, const std::string& superset_path,
                const std::string& dataset_path, const std::string& out_path) {
    const auto table = load_table(table_path, superset_path);
    const auto ds = load_or_die(dataset_path);
    const auto superset = build_superset(table, {ds});
    const auto projected = project_dataset(ds, table, superset);
    save_dataset(projected, out_path);
    std::cout << "projected '" << ds.name << "' onto " << superset.size() << " channels\n";
    return kExitOk;
}

// ------------------------------------------------------------ encode/decode

int cmd_encode(const std::string& dataset_path, std::int64_t image_id, double sigma, int stride,
               const std::string& out_path) {
    const auto ds = load_or_die(dataset_path);
    if (ds.images.empty()) throw ParamError("dataset has no images");
    const ImageRecord* image = image_id < 0 ? &ds.images.front() : ds.find_image(image_id);
    if (image == nullptr) {
        throw ParamError("image id " + std::to_string(image_id) + " not in dataset");
    }
    std::vector<Annotation> anns;
    for (const auto& ann : ds.annotations) {
        if (ann.image_id == image->id) anns.push_back(ann);
    }
    auto stack = encode_targets<float>(anns, *image, sigma, stride);
    if (stack.channel_count() == 0) {
        stack = HeatmapStack<float>::zeros(ds.vocabulary.size(),
                                           heatmap_extent(image->height, stride),
                                           heatmap_extent(image->width, stride), stride);
    }
    write_file(out_path, serialize_stack(stack));
    std::cout << "encoded image " << image->id << ": " << stack.channel_count() << " channels at "
              << stack.rows() << "x" << stack.cols() << "\n";
    return kExitOk;
}

int cmd_decode(const std::string& stack_path, double threshold, bool single_instance,
               bool json_out) {
    const auto stack = parse_stack<float>(read_file(stack_path));
    const auto detections = decode_heatmaps(stack, threshold, single_instance);
    if (json_out) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& det : detections) {
            j.push_back({{"channel", det.channel},
                         {"x", det.x},
                         {"y", det.y},
                         {"score", det.score}});
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& det : detections) {
            std::cout << "channel " << det.channel << ": (" << det.x << ", " << det.y
                      << ") score " << det.score << "\n";
        }
        std::cout << detections.size() << " detections\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------- split

int cmd_split(const std::string& dataset_path, const std::string& kind, double fraction,
              std::uint64_t seed, const std::string& rounding, const std::string& out_path,
              const std::string& manifest_path) {
    const auto ds = load_or_die(dataset_path);
    SplitSpec spec;
    spec.fraction = fraction;
    spec.seed = seed;
    if (rounding == "floor") spec.rounding = RoundingMode::FloorMin1;
    else if (rounding == "ceil") spec.rounding = RoundingMode::Ceil;
    else if (rounding == "round") spec.rounding = RoundingMode::Round;
    else throw ParamError("unknown rounding mode '" + rounding + "'");

    SplitManifest manifest;
    PoseDataset derived;
    if (kind == "data_ratio") {
        spec.kind = SplitKind::DataRatio;
        derived = subsample_images(ds, spec, &manifest);
        std::cout << "kept " << derived.images.size() << " of " << ds.images.size()
                  << " images\n";
    } else if (kind == "sparse_keypoints") {
        spec.kind = SplitKind::SparseKeypoints;
        auto [d, names] = drop_keypoints(ds, spec, &manifest);
        derived = std::move(d);
        std::cout << "dropped " << names.size() << " of " << ds.vocabulary.size()
                  << " keypoint channels\n";
    } else {
        throw ParamError("unknown split kind '" + kind + "'");
    }
    save_dataset(derived, out_path);
    if (!manifest_path.empty()) write_file(manifest_path, manifest_to_json(manifest));
    return kExitOk;
}

// ------------------------------------------------------------ pseudo-label

int cmd_pseudo_label(const std::string& predictions_path, const std::string& out_path,
                     int margin) {
    const auto preds = load_or_die(predictions_path);
    const auto pseudo = synthesize_pseudo_labels(preds, margin);
    save_dataset(pseudo, out_path);
    std::cout << "wrote " << pseudo.annotations.size() << " pseudo-label annotations\n";
    return kExitOk;
}

// ---------------------------------------------------------- bbox-heuristic

int cmd_bbox(const std::string& dataset_path, const std::string& out_path, int margin,
             bool overwrite) {
    auto ds = load_or_die(dataset_path);
    std::size_t filled = 0;
    for (auto& ann : ds.annotations) {
        if (ann.bbox && !overwrite) continue;
        if (ann.count_labeled() == 0) {
            std::cerr << "warning: annotation " << ann.id << " has no labeled keypoints\n";
            continue;
        }
        const ImageRecord* image = ds.find_image(ann.image_id);
        const Bbox box = heuristic_bbox(ann, *image, margin);
        ann.bbox = {{box.x, box.y, box.w, box.h}};
        ++filled;
    }
    save_dataset(ds, out_path);
    std::cout << "filled " << filled << " bboxes\n";
    return kExitOk;
}

// -------------------------------------------------------------------- eval

int cmd_eval(const std::string& gt_path, const std::string& pred_path, double sigma_flag,
             bool coco_mean_flag, const std::string& sigma_config_path,
             const std::string& out_path, const std::string& matches_csv, int jobs,
             bool json_out) {
    const auto gt = load_or_die(gt_path);
    auto preds = load_or_die(pred_path);
    bool missing_scores = false;
    for (auto& ann : preds.annotations) {
        if (!ann.score) {
            ann.score = 1.0;
            missing_scores = true;
        }
    }
    if (missing_scores) {
        std::cerr << "warning: predictions without scores; assuming 1.0\n";
    }
    const auto sigmas = sigma_from_flags(sigma_flag, coco_mean_flag, sigma_config_path,
                                         gt.vocabulary.size());
    EvalConfig config;
    config.jobs = jobs;
    const auto report = evaluate(gt, preds, sigmas, config);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

    if (!out_path.empty()) write_file(out_path, report_to_json(report));
    if (!matches_csv.empty()) write_file(matches_csv, matches_to_csv(report.matches));

    if (json_out) {
        std::cout << report_to_json(report);
    } else {
        std::ostringstream value;
        value << std::setprecision(10) << report.map;
        std::string text = value.str();
        if (text.find('.') == std::string::npos && text.find('e') == std::string::npos) {
            text += ".0";
        }
        std::cout << "mAP: " << text << "\n";
    }
    return kExitOk;
}

// --------------------------------------------------------------- train-toy

void write_scene_features(const SyntheticScene& scene, const std::string& dir, int stride) {
    ensure_dir(dir);
    auto dump = [&dir, stride](std::int64_t id, const Planes<double>& planes) {
        HeatmapStack<double> stack;
        stack.channels = planes;
        stack.mask.assign(planes.size(), 1);
        stack.stride = stride;
        write_file(dir + "/" + std::to_string(id) + ".bin", serialize_stack(stack));
    };
    for (std::size_t i = 0; i < scene.train_gt.images.size(); ++i) {
        dump(scene.train_gt.images[i].id, scene.train_samples[i].features);
    }
    for (const auto& [id, planes] : scene.test_features) dump(id, planes);
}

int cmd_train_toy(const std::string& out_dir, std::uint64_t seed, const std::string& preset,
                  const std::string& config_path, bool no_masking, bool dump_features) {
    TrainConfig config = !config_path.empty() ? train_config_from(Config::load(config_path))
                                              : train_preset(preset);
    config.seed = seed;
    if (no_masking) config.masking_enabled = false;

    SceneConfig scene_config;
    scene_config.seed = seed;
    const auto scene = generate_masking_scene(scene_config);
    ensure_dir(out_dir);
    save_dataset(scene.train_gt, out_dir + "/train.json");
    save_dataset(scene.test_gt, out_dir + "/test.json");
    if (dump_features) write_scene_features(scene, out_dir + "/features", scene_config.stride);

    const auto arm = run_masking_arm(scene, config.masking_enabled, config);
    write_file(out_dir + "/model.bin", serialize_predictor(arm.predictor));
    write_file(out_dir + "/loss_history.csv", history_to_csv(arm.history));
    save_dataset(arm.predictions, out_dir + "/predictions.json");

    std::cout << "final epoch loss " << arm.history.back().total_loss << ", test mAP: " << arm.map
              << "\n";
    return kExitOk;
}

// --------------------------------------------------------- finetune-pseudo

int cmd_finetune(const std::string& model_path, const std::string& pseudo_path,
                 const std::string& features_dir, const std::string& out_dir, double lr,
                 int epochs, std::uint64_t seed, double sigma, int stride) {
    auto predictor = parse_predictor<double>(read_file(model_path));
    const auto pseudo = load_or_die(pseudo_path);

    std::vector<TrainSample> samples;
    std::map<std::int64_t, Planes<double>> features_by_image;
    for (const auto& image : pseudo.images) {
        const std::string path = features_dir + "/" + std::to_string(image.id) + ".bin";
        const auto stack = parse_stack<double>(read_file(path));
        if (stack.channel_count() != predictor.feature_count()) {
            throw ParamError(path + ": expected " + std::to_string(predictor.feature_count()) +
                             " feature planes, found " + std::to_string(stack.channel_count()));
        }
        features_by_image[image.id] = stack.channels;

        std::vector<Annotation> anns;
        for (const auto& ann : pseudo.annotations) {
            if (ann.image_id == image.id) anns.push_back(ann);
        }
        if (anns.empty()) continue;
        TrainSample sample;
        sample.features = stack.channels;
        sample.target = encode_targets<double>(anns, image, sigma, stride);
        // encode m channels even when the last ones are unlabeled
        while (sample.target.channel_count() < pseudo.vocabulary.size()) {
            sample.target.channels.push_back(
                Plane<double>::Zero(sample.target.rows(), sample.target.cols()));
            sample.target.mask.push_back(0);
        }
        samples.push_back(std::move(sample));
    }
    if (samples.empty()) throw ParamError("pseudo dataset has no annotated images");

    TrainConfig config = train_preset("pseudo-label");
    config.learning_rate = lr;
    config.epochs = epochs;
    config.seed = seed;
    const auto result = finetune_pseudo(predictor, samples, config);

    ensure_dir(out_dir);
    write_file(out_dir + "/model.bin", serialize_predictor(result.predictor));
    write_file(out_dir + "/loss_history.csv", history_to_csv(result.history));
    const auto predictions = predict_dataset(result.predictor, pseudo, features_by_image);
    save_dataset(predictions, out_dir + "/predictions.json");
    std::cout << "fine-tuned for " << result.history.size() << " epochs at lr " << lr << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ demo-masking

int cmd_demo_masking(std::uint64_t seed, const std::string& out_dir, bool masking_only,
                     bool json_out) {
    SceneConfig scene_config;
    scene_config.seed = seed;

    if (masking_only) {
        const auto scene = generate_masking_scene(scene_config);
        const auto arm = run_masking_arm(scene, true, train_preset("toy-demo"));
        if (!out_dir.empty()) {
            ensure_dir(out_dir);
            write_file(out_dir + "/model.bin", serialize_predictor(arm.predictor));
            save_dataset(arm.predictions, out_dir + "/predictions.json");
            save_dataset(scene.test_gt, out_dir + "/test.json");
        }
        std::cout << "masked run mAP: " << arm.map << "\n";
        return kExitOk;
    }

    const auto cmp = run_masking_ab(scene_config);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_file(out_dir + "/comparison.json", comparison_to_json(cmp));
    }
    if (json_out) {
        std::cout << comparison_to_json(cmp);
    } else {
        std::cout << "masked mAP: " << cmp.masked.map << "\n"
                  << "unmasked mAP: " << cmp.unmasked.map << "\n"
                  << "cross-channel error ratio (unmasked / masked): " << cmp.cross_error_ratio
                  << "\n";
    }
    if (cmp.masked.map < cmp.unmasked.map) {
        std::cerr << "error: masked run scored below the unmasked run\n";
        return kExitDomain;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"panpose: panoptic animal pose dataset tools"};
    app.require_subcommand(1);
    bool json_out = false;
    app.add_flag("--json", json_out, "machine-readable stdout");

    // validate
    std::string v_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a COCO keypoint JSON file");
    validate_cmd->add_option("dataset", v_path, "dataset JSON")->required();

    // merge
    std::string m_table, m_superset, m_out, m_report;
    std::vector<std::string> m_datasets;
    auto* merge_cmd = app.add_subcommand("merge", "merge datasets into superset space");
    merge_cmd->add_option("--table", m_table, "conversion table CSV")->required();
    merge_cmd->add_option("--superset", m_superset, "superset order file");
    merge_cmd->add_option("--out,-o", m_out, "merged dataset path")->required();
    merge_cmd->add_option("--report", m_report, "merge report JSON path");
    merge_cmd->add_option("datasets", m_datasets, "source dataset JSONs")->required();

    // project
    std::string p_table, p_superset, p_dataset, p_out;
    auto* project_cmd = app.add_subcommand("project", "re-index one dataset into superset space");
    project_cmd->add_option("--table", p_table, "conversion table CSV")->required();
    project_cmd->add_option("--superset", p_superset, "superset order file");
    project_cmd->add_option("dataset", p_dataset, "source dataset JSON")->required();
    project_cmd->add_option("--out,-o", p_out, "output path")->required();

    // encode
    std::string e_dataset, e_out;
    std::int64_t e_image_id = -1;
    double e_sigma = 2.0;
    int e_stride = 4;
    auto* encode_cmd = app.add_subcommand("encode", "render target heatmaps for one image");
    encode_cmd->add_option("dataset", e_dataset, "dataset JSON")->required();
    encode_cmd->add_option("--image-id", e_image_id, "image id (default: first image)");
    encode_cmd->add_option("--sigma", e_sigma, "gaussian sigma in heatmap cells");
    encode_cmd->add_option("--stride", e_stride, "image-to-heatmap stride");
    encode_cmd->add_option("--out,-o", e_out, "heatmap binary path")->required();

    // decode
    std::string d_stack;
    double d_threshold = 0.1;
    bool d_single = false;
    auto* decode_cmd = app.add_subcommand("decode", "extract peaks from a heatmap binary");
    decode_cmd->add_option("stack", d_stack, "heatmap binary")->required();
    decode_cmd->add_option("--threshold", d_threshold, "peak score threshold");
    decode_cmd->add_flag("--single-instance", d_single, "one global peak per channel");

    // split
    std::string s_dataset, s_kind, s_out, s_manifest, s_rounding = "floor";
    double s_fraction = 1.0;
    std::uint64_t s_seed = 0;
    auto* split_cmd = app.add_subcommand("split", "derive data-ratio or sparse-keypoint splits");
    split_cmd->add_option("dataset", s_dataset, "dataset JSON")->required();
    split_cmd->add_option("--kind", s_kind, "data_ratio | sparse_keypoints")->required();
    split_cmd->add_option("--fraction", s_fraction, "fraction to keep / drop")->required();
    split_cmd->add_option("--seed", s_seed, "RNG seed");
    split_cmd->add_option("--rounding", s_rounding, "floor | ceil | round (data_ratio)");
    split_cmd->add_option("--out,-o", s_out, "derived dataset path")->required();
    split_cmd->add_option("--manifest", s_manifest, "sidecar manifest JSON path");

    // pseudo-label
    std::string pl_preds, pl_out;
    int pl_margin = 30;
    auto* pseudo_cmd = app.add_subcommand("pseudo-label", "turn predictions into training labels");
    pseudo_cmd->add_option("predictions", pl_preds, "prediction dataset JSON")->required();
    pseudo_cmd->add_option("--out,-o", pl_out, "pseudo-label dataset path")->required();
    pseudo_cmd->add_option("--margin", pl_margin, "bbox margin in pixels");

    // bbox-heuristic
    std::string b_dataset, b_out;
    int b_margin = 30;
    bool b_overwrite = false;
    auto* bbox_cmd = app.add_subcommand("bbox-heuristic", "fill missing bboxes from keypoints");
    bbox_cmd->add_option("dataset", b_dataset, "dataset JSON")->required();
    bbox_cmd->add_option("--out,-o", b_out, "output path")->required();
    bbox_cmd->add_option("--margin", b_margin, "margin in pixels");
    bbox_cmd->add_flag("--overwrite", b_overwrite, "recompute existing bboxes too");

    // eval
    std::string ev_gt, ev_pred, ev_sigma_config, ev_out, ev_matches;
    double ev_sigma = 0.0;
    bool ev_coco_mean = false;
    int ev_jobs = 1;
    auto* eval_cmd = app.add_subcommand("eval", "OKS mAP of predictions against ground truth");
    eval_cmd->add_option("--gt", ev_gt, "ground-truth dataset JSON")->required();
    eval_cmd->add_option("--pred", ev_pred, "prediction dataset JSON")->required();
    eval_cmd->add_option("--sigma", ev_sigma, "uniform keypoint sigma (default 0.1)");
    eval_cmd->add_flag("--coco-mean", ev_coco_mean, "broadcast the mean reference sigma");
    eval_cmd->add_option("--sigma-config", ev_sigma_config, "sigma config file (TOML/JSON)");
    eval_cmd->add_option("--out,-o", ev_out, "report JSON path");
    eval_cmd->add_option("--matches-csv", ev_matches, "per-match audit CSV path");
    eval_cmd->add_option("--jobs", ev_jobs, "parallel per-image matching");

    // train-toy
    std::string t_out_dir, t_preset = "toy-demo", t_config;
    std::uint64_t t_seed = 0;
    bool t_no_masking = false, t_features = false;
    auto* train_cmd =
        app.add_subcommand("train-toy", "train the linear heatmap predictor on a synthetic scene");
    train_cmd->add_option("--out-dir", t_out_dir, "output directory")->required();
    train_cmd->add_option("--seed", t_seed, "scene and shuffle seed");
    train_cmd->add_option("--preset", t_preset, "training preset");
    train_cmd->add_option("--config", t_config, "training config file (TOML/JSON)");
    train_cmd->add_flag("--no-masking", t_no_masking, "disable gradient masking");
    train_cmd->add_flag("--dump-features", t_features, "write per-image feature planes");

    // finetune-pseudo
    std::string f_model, f_pseudo, f_features, f_out_dir;
    double f_lr = 1e-4, f_sigma = 2.0;
    int f_epochs = 5, f_stride = 4;
    std::uint64_t f_seed = 0;
    auto* finetune_cmd =
        app.add_subcommand("finetune-pseudo", "short fine-tuning pass on pseudo labels");
    finetune_cmd->add_option("--model", f_model, "predictor binary")->required();
    finetune_cmd->add_option("--dataset", f_pseudo, "pseudo-label dataset JSON")->required();
    finetune_cmd->add_option("--features-dir", f_features, "per-image feature planes dir")
        ->required();
    finetune_cmd->add_option("--out-dir", f_out_dir, "output directory")->required();
    finetune_cmd->add_option("--lr", f_lr, "learning rate");
    finetune_cmd->add_option("--epochs", f_epochs, "epochs");
    finetune_cmd->add_option("--seed", f_seed, "shuffle seed");
    finetune_cmd->add_option("--sigma", f_sigma, "target gaussian sigma");
    finetune_cmd->add_option("--stride", f_stride, "heatmap stride");

    // demo-masking
    std::string dm_out_dir;
    std::uint64_t dm_seed = 0;
    bool dm_masking_only = false;
    auto* demo_cmd = app.add_subcommand(
        "demo-masking", "paired synthetic comparison of masked vs unmasked training");
    demo_cmd->add_option("--seed", dm_seed, "scene and training seed");
    demo_cmd->add_option("--out-dir", dm_out_dir, "directory for the comparison report");
    demo_cmd->add_flag("--masking-only", dm_masking_only, "single masked run, no comparison");

    // lets `panpose <cmd> --json` reach the parent flag
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    try {
        if (*validate_cmd) return cmd_validate(v_path, json_out);
        if (*merge_cmd) return cmd_merge(m_table, m_superset, m_datasets, m_out, m_report,
                                         json_out);
        if (*project_cmd) return cmd_project(p_table, p_superset, p_dataset, p_out);
        if (*encode_cmd) return cmd_encode(e_dataset, e_image_id, e_sigma, e_stride, e_out);
        if (*decode_cmd) return cmd_decode(d_stack, d_threshold, d_single, json_out);
        if (*split_cmd) return cmd_split(s_dataset, s_kind, s_fraction, s_seed, s_rounding, s_out,
                                         s_manifest);
        if (*pseudo_cmd) return cmd_pseudo_label(pl_preds, pl_out, pl_margin);
        if (*bbox_cmd) return cmd_bbox(b_dataset, b_out, b_margin, b_overwrite);
        if (*eval_cmd) return cmd_eval(ev_gt, ev_pred, ev_sigma, ev_coco_mean, ev_sigma_config,
                                       ev_out, ev_matches, ev_jobs, json_out);
        if (*train_cmd) return cmd_train_toy(t_out_dir, t_seed, t_preset, t_config, t_no_masking,
                                             t_features);
        if (*finetune_cmd) return cmd_finetune(f_model, f_pseudo, f_features, f_out_dir, f_lr,
                                               f_epochs, f_seed, f_sigma, f_stride);
        if (*demo_cmd) return cmd_demo_masking(dm_seed, dm_out_dir, dm_masking_only, json_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitIo;
}
