#include "panpose/eval.hpp"

#include "panpose/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

namespace panpose {

const std::array<double, 17>& coco_human_sigmas() {
    static const std::array<double, 17> sigmas = {
        0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
        0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};
    return sigmas;
}

double mean_coco_sigma() {
    const auto& s = coco_human_sigmas();
    double sum = 0.0;
    for (double v : s) sum += v;
    return sum / static_cast<double>(s.size());
}

SigmaConfig SigmaConfig::uniform(std::size_t m, double sigma) {
    if (!(sigma > 0.0)) throw ParamError("sigma must be positive");
    SigmaConfig cfg;
    cfg.sigmas = Vector<double>::Constant(static_cast<Eigen::Index>(m), sigma);
    return cfg;
}

SigmaConfig SigmaConfig::coco_mean(std::size_t m) { return uniform(m, mean_coco_sigma()); }

SigmaConfig SigmaConfig::from_values(std::vector<double> values) {
    SigmaConfig cfg;
    cfg.sigmas.resize(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw ParamError("all sigmas must be positive");
        cfg.sigmas[static_cast<Eigen::Index>(i)] = values[i];
    }
    return cfg;
}

Bbox heuristic_bbox(const Annotation& ann, const ImageRecord& image, int margin_px) {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    bool any = false;
    for (const auto& kp : ann.keypoints) {
        if (!kp.labeled()) continue;
        if (!any) {
            min_x = max_x = kp.x;
            min_y = max_y = kp.y;
            any = true;
        } else {
            min_x = std::min(min_x, kp.x);
            max_x = std::max(max_x, kp.x);
            min_y = std::min(min_y, kp.y);
            max_y = std::max(max_y, kp.y);
        }
    }
    if (!any) {
        throw ParamError("annotation " + std::to_string(ann.id) +
                         " has no labeled keypoints; cannot build a bbox");
    }
    Bbox box;
    box.x = std::max(0.0, min_x - margin_px);
    box.y = std::max(0.0, min_y - margin_px);
    box.w = (max_x - min_x) + 2.0 * margin_px;
    box.h = (max_y - min_y) + 2.0 * margin_px;
    if (image.width > 0) box.w = std::min(box.w, image.width - box.x);
    if (image.height > 0) box.h = std::min(box.h, image.height - box.y);
    box.w = std::max(box.w, 0.0);
    box.h = std::max(box.h, 0.0);
    return box;
}

double oks(const Annotation& gt, const Annotation& pred, const SigmaConfig& sigmas, double area) {
    if (gt.keypoints.size() != pred.keypoints.size()) {
        throw EvalError("OKS between annotations of different keypoint counts");
    }
    if (sigmas.size() != gt.keypoints.size()) {
        throw EvalError("sigma config has " + std::to_string(sigmas.size()) +
                        " entries, annotations have " + std::to_string(gt.keypoints.size()));
    }
    if (!(area > 0.0)) throw EvalError("OKS needs a positive object area");

    double sum = 0.0;
    int visible = 0;
    for (std::size_t k = 0; k < gt.keypoints.size(); ++k) {
        const Keypoint& g = gt.keypoints[k];
        if (!g.labeled()) continue;
        ++visible;
        const double dx = pred.keypoints[k].x - g.x;
        const double dy = pred.keypoints[k].y - g.y;
        const double kappa = 2.0 * sigmas.sigmas[static_cast<Eigen::Index>(k)];
        sum += std::exp(-(dx * dx + dy * dy) / (2.0 * area * kappa * kappa));
    }
    if (visible == 0) {
        throw EvalError("annotation " + std::to_string(gt.id) +
                        " has no labeled keypoints; OKS undefined");
    }
    return sum / static_cast<double>(visible);
}

namespace {

struct ImageMatches {
    std::vector<MatchRecord> records;  // one per kept prediction, matched or not
    int valid_gt_count = 0;
};

ImageMatches match_image(const std::vector<const Annotation*>& gts,
                         std::vector<const Annotation*> preds, const ImageRecord& image,
                         const SigmaConfig& sigmas, const EvalConfig& config,
                         std::vector<std::string>& warnings) {
    ImageMatches out;

    std::vector<const Annotation*> valid_gts;
    for (const Annotation* gt : gts) {
        if (gt->count_labeled() > 0) {
            valid_gts.push_back(gt);
        } else {
            warnings.push_back("ground-truth annotation " + std::to_string(gt->id) +
                               " has no labeled keypoints; skipped");
        }
    }
    std::sort(valid_gts.begin(), valid_gts.end(),
              [](const Annotation* a, const Annotation* b) { return a->id < b->id; });
    out.valid_gt_count = static_cast<int>(valid_gts.size());

    // Highest score first; annotation id breaks ties.
    std::sort(preds.begin(), preds.end(), [](const Annotation* a, const Annotation* b) {
        const double sa = a->score.value_or(1.0);
        const double sb = b->score.value_or(1.0);
        if (sa != sb) return sa > sb;
        return a->id < b->id;
    });
    if (preds.size() > static_cast<std::size_t>(config.max_detections_per_image)) {
        preds.resize(static_cast<std::size_t>(config.max_detections_per_image));
    }

    std::vector<double> areas(valid_gts.size());
    for (std::size_t g = 0; g < valid_gts.size(); ++g) {
        const Annotation* gt = valid_gts[g];
        if (gt->bbox && (*gt->bbox)[2] > 0.0 && (*gt->bbox)[3] > 0.0) {
            areas[g] = (*gt->bbox)[2] * (*gt->bbox)[3];
        } else {
            const Bbox box = heuristic_bbox(*gt, image, config.bbox_margin_px);
            areas[g] = std::max(box.area(), 1.0);
        }
    }

    std::vector<bool> gt_taken(valid_gts.size(), false);
    for (const Annotation* pred : preds) {
        int best_gt = -1;
        double best_oks = -1.0;
        for (std::size_t g = 0; g < valid_gts.size(); ++g) {
            if (gt_taken[g]) continue;
            const double v = oks(*valid_gts[g], *pred, sigmas, areas[g]);
            if (v > best_oks) {
                best_oks = v;
                best_gt = static_cast<int>(g);
            }
        }
        MatchRecord rec;
        rec.image_id = image.id;
        rec.prediction_id = pred->id;
        rec.score = pred->score.value_or(1.0);
        if (best_gt >= 0) {
            gt_taken[static_cast<std::size_t>(best_gt)] = true;
            rec.gt_id = valid_gts[static_cast<std::size_t>(best_gt)]->id;
            rec.oks = best_oks;
        } else {
            rec.gt_id = -1;
            rec.oks = 0.0;
        }
        out.records.push_back(rec);
    }
    return out;
}

// All-point interpolation sampled at 101 recall positions, COCO style.
double average_precision(const std::vector<bool>& tp_flags, int total_gt) {
    if (total_gt == 0) return 0.0;
    std::vector<double> precision(tp_flags.size());
    std::vector<double> recall(tp_flags.size());
    int tp = 0;
    for (std::size_t i = 0; i < tp_flags.size(); ++i) {
        if (tp_flags[i]) ++tp;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
    }
    for (std::size_t i = precision.size(); i > 1; --i) {
        precision[i - 2] = std::max(precision[i - 2], precision[i - 1]);
    }
    double ap = 0.0;
    for (int r = 0; r <= 100; ++r) {
        const double want = static_cast<double>(r) / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), want);
        if (it != recall.end()) {
            ap += precision[static_cast<std::size_t>(it - recall.begin())];
        }
    }
    return ap / 101.0;
}

}  // namespace

EvalReport evaluate(const PoseDataset& gt_dataset, const PoseDataset& predictions,
                    const SigmaConfig& sigmas, const EvalConfig& config) {
    if (!(gt_dataset.vocabulary == predictions.vocabulary)) {
        throw EvalError("ground truth and predictions use different vocabularies");
    }
    if (sigmas.size() != gt_dataset.vocabulary.size()) {
        throw EvalError("sigma config size does not match the vocabulary");
    }

    std::map<std::int64_t, const ImageRecord*> images;
    for (const auto& img : gt_dataset.images) images.emplace(img.id, &img);
    for (const auto& ann : predictions.annotations) {
        if (images.find(ann.image_id) == images.end()) {
            throw EvalError("prediction " + std::to_string(ann.id) +
                            " references unknown image id " + std::to_string(ann.image_id));
        }
    }

    std::map<std::int64_t, std::vector<const Annotation*>> gt_by_image;
    for (const auto& ann : gt_dataset.annotations) gt_by_image[ann.image_id].push_back(&ann);
    std::map<std::int64_t, std::vector<const Annotation*>> pred_by_image;
    for (const auto& ann : predictions.annotations) pred_by_image[ann.image_id].push_back(&ann);

    EvalReport report;
    std::vector<std::int64_t> image_order;
    for (const auto& [id, img] : images) image_order.push_back(id);

    std::vector<ImageMatches> per_image(image_order.size());
    std::vector<std::vector<std::string>> per_image_warnings(image_order.size());

    auto run_one = [&](std::size_t i) {
        const std::int64_t id = image_order[i];
        auto git = gt_by_image.find(id);
        auto pit = pred_by_image.find(id);
        per_image[i] = match_image(
            git == gt_by_image.end() ? std::vector<const Annotation*>{} : git->second,
            pit == pred_by_image.end() ? std::vector<const Annotation*>{} : pit->second,
            *images.at(id), sigmas, config, per_image_warnings[i]);
    };
    if (config.jobs > 1) {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (int j = 0; j < config.jobs; ++j) {
            futures.push_back(std::async(std::launch::async, [&]() {
                for (std::size_t i = next.fetch_add(1); i < image_order.size();
                     i = next.fetch_add(1)) {
                    run_one(i);
                }
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < image_order.size(); ++i) run_one(i);
    }

    int total_gt = 0;
    for (std::size_t i = 0; i < per_image.size(); ++i) {
        total_gt += per_image[i].valid_gt_count;
        report.matches.insert(report.matches.end(), per_image[i].records.begin(),
                              per_image[i].records.end());
        report.warnings.insert(report.warnings.end(), per_image_warnings[i].begin(),
                               per_image_warnings[i].end());
    }
    if (total_gt == 0) {
        throw EvalError("no ground-truth annotation has labeled keypoints; nothing to evaluate");
    }

    // Global ranking across images: score desc, then prediction id.
    std::vector<const MatchRecord*> ranked;
    ranked.reserve(report.matches.size());
    for (const auto& rec : report.matches) ranked.push_back(&rec);
    std::sort(ranked.begin(), ranked.end(), [](const MatchRecord* a, const MatchRecord* b) {
        if (a->score != b->score) return a->score > b->score;
        if (a->prediction_id != b->prediction_id) return a->prediction_id < b->prediction_id;
        return a->image_id < b->image_id;
    });

    double ap_sum = 0.0;
    for (double threshold : kOksThresholds) {
        std::vector<bool> tp_flags(ranked.size());
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            tp_flags[i] = ranked[i]->gt_id >= 0 && ranked[i]->oks >= threshold;
        }
        const double ap = average_precision(tp_flags, total_gt);
        report.per_threshold_ap[threshold] = ap;
        ap_sum += ap;
    }
    report.map = ap_sum / static_cast<double>(kOksThresholds.size()) * 100.0;
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["mAP"] = report.map;
    nlohmann::ordered_json thresholds = nlohmann::ordered_json::object();
    for (const auto& [t, ap] : report.per_threshold_ap) {
        std::ostringstream key;
        key << std::fixed << std::setprecision(2) << t;
        thresholds[key.str()] = ap;
    }
    j["per_threshold"] = std::move(thresholds);
    j["num_matches"] = report.matches.size();
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::string matches_to_csv(const std::vector<MatchRecord>& matches) {
    std::ostringstream out;
    out << "image_id,prediction_id,gt_id,oks,score\n";
    out << std::setprecision(17);
    for (const auto& rec : matches) {
        out << rec.image_id << "," << rec.prediction_id << "," << rec.gt_id << "," << rec.oks
            << "," << rec.score << "\n";
    }
    return out.str();
}

}  // namespace panpose
