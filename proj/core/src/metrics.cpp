#include "simpl/metrics.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "simpl/errors.hpp"

namespace simpl {

namespace {

struct RankedFlags {
  std::vector<std::size_t> order;
  std::vector<bool> flags;  // indexed by input position
};

RankedFlags rank_and_match(std::span<const Detection> dets, std::span<const Annotation> gts,
                           double iou_min) {
  RankedFlags out;
  out.order = detection_order(dets);
  out.flags.assign(dets.size(), false);

  std::vector<std::size_t> gt_order(gts.size());
  std::iota(gt_order.begin(), gt_order.end(), 0);
  std::sort(gt_order.begin(), gt_order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ga = gts[a];
    const auto& gb = gts[b];
    return std::tie(ga.image_id, ga.bbox.y, ga.bbox.x, ga.bbox.h, ga.bbox.w, ga.class_id, a) <
           std::tie(gb.image_id, gb.bbox.y, gb.bbox.x, gb.bbox.h, gb.bbox.w, gb.class_id, b);
  });
  std::unordered_map<std::string, std::vector<std::size_t>> by_image;
  for (std::size_t g : gt_order) by_image[gts[g].image_id].push_back(g);
  std::vector<bool> consumed(gts.size(), false);

  for (std::size_t d : out.order) {
    const Detection& det = dets[d];
    const auto it = by_image.find(det.image_id);
    if (it == by_image.end()) continue;
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g : it->second) {
      if (consumed[g] || gts[g].class_id != det.class_id) continue;
      const double v = iou(det.bbox, gts[g].bbox);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best >= iou_min) {
      consumed[best_gt] = true;
      out.flags[d] = true;
    }
  }
  return out;
}

// Cumulative (TP, FP) after each group of equal-confidence detections.
struct ThresholdPoint {
  double threshold;
  std::size_t tp;
  std::size_t fp;
};

std::vector<ThresholdPoint> threshold_sweep(std::span<const Detection> dets, const RankedFlags& r) {
  std::vector<ThresholdPoint> points;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const std::size_t d = r.order[k];
    (r.flags[d] ? tp : fp) += 1;
    const bool group_end =
        k + 1 == r.order.size() || dets[r.order[k + 1]].confidence != dets[d].confidence;
    if (group_end) points.push_back({dets[d].confidence, tp, fp});
  }
  return points;
}

void require_ground_truth(std::span<const Annotation> gts) {
  if (gts.empty()) {
    throw ValidationError("metrics: at least one ground truth box is required (recall undefined)");
  }
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const long long iw = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const long long ih = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const long long inter = iw * ih;
  const long long uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::size_t> detection_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Detection& da = dets[a];
    const Detection& db = dets[b];
    if (da.confidence != db.confidence) return da.confidence > db.confidence;
    return std::tie(da.image_id, da.bbox.y, da.bbox.x, da.bbox.h, da.bbox.w, da.class_id, a) <
           std::tie(db.image_id, db.bbox.y, db.bbox.x, db.bbox.h, db.bbox.w, db.class_id, b);
  });
  return order;
}

std::vector<bool> match_detections(std::span<const Detection> detections,
                                   std::span<const Annotation> ground_truth, double iou_min) {
  return rank_and_match(detections, ground_truth, iou_min).flags;
}

double ap50(std::span<const Detection> detections, std::span<const Annotation> ground_truth) {
  require_ground_truth(ground_truth);
  const RankedFlags ranked = rank_and_match(detections, ground_truth, kDefaultIouThreshold);
  const std::vector<ThresholdPoint> points = threshold_sweep(detections, ranked);
  const double n_gt = static_cast<double>(ground_truth.size());

  std::vector<double> recall(points.size());
  std::vector<double> precision(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    recall[i] = static_cast<double>(points[i].tp) / n_gt;
    precision[i] = static_cast<double>(points[i].tp) / static_cast<double>(points[i].tp + points[i].fp);
  }
  for (std::size_t i = points.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

OperatingPoint operating_point_at_fa(std::span<const Detection> detections,
                                     std::span<const Annotation> ground_truth, double area_km2,
                                     double alpha, double iou_min) {
  require_ground_truth(ground_truth);
  if (!(area_km2 > 0.0)) throw ValidationError("metrics: area_km2 must be > 0");
  if (!(alpha >= 0.0)) throw ValidationError("metrics: alpha must be >= 0");
  const RankedFlags ranked = rank_and_match(detections, ground_truth, iou_min);
  const double n_gt = static_cast<double>(ground_truth.size());

  OperatingPoint best;
  best.alpha = alpha;
  best.threshold = std::numeric_limits<double>::infinity();
  for (const ThresholdPoint& p : threshold_sweep(detections, ranked)) {
    if (static_cast<double>(p.fp) / area_km2 > alpha) continue;
    const double r = static_cast<double>(p.tp) / n_gt;
    if (r > best.recall) {
      best.recall = r;
      best.threshold = p.threshold;
      best.true_positives = static_cast<double>(p.tp);
      best.false_positives = static_cast<double>(p.fp);
    }
  }
  return best;
}

double recall_at_fa(std::span<const Detection> detections, std::span<const Annotation> ground_truth,
                    double area_km2, double alpha) {
  return operating_point_at_fa(detections, ground_truth, area_km2, alpha).recall;
}

EvalReport evaluate(std::span<const Detection> detections, std::span<const Annotation> ground_truth,
                    double area_km2, std::span<const double> alphas) {
  EvalReport report;
  report.ap50 = ap50(detections, ground_truth);
  report.ground_truth_count = ground_truth.size();
  report.detection_count = detections.size();
  report.area_km2 = area_km2;
  for (double alpha : alphas) {
    const OperatingPoint op = operating_point_at_fa(detections, ground_truth, area_km2, alpha);
    report.recall_at[alpha] = op.recall;
    report.operating_points.push_back(op);
  }
  std::sort(report.operating_points.begin(), report.operating_points.end(),
            [](const OperatingPoint& a, const OperatingPoint& b) { return a.alpha < b.alpha; });
  report.operating_points.erase(
      std::unique(report.operating_points.begin(), report.operating_points.end(),
                  [](const OperatingPoint& a, const OperatingPoint& b) { return a.alpha == b.alpha; }),
      report.operating_points.end());
  return report;
}

EvalReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw ValidationError("aggregate_runs: at least one report is required");
  const EvalReport& first = reports.front();
  EvalReport out = first;
  out.ap50 = 0.0;
  out.detection_count = 0;
  out.runs = 0;
  for (auto& [alpha, r] : out.recall_at) r = 0.0;
  for (auto& op : out.operating_points) {
    op.threshold = std::numeric_limits<double>::quiet_NaN();
    op.true_positives = op.false_positives = op.recall = 0.0;
  }

  for (const EvalReport& r : reports) {
    if (r.area_km2 != first.area_km2) {
      throw ValidationError("aggregate_runs: reports cover different areas");
    }
    if (r.ground_truth_count != first.ground_truth_count) {
      throw ValidationError("aggregate_runs: reports use different ground truth");
    }
    if (r.recall_at.size() != first.recall_at.size() ||
        !std::equal(r.recall_at.begin(), r.recall_at.end(), first.recall_at.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw ValidationError("aggregate_runs: reports use different alpha sets");
    }
    out.ap50 += r.ap50;
    out.detection_count += r.detection_count;
    out.runs += r.runs;
    for (const auto& [alpha, recall] : r.recall_at) out.recall_at[alpha] += recall;
    for (std::size_t i = 0; i < out.operating_points.size() && i < r.operating_points.size(); ++i) {
      out.operating_points[i].true_positives += r.operating_points[i].true_positives;
      out.operating_points[i].false_positives += r.operating_points[i].false_positives;
      out.operating_points[i].recall += r.operating_points[i].recall;
    }
  }
  const double n = static_cast<double>(reports.size());
  out.ap50 /= n;
  for (auto& [alpha, r] : out.recall_at) r /= n;
  for (auto& op : out.operating_points) {
    op.true_positives /= n;
    op.false_positives /= n;
    op.recall /= n;
  }
  if (reports.size() == 1) return first;
  return out;
}

YAML::Node report_to_yaml(const EvalReport& report) {
  YAML::Node node;
  node["ap50"] = report.ap50;
  node["area_km2"] = report.area_km2;
  node["ground_truth"] = report.ground_truth_count;
  node["detections"] = report.detection_count;
  node["runs"] = report.runs;
  for (const auto& op : report.operating_points) {
    YAML::Node entry;
    entry["alpha"] = op.alpha;
    entry["recall"] = op.recall;
    entry["true_positives"] = op.true_positives;
    entry["false_positives"] = op.false_positives;
    if (std::isfinite(op.threshold)) {
      entry["threshold"] = op.threshold;
    } else {
      entry["threshold"] = YAML::Node(YAML::NodeType::Null);
    }
    node["recall_at"].push_back(entry);
  }
  return node;
}

std::vector<Detection> parse_detection_file(std::string_view text, const std::string& image_id) {
  std::vector<Detection> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    Detection d;
    d.image_id = image_id;
    double x = 0, y = 0, w = 0, h = 0;
    if (!(row >> d.class_id >> d.confidence >> x >> y >> w >> h)) {
      throw ParseError(image_id + ": line " + std::to_string(line_no) +
                       ": expected 'class_id confidence x y w h'");
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw ValidationError(image_id + ": line " + std::to_string(line_no) +
                            ": confidence must lie in [0, 1]");
    }
    d.bbox = {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)),
              static_cast<int>(std::lround(w)), static_cast<int>(std::lround(h))};
    if (d.bbox.w <= 0 || d.bbox.h <= 0) {
      throw ValidationError(image_id + ": line " + std::to_string(line_no) +
                            ": detection box is degenerate");
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace simpl
