#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simpl/groundtruth.hpp"

namespace YAML {
class Node;
}

namespace simpl {

struct Detection {
  std::string image_id;
  int class_id = 1;
  BBox bbox;
  double confidence = 0.0;
};

inline constexpr double kDefaultIouThreshold = 0.5;

double iou(const BBox& a, const BBox& b);

// Processing order for matching: confidence descending, then image_id, then
// box position (y, x, h, w), then class id, then input position.
std::vector<std::size_t> detection_order(std::span<const Detection> detections);

// Greedy single-consumption matching. Each detection, in detection_order,
// claims the unmatched same-class ground truth box in its image with the
// highest IoU (earliest in (y, x) order on ties) if that IoU >= iou_min.
// Returns one flag per input detection, true for a true positive.
std::vector<bool> match_detections(std::span<const Detection> detections,
                                   std::span<const Annotation> ground_truth,
                                   double iou_min = kDefaultIouThreshold);

// All-points average precision at IoU 0.5: area under the precision-recall
// curve after taking the running maximum of precision from the right. One PR
// point is produced per distinct confidence value. Throws ValidationError
// with no ground truth boxes.
double ap50(std::span<const Detection> detections, std::span<const Annotation> ground_truth);

struct OperatingPoint {
  double alpha = 0.0;      // false alarms per km^2
  double threshold = 0.0;  // lowest confidence kept; +inf when nothing is kept
  double true_positives = 0.0;
  double false_positives = 0.0;
  double recall = 0.0;
};

// Best recall over confidence thresholds whose false-alarm density
// FP / area_km2 does not exceed alpha; 0 when no threshold qualifies.
OperatingPoint operating_point_at_fa(std::span<const Detection> detections,
                                     std::span<const Annotation> ground_truth, double area_km2,
                                     double alpha, double iou_min = kDefaultIouThreshold);
double recall_at_fa(std::span<const Detection> detections, std::span<const Annotation> ground_truth,
                    double area_km2, double alpha);

struct EvalReport {
  double ap50 = 0.0;
  std::map<double, double> recall_at;  // alpha -> R(alpha)
  std::vector<OperatingPoint> operating_points;
  std::size_t ground_truth_count = 0;
  std::size_t detection_count = 0;
  double area_km2 = 0.0;
  std::size_t runs = 1;
};

EvalReport evaluate(std::span<const Detection> detections, std::span<const Annotation> ground_truth,
                    double area_km2, std::span<const double> alphas);

// Arithmetic mean over runs evaluated on the same ground truth and area.
EvalReport aggregate_runs(std::span<const EvalReport> reports);

YAML::Node report_to_yaml(const EvalReport& report);

// Rows of `class_id confidence x y w h` in pixels.
std::vector<Detection> parse_detection_file(std::string_view text, const std::string& image_id);

}  // namespace simpl
