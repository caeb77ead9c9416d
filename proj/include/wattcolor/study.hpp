#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wattcolor/colorspace.hpp"
#include "wattcolor/transform.hpp"

namespace wattcolor {

enum class ControlKind { None, Identical, Black };

std::string_view to_string(ControlKind kind);
ControlKind parse_control_kind(std::string_view name);

// One rater's 1-5 impairment score for one image pair.
struct RatingRecord {
  std::string participant;
  std::string batch;
  std::string image;
  DistanceMetric metric = DistanceMetric::L22;
  ColorSpace space = ColorSpace::SRGB;
  double lambda_norm = 0.0;
  int score = 0;
  ControlKind control = ControlKind::None;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

// A submission passes when its identical-pair control scored at least
// identical_min and its black-pair control at most black_max.
struct ControlPolicy {
  int identical_min = 5;
  int black_max = 1;
};

// Groups records into submissions keyed by (participant, batch); each
// submission must hold exactly one identical and one black control
// (MalformedDataError otherwise). Submissions failing either control are
// dropped whole; surviving records come back unmodified, in input order,
// with the control rows removed.
std::vector<RatingRecord> filter_batches(const std::vector<RatingRecord>& records, const ControlPolicy& policy = {});

struct MOSEntry {
  std::string image;
  DistanceMetric metric = DistanceMetric::L22;
  ColorSpace space = ColorSpace::SRGB;
  double lambda_norm = 0.0;
  double mos = 0.0;       // [1,5]
  double mos_norm = 0.0;  // (mos - 1) / 4
  std::size_t n_ratings = 0;
};

inline double normalize_mos(double mos) { return (mos - 1.0) / 4.0; }

// Mean score per (image, metric, space, lambda_norm), sorted by that key.
std::vector<MOSEntry> aggregate_mos(const std::vector<RatingRecord>& records);

struct BoundaryPoint {
  double mos_norm = 0.0;
  double lambda_norm = 0.0;
  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
};

// Snaps mos_norm to the levels reachable by averaging `raters` integer
// scores (4 * raters + 1 levels), keeps the smallest lambda per level, then
// walks the levels upward and drops any point whose lambda does not exceed
// every lambda already kept. Output is sorted by mos_norm.
std::vector<BoundaryPoint> lower_boundary(const std::vector<BoundaryPoint>& points, std::size_t raters = 5);

// Largest admissible rate: keeps (e^k - 1) / 1000 <= 1.
double max_rate();

// (e^{k s} - 1) / 1000, for s in [0,1] and k in (0, max_rate()].
double lambda_lower_bound(double k, double s);

// Sum of squared residuals of the exponential lower bound against points.
double lower_bound_residual(double k, const std::vector<BoundaryPoint>& points);

struct LowerBoundFit {
  double k = 0.0;
  double rmse = 0.0;
  std::size_t n_boundary = 0;
  std::string image;
  DistanceMetric metric = DistanceMetric::L22;
  ColorSpace space = ColorSpace::SRGB;
};

// Least-squares rate over (0, max_rate()]: a coarse scan locates the basin,
// then golden-section search refines it to 1e-8 in k.
LowerBoundFit fit_k(const std::vector<BoundaryPoint>& boundary);

// Ratings CSV: participant,batch,image,metric,space,lambda_norm,score,control
std::string ratings_csv_header();
std::string to_csv_row(const RatingRecord& r);
std::vector<RatingRecord> read_ratings_csv(const std::filesystem::path& path);
std::vector<RatingRecord> parse_ratings_csv(std::string_view text, std::string source);

// Runs filter -> aggregate -> boundary -> fit for one (image, metric, space).
struct LowerBoundPipeline {
  std::vector<RatingRecord> surviving;
  std::vector<MOSEntry> mos;
  std::vector<BoundaryPoint> boundary;
  LowerBoundFit fit;
};

LowerBoundPipeline fit_lower_bound_from_ratings(const std::vector<RatingRecord>& records, const std::string& image,
                                                DistanceMetric metric, ColorSpace space,
                                                const ControlPolicy& policy = {}, std::size_t raters = 5);

}  // namespace wattcolor
