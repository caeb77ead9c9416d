#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wattcolor/features.hpp"
#include "wattcolor/power_model.hpp"
#include "wattcolor/predictor.hpp"
#include "wattcolor/study.hpp"
#include "wattcolor/transform.hpp"

namespace wattcolor {

using Json = nlohmann::ordered_json;

// Every to_json has a matching from_json; malformed documents raise
// MalformedDataError. Non-finite doubles are written as null and read back
// as NaN.
Json to_json(const PowerModel& m);
PowerModel power_model_from_json(const Json& j);

Json to_json(const FitReport& r);
FitReport fit_report_from_json(const Json& j);

Json to_json(const LambdaRange& r);
LambdaRange lambda_range_from_json(const Json& j);

Json to_json(const TransformConfig& c);
TransformConfig transform_config_from_json(const Json& j);

// Pixels are not part of the document; reading gives a black image of the
// recorded size.
Json to_json(const TransformResult& r);
TransformResult transform_result_from_json(const Json& j);

Json to_json(const FeatureVector& f);
FeatureVector feature_vector_from_json(const Json& j);

Json to_json(const LowerBoundFit& f);
LowerBoundFit lower_bound_fit_from_json(const Json& j);

Json to_json(const TrainedPredictor& p);
TrainedPredictor predictor_from_json(const Json& j);

Json to_json(const CVReport& r);
CVReport cv_report_from_json(const Json& j);

Json to_json(const LeaveOneOutResult& r);
LeaveOneOutResult leave_one_out_from_json(const Json& j);

// Two-space indented, trailing newline.
std::string dump(const Json& j);
Json parse_json(std::string_view text, const std::string& source);
Json load_json(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, const std::string& text);
inline void save_json(const std::filesystem::path& path, const Json& j) { save_text(path, dump(j)); }

// Calibration CSV: channel,code,power_w with channel in {r,g,b} and code an
// integer drive level 0-255.
std::vector<MeasurementSample> parse_measurements_csv(std::string_view text, std::string source);
std::vector<MeasurementSample> read_measurements_csv(const std::filesystem::path& path);

}  // namespace wattcolor
