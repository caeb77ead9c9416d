#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wattcolor/errors.hpp"
#include "wattcolor/features.hpp"
#include "wattcolor/png_io.hpp"
#include "wattcolor/predictor.hpp"
#include "wattcolor/serialization.hpp"
#include "wattcolor/study.hpp"
#include "wattcolor/transform.hpp"

namespace py = pybind11;
namespace wc = wattcolor;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

wc::ImageBuffer to_buffer(const Array& a, wc::ColorSpace space) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an array of shape (height, width, 3)");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  return wc::ImageBuffer(w, h, space, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const wc::ImageBuffer& img) {
  Array out({static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width()), py::ssize_t{3}});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

std::string json_text(const wc::Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_wattcolor, m) {
  m.doc() = "Native core of the wattcolor package";

  static py::exception<wc::Error> error(m, "WattcolorError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const wc::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("convert", [](const Array& img, const std::string& from, const std::string& to) {
    return to_array(wc::convert_image(to_buffer(img, wc::parse_color_space(from)), wc::parse_color_space(to)));
  }, py::arg("image"), py::arg("src"), py::arg("dst"));
  m.def("srgb_to_linear", &wc::srgb_to_linear);
  m.def("linear_to_srgb", &wc::linear_to_srgb);

  m.def("read_png", [](const std::string& path) { return to_array(wc::read_png(path)); });
  m.def("write_png", [](const std::string& path, const Array& img) {
    wc::write_png(path, to_buffer(img, wc::ColorSpace::SRGB));
  });

  m.def("l22_value", [](double x, double alpha, double beta, double gamma, double lambda) {
    return wc::l22_value(x, {alpha, beta, gamma}, lambda);
  }, py::arg("x"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("lam"));
  m.def("l2_scale", [](std::array<double, 3> u, std::array<double, 3> alpha, double lambda) {
    return wc::l2_scale({u[0], u[1], u[2]}, alpha, lambda);
  }, py::arg("pixel"), py::arg("alpha"), py::arg("lam"));

  m.def("model_power", [](const std::string& model_json, const Array& img) {
    const auto model = wc::power_model_from_json(wc::parse_json(model_json, "model"));
    return wc::image_power(model, to_buffer(img, model.space()));
  }, py::arg("model_json"), py::arg("image"));
  m.def("lambda_range", [](const std::string& model_json, const std::string& metric, const std::string& scale) {
    const auto model = wc::power_model_from_json(wc::parse_json(model_json, "model"));
    return json_text(wc::to_json(wc::compute_lambda_range(model, wc::parse_metric(metric), 1, 1, wc::parse_lambda_scale(scale))));
  }, py::arg("model_json"), py::arg("metric"), py::arg("scale") = "geometric");
  m.def("fit_measurements_csv", [](const std::string& path) {
    return json_text(wc::to_json(wc::fit_from_measurements(wc::read_measurements_csv(path))));
  });

  m.def("transform", [](const Array& img, const std::string& model_json, const std::string& metric,
                        const std::string& space, double lambda_norm, const std::string& scale) {
    wc::TransformConfig cfg;
    cfg.metric = wc::parse_metric(metric);
    cfg.space = wc::parse_color_space(space);
    cfg.lambda_norm = lambda_norm;
    cfg.scale = wc::parse_lambda_scale(scale);
    const auto model = wc::power_model_from_json(wc::parse_json(model_json, "model"));
    const auto result = wc::apply(cfg, model, to_buffer(img, wc::ColorSpace::SRGB));
    return py::make_tuple(to_array(result.output), json_text(wc::to_json(result)));
  }, py::arg("image"), py::arg("model_json"), py::arg("metric") = "l22", py::arg("space") = "srgb",
     py::arg("lambda_norm") = 1.0, py::arg("scale") = "geometric");

  m.def("extract_features", [](const Array& img) {
    return json_text(wc::to_json(wc::extract_features(to_buffer(img, wc::ColorSpace::SRGB))));
  });

  m.def("lambda_lower_bound", &wc::lambda_lower_bound, py::arg("k"), py::arg("s"));
  m.def("max_rate", &wc::max_rate);
  m.def("lower_boundary", [](const std::vector<std::pair<double, double>>& pts, std::size_t raters) {
    std::vector<wc::BoundaryPoint> in;
    for (auto [s, l] : pts) in.push_back({s, l});
    std::vector<std::pair<double, double>> out;
    for (const auto& p : wc::lower_boundary(in, raters)) out.emplace_back(p.mos_norm, p.lambda_norm);
    return out;
  }, py::arg("points"), py::arg("raters") = 5);
  m.def("fit_k", [](const std::vector<std::pair<double, double>>& pts) {
    std::vector<wc::BoundaryPoint> in;
    for (auto [s, l] : pts) in.push_back({s, l});
    const auto fit = wc::fit_k(in);
    return py::make_tuple(fit.k, fit.rmse);
  }, py::arg("boundary"));
  m.def("fit_lower_bound_csv", [](const std::string& path, const std::string& image, const std::string& metric,
                                  const std::string& space) {
    const auto out = wc::fit_lower_bound_from_ratings(wc::read_ratings_csv(path), image, wc::parse_metric(metric),
                                                      wc::parse_color_space(space));
    return json_text(wc::to_json(out.fit));
  }, py::arg("path"), py::arg("image"), py::arg("metric"), py::arg("space"));

  m.def("train_csv", [](const std::string& path, const std::string& kind) {
    const auto groups = wc::read_training_csv(path);
    if (groups.size() != 1) throw py::value_error("training file must hold exactly one space/metric group");
    return json_text(wc::to_json(wc::train(groups.front(), wc::parse_regressor_kind(kind))));
  }, py::arg("path"), py::arg("kind") = "linear");
  m.def("cross_validate_csv", [](const std::string& path, const std::string& kind, std::size_t folds, std::uint64_t seed) {
    const auto groups = wc::read_training_csv(path);
    if (groups.size() != 1) throw py::value_error("training file must hold exactly one space/metric group");
    return json_text(wc::to_json(wc::cross_validate(groups.front(), wc::parse_regressor_kind(kind), folds, seed)));
  }, py::arg("path"), py::arg("kind") = "linear", py::arg("folds") = 5, py::arg("seed") = 0);
  m.def("predict_k", [](const std::string& predictor_json, std::array<double, 4> features) {
    const auto p = wc::predictor_from_json(wc::parse_json(predictor_json, "predictor"));
    const auto k = wc::predict_k(p, wc::FeatureVector::from_array(features));
    return py::make_tuple(k.k, k.raw, k.clamped);
  }, py::arg("predictor_json"), py::arg("features"));
}
