#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wattcolor/power_model.hpp"
#include "wattcolor/study.hpp"
#include "wattcolor/transform.hpp"

namespace wattcolor {

struct StudyImage {
  std::string id;
  std::filesystem::path path;
};

struct StudyConfig {
  DistanceMetric metric = DistanceMetric::L22;
  ColorSpace space = ColorSpace::SRGB;
};

// study-manifest.json:
//   {
//     "model": "model.json",
//     "images": [{"id": "beach", "path": "beach.png"}, ...],
//     "configs": [{"metric": "l22", "space": "srgb"}, ...],
//     "lambda_grid": [0.05, 0.10, ...],      optional, default 0.05..1.00
//     "lambda_scale": "geometric",           optional
//     "batch_size": 20                       optional
//   }
// Relative paths resolve against the manifest's directory.
struct StudyManifest {
  std::filesystem::path model_path;
  std::vector<StudyImage> images;
  std::vector<StudyConfig> configs;
  std::vector<double> lambda_grid;
  LambdaScale lambda_scale = LambdaScale::Geometric;
  std::size_t batch_size = 20;
};

StudyManifest load_study_manifest(const std::filesystem::path& path);

struct StudyItem {
  std::size_t image = 0;  // index into StudyManifest::images
  StudyConfig config;
  double lambda_norm = 0.0;
  ControlKind control = ControlKind::None;
};

// Every (image, config, lambda) triple, shuffled with `seed` and cut into
// batches of manifest.batch_size (the last one may be shorter).
std::vector<std::vector<StudyItem>> build_batches(const StudyManifest& manifest, std::uint64_t seed);

// Batch plus one identical and one black control, each at a seeded position.
// The controls show a seeded image from the batch; the identical control
// pairs it with itself, the black control with an all-black frame. Each pair
// also gets a seeded left/right placement flag.
struct SessionPair {
  StudyItem item;
  bool original_left = true;
};

std::vector<SessionPair> build_session_pairs(const std::vector<StudyItem>& batch, std::uint64_t seed);

struct SessionOptions {
  std::size_t batch_index = 0;
  std::string participant = "anonymous";
  std::uint64_t seed = 0;
  std::filesystem::path ratings_csv = "ratings.csv";
  std::optional<std::filesystem::path> static_dir;
};

// One rating session over HTTP:
//   GET  /api/session                  descriptor and progress
//   GET  /api/pair/{i}/original        PNG
//   GET  /api/pair/{i}/transformed     PNG, rendered on first request
//   POST /api/score {"pair": i, "score": s}
// Scores outside 1-5 or unknown pairs get 400 and a second score for a pair
// gets 409; neither touches the CSV. Accepted scores append one row to the
// ratings CSV (header written when the file is new or empty).
class StudyServer {
 public:
  StudyServer(StudyManifest manifest, SessionOptions options);
  ~StudyServer();
  StudyServer(const StudyServer&) = delete;
  StudyServer& operator=(const StudyServer&) = delete;

  const std::vector<SessionPair>& pairs() const;
  std::string batch_id() const;
  std::size_t scored_count() const;

  // Blocking.
  bool listen(const std::string& host, int port);
  // For tests: bind an ephemeral port, then serve on another thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wattcolor
