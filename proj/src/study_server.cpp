#include "wattcolor/study_server.hpp"

#include <httplib.h>

#include <fstream>
#include <mutex>
#include <random>

#include "shuffle.hpp"
#include "wattcolor/csv.hpp"
#include "wattcolor/errors.hpp"
#include "wattcolor/png_io.hpp"
#include "wattcolor/serialization.hpp"

namespace wattcolor {

namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html><title>wattcolor study</title>"
    "<p>No harness assets configured. The rating API is under <code>/api/</code>.</p>\n";

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void json_reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error_reply(httplib::Response& res, int status, const std::string& message) {
  json_reply(res, status, Json{{"error", message}});
}

}  // namespace

StudyManifest load_study_manifest(const std::filesystem::path& path) {
  const Json j = load_json(path);
  const std::filesystem::path base = path.parent_path();
  const auto fail = [&](const std::string& what) { return MalformedDataError(path.string() + ": " + what); };
  if (!j.is_object()) throw fail("manifest must be a JSON object");

  StudyManifest m;
  if (!j.contains("model") || !j["model"].is_string()) throw fail("missing string field 'model'");
  m.model_path = resolve(base, j["model"].get<std::string>());

  if (!j.contains("images") || !j["images"].is_array() || j["images"].empty()) throw fail("'images' must be a non-empty array");
  for (const auto& e : j["images"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("path") || !e["id"].is_string() || !e["path"].is_string()) {
      throw fail("each image needs string 'id' and 'path'");
    }
    const std::string id = e["id"].get<std::string>();
    if (id.empty() || id.find(',') != std::string::npos) throw fail("image id '" + id + "' is empty or holds a comma");
    for (const auto& prior : m.images) {
      if (prior.id == id) throw fail("duplicate image id '" + id + "'");
    }
    m.images.push_back({id, resolve(base, e["path"].get<std::string>())});
  }

  if (!j.contains("configs") || !j["configs"].is_array() || j["configs"].empty()) throw fail("'configs' must be a non-empty array");
  for (const auto& e : j["configs"]) {
    try {
      if (!e.is_object() || !e.contains("metric") || !e.contains("space")) throw ConfigError("each config needs 'metric' and 'space'");
      StudyConfig c;
      c.metric = parse_metric(e["metric"].get<std::string>());
      c.space = parse_color_space(e["space"].get<std::string>());
      if (c.space != ColorSpace::SRGB && c.space != ColorSpace::LAB && c.space != ColorSpace::UVW) {
        throw ConfigError("transform space must be srgb, lab or uvw");
      }
      m.configs.push_back(c);
    } catch (const ConfigError& e) {
      throw fail(e.what());
    } catch (const Json::exception& e) {
      throw fail(e.what());
    }
  }

  if (j.contains("lambda_grid")) {
    if (!j["lambda_grid"].is_array() || j["lambda_grid"].empty()) throw fail("'lambda_grid' must be a non-empty array");
    for (const auto& v : j["lambda_grid"]) {
      if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) throw fail("lambda_grid values must lie in [0,1]");
      m.lambda_grid.push_back(v.get<double>());
    }
  } else {
    m.lambda_grid = study_lambda_grid();
  }
  if (j.contains("lambda_scale")) {
    try {
      m.lambda_scale = parse_lambda_scale(j["lambda_scale"].get<std::string>());
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }
  if (j.contains("batch_size")) {
    if (!j["batch_size"].is_number_unsigned() || j["batch_size"].get<std::size_t>() == 0) {
      throw fail("'batch_size' must be a positive integer");
    }
    m.batch_size = j["batch_size"].get<std::size_t>();
  }
  return m;
}

std::vector<std::vector<StudyItem>> build_batches(const StudyManifest& manifest, std::uint64_t seed) {
  if (manifest.batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<StudyItem> items;
  for (std::size_t i = 0; i < manifest.images.size(); ++i) {
    for (const auto& c : manifest.configs) {
      for (double l : manifest.lambda_grid) items.push_back({i, c, l, ControlKind::None});
    }
  }
  detail::seeded_shuffle(items, seed);
  std::vector<std::vector<StudyItem>> batches;
  for (std::size_t start = 0; start < items.size(); start += manifest.batch_size) {
    const std::size_t end = std::min(items.size(), start + manifest.batch_size);
    batches.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(start), items.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<SessionPair> build_session_pairs(const std::vector<StudyItem>& batch, std::uint64_t seed) {
  if (batch.empty()) throw ConfigError("cannot build a session from an empty batch");
  // Offset so the control draws are not correlated with the batch shuffle.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t total = batch.size() + 2;

  StudyItem identical = batch[rng() % batch.size()];
  identical.control = ControlKind::Identical;
  StudyItem black = batch[rng() % batch.size()];
  black.control = ControlKind::Black;

  const std::size_t pos_identical = rng() % total;
  std::size_t pos_black = rng() % (total - 1);
  if (pos_black >= pos_identical) ++pos_black;

  std::vector<SessionPair> out;
  out.reserve(total);
  std::size_t next = 0;
  for (std::size_t i = 0; i < total; ++i) {
    SessionPair p;
    if (i == pos_identical) p.item = identical;
    else if (i == pos_black) p.item = black;
    else p.item = batch[next++];
    p.original_left = (rng() & 1U) == 0;
    out.push_back(p);
  }
  return out;
}

struct StudyServer::Impl {
  StudyManifest manifest;
  SessionOptions options;
  PowerModel model;
  std::vector<SessionPair> pairs;
  httplib::Server http;

  std::mutex image_mutex;
  std::vector<std::optional<ImageBuffer>> originals;
  std::vector<std::optional<std::string>> original_png;
  std::vector<std::optional<std::string>> transformed_png;

  // Single writer for the ratings file and the scored flags.
  mutable std::mutex score_mutex;
  std::vector<std::optional<int>> scores;
  std::size_t rows_written = 0;

  Impl(StudyManifest m, SessionOptions o)
      : manifest(std::move(m)), options(std::move(o)), model(power_model_from_json(load_json(manifest.model_path))) {
    if (model.space() != ColorSpace::SRGB) throw ConfigError("study power model must be an sRGB model");
    const auto batches = build_batches(manifest, options.seed);
    if (options.batch_index >= batches.size()) {
      throw ConfigError("batch index " + std::to_string(options.batch_index) + " out of range; manifest has " +
                        std::to_string(batches.size()) + " batches");
    }
    if (options.participant.empty() || options.participant.find(',') != std::string::npos) {
      throw ConfigError("participant id must be non-empty and free of commas");
    }
    for (const auto& img : manifest.images) {
      if (!std::filesystem::exists(img.path)) throw InputError("missing study image '" + img.path.string() + "'");
    }
    pairs = build_session_pairs(batches[options.batch_index], options.seed);
    originals.resize(manifest.images.size());
    original_png.resize(manifest.images.size());
    transformed_png.resize(pairs.size());
    scores.resize(pairs.size());
    prepare_ratings_file();
    routes();
  }

  std::string batch_id() const { return "b" + std::to_string(options.batch_index); }

  void prepare_ratings_file() {
    const auto& path = options.ratings_csv;
    if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
      std::ifstream in(path);
      std::string first;
      std::getline(in, first);
      if (!first.empty() && first.back() == '\r') first.pop_back();
      if (first != ratings_csv_header()) {
        throw ConfigError("'" + path.string() + "' exists but does not start with the ratings header");
      }
      return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << ratings_csv_header() << '\n';
  }

  const ImageBuffer& original(std::size_t image) {
    if (!originals[image]) originals[image] = read_png(manifest.images[image].path);
    return *originals[image];
  }

  std::string original_bytes(std::size_t pair) {
    std::lock_guard lock(image_mutex);
    const std::size_t image = pairs[pair].item.image;
    if (!original_png[image]) {
      const auto bytes = encode_png(original(image));
      original_png[image] = std::string(bytes.begin(), bytes.end());
    }
    return *original_png[image];
  }

  std::string transformed_bytes(std::size_t pair) {
    std::lock_guard lock(image_mutex);
    if (!transformed_png[pair]) {
      const StudyItem& item = pairs[pair].item;
      const ImageBuffer& src = original(item.image);
      ImageBuffer out;
      switch (item.control) {
        case ControlKind::Identical: out = src; break;
        case ControlKind::Black: out = ImageBuffer::filled(src.width(), src.height(), ColorSpace::SRGB, {0.0, 0.0, 0.0}); break;
        case ControlKind::None: {
          TransformConfig cfg;
          cfg.metric = item.config.metric;
          cfg.space = item.config.space;
          cfg.lambda_norm = item.lambda_norm;
          cfg.scale = manifest.lambda_scale;
          out = apply(cfg, model, src).output;
          break;
        }
      }
      const auto bytes = encode_png(out);
      transformed_png[pair] = std::string(bytes.begin(), bytes.end());
    }
    return *transformed_png[pair];
  }

  Json session_json() const {
    std::lock_guard lock(score_mutex);
    Json list = Json::array();
    std::size_t scored = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      list.push_back({{"index", i}, {"original_left", pairs[i].original_left}, {"scored", scores[i].has_value()}});
      if (scores[i]) ++scored;
    }
    return {{"participant", options.participant}, {"batch", batch_id()},   {"seed", options.seed},
            {"total", pairs.size()},              {"scored", scored},      {"rows_written", rows_written},
            {"complete", scored == pairs.size()}, {"pairs", list}};
  }

  // Returns the HTTP status.
  int score(std::size_t pair, int value, std::string& message) {
    if (pair >= pairs.size()) {
      message = "pair index out of range";
      return 400;
    }
    if (value < 1 || value > 5) {
      message = "score must be an integer from 1 to 5";
      return 400;
    }
    std::lock_guard lock(score_mutex);
    if (scores[pair]) {
      message = "pair " + std::to_string(pair) + " already scored";
      return 409;
    }
    const StudyItem& item = pairs[pair].item;
    RatingRecord r;
    r.participant = options.participant;
    r.batch = batch_id();
    r.image = manifest.images[item.image].id;
    r.metric = item.config.metric;
    r.space = item.config.space;
    r.lambda_norm = item.lambda_norm;
    r.score = value;
    r.control = item.control;
    std::ofstream out(options.ratings_csv, std::ios::binary | std::ios::app);
    out << to_csv_row(r) << '\n';
    out.flush();
    if (!out) {
      message = "could not append to the ratings file";
      return 500;
    }
    scores[pair] = value;
    ++rows_written;
    return 200;
  }

  void routes() {
    http.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) { json_reply(res, 200, session_json()); });

    http.Get(R"(/api/pair/(\d+)/(original|transformed))", [this](const httplib::Request& req, httplib::Response& res) {
      std::size_t index = 0;
      try {
        index = std::stoul(req.matches[1].str());
      } catch (const std::exception&) {
        return error_reply(res, 400, "bad pair index");
      }
      if (index >= pairs.size()) return error_reply(res, 404, "no such pair");
      try {
        std::string body = req.matches[2].str() == "original" ? original_bytes(index) : transformed_bytes(index);
        res.set_content(std::move(body), "image/png");
      } catch (const std::exception& e) {
        error_reply(res, 500, e.what());
      }
    });

    http.Post("/api/score", [this](const httplib::Request& req, httplib::Response& res) {
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const Json::exception&) {
        return error_reply(res, 400, "body must be JSON");
      }
      if (!body.is_object() || !body.contains("pair") || !body.contains("score") || !body["pair"].is_number_integer() ||
          !body["score"].is_number_integer()) {
        return error_reply(res, 400, "expected {\"pair\": <int>, \"score\": <int>}");
      }
      const auto pair = body["pair"].get<std::int64_t>();
      const auto value = body["score"].get<std::int64_t>();
      if (pair < 0) return error_reply(res, 400, "pair index out of range");
      std::string message;
      const int clamped = static_cast<int>(std::clamp<std::int64_t>(value, 0, 6));
      const int status = score(static_cast<std::size_t>(pair), clamped, message);
      if (status != 200) return error_reply(res, status, message);
      const Json s = session_json();
      json_reply(res, 200, {{"ok", true}, {"rows_written", s["rows_written"]}, {"complete", s["complete"]}});
    });

    if (options.static_dir) {
      if (!http.set_mount_point("/", options.static_dir->string())) {
        throw InputError("cannot serve static assets from '" + options.static_dir->string() + "'");
      }
    } else {
      http.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kPlaceholderPage, "text/html"); });
    }
  }
};

StudyServer::StudyServer(StudyManifest manifest, SessionOptions options)
    : impl_(std::make_unique<Impl>(std::move(manifest), std::move(options))) {}

StudyServer::~StudyServer() = default;

const std::vector<SessionPair>& StudyServer::pairs() const { return impl_->pairs; }
std::string StudyServer::batch_id() const { return impl_->batch_id(); }

std::size_t StudyServer::scored_count() const {
  std::lock_guard lock(impl_->score_mutex);
  return impl_->rows_written;
}

bool StudyServer::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }
int StudyServer::bind_to_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool StudyServer::listen_after_bind() { return impl_->http.listen_after_bind(); }
void StudyServer::wait_until_ready() const { impl_->http.wait_until_ready(); }
void StudyServer::stop() { impl_->http.stop(); }

}  // namespace wattcolor
