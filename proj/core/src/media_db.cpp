#include "wmbench/media_db.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "wmbench/image_io.hpp"

namespace wmbench {

uint8_t rgb_to_luma(uint8_t r, uint8_t g, uint8_t b) {
  double y = 0.299 * r + 0.587 * g + 0.114 * b;
  long v = std::lround(y);
  if (v < 0) v = 0;
  if (v > 255) v = 255;
  return uint8_t(v);
}

Work ingest_buffer(int width, int height, int channels,
                   const std::vector<uint8_t>& samples,
                   const std::string& origin_id) {
  if (channels != 1 && channels != 3)
    throw MediaError("unsupported channel count for '" + origin_id + "'");
  if (samples.size() != size_t(width) * height * channels)
    throw MediaError("sample buffer size mismatch for '" + origin_id + "'");

  // Luma conversion first, then the center crop.
  std::vector<uint8_t> gray;
  if (channels == 1) {
    gray = samples;
  } else {
    gray.resize(size_t(width) * height);
    for (size_t i = 0; i < gray.size(); ++i)
      gray[i] = rgb_to_luma(samples[3 * i], samples[3 * i + 1],
                            samples[3 * i + 2]);
  }

  int cw = width - width % 8;
  int ch = height - height % 8;
  if (cw < 16 || ch < 16)
    throw MediaError("image '" + origin_id +
                     "' is smaller than 16x16 after cropping to the 8x8 grid");

  int off_x = (width - cw) / 2;   // extra pixel (odd excess) drops on the
  int off_y = (height - ch) / 2;  // right/bottom side
  std::vector<uint8_t> cropped(size_t(cw) * ch);
  for (int y = 0; y < ch; ++y)
    std::copy_n(gray.data() + size_t(y + off_y) * width + off_x, cw,
                cropped.data() + size_t(y) * cw);
  return Work(cw, ch, std::move(cropped), origin_id);
}

namespace {

Work ingest_file(const std::filesystem::path& file,
                 const std::string& origin_id) {
  ImageBuffer buffer = read_image(file);
  return ingest_buffer(buffer.width, buffer.height, buffer.channels,
                       buffer.samples, origin_id);
}

std::string relative_id(const std::filesystem::path& file,
                        const std::filesystem::path& root) {
  std::string id = file.lexically_relative(root).generic_string();
  return id;
}

}  // namespace

MediaCatalog MediaCatalog::scan(const std::vector<std::filesystem::path>& roots,
                                std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& message) {
    if (warnings) warnings->push_back(message);
  };

  MediaCatalog catalog;
  catalog.roots_ = roots;
  std::map<std::string, MediaEntry> by_id;

  for (const auto& root : roots) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) {
      warn("media root '" + root.string() + "' is not a readable directory");
      continue;
    }
    // Collect candidate files first so ingestion order is deterministic.
    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(
             root, std::filesystem::directory_options::skip_permission_denied,
             ec);
         it != std::filesystem::recursive_directory_iterator();
         it.increment(ec)) {
      if (ec) break;
      if (it->is_regular_file(ec) && has_supported_extension(it->path()))
        files.push_back(it->path());
    }
    std::sort(files.begin(), files.end(),
              [&](const auto& a, const auto& b) {
                return relative_id(a, root) < relative_id(b, root);
              });

    for (const auto& file : files) {
      std::string id = relative_id(file, root);
      MediaEntry entry;
      entry.origin_id = id;
      entry.file = file;
      try {
        Work work = ingest_file(file, id);
        entry.width = work.width();
        entry.height = work.height();
      } catch (const Error& e) {
        warn("skipping '" + file.string() + "': " + e.what());
        continue;
      }
      auto it = by_id.find(id);
      if (it != by_id.end()) {
        warn("media id '" + id + "' from '" + it->second.file.string() +
             "' is shadowed by '" + file.string() + "'");
        it->second = entry;
      } else {
        by_id.emplace(id, entry);
      }
    }
  }

  catalog.entries_.reserve(by_id.size());
  for (auto& [id, entry] : by_id) catalog.entries_.push_back(std::move(entry));
  return catalog;
}

bool MediaCatalog::contains(const std::string& origin_id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const MediaEntry& e) { return e.origin_id == origin_id; });
}

const MediaEntry& MediaCatalog::entry(const std::string& origin_id) const {
  for (const MediaEntry& e : entries_)
    if (e.origin_id == origin_id) return e;
  throw MediaError("unknown media id '" + origin_id + "'");
}

Work MediaCatalog::load(const std::string& origin_id) const {
  const MediaEntry& e = entry(origin_id);
  return ingest_file(e.file, e.origin_id);
}

std::string MediaCatalog::to_json() const {
  nlohmann::ordered_json doc;
  doc["root_paths"] = nlohmann::ordered_json::array();
  for (const auto& root : roots_) doc["root_paths"].push_back(root.string());
  doc["entries"] = nlohmann::ordered_json::array();
  for (const MediaEntry& e : entries_) {
    nlohmann::ordered_json entry;
    entry["origin_id"] = e.origin_id;
    entry["path"] = e.file.string();
    entry["width"] = e.width;
    entry["height"] = e.height;
    entry["media_kind"] = to_string(e.media_kind);
    doc["entries"].push_back(std::move(entry));
  }
  return doc.dump(2);
}

namespace {

// Glob match with '*' (any run of characters, including '/') and '?'.
bool glob_match(const std::string& pattern, const std::string& text) {
  size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() &&
        (pattern[p] == text[t] || pattern[p] == '?')) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

std::vector<std::string> MediaCatalog::select(const std::string& selector) const {
  std::vector<std::string> ids;
  bool is_glob = selector.find('*') != std::string::npos ||
                 selector.find('?') != std::string::npos;
  for (const MediaEntry& e : entries_) {
    if (is_glob ? glob_match(selector, e.origin_id)
                : e.origin_id == selector)
      ids.push_back(e.origin_id);
  }
  return ids;
}

}  // namespace wmbench
