#pragma once

// Media catalog: deterministic ingestion of image corpora from one or more
// root directories.
//
// Ingestion rules (applied identically at scan and load time):
//  - RGB images are converted to luma: round(0.299 R + 0.587 G + 0.114 B).
//  - Dimensions are center-cropped down to the nearest multiples of 8
//    (the excess is split evenly, the extra pixel going to the right/bottom).
//  - Images smaller than 16x16 after cropping are rejected.
//
// origin_id is the path relative to the containing root, with '/' separators,
// so a catalog is stable across machines.

#include <filesystem>
#include <string>
#include <vector>

#include "wmbench/types.hpp"

namespace wmbench {

struct MediaEntry {
  std::string origin_id;
  std::filesystem::path file;
  int width = 0;   // post-ingestion dimensions (after cropping)
  int height = 0;
  MediaKind media_kind = MediaKind::GrayscaleImage;
};

class MediaCatalog {
 public:
  MediaCatalog() = default;

  // Walks every root recursively, ingests decodable media files, and returns
  // the catalog sorted by origin_id. Unreadable roots, undecodable files and
  // too-small images are skipped with a warning; a duplicate origin_id from
  // a later root shadows the earlier entry (also with a warning).
  static MediaCatalog scan(const std::vector<std::filesystem::path>& roots,
                           std::vector<std::string>* warnings = nullptr);

  const std::vector<MediaEntry>& entries() const { return entries_; }
  bool contains(const std::string& origin_id) const;
  const MediaEntry& entry(const std::string& origin_id) const;

  // Decodes, converts and crops the identified work. Throws MediaError for
  // unknown ids, CodecError when the file no longer decodes.
  Work load(const std::string& origin_id) const;

  // Catalog as a JSON document (root paths + entries), for inspection.
  std::string to_json() const;

  // Expands a selector into matching origin_ids, in catalog order. A
  // selector is either an exact origin_id or a glob with '*' wildcards
  // (e.g. "corpus/*.pgm"). Unknown exact ids / match-less globs yield empty.
  std::vector<std::string> select(const std::string& selector) const;

 private:
  std::vector<std::filesystem::path> roots_;
  std::vector<MediaEntry> entries_;
};

// Shared ingestion helpers (also used directly by tests).
uint8_t rgb_to_luma(uint8_t r, uint8_t g, uint8_t b);
Work ingest_buffer(int width, int height, int channels,
                   const std::vector<uint8_t>& samples,
                   const std::string& origin_id);

}  // namespace wmbench
