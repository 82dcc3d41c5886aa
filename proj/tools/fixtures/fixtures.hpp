#pragma once

// Synthetic annotated albums used by the tests, the acceptance suite and the
// demo. Every album is a pure function of a fixed seed.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "photoscout/annotations.hpp"

namespace photoscout::fixtures {

struct FixtureAlbum {
  std::string id;
  std::vector<annotations::ImageAnnotation> images;
  // Images the album was built to match, for the album's headline query.
  std::vector<std::string> ground_truth;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
  // image id -> construction category, where the generator has one.
  std::map<std::string, std::string> categories;

  annotations::Album album(annotations::AlbumConfig config = {}) const;
};

// Four wedding photos: in 1-3 the bride (cluster c01) stands next to the groom
// (c02) holding a bouquet; in 4 the only flowers are the groom's boutonniere.
FixtureAlbum fig1();

// Group photos for "every face is smiling and above a flower".
FixtureAlbum fig6();

// Four street scenes with cars and bicycles.
FixtureAlbum transportation();

// 352 wedding photos. Ground truth: the bride next to the groom with a flower
// below her face.
FixtureAlbum wedding();

// 400 festival photos with singers (a person box containing a microphone).
FixtureAlbum festival();

std::vector<FixtureAlbum> all();

// Writes one annotation file per image plus ground_truth.txt and
// examples.txt ("pos <id>" / "neg <id>" lines).
void write_album(const FixtureAlbum& album, const std::filesystem::path& dir);

}  // namespace photoscout::fixtures
