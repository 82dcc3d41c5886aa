// Writes every synthetic album under <outdir>/<album id>/.

#include <iostream>

#include "fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: photoscout-fixtures <outdir>\n";
    return 2;
  }
  try {
    for (const auto& album : photoscout::fixtures::all()) {
      photoscout::fixtures::write_album(album, std::filesystem::path(argv[1]) / album.id);
      std::cout << album.id << ": " << album.images.size() << " images\n";
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
