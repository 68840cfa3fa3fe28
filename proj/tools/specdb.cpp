#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "pirgrid/specdb.hpp"

using namespace pirgrid;

int main(int argc, char** argv) {
  CLI::App app{"spectrum database tool"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic database file");
  uint64_t rows = 65536;
  uint32_t block_bytes = 560;
  std::string grid = "256,256";
  uint32_t channels = 1, slots = 1;
  uint64_t seed = 1;
  std::string out_path;
  gen->add_option("--rows", rows, "record count r (must equal X*Y*channels*slots)");
  gen->add_option("--block-bytes", block_bytes, "bytes per record");
  gen->add_option("--grid", grid, "X,Y grid cell counts");
  gen->add_option("--channels", channels, "channel count");
  gen->add_option("--slots", slots, "time slot count");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output SPDB path")->required();

  auto* digest = app.add_subcommand("digest", "print the content digest of a database file");
  std::string digest_path;
  digest->add_option("path", digest_path, "SPDB file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      size_t comma = grid.find(',');
      if (comma == std::string::npos) {
        std::fprintf(stderr, "--grid wants X,Y\n");
        return 1;
      }
      DbGeometry geo;
      geo.record_count = rows;
      geo.block_bytes = block_bytes;
      geo.grid_x = static_cast<uint32_t>(std::stoul(grid.substr(0, comma)));
      geo.grid_y = static_cast<uint32_t>(std::stoul(grid.substr(comma + 1)));
      geo.channel_count = channels;
      geo.time_slots = slots;
      DatabaseMatrix db = generate_synthetic(geo, seed);
      save_db(db, out_path);
      std::printf("wrote %s: r=%llu b=%u digest=%s\n", out_path.c_str(),
                  static_cast<unsigned long long>(rows), block_bytes,
                  digest_hex(db.content_digest()).c_str());
    } else if (digest->parsed()) {
      DatabaseMatrix db = load_db(digest_path);
      std::printf("%s\n", digest_hex(db.content_digest()).c_str());
    }
  } catch (const PirError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
