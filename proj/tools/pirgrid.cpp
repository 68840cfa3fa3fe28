#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pirgrid/harness.hpp"
#include "pirgrid/net.hpp"

using namespace pirgrid;

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

std::vector<ServerEndpoint> parse_endpoints(const std::string& spec) {
  std::vector<ServerEndpoint> endpoints;
  size_t start = 0;
  uint32_t id = 0;
  while (start <= spec.size()) {
    size_t comma = spec.find(',', start);
    std::string item =
        spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      size_t colon = item.rfind(':');
      if (colon == std::string::npos)
        throw PirError("endpoint needs host:port, got " + item);
      ServerEndpoint ep;
      ep.server_id = id;
      ep.host = item.substr(0, colon);
      ep.port = static_cast<uint16_t>(std::stoul(item.substr(colon + 1)));
      ep.alpha = goldberg_alpha_for_server(id);
      endpoints.push_back(ep);
      ++id;
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return endpoints;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-server private information retrieval toolkit"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "run one replica server");
  std::string db_path, listen = "127.0.0.1:7100", fault = "none";
  uint64_t serve_seed = 0;
  serve->add_option("--db", db_path, "SPDB database file")->required();
  serve->add_option("--listen", listen, "host:port to listen on");
  serve->add_option("--fault", fault,
                    "none | drop:<p> | delay:<ms> | byzantine:flip-bytes:<n> | "
                    "byzantine:random-block | byzantine:stale-db:<path>");
  serve->add_option("--seed", serve_seed, "fault determinism seed");

  auto* fetch = app.add_subcommand("fetch", "privately fetch one record");
  std::string servers, proto = "chor";
  size_t t = 0;
  uint32_t x = 0, y = 0, channel = 0, slot = 0, deadline_ms = 5000;
  fetch->add_option("--servers", servers, "comma list of host:port")->required();
  fetch->add_option("--proto", proto, "chor | goldberg");
  fetch->add_option("--t", t, "privacy level (goldberg); default floor((n-1)/2)");
  fetch->add_option("--x", x, "latitude cell");
  fetch->add_option("--y", y, "longitude cell");
  fetch->add_option("--channel", channel, "channel index");
  fetch->add_option("--slot", slot, "time slot index");
  fetch->add_option("--deadline-ms", deadline_ms, "response deadline");

  auto* bench = app.add_subcommand("bench", "run an experiment plan, emit CSV");
  std::string plan_path, out_path = "-";
  bench->add_option("--plan", plan_path, "plan file (key = value lines)")->required();
  bench->add_option("--out", out_path, "CSV output path, - for stdout");

  auto* account = app.add_subcommand("account-table0",
                                     "closed-form communication accounting");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      size_t colon = listen.rfind(':');
      if (colon == std::string::npos) throw PirError("--listen wants host:port");
      ServerConfig cfg;
      cfg.db = std::make_shared<const DatabaseMatrix>(load_db(db_path));
      cfg.listen_host = listen.substr(0, colon);
      cfg.port = static_cast<uint16_t>(std::stoul(listen.substr(colon + 1)));
      cfg.fault = FaultProfile::parse(fault);
      cfg.seed = serve_seed;
      PirServer server(cfg);
      server.start();
      std::printf("serving r=%llu b=%u on %s:%u fault=%s\n",
                  static_cast<unsigned long long>(cfg.db->rows()), cfg.db->block_bytes(),
                  cfg.listen_host.c_str(), server.port(), cfg.fault.to_string().c_str());
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    } else if (fetch->parsed()) {
      auto endpoints = parse_endpoints(servers);
      Protocol protocol;
      if (proto == "chor")
        protocol = Protocol::kChor;
      else if (proto == "goldberg")
        protocol = Protocol::kGoldberg;
      else
        throw PirError("unknown protocol: " + proto);

      if (protocol == Protocol::kGoldberg && t == 0) t = (endpoints.size() - 1) / 2;

      SystemRandom rng;
      SpectrumKey key{x, y, channel, slot};
      auto result = private_fetch(key, endpoints, protocol, t,
                                  std::chrono::milliseconds(deadline_ms), rng);

      std::printf("block (%zu bytes):", result.block.size());
      for (size_t i = 0; i < result.block.size() && i < 32; ++i)
        std::printf(" %02x", result.block[i]);
      if (result.block.size() > 32) std::printf(" ...");
      std::printf("\n");
      std::printf("honest:");
      for (auto id : result.report.honest_ids) std::printf(" %u", id);
      std::printf("  byzantine:");
      for (auto id : result.report.byzantine_ids) std::printf(" %u", id);
      std::printf("  absent:");
      for (auto id : result.report.absent_ids) std::printf(" %u", id);
      std::printf("\n");
      const auto& m = result.metrics;
      std::printf("protocol bits up/down: %llu/%llu  wire bytes up/down: %llu/%llu\n",
                  static_cast<unsigned long long>(m.protocol_bits_up),
                  static_cast<unsigned long long>(m.protocol_bits_down),
                  static_cast<unsigned long long>(m.wire_bytes_up),
                  static_cast<unsigned long long>(m.wire_bytes_down));
      std::printf("build %lld us, recovery %lld us, elapsed %lld us\n",
                  static_cast<long long>(m.build_us), static_cast<long long>(m.recovery_us),
                  static_cast<long long>(m.elapsed_us));
    } else if (bench->parsed()) {
      auto plan = ExperimentPlan::parse_file(plan_path);
      if (out_path == "-") {
        run_plan(plan, std::cout);
      } else {
        std::ofstream out(out_path);
        if (!out) throw PirError("cannot open " + out_path);
        run_plan(plan, out);
      }
    } else if (account->parsed()) {
      Table0Params params;
      Table0Report report = account_table0(params);
      std::printf("parameters: r=%llu b=%u B n=%zu k=%zu w=%u\n",
                  static_cast<unsigned long long>(params.record_count), params.block_bytes,
                  params.n, params.k, params.word_bits);
      std::printf("LP-Chor:     %llu bits = %llu bytes (published: %llu KB)\n",
                  static_cast<unsigned long long>(report.chor_bits),
                  static_cast<unsigned long long>(report.chor_bytes),
                  static_cast<unsigned long long>(report.published_chor_kb));
      std::printf("LP-Goldberg: %llu bits = %llu bytes (published: %llu KB)\n",
                  static_cast<unsigned long long>(report.goldberg_bits),
                  static_cast<unsigned long long>(report.goldberg_bytes),
                  static_cast<unsigned long long>(report.published_goldberg_kb));
    }
  } catch (const PirError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
