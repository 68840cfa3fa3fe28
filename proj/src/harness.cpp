#include "pirgrid/harness.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

namespace pirgrid {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct FaultSpec {
  FaultProfile profile;
  size_t count = 0;
};

FaultSpec parse_fault_entry(const std::string& entry) {
  FaultSpec spec;
  std::string profile_text = entry;
  size_t at = entry.rfind('@');
  if (at != std::string::npos) {
    profile_text = entry.substr(0, at);
    spec.count = std::stoul(entry.substr(at + 1));
  } else if (entry != "none") {
    spec.count = 1;
  }
  spec.profile = FaultProfile::parse(profile_text);
  return spec;
}

int64_t percentile(std::vector<int64_t> values, double p) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  size_t idx = static_cast<size_t>(p * (values.size() - 1) + 0.5);
  return values[idx];
}

int64_t mean(const std::vector<int64_t>& values) {
  if (values.empty()) return 0;
  int64_t sum = 0;
  for (int64_t v : values) sum += v;
  return sum / static_cast<int64_t>(values.size());
}

}  // namespace

void ExperimentPlan::validate() const {
  if (trials < 1) throw PlanError("trials must be >= 1");
  if (rows.empty()) throw PlanError("rows sweep must be non-empty");
  if (faults.empty()) throw PlanError("fault sweep must be non-empty");
  if (n < 2) throw PlanError("n must be >= 2");
  if (protocol == Protocol::kGoldberg && (t < 1 || t >= n))
    throw PlanError("goldberg needs 1 <= t < n");
  for (const auto& f : faults) parse_fault_entry(f);
}

ExperimentPlan ExperimentPlan::parse_text(const std::string& text) {
  ExperimentPlan plan;
  plan.faults.clear();
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw PlanError("plan line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "protocol") {
      if (value == "chor")
        plan.protocol = Protocol::kChor;
      else if (value == "goldberg")
        plan.protocol = Protocol::kGoldberg;
      else
        throw PlanError("unknown protocol: " + value);
    } else if (key == "n") {
      plan.n = std::stoul(value);
    } else if (key == "t") {
      plan.t = std::stoul(value);
    } else if (key == "rows") {
      for (const auto& r : split(value, ',')) plan.rows.push_back(std::stoull(r));
    } else if (key == "block_bytes") {
      plan.block_bytes = static_cast<uint32_t>(std::stoul(value));
    } else if (key == "faults") {
      plan.faults = split(value, ',');
    } else if (key == "trials") {
      plan.trials = static_cast<uint32_t>(std::stoul(value));
    } else if (key == "seed") {
      plan.seed = std::stoull(value);
    } else if (key == "deadline_ms") {
      plan.deadline_ms = static_cast<uint32_t>(std::stoul(value));
    } else if (key == "servers") {
      uint32_t id = 0;
      for (const auto& hp : split(value, ',')) {
        size_t colon = hp.rfind(':');
        if (colon == std::string::npos) throw PlanError("server entry needs host:port");
        ServerEndpoint ep;
        ep.server_id = id;
        ep.host = hp.substr(0, colon);
        ep.port = static_cast<uint16_t>(std::stoul(hp.substr(colon + 1)));
        ep.alpha = goldberg_alpha_for_server(id);
        plan.servers.push_back(ep);
        ++id;
      }
    } else {
      throw PlanError("unknown plan key: " + key);
    }
  }
  if (plan.faults.empty()) plan.faults = {"none"};
  plan.validate();
  return plan;
}

ExperimentPlan ExperimentPlan::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlanError("cannot open plan file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::string csv_header() {
  return "schema_version,protocol,n,t,r,block_bytes,fault,fault_count,trials,"
         "successes,failures,byzantine_flagged,protocol_bits_up,protocol_bits_down,"
         "wire_bytes_up,wire_bytes_down,build_us_mean,recovery_us_mean,"
         "recovery_us_p50,recovery_us_p95,elapsed_us_mean,elapsed_us_p50,"
         "elapsed_us_p95";
}

void run_plan(const ExperimentPlan& plan, std::ostream& csv_out) {
  plan.validate();
  csv_out << csv_header() << "\n";

  const bool local = plan.servers.empty();

  for (uint64_t r : plan.rows) {
    DbGeometry geo;
    geo.record_count = r;
    geo.block_bytes = plan.block_bytes;
    geo.grid_x = static_cast<uint32_t>(r);
    geo.grid_y = 1;
    geo.channel_count = 1;
    geo.time_slots = 1;

    std::shared_ptr<const DatabaseMatrix> db;
    if (local) db = std::make_shared<const DatabaseMatrix>(generate_synthetic(geo, plan.seed));

    for (size_t fi = 0; fi < plan.faults.size(); ++fi) {
      FaultSpec fault = parse_fault_entry(plan.faults[fi]);
      if (fault.count > plan.n) throw PlanError("fault count exceeds n");
      if (!local && fault.count > 0)
        throw PlanError("fault injection requires locally spawned servers");

      std::vector<std::unique_ptr<PirServer>> servers;
      std::vector<ServerEndpoint> endpoints = plan.servers;
      if (local) {
        for (size_t i = 0; i < plan.n; ++i) {
          ServerConfig cfg;
          cfg.db = db;
          cfg.fault = i < fault.count ? fault.profile : FaultProfile{};
          cfg.seed = plan.seed + i;
          servers.push_back(std::make_unique<PirServer>(cfg));
          servers.back()->start();
          ServerEndpoint ep;
          ep.server_id = static_cast<uint32_t>(i);
          ep.host = "127.0.0.1";
          ep.port = servers.back()->port();
          ep.alpha = goldberg_alpha_for_server(i);
          endpoints.push_back(ep);
        }
      }
      if (endpoints.empty()) throw PlanAborted("no endpoints available");

      uint32_t successes = 0, failures = 0;
      uint64_t byz_flagged = 0;
      uint64_t bits_up = 0, bits_down = 0, wire_up = 0, wire_down = 0;
      std::vector<int64_t> build_us, recovery_us, elapsed_us;

      for (uint32_t trial = 0; trial < plan.trials; ++trial) {
        DeterministicRandom rng(plan.seed ^ (r * 0x9e3779b9ULL) ^ (fi * 0x85ebca6bULL) ^
                                trial);
        SpectrumKey key;
        key.x = static_cast<uint32_t>(rng.below(geo.grid_x));
        try {
          auto result = private_fetch(key, endpoints, plan.protocol, plan.t,
                                      std::chrono::milliseconds(plan.deadline_ms), rng);
          ++successes;
          byz_flagged += result.report.byzantine_ids.size();
          bits_up = result.metrics.protocol_bits_up;
          bits_down = result.metrics.protocol_bits_down;
          wire_up += result.metrics.wire_bytes_up;
          wire_down += result.metrics.wire_bytes_down;
          build_us.push_back(result.metrics.build_us);
          recovery_us.push_back(result.metrics.recovery_us);
          elapsed_us.push_back(result.metrics.elapsed_us);
        } catch (const PirError&) {
          ++failures;
        }
      }

      for (auto& s : servers) s->stop();

      csv_out << kCsvSchemaVersion << ','
              << (plan.protocol == Protocol::kChor ? "chor" : "goldberg") << ','
              << plan.n << ',' << plan.t << ',' << r << ',' << plan.block_bytes << ','
              << fault.profile.to_string() << ',' << fault.count << ',' << plan.trials
              << ',' << successes << ',' << failures << ',' << byz_flagged << ','
              << bits_up << ',' << bits_down << ',' << wire_up << ',' << wire_down << ','
              << mean(build_us) << ',' << mean(recovery_us) << ','
              << percentile(recovery_us, 0.5) << ',' << percentile(recovery_us, 0.95)
              << ',' << mean(elapsed_us) << ',' << percentile(elapsed_us, 0.5) << ','
              << percentile(elapsed_us, 0.95) << "\n";
      csv_out.flush();
    }
  }
}

Table0Report account_table0(const Table0Params& params) {
  if (params.n < 2) throw NeedMultipleServers("multi-server accounting needs n >= 2");
  if (params.k < 1 || params.k > params.n) throw PlanError("need 1 <= k <= n");

  Table0Report report;
  uint64_t r = params.record_count;
  uint64_t block_bits = uint64_t{params.block_bytes} * 8;
  report.chor_bits = (r + block_bits) * params.n;
  report.chor_bytes = report.chor_bits / 8;
  report.goldberg_bits = r * params.word_bits * params.n + params.k * block_bits;
  report.goldberg_bytes = report.goldberg_bits / 8;
  return report;
}

}  // namespace pirgrid
