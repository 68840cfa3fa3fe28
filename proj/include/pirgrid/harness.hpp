#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pirgrid/net.hpp"

namespace pirgrid {

// One sweep description, parsed from a flat key = value plan file.
struct ExperimentPlan {
  Protocol protocol = Protocol::kChor;
  size_t n = 3;
  size_t t = 1;
  std::vector<uint64_t> rows;            // r sweep
  uint32_t block_bytes = 560;
  // Each entry is "<profile>@<count>": the profile applied to the first
  // <count> servers ("none" applies to zero).
  std::vector<std::string> faults = {"none"};
  uint32_t trials = 1;
  uint64_t seed = 1;
  uint32_t deadline_ms = 5000;
  std::vector<ServerEndpoint> servers;   // empty = spawn locally

  void validate() const;
  static ExperimentPlan parse_file(const std::string& path);
  static ExperimentPlan parse_text(const std::string& text);
};

inline constexpr int kCsvSchemaVersion = 1;

// Column names of the CSV emitted by run_plan, in order.
std::string csv_header();

// Runs every (r, fault) point of the plan and streams one CSV row per
// point. Protocol-level quantities (bytes, successes, verdicts) are
// deterministic under the plan seed; timing fields are not.
void run_plan(const ExperimentPlan& plan, std::ostream& csv_out);

struct Table0Params {
  uint64_t record_count = 1000000;  // r
  uint32_t block_bytes = 560;       // b
  size_t n = 6;
  size_t k = 6;
  uint32_t word_bits = 8;           // w
};

struct Table0Report {
  uint64_t chor_bits = 0;
  uint64_t chor_bytes = 0;
  uint64_t goldberg_bits = 0;
  uint64_t goldberg_bytes = 0;
  // Published reference figures for the same parameters.
  uint64_t published_chor_kb = 753;
  uint64_t published_goldberg_kb = 6000;
};

// Closed-form protocol-byte accounting; no matrix is materialized.
Table0Report account_table0(const Table0Params& params);

}  // namespace pirgrid
