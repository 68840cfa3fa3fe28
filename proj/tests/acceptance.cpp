// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Run via ctest or directly from the build directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <sstream>
#include <vector>

#include "pirgrid/chor.hpp"
#include "pirgrid/field.hpp"
#include "pirgrid/goldberg.hpp"
#include "pirgrid/harness.hpp"
#include "pirgrid/net.hpp"
#include "pirgrid/sss.hpp"

using namespace pirgrid;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

DatabaseMatrix make_db(uint64_t rows, uint32_t block_bytes, uint64_t seed) {
  DbGeometry geo;
  geo.record_count = rows;
  geo.block_bytes = block_bytes;
  geo.grid_x = static_cast<uint32_t>(rows);
  geo.grid_y = 1;
  geo.channel_count = 1;
  geo.time_slots = 1;
  return generate_synthetic(geo, seed);
}

std::vector<uint8_t> row_copy(const DatabaseMatrix& db, uint64_t j) {
  return {db.row(j).begin(), db.row(j).end()};
}

// ---- chi-square survival function -------------------------------------

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-12) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-12) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// P(X > chi2) for X ~ chi-square with df degrees of freedom.
double chi2_sf(double chi2, double df) {
  double a = df / 2.0, x = chi2 / 2.0;
  if (x <= 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

// ---- criteria ---------------------------------------------------------

void criterion1_table0() {
  auto start = Clock::now();
  Table0Params params;
  auto r = account_table0(params);
  auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  bool pass = r.chor_bytes == 753360 && r.goldberg_bytes == 6003360 &&
              r.chor_bits == 6026880 && r.goldberg_bits == 48026880 && elapsed < 1.0;
  std::ostringstream detail;
  detail << "chor=" << r.chor_bytes << "B goldberg=" << r.goldberg_bytes << "B in "
         << elapsed << "s";
  report(1, "Table 0 communication accounting", pass, detail.str());
}

void criterion2_chor_exhaustive() {
  auto db = make_db(1024, 64, 101);
  DeterministicRandom rng(201);
  bool pass = true;
  for (size_t n : {2, 3, 6}) {
    for (uint64_t beta = 0; beta < 1024 && pass; ++beta) {
      auto qs = chor_build_queries(beta, n, 1024, rng);
      std::vector<ChorResponse> responses;
      for (size_t i = 0; i < n; ++i)
        responses.push_back(
            {static_cast<uint32_t>(i), chor_respond(db, qs.shares[i]).block});
      if (chor_reconstruct(responses, n) != row_copy(db, beta)) pass = false;
    }
  }
  report(2, "LP-Chor exhaustive correctness (r=1024, n in {2,3,6})", pass);
}

void criterion3_goldberg_subsets() {
  auto db = make_db(256, 64, 102);
  DeterministicRandom rng(202);
  const size_t n = 6, t = 2;
  bool pass = true;
  std::string detail;

  for (uint64_t beta = 0; beta < 256 && pass; ++beta) {
    auto qs = goldberg_build_queries(beta, n, t, 256, rng);
    std::vector<GoldbergResponse> all;
    for (size_t i = 0; i < n; ++i)
      all.push_back({static_cast<uint32_t>(i), qs.alphas[i],
                     goldberg_respond(db, qs.shares[i]).words});
    auto expect = row_copy(db, beta);

    // every responder subset of size k > t
    for (unsigned mask = 0; mask < 64 && pass; ++mask) {
      size_t k = static_cast<size_t>(__builtin_popcount(mask));
      if (k <= t) continue;
      std::vector<GoldbergResponse> subset;
      for (size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) subset.push_back(all[i]);
      auto rep = goldberg_reconstruct(subset, t, 64);
      if (rep.block != expect) {
        pass = false;
        detail = "mismatch at beta=" + std::to_string(beta) +
                 " mask=" + std::to_string(mask);
      }
    }
  }
  report(3, "LP-Goldberg correctness over all responder subsets (n=6, t=2)", pass,
         detail);
}

void criterion4_byzantine_bound() {
  const size_t n = 6, t = 1;
  const uint64_t r = 16;
  const uint32_t b = 64;
  auto db = make_db(r, b, 103);
  DeterministicRandom rng(203);
  bool pass = true;
  std::ostringstream detail;

  for (size_t v : {1, 2, 3}) {
    int correct = 0, verdict_exact = 0;
    for (int trial = 0; trial < 200; ++trial) {
      uint64_t beta = rng.below(r);
      auto qs = goldberg_build_queries(beta, n, t, r, rng);
      std::vector<GoldbergResponse> responses;
      for (size_t i = 0; i < n; ++i)
        responses.push_back({static_cast<uint32_t>(i), qs.alphas[i],
                             goldberg_respond(db, qs.shares[i]).words});
      std::vector<uint32_t> corrupted;
      while (corrupted.size() < v) {
        uint32_t i = static_cast<uint32_t>(rng.below(n));
        if (std::find(corrupted.begin(), corrupted.end(), i) == corrupted.end())
          corrupted.push_back(i);
      }
      for (uint32_t i : corrupted) rng.fill(responses[i].words.data(), b);

      try {
        auto rep = goldberg_reconstruct(responses, t, b);
        if (rep.block == row_copy(db, beta)) ++correct;
        std::sort(corrupted.begin(), corrupted.end());
        std::sort(rep.byzantine_ids.begin(), rep.byzantine_ids.end());
        if (rep.byzantine_ids == corrupted) ++verdict_exact;
      } catch (const PirError&) {
        // counted as incorrect below
      }
    }
    if (correct != 200 || verdict_exact < 198) pass = false;
    detail << "v=" << v << ":" << correct << "/200," << verdict_exact << " ";
  }

  // v = 4 violates the bound: never a silently wrong block
  int silent_wrong = 0;
  for (int trial = 0; trial < 200; ++trial) {
    uint64_t beta = rng.below(r);
    auto qs = goldberg_build_queries(beta, n, t, r, rng);
    std::vector<GoldbergResponse> responses;
    for (size_t i = 0; i < n; ++i)
      responses.push_back({static_cast<uint32_t>(i), qs.alphas[i],
                           goldberg_respond(db, qs.shares[i]).words});
    for (uint32_t i : {0u, 2u, 3u, 5u}) rng.fill(responses[i].words.data(), b);
    try {
      auto rep = goldberg_reconstruct(responses, t, b);
      if (rep.block != row_copy(db, beta)) ++silent_wrong;
    } catch (const UnrecoverableResponse&) {
      // acceptable outcome past the bound
    }
  }
  if (silent_wrong != 0) pass = false;
  detail << "v=4 silent-wrong=" << silent_wrong;
  report(4, "Byzantine recovery at the decoding bound (n=6, t=1)", pass, detail.str());
}

void criterion5_privacy() {
  bool pass = true;
  std::ostringstream detail;

  // (a) Chor share uniformity and beta-independence, r = 64, n = 3.
  {
    const uint64_t r = 64;
    const size_t n = 3;
    const int draws = 10000;
    const uint64_t betas[2] = {5, 58};

    // counts[beta][share][byte position][byte value]
    static int counts[2][3][8][256];
    std::memset(counts, 0, sizeof counts);
    DeterministicRandom rng(205);
    for (int which = 0; which < 2; ++which) {
      for (int d = 0; d < draws; ++d) {
        auto qs = chor_build_queries(betas[which], n, r, rng);
        for (size_t s = 0; s < n; ++s) {
          auto bytes = qs.shares[s].to_bytes();
          for (size_t pos = 0; pos < 8; ++pos) ++counts[which][s][pos][bytes[pos]];
        }
      }
    }

    // each (n-1)-subset: uniformity per member share, both betas
    const size_t subsets[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    double min_p = 1.0;
    for (int which = 0; which < 2; ++which) {
      for (const auto& subset : subsets) {
        double chi2 = 0;
        double df = 0;
        for (size_t s : subset) {
          for (size_t pos = 0; pos < 8; ++pos) {
            double expected = draws / 256.0;
            for (int value = 0; value < 256; ++value) {
              double diff = counts[which][s][pos][value] - expected;
              chi2 += diff * diff / expected;
            }
            df += 255;
          }
        }
        min_p = std::min(min_p, chi2_sf(chi2, df));
      }
    }
    if (min_p <= 0.01) pass = false;
    detail << "chor-uniformity min_p=" << min_p;

    // two-sample homogeneity across the two betas, per share/position
    double chi2 = 0, df = 0;
    for (size_t s = 0; s < n; ++s) {
      for (size_t pos = 0; pos < 8; ++pos) {
        for (int value = 0; value < 256; ++value) {
          double o1 = counts[0][s][pos][value];
          double o2 = counts[1][s][pos][value];
          double expected = (o1 + o2) / 2.0;
          if (expected == 0) continue;
          chi2 += (o1 - expected) * (o1 - expected) / expected;
          chi2 += (o2 - expected) * (o2 - expected) / expected;
        }
        df += 255;
      }
    }
    double p_two_sample = chi2_sf(chi2, df);
    if (p_two_sample <= 0.01) pass = false;
    detail << " beta-indist p=" << p_two_sample;
  }

  // (b) Goldberg interpolation feasibility, r = 8, (n, t) = (6, 2).
  {
    const uint64_t r = 8;
    const size_t n = 6, t = 2;
    DeterministicRandom rng(206);
    bool feasible = true;
    for (uint64_t beta = 0; beta < r && feasible; ++beta) {
      auto qs = goldberg_build_queries(beta, n, t, r, rng);
      for (size_t a = 0; a < n && feasible; ++a)
        for (size_t b2 = a + 1; b2 < n && feasible; ++b2) {
          for (uint64_t j = 0; j < r && feasible; ++j) {
            for (int candidate = 0; candidate < 256; ++candidate) {
              // interpolate through (0,candidate) and the two observed
              // share points; the polynomial must reproduce all three
              uint8_t xs[3] = {0x00, qs.alphas[a], qs.alphas[b2]};
              uint8_t ys[3] = {static_cast<uint8_t>(candidate), qs.shares[a][j],
                               qs.shares[b2][j]};
              for (int m = 0; m < 3; ++m) {
                uint8_t acc = 0;
                for (int i = 0; i < 3; ++i) {
                  uint8_t num = 1, den = 1;
                  for (int jj = 0; jj < 3; ++jj) {
                    if (i == jj) continue;
                    num = gf256::mul(num, gf256::add(xs[m], xs[jj]));
                    den = gf256::mul(den, gf256::add(xs[i], xs[jj]));
                  }
                  acc = gf256::add(acc, gf256::mul(gf256::div(num, den), ys[i]));
                }
                if (acc != ys[m]) feasible = false;
              }
            }
          }
        }
    }
    if (!feasible) pass = false;
    detail << " goldberg-feasibility=" << (feasible ? "ok" : "violated");
  }

  report(5, "privacy property suites (chor chi-square, goldberg feasibility)", pass,
         detail.str());
}

void criterion6_field_and_sharing() {
  bool pass = true;

  // shift-and-reduce oracle over all pairs
  auto slow_mul = [](uint8_t a, uint8_t b) {
    uint16_t acc = 0;
    for (int i = 0; i < 8; ++i)
      if (b & (1 << i)) acc ^= static_cast<uint16_t>(a) << i;
    for (int bit = 15; bit >= 8; --bit)
      if (acc & (1 << bit)) acc ^= gf256::kModulus << (bit - 8);
    return static_cast<uint8_t>(acc);
  };
  for (int a = 0; a < 256 && pass; ++a)
    for (int b = 0; b < 256; ++b)
      if (gf256::mul(a, b) != slow_mul(a, b)) {
        pass = false;
        break;
      }

  for (int a = 1; a < 256 && pass; ++a)
    if (gf256::mul(a, gf256::inv(static_cast<uint8_t>(a))) != 0x01) pass = false;

  // share/recover round trip for all (t, n), n <= 8, 100 secrets each
  DeterministicRandom rng(207);
  for (size_t n = 2; n <= 8 && pass; ++n) {
    std::vector<uint8_t> alphas(n);
    for (size_t i = 0; i < n; ++i) alphas[i] = static_cast<uint8_t>(i + 1);
    for (size_t t = 1; t < n && pass; ++t) {
      for (int trial = 0; trial < 100; ++trial) {
        uint8_t secret = rng.byte();
        auto shares = share_secret(secret, t, alphas, rng);
        std::vector<SharePoint> subset(shares.begin(), shares.begin() + t + 1);
        if (lagrange_at_zero(subset) != secret) {
          pass = false;
          break;
        }
      }
    }
  }
  report(6, "field and sharing oracles (exhaustive mul/inv, share round trips)", pass);
}

void criterion7_wire_integration() {
  auto start = Clock::now();
  auto db = std::make_shared<const DatabaseMatrix>(make_db(1 << 16, 560, 104));

  bool pass = true;
  std::ostringstream detail;
  const uint64_t r = 1 << 16;
  const uint32_t b = 560;
  const size_t n = 6;
  SpectrumKey key{12345, 0, 0, 0};
  uint64_t beta = inv_index(key, db->geometry());

  // chor against six honest replicas
  {
    std::vector<std::unique_ptr<PirServer>> servers;
    std::vector<ServerEndpoint> endpoints;
    for (size_t i = 0; i < n; ++i) {
      ServerConfig cfg;
      cfg.db = db;
      servers.push_back(std::make_unique<PirServer>(cfg));
      servers.back()->start();
      endpoints.push_back({static_cast<uint32_t>(i), "127.0.0.1",
                           servers.back()->port(), goldberg_alpha_for_server(i)});
    }
    DeterministicRandom rng(208);
    auto result = private_fetch(key, endpoints, Protocol::kChor, 0,
                                std::chrono::milliseconds(2500), rng);
    if (result.block != row_copy(*db, beta)) pass = false;
    if (result.metrics.protocol_bits_up != r * n) pass = false;
    if (result.metrics.protocol_bits_down != uint64_t{b} * 8 * n) pass = false;
    for (auto& s : servers) s->stop();
  }

  // goldberg with two servers dropping every query
  {
    std::vector<std::unique_ptr<PirServer>> servers;
    std::vector<ServerEndpoint> endpoints;
    for (size_t i = 0; i < n; ++i) {
      ServerConfig cfg;
      cfg.db = db;
      if (i >= 4) {
        cfg.fault = FaultProfile::parse("drop:1.0");
        cfg.seed = 50 + i;
      }
      servers.push_back(std::make_unique<PirServer>(cfg));
      servers.back()->start();
      endpoints.push_back({static_cast<uint32_t>(i), "127.0.0.1",
                           servers.back()->port(), goldberg_alpha_for_server(i)});
    }
    DeterministicRandom rng(209);
    auto result = private_fetch(key, endpoints, Protocol::kGoldberg, 2,
                                std::chrono::milliseconds(2500), rng);
    if (result.block != row_copy(*db, beta)) pass = false;
    if (result.report.absent_ids.size() != 2) pass = false;
    if (result.metrics.protocol_bits_up != r * 8 * n) pass = false;
    if (result.metrics.protocol_bits_down != 4ULL * b * 8) pass = false;  // k = 4
    for (auto& s : servers) s->stop();
  }

  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (elapsed >= 10.0) pass = false;
  detail << "elapsed=" << elapsed << "s";
  report(7, "wire protocol integration on the desk-scale database", pass, detail.str());
}

void criterion8_scaling() {
  bool pass = true;
  std::ostringstream detail;

  // exact linearity of the goldberg touched-byte counter in r
  {
    DeterministicRandom rng(210);
    uint64_t counters[3] = {};
    uint64_t rs[3] = {1 << 12, 1 << 14, 1 << 16};
    for (int i = 0; i < 3; ++i) {
      auto db = make_db(rs[i], 560, 105 + i);
      std::vector<uint8_t> share(rs[i]);
      rng.fill(share.data(), share.size());
      counters[i] = goldberg_respond(db, share).bytes_touched;
    }
    if (counters[0] != rs[0] * 560 || counters[1] != rs[1] * 560 ||
        counters[2] != rs[2] * 560)
      pass = false;
    if (counters[1] != 4 * counters[0] || counters[2] != 4 * counters[1]) pass = false;
    detail << "touched=" << counters[0] << "," << counters[1] << "," << counters[2];
  }

  // harness CSV: chor bytes < goldberg bytes at every swept r
  {
    auto run = [](const std::string& text) {
      std::stringstream out;
      run_plan(ExperimentPlan::parse_text(text), out);
      return out.str();
    };
    std::string chor_csv = run(
        "protocol = chor\nn = 3\nrows = 1024, 4096\nblock_bytes = 64\n"
        "trials = 2\nseed = 31\ndeadline_ms = 5000\n");
    std::string goldberg_csv = run(
        "protocol = goldberg\nn = 3\nt = 1\nrows = 1024, 4096\nblock_bytes = 64\n"
        "trials = 2\nseed = 31\ndeadline_ms = 5000\n");

    auto parse_bits = [](const std::string& csv) {
      std::vector<uint64_t> totals;
      std::stringstream ss(csv);
      std::string line;
      std::getline(ss, line);  // header
      while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        totals.push_back(std::stoull(fields[12]) + std::stoull(fields[13]));
      }
      return totals;
    };
    auto chor_bits = parse_bits(chor_csv);
    auto goldberg_bits = parse_bits(goldberg_csv);
    for (size_t i = 0; i < chor_bits.size(); ++i) {
      if (chor_bits[i] >= goldberg_bits[i]) pass = false;
    }
    detail << " chor<goldberg bytes: "
           << (chor_bits[0] < goldberg_bits[0] && chor_bits[1] < goldberg_bits[1]
                   ? "ok"
                   : "violated");
  }

  // recovery time non-increasing as silenced servers rise 0..n-t-1
  {
    std::stringstream out;
    run_plan(ExperimentPlan::parse_text(
                 "protocol = goldberg\nn = 6\nt = 2\nrows = 64\n"
                 "block_bytes = 1048576\n"
                 "faults = none, drop:1.0@1, drop:1.0@2, drop:1.0@3\n"
                 "trials = 10\nseed = 32\ndeadline_ms = 600\n"),
             out);
    std::vector<int64_t> p50s;
    std::stringstream ss(out.str());
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
      std::vector<std::string> fields;
      std::stringstream ls(line);
      std::string f;
      while (std::getline(ls, f, ',')) fields.push_back(f);
      if (fields[9] != "10") pass = false;  // all trials succeed inside the bound
      p50s.push_back(std::stoll(fields[18]));
    }
    detail << " recovery_p50_us=";
    for (size_t i = 0; i < p50s.size(); ++i) {
      detail << p50s[i] << (i + 1 < p50s.size() ? "/" : "");
      // non-increasing; adjacent points equal within 5% timing noise count
      // as equal
      if (i > 0 && p50s[i] > p50s[i - 1] + p50s[i - 1] / 20) pass = false;
    }
  }

  report(8, "scaling and qualitative orderings", pass, detail.str());
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  criterion1_table0();
  criterion2_chor_exhaustive();
  criterion3_goldberg_subsets();
  criterion4_byzantine_bound();
  criterion5_privacy();
  criterion6_field_and_sharing();
  criterion7_wire_integration();
  criterion8_scaling();

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
