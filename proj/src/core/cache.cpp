#include "core/cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <cassert>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace wsp {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

namespace {

constexpr std::string_view kMagic = "wsp-cache 1";
constexpr std::string_view kDigest = "digest sha256";
constexpr std::string_view kExtension = ".wspc";

std::string iso_utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  assert(ec == std::errc());
  return std::string(buf.data(), end);
}

void warn_corrupt(const fs::path& file, const char* why) {
  std::fprintf(stderr, "warning: ignoring cache entry %s (%s)\n",
               file.string().c_str(), why);
}

std::string entry_payload(const CacheEntry& e) {
  std::ostringstream out;
  out << "key " << e.key << "\n";
  out << "algorithm " << e.algorithm << "\n";
  out << "model " << e.model << "\n";
  out << "budget " << e.budget << "\n";
  out << "cost " << e.cost << "\n";
  out << "proven " << (e.proven ? 1 : 0) << "\n";
  out << "created_at " << e.created_at << "\n";
  out << "blocks " << e.blocks.size() << "\n";
  for (const auto& block : e.blocks) {
    out << "block";
    for (uint32_t v : block) out << ' ' << v;
    out << "\n";
  }
  return out.str();
}

// One "name rest-of-line" field per line. Returns false on a malformed line
// or a name mismatch.
bool take_field(std::istringstream& in, std::string_view name,
                std::string& value) {
  std::string line;
  if (!std::getline(in, line)) return false;
  size_t space = line.find(' ');
  std::string field = space == std::string::npos ? line : line.substr(0, space);
  if (field != name) return false;
  value = space == std::string::npos ? std::string() : line.substr(space + 1);
  return true;
}

bool parse_u64(const std::string& s, uint64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

ResultCache::ResultCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ResultCache::default_dir() {
  if (const char* env = std::getenv("WSP_CACHE_DIR"); env && *env)
    return fs::path(env);
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".cache" / "wsp";
  return fs::temp_directory_path() / "wsp-cache";
}

std::string ResultCache::make_key(const Program& p, std::string_view algorithm,
                                  std::string_view model,
                                  std::string_view budget) {
  std::string text = fingerprint_text(p);
  text += '\n';
  text += algorithm;
  text += '\n';
  text += model;
  text += '\n';
  text += budget;
  text += '\n';
  return sha256_hex(text);
}

std::string ResultCache::budget_descriptor(const SearchBudget& b) {
  return "nodes=" + std::to_string(b.max_nodes) +
         ";seconds=" + format_double(b.max_seconds);
}

std::optional<CacheEntry> ResultCache::load(const std::string& key) const {
  fs::path file = dir_ / (key + std::string(kExtension));
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream whole;
  whole << in.rdbuf();
  std::string text = whole.str();

  // Three header lines, then the checksummed payload.
  size_t p1 = text.find('\n');
  if (p1 == std::string::npos || text.substr(0, p1) != kMagic) {
    warn_corrupt(file, "bad magic");
    return std::nullopt;
  }
  size_t p2 = text.find('\n', p1 + 1);
  if (p2 == std::string::npos ||
      text.substr(p1 + 1, p2 - p1 - 1) != kDigest) {
    warn_corrupt(file, "unknown digest");
    return std::nullopt;
  }
  size_t p3 = text.find('\n', p2 + 1);
  if (p3 == std::string::npos) {
    warn_corrupt(file, "truncated header");
    return std::nullopt;
  }
  std::string checksum_line = text.substr(p2 + 1, p3 - p2 - 1);
  std::string payload = text.substr(p3 + 1);
  if (checksum_line != "checksum " + sha256_hex(payload)) {
    warn_corrupt(file, "checksum mismatch");
    return std::nullopt;
  }

  CacheEntry e;
  std::istringstream in2(payload);
  std::string value;
  uint64_t nblocks = 0;
  bool ok = take_field(in2, "key", e.key) &&
            take_field(in2, "algorithm", e.algorithm) &&
            take_field(in2, "model", e.model) &&
            take_field(in2, "budget", e.budget) &&
            take_field(in2, "cost", value) && parse_u64(value, e.cost);
  if (ok) {
    ok = take_field(in2, "proven", value) && (value == "0" || value == "1");
    e.proven = value == "1";
  }
  ok = ok && take_field(in2, "created_at", e.created_at) &&
       take_field(in2, "blocks", value) && parse_u64(value, nblocks);
  for (uint64_t b = 0; ok && b < nblocks; ++b) {
    ok = take_field(in2, "block", value);
    if (!ok) break;
    std::vector<uint32_t> members;
    std::istringstream mem(value);
    uint64_t v;
    while (mem >> v) members.push_back(static_cast<uint32_t>(v));
    e.blocks.push_back(std::move(members));
  }
  if (!ok || e.key != key) {
    warn_corrupt(file, "malformed payload");
    return std::nullopt;
  }
  return e;
}

void ResultCache::store(const CacheEntry& e) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);

  auto st = stats();
  if (st.entries >= max_entries)
    std::fprintf(stderr,
                 "warning: cache at %s holds %llu entries (soft limit %zu); "
                 "consider clearing it\n",
                 dir_.string().c_str(),
                 static_cast<unsigned long long>(st.entries), max_entries);

  std::string payload = entry_payload(e);
  std::string text;
  text += kMagic;
  text += '\n';
  text += kDigest;
  text += '\n';
  text += "checksum " + sha256_hex(payload) + "\n";
  text += payload;

  fs::path final_path = dir_ / (e.key + std::string(kExtension));
  fs::path tmp = dir_ / (e.key + ".tmp-" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
  }
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    std::fprintf(stderr, "warning: could not write cache entry %s\n",
                 final_path.string().c_str());
  }
}

uint64_t ResultCache::clear() const {
  uint64_t removed = 0;
  std::error_code ec;
  if (!fs::exists(dir_, ec)) return 0;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file(ec)) continue;
    if (entry.path().extension() != kExtension) continue;
    if (fs::remove(entry.path(), ec)) ++removed;
  }
  return removed;
}

ResultCache::Stats ResultCache::stats() const {
  Stats s;
  std::error_code ec;
  if (!fs::exists(dir_, ec)) return s;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file(ec)) continue;
    if (entry.path().extension() != kExtension) continue;
    ++s.entries;
    s.bytes += entry.file_size(ec);
  }
  return s;
}

PartitionResult partition_cached(const WspGraph& g, const CostModel& m,
                                 std::string_view algorithm,
                                 const SearchBudget& budget, ResultCache* cache,
                                 bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  if (!cache || !g.program)
    return run_algorithm(algorithm, g, m, budget);

  std::string descriptor = ResultCache::budget_descriptor(budget);
  std::string key =
      ResultCache::make_key(*g.program, algorithm, m.name(), descriptor);
  if (auto entry = cache->load(key)) {
    PartitionResult r;
    r.partition.blocks = entry->blocks;
    r.cost = entry->cost;
    r.proven_optimal = entry->proven;
    r.merge_trace = reconstruct_trace(g, m, r.partition);
    if (cache_hit) *cache_hit = true;
    return r;
  }

  PartitionResult r = run_algorithm(algorithm, g, m, budget);
  cache->count_computation();
  CacheEntry e;
  e.key = key;
  e.algorithm = algorithm;
  e.model = m.name();
  e.budget = descriptor;
  e.cost = r.cost;
  e.proven = r.proven_optimal;
  e.created_at = iso_utc_now();
  e.blocks = r.partition.blocks;
  cache->store(e);
  return r;
}

}  // namespace wsp
