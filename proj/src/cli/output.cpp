#include "rwalk/cli_output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

#include "rwalk/cli.hpp"

namespace rwalk::cli {

namespace fs = std::filesystem;

AtomicFile::AtomicFile(fs::path target) : target_(std::move(target)) {
  if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
  temp_ = target_;
  temp_ += ".tmp." + std::to_string(::getpid());
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(temp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + temp_.string());
  out_.close();
  fs::rename(temp_, target_);
  committed_ = true;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_reals(std::span<const double> v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_real(v[i]);
  }
  return s;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json header_record(const std::string& command, const nlohmann::json& config) {
  nlohmann::json h;
  h["command"] = command;
  h["config"] = config;
  h["seed"] = config.contains("seed") ? config["seed"] : nlohmann::json(nullptr);
  h["version"] = kVersion;
  return h;
}

void write_jsonl_header(std::ostream& os, const nlohmann::json& header,
                        const std::string& timestamp) {
  os << nlohmann::json{{"header", header}}.dump() << '\n';
  os << nlohmann::json{{"timestamp", timestamp}}.dump() << '\n';
}

void write_csv_header(std::ostream& os, const nlohmann::json& header,
                      const std::string& timestamp) {
  os << "# header " << header.dump() << '\n';
  os << "# timestamp " << timestamp << '\n';
}

void write_json_file(const fs::path& path, const nlohmann::json& header,
                     const std::string& timestamp, const nlohmann::json& report) {
  nlohmann::json doc;
  doc["header"] = header;
  doc["timestamp"] = timestamp;
  doc["report"] = report;
  AtomicFile f(path);
  f.stream() << doc.dump(2) << '\n';
  f.commit();
}

}  // namespace rwalk::cli
