#pragma once

// File emission for the CLI: atomic writes and self-describing headers.
//
// Every file starts with a header record (command, effective config, seed,
// version) followed by a line holding only the timestamp, so byte comparisons
// can mask exactly one line.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "json.hpp"

namespace rwalk::cli {

/// Writes to a temporary sibling and renames over the target on commit.
/// An uncommitted file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  /// Throws std::runtime_error on I/O failure.
  void commit();

 private:
  std::filesystem::path target_, temp_;
  std::ofstream out_;
  bool committed_ = false;
};

/// 17 significant digits, '.' decimal point.
std::string format_real(double v);
std::string join_reals(std::span<const double> v, char sep = ',');

std::string utc_timestamp();

/// {"command", "config", "seed", "version"}.
nlohmann::json header_record(const std::string& command, const nlohmann::json& config);

/// Line 1 {"header": ...}, line 2 {"timestamp": ...}.
void write_jsonl_header(std::ostream& os, const nlohmann::json& header,
                        const std::string& timestamp);
/// Line 1 "# header <json>", line 2 "# timestamp <ts>".
void write_csv_header(std::ostream& os, const nlohmann::json& header,
                      const std::string& timestamp);
/// Pretty JSON {"header", "timestamp", "report"} written atomically.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& header,
                     const std::string& timestamp, const nlohmann::json& report);

}  // namespace rwalk::cli
