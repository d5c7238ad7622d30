#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hivemon {

/// One persisted reading: the raw averaged cells plus the reconstructed
/// total and center-of-mass position.
struct Record {
    std::string hive_id;
    uint64_t seq = 0;
    int64_t ts_ms = 0;
    std::array<double, 4> cells_g{};
    double total_g = 0.0;
    double x_mm = 0.0;
    double y_mm = 0.0;

    friend bool operator==(const Record&, const Record&) = default;
};

std::string encode_record(const Record& record);
Record decode_record(const std::string& line);

/// Renders records as CSV with the fixed header
/// hive_id,seq,ts_ms,f1_g,f2_g,f3_g,f4_g,total_g,x_mm,y_mm and numbers
/// printed with up to six decimals, C locale.
std::string export_csv(std::span<const Record> records);

/// Parses text produced by export_csv back into records.
std::vector<Record> parse_csv(const std::string& text);

/// Append-only record log, one newline-delimited JSON file per hive under
/// one directory. Every append is flushed to disk before it returns; a file
/// whose final line was torn by a crash is truncated back to the last
/// complete record on open.
class Store {
public:
    explicit Store(std::filesystem::path dir);
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Durably appends one record. Throws OutOfOrderSeqError when seq does
    /// not advance past the hive's last stored seq, IoFailureError when the
    /// write or flush fails.
    void append(const Record& record);

    /// All records with t0 <= ts_ms <= t1 (closed interval) in seq order.
    /// Throws UnknownHiveError for a hive with no log.
    std::vector<Record> query_range(const std::string& hive_id, int64_t t0_ms, int64_t t1_ms) const;

    /// Full log for one hive, in seq order.
    std::vector<Record> all_records(const std::string& hive_id) const;

    /// Hives that currently have a log file.
    std::vector<std::string> hives() const;

    const std::filesystem::path& directory() const { return dir_; }

private:
    struct HiveLog;

    HiveLog& open_log(const std::string& hive_id);
    std::filesystem::path log_path(const std::string& hive_id) const;
    std::vector<Record> read_log(const std::string& hive_id) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<HiveLog>> logs_;
};

}  // namespace hivemon
