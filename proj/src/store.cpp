#include "hivemon/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hivemon/errors.hpp"
#include "hivemon/format.hpp"
#include "hivemon/message.hpp"

namespace hivemon {

namespace {

void check_record(const Record& r, const char* context) {
    if (!valid_hive_id(r.hive_id)) {
        throw SchemaViolationError(std::string(context) + ": bad hive_id '" + r.hive_id + "'");
    }
    const double values[] = {r.total_g, r.x_mm, r.y_mm, r.cells_g[0], r.cells_g[1], r.cells_g[2],
                             r.cells_g[3]};
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw SchemaViolationError(std::string(context) + ": non-finite numeric field");
        }
    }
}

}  // namespace

std::string encode_record(const Record& record) {
    check_record(record, "encode_record");
    nlohmann::ordered_json j;
    j["hive_id"] = record.hive_id;
    j["seq"] = record.seq;
    j["ts_ms"] = record.ts_ms;
    j["cells_g"] = record.cells_g;
    j["total_g"] = record.total_g;
    j["x_mm"] = record.x_mm;
    j["y_mm"] = record.y_mm;
    return j.dump();
}

Record decode_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedPayloadError(std::string("bad record line: ") + e.what());
    }
    try {
        Record r;
        r.hive_id = j.at("hive_id").get<std::string>();
        r.seq = j.at("seq").get<uint64_t>();
        r.ts_ms = j.at("ts_ms").get<int64_t>();
        const auto& cells = j.at("cells_g");
        if (!cells.is_array() || cells.size() != 4) {
            throw SchemaViolationError("cells_g must have 4 entries");
        }
        for (size_t i = 0; i < 4; ++i) r.cells_g[i] = cells[i].get<double>();
        r.total_g = j.at("total_g").get<double>();
        r.x_mm = j.at("x_mm").get<double>();
        r.y_mm = j.at("y_mm").get<double>();
        check_record(r, "decode_record");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolationError(std::string("record line violates the schema: ") + e.what());
    }
}

std::string export_csv(std::span<const Record> records) {
    std::string out = "hive_id,seq,ts_ms,f1_g,f2_g,f3_g,f4_g,total_g,x_mm,y_mm\n";
    for (const auto& r : records) {
        out += r.hive_id;
        out += ',';
        out += std::to_string(r.seq);
        out += ',';
        out += std::to_string(r.ts_ms);
        for (double cell : r.cells_g) {
            out += ',';
            out += format_fixed(cell);
        }
        out += ',';
        out += format_fixed(r.total_g);
        out += ',';
        out += format_fixed(r.x_mm);
        out += ',';
        out += format_fixed(r.y_mm);
        out += '\n';
    }
    return out;
}

std::vector<Record> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw MalformedPayloadError("empty CSV input");
    std::vector<Record> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 10) {
            throw MalformedPayloadError("CSV row with " + std::to_string(fields.size()) +
                                        " fields: " + line);
        }
        Record r;
        r.hive_id = fields[0];
        r.seq = std::stoull(fields[1]);
        r.ts_ms = std::stoll(fields[2]);
        for (int i = 0; i < 4; ++i) r.cells_g[i] = std::stod(fields[3 + i]);
        r.total_g = std::stod(fields[7]);
        r.x_mm = std::stod(fields[8]);
        r.y_mm = std::stod(fields[9]);
        records.push_back(std::move(r));
    }
    return records;
}

struct Store::HiveLog {
    int fd = -1;
    std::optional<uint64_t> last_seq;

    ~HiveLog() {
        if (fd >= 0) ::close(fd);
    }
};

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoFailureError("cannot create store directory " + dir_.string());
}

Store::~Store() = default;

std::filesystem::path Store::log_path(const std::string& hive_id) const {
    return dir_ / (hive_id + ".jsonl");
}

Store::HiveLog& Store::open_log(const std::string& hive_id) {
    if (auto it = logs_.find(hive_id); it != logs_.end()) return *it->second;

    auto log = std::make_unique<HiveLog>();
    const auto path = log_path(hive_id);

    // Recovery scan: find the end of the last complete, parseable record.
    // A torn final line (crash mid-append) is truncated away; damage that is
    // not confined to the tail is refused.
    if (std::filesystem::exists(path)) {
        if (!std::filesystem::is_regular_file(path)) {
            throw IoFailureError(path.string() + " is not a regular file");
        }
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoFailureError("cannot open " + path.string());
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        size_t valid_end = 0;
        size_t pos = 0;
        std::optional<uint64_t> last_seq;
        while (pos < content.size()) {
            const size_t nl = content.find('\n', pos);
            if (nl == std::string::npos) break;  // torn tail, no newline
            const std::string line = content.substr(pos, nl - pos);
            Record r;
            try {
                r = decode_record(line);
            } catch (const Error&) {
                if (content.find('\n', nl + 1) != std::string::npos) {
                    throw IoFailureError("corrupt record mid-log in " + path.string());
                }
                break;  // damaged final line, drop it
            }
            if (r.hive_id != hive_id || (last_seq && r.seq <= *last_seq)) {
                throw IoFailureError("inconsistent log " + path.string());
            }
            last_seq = r.seq;
            valid_end = nl + 1;
            pos = nl + 1;
        }
        if (valid_end < content.size()) {
            std::filesystem::resize_file(path, valid_end);
        }
        log->last_seq = last_seq;
    }

    log->fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (log->fd < 0) throw IoFailureError("cannot open " + path.string() + " for append");

    auto [it, inserted] = logs_.emplace(hive_id, std::move(log));
    (void)inserted;
    return *it->second;
}

void Store::append(const Record& record) {
    std::lock_guard lock(mutex_);
    HiveLog& log = open_log(record.hive_id);
    if (log.last_seq && record.seq <= *log.last_seq) {
        throw OutOfOrderSeqError("seq " + std::to_string(record.seq) + " does not advance past " +
                                 std::to_string(*log.last_seq) + " for hive " + record.hive_id);
    }
    const std::string line = encode_record(record) + "\n";
    size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(log.fd, line.data() + written, line.size() - written);
        if (n < 0) throw IoFailureError("write failed for hive " + record.hive_id);
        written += size_t(n);
    }
    if (::fsync(log.fd) != 0) throw IoFailureError("fsync failed for hive " + record.hive_id);
    log.last_seq = record.seq;
}

std::vector<Record> Store::read_log(const std::string& hive_id) const {
    const auto path = log_path(hive_id);
    if (!std::filesystem::exists(path)) {
        throw UnknownHiveError("no log for hive '" + hive_id + "'");
    }
    if (!std::filesystem::is_regular_file(path)) {
        throw IoFailureError(path.string() + " is not a regular file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailureError("cannot open " + path.string());
    std::vector<Record> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            records.push_back(decode_record(line));
        } catch (const Error&) {
            if (in.peek() != EOF) throw IoFailureError("corrupt record mid-log in " + path.string());
            break;  // unrecovered torn tail; readers skip it
        }
    }
    return records;
}

std::vector<Record> Store::query_range(const std::string& hive_id, int64_t t0_ms,
                                       int64_t t1_ms) const {
    if (t0_ms > t1_ms) throw std::invalid_argument("query_range: t0 > t1");
    std::lock_guard lock(mutex_);
    std::vector<Record> out;
    for (auto& r : read_log(hive_id)) {
        if (r.ts_ms >= t0_ms && r.ts_ms <= t1_ms) out.push_back(std::move(r));
    }
    return out;
}

std::vector<Record> Store::all_records(const std::string& hive_id) const {
    std::lock_guard lock(mutex_);
    return read_log(hive_id);
}

std::vector<std::string> Store::hives() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
        if (entry.path().extension() == ".jsonl") {
            out.push_back(entry.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hivemon
