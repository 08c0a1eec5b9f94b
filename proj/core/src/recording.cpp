#include "tshs/recording.hpp"

#include "tshs/clock.hpp"
#include "tshs/errors.hpp"
#include "tshs/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tshs {

const Recording* Corpus::find(const std::string& participant_id) const {
    for (const auto& rec : recordings) {
        if (rec.participant_id == participant_id)
            return &rec;
    }
    return nullptr;
}

std::vector<std::string> Corpus::participant_ids() const {
    std::vector<std::string> ids;
    ids.reserve(recordings.size());
    for (const auto& rec : recordings)
        ids.push_back(rec.participant_id);
    return ids;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("label map not readable: " + path.string());
    LabelMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("label map line " + std::to_string(lineno) + ": expected raw<TAB>class");
        std::string raw = line.substr(0, tab);
        std::string cls = line.substr(tab + 1);
        if (!cls.empty() && cls.back() == '\r')
            cls.pop_back();
        auto mapped = class_from_name(cls);
        if (!mapped)
            throw DataError("label map line " + std::to_string(lineno) + ": unknown class '" + cls + "'");
        auto [it, inserted] = map.mapping.emplace(raw, *mapped);
        if (!inserted && it->second != *mapped)
            throw DataError("label map: raw label '" + raw + "' mapped to two classes");
    }
    return map;
}

LabelMap LabelMap::identity() {
    LabelMap map;
    for (auto cls : all_classes())
        map.mapping.emplace(class_name(cls), cls);
    return map;
}

namespace {

bool parse_int64(std::string_view s, int64_t& out) {
    if (s.empty())
        return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

// Absolute timestamp in milliseconds. For ISO-8601 the date contributes whole
// days so monotonicity checks work across midnight.
bool parse_timestamp_ms(std::string_view s, int64_t& out) {
    if (parse_int64(s, out))
        return true;
    // ISO-8601: YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' '))
        return false;
    int64_t year, month, day;
    if (!parse_int64(s.substr(0, 4), year) || !parse_int64(s.substr(5, 2), month) ||
        !parse_int64(s.substr(8, 2), day))
        return false;
    std::string_view time_part = s.substr(11);
    if (!time_part.empty() && time_part.back() == 'Z')
        time_part.remove_suffix(1);
    int64_t hh, mm, ss, frac = 0;
    if (time_part.size() < 8 || time_part[2] != ':' || time_part[5] != ':')
        return false;
    if (!parse_int64(time_part.substr(0, 2), hh) || !parse_int64(time_part.substr(3, 2), mm) ||
        !parse_int64(time_part.substr(6, 2), ss))
        return false;
    if (time_part.size() > 8) {
        if (time_part[8] != '.')
            return false;
        std::string_view f = time_part.substr(9);
        if (f.empty() || f.size() > 3 || !parse_int64(f, frac))
            return false;
        for (size_t i = f.size(); i < 3; ++i)
            frac *= 10;
    }
    // Civil date to day number (Howard Hinnant's algorithm).
    int64_t y = year - (month <= 2 ? 1 : 0);
    int64_t era = (y >= 0 ? y : y - 399) / 400;
    int64_t yoe = y - era * 400;
    int64_t doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    int64_t days = era * 146097 + doe - 719468;
    out = days * kMsPerDay + ((hh * 60 + mm) * 60 + ss) * 1000 + frac;
    return true;
}

bool parse_float(std::string_view s, float& out) {
    if (s.empty())
        return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    size_t pos = 0;
    while (true) {
        size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

} // namespace

Recording load_recording(const std::filesystem::path& path, const LabelMap& map) {
    std::ifstream in(path);
    if (!in)
        throw DataError("recording not readable: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw DataError("no samples in " + path.string());
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "time,x,y,z,annotation")
        throw DataError(path.string() + ": expected header 'time,x,y,z,annotation'");

    Recording rec;
    rec.participant_id = path.stem().string();

    std::vector<int64_t> times;
    std::vector<std::string> raw_labels;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() != 5)
            throw DataError(path.string() + " line " + std::to_string(lineno) +
                            ": expected 5 columns");
        int64_t t;
        float x, y, z;
        if (!parse_timestamp_ms(cells[0], t))
            throw DataError(path.string() + " line " + std::to_string(lineno) + ": bad timestamp");
        if (!parse_float(cells[1], x) || !parse_float(cells[2], y) || !parse_float(cells[3], z))
            throw DataError(path.string() + " line " + std::to_string(lineno) + ": bad sample value");
        times.push_back(t);
        rec.channels[0].push_back(x);
        rec.channels[1].push_back(y);
        rec.channels[2].push_back(z);
        raw_labels.emplace_back(cells[4]);
    }
    if (times.empty())
        throw DataError("no samples in " + path.string());

    if (times.size() >= 2) {
        int64_t delta = times[1] - times[0];
        if (delta <= 0)
            throw DataError(path.string() + ": non-monotonic timestamps");
        for (size_t i = 1; i < times.size(); ++i) {
            if (times[i] - times[i - 1] != delta)
                throw DataError(path.string() + ": non-uniform or non-monotonic timestamps at row " +
                                std::to_string(i + 1));
        }
        rec.rate = 1000.0 / static_cast<double>(delta);
    } else {
        throw DataError(path.string() + ": cannot infer sampling rate from a single row");
    }
    rec.start_clock_ms = ((times[0] % kMsPerDay) + kMsPerDay) % kMsPerDay;

    // Runs of equal raw labels become annotation spans; empty labels are
    // unannotated gaps.
    int64_t n = rec.length();
    int64_t span_start = 0;
    for (int64_t i = 1; i <= n; ++i) {
        if (i == n || raw_labels[i] != raw_labels[span_start]) {
            const std::string& raw = raw_labels[span_start];
            if (!raw.empty()) {
                auto it = map.mapping.find(raw);
                if (it == map.mapping.end())
                    throw DataError(path.string() + ": unknown raw label '" + raw + "'");
                rec.annotations.push_back({span_start, i, it->second});
            }
            span_start = i;
        }
    }
    return rec;
}

void save_recording(const Recording& rec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "time,x,y,z,annotation\n";
    double ms_per_sample = 1000.0 / rec.rate;
    // Class per sample for the annotation column.
    std::vector<const std::string*> labels(static_cast<size_t>(rec.length()), nullptr);
    for (const auto& a : rec.annotations) {
        for (int64_t i = a.start; i < a.end; ++i)
            labels[static_cast<size_t>(i)] = &class_name(a.cls);
    }
    char buf[64];
    for (int64_t i = 0; i < rec.length(); ++i) {
        int64_t t = rec.start_clock_ms + llround(static_cast<double>(i) * ms_per_sample);
        out << t;
        for (int c = 0; c < 3; ++c) {
            auto res = std::to_chars(buf, buf + sizeof(buf), rec.channels[c][static_cast<size_t>(i)]);
            out << ',' << std::string_view(buf, static_cast<size_t>(res.ptr - buf));
        }
        out << ',';
        if (labels[static_cast<size_t>(i)])
            out << *labels[static_cast<size_t>(i)];
        out << '\n';
    }
}

Recording resample(const Recording& rec, double target_rate) {
    if (target_rate > rec.rate)
        throw DataError("resample: upsampling requested");
    double factor = rec.rate / target_rate;
    auto k = static_cast<int64_t>(std::llround(factor));
    if (std::abs(factor - static_cast<double>(k)) > 1e-9)
        throw DataError("resample: non-integer decimation factor");
    if (k == 1)
        return rec;

    Recording out;
    out.participant_id = rec.participant_id;
    out.rate = target_rate;
    out.start_clock_ms = rec.start_clock_ms;
    int64_t new_len = rec.length() / k;
    for (int c = 0; c < 3; ++c) {
        out.channels[c].reserve(static_cast<size_t>(new_len));
        for (int64_t i = 0; i < new_len; ++i)
            out.channels[c].push_back(rec.channels[c][static_cast<size_t>(i * k)]);
    }
    for (const auto& a : rec.annotations) {
        int64_t start = (a.start + k - 1) / k;
        int64_t end = std::min((a.end + k - 1) / k, new_len);
        if (end > start)
            out.annotations.push_back({start, end, a.cls});
    }
    return out;
}

const std::set<std::string>& SplitAssignment::ids(const std::string& split) const {
    if (split == "train")
        return train;
    if (split == "val")
        return val;
    if (split == "test")
        return test;
    throw ConfigError("unknown split '" + split + "'");
}

SplitAssignment split_participants(const std::set<std::string>& ids, SplitCounts counts,
                                   uint64_t seed) {
    if (counts.train < 0 || counts.val < 0 || counts.test < 0 ||
        static_cast<size_t>(counts.train) + counts.val + counts.test != ids.size())
        throw ConfigError("split counts do not sum to participant count");
    std::vector<std::string> order(ids.begin(), ids.end());
    Rng rng(hash_combine(seed, 0x53504c4954ULL));
    rng.shuffle(order);
    SplitAssignment out;
    out.seed = seed;
    size_t i = 0;
    for (int k = 0; k < counts.train; ++k)
        out.train.insert(order[i++]);
    for (int k = 0; k < counts.val; ++k)
        out.val.insert(order[i++]);
    for (int k = 0; k < counts.test; ++k)
        out.test.insert(order[i++]);
    return out;
}

} // namespace tshs
