#include "tshs/serialize.hpp"

#include "tshs/errors.hpp"
#include "tshs/rng.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <random>

namespace tshs {

static_assert(std::endian::native == std::endian::little,
              "blob I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'S', 'H', 'S'};

template <typename T>
void put(std::string& buf, T value) {
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, size_t& off, const std::filesystem::path& path) {
    if (off + sizeof(T) > buf.size())
        throw DataError("truncated series blob: " + path.string());
    T value;
    std::memcpy(&value, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return value;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

} // namespace

void write_series_blob(const std::filesystem::path& path, const Series3& series, double rate) {
    const size_t n = series[0].size();
    if (series[1].size() != n || series[2].size() != n)
        throw DataError("series channels have unequal lengths");
    std::string buf;
    buf.reserve(4 + 2 + 1 + 4 + 8 + 3 * n * sizeof(float));
    buf.append(kMagic, 4);
    put<uint16_t>(buf, kBlobVersion);
    put<uint8_t>(buf, 3);
    put<float>(buf, static_cast<float>(rate));
    put<uint64_t>(buf, n);
    for (const auto& ch : series)
        buf.append(reinterpret_cast<const char*>(ch.data()), n * sizeof(float));
    atomic_write(path, buf);
}

SeriesBlob read_series_blob(const std::filesystem::path& path) {
    std::string buf = read_all(path);
    size_t off = 0;
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw DataError("bad series blob magic: " + path.string());
    off = 4;
    auto version = take<uint16_t>(buf, off, path);
    if (version != kBlobVersion)
        throw DataError("unsupported series blob version " + std::to_string(version));
    auto channels = take<uint8_t>(buf, off, path);
    if (channels != 3)
        throw DataError("expected 3 channels, got " + std::to_string(channels));
    auto rate = take<float>(buf, off, path);
    auto length = take<uint64_t>(buf, off, path);
    if (buf.size() - off != 3 * length * sizeof(float))
        throw DataError("series blob payload size mismatch: " + path.string());
    SeriesBlob blob;
    blob.rate = rate;
    for (auto& ch : blob.series) {
        ch.resize(length);
        std::memcpy(ch.data(), buf.data() + off, length * sizeof(float));
        off += length * sizeof(float);
    }
    return blob;
}

nlohmann::json answer_to_json(const Answer& answer) {
    nlohmann::json j;
    j["kind"] = answer_kind_name(answer.kind);
    switch (answer.kind) {
    case AnswerKind::Bool:
        j["value"] = answer.flag;
        break;
    case AnswerKind::Int:
        j["value"] = answer.count;
        break;
    case AnswerKind::Category:
        j["value"] = class_name(*answer.category);
        break;
    case AnswerKind::TimeRange:
        j["start_ms"] = answer.range->start_ms;
        j["end_ms"] = answer.range->end_ms;
        break;
    case AnswerKind::Compound:
        j["value"] = answer.flag;
        if (answer.category)
            j["category"] = class_name(*answer.category);
        if (answer.range) {
            j["start_ms"] = answer.range->start_ms;
            j["end_ms"] = answer.range->end_ms;
        }
        break;
    }
    return j;
}

Answer answer_from_json(const nlohmann::json& j) {
    auto kind = answer_kind_from_name(j.at("kind").get<std::string>());
    if (!kind)
        throw DataError("unknown answer kind: " + j.at("kind").get<std::string>());
    Answer a;
    a.kind = *kind;
    auto category_of = [](const nlohmann::json& v) {
        auto cls = class_from_name(v.get<std::string>());
        if (!cls)
            throw DataError("unknown activity class: " + v.get<std::string>());
        return *cls;
    };
    switch (*kind) {
    case AnswerKind::Bool:
        a.flag = j.at("value").get<bool>();
        break;
    case AnswerKind::Int:
        a.count = j.at("value").get<int64_t>();
        break;
    case AnswerKind::Category:
        a.category = category_of(j.at("value"));
        break;
    case AnswerKind::TimeRange:
        a.range = ClockRange{j.at("start_ms").get<int64_t>(), j.at("end_ms").get<int64_t>()};
        break;
    case AnswerKind::Compound:
        a.flag = j.at("value").get<bool>();
        if (j.contains("category"))
            a.category = category_of(j.at("category"));
        if (j.contains("start_ms"))
            a.range = ClockRange{j.at("start_ms").get<int64_t>(), j.at("end_ms").get<int64_t>()};
        break;
    }
    return a;
}

nlohmann::json sample_to_json(const HaystackSample& sample) {
    nlohmann::json j;
    j["id"] = sample.id;
    j["task"] = task_name(sample.task);
    j["context_s"] = sample.context_s;
    j["rate"] = sample.rate;
    j["split"] = sample.split;
    j["index"] = sample.index;
    j["participant"] = sample.participant;
    j["start_clock_ms"] = sample.start_clock_ms;
    j["question"] = sample.question;
    j["template_id"] = sample.template_id;
    j["answer"] = answer_to_json(sample.answer);
    j["answer_text"] = sample.answer_text;
    j["slots"] = sample.slots;
    j["seed"] = sample.seed;
    j["series_ref"] = sample.series_ref;
    if (!sample.rationale.empty())
        j["rationale"] = sample.rationale;
    auto timeline = nlohmann::json::array();
    for (const auto& e : sample.timeline) {
        nlohmann::json entry;
        entry["class"] = class_name(e.cls);
        entry["start_ms"] = e.start_ms;
        entry["end_ms"] = e.end_ms;
        entry["inserted"] = e.inserted;
        timeline.push_back(std::move(entry));
    }
    j["timeline"] = std::move(timeline);
    return j;
}

HaystackSample sample_from_json(const nlohmann::json& j) {
    HaystackSample s;
    s.id = j.at("id").get<std::string>();
    auto task = task_from_name(j.at("task").get<std::string>());
    if (!task)
        throw DataError("unknown task: " + j.at("task").get<std::string>());
    s.task = *task;
    s.context_s = j.at("context_s").get<double>();
    s.rate = j.at("rate").get<double>();
    s.split = j.at("split").get<std::string>();
    s.index = j.at("index").get<int64_t>();
    s.participant = j.at("participant").get<std::string>();
    s.start_clock_ms = j.at("start_clock_ms").get<int64_t>();
    s.question = j.at("question").get<std::string>();
    s.template_id = j.at("template_id").get<int>();
    s.answer = answer_from_json(j.at("answer"));
    s.answer_text = j.at("answer_text").get<std::string>();
    s.slots = j.at("slots").get<std::map<std::string, std::string>>();
    s.seed = j.at("seed").get<uint64_t>();
    s.series_ref = j.at("series_ref").get<std::string>();
    if (j.contains("rationale"))
        s.rationale = j.at("rationale").get<std::string>();
    for (const auto& entry : j.at("timeline")) {
        TimelineEntry e;
        auto cls = class_from_name(entry.at("class").get<std::string>());
        if (!cls)
            throw DataError("unknown timeline class: " + entry.at("class").get<std::string>());
        e.cls = *cls;
        e.start_ms = entry.at("start_ms").get<int64_t>();
        e.end_ms = entry.at("end_ms").get<int64_t>();
        e.inserted = entry.at("inserted").get<bool>();
        s.timeline.push_back(e);
    }
    return s;
}

std::string canonical_line(const nlohmann::json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

uint64_t derive_sample_seed(uint64_t master, TaskFamily task, double context_s,
                            const std::string& split, int64_t index) {
    uint64_t h = hash_string(master, task_name(task));
    h = hash_combine(h, std::bit_cast<uint64_t>(context_s));
    h = hash_string(h, split);
    h = hash_combine(h, static_cast<uint64_t>(index));
    return h;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    auto parent = path.parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp" + std::to_string(rd() % 1000000);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw DataError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace tshs
