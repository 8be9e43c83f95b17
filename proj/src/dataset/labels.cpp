#include "lungbench/dataset/labels.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/common/format.hpp"

namespace lungbench::dataset {

namespace {

std::optional<double> parse_decimal(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Decimal seconds, or HH:MM:SS(.fff) / MM:SS(.fff).
std::optional<double> parse_time(std::string_view s) {
    if (s.find(':') == std::string_view::npos) return parse_decimal(s);
    double total = 0.0;
    int fields = 0;
    while (true) {
        const auto colon = s.find(':');
        const std::string_view part = s.substr(0, colon);
        const auto v = parse_decimal(part);
        if (!v || *v < 0.0) return std::nullopt;
        ++fields;
        if (colon == std::string_view::npos) {
            total = total * 60.0 + *v;
            break;
        }
        if (part.find('.') != std::string_view::npos) return std::nullopt;
        total = total * 60.0 + *v;
        s.remove_prefix(colon + 1);
    }
    if (fields > 3) return std::nullopt;
    return total;
}

[[noreturn]] void line_error(std::size_t line, const std::string& code, const std::string& what) {
    throw Error(code, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

const char* to_string(EventClass klass) {
    switch (klass) {
        case EventClass::I: return "I";
        case EventClass::E: return "E";
        case EventClass::W: return "W";
        case EventClass::S: return "S";
        case EventClass::R: return "R";
        case EventClass::D: return "D";
        case EventClass::C: return "C";
    }
    return "?";
}

std::optional<EventClass> parse_event_class(std::string_view token) {
    if (token.size() != 1) return std::nullopt;
    switch (token[0]) {
        case 'I': return EventClass::I;
        case 'E': return EventClass::E;
        case 'W': return EventClass::W;
        case 'S': return EventClass::S;
        case 'R': return EventClass::R;
        case 'D': return EventClass::D;
        case 'C': return EventClass::C;
        default: return std::nullopt;
    }
}

std::vector<LabelEvent> parse_label_file(std::string_view text) {
    std::vector<LabelEvent> events;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        std::istringstream fields{std::string(line)};
        std::string cls, start_s, end_s, extra;
        if (!(fields >> cls)) continue;  // blank line
        if (!(fields >> start_s >> end_s) || (fields >> extra)) {
            line_error(line_no, "labels.syntax", "expected \"<class> <start> <end>\"");
        }
        // Some exports end with a UTF-8 BOM on the first token.
        if (line_no == 1 && cls.starts_with("\xEF\xBB\xBF")) cls.erase(0, 3);

        const auto klass = parse_event_class(cls);
        if (!klass || *klass == EventClass::C) {
            line_error(line_no, "labels.class", "unknown class token '" + cls + "'");
        }
        const auto start = parse_time(start_s);
        const auto end = parse_time(end_s);
        if (!start || !end) line_error(line_no, "labels.time", "unparsable time");
        if (*start < 0.0 || *end > kClipSeconds) {
            line_error(line_no, "labels.range", "time out of range [0, 15]");
        }
        if (*end <= *start) line_error(line_no, "labels.order", "end before start");
        events.push_back({*klass, *start, *end});
    }
    return events;
}

std::vector<LabelEvent> read_label_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io.open", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_label_file(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::string format_label_file(std::span<const LabelEvent> labels) {
    std::string out;
    for (const auto& ev : labels) {
        out += to_string(ev.klass);
        out += ' ';
        out += format_roundtrip(ev.start);
        out += ' ';
        out += format_roundtrip(ev.end);
        out += '\n';
    }
    return out;
}

void write_label_file(const std::filesystem::path& path, std::span<const LabelEvent> labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io.open", "cannot write " + path.string());
    out << format_label_file(labels);
}

std::vector<LabelEvent> derive_cas_labels(std::span<const LabelEvent> labels) {
    std::vector<LabelEvent> out(labels.begin(), labels.end());
    for (const auto& ev : labels) {
        if (ev.klass == EventClass::W || ev.klass == EventClass::S || ev.klass == EventClass::R) {
            out.push_back({EventClass::C, ev.start, ev.end});
        }
    }
    return out;
}

std::vector<LabelEvent> events_of(std::span<const LabelEvent> labels, EventClass klass) {
    std::vector<LabelEvent> out;
    for (const auto& ev : labels) {
        if (ev.klass == klass) out.push_back(ev);
    }
    return out;
}

}  // namespace lungbench::dataset
