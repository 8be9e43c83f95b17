#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lungbench::dataset {

// Inhalation, exhalation, wheeze, stridor, rhonchus, DAS (crackle), and the
// derived CAS class.
enum class EventClass { I, E, W, S, R, D, C };

const char* to_string(EventClass klass);
std::optional<EventClass> parse_event_class(std::string_view token);

struct LabelEvent {
    EventClass klass = EventClass::I;
    double start = 0.0;
    double end = 0.0;

    bool operator==(const LabelEvent&) const = default;
};

// One event per non-empty line: "<class> <start> <end>". Times are decimal
// seconds or HH:MM:SS.ffffff. Raw files may not carry the derived C class.
std::vector<LabelEvent> parse_label_file(std::string_view text);
std::vector<LabelEvent> read_label_file(const std::filesystem::path& path);

// Decimal seconds, shortest round-trip representation.
std::string format_label_file(std::span<const LabelEvent> labels);
void write_label_file(const std::filesystem::path& path, std::span<const LabelEvent> labels);

// Returns the input followed by a C copy of every W/S/R event.
std::vector<LabelEvent> derive_cas_labels(std::span<const LabelEvent> labels);

std::vector<LabelEvent> events_of(std::span<const LabelEvent> labels, EventClass klass);

}  // namespace lungbench::dataset
