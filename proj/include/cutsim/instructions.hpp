#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cutsim/planner.hpp"
#include "cutsim/rng.hpp"

namespace cutsim {

// Cutting specification carried by a language instruction; style/state may
// be absent until default resolution.
struct CutSpec {
    ObjectKind object = ObjectKind::Banana;
    std::optional<CutStyle> style;
    std::optional<CutState> state;
};

bool state_equal(const CutState& a, const CutState& b);
bool spec_equal(const CutSpec& a, const CutSpec& b);

// Missing style -> Normal; missing state -> Middle. Throws
// InstructionParseError when both are absent.
CutSpec resolve_defaults(const CutSpec& spec);

// All renderings (template x lexical variant) applicable to a resolved spec.
// generate_instruction draws uniformly from this set.
std::vector<std::string> enumerate_instructions(const CutSpec& resolved);

// Deterministic given the rng seed; the output parses back to the same spec.
std::string generate_instruction(const CutSpec& resolved, Rng& rng);

// Recovers object, optional style, optional state (numeric phrases
// normalized); throws InstructionParseError with the failing token span.
CutSpec parse_instruction(const std::string& text);

// Number of registered templates serving each cut state, for the coverage
// checks (>= 5 per state).
struct TemplateCoverage {
    int ratio = 0;
    int middle = 0;
    int split = 0;
};
TemplateCoverage template_coverage();

// The template registry is normally the built-in table; it can be replaced
// from a human-editable file. Lines are `state|style|flags|pattern` with '#'
// comments; style '*' means any, flags is a comma list of
// left_datum / r=<value> / k=<count> or '-'. Loading validates placeholders,
// the >= 5 per-state floor, and full style x state coverage, and throws
// ConfigError on violations.
void load_instruction_templates(const std::filesystem::path& path);
void reset_instruction_templates();

// The built-in table in the file format above, for exporting and editing.
std::string default_template_text();

}  // namespace cutsim
