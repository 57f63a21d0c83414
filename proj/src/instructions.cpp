#include "cutsim/instructions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cutsim/errors.hpp"
#include "cutsim/textio.hpp"

namespace cutsim {

bool state_equal(const CutState& a, const CutState& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ra = std::get_if<RatioState>(&a)) {
        const auto& rb = std::get<RatioState>(b);
        return ra->r == rb.r && ra->side == rb.side;
    }
    if (const auto* sa = std::get_if<SplitState>(&a)) {
        return sa->k == std::get<SplitState>(b).k;
    }
    return true;  // Middle
}

bool spec_equal(const CutSpec& a, const CutSpec& b) {
    if (a.object != b.object) return false;
    if (a.style.has_value() != b.style.has_value()) return false;
    if (a.style && *a.style != *b.style) return false;
    if (a.state.has_value() != b.state.has_value()) return false;
    if (a.state && !state_equal(*a.state, *b.state)) return false;
    return true;
}

CutSpec resolve_defaults(const CutSpec& spec) {
    if (!spec.style && !spec.state) {
        throw InstructionParseError("underspecified instruction: no style and no state", 0, 0);
    }
    CutSpec out = spec;
    if (!out.style) out.style = CutStyle::Normal;
    if (!out.state) out.state = MiddleState{};
    return out;
}

namespace {

enum class StateKind { Ratio, Middle, Split };

StateKind kind_of(const CutState& s) {
    if (std::holds_alternative<RatioState>(s)) return StateKind::Ratio;
    if (std::holds_alternative<SplitState>(s)) return StateKind::Split;
    return StateKind::Middle;
}

const char* style_verb(CutStyle s) {
    switch (s) {
        case CutStyle::Normal: return "Normal Cut";
        case CutStyle::Bias: return "Bias cut";
        case CutStyle::Guillotine: return "Guillotine cut";
        case CutStyle::Saw: return "Saw cut";
    }
    return "?";
}

const char* style_adjective(CutStyle s) {
    switch (s) {
        case CutStyle::Normal: return "normal";
        case CutStyle::Bias: return "bias";
        case CutStyle::Guillotine: return "guillotine";
        case CutStyle::Saw: return "saw";
    }
    return "?";
}

struct RatioWord {
    const char* text;
    int num;
    int den;
    double value() const { return static_cast<double>(num) / den; }
};

// Every phrase normalizes to num/den; parser and generator share the table.
constexpr RatioWord kRatioWords[] = {
    {"half", 1, 2},          {"two quarters", 2, 4},  {"a quarter", 1, 4},
    {"one quarter", 1, 4},   {"three quarters", 3, 4}, {"one third", 1, 3},
    {"two thirds", 2, 3},    {"one fifth", 1, 5},     {"two fifths", 2, 5},
    {"three fifths", 3, 5},  {"four fifths", 4, 5},   {"one tenth", 1, 10},
    {"three tenths", 3, 10}, {"seven tenths", 7, 10}, {"nine tenths", 9, 10},
};

constexpr const char* kCountWords[] = {"zero", "one", "two",   "three", "four",
                                       "five", "six", "seven", "eight", "nine"};

// Ratio phrase variants for a value, each ending without trailing space.
std::vector<std::string> ratio_variants(double r) {
    std::vector<std::string> out;
    out.push_back(format_double(r) + " ratio");
    const double pct = std::round(r * 100.0);
    if (pct >= 1.0 && pct <= 99.0 && pct / 100.0 == r) {
        out.push_back(format_double(pct) + "%");
    }
    for (const RatioWord& w : kRatioWords) {
        if (w.value() == r) out.push_back(w.text);
    }
    return out;
}

std::vector<std::string> count_variants(int k) {
    std::vector<std::string> out{std::to_string(k)};
    if (k >= 0 && k <= 9) out.push_back(kCountWords[k]);
    return out;
}

const char* side_word(CutSide s) { return s == CutSide::Left ? "left" : "right"; }

// Template pattern placeholders: {object}, {style}, {styleadj}, {ratio},
// {side}, {k}. Applicability is data-driven below.
struct Template {
    std::string pattern;
    StateKind state;
    // nullopt = applicable to every style; set = that style only. Styleless
    // patterns (no {style} and no style keyword) are Normal-only so default
    // resolution round-trips.
    std::optional<CutStyle> style;
    // Ratio restrictions.
    bool requires_left_datum = false;  // no side word in the pattern
    double fixed_ratio = -1.0;         // >0 = applicable to that value only
    // Split restrictions.
    int fixed_k = 0;  // >0 = applicable to that k only (ordinal phrasings)
};

const Template kBuiltinTemplates[] = {
    // Ratio state.
    {"{style} the {object} at {ratio} from the {side} side.", StateKind::Ratio,
     CutStyle::Normal},
    {"{style} the {object} at {ratio} toward the {side} end.", StateKind::Ratio,
     CutStyle::Bias},
    {"{style} the {object} at {ratio} from the {side} side.", StateKind::Ratio,
     CutStyle::Guillotine},
    {"{style} the {object} at {ratio} along its length.", StateKind::Ratio, CutStyle::Saw,
     true},
    {"cut the {object} at {ratio} from the {side} side.", StateKind::Ratio, CutStyle::Normal},
    {"slice the {object} halfway along its length.", StateKind::Ratio, CutStyle::Normal, true,
     0.5},
    {"slice the {object} at {ratio} along its length.", StateKind::Ratio, CutStyle::Normal,
     true},
    {"{style} the {object} at {ratio} along its length.", StateKind::Ratio, std::nullopt,
     true},
    {"{style} the {object} at {ratio} from the {side} side.", StateKind::Ratio, std::nullopt},

    // Middle state.
    {"{style} the {object} at the midpoint along its length.", StateKind::Middle,
     CutStyle::Normal},
    {"{style} the {object} at the midpoint from the left side.", StateKind::Middle,
     CutStyle::Bias},
    {"{style} the {object} at the center from the top direction.", StateKind::Middle,
     CutStyle::Guillotine},
    {"{style} the {object} at the midpoint from the right side.", StateKind::Middle,
     CutStyle::Saw},
    {"cut the {object} at the midpoint.", StateKind::Middle, CutStyle::Normal},
    {"slice the {object} down the middle.", StateKind::Middle, CutStyle::Normal},
    {"{style} the {object} at the center of its length.", StateKind::Middle, std::nullopt},

    // Split state. Ordinal phrasings bind to the smallest k they fit.
    {"{style} the {object} at the first split boundary from the right side.", StateKind::Split,
     CutStyle::Normal, false, -1.0, 3},
    {"{style} the {object} at the first split boundary along its length.", StateKind::Split,
     CutStyle::Bias, false, -1.0, 3},
    {"{style} the {object} at the first split boundary from the top.", StateKind::Split,
     CutStyle::Guillotine, false, -1.0, 3},
    {"{style} the {object} at the third boundary toward the right end.", StateKind::Split,
     CutStyle::Saw, false, -1.0, 4},
    {"cut the {object} into {k} equal pieces.", StateKind::Split, CutStyle::Normal},
    {"slice the {object} into {k} equal parts.", StateKind::Split, CutStyle::Normal},
    {"{style} the {object} into {k} even segments.", StateKind::Split, std::nullopt},
    {"split the {object} into {k} equal slices using a {styleadj} cut.", StateKind::Split,
     std::nullopt},
};

std::vector<Template>& registry() {
    static std::vector<Template> templates(std::begin(kBuiltinTemplates),
                                           std::end(kBuiltinTemplates));
    return templates;
}

bool applicable(const Template& t, const CutSpec& spec) {
    const CutStyle style = *spec.style;
    const CutState& state = *spec.state;
    if (t.state != kind_of(state)) return false;
    if (t.style && *t.style != style) return false;
    if (const auto* ratio = std::get_if<RatioState>(&state)) {
        if (t.requires_left_datum && ratio->side != CutSide::Left) return false;
        if (t.fixed_ratio > 0.0 && ratio->r != t.fixed_ratio) return false;
    }
    if (const auto* split = std::get_if<SplitState>(&state)) {
        if (t.fixed_k > 0 && split->k != t.fixed_k) return false;
    }
    return true;
}

std::string substitute(const std::string& pattern, const std::string& key,
                       const std::string& value) {
    std::string out = pattern;
    size_t pos;
    while ((pos = out.find(key)) != std::string::npos) {
        out.replace(pos, key.size(), value);
    }
    return out;
}

std::vector<std::string> render_all(const Template& t, const CutSpec& spec) {
    const CutStyle style = *spec.style;
    const CutState& state = *spec.state;
    std::string base = t.pattern;
    base = substitute(base, "{object}", to_string(spec.object));
    base = substitute(base, "{style}", style_verb(style));
    base = substitute(base, "{styleadj}", style_adjective(style));

    std::vector<std::string> out;
    if (const auto* ratio = std::get_if<RatioState>(&state)) {
        base = substitute(base, "{side}", side_word(ratio->side));
        if (base.find("{ratio}") != std::string::npos) {
            for (const std::string& variant : ratio_variants(ratio->r)) {
                out.push_back(substitute(base, "{ratio}", variant));
            }
        } else {
            out.push_back(base);
        }
    } else if (const auto* split = std::get_if<SplitState>(&state)) {
        if (base.find("{k}") != std::string::npos) {
            for (const std::string& variant : count_variants(split->k)) {
                out.push_back(substitute(base, "{k}", variant));
            }
        } else {
            out.push_back(base);
        }
    } else {
        out.push_back(base);
    }
    return out;
}

}  // namespace

TemplateCoverage template_coverage() {
    TemplateCoverage c;
    for (const Template& t : registry()) {
        switch (t.state) {
            case StateKind::Ratio: ++c.ratio; break;
            case StateKind::Middle: ++c.middle; break;
            case StateKind::Split: ++c.split; break;
        }
    }
    return c;
}

std::vector<std::string> enumerate_instructions(const CutSpec& resolved) {
    if (!resolved.style || !resolved.state) {
        throw InstructionParseError("spec must be resolved before generation", 0, 0);
    }
    std::vector<std::string> out;
    for (const Template& t : registry()) {
        if (!applicable(t, resolved)) continue;
        for (std::string& s : render_all(t, resolved)) {
            out.push_back(std::move(s));
        }
    }
    if (out.empty()) {
        throw ConfigError("no applicable instruction template for this style/state pair");
    }
    return out;
}

namespace {

const char* state_name(StateKind s) {
    switch (s) {
        case StateKind::Ratio: return "ratio";
        case StateKind::Middle: return "middle";
        case StateKind::Split: return "split";
    }
    return "?";
}

std::string template_line(const Template& t) {
    std::string line = state_name(t.state);
    line += '|';
    line += t.style ? to_string(*t.style) : "*";
    line += '|';
    std::string flags;
    if (t.requires_left_datum) flags += "left_datum";
    if (t.fixed_ratio > 0.0) {
        if (!flags.empty()) flags += ',';
        flags += "r=" + format_double(t.fixed_ratio);
    }
    if (t.fixed_k > 0) {
        if (!flags.empty()) flags += ',';
        flags += "k=" + std::to_string(t.fixed_k);
    }
    line += flags.empty() ? "-" : flags;
    line += '|';
    line += t.pattern;
    return line;
}

void validate_templates(const std::vector<Template>& templates) {
    static const char* known_placeholders[] = {"{object}", "{style}", "{styleadj}",
                                               "{ratio}",  "{side}",  "{k}"};
    for (const Template& t : templates) {
        size_t pos = 0;
        while ((pos = t.pattern.find('{', pos)) != std::string::npos) {
            const size_t end = t.pattern.find('}', pos);
            if (end == std::string::npos) {
                throw ConfigError("unterminated placeholder in template: " + t.pattern);
            }
            const std::string ph = t.pattern.substr(pos, end - pos + 1);
            bool known = false;
            for (const char* k : known_placeholders) {
                if (ph == k) known = true;
            }
            if (!known) {
                throw ConfigError("unknown placeholder " + ph + " in template: " + t.pattern);
            }
            pos = end + 1;
        }
        if (t.state == StateKind::Split && t.fixed_k == 0 &&
            t.pattern.find("{k}") == std::string::npos) {
            throw ConfigError("split template needs {k} or a fixed k binding: " + t.pattern);
        }
    }

    TemplateCoverage cov;
    for (const Template& t : templates) {
        switch (t.state) {
            case StateKind::Ratio: ++cov.ratio; break;
            case StateKind::Middle: ++cov.middle; break;
            case StateKind::Split: ++cov.split; break;
        }
    }
    if (cov.ratio < 5 || cov.middle < 5 || cov.split < 5) {
        throw ConfigError("each cut state needs at least 5 templates (ratio " +
                          std::to_string(cov.ratio) + ", middle " +
                          std::to_string(cov.middle) + ", split " +
                          std::to_string(cov.split) + ")");
    }

    // Full style x state coverage over the task grid.
    const CutStyle styles[] = {CutStyle::Normal, CutStyle::Bias, CutStyle::Guillotine,
                               CutStyle::Saw};
    std::vector<CutState> states;
    for (int i = 1; i <= 9; ++i) {
        states.push_back(RatioState{i / 10.0, CutSide::Left});
        states.push_back(RatioState{i / 10.0, CutSide::Right});
    }
    states.push_back(MiddleState{});
    for (int k : {3, 4, 5}) states.push_back(SplitState{k});
    for (CutStyle style : styles) {
        for (const CutState& state : states) {
            CutSpec spec;
            spec.object = ObjectKind::Apple;
            spec.style = style;
            spec.state = state;
            bool covered = false;
            for (const Template& t : templates) {
                if (applicable(t, spec)) covered = true;
            }
            if (!covered) {
                throw ConfigError(std::string("no template covers style ") +
                                  to_string(style) + " with one of the task states");
            }
        }
    }
}

}  // namespace

std::string default_template_text() {
    std::string out =
        "# instruction templates: state|style|flags|pattern\n"
        "# style '*' applies to every cut style; flags: left_datum, r=<value>, k=<count>\n";
    for (const Template& t : kBuiltinTemplates) {
        out += template_line(t);
        out += '\n';
    }
    return out;
}

void load_instruction_templates(const std::filesystem::path& path) {
    std::vector<Template> loaded;
    const std::string text = read_file(path);
    size_t lineno = 0;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const auto err = [&](const std::string& msg) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
        };
        const size_t p1 = line.find('|');
        const size_t p2 = p1 == std::string::npos ? std::string::npos : line.find('|', p1 + 1);
        const size_t p3 = p2 == std::string::npos ? std::string::npos : line.find('|', p2 + 1);
        if (p3 == std::string::npos) {
            err("expected state|style|flags|pattern");
        }
        Template t;
        const std::string state = line.substr(0, p1);
        if (state == "ratio") {
            t.state = StateKind::Ratio;
        } else if (state == "middle") {
            t.state = StateKind::Middle;
        } else if (state == "split") {
            t.state = StateKind::Split;
        } else {
            err("unknown state '" + state + "'");
        }
        const std::string style = line.substr(p1 + 1, p2 - p1 - 1);
        if (style != "*") {
            const auto parsed = style_from_string(style);
            if (!parsed) err("unknown style '" + style + "'");
            t.style = *parsed;
        }
        std::string flags = line.substr(p2 + 1, p3 - p2 - 1);
        if (flags != "-") {
            size_t fpos = 0;
            while (fpos < flags.size()) {
                size_t comma = flags.find(',', fpos);
                if (comma == std::string::npos) comma = flags.size();
                const std::string flag = flags.substr(fpos, comma - fpos);
                fpos = comma + 1;
                if (flag == "left_datum") {
                    t.requires_left_datum = true;
                } else if (flag.rfind("r=", 0) == 0) {
                    t.fixed_ratio = std::strtod(flag.c_str() + 2, nullptr);
                    if (!(t.fixed_ratio > 0.0 && t.fixed_ratio < 1.0)) {
                        err("fixed ratio must lie in (0,1)");
                    }
                } else if (flag.rfind("k=", 0) == 0) {
                    t.fixed_k = std::atoi(flag.c_str() + 2);
                    if (t.fixed_k < 2) err("fixed k must be >= 2");
                } else {
                    err("unknown flag '" + flag + "'");
                }
            }
        }
        t.pattern = line.substr(p3 + 1);
        if (t.pattern.empty()) err("empty pattern");
        loaded.push_back(std::move(t));
    }
    validate_templates(loaded);
    registry() = std::move(loaded);
}

void reset_instruction_templates() {
    registry().assign(std::begin(kBuiltinTemplates), std::end(kBuiltinTemplates));
}

std::string generate_instruction(const CutSpec& resolved, Rng& rng) {
    const std::vector<std::string> all = enumerate_instructions(resolved);
    return all[rng.below(all.size())];
}

namespace {

struct Token {
    std::string text;  // lower-cased, punctuation-stripped
    size_t begin;
    size_t end;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        std::string tok = text.substr(i, j - i);
        // Strip sentence punctuation; numbers never end with '.' in this
        // grammar, so a trailing dot is always sentence punctuation.
        while (!tok.empty() && (tok.back() == '.' || tok.back() == ',' || tok.back() == '!')) {
            tok.pop_back();
        }
        std::transform(tok.begin(), tok.end(), tok.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!tok.empty()) tokens.push_back({tok, i, j});
        i = j;
    }
    return tokens;
}

bool parse_number(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

std::optional<int> ordinal_value(const std::string& s) {
    if (s == "first") return 1;
    if (s == "second") return 2;
    if (s == "third") return 3;
    if (s == "fourth") return 4;
    if (s == "fifth") return 5;
    return std::nullopt;
}

std::optional<int> count_word(const std::string& s) {
    for (int i = 0; i < 10; ++i) {
        if (s == kCountWords[i]) return i;
    }
    return std::nullopt;
}

}  // namespace

CutSpec parse_instruction(const std::string& text) {
    const std::vector<Token> tokens = tokenize(text);
    if (tokens.empty()) {
        throw InstructionParseError("empty instruction", 0, text.size());
    }

    CutSpec spec;
    bool object_found = false;
    std::optional<CutSide> side;
    bool split_boundary_form = false;
    std::optional<int> boundary_ordinal;

    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& w = tokens[i].text;

        if (auto obj = object_from_string(w)) {
            spec.object = *obj;
            object_found = true;
            continue;
        }
        if (auto st = style_from_string(w)) {
            spec.style = *st;
            continue;
        }
        if (w == "left") side = CutSide::Left;
        if (w == "right") side = CutSide::Right;

        if (w == "midpoint" || w == "center" || w == "middle") {
            spec.state = MiddleState{};
            continue;
        }
        if (w == "halfway") {
            spec.state = RatioState{0.5, CutSide::Left};
            continue;
        }
        if (w == "boundary") {
            split_boundary_form = true;
            continue;
        }
        if (auto ord = ordinal_value(w)) {
            // Only meaningful right before "boundary"/"split".
            if (i + 1 < tokens.size() &&
                (tokens[i + 1].text == "boundary" || tokens[i + 1].text == "split")) {
                boundary_ordinal = *ord;
            }
            continue;
        }

        // "into <k> pieces|parts|segments|slices"
        if (w == "into" && i + 2 < tokens.size()) {
            double num = 0.0;
            std::optional<int> k;
            if (parse_number(tokens[i + 1].text, &num)) {
                k = static_cast<int>(num);
            } else if (auto cw = count_word(tokens[i + 1].text)) {
                k = *cw;
            }
            if (k) {
                for (size_t j = i + 2; j < std::min(tokens.size(), i + 5); ++j) {
                    const std::string& nxt = tokens[j].text;
                    if (nxt == "pieces" || nxt == "parts" || nxt == "segments" ||
                        nxt == "slices") {
                        spec.state = SplitState{*k};
                        break;
                    }
                }
            }
            continue;
        }

        // "<value> ratio" and "<pct>%"
        if (!w.empty() && w.back() == '%') {
            double pct = 0.0;
            if (parse_number(w.substr(0, w.size() - 1), &pct)) {
                spec.state = RatioState{pct / 100.0, CutSide::Left};
            } else {
                throw InstructionParseError("bad percentage token '" + w + "'",
                                            tokens[i].begin, tokens[i].end);
            }
            continue;
        }
        double value = 0.0;
        if (parse_number(w, &value)) {
            if (i + 1 < tokens.size() && tokens[i + 1].text == "ratio") {
                spec.state = RatioState{value, CutSide::Left};
            }
            continue;
        }
        // Fraction word bigrams ("three quarters") and "half".
        if (i + 1 < tokens.size()) {
            const std::string bigram = w + " " + tokens[i + 1].text;
            bool matched = false;
            for (const RatioWord& rw : kRatioWords) {
                if (bigram == rw.text) {
                    spec.state = RatioState{rw.value(), CutSide::Left};
                    matched = true;
                    break;
                }
            }
            if (matched) {
                ++i;
                continue;
            }
        }
        for (const RatioWord& rw : kRatioWords) {
            if (w == rw.text) {
                spec.state = RatioState{rw.value(), CutSide::Left};
                break;
            }
        }
    }

    if (!object_found) {
        throw InstructionParseError("no known object in instruction", 0, text.size());
    }
    if (split_boundary_form && !spec.state) {
        // Boundary-ordinal split phrase: smallest k the ordinal fits.
        const int ord = boundary_ordinal.value_or(1);
        spec.state = SplitState{std::max(3, ord + 1)};
    }
    if (spec.state) {
        if (auto* ratio = std::get_if<RatioState>(&*spec.state)) {
            if (side) ratio->side = *side;
            if (!(ratio->r > 0.0 && ratio->r < 1.0)) {
                throw InstructionParseError("ratio " + format_double(ratio->r) +
                                                " outside (0,1)",
                                            0, text.size());
            }
        }
    }
    if (!spec.style && !spec.state) {
        throw InstructionParseError("no style or cut state recognized", 0, text.size());
    }
    return spec;
}

}  // namespace cutsim
