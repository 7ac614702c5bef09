#include "tailopt/machine_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "tailopt/error.hpp"

namespace tailopt {

namespace {

struct Token {
    std::string text;
    std::size_t column;
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            if (is_space(raw[i])) {
                ++i;
            } else if (raw[i] == '{' || raw[i] == '}') {
                line.tokens.push_back({std::string(1, raw[i]), i + 1});
                ++i;
            } else {
                std::size_t start = i;
                while (i < raw.size() && !is_space(raw[i]) && raw[i] != '{' && raw[i] != '}') ++i;
                line.tokens.push_back({std::string(raw.substr(start, i - start)), start + 1});
            }
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

enum class Kind { mealy, om, nfa };

struct Document {
    Kind kind;
    std::optional<Alphabet> inputs;
    std::optional<Alphabet> outputs;
    std::vector<std::string> states;
    std::optional<Alphabet> state_index;  // names → indices, reusing the alphabet lookup
    std::optional<StateId> initial;
    std::vector<const Line*> transitions;
};

[[noreturn]] void fail(const Line& line, const Token& token, const std::string& what) {
    throw ParseError(line.number, token.column, what);
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
    throw ParseError(line.number, line.tokens.front().column, what);
}

Alphabet declare(const Line& line, const char* what) {
    if (line.tokens.size() < 2) fail(line, std::string("'") + what + "' needs at least one name");
    std::vector<std::string> names;
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
        const Token& t = line.tokens[i];
        if (t.text == "{" || t.text == "}") fail(line, t, "unexpected '" + t.text + "'");
        if (!seen.insert(t.text).second) fail(line, t, "duplicate name '" + t.text + "'");
        names.push_back(t.text);
    }
    return Alphabet(std::move(names));
}

Document read_document(const std::vector<Line>& lines) {
    if (lines.empty()) throw ParseError(1, 1, "empty document; expected 'type'");
    const Line& head = lines.front();
    if (head.tokens[0].text != "type") fail(head, "expected 'type' as the first directive");
    if (head.tokens.size() != 2) fail(head, "expected 'type mealy|om|nfa'");
    Document doc{};
    const std::string& kind = head.tokens[1].text;
    if (kind == "mealy") doc.kind = Kind::mealy;
    else if (kind == "om") doc.kind = Kind::om;
    else if (kind == "nfa") doc.kind = Kind::nfa;
    else fail(head, head.tokens[1], "unknown machine type '" + kind + "'");

    const Line* initial_line = nullptr;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& line = lines[i];
        const std::string& key = line.tokens[0].text;
        if (key == "inputs") {
            if (doc.inputs) fail(line, "duplicate 'inputs'");
            doc.inputs = declare(line, "inputs");
        } else if (key == "outputs") {
            if (doc.kind == Kind::nfa) fail(line, "'outputs' is not allowed for nfa");
            if (doc.outputs) fail(line, "duplicate 'outputs'");
            doc.outputs = declare(line, "outputs");
        } else if (key == "states") {
            if (doc.state_index) fail(line, "duplicate 'states'");
            doc.state_index = declare(line, "states");
            doc.states = doc.state_index->names();
        } else if (key == "initial") {
            if (initial_line) fail(line, "duplicate 'initial'");
            if (line.tokens.size() != 2) fail(line, "expected 'initial <state>'");
            initial_line = &line;
        } else if (key == "trans") {
            doc.transitions.push_back(&line);
        } else if (key == "type") {
            fail(line, "duplicate 'type'");
        } else {
            fail(line, line.tokens[0], "unknown directive '" + key + "'");
        }
    }
    const Line& last = lines.back();
    if (!doc.inputs) throw ParseError(last.number, 0, "missing 'inputs'");
    if (doc.kind != Kind::nfa && !doc.outputs) throw ParseError(last.number, 0, "missing 'outputs'");
    if (!doc.state_index) throw ParseError(last.number, 0, "missing 'states'");
    if (!initial_line) throw ParseError(last.number, 0, "missing 'initial'");
    const Token& init = initial_line->tokens[1];
    auto s = doc.state_index->find(init.text);
    if (!s) fail(*initial_line, init, "unknown state '" + init.text + "'");
    doc.initial = *s;
    return doc;
}

StateId state_of(const Document& doc, const Line& line, const Token& t) {
    auto s = doc.state_index->find(t.text);
    if (!s) fail(line, t, "unknown state '" + t.text + "'");
    return *s;
}

Symbol symbol_of(const Alphabet& a, const Line& line, const Token& t, const char* what) {
    auto s = a.find(t.text);
    if (!s) fail(line, t, std::string("unknown ") + what + " '" + t.text + "'");
    return *s;
}

/// Reads `{ s* }` starting at token index `pos`; leaves `pos` past the `}`.
std::vector<StateId> read_set(const Document& doc, const Line& line, std::size_t& pos) {
    const auto& tk = line.tokens;
    if (pos >= tk.size() || tk[pos].text != "{") {
        if (pos >= tk.size()) fail(line, "expected '{'");
        fail(line, tk[pos], "expected '{'");
    }
    ++pos;
    std::vector<StateId> set;
    while (true) {
        if (pos >= tk.size()) fail(line, "unterminated '{'");
        if (tk[pos].text == "}") break;
        if (tk[pos].text == "{") fail(line, tk[pos], "nested '{'");
        set.push_back(state_of(doc, line, tk[pos]));
        ++pos;
    }
    ++pos;
    return set;
}

void expect_end(const Line& line, std::size_t pos) {
    if (pos < line.tokens.size()) fail(line, line.tokens[pos], "unexpected token '" + line.tokens[pos].text + "'");
}

MealyMachine build_mealy(const Document& doc) {
    const std::size_t n_in = doc.inputs->size();
    const std::size_t cells = doc.states.size() * n_in;
    std::vector<StateId> next(cells, 0);
    std::vector<Symbol> out(cells, 0);
    std::vector<char> seen(cells, 0);
    for (const Line* lp : doc.transitions) {
        const Line& line = *lp;
        if (line.tokens.size() != 5) fail(line, "expected 'trans <state> <in> <state> <out>'");
        StateId s = state_of(doc, line, line.tokens[1]);
        Symbol x = symbol_of(*doc.inputs, line, line.tokens[2], "input");
        StateId t = state_of(doc, line, line.tokens[3]);
        Symbol y = symbol_of(*doc.outputs, line, line.tokens[4], "output");
        std::size_t cell = s * n_in + x;
        if (seen[cell]) fail(line, "duplicate transition for (" + doc.states[s] + "," + doc.inputs->name(x) + ")");
        seen[cell] = 1;
        next[cell] = t;
        out[cell] = y;
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (!seen[cell])
            throw ParseError(0, 0, "incomplete mealy machine: missing (" + doc.states[cell / n_in] + "," +
                                       doc.inputs->name(static_cast<Symbol>(cell % n_in)) + ")");
    }
    return MealyMachine(*doc.inputs, *doc.outputs, doc.states, *doc.initial, std::move(next), std::move(out));
}

ObservationMachine build_om(const Document& doc) {
    const std::size_t n_in = doc.inputs->size();
    const std::size_t cells = doc.states.size() * n_in;
    std::vector<std::vector<StateId>> delta(cells);
    std::vector<Symbol> out(cells, 0);
    for (const Line* lp : doc.transitions) {
        const Line& line = *lp;
        if (line.tokens.size() < 3) fail(line, "expected 'trans <state> <in> { <state>+ } <out>'");
        StateId s = state_of(doc, line, line.tokens[1]);
        Symbol x = symbol_of(*doc.inputs, line, line.tokens[2], "input");
        std::size_t pos = 3;
        auto targets = read_set(doc, line, pos);
        if (targets.empty()) fail(line, "empty successor set");
        if (pos >= line.tokens.size()) fail(line, "missing output symbol");
        Symbol y = symbol_of(*doc.outputs, line, line.tokens[pos], "output");
        expect_end(line, pos + 1);
        std::size_t cell = s * n_in + x;
        if (!delta[cell].empty())
            fail(line, "duplicate transition for (" + doc.states[s] + "," + doc.inputs->name(x) + ")");
        delta[cell] = std::move(targets);
        out[cell] = y;
    }
    return ObservationMachine(*doc.inputs, *doc.outputs, doc.states, *doc.initial, std::move(delta),
                              std::move(out));
}

Nfa build_nfa(const Document& doc) {
    const std::size_t n_in = doc.inputs->size();
    std::vector<std::vector<StateId>> delta(doc.states.size() * n_in);
    for (const Line* lp : doc.transitions) {
        const Line& line = *lp;
        if (line.tokens.size() < 3) fail(line, "expected 'trans <state> <sym> { <state>* }'");
        StateId s = state_of(doc, line, line.tokens[1]);
        Symbol a = symbol_of(*doc.inputs, line, line.tokens[2], "symbol");
        std::size_t pos = 3;
        auto targets = read_set(doc, line, pos);
        expect_end(line, pos);
        auto& cell = delta[s * n_in + a];
        cell.insert(cell.end(), targets.begin(), targets.end());
    }
    return Nfa(*doc.inputs, doc.states, *doc.initial, std::move(delta));
}

template <class M>
void write_header(std::ostringstream& os, const char* kind, const M& m, const Alphabet& inputs,
                  const Alphabet* outputs) {
    os << "type " << kind << '\n';
    os << "inputs";
    for (const auto& s : inputs.names()) os << ' ' << s;
    os << '\n';
    if (outputs) {
        os << "outputs";
        for (const auto& s : outputs->names()) os << ' ' << s;
        os << '\n';
    }
    os << "states";
    for (const auto& s : m.state_names()) os << ' ' << s;
    os << '\n';
    os << "initial " << m.state_names()[m.initial()] << '\n';
}

void write_set(std::ostringstream& os, const std::vector<std::string>& names, const std::vector<StateId>& set) {
    os << '{';
    for (StateId t : set) os << ' ' << names[t];
    os << " }";
}

}  // namespace

AnyMachine parse_machine(std::string_view text) {
    auto lines = tokenize(text);
    Document doc = read_document(lines);
    switch (doc.kind) {
        case Kind::mealy: return build_mealy(doc);
        case Kind::om: return build_om(doc);
        case Kind::nfa: return build_nfa(doc);
    }
    throw ParseError(1, 1, "unreachable");
}

MealyMachine parse_mealy(std::string_view text) {
    auto m = parse_machine(text);
    if (auto* p = std::get_if<MealyMachine>(&m)) return std::move(*p);
    throw ParseError(1, 1, "expected a 'mealy' document");
}

ObservationMachine parse_om(std::string_view text) {
    auto m = parse_machine(text);
    if (auto* p = std::get_if<ObservationMachine>(&m)) return std::move(*p);
    if (auto* p = std::get_if<MealyMachine>(&m)) return ObservationMachine::from_mealy(*p);
    throw ParseError(1, 1, "expected an 'om' document");
}

Nfa parse_nfa(std::string_view text) {
    auto m = parse_machine(text);
    if (auto* p = std::get_if<Nfa>(&m)) return std::move(*p);
    throw ParseError(1, 1, "expected an 'nfa' document");
}

std::string serialize_machine(const MealyMachine& m) {
    std::ostringstream os;
    write_header(os, "mealy", m, m.inputs(), &m.outputs());
    const auto& names = m.state_names();
    for (StateId s = 0; s < m.state_count(); ++s)
        for (Symbol x = 0; x < m.inputs().size(); ++x)
            os << "trans " << names[s] << ' ' << m.inputs().name(x) << ' ' << names[m.next(s, x)] << ' '
               << m.outputs().name(m.output(s, x)) << '\n';
    return os.str();
}

std::string serialize_machine(const ObservationMachine& m) {
    std::ostringstream os;
    write_header(os, "om", m, m.inputs(), &m.outputs());
    const auto& names = m.state_names();
    for (StateId s = 0; s < m.state_count(); ++s)
        for (Symbol y = 0; y < m.inputs().size(); ++y) {
            if (!m.defined(s, y)) continue;
            os << "trans " << names[s] << ' ' << m.inputs().name(y) << ' ';
            write_set(os, names, m.successors(s, y));
            os << ' ' << m.outputs().name(m.output(s, y)) << '\n';
        }
    return os.str();
}

std::string serialize_machine(const Nfa& m) {
    std::ostringstream os;
    write_header(os, "nfa", m, m.alphabet(), nullptr);
    const auto& names = m.state_names();
    for (StateId s = 0; s < m.state_count(); ++s)
        for (Symbol a = 0; a < m.alphabet().size(); ++a) {
            if (m.successors(s, a).empty()) continue;
            os << "trans " << names[s] << ' ' << m.alphabet().name(a) << ' ';
            write_set(os, names, m.successors(s, a));
            os << '\n';
        }
    return os.str();
}

std::string serialize_machine(const AnyMachine& m) {
    return std::visit([](const auto& x) { return serialize_machine(x); }, m);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace tailopt
