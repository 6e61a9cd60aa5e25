#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "swta/automaton.hpp"
#include "swta/errors.hpp"
#include "swta/scalar.hpp"
#include "swta/transducer.hpp"
#include "swta/tree.hpp"

namespace swta {

namespace detail {

/// Cursor over one line of model text with location-carrying errors.
class LineCursor {
  public:
    LineCursor(const std::string& text, size_t line_number) : text_(text), line_(line_number) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) pos_++;
    }

    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            pos_++;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string word() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '<') {
                // Product-state names like <q,s> or <<q,s>,s> are one token.
                int depth = 0;
                do {
                    if (text_[pos_] == '<') depth++;
                    if (text_[pos_] == '>') depth--;
                    pos_++;
                } while (pos_ < text_.size() && depth > 0);
                if (depth > 0) fail("unbalanced '<' in token");
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c)) || std::string("()|,*[]").find(c) != std::string::npos)
                break;
            pos_++;
        }
        if (start == pos_) fail("expected a token");
        return text_.substr(start, pos_ - start);
    }

    Int integer() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) pos_++;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) pos_++;
        if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(text_[start]))))
            fail("expected an integer");
        return Int(text_.substr(start, pos_ - start));
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " + message);
    }

  private:
    const std::string& text_;
    size_t line_;
    size_t pos_ = 0;
};

/// Scalar literal: `(a0,...,a{m-1})/s2^k`, `(a0,...)`, `<int>`, `<int>/s2^k`.
inline AlgebraicComplex parse_scalar(LineCursor& cur, unsigned m) {
    std::vector<Int> coeffs(m, 0);
    if (cur.eat('(')) {
        for (unsigned i = 0; i < m; i++) {
            if (i) cur.expect(',');
            coeffs[i] = cur.integer();
        }
        if (cur.peek() == ',') cur.fail("too many coefficients for modulus " + std::to_string(m));
        cur.expect(')');
    } else {
        coeffs[0] = cur.integer();
    }
    unsigned k = 0;
    if (cur.eat('/')) {
        std::string tag = cur.word();
        size_t caret = tag.find('^');
        if (tag.substr(0, caret) != "s2" || caret == std::string::npos) cur.fail("expected s2^<k> denominator");
        try {
            k = static_cast<unsigned>(std::stoul(tag.substr(caret + 1)));
        } catch (...) {
            cur.fail("bad sqrt(2) exponent");
        }
    }
    return AlgebraicComplex(std::move(coeffs), k);
}

}  // namespace detail

inline AlgebraicComplex parse_scalar(const std::string& text, unsigned m) {
    detail::LineCursor cur(text, 1);
    AlgebraicComplex value = detail::parse_scalar(cur, m);
    if (!cur.done()) cur.fail("trailing input after scalar");
    return value;
}

namespace detail {

struct ParsedTerm {
    AlgebraicComplex coef;
    std::string state;
    std::optional<Side> side;  // set for WTT ground terms
};

/// One side of a transition body: either `0` (the empty form) or a nonempty
/// `+`-separated list of coef*state or coef*state(L|R) terms.
inline std::vector<ParsedTerm> parse_form(LineCursor& cur, unsigned m, bool ground_terms) {
    std::vector<ParsedTerm> terms;
    char next = cur.peek();
    if ((next == '0' || next == '|' || next == ')')) {
        // Peek whether this is the bare empty form "0".
        if (next != '0') cur.fail("empty form must be written 0");
        // "0" followed by '|' or ')' is the empty form; "0*state" is a term.
        LineCursor probe = cur;
        probe.eat('0');
        char after = probe.peek();
        if (after == '|' || after == ')') {
            cur.eat('0');
            return terms;
        }
    }
    while (true) {
        ParsedTerm term{parse_scalar(cur, m), "", std::nullopt};
        cur.expect('*');
        term.state = cur.word();
        if (ground_terms) {
            cur.expect('(');
            std::string side = cur.word();
            if (side == "L")
                term.side = Side::left;
            else if (side == "R")
                term.side = Side::right;
            else
                cur.fail("ground term side must be L or R");
            cur.expect(')');
        }
        terms.push_back(std::move(term));
        if (!cur.eat('+')) break;
    }
    return terms;
}

inline std::vector<std::string> rest_words(LineCursor& cur) {
    std::vector<std::string> words;
    while (!cur.done()) words.push_back(cur.word());
    return words;
}

inline unsigned parse_header_modulus(LineCursor& cur, const std::string& expected_kind) {
    std::string kind = cur.word();
    if (kind != expected_kind) cur.fail("expected '" + expected_kind + "' header");
    std::string decl = cur.word();
    if (decl.rfind("m=", 0) != 0) cur.fail("expected m=<modulus> in header");
    unsigned m = 0;
    try {
        m = static_cast<unsigned>(std::stoul(decl.substr(2)));
    } catch (...) {
        cur.fail("bad modulus");
    }
    if (!is_power_of_two(m)) cur.fail("modulus must be a power of two");
    return m;
}

}  // namespace detail

inline Swta parse_swta(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;

    Swta a;
    std::map<std::string, StateId> state_ids;
    auto state_of = [&](const std::string& name) {
        auto it = state_ids.find(name);
        if (it != state_ids.end()) return it->second;
        StateId id = a.add_state(name);
        state_ids.emplace(name, id);
        return id;
    };

    bool saw_header = false, saw_root = false;
    std::vector<std::tuple<StateId, SymbolId, ColorId, std::vector<detail::ParsedTerm>, std::vector<detail::ParsedTerm>, size_t>>
        pending;

    while (std::getline(in, line)) {
        line_no++;
        detail::LineCursor cur(line, line_no);
        if (cur.done() || cur.peek() == '#') continue;
        if (!saw_header) {
            a.modulus = detail::parse_header_modulus(cur, "swta");
            saw_header = true;
            continue;
        }
        std::string keyword = cur.word();
        if (keyword == "root") {
            a.root = state_of(cur.word());
            saw_root = true;
        } else if (keyword == "leaves") {
            for (const std::string& name : detail::rest_words(cur)) a.leaf[state_of(name)] = true;
        } else if (keyword == "colors") {
            for (const std::string& name : detail::rest_words(cur)) a.add_color(name);
        } else if (keyword == "trans") {
            StateId src = state_of(cur.word());
            SymbolId sym = a.add_symbol(cur.word());
            std::string color_name = cur.word();
            auto col = a.find_color(color_name);
            if (!col.has_value()) cur.fail("undeclared color '" + color_name + "'");
            cur.expect('-');
            cur.expect('>');
            cur.expect('(');
            auto left = detail::parse_form(cur, a.modulus, false);
            cur.expect('|');
            auto right = detail::parse_form(cur, a.modulus, false);
            cur.expect(')');
            if (!cur.done()) cur.fail("trailing input after transition");
            pending.emplace_back(src, sym, *col, std::move(left), std::move(right), line_no);
        } else {
            cur.fail("unknown keyword '" + keyword + "'");
        }
    }
    if (!saw_header) throw Error(ErrorKind::ParseError, "missing 'swta m=<modulus>' header");
    if (!saw_root) throw Error(ErrorKind::ParseError, "missing root declaration");

    for (auto& [src, sym, col, left, right, where] : pending) {
        SwtaTransition tr;
        for (auto& term : left) tr.left.add_term(state_of(term.state), term.coef);
        for (auto& term : right) tr.right.add_term(state_of(term.state), term.coef);
        a.add_transition(src, sym, col, std::move(tr));
    }
    return a;
}

inline Wtt parse_wtt(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;

    Wtt t;
    std::map<std::string, StateId> state_ids;
    auto state_of = [&](const std::string& name) {
        auto it = state_ids.find(name);
        if (it != state_ids.end()) return it->second;
        StateId id = t.add_state(name);
        state_ids.emplace(name, id);
        return id;
    };

    bool saw_header = false, saw_root = false;
    std::vector<std::tuple<StateId, SymbolId, std::vector<detail::ParsedTerm>, std::vector<detail::ParsedTerm>>> pending;

    while (std::getline(in, line)) {
        line_no++;
        detail::LineCursor cur(line, line_no);
        if (cur.done() || cur.peek() == '#') continue;
        if (!saw_header) {
            t.modulus = detail::parse_header_modulus(cur, "wtt");
            saw_header = true;
            continue;
        }
        std::string keyword = cur.word();
        if (keyword == "root") {
            t.root = state_of(cur.word());
            saw_root = true;
        } else if (keyword == "leaves") {
            for (const std::string& name : detail::rest_words(cur)) t.leaf[state_of(name)] = true;
        } else if (keyword == "trans") {
            StateId src = state_of(cur.word());
            SymbolId sym = t.add_symbol(cur.word());
            cur.expect('-');
            cur.expect('>');
            cur.expect('(');
            auto left = detail::parse_form(cur, t.modulus, true);
            cur.expect('|');
            auto right = detail::parse_form(cur, t.modulus, true);
            cur.expect(')');
            if (!cur.done()) cur.fail("trailing input after transition");
            pending.emplace_back(src, sym, std::move(left), std::move(right));
        } else {
            cur.fail("unknown keyword '" + keyword + "'");
        }
    }
    if (!saw_header) throw Error(ErrorKind::ParseError, "missing 'wtt m=<modulus>' header");
    if (!saw_root) throw Error(ErrorKind::ParseError, "missing root declaration");

    for (auto& [src, sym, left, right] : pending) {
        WttTransition tr;
        for (auto& term : left) tr.left.add_term({state_of(term.state), *term.side}, term.coef);
        for (auto& term : right) tr.right.add_term({state_of(term.state), *term.side}, term.coef);
        t.add_transition(src, sym, std::move(tr));
    }
    return t;
}

inline PerfectTree parse_tree(const std::string& text, unsigned default_modulus = 4) {
    size_t split = text.find("leaves=");
    if (split == std::string::npos) throw Error(ErrorKind::ParseError, "tree is missing its leaves= section");
    std::string head = text.substr(0, split);
    std::string tail = text.substr(split + 7);

    std::istringstream head_in(head);
    std::string token;
    size_t h = 0;
    bool saw_tree = false, saw_height = false;
    unsigned m = default_modulus;
    std::vector<std::string> labels;
    while (head_in >> token) {
        if (token == "tree") {
            saw_tree = true;
        } else if (token.rfind("h=", 0) == 0) {
            h = std::stoul(token.substr(2));
            saw_height = true;
        } else if (token.rfind("m=", 0) == 0) {
            m = static_cast<unsigned>(std::stoul(token.substr(2)));
        } else if (token.rfind("labels=", 0) == 0) {
            std::string body = token.substr(7);
            std::string label;
            std::istringstream splitter(body);
            while (std::getline(splitter, label, ','))
                if (!label.empty()) labels.push_back(label);
        } else {
            throw Error(ErrorKind::ParseError, "unexpected token '" + token + "' in tree header");
        }
    }
    if (!saw_tree || !saw_height) throw Error(ErrorKind::ParseError, "expected 'tree h=<height> ... leaves=[...]'");
    if (labels.size() != h) throw Error(ErrorKind::ParseError, "label count does not match height");

    detail::LineCursor cur(tail, 1);
    cur.expect('[');
    std::vector<AlgebraicComplex> leaves;
    for (size_t i = 0; i < (size_t(1) << h); i++) {
        if (i) cur.expect(',');
        leaves.push_back(detail::parse_scalar(cur, m));
    }
    cur.expect(']');
    if (!cur.done()) cur.fail("trailing input after tree");
    return PerfectTree(std::move(labels), std::move(leaves));
}

inline std::string print_tree(const PerfectTree& t, unsigned modulus) {
    std::ostringstream out;
    out << "tree h=" << t.height() << " m=" << modulus << " labels=";
    for (size_t i = 0; i < t.labels().size(); i++) {
        if (i) out << ",";
        out << t.labels()[i];
    }
    out << " leaves=[";
    for (size_t i = 0; i < t.leaves().size(); i++) {
        if (i) out << ",";
        out << t.leaves()[i].to_string();
    }
    out << "]";
    return out.str();
}

namespace detail {

inline std::string form_to_string(const LinearForm& form, const Swta& a) {
    if (form.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < form.terms().size(); i++) {
        const auto& [state, coef] = form.terms()[i];
        if (i) out += " + ";
        out += coef.to_string() + "*" + a.states[state];
    }
    return out;
}

inline std::string form_to_string(const TermForm& form, const Wtt& t) {
    if (form.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < form.terms().size(); i++) {
        const auto& [ground, coef] = form.terms()[i];
        if (i) out += " + ";
        out += coef.to_string() + "*" + t.states[ground.state] + (ground.side == Side::left ? "(L)" : "(R)");
    }
    return out;
}

}  // namespace detail

inline std::string print_swta(const Swta& a) {
    std::ostringstream out;
    out << "swta m=" << a.modulus << "\n";
    out << "root " << a.states[a.root] << "\n";
    out << "leaves";
    for (StateId s = 0; s < a.state_count(); s++)
        if (a.leaf[s]) out << " " << a.states[s];
    out << "\n";
    out << "colors";
    for (const std::string& c : a.colors) out << " " << c;
    out << "\n";
    for (const auto& [key, tr] : a.transitions()) {
        auto [s, sym, col] = key;
        out << "trans " << a.states[s] << " " << a.symbols[sym] << " " << a.colors[col] << " -> ("
            << detail::form_to_string(tr.left, a) << " | " << detail::form_to_string(tr.right, a) << ")\n";
    }
    return out.str();
}

inline std::string print_wtt(const Wtt& t) {
    std::ostringstream out;
    out << "wtt m=" << t.modulus << "\n";
    out << "root " << t.states[t.root] << "\n";
    out << "leaves";
    for (StateId s = 0; s < t.state_count(); s++)
        if (t.leaf[s]) out << " " << t.states[s];
    out << "\n";
    for (const auto& [key, tr] : t.transitions()) {
        auto [s, sym] = key;
        out << "trans " << t.states[s] << " " << t.symbols[sym] << " -> (" << detail::form_to_string(tr.left, t)
            << " | " << detail::form_to_string(tr.right, t) << ")\n";
    }
    return out.str();
}

/// Dirac rendering: nonzero basis kets with amplitudes, or `0`.
inline std::string format_tree_dirac(const PerfectTree& t) {
    std::ostringstream out;
    bool any = false;
    for (size_t i = 0; i < t.leaves().size(); i++) {
        if (t.leaves()[i].is_zero()) continue;
        if (any) out << " + ";
        any = true;
        std::string bits;
        for (size_t level = 0; level < t.height(); level++)
            bits += ((i >> (t.height() - 1 - level)) & 1) ? '1' : '0';
        out << t.leaves()[i].to_string();
        if (!bits.empty()) out << "|" << bits << ">";
    }
    if (!any) return "0";
    return out.str();
}

/// Vector rendering: the 2^h amplitudes left to right.
inline std::string format_tree_vector(const PerfectTree& t) {
    std::ostringstream out;
    out << "[";
    for (size_t i = 0; i < t.leaves().size(); i++) {
        if (i) out << ", ";
        out << t.leaves()[i].to_string();
    }
    out << "]";
    return out.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::TaskError, "cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::TaskError, "cannot write file: " + path);
    out << content;
}

}  // namespace swta
