#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swta/automaton.hpp"
#include "swta/errors.hpp"
#include "swta/format.hpp"
#include "swta/gates.hpp"
#include "swta/parametric.hpp"
#include "swta/transducer.hpp"
#include "swta/verify.hpp"

namespace swta {

/// One saved tool invocation: what to run and on which model files.
struct TaskFile {
    std::string kind;  // verify | equiv | eval | image | compose | param | empty | union | accepts | oracle
    std::filesystem::path base;  // directory the file lives in; paths resolve against it
    std::vector<std::string> pre, post, circuit, bases, left, right, models, wtts;
    std::string box, out, tree;
    std::vector<std::string> word;  // symbol:color tokens
    RelateMode mode = RelateMode::equal;
    bool mode_set = false;
    unsigned offset = 1;
    std::string dir = "right";
    size_t oracle_depth = 3;
};

inline TaskFile parse_task(const std::string& text, const std::filesystem::path& base) {
    TaskFile task;
    task.base = base;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key) || key[0] == '#') continue;
        std::vector<std::string> values;
        std::string value;
        while (fields >> value) values.push_back(value);
        auto single = [&]() {
            if (values.size() != 1)
                throw Error(ErrorKind::TaskError,
                            "line " + std::to_string(line_no) + ": '" + key + "' takes exactly one value");
            return values[0];
        };
        if (key == "task") {
            task.kind = single();
        } else if (key == "pre") {
            task.pre = values;
        } else if (key == "post") {
            task.post = values;
        } else if (key == "circuit") {
            task.circuit = values;
        } else if (key == "bases") {
            task.bases = values;
        } else if (key == "left") {
            task.left = values;
        } else if (key == "right") {
            task.right = values;
        } else if (key == "model" || key == "models") {
            task.models.insert(task.models.end(), values.begin(), values.end());
        } else if (key == "wtts" || key == "wtt") {
            task.wtts.insert(task.wtts.end(), values.begin(), values.end());
        } else if (key == "box") {
            task.box = single();
        } else if (key == "out") {
            task.out = single();
        } else if (key == "tree") {
            task.tree = single();
        } else if (key == "word") {
            task.word = values;
        } else if (key == "mode") {
            std::string m = single();
            if (m == "equal")
                task.mode = RelateMode::equal;
            else if (m == "include")
                task.mode = RelateMode::included;
            else
                throw Error(ErrorKind::TaskError, "mode must be equal or include");
            task.mode_set = true;
        } else if (key == "offset") {
            task.offset = static_cast<unsigned>(std::stoul(single()));
        } else if (key == "dir") {
            task.dir = single();
            if (task.dir != "left" && task.dir != "right")
                throw Error(ErrorKind::TaskError, "dir must be left or right");
        } else if (key == "oracle-depth") {
            task.oracle_depth = std::stoul(single());
        } else {
            throw Error(ErrorKind::TaskError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (task.kind.empty()) throw Error(ErrorKind::TaskError, "missing 'task <kind>' line");
    return task;
}

inline TaskFile load_task(const std::filesystem::path& path) {
    return parse_task(read_file(path.string()), path.parent_path());
}

struct StageSize {
    std::string name;
    size_t states;
    size_t transitions;
};

/// Outcome of one task: verdict, per-stage sizes and timings, and the
/// machine-readable rendering.
struct Report {
    std::string kind;
    std::string verdict = "ok";  // holds | fails | ok | error
    std::string detail;
    std::optional<Word> witness;
    std::optional<std::string> witness_text;
    std::vector<StageSize> sizes;
    std::vector<std::pair<std::string, double>> timings_ms;
    VerifyStats stats;
    std::vector<std::string> outputs;

    int exit_code() const {
        if (verdict == "holds" || verdict == "ok") return 0;
        if (verdict == "fails") return 1;
        return 2;
    }

    nlohmann::ordered_json to_json(bool with_timings = true) const {
        nlohmann::ordered_json j;
        j["schema"] = "swta-report/1";
        j["task"] = kind;
        j["verdict"] = verdict;
        if (!detail.empty()) j["detail"] = detail;
        if (witness_text.has_value()) j["witness"] = *witness_text;
        nlohmann::ordered_json sizes_json = nlohmann::ordered_json::array();
        for (const auto& s : sizes)
            sizes_json.push_back({{"stage", s.name}, {"states", s.states}, {"transitions", s.transitions}});
        j["sizes"] = sizes_json;
        j["stats"] = {{"lts_states", stats.lts_states},
                      {"basis_insertions", stats.basis_insertions},
                      {"max_basis_rows", stats.max_basis_rows},
                      {"domain_pairs", stats.domain_pairs},
                      {"max_coefficient_bits", stats.max_coefficient_bits}};
        if (!outputs.empty()) j["outputs"] = outputs;
        if (with_timings) {
            nlohmann::ordered_json t = nlohmann::ordered_json::array();
            for (const auto& [name, ms] : timings_ms) t.push_back({{"stage", name}, {"ms", ms}});
            j["timings"] = t;
        }
        return j;
    }

    std::string to_text() const {
        std::ostringstream out;
        out << kind << ": " << verdict;
        if (!detail.empty()) out << " (" << detail << ")";
        out << "\n";
        if (witness_text.has_value()) out << "  witness: " << *witness_text << "\n";
        for (const auto& s : sizes)
            out << "  " << s.name << ": " << s.states << " states, " << s.transitions << " transitions\n";
        return out.str();
    }
};

namespace detail {

class StageTimer {
  public:
    StageTimer(Report& report, std::string name)
        : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        auto elapsed = std::chrono::steady_clock::now() - start_;
        report_.timings_ms.emplace_back(
            name_, std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count());
    }

  private:
    Report& report_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

inline std::string resolve(const TaskFile& task, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p.string();
    return (task.base / p).string();
}

inline Word parse_word_tokens(const Swta& a, const std::vector<std::string>& tokens) {
    Word w;
    for (const std::string& token : tokens) {
        size_t colon = token.rfind(':');
        if (colon == std::string::npos)
            throw Error(ErrorKind::TaskError, "word token '" + token + "' is not symbol:color");
        auto sym = a.find_symbol(token.substr(0, colon));
        auto col = a.find_color(token.substr(colon + 1));
        if (!sym || !col) throw Error(ErrorKind::TaskError, "unknown symbol or color in '" + token + "'");
        w.push_back({*sym, *col});
    }
    return w;
}

inline std::string render_word(const Swta& a, const Word& w) {
    std::string out;
    for (size_t i = 0; i < w.size(); i++) {
        if (i) out += " ";
        std::string sym = w[i].first < a.symbols.size() ? a.symbols[w[i].first] : "?";
        std::string col = w[i].second < a.colors.size() ? a.colors[w[i].second] : "?";
        out += sym + ":" + col;
    }
    return out.empty() ? "(empty word)" : out;
}

inline void note_size(Report& report, const std::string& name, const Swta& a) {
    report.sizes.push_back({name, a.state_count(), a.transition_count()});
}

inline void note_size(Report& report, const std::string& name, const Wtt& t) {
    report.sizes.push_back({name, t.state_count(), t.transition_count()});
}

}  // namespace detail

/// Relabels the final `levels` levels of every accepted tree with the primed
/// alphabet: the staircase transducers consume primed symbols after the last
/// box, and inputs must match. States gain a countdown component tracking the
/// distance to the leaves once priming starts.
inline Swta prime_tail(const Swta& a, unsigned levels) {
    Swta out;
    out.modulus = a.modulus;
    for (const std::string& name : a.symbols) out.add_symbol(name);
    std::vector<SymbolId> primed(a.symbols.size());
    for (SymbolId i = 0; i < a.symbols.size(); i++) primed[i] = out.add_symbol(primed_name(a.symbols[i]));
    out.colors = a.colors;

    // State (q, phase) with phase = levels meaning "still plain", otherwise
    // the number of primed levels left below.
    auto id_of = [&](StateId q, unsigned phase) { return q * (levels + 1) + phase; };
    for (StateId q = 0; q < a.state_count(); q++) {
        for (unsigned phase = 0; phase <= levels; phase++) {
            StateId id = out.add_state(a.states[q] + (phase == levels ? "" : ("@" + std::to_string(phase))));
            out.leaf[id] = a.leaf[q] && phase == 0;
        }
    }
    if (levels == 0)
        for (StateId q = 0; q < a.state_count(); q++) out.leaf[id_of(q, 0)] = a.leaf[q];

    auto remap = [&](const LinearForm& form, unsigned phase) {
        LinearForm mapped;
        for (const auto& [s, c] : form.terms()) mapped.add_term(id_of(s, phase), c);
        return mapped;
    };
    for (const auto& [key, tr] : a.transitions()) {
        auto [q, sym, col] = key;
        // Plain region continues, or priming starts with `levels` levels left.
        out.add_transition(id_of(q, levels), sym, col, {remap(tr.left, levels), remap(tr.right, levels)});
        if (levels >= 1)
            out.add_transition(id_of(q, levels), primed[sym], col,
                               {remap(tr.left, levels - 1), remap(tr.right, levels - 1)});
        for (unsigned phase = 1; phase < levels; phase++)
            out.add_transition(id_of(q, phase), primed[sym], col,
                               {remap(tr.left, phase - 1), remap(tr.right, phase - 1)});
    }
    out.root = id_of(a.root, levels);
    return out;
}

inline PerfectTree prime_tail(const PerfectTree& t, unsigned levels) {
    if (levels > t.height()) throw Error(ErrorKind::PositionError, "cannot prime more levels than the height");
    std::vector<std::string> labels = t.labels();
    for (size_t i = labels.size() - levels; i < labels.size(); i++) labels[i] = primed_name(labels[i]);
    return PerfectTree(std::move(labels), t.leaves());
}

/// Parses a circuit description into per-gate transducers over x1..xm.
/// Grammar: header `circuit qubits=<m> [m=<modulus>]`, then one gate per
/// line: H 1 | CX 1 2 | CCX 1 2 3 | CU (a|b|c|d) <controls...> <target> |
/// U (a|b|c|d) <target> | QFT lo..hi | BROADCAST <G>.
inline std::vector<Wtt> parse_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    unsigned qubits = 0, modulus = 4;
    bool saw_header = false;
    std::vector<Wtt> gates;

    auto parse_unitary = [&](detail::LineCursor& cur) {
        cur.expect('(');
        AlgebraicComplex a = detail::parse_scalar(cur, modulus);
        cur.expect('|');
        AlgebraicComplex b = detail::parse_scalar(cur, modulus);
        cur.expect('|');
        AlgebraicComplex c = detail::parse_scalar(cur, modulus);
        cur.expect('|');
        AlgebraicComplex d = detail::parse_scalar(cur, modulus);
        cur.expect(')');
        return Unitary2{a, b, c, d};
    };

    while (std::getline(in, line)) {
        line_no++;
        detail::LineCursor cur(line, line_no);
        if (cur.done() || cur.peek() == '#') continue;
        if (!saw_header) {
            std::string kind = cur.word();
            if (kind != "circuit") cur.fail("expected 'circuit' header");
            while (!cur.done()) {
                std::string decl = cur.word();
                if (decl.rfind("qubits=", 0) == 0)
                    qubits = static_cast<unsigned>(std::stoul(decl.substr(7)));
                else if (decl.rfind("m=", 0) == 0)
                    modulus = static_cast<unsigned>(std::stoul(decl.substr(2)));
                else
                    cur.fail("unknown header field '" + decl + "'");
            }
            if (qubits == 0) cur.fail("circuit header needs qubits=<count>");
            saw_header = true;
            continue;
        }
        std::string op = cur.word();
        auto index = [&]() {
            Int v = cur.integer();
            return static_cast<unsigned>(v.convert_to<unsigned long>());
        };
        if (op == "BROADCAST") {
            std::string g = cur.word();
            gates.push_back(broadcast_wtt(gate::by_name(g, modulus), qubit_symbols(qubits)));
        } else if (op == "QFT") {
            std::string range = cur.word();
            size_t dots = range.find("..");
            if (dots == std::string::npos) cur.fail("QFT expects lo..hi");
            unsigned lo = static_cast<unsigned>(std::stoul(range.substr(0, dots)));
            unsigned hi = static_cast<unsigned>(std::stoul(range.substr(dots + 2)));
            if (hi < lo) cur.fail("empty QFT range");
            gates.push_back(qft_wtt(hi - lo + 1, qubits, modulus, lo));
        } else if (op == "U") {
            Unitary2 u = parse_unitary(cur);
            gates.push_back(single_qubit_wtt(u, index(), qubits));
        } else if (op == "CU") {
            Unitary2 u = parse_unitary(cur);
            std::vector<unsigned> indices;
            while (!cur.done()) indices.push_back(index());
            if (indices.empty()) cur.fail("CU needs control and target indices");
            unsigned target = indices.back();
            indices.pop_back();
            gates.push_back(controlled_wtt(u, target, indices, qubits));
        } else if (op == "CX" || op == "CZ" || op == "CCX" || op == "CCZ") {
            Unitary2 u = (op == "CX" || op == "CCX") ? gate::x(modulus) : gate::z(modulus);
            std::vector<unsigned> indices;
            while (!cur.done()) indices.push_back(index());
            size_t expected = (op == "CX" || op == "CZ") ? 2 : 3;
            if (indices.size() != expected) cur.fail(op + " expects " + std::to_string(expected) + " indices");
            unsigned target = indices.back();
            indices.pop_back();
            gates.push_back(controlled_wtt(u, target, indices, qubits));
        } else {
            Unitary2 u = gate::by_name(op, modulus);
            gates.push_back(single_qubit_wtt(u, index(), qubits));
        }
        if (!cur.done()) cur.fail("trailing input after gate");
    }
    if (!saw_header) throw Error(ErrorKind::ParseError, "missing circuit header");
    return gates;
}

/// Composes a gate list in application order (first gate applied first).
inline Wtt compose_circuit(const std::vector<Wtt>& gates) {
    if (gates.empty()) throw Error(ErrorKind::InvalidGate, "empty circuit");
    Wtt acc = gates.front();
    for (size_t i = 1; i < gates.size(); i++) acc = compose(gates[i], acc);
    return acc;
}

/// Runs one task end to end. Exit code mapping: holds/ok = 0, fails = 1,
/// errors surface as exceptions for the caller to map to 2.
inline Report run_task(const TaskFile& task) {
    Report report;
    report.kind = task.kind;

    auto load_swta_file = [&](const std::string& path) { return parse_swta(read_file(detail::resolve(task, path))); };
    auto load_wtt_file = [&](const std::string& path) { return parse_wtt(read_file(detail::resolve(task, path))); };

    auto apply_chain = [&](Swta state, const std::vector<std::string>& wtt_paths, const std::string& label) {
        detail::note_size(report, label + " start", state);
        for (size_t i = 0; i < wtt_paths.size(); i++) {
            Wtt t = load_wtt_file(wtt_paths[i]);
            detail::StageTimer timer(report, label + " image " + std::to_string(i + 1));
            state = image(t, state);
            detail::note_size(report, label + " after " + wtt_paths[i], state);
        }
        return state;
    };

    auto finish_relate = [&](const Verdict& verdict, const Swta& wit_a, const Swta& wit_b) {
        report.verdict = verdict.holds ? "holds" : "fails";
        report.detail = verdict.reason;
        report.stats = verdict.stats;
        if (verdict.witness.has_value()) {
            report.witness = verdict.witness;
            report.witness_text = detail::render_word(wit_a, *verdict.witness);
        }
        (void)wit_b;
    };

    if (task.kind == "verify") {
        if (task.pre.size() != 1 || task.post.size() != 1)
            throw Error(ErrorKind::TaskError, "verify needs one pre and one post model");
        Swta pre = load_swta_file(task.pre[0]);
        Swta post = load_swta_file(task.post[0]);
        Swta result = apply_chain(pre, task.circuit, "pre");
        detail::note_size(report, "post", post);
        RelateMode mode = task.mode_set ? task.mode : RelateMode::included;
        detail::StageTimer timer(report, "relate");
        Verdict verdict = functional_relate(result, post, mode);
        finish_relate(verdict, result, post);
    } else if (task.kind == "equiv") {
        if (task.bases.size() != 1) throw Error(ErrorKind::TaskError, "equiv needs one bases model");
        Swta bases = load_swta_file(task.bases[0]);
        Swta lhs = apply_chain(bases, task.left, "left");
        Swta rhs = apply_chain(bases, task.right, "right");
        detail::StageTimer timer(report, "relate");
        Verdict verdict = functional_relate(lhs, rhs, task.mode_set ? task.mode : RelateMode::equal);
        finish_relate(verdict, lhs, rhs);
    } else if (task.kind == "eval") {
        if (task.models.size() != 1) throw Error(ErrorKind::TaskError, "eval needs one model");
        Swta a = load_swta_file(task.models[0]);
        Word w = detail::parse_word_tokens(a, task.word);
        auto t = evaluate(a, w);
        report.verdict = "ok";
        report.detail = t.has_value() ? print_tree(*t, a.modulus) : "undefined";
    } else if (task.kind == "accepts") {
        if (task.models.size() != 1 || task.tree.empty())
            throw Error(ErrorKind::TaskError, "accepts needs one model and a tree");
        Swta a = load_swta_file(task.models[0]);
        PerfectTree t = parse_tree(read_file(detail::resolve(task, task.tree)), a.modulus);
        bool in = accepts(a, t);
        report.verdict = in ? "holds" : "fails";
        report.detail = in ? "tree accepted" : "tree rejected";
    } else if (task.kind == "empty") {
        if (task.models.size() != 1) throw Error(ErrorKind::TaskError, "empty needs one model");
        Swta a = load_swta_file(task.models[0]);
        auto witness = emptiness_witness(a);
        report.verdict = witness.has_value() ? "fails" : "holds";
        report.detail = witness.has_value() ? "language is nonempty" : "language is empty";
        if (witness.has_value()) {
            report.witness = witness;
            report.witness_text = detail::render_word(a, *witness);
        }
    } else if (task.kind == "union") {
        if (task.models.size() != 2 || task.out.empty())
            throw Error(ErrorKind::TaskError, "union needs two models and an out path");
        Swta u = language_union(load_swta_file(task.models[0]), load_swta_file(task.models[1]));
        write_file(detail::resolve(task, task.out), print_swta(u));
        report.outputs.push_back(task.out);
        detail::note_size(report, "union", u);
    } else if (task.kind == "image") {
        if (task.models.size() != 1 || task.wtts.empty() || task.out.empty())
            throw Error(ErrorKind::TaskError, "image needs a model, transducers and an out path");
        Swta a = apply_chain(load_swta_file(task.models[0]), task.wtts, "image");
        write_file(detail::resolve(task, task.out), print_swta(a));
        report.outputs.push_back(task.out);
    } else if (task.kind == "compose") {
        if (task.wtts.size() < 2 || task.out.empty())
            throw Error(ErrorKind::TaskError, "compose needs at least two transducers and an out path");
        std::vector<Wtt> gates;
        for (const std::string& path : task.wtts) gates.push_back(load_wtt_file(path));
        Wtt composed = compose_circuit(gates);
        detail::note_size(report, "composed", composed);
        write_file(detail::resolve(task, task.out), print_wtt(composed));
        report.outputs.push_back(task.out);
    } else if (task.kind == "param") {
        if (task.box.empty() || task.out.empty())
            throw Error(ErrorKind::TaskError, "param needs a box and an out path");
        Wtt box = load_wtt_file(task.box);
        Wtt staircase = parameterize(box, task.offset, task.dir == "left" ? Dir::left : Dir::right);
        detail::note_size(report, "staircase", staircase);
        write_file(detail::resolve(task, task.out), print_wtt(staircase));
        report.outputs.push_back(task.out);
    } else if (task.kind == "oracle") {
        if (task.models.size() != 2) throw Error(ErrorKind::TaskError, "oracle needs two models");
        Swta a = load_swta_file(task.models[0]);
        Swta b = load_swta_file(task.models[1]);
        Verdict verdict = bounded_oracle(a, b, task.oracle_depth, task.mode_set ? task.mode : RelateMode::equal);
        finish_relate(verdict, a, b);
    } else {
        throw Error(ErrorKind::TaskError, "unknown task kind '" + task.kind + "'");
    }
    return report;
}

}  // namespace swta
