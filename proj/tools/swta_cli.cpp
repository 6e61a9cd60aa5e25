// Command-line front end: model evaluation, automata/transducer algebra,
// parameterized construction and the verification workflows, over the text
// model formats. Verdict exit codes: 0 holds/ok, 1 fails, 2 error.

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "swta/task.hpp"

namespace {

struct GlobalOptions {
    bool stats = false;
    bool json = false;
    unsigned jobs = 1;
    size_t max_oracle_depth = 3;
};

int emit_report(const swta::Report& report, const GlobalOptions& options) {
    if (options.json) {
        std::cout << report.to_json(options.stats).dump(2) << "\n";
    } else {
        std::cout << report.to_text();
        if (options.stats) {
            std::cout << "  stats: lts_states=" << report.stats.lts_states
                      << " basis_insertions=" << report.stats.basis_insertions
                      << " max_basis_rows=" << report.stats.max_basis_rows
                      << " domain_pairs=" << report.stats.domain_pairs
                      << " max_coefficient_bits=" << report.stats.max_coefficient_bits << "\n";
            for (const auto& [stage, ms] : report.timings_ms)
                std::cout << "  time: " << stage << " " << ms << " ms\n";
        }
    }
    return report.exit_code();
}

int run_guarded(const std::function<swta::Report()>& body, const GlobalOptions& options) {
    try {
        return emit_report(body(), options);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronized weighted tree automata toolkit"};
    app.require_subcommand(1);

    GlobalOptions options;
    unsigned modulus_flag = 0;
    app.add_flag("--stats", options.stats, "include sizes and timings in the output");
    app.add_flag("--json", options.json, "machine-readable report output");
    app.add_option("--jobs", options.jobs, "parallel task execution for 'run'");
    app.add_option("--m", modulus_flag, "expected workspace modulus; model files declare their own");
    app.add_option("--max-oracle-depth", options.max_oracle_depth, "word length bound for 'oracle'");

    swta::TaskFile task;
    task.base = std::filesystem::current_path();

    auto make_runner = [&](const std::string& kind) {
        return [&, kind]() {
            task.kind = kind;
            if (modulus_flag != 0) {
                for (const auto& path : task.models) {
                    swta::Swta a = swta::parse_swta(swta::read_file(path));
                    if (a.modulus != modulus_flag)
                        throw swta::Error(swta::ErrorKind::InvalidModel,
                                          path + " declares modulus " + std::to_string(a.modulus));
                }
            }
            return swta::run_task(task);
        };
    };

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a tree function on a symbol:color word");
    eval_cmd->add_option("model", task.models, "SWTA file")->required()->expected(1);
    eval_cmd->add_option("word", task.word, "symbol:color tokens");

    auto* accepts_cmd = app.add_subcommand("accepts", "tree membership in an SWTA's language");
    accepts_cmd->add_option("model", task.models, "SWTA file")->required()->expected(1);
    accepts_cmd->add_option("--tree", task.tree, "tree file")->required();

    auto* empty_cmd = app.add_subcommand("empty", "language emptiness");
    empty_cmd->add_option("model", task.models, "SWTA file")->required()->expected(1);

    auto* union_cmd = app.add_subcommand("union", "language union of two SWTAs");
    union_cmd->add_option("models", task.models, "two SWTA files")->required()->expected(2);
    union_cmd->add_option("-o,--out", task.out, "output SWTA path")->required();

    auto* image_cmd = app.add_subcommand("image", "apply transducers to an SWTA");
    image_cmd->add_option("model", task.models, "SWTA file")->required()->expected(1);
    image_cmd->add_option("wtts", task.wtts, "transducer files, applied in order")->required();
    image_cmd->add_option("-o,--out", task.out, "output SWTA path")->required();

    auto* compose_cmd = app.add_subcommand("compose", "compose transducers (first listed applied first)");
    compose_cmd->add_option("wtts", task.wtts, "transducer files")->required();
    compose_cmd->add_option("-o,--out", task.out, "output WTT path")->required();

    auto* param_cmd = app.add_subcommand("param", "size-parameterized staircase from a box transducer");
    param_cmd->add_option("--box", task.box, "box WTT file")->required();
    param_cmd->add_option("--offset", task.offset, "levels between box starts")->required();
    param_cmd->add_option("--dir", task.dir, "left or right")->default_val("right");
    param_cmd->add_option("-o,--out", task.out, "output WTT path")->required();

    std::string circuit_path, gate_out;
    bool gate_split = false;
    auto* gate_cmd = app.add_subcommand("gate", "build transducers from a circuit description");
    gate_cmd->add_option("circuit", circuit_path, "circuit file")->required();
    gate_cmd->add_option("-o,--out", gate_out, "output WTT path (or prefix with --split)")->required();
    gate_cmd->add_flag("--split", gate_split, "write one numbered WTT per gate instead of composing");

    std::string prime_in, prime_out;
    unsigned prime_levels = 1;
    auto* prime_cmd = app.add_subcommand("prime-tail", "relabel the final levels with primed symbols");
    prime_cmd->add_option("model", prime_in, "SWTA or tree file")->required();
    prime_cmd->add_option("--levels", prime_levels, "number of tail levels to prime")->required();
    prime_cmd->add_option("-o,--out", prime_out, "output path")->required();

    std::string mode_name;
    auto* verify_cmd = app.add_subcommand("verify", "relational verification: circuit(pre) vs post");
    verify_cmd->add_option("--pre", task.pre, "precondition SWTA")->required()->expected(1);
    verify_cmd->add_option("--post", task.post, "postcondition SWTA")->required()->expected(1);
    verify_cmd->add_option("--circuit", task.circuit, "transducers, applied in order");
    verify_cmd->add_option("--mode", mode_name, "include (default) or equal");

    auto* equiv_cmd = app.add_subcommand("equiv", "equivalence of two circuits over a bases SWTA");
    equiv_cmd->add_option("--bases", task.bases, "bases SWTA")->required()->expected(1);
    equiv_cmd->add_option("--left", task.left, "left circuit transducers");
    equiv_cmd->add_option("--right", task.right, "right circuit transducers");

    auto* oracle_cmd = app.add_subcommand("oracle", "bounded brute-force comparison of two SWTAs");
    oracle_cmd->add_option("models", task.models, "two SWTA files")->required()->expected(2);
    oracle_cmd->add_option("--mode", mode_name, "equal (default) or include");

    std::vector<std::string> task_paths;
    auto* run_cmd = app.add_subcommand("run", "run saved task files");
    run_cmd->add_option("tasks", task_paths, "task files")->required();

    CLI11_PARSE(app, argc, argv);

    if (!mode_name.empty()) {
        if (mode_name == "equal") {
            task.mode = swta::RelateMode::equal;
        } else if (mode_name == "include") {
            task.mode = swta::RelateMode::included;
        } else {
            std::cerr << "error: --mode must be equal or include\n";
            return 2;
        }
        task.mode_set = true;
    }
    task.oracle_depth = options.max_oracle_depth;

    if (eval_cmd->parsed()) return run_guarded(make_runner("eval"), options);
    if (accepts_cmd->parsed()) return run_guarded(make_runner("accepts"), options);
    if (empty_cmd->parsed()) return run_guarded(make_runner("empty"), options);
    if (union_cmd->parsed()) return run_guarded(make_runner("union"), options);
    if (image_cmd->parsed()) return run_guarded(make_runner("image"), options);
    if (compose_cmd->parsed()) return run_guarded(make_runner("compose"), options);
    if (param_cmd->parsed()) return run_guarded(make_runner("param"), options);
    if (verify_cmd->parsed()) return run_guarded(make_runner("verify"), options);
    if (equiv_cmd->parsed()) return run_guarded(make_runner("equiv"), options);
    if (oracle_cmd->parsed()) return run_guarded(make_runner("oracle"), options);

    if (gate_cmd->parsed()) {
        return run_guarded(
            [&]() {
                std::vector<swta::Wtt> gates = swta::parse_circuit(swta::read_file(circuit_path));
                swta::Report report;
                report.kind = "gate";
                if (gate_split) {
                    for (size_t i = 0; i < gates.size(); i++) {
                        std::string path = gate_out + "." + std::to_string(i + 1) + ".wtt";
                        swta::write_file(path, swta::print_wtt(gates[i]));
                        report.outputs.push_back(path);
                    }
                } else {
                    swta::Wtt composed = swta::compose_circuit(gates);
                    swta::detail::note_size(report, "composed", composed);
                    swta::write_file(gate_out, swta::print_wtt(composed));
                    report.outputs.push_back(gate_out);
                }
                return report;
            },
            options);
    }

    if (prime_cmd->parsed()) {
        return run_guarded(
            [&]() {
                swta::Report report;
                report.kind = "prime-tail";
                std::string text = swta::read_file(prime_in);
                if (text.rfind("tree", 0) == 0) {
                    swta::PerfectTree t = swta::parse_tree(text);
                    swta::write_file(prime_out, swta::print_tree(swta::prime_tail(t, prime_levels), 4));
                } else {
                    swta::Swta a = swta::parse_swta(text);
                    swta::write_file(prime_out, swta::print_swta(swta::prime_tail(a, prime_levels)));
                }
                report.outputs.push_back(prime_out);
                return report;
            },
            options);
    }

    if (run_cmd->parsed()) {
        std::mutex output_lock;
        std::vector<int> codes(task_paths.size(), 0);
        auto run_one = [&](size_t index) {
            try {
                swta::TaskFile loaded = swta::load_task(task_paths[index]);
                if (task.mode_set) {
                    loaded.mode = task.mode;
                    loaded.mode_set = true;
                }
                swta::Report report = swta::run_task(loaded);
                std::lock_guard<std::mutex> guard(output_lock);
                std::cout << "== " << task_paths[index] << "\n";
                codes[index] = emit_report(report, options);
            } catch (const std::exception& error) {
                std::lock_guard<std::mutex> guard(output_lock);
                std::cerr << "== " << task_paths[index] << "\nerror: " << error.what() << "\n";
                codes[index] = 2;
            }
        };
        unsigned jobs = std::max(1u, options.jobs);
        if (jobs == 1) {
            for (size_t i = 0; i < task_paths.size(); i++) run_one(i);
        } else {
            std::vector<std::thread> pool;
            std::atomic<size_t> next{0};
            for (unsigned j = 0; j < jobs; j++)
                pool.emplace_back([&]() {
                    for (size_t i = next.fetch_add(1); i < task_paths.size(); i = next.fetch_add(1)) run_one(i);
                });
            for (auto& worker : pool) worker.join();
        }
        int exit_code = 0;
        for (int code : codes) exit_code = std::max(exit_code, code);
        return exit_code;
    }

    return 2;
}
