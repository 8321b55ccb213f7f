/*
 *  Copyright (C) 2026  The overground authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 */

#include "overground/cli.hpp"

#include "overground/bench.hpp"
#include "overground/engine.hpp"
#include "overground/syntax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <regex>
#include <sstream>

namespace overground {

namespace {

struct RunOptions {
    std::string program_path;
    std::vector<std::string> shot_paths;
    bool stream = false;
    std::string mode = "incremental";
    std::string max_models = "all";
    std::string report = "text";
    bool no_timings = false;
    std::string save_state;
    std::string load_state;
    std::string evict;
    std::optional<std::size_t> budget_rules;
    std::optional<std::size_t> budget_bytes;
    bool oracle_check = false;
};

struct BenchOptions {
    std::string generator = "reach-stream";
    BenchSpec spec;
    std::string out_dir;
    std::string evict;
    std::optional<std::size_t> budget_rules;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void print_diagnostics(std::ostream& err, const std::string& source, const ParseError& error) {
    for (const auto& diagnostic : error.diagnostics())
        err << source << ':' << to_string(diagnostic) << '\n';
}

std::string milliseconds(std::chrono::nanoseconds d) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", static_cast<double>(d.count()) / 1e6);
    return buffer;
}

double as_ms(std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; }

std::optional<EvictionConfig> eviction_from(const std::string& evict, std::optional<std::size_t> rules,
                                            std::optional<std::size_t> bytes) {
    if (evict.empty() && !rules && !bytes)
        return std::nullopt;
    if (!rules && !bytes)
        throw InputError("--evict needs --budget-rules or --budget-bytes");
    EvictionConfig config;
    config.policy = evict == "least-triggered" ? EvictionPolicy::least_triggered : EvictionPolicy::oldest;
    config.budget.max_rules = rules;
    config.budget.max_bytes = bytes;
    return config;
}

SessionConfig session_config(const RunOptions& options) {
    SessionConfig config;
    config.mode = options.mode == "scratch" ? Mode::scratch : Mode::incremental;
    if (options.max_models != "all") {
        std::size_t parsed = 0;
        try {
            std::size_t used = 0;
            long long value = std::stoll(options.max_models, &used);
            if (used != options.max_models.size() || value < 0)
                throw std::invalid_argument("negative");
            parsed = static_cast<std::size_t>(value);
        } catch (const std::logic_error&) {
            throw InputError("--max-models expects a non-negative integer or 'all'");
        }
        config.max_models = parsed;
    }
    config.eviction = eviction_from(options.evict, options.budget_rules, options.budget_bytes);
    config.oracle_check = options.oracle_check;
    return config;
}

nlohmann::json shot_json(const ShotResult& result, bool timings) {
    nlohmann::json shot = {{"shot", result.shot_index},
                           {"answer_sets", result.answer_sets.size()},
                           {"exhausted", result.exhausted},
                           {"new_rules", result.grounding.new_rules},
                           {"new_domain_atoms", result.grounding.new_domain_atoms},
                           {"rule_firings_attempted", result.grounding.rule_firings_attempted},
                           {"cache_size_rules", result.grounding.cache_size_rules},
                           {"cache_size_bytes_estimate", result.grounding.cache_size_bytes_estimate},
                           {"evicted", result.evicted},
                           {"decisions", result.solve_stats.decisions}};
    if (timings) {
        shot["eviction_ms"] = as_ms(result.stages.eviction);
        shot["grounding_ms"] = as_ms(result.stages.grounding);
        shot["projection_ms"] = as_ms(result.stages.projection);
        shot["solving_ms"] = as_ms(result.stages.solving);
        shot["total_ms"] = as_ms(result.wall_time_total);
    }
    return shot;
}

std::string shot_summary(std::size_t label, const ShotResult& result, bool timings) {
    std::string line = "shot " + std::to_string(label) + ": answer_sets " +
                       std::to_string(result.answer_sets.size()) + ", new_rules " +
                       std::to_string(result.grounding.new_rules) + ", cache " +
                       std::to_string(result.grounding.cache_size_rules) + " rules";
    if (result.evicted > 0)
        line += ", evicted " + std::to_string(result.evicted);
    if (timings)
        line += ", ground " + milliseconds(result.stages.grounding) + " ms, solve " +
                milliseconds(result.stages.solving) + " ms, total " + milliseconds(result.wall_time_total) + " ms";
    return line;
}

void print_answer_sets(std::ostream& out, std::size_t label, const ShotResult& result, const Session& session) {
    out << "%% shot " << label << '\n';
    for (const auto& answer_set : result.answer_sets)
        out << session.render(answer_set) << '\n';
}

void print_report(std::ostream& out, const RunOptions& options,
                  const std::vector<std::pair<std::size_t, ShotResult>>& results) {
    const bool timings = !options.no_timings;
    if (options.report == "json") {
        nlohmann::json shots = nlohmann::json::array();
        for (const auto& [label, result] : results) {
            auto entry = shot_json(result, timings);
            entry["shot"] = label;
            shots.push_back(std::move(entry));
        }
        nlohmann::json report = {{"schema", 1}, {"mode", options.mode}, {"shots", shots}};
        out << report.dump(2) << '\n';
        return;
    }
    out << "%% report\n";
    for (const auto& [label, result] : results)
        out << shot_summary(label, result, timings) << '\n';
}

Session open_session(const RunOptions& options, NonGroundProgram program) {
    SessionConfig config = session_config(options);
    if (options.load_state.empty())
        return Session(std::move(program), config);
    std::ifstream in(options.load_state, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + options.load_state);
    return Session::load_state(std::move(program), in, config);
}

void save_session(const RunOptions& options, const Session& session) {
    if (options.save_state.empty())
        return;
    std::ofstream out(options.save_state, std::ios::binary);
    session.save_state(out);
    if (!out)
        throw InputError("cannot write " + options.save_state);
}

NonGroundProgram load_program(const std::string& path, std::ostream& err) {
    std::string text = read_file(path);
    try {
        return parse_program(text);
    } catch (const ParseError& e) {
        print_diagnostics(err, path, e);
        throw;
    }
}

int exit_code(const Error& e) { return e.kind() == ErrorKind::input ? exit_input_error : exit_internal_error; }

int command_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    NonGroundProgram program = load_program(options.program_path, err);
    std::vector<FactSet> shots;
    for (const auto& path : options.shot_paths) {
        std::string text = read_file(path);
        try {
            shots.push_back(parse_facts(text));
        } catch (const ParseError& e) {
            print_diagnostics(err, path, e);
            throw;
        }
    }
    Session session = open_session(options, std::move(program));
    std::vector<std::pair<std::size_t, ShotResult>> results;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        ShotResult result = session.process_shot(shots[i]);
        print_answer_sets(out, i + 1, result, session);
        results.emplace_back(i + 1, std::move(result));
    }
    print_report(out, options, results);
    save_session(options, session);
    return exit_ok;
}

std::string strip_comment(const std::string& line) {
    auto percent = line.find('%');
    return percent == std::string::npos ? line : line.substr(0, percent);
}

int command_stream(const RunOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
    NonGroundProgram program = load_program(options.program_path, err);
    Session session = open_session(options, std::move(program));
    static const std::regex end_marker(R"(#endshot\s*\.)");

    std::string buffer;
    std::size_t label = 0;
    bool failed = false;
    const bool timings = !options.no_timings;

    auto process = [&](const std::string& text) {
        ++label;
        try {
            FactSet facts = parse_facts(text);
            ShotResult result = session.process_shot(facts);
            print_answer_sets(out, label, result, session);
            if (options.report == "json") {
                auto entry = shot_json(result, timings);
                entry["shot"] = label;
                out << entry.dump() << '\n';
            } else {
                out << "%% " << shot_summary(label, result, timings) << '\n';
            }
        } catch (const ParseError& e) {
            print_diagnostics(err, "shot " + std::to_string(label), e);
            failed = true;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::internal)
                throw;
            err << "shot " << label << ": error: " << e.what() << '\n';
            failed = true;
        }
        out.flush();
        err.flush();
    };

    std::string line;
    while (std::getline(in, line)) {
        std::string rest = strip_comment(line);
        std::smatch match;
        while (std::regex_search(rest, match, end_marker)) {
            buffer += match.prefix().str();
            process(buffer);
            buffer.clear();
            rest = match.suffix().str();
        }
        buffer += rest;
        buffer += '\n';
    }
    if (std::any_of(buffer.begin(), buffer.end(), [](unsigned char c) { return !std::isspace(c); }))
        err << "warning: input after the last #endshot. was ignored\n";
    save_session(options, session);
    return failed ? exit_input_error : exit_ok;
}

int command_bench(BenchOptions options, std::ostream& out, std::ostream& err) {
    options.spec.generator = options.generator == "grid-agent" ? Generator::grid_agent : Generator::reach_stream;
    BenchInstance instance = generate(options.spec);
    if (!options.out_dir.empty())
        write_instance(instance, options.out_dir);

    NonGroundProgram program = parse_program(instance.program);
    std::vector<FactSet> shots;
    for (const auto& text : instance.shots)
        shots.push_back(parse_facts(text));

    auto eviction = eviction_from(options.evict, options.budget_rules, std::nullopt);
    ComparisonReport report;
    try {
        report = compare_modes(program, shots, eviction);
    } catch (const InvariantFailure& e) {
        err << "error: " << e.what() << '\n';
        nlohmann::json failure = {{"schema", 1},
                                  {"generator", std::string(to_string(options.spec.generator))},
                                  {"answer_sets_equal", false},
                                  {"error", e.what()}};
        out << failure.dump(2) << '\n';
        return exit_internal_error;
    }
    out << bench_report(options.spec, instance, report).dump(2) << '\n';
    return exit_ok;
}

void add_session_flags(CLI::App& command, RunOptions& options) {
    command.add_option("--program", options.program_path, "Program file")->required();
    command.add_option("--mode", options.mode, "Grounding mode")
        ->check(CLI::IsMember({"incremental", "scratch"}));
    command.add_option("--max-models", options.max_models, "Answer sets per shot: a number or 'all'");
    command.add_option("--report", options.report, "Report format")->check(CLI::IsMember({"text", "json"}));
    command.add_flag("--no-timings", options.no_timings, "Leave timings out of the report");
    command.add_option("--save-state", options.save_state, "Write the session state here when done");
    command.add_option("--load-state", options.load_state, "Resume from a saved session state");
    command.add_option("--evict", options.evict, "Eviction policy")
        ->check(CLI::IsMember({"oldest", "least-triggered"}));
    command.add_option("--budget-rules", options.budget_rules, "Cache budget in rules");
    command.add_option("--budget-bytes", options.budget_bytes, "Cache budget in estimated bytes");
    command.add_flag("--oracle-check", options.oracle_check, "Cross-check each shot by brute force");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"overground: multi-shot answer set evaluation with an overgrounded cache", "overground"};
    app.require_subcommand(1);

    RunOptions run_options;
    auto* run = app.add_subcommand("run", "Evaluate a program over shot files");
    add_session_flags(*run, run_options);
    auto* shots = run->add_option("--shots", run_options.shot_paths, "Fact files, one per shot");
    auto* stream_flag = run->add_flag("--stream", run_options.stream, "Read shots from standard input");
    shots->excludes(stream_flag);

    RunOptions stream_options;
    auto* stream = app.add_subcommand("stream", "Evaluate shots read from standard input");
    add_session_flags(*stream, stream_options);

    BenchOptions bench_options;
    auto* bench = app.add_subcommand("bench", "Compare incremental and scratch grounding on generated shots");
    bench->add_option("--generator", bench_options.generator, "Instance generator")
        ->check(CLI::IsMember({"reach-stream", "grid-agent"}));
    bench->add_option("--nodes", bench_options.spec.nodes, "reach-stream: number of nodes");
    bench->add_option("--shots", bench_options.spec.shots, "reach-stream: number of shots");
    bench->add_option("--edges-per-shot", bench_options.spec.edges_per_shot, "reach-stream: edges added per shot");
    bench->add_option("--grid-side", bench_options.spec.grid_side, "grid-agent: side of the grid");
    bench->add_option("--steps", bench_options.spec.steps, "grid-agent: number of shots");
    bench->add_option("--seed", bench_options.spec.seed, "Random seed");
    bench->add_option("--out-dir", bench_options.out_dir, "Also write the program and shot files here");
    bench->add_option("--evict", bench_options.evict, "Eviction policy for the incremental session")
        ->check(CLI::IsMember({"oldest", "least-triggered"}));
    bench->add_option("--budget-rules", bench_options.budget_rules, "Cache budget in rules");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }

    try {
        if (*run) {
            if (run_options.stream)
                return command_stream(run_options, in, out, err);
            if (run_options.shot_paths.empty()) {
                err << "error: run needs --shots or --stream\n";
                return exit_input_error;
            }
            return command_run(run_options, out, err);
        }
        if (*stream)
            return command_stream(stream_options, in, out, err);
        return command_bench(bench_options, out, err);
    } catch (const ParseError& e) {
        if (e.diagnostics().empty())
            err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal_error;
    }
}

} // namespace overground
