// Command-line front end: run programs under a chosen aliasing strategy,
// show translations, check the algebraic laws, and benchmark the parallel
// strategy in virtual time.
//
// Exit codes: 0 success / all laws pass; 1 runtime or law failure;
// 2 usage, parse or type errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "malias/eval.hpp"
#include "malias/laws.hpp"
#include "malias/run.hpp"
#include "malias/strategies.hpp"
#include "malias/syntax.hpp"
#include "malias/translate.hpp"

namespace {

using namespace malias;

// The virtual-time benchmark workload: naive fib with a tick per call and
// both recursive calls bound (hence aliased) before the addition.
const char* kFibSource = R"(def arg : int = 10
def fib : int -> int =
  \n. tick "call" + (if n <= 1 then n
      else let a = fib (n - 1) in
           let b = fib (n - 2) in a + b)
main = fib arg
)";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config load_config(const std::string& path) {
    if (path.empty()) return Config{};
    return parse_config(read_file(path));
}

void print_run_text(const PipelineResult& r) {
    std::cout << "value: " << show_value(r.value) << "\n";
    std::cout << "trace: " << show_trace(r.trace) << "\n";
    if (r.par) {
        std::cout << "span: " << r.par->span << "\n";
        std::cout << "work: " << r.par->work << "\n";
    }
}

json run_to_json(const PipelineResult& r) {
    json j;
    if (r.value.is_int())
        j["value"] = r.value.as_int();
    else if (r.value.is_bool())
        j["value"] = r.value.as_bool();
    else
        j["value"] = show_value(r.value);
    j["trace"] = r.par ? par_report_to_json(*r.par) : trace_to_json(r.trace);
    return j;
}

int cmd_run(const std::string& program_path, const std::string& config_path,
            const std::string& strategy_name_, std::uint64_t fuel, std::int64_t arg,
            bool have_arg, const std::string& output) {
    Program p = parse_program(read_file(program_path));
    if (have_arg) p = substitute_arg(p, arg);
    Config cfg = load_config(config_path);
    StrategyId strategy = parse_strategy(strategy_name_);
    PipelineResult r = run_program(p, strategy, cfg, make_fuel(fuel));
    if (output == "json")
        std::cout << run_to_json(r).dump() << "\n";
    else
        print_run_text(r);
    return 0;
}

int cmd_translate(const std::string& program_path, const std::string& translation_name_,
                  const std::string& output) {
    Program p = parse_program(read_file(program_path));
    Translation flavor = parse_translation(translation_name_);
    TargetProgram tp = translate_program(p, flavor);
    if (output == "json") {
        json j;
        j["translation"] = translation_name(flavor);
        j["defs"] = json::array();
        for (const auto& d : tp.defs) {
            json jd;
            jd["name"] = d.name;
            jd["type"] = pretty_type(d.type);
            jd["term"] = pretty_target(d.body);
            j["defs"].push_back(jd);
        }
        j["main"] = {{"type", pretty_type(tp.main_type)}, {"term", pretty_target(tp.main)}};
        std::cout << j.dump() << "\n";
    } else {
        for (const auto& d : tp.defs)
            std::cout << "def " << d.name << " : " << pretty_type(d.type) << " = "
                      << pretty_target(d.body) << "\n";
        std::cout << "main : " << pretty_type(tp.main_type) << " = " << pretty_target(tp.main)
                  << "\n";
    }
    return 0;
}

int cmd_laws(const std::string& strategy_name_, std::uint64_t seed, int cases, int depth,
             const std::string& output) {
    StrategyId strategy = parse_strategy(strategy_name_);
    GenSpec spec;
    spec.seed = seed;
    spec.max_depth = depth;

    std::vector<LawReport> reports = check_malias_laws(strategy, spec, cases);
    for (LawReport& r : check_source_transforms(strategy, spec, cases))
        reports.push_back(std::move(r));
    if (strategy == StrategyId::CbN)
        reports.push_back(check_equivalence(Translation::Cbn, spec, cases));
    if (strategy == StrategyId::CbV)
        reports.push_back(check_equivalence(Translation::Cbv, spec, cases));
    if (strategy == StrategyId::CbNeed)
        reports.push_back(check_at_most_once(spec, cases));

    bool all_passed = true;
    for (const LawReport& r : reports) all_passed = all_passed && r.passed();

    if (output == "json") {
        json j;
        j["strategy"] = strategy_name(strategy);
        j["seed"] = seed;
        j["cases"] = cases;
        j["passed"] = all_passed;
        j["reports"] = json::array();
        for (const LawReport& r : reports) j["reports"].push_back(law_report_to_json(r));
        std::cout << j.dump() << "\n";
    } else {
        for (const LawReport& r : reports) {
            if (r.passed()) {
                std::cout << r.law << ": PASS (" << r.cases << " cases)\n";
            } else {
                std::cout << r.law << ": FAIL (" << r.failures.size() << " of " << r.cases
                          << " cases)\n";
                const LawFailure& f = r.failures.front();
                std::cout << "  first counterexample (seed " << f.seed << "): " << f.detail
                          << "\n";
            }
        }
    }
    return all_passed ? 0 : 1;
}

int cmd_bench_par(int min_n, int max_n, const std::string& program_path,
                  const std::string& config_path, std::uint64_t fuel,
                  const std::string& output) {
    std::string source = program_path.empty() ? std::string(kFibSource)
                                              : read_file(program_path);
    Program base = parse_program(source);
    Config cfg = load_config(config_path);

    struct Row {
        int n;
        std::int64_t value, work, span;
        bool agree;
    };
    std::vector<Row> rows;
    bool all_agree = true;
    for (int n = min_n; n <= max_n; ++n) {
        Program p = substitute_arg(base, n);
        PipelineResult par = run_program(p, StrategyId::CbParNeed, cfg, make_fuel(fuel));
        PipelineResult need = run_program(p, StrategyId::CbNeed, cfg, make_fuel(fuel));
        bool agree = value_equal(par.value, need.value);
        all_agree = all_agree && agree;
        rows.push_back({n, par.value.as_int(), par.par->work, par.par->span, agree});
    }

    if (output == "json") {
        json j;
        j["rows"] = json::array();
        for (const Row& r : rows) {
            json jr;
            jr["n"] = r.n;
            jr["value"] = r.value;
            jr["work"] = r.work;
            jr["span"] = r.span;
            jr["speedup"] = static_cast<double>(r.work) / static_cast<double>(r.span);
            jr["matches_need"] = r.agree;
            j["rows"].push_back(jr);
        }
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "  n      work      span   speedup\n";
        for (const Row& r : rows) {
            double speedup = static_cast<double>(r.work) / static_cast<double>(r.span);
            std::printf("%3d %9lld %9lld %9.2f%s\n", r.n, static_cast<long long>(r.work),
                        static_cast<long long>(r.span), speedup,
                        r.agree ? "" : "  (VALUE MISMATCH vs need)");
        }
    }
    return all_agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambda-to-monadic-code toolkit with pluggable aliasing strategies"};
    app.require_subcommand(1);

    std::string program_path, config_path, output = "text";
    std::string strategy = "need", translation = "cba";
    std::uint64_t fuel = malias::FuelMeter::kDefaultFuel;
    std::uint64_t seed = 1;
    int cases = 1000, depth = 4;
    std::int64_t arg_value = 0;
    int min_n = 5, max_n = 15;

    CLI::App* run = app.add_subcommand("run", "parse, translate and run a program");
    run->add_option("program", program_path, "source program file")->required();
    run->add_option("--config", config_path, "configuration file (key = integer lines)");
    run->add_option("--strategy", strategy, "cbn, cbv, need or par")->default_str("need");
    run->add_option("--fuel", fuel, "step limit");
    CLI::Option* arg_opt =
        run->add_option("--arg", arg_value, "substitute N for the `arg` definition");
    run->add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));

    CLI::App* translate = app.add_subcommand("translate", "show the translated program");
    translate->add_option("program", program_path, "source program file")->required();
    translate->add_option("--translation", translation, "cbn, cbv or cba")->default_str("cba");
    translate->add_option("--output", output, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* laws = app.add_subcommand("laws", "check the aliasing laws for a strategy");
    laws->add_option("--strategy", strategy, "cbn, cbv, need or par")->default_str("need");
    laws->add_option("--seed", seed, "generator seed");
    laws->add_option("--cases", cases, "cases per law");
    laws->add_option("--depth", depth, "maximum generated depth");
    laws->add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));

    CLI::App* bench = app.add_subcommand("bench-par", "work/span sweep of the par strategy");
    bench->add_option("--min-n", min_n, "smallest input");
    bench->add_option("--max-n", max_n, "largest input");
    bench->add_option("--program", program_path, "override the built-in fib workload");
    bench->add_option("--config", config_path, "configuration file");
    bench->add_option("--fuel", fuel, "step limit");
    bench->add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return cmd_run(program_path, config_path, strategy, fuel, arg_value,
                           arg_opt->count() > 0, output);
        if (translate->parsed()) return cmd_translate(program_path, translation, output);
        if (laws->parsed()) return cmd_laws(strategy, seed, cases, depth, output);
        if (bench->parsed())
            return cmd_bench_par(min_n, max_n, program_path, config_path, fuel, output);
    } catch (const malias::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const malias::TypeError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const malias::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const malias::RuntimeError& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
