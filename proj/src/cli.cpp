#include <exception>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "bessmarket/commands.hpp"
#include "bessmarket/sweep.hpp"
#include "bessmarket/util.hpp"
#include "bessmarket/version.hpp"

namespace bessmarket {

namespace {

std::vector<double> parse_wear_grid_arg(const std::string& arg) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const auto colon = arg.find(':', pos);
        parts.push_back(arg.substr(pos, colon - pos));
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    if (parts.size() != 3)
        throw Error(Errc::config_error, "--wear-grid expects start:stop:step");
    const auto start = parse_double(parts[0]);
    const auto stop = parse_double(parts[1]);
    const auto step = parse_double(parts[2]);
    if (!start || !stop || !step)
        throw Error(Errc::config_error, "--wear-grid expects numeric start:stop:step");
    return make_wear_grid(*start, *stop, *step);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"market profitability of grid-connected battery storage"};
    app.name(std::string(kToolName));
    app.set_version_flag("--version",
                         std::string(kToolName) + " " + std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string wear_grid_arg;
    bool verify = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "run configuration file")->required();
        sub->add_option("-o,--out", out_dir, "output directory override");
        sub->add_option("--wear-grid", wear_grid_arg, "wear grid override, start:stop:step");
        return sub;
    };

    CLI::App* validate =
        add_common(app.add_subcommand("validate", "ingest and check every configured dataset"));
    CLI::App* fetch =
        add_common(app.add_subcommand("fetch", "acquire configured datasets into the cache"));
    fetch->add_flag("--verify", verify, "re-derive cached CSVs from raw payloads and compare");
    CLI::App* arbitrage =
        add_common(app.add_subcommand("arbitrage", "daily energy arbitrage simulation"));
    CLI::App* reserve =
        add_common(app.add_subcommand("reserve", "secondary reserve break-even economics"));
    CLI::App* sweep =
        add_common(app.add_subcommand("sweep", "profitable-utilization curves over a wear grid"));
    CLI::App* report =
        add_common(app.add_subcommand("report", "validate, then run every configured analysis"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig config = load_run_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (!wear_grid_arg.empty()) config.wear_grid = parse_wear_grid_arg(wear_grid_arg);

        if (validate->parsed()) return cmd_validate(config, out);
        if (fetch->parsed()) return cmd_fetch(config, verify, out);
        if (arbitrage->parsed()) return cmd_arbitrage(config, out);
        if (reserve->parsed()) return cmd_reserve(config, out);
        if (sweep->parsed()) return cmd_sweep(config, out);
        if (report->parsed()) return cmd_report(config, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace bessmarket
