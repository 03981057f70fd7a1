#include <dchaos/cli/runner.hpp>

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"dchaos: distributional chaos along index sequences"};
    app.require_subcommand(1, 1);

    dchaos::cli::RunOptions opt;
    std::string config;
    std::size_t horizon = 0, stride = 0;
    std::uint64_t seed = 0;
    std::string out;

    const std::vector<std::pair<std::string, std::string>> help{
        {"density", "upper density of P along Q"},
        {"distfn", "distribution function profile of one pair"},
        {"classify", "Li-Yorke and distributional flags for pairs"},
        {"merge", "merge a family into one sequence of upper density one"},
        {"pipeline", "chaotic set to a distributionally scrambled sequence"},
        {"uniform", "uniformly chaotic set to a sequence (rigidity checked)"},
        {"oracle", "compare block-family profiles against closed-form counts"},
    };
    for (const auto& [name, text] : help) {
        auto* sub = app.add_subcommand(name, text);
        sub->add_option("-c,--config", config, "config file")->check(CLI::ExistingFile);
        sub->add_option("-n,--horizon", horizon, "override run.horizon")->check(CLI::PositiveNumber);
        sub->add_option("-s,--seed", seed, "override run.seed");
        sub->add_option("-o,--out", out, "output directory (overrides run.out)");
        sub->add_option("--checkpoint-stride", stride, "override run.checkpoint_stride")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    auto* sub = app.get_subcommands().front();
    opt.command = sub->get_name();
    if (sub->count("--config")) opt.config_path = config;
    if (sub->count("--horizon")) opt.horizon = horizon;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--out")) opt.out_dir = out;
    if (sub->count("--checkpoint-stride")) opt.checkpoint_stride = stride;
    return dchaos::cli::run(opt);
}
