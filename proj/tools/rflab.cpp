#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "rflab/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for collapsing Ricci flow sequences"};
    app.require_subcommand(1);

    std::string config, out, recipe;
    std::uint64_t seed = 0;
    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config, "JSON config file")->required();
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--seed", seed, "random seed");
    };

    const char* commands[][2] = {
        {"simulate", "evolve a rotationally symmetric surface"},
        {"collapse", "build a collapsing family and sample metric spaces"},
        {"dilate", "point selection and parabolic rescaling"},
        {"gh", "Gromov-Hausdorff bounds between sampled spaces"},
        {"glue", "cut a profile into windows and glue them back"},
        {"compare", "compare a solution with the cigar soliton"},
        {"classify", "local model and singular point classification"},
    };
    for (auto& [name, help] : commands) common(app.add_subcommand(name, help));
    auto* pipe = app.add_subcommand("pipeline", "run a named recipe");
    pipe->add_option("recipe", recipe, "recipe name (type2b)")->required();
    common(pipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rflab::cli::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return rflab::cli::run_main(command, recipe, config, out, seed);
}
