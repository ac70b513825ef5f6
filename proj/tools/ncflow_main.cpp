#include <string>

#include <CLI11.hpp>

#include "ncflow/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"null cone curvature flow laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_dir;

    const char* commands[] = {"flow", "foliate", "stability", "barriers",
                              "verify"};
    const char* blurbs[] = {
        "run one prescribed curvature flow to stationarity",
        "sweep a foliation by leaves of constant curvature",
        "flow to one leaf and report its stability operator",
        "build a barrier certificate for a cone region",
        "run the discretization order and identity checks",
    };
    for (int i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(commands[i], blurbs[i]);
        sub->add_option("config", config_path, "plain-text key = value config")
            ->required();
    }
    auto* plots = app.add_subcommand(
        "emit_plots", "rebuild plain-text plot data from a run directory");
    plots->add_option("run_dir", run_dir, "directory written by a command")
        ->required();

    CLI11_PARSE(app, argc, argv);

    auto* sub = app.get_subcommands().front();
    if (sub == plots) return ncflow::emit_plots(run_dir);
    return ncflow::run_command(sub->get_name(), config_path);
}
