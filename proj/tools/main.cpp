#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "revec/cli.hpp"

namespace {

void add_scene_flags(CLI::App* cmd, revec::CliOptions& opt) {
    cmd->add_option("--scene", opt.scene, "Scene config path or builtin:NAME")->required();
    cmd->add_option("--sm-res", opt.sm_res, "Shadow map resolution WxH");
    cmd->add_option("--vp-res", opt.vp_res, "Viewport resolution WxH");
    cmd->add_option("--maxdist", opt.maxdist, "Traversal cap in texels")->capture_default_str();
    cmd->add_option("--bias", opt.bias, "Normalized depth bias (default from scene)");
    cmd->add_option("--pcf-kernel", opt.pcf_kernel, "PCF kernel size (odd)");
    cmd->add_option("--threads", opt.threads, "Shading threads")->capture_default_str();
    cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic software shadow renderer with revectorization"};
    app.require_subcommand(1);

    revec::CliOptions opt;

    CLI::App* render = app.add_subcommand("render", "Render visibility images");
    add_scene_flags(render, opt);
    render->add_option("--mode", opt.modes, "sm, rbsm_recovery, rbsm_filter, or pcf")->required();

    CLI::App* compare = app.add_subcommand("compare", "Render modes and diff against the oracle");
    add_scene_flags(compare, opt);
    compare->add_option("--mode", opt.modes, "Modes to compare")->required();
    compare->add_option("--band-radius", opt.band_radius, "Oracle edge band radius in pixels")
        ->capture_default_str();

    CLI::App* bench = app.add_subcommand("bench", "Time the shading algorithms");
    add_scene_flags(bench, opt);
    bench->add_option("--mode", opt.modes, "Algorithms to time (default: sm and both rbsm modes)");
    bench->add_option("--frames", opt.frames, "Measured frames (>= 5)")->capture_default_str();
    bench->add_option("--warmup", opt.warmup, "Warmup frames (>= 1)")->capture_default_str();

    CLI::App* dump = app.add_subcommand("dump-sm", "Write the raw shadow map");
    add_scene_flags(dump, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (render->parsed()) revec::cmd_render(opt);
        else if (compare->parsed()) revec::cmd_compare(opt);
        else if (bench->parsed()) revec::cmd_bench(opt);
        else revec::cmd_dump_sm(opt);
        return 0;
    } catch (const revec::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
