#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "revec/bench.hpp"
#include "revec/config.hpp"
#include "revec/errors.hpp"
#include "revec/oracle.hpp"
#include "revec/raster.hpp"
#include "revec/shadow_map.hpp"

namespace revec {

/// Shared render/compare/bench settings assembled from command-line flags.
struct CliOptions {
    std::string scene;          // path or builtin:NAME
    std::string out_dir = ".";
    std::vector<std::string> modes;
    std::string sm_res;         // "WxH", empty = scene default
    std::string vp_res;
    int maxdist = 16;
    double bias = -1.0;         // < 0 = scene default
    int pcf_kernel = 0;         // 0 = scene default
    int threads = 1;
    int band_radius = 2;
    int frames = 30;
    int warmup = 3;
};

namespace cli_detail {

inline Resolution parse_resolution(const std::string& s) {
    const std::size_t x = s.find('x');
    if (x == std::string::npos || x == 0 || x + 1 == s.size())
        throw ValidationError("resolution must be WxH, got '" + s + "'");
    try {
        Resolution r{std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
        if (r.width < 1 || r.height < 1) throw ValidationError("resolution must be >= 1x1");
        return r;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("resolution must be WxH, got '" + s + "'");
    }
}

inline std::filesystem::path ensure_out_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec || !std::filesystem::is_directory(p))
        throw IoError("cannot create output directory: " + dir);
    return p;
}

}  // namespace cli_detail

/// Loads and applies flag overrides to the scene description.
inline SceneDesc resolve_scene(const CliOptions& opt) {
    if (opt.scene.empty()) throw ValidationError("--scene is required");
    SceneDesc desc = opt.scene.rfind("builtin:", 0) == 0
                         ? builtin_scene_desc(opt.scene.substr(8))
                         : load_scene_config(opt.scene);
    if (!opt.sm_res.empty()) {
        const Resolution r = cli_detail::parse_resolution(opt.sm_res);
        desc.sm_width = r.width;
        desc.sm_height = r.height;
    }
    if (!opt.vp_res.empty()) {
        const Resolution r = cli_detail::parse_resolution(opt.vp_res);
        desc.camera.width = r.width;
        desc.camera.height = r.height;
    }
    desc.params.maxdist = opt.maxdist;
    if (opt.bias >= 0.0) desc.params.depth_bias = opt.bias;
    if (opt.pcf_kernel > 0) desc.params.pcf_kernel = opt.pcf_kernel;
    desc.params.validate();
    return desc;
}

/// render: one visibility PPM per requested mode (<out>/<mode>.ppm).
inline void cmd_render(const CliOptions& opt) {
    if (opt.modes.empty()) throw ValidationError("render needs at least one --mode");
    std::vector<Algorithm> modes;
    for (const std::string& m : opt.modes) modes.push_back(parse_algorithm(m));

    const SceneDesc desc = resolve_scene(opt);
    const Scene scene = build_scene(desc);
    const auto out = cli_detail::ensure_out_dir(opt.out_dir);

    const ShadowMap sm = rasterize_depth(scene.world, scene.light, desc.sm_width, desc.sm_height);
    const GBuffer gb = rasterize_camera(scene.world, scene.camera, scene.light);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Image img = shade_image(gb, sm, modes[i], desc.params, opt.threads);
        write_ppm(img, (out / (opt.modes[i] + ".ppm")).string());
    }
}

/// compare: renders each mode plus the ray-cast oracle, writes all images,
/// compare.csv, and a key=value report per mode.
inline void cmd_compare(const CliOptions& opt) {
    if (opt.modes.empty()) throw ValidationError("compare needs at least one --mode");
    if (opt.band_radius < 0) throw ValidationError("--band-radius must be >= 0");
    std::vector<Algorithm> modes;
    for (const std::string& m : opt.modes) modes.push_back(parse_algorithm(m));

    const SceneDesc desc = resolve_scene(opt);
    const Scene scene = build_scene(desc);
    const auto out = cli_detail::ensure_out_dir(opt.out_dir);

    const ShadowMap sm = rasterize_depth(scene.world, scene.light, desc.sm_width, desc.sm_height);
    const GBuffer gb = rasterize_camera(scene.world, scene.camera, scene.light);
    const Image oracle = raycast_shadow(scene.world, gb, scene.light, opt.threads);
    write_ppm(oracle, (out / "oracle.ppm").string());

    std::ofstream csv((out / "compare.csv").string());
    if (!csv) throw IoError("cannot write compare.csv in " + opt.out_dir);
    csv << kDiffCsvHeader << "\n";
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Image img = shade_image(gb, sm, modes[i], desc.params, opt.threads);
        write_ppm(img, (out / (opt.modes[i] + ".ppm")).string());
        const DiffReport report = diff(img, oracle, oracle, opt.band_radius);
        csv << diff_csv_row(opt.modes[i], report) << "\n";
        std::ofstream kv((out / (opt.modes[i] + ".diff.txt")).string());
        if (!kv) throw IoError("cannot write diff report in " + opt.out_dir);
        write_diff_report_kv(report, kv);
    }
}

/// bench: timing CSV over (algorithm x sm resolution x viewport).
inline void cmd_bench(const CliOptions& opt) {
    std::vector<std::string> mode_names =
        opt.modes.empty() ? std::vector<std::string>{"sm", "rbsm_recovery", "rbsm_filter"}
                          : opt.modes;
    std::vector<Algorithm> algorithms;
    for (const std::string& m : mode_names) algorithms.push_back(parse_algorithm(m));

    CliOptions base = opt;
    base.sm_res.clear();
    base.vp_res.clear();
    const SceneDesc desc = resolve_scene(base);
    const std::vector<Resolution> sm_list{
        opt.sm_res.empty() ? Resolution{desc.sm_width, desc.sm_height}
                           : cli_detail::parse_resolution(opt.sm_res)};
    const std::vector<Resolution> vp_list{
        opt.vp_res.empty() ? Resolution{desc.camera.width, desc.camera.height}
                           : cli_detail::parse_resolution(opt.vp_res)};

    const std::vector<BenchResult> results =
        run_bench(desc, algorithms, sm_list, vp_list, opt.frames, opt.warmup, opt.threads);

    const auto out = cli_detail::ensure_out_dir(opt.out_dir);
    std::ofstream csv((out / "bench.csv").string());
    if (!csv) throw IoError("cannot write bench.csv in " + opt.out_dir);
    write_bench_csv(results, csv);
}

/// dump-sm: writes the light-pass depth grid as <out>/shadow_map.smap.
inline void cmd_dump_sm(const CliOptions& opt) {
    const SceneDesc desc = resolve_scene(opt);
    const Scene scene = build_scene(desc);
    const auto out = cli_detail::ensure_out_dir(opt.out_dir);
    const ShadowMap sm = rasterize_depth(scene.world, scene.light, desc.sm_width, desc.sm_height);
    write_shadow_map(sm, (out / "shadow_map.smap").string());
}

}  // namespace revec
