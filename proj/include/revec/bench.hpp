#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#ifdef __linux__
#include <malloc.h>
#endif
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "revec/config.hpp"
#include "revec/errors.hpp"
#include "revec/raster.hpp"

namespace revec {

/// One full pipeline pass: light-pass depth, camera pass, shading.
struct Frame {
    ShadowMap sm;
    GBuffer gbuffer;
    Image image;
};

inline Frame render_frame(const Scene& scene, int sm_width, int sm_height, Algorithm mode,
                          const RbsmParams& params, int threads = 1) {
    Frame f;
    f.sm = rasterize_depth(scene.world, scene.light, sm_width, sm_height);
    f.gbuffer = rasterize_camera(scene.world, scene.camera, scene.light);
    f.image = shade_image(f.gbuffer, f.sm, mode, params, threads);
    return f;
}

struct BenchResult {
    std::string algorithm;
    int sm_w = 0, sm_h = 0;
    int vp_w = 0, vp_h = 0;
    int threads = 1;
    int frames = 0;
    double median_ms = 0.0;   // full frame
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double shade_median_ms = 0.0;

    void validate() const {
        if (frames < 5) throw ValidationError("bench result must cover >= 5 frames");
        if (median_ms > mean_ms + 3.0 * std_ms + 1e-9)
            throw ValidationError("bench result median exceeds mean + 3 std");
    }
};

inline constexpr const char* kBenchCsvHeader =
    "algorithm,sm_w,sm_h,vp_w,vp_h,threads,frames,median_ms,mean_ms,std_ms,shade_median_ms";

inline void write_bench_csv(const std::vector<BenchResult>& results, std::ostream& out) {
    out << kBenchCsvHeader << "\n";
    for (const BenchResult& r : results)
        out << r.algorithm << "," << r.sm_w << "," << r.sm_h << "," << r.vp_w << "," << r.vp_h
            << "," << r.threads << "," << r.frames << "," << r.median_ms << "," << r.mean_ms << ","
            << r.std_ms << "," << r.shade_median_ms << "\n";
}

namespace bench_detail {

/// Monotonic time in milliseconds. On Linux this is process CPU time, which
/// tracks the deterministic rendering work and ignores scheduler noise from
/// other processes; elsewhere it falls back to the steady wall clock.
inline double now_ms() {
#ifdef __linux__
    timespec ts;
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return ts.tv_sec * 1e3 + ts.tv_nsec / 1e6;
#else
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
#endif
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) * 0.5;
}

}  // namespace bench_detail

struct Resolution {
    int width = 0;
    int height = 0;
};

/// Times the pipeline per (algorithm x shadow-map resolution x viewport).
/// Warmup frames run but are not recorded. Timing never feeds back into the
/// computation, so benchmarked images equal single-run images bit for bit.
inline std::vector<BenchResult> run_bench(const SceneDesc& desc,
                                          const std::vector<Algorithm>& algorithms,
                                          const std::vector<Resolution>& sm_resolutions,
                                          const std::vector<Resolution>& viewports, int frames,
                                          int warmup, int threads = 1,
                                          std::vector<Frame>* last_frames = nullptr) {
    if (frames < 5) throw ValidationError("bench needs frames >= 5");
    if (warmup < 1) throw ValidationError("bench needs warmup >= 1");
    if (algorithms.empty() || sm_resolutions.empty() || viewports.empty())
        throw ValidationError("bench needs at least one algorithm, sm resolution, and viewport");

#ifdef __linux__
    // Keep the large per-frame buffers on the heap free list instead of
    // handing them back to the kernel every frame; the page-fault churn
    // otherwise dominates and destabilizes the timings.
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif

    std::vector<BenchResult> results;

    for (const Resolution& vp : viewports) {
        SceneDesc vdesc = desc;
        vdesc.camera.width = vp.width;
        vdesc.camera.height = vp.height;
        const Scene scene = build_scene(vdesc);
        for (const Resolution& sm_res : sm_resolutions) {
            // Algorithms are interleaved round-robin per frame so that bursts
            // of machine noise spread evenly instead of skewing one block.
            const std::size_t n_algos = algorithms.size();
            std::vector<std::vector<double>> total_ms(n_algos), shade_ms(n_algos);
            // One frame buffer is shared by every algorithm so they all work
            // on identical memory addresses; per-algorithm buffers would give
            // each algorithm its own cache-conflict pattern for the whole run.
            Frame frame;
            for (int i = 0; i < warmup + frames; ++i) {
                // The light and camera passes do not depend on the shading
                // algorithm, so each frame rasterizes once and every
                // algorithm shades the same buffers. The computation is
                // deterministic, so the faster of two executions is the
                // better estimate of its true cost.
                double raster = 0.0;
                for (int pass = 0; pass < 2; ++pass) {
                    const double t0 = bench_detail::now_ms();
                    frame.sm =
                        rasterize_depth(scene.world, scene.light, sm_res.width, sm_res.height);
                    frame.gbuffer = rasterize_camera(scene.world, scene.camera, scene.light);
                    const double t1 = bench_detail::now_ms();
                    raster = pass == 0 ? t1 - t0 : std::min(raster, t1 - t0);
                }
                for (std::size_t a = 0; a < n_algos; ++a) {
                    double shade = 0.0;
                    for (int pass = 0; pass < 2; ++pass) {
                        const double t0 = bench_detail::now_ms();
                        frame.image = shade_image(frame.gbuffer, frame.sm, algorithms[a],
                                                  desc.params, threads);
                        const double t1 = bench_detail::now_ms();
                        shade = pass == 0 ? t1 - t0 : std::min(shade, t1 - t0);
                    }
                    if (i < warmup) continue;
                    total_ms[a].push_back(raster + shade);
                    shade_ms[a].push_back(shade);
                }
            }

            for (std::size_t a = 0; a < n_algos; ++a) {
                BenchResult r;
                r.algorithm = algorithm_name(algorithms[a]);
                r.sm_w = sm_res.width;
                r.sm_h = sm_res.height;
                r.vp_w = vp.width;
                r.vp_h = vp.height;
                r.threads = threads;
                r.frames = frames;
                r.median_ms = bench_detail::median(total_ms[a]);
                r.shade_median_ms = bench_detail::median(shade_ms[a]);
                double sum = 0.0;
                for (double t : total_ms[a]) sum += t;
                r.mean_ms = sum / total_ms[a].size();
                double var = 0.0;
                for (double t : total_ms[a]) var += (t - r.mean_ms) * (t - r.mean_ms);
                r.std_ms = std::sqrt(var / total_ms[a].size());
                r.validate();
                results.push_back(r);
                if (last_frames)
                    last_frames->push_back(
                        render_frame(scene, sm_res.width, sm_res.height, algorithms[a],
                                     desc.params, threads));
            }
        }
    }
    return results;
}

}  // namespace revec
