// Acceptance suite for the shadow renderer. Each criterion prints one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
// argv[1] must be the path to the revec command-line binary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revec/bench.hpp"
#include "revec/config.hpp"
#include "revec/oracle.hpp"

using namespace revec;

namespace {

int g_failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail = "") {
    std::printf("criterion %2d %-34s %s%s%s\n", number, title, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!ok) ++g_failures;
}

NormalizedDistances make_nrd(double x, double y, int zflag, int wflag) {
    NormalizedDistances nrd;
    nrd.x = x;
    nrd.y = y;
    nrd.zflag = zflag;
    nrd.wflag = wflag;
    return nrd;
}

Discontinuity make_d(double dx, double dy, double dz) {
    Discontinuity d;
    d.dx = dx;
    d.dy = dy;
    d.dz = dz;
    return d;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Branch tables for both visibility functions.

bool criterion_1() {
    bool ok = true;
    // recovery branches
    ok &= visibility_recovery(make_d(0.75, 0.25, 1), make_nrd(0.9, 0.9, 0, 0)) == 0.0;
    ok &= visibility_recovery(make_d(0.25, 0.75, 1), make_nrd(0.9, 0.9, 0, 0)) == 0.0;
    ok &= visibility_recovery(make_d(0.5, 0.0, 1), make_nrd(0.3, 0.3, 1, 0)) == 0.0;
    ok &= visibility_recovery(make_d(0.0, 0.5, 1), make_nrd(0.3, 0.3, 0, 1)) == 0.0;
    ok &= visibility_recovery(make_d(0.5, 0.0, 1), make_nrd(0.3, 0.3, -1, 0)) == 1.0;
    ok &= visibility_recovery(make_d(0.0, 0.5, 1), make_nrd(0.3, 0.3, 0, -1)) == 1.0;
    // L-shape: the diagonal y = 1 - x decides
    ok &= visibility_recovery(make_d(0.5, 0.5, 1), make_nrd(0.2, 0.2, 0, 0)) == 0.0;
    ok &= visibility_recovery(make_d(0.5, 0.5, 1), make_nrd(0.8, 0.8, 0, 0)) == 1.0;
    ok &= visibility_recovery(make_d(0.5, 0.5, 1), make_nrd(0.5, 0.5, 0, 0)) == 1.0;

    // filtering branches
    ok &= visibility_filtering(make_d(0.75, 0.75, 0), make_nrd(0.4, 0.4, 0, 0)) == 0.0;
    ok &= visibility_filtering(make_d(0.75, 0.75, 1), make_nrd(0.4, 0.4, 0, 0)) == 1.0;
    ok &= visibility_filtering(make_d(0.5, 0.5, 0), make_nrd(0.4, 0.25, 1, 1)) == 0.0;
    ok &= visibility_filtering(make_d(0.5, 0.5, 1), make_nrd(0.4, 0.25, 1, 1)) == 1.0;
    ok &= visibility_filtering(make_d(0.5, 0.0, 0), make_nrd(0.4, 0.25, 1, 0)) == 0.25;
    ok &= visibility_filtering(make_d(0.5, 0.0, 1), make_nrd(0.4, 0.25, 1, 0)) == 0.75;
    ok &= visibility_filtering(make_d(0.0, 0.5, 0), make_nrd(0.4, 0.25, 0, 1)) == 0.4;
    ok &= visibility_filtering(make_d(0.0, 0.5, 1), make_nrd(0.4, 0.25, 0, 1)) == 0.6;
    ok &= visibility_filtering(make_d(0.5, 0.0, 0), make_nrd(0.4, 0.25, -1, 0)) == 1.0;
    ok &= visibility_filtering(make_d(0.5, 0.0, 1), make_nrd(0.4, 0.25, 0, -1)) == 0.0;
    // L-shape: clamp(dz + sign * (x + y))
    ok &= visibility_filtering(make_d(0.5, 0.5, 0), make_nrd(0.25, 0.25, 0, 0)) == 0.5;
    ok &= visibility_filtering(make_d(0.5, 0.5, 1), make_nrd(0.25, 0.25, 0, 0)) == 0.5;
    ok &= visibility_filtering(make_d(0.5, 0.5, 0), make_nrd(0.75, 0.5, 0, 0)) == 1.0;
    ok &= visibility_filtering(make_d(0.5, 0.5, 1), make_nrd(0.75, 0.5, 0, 0)) == 0.0;
    return ok;
}

// ---------------------------------------------------------------------------
// 2. Exhaustive enumeration over the discrete input space.

bool criterion_2() {
    const double levels[] = {0.0, 0.25, 0.5, 0.75};
    bool ok = true;
    for (double dx : levels)
        for (double dy : levels)
            for (int dz = 0; dz <= 1; ++dz)
                for (int zflag = -1; zflag <= 1; ++zflag)
                    for (int wflag = -1; wflag <= 1; ++wflag)
                        for (int xi = 0; xi <= 20; ++xi)
                            for (int yi = 0; yi <= 20; ++yi) {
                                const double x = 0.05 * xi;
                                const double y = 0.05 * yi;
                                const Discontinuity d = make_d(dx, dy, dz);
                                const NormalizedDistances nrd = make_nrd(x, y, zflag, wflag);
                                const double r = visibility_recovery(d, nrd);
                                const double f = visibility_filtering(d, nrd);
                                if (r != 0.0 && r != 1.0) ok = false;
                                if (f < 0.0 || f > 1.0) ok = false;
                                // U and O configurations recover to shadow
                                const bool u_or_o =
                                    dx == 0.75 || dy == 0.75 || zflag == 1 || wflag == 1;
                                if (u_or_o && r != 0.0) ok = false;
                                // I configurations recover to lit
                                if (!u_or_o && (zflag == -1 || wflag == -1) && r != 1.0)
                                    ok = false;
                            }
    return ok;
}

// ---------------------------------------------------------------------------
// 3. Staircase scene: the recovered boundary hugs the straight line through
// consecutive staircase corners, and recovery beats plain shadow mapping.

bool criterion_3(std::string& detail) {
    const SceneDesc desc = builtin_scene_desc("staircase");
    const Scene scene = build_scene(desc);
    const Frame rec =
        render_frame(scene, desc.sm_width, desc.sm_height, Algorithm::rbsm_recovery, desc.params);
    const Frame plain =
        render_frame(scene, desc.sm_width, desc.sm_height, Algorithm::sm, desc.params);

    // staircase corners, read off the shadow map: for each texel column, the
    // first occupied row from the top edge of the blocker footprint
    const ShadowMap& sm = rec.sm;
    std::vector<int> jtop(sm.width, -1);
    for (int i = 0; i < sm.width; ++i)
        for (int j = sm.height - 1; j >= 0; --j)
            if (sm.at(i, j) < 0.9f) {
                jtop[i] = j;
                break;
            }
    Mat4 inv;
    if (!invert(scene.light.view_projection, inv)) return false;
    std::vector<Vec2> corners;  // camera pixel coordinates on the receiver
    for (int i = 1; i < sm.width; ++i) {
        if (jtop[i] == jtop[i - 1] || jtop[i] < 0 || jtop[i - 1] < 0) continue;
        const double u = 2.0 * i / sm.width - 1.0;
        const double v = 2.0 * (std::max(jtop[i], jtop[i - 1]) + 1) / sm.height - 1.0;
        // intersect the light ray through the corner with the ground plane
        const Vec4 w0 = inv.mul(Vec4{u, v, 0.0, 1.0});
        const Vec4 w1 = inv.mul(Vec4{u, v, 1.0, 1.0});
        const double t = w0.y / (w0.y - w1.y);
        const Vec3 wp{w0.x + t * (w1.x - w0.x), 0.0, w0.z + t * (w1.z - w0.z)};
        const Vec4 c = scene.camera.view_projection.mul(wp);
        corners.push_back({(c.x / c.w * 0.5 + 0.5) * scene.camera.width - 0.5,
                           (1.0 - (c.y / c.w * 0.5 + 0.5)) * scene.camera.height - 0.5});
    }
    if (corners.size() < 2) return false;

    auto dist_to_polyline = [&](double px, double py) {
        double best = 1e30;
        for (std::size_t k = 0; k + 1 < corners.size(); ++k) {
            const double ax = corners[k].x, ay = corners[k].y;
            const double vx = corners[k + 1].x - ax, vy = corners[k + 1].y - ay;
            double t = ((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy);
            t = std::clamp(t, 0.0, 1.0);
            const double ddx = px - (ax + t * vx), ddy = py - (ay + t * vy);
            best = std::min(best, std::sqrt(ddx * ddx + ddy * ddy));
        }
        return best;
    };

    long total = 0, within = 0;
    for (int x = 0; x < rec.image.width; ++x) {
        for (int y = 0; y + 1 < rec.image.height; ++y) {
            const double a = rec.image.at(x, y), b = rec.image.at(x, y + 1);
            if ((a >= 0.5) == (b >= 0.5)) continue;
            const GBufferPixel& pa = rec.gbuffer.at(x, y);
            const GBufferPixel& pb = rec.gbuffer.at(x, y + 1);
            if (!pa.covered || !pb.covered) continue;
            if (std::abs(pa.world.y) > 1e-9 || std::abs(pb.world.y) > 1e-9) continue;
            ++total;
            if (dist_to_polyline(x, y + 0.5) <= 1.0) ++within;
        }
    }
    const double pct = total > 0 ? 100.0 * within / total : 0.0;

    const Image oracle = raycast_shadow(scene.world, rec.gbuffer, scene.light, 4);
    const DiffReport rec_diff = diff(rec.image, oracle, oracle, 2);
    const DiffReport sm_diff = diff(plain.image, oracle, oracle, 2);

    std::ostringstream os;
    os << "boundary " << within << "/" << total << " (" << pct << "%), misclassified sm "
       << sm_diff.misclassified << " vs recovery " << rec_diff.misclassified;
    detail = os.str();
    return pct >= 95.0 && total > 100 && sm_diff.misclassified > rec_diff.misclassified;
}

// ---------------------------------------------------------------------------
// 4. Plain-SM shadow pixels stay shadowed under recovery on every scene.

bool criterion_4(std::string& detail) {
    long violations = 0;
    for (const char* name : {"staircase", "bar-grid", "fence-like"}) {
        const SceneDesc desc = builtin_scene_desc(name);
        const Scene scene = build_scene(desc);
        const ShadowMap sm =
            rasterize_depth(scene.world, scene.light, desc.sm_width, desc.sm_height);
        const GBuffer gb = rasterize_camera(scene.world, scene.camera, scene.light);
        const Image plain = shade_image(gb, sm, Algorithm::sm, desc.params, 4);
        const Image rec = shade_image(gb, sm, Algorithm::rbsm_recovery, desc.params, 4);
        for (int y = 0; y < plain.height; ++y)
            for (int x = 0; x < plain.width; ++x)
                if (gb.at(x, y).covered && plain.at(x, y) == 0.0 && rec.at(x, y) != 0.0)
                    ++violations;
    }
    detail = "violations " + std::to_string(violations);
    return violations == 0;
}

// ---------------------------------------------------------------------------
// 5. Filtering continuity across the staircase edge plus exact unit-level
// complementarity of the two shadow-test sides.

bool criterion_5(std::string& detail) {
    const SceneDesc desc = builtin_scene_desc("staircase");
    const Scene scene = build_scene(desc);
    const Frame f =
        render_frame(scene, desc.sm_width, desc.sm_height, Algorithm::rbsm_filter, desc.params);
    double max_step = 0.0;
    for (int x = 0; x < f.image.width; ++x) {
        for (int y = 0; y + 1 < f.image.height; ++y) {
            const GBufferPixel& pa = f.gbuffer.at(x, y);
            const GBufferPixel& pb = f.gbuffer.at(x, y + 1);
            if (!pa.covered || !pb.covered) continue;
            if (std::abs(pa.world.y) > 1e-9 || std::abs(pb.world.y) > 1e-9) continue;
            const double a = f.image.at(x, y), b = f.image.at(x, y + 1);
            if (a == b || (a == 0.0 && b == 0.0) || (a == 1.0 && b == 1.0)) continue;
            max_step = std::max(max_step, std::abs(a - b));
        }
    }
    // one shadow-map texel of staircase run per unit of normalized distance
    const double edge_len = 1.0 / std::tan(0.21);
    const double bound = 1.0 / edge_len + 0.05;

    // exact complementarity on dyadic coordinates (no rounding, no clamping)
    bool complementary = true;
    for (int zflag = -1; zflag <= 1; ++zflag)
        for (int wflag = -1; wflag <= 1; ++wflag)
            for (int xi = 0; xi <= 64; ++xi)
                for (int yi = 0; yi <= 64; ++yi) {
                    const double x = xi / 64.0;
                    const double y = yi / 64.0;
                    if (zflag == 0 && wflag == 0 && (x + y <= 0.0 || x + y >= 1.0))
                        continue;  // the L-shape clamp saturates there
                    const NormalizedDistances nrd = make_nrd(x, y, zflag, wflag);
                    const double lit = visibility_filtering(make_d(0.5, 0.5, 0), nrd);
                    const double shadowed = visibility_filtering(make_d(0.5, 0.5, 1), nrd);
                    if (lit + shadowed != 1.0) complementary = false;
                }

    std::ostringstream os;
    os << "max step " << max_step << " bound " << bound;
    detail = os.str();
    return max_step > 0.0 && max_step <= bound && complementary;
}

// ---------------------------------------------------------------------------
// 6. Mirroring the scene about x mirrors the image, bit for bit.

SceneDesc mirrored(SceneDesc d) {
    for (MeshInstance& inst : d.meshes)
        for (Vec3& v : inst.inline_mesh.vertices) v.x = -v.x;
    d.camera.position.x = -d.camera.position.x;
    d.camera.look_at.x = -d.camera.look_at.x;
    d.camera.up.x = -d.camera.up.x;
    d.light_vector.x = -d.light_vector.x;
    return d;
}

bool criterion_6(std::string& detail) {
    long mismatches = 0;
    for (const char* name : {"staircase", "bar-grid", "fence-like"}) {
        const SceneDesc d = builtin_scene_desc(name);
        const SceneDesc m = mirrored(d);
        const Scene s1 = build_scene(d);
        const Scene s2 = build_scene(m);
        for (Algorithm a : {Algorithm::sm, Algorithm::rbsm_recovery, Algorithm::rbsm_filter}) {
            const Frame f1 = render_frame(s1, d.sm_width, d.sm_height, a, d.params, 4);
            const Frame f2 = render_frame(s2, m.sm_width, m.sm_height, a, m.params, 4);
            const Image flipped = flip_horizontal(f2.image);
            for (std::size_t i = 0; i < f1.image.pixels.size(); ++i)
                if (f1.image.pixels[i] != flipped.pixels[i]) ++mismatches;
        }
    }
    detail = "mismatches " + std::to_string(mismatches);
    return mismatches == 0;
}

// ---------------------------------------------------------------------------
// 7. Raising maxdist past the longest edge run changes nothing, and a
// 40-texel run is cut off at exactly -(maxdist + 1).

bool criterion_7(std::string& detail) {
    bool identical = true;
    // all edge runs in these scenes are shorter than 16 texels
    for (const char* name : {"staircase", "bar-grid"}) {
        const SceneDesc desc = builtin_scene_desc(name);
        const Scene scene = build_scene(desc);
        for (Algorithm a : {Algorithm::rbsm_recovery, Algorithm::rbsm_filter}) {
            RbsmParams p16 = desc.params;
            p16.maxdist = 16;
            RbsmParams p64 = desc.params;
            p64.maxdist = 64;
            const Frame f16 = render_frame(scene, desc.sm_width, desc.sm_height, a, p16, 4);
            const Frame f64 = render_frame(scene, desc.sm_width, desc.sm_height, a, p64, 4);
            if (f16.image.pixels != f64.image.pixels) identical = false;
        }
    }

    // synthetic 40-texel horizontal run: a shadowed strip along the edge
    ShadowMap sm(64, 8);
    for (int y = 0; y <= 3; ++y)
        for (int x = 10; x <= 49; ++x) sm.at(x, y) = 0.2f;
    const double p_z = 0.5, bias = 1e-4;
    const Discontinuity d = compute_discontinuity(sm, 30, 3, p_z, bias);
    const int left = traverse(sm, 30, 3, d, -1, 0, p_z, bias, 16);
    const int right = traverse(sm, 30, 3, d, 1, 0, p_z, bias, 16);

    std::ostringstream os;
    os << "traverse left " << left << " right " << right;
    detail = os.str();
    return identical && left == -17 && right == -17;
}

// ---------------------------------------------------------------------------
// 8. Recovery's near-edge misclassification count never grows with shadow
// map resolution.

bool criterion_8(std::string& detail) {
    long previous = -1;
    bool ok = true;
    std::ostringstream os;
    os << "edge band";
    for (int res : {512, 1024, 2048}) {
        SceneDesc desc = builtin_scene_desc("staircase");
        desc.sm_width = desc.sm_height = res;
        const Scene scene = build_scene(desc);
        const Frame f = render_frame(scene, res, res, Algorithm::rbsm_recovery, desc.params, 4);
        const Image oracle = raycast_shadow(scene.world, f.gbuffer, scene.light, 4);
        const DiffReport r = diff(f.image, oracle, oracle, 2);
        if (previous >= 0 && r.edge_band_misclassified > previous) ok = false;
        previous = r.edge_band_misclassified;
        os << " " << r.edge_band_misclassified;
    }
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------------
// 9. Median shading time orders sm <= rbsm_recovery <= rbsm_filter.

bool criterion_9(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ordered = true;
    std::ostringstream os;
    for (const char* name : {"staircase", "bar-grid", "fence-like"}) {
        const SceneDesc desc = builtin_scene_desc(name);
        const std::vector<BenchResult> results = run_bench(
            desc, {Algorithm::sm, Algorithm::rbsm_recovery, Algorithm::rbsm_filter},
            {{1024, 1024}}, {{1280, 720}}, 25, 2);
        if (results.size() != 3) return false;
        const double t_sm = results[0].shade_median_ms;
        const double t_rec = results[1].shade_median_ms;
        const double t_fil = results[2].shade_median_ms;
        if (!(t_sm <= t_rec && t_rec <= t_fil)) ordered = false;
        os << name << " " << t_sm << "/" << t_rec << "/" << t_fil << "ms ";
    }
    const double secs = elapsed_s(t0);
    os << "in " << secs << "s";
    detail = os.str();
    return ordered && secs < 300.0;
}

// ---------------------------------------------------------------------------
// 10. Two identical CLI render invocations produce identical PPM bytes.

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion_10(const char* binary, std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "revec_acceptance";
    const fs::path out1 = base / "run1";
    const fs::path out2 = base / "run2";
    fs::remove_all(base);

    bool ok = true;
    for (const fs::path& out : {out1, out2}) {
        const std::string cmd = std::string("\"") + binary +
                                "\" render --scene builtin:staircase --vp-res 512x512"
                                " --mode sm --mode rbsm_recovery --mode rbsm_filter --out \"" +
                                out.string() + "\"";
        if (std::system(cmd.c_str()) != 0) ok = false;
    }
    long mismatched_files = 0;
    for (const char* mode : {"sm.ppm", "rbsm_recovery.ppm", "rbsm_filter.ppm"}) {
        const std::string a = read_file(out1 / mode);
        const std::string b = read_file(out2 / mode);
        if (a.empty() || a != b) ++mismatched_files;
    }
    fs::remove_all(base);
    detail = "mismatched files " + std::to_string(mismatched_files);
    return ok && mismatched_files == 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-revec-binary>\n");
        return 2;
    }

    {
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = criterion_1();
        report(1, "visibility branch tables", ok && elapsed_s(t0) < 1.0);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = criterion_2();
        report(2, "exhaustive input enumeration", ok && elapsed_s(t0) < 5.0);
    }
    {
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = criterion_3(detail);
        report(3, "staircase boundary straightness", ok && elapsed_s(t0) < 30.0, detail);
    }
    {
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = criterion_4(detail);
        report(4, "shadow conservation", ok && elapsed_s(t0) < 10.0, detail);
    }
    {
        std::string detail;
        report(5, "filtering continuity and symmetry", criterion_5(detail), detail);
    }
    {
        std::string detail;
        report(6, "mirror symmetry", criterion_6(detail), detail);
    }
    {
        std::string detail;
        report(7, "maxdist stability", criterion_7(detail), detail);
    }
    {
        std::string detail;
        report(8, "resolution trend", criterion_8(detail), detail);
    }
    {
        std::string detail;
        report(9, "performance ordering", criterion_9(detail), detail);
    }
    {
        std::string detail;
        report(10, "golden determinism", criterion_10(argv[1], detail), detail);
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
