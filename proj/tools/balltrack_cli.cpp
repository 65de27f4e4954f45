#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "balltrack/camera.hpp"
#include "balltrack/colorcal.hpp"
#include "balltrack/config.hpp"
#include "balltrack/error.hpp"
#include "balltrack/pipeline.hpp"
#include "balltrack/report.hpp"
#include "balltrack/synth.hpp"

namespace fs = std::filesystem;
using namespace balltrack;

namespace {

constexpr RgbPixel kOverlayColor{0, 255, 0};

struct SeedOption {
    std::optional<std::uint64_t> value;

    // Precedence: --seed flag, then a `seed` key in the parameter file, then
    // the documented default of 1. Strict mode insists on one of the first two.
    std::uint64_t require(bool strict, const char* command, const Config& config) const {
        if (value) {
            return *value;
        }
        if (config.has("seed")) {
            return config.get_uint64("seed", 1);
        }
        if (strict) {
            throw CLI::ValidationError(std::string(command) +
                                       ": --seed (or a config seed) is required in --strict mode");
        }
        return 1;
    }
};

PipelineParams pipeline_params_from(const Config& config) {
    PipelineParams params;
    params.detect.vote.center_threshold =
        config.get_int("center_threshold", params.detect.vote.center_threshold);
    params.detect.vote.max_votes = config.get_int("max_votes", params.detect.vote.max_votes);
    params.detect.vote.quality_threshold =
        config.get_double("quality_threshold", params.detect.vote.quality_threshold);
    params.detect.vote.min_region_size =
        config.get_int("min_region_size", params.detect.vote.min_region_size);
    params.detect.morph_open_radius =
        config.get_int("morph_open_radius", params.detect.morph_open_radius);
    params.detect.morph_close_radius =
        config.get_int("morph_close_radius", params.detect.morph_close_radius);
    params.refine.half_width = config.get_double("annulus_half_width", params.refine.half_width);
    params.refine.top_fraction =
        config.get_double("annulus_top_fraction", params.refine.top_fraction);
    params.refine.iterations = config.get_int("refine_iterations", params.refine.iterations);
    params.track.gate_radius = config.get_double("gate_radius", params.track.gate_radius);
    params.track.coast_limit = config.get_int("coast_limit", params.track.coast_limit);
    return params;
}

CalibParams calib_params_from(const Config& config) {
    CalibParams params;
    params.spatial_bandwidth = config.get_double("spatial_bandwidth", params.spatial_bandwidth);
    params.chroma_bandwidth = config.get_double("chroma_bandwidth", params.chroma_bandwidth);
    params.min_region_size = config.get_int("calib_min_region_size", params.min_region_size);
    params.fit_ratio_threshold =
        config.get_double("fit_ratio_threshold", params.fit_ratio_threshold);
    params.closing_radius = config.get_int("closing_radius", params.closing_radius);
    params.max_classes = config.get_int("max_classes", params.max_classes);
    params.vote.center_threshold =
        config.get_int("center_threshold", params.vote.center_threshold);
    params.vote.max_votes = config.get_int("max_votes", params.vote.max_votes);
    return params;
}

Config load_optional_config(const std::string& path) {
    return path.empty() ? Config() : Config::load(path);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void annotate(RgbImage& image, const FrameResult& result,
              std::optional<std::size_t> selected) {
    for (std::size_t i = 0; i < result.detections.size(); ++i) {
        const PipelineDetection& det = result.detections[i];
        const bool is_selected = selected && *selected == i;
        const RgbPixel color = is_selected ? kOverlayColor : RgbPixel{255, 255, 0};
        draw_circle(image, det.circle, color);
        draw_cross(image, {det.circle.cx, det.circle.cy}, 3, color);
    }
}

// --- calibrate ---------------------------------------------------------------

int run_calibrate(const std::string& image_path, const std::string& params_path,
                  const std::string& out_path, const SeedOption& seed, bool strict) {
    const Config config = load_optional_config(params_path);
    CalibParams params = calib_params_from(config);
    params.seed = seed.require(strict, "calibrate", config);

    const RgbImage image = load_ppm(image_path);
    const CalibrationResult result = calibrate(image, params);
    save_lut(result.lut, out_path);

    std::printf("learned %u color class(es) -> %s\n", result.lut.classes(), out_path.c_str());
    for (std::size_t cls = 1; cls < result.class_sample_counts.size(); ++cls) {
        std::printf("class %zu: %llu chroma samples\n", cls,
                    static_cast<unsigned long long>(result.class_sample_counts[cls]));
    }
    for (const RegionFitReport& report : result.regions) {
        std::printf("region %d: %d px, fit %.3f%s", report.region_label, report.pixel_count,
                    report.fit_ratio, report.accepted ? " (ball)" : "");
        if (report.vote) {
            std::printf(", circle (%.1f, %.1f) r=%.1f Qc=%.4f", report.vote->circle.cx,
                        report.vote->circle.cy, report.vote->circle.r, report.vote->quality);
        }
        std::printf("\n");
    }
    return 0;
}

// --- detect ------------------------------------------------------------------

int run_detect(const std::string& image_path, const std::string& lut_path,
               const std::string& camera_path, const std::string& params_path,
               const std::string& out_path, const std::string& overlay_path,
               const SeedOption& seed, bool strict) {
    const Config config = load_optional_config(params_path);
    const PipelineParams params = pipeline_params_from(config);
    const FrameProcessor processor(load_lut(lut_path), load_camera_config(camera_path), params);

    RgbImage image = load_ppm(image_path);
    const FrameResult result = processor.process(image, seed.require(strict, "detect", config));

    std::string text = "cx,cy,cr,qc,x_m,y_m,z_m\n";
    for (const PipelineDetection& det : result.detections) {
        char buf[256];
        if (det.pose) {
            std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.6f,%.4f,%.4f,%.4f\n", det.circle.cx,
                          det.circle.cy, det.circle.r, det.vote.quality, det.pose->x, det.pose->y,
                          det.pose->z);
        } else {
            std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.6f,,,\n", det.circle.cx,
                          det.circle.cy, det.circle.r, det.vote.quality);
        }
        text += buf;
    }
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text(out_path, text);
    }
    if (!overlay_path.empty()) {
        annotate(image, result, result.detections.empty()
                                    ? std::nullopt
                                    : std::optional<std::size_t>(0));
        save_ppm(image, overlay_path);
    }
    return 0;
}

// --- track -------------------------------------------------------------------

int run_track(const std::string& frames_dir, const std::string& lut_path,
              const std::string& camera_path, const std::string& params_path,
              const std::string& out_path, const std::string& overlay_dir,
              const SeedOption& seed, bool strict) {
    const Config config = load_optional_config(params_path);
    const PipelineParams params = pipeline_params_from(config);
    const FrameProcessor processor(load_lut(lut_path), load_camera_config(camera_path), params);
    const std::uint64_t base_seed = seed.require(strict, "track", config);

    std::vector<fs::path> frames;
    for (const auto& entry : fs::directory_iterator(frames_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
            frames.push_back(entry.path());
        }
    }
    std::sort(frames.begin(), frames.end());  // lexicographic temporal order

    if (!overlay_dir.empty()) {
        fs::create_directories(overlay_dir);
    }

    std::string csv = csv_header() + "\n";
    TrackState state = TrackState::initial(params.track);
    for (std::size_t index = 0; index < frames.size(); ++index) {
        FrameRecord record;
        record.frame_id = frames[index].stem().string();
        RgbImage image(1, 1);
        bool readable = true;
        try {
            image = load_ppm(frames[index]);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "%s: %s\n", frames[index].string().c_str(), e.what());
            readable = false;
        }
        if (!readable) {
            record.status = "ERROR";
            csv += csv_row(record) + "\n";
            continue;
        }
        const FrameResult result =
            processor.process(image, detail::mix_seed(base_seed, index));
        const auto observations = processor.observations(result);
        const TrackUpdate update = track_update(state, observations, params.track);
        state = update.state;

        record.status = to_string(state.status);
        record.timings = result.timings;
        if (update.selected) {
            const PipelineDetection& det = result.detections[*update.selected];
            record.circle = det.circle;
            record.quality = det.vote.quality;
            record.pose = det.pose;
        }
        csv += csv_row(record) + "\n";

        if (!overlay_dir.empty()) {
            annotate(image, result, update.selected);
            save_ppm(image, fs::path(overlay_dir) / (record.frame_id + "_overlay.ppm"));
        }
    }
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text(out_path, csv);
    }
    return 0;
}

// --- synth -------------------------------------------------------------------

int run_synth(const std::string& scene_path, const std::string& out_path,
              const std::string& truth_path, int frame_count,
              const std::vector<double>& velocity, const SeedOption& seed) {
    SceneSpec spec = load_scene(scene_path);
    if (seed.value) {
        spec.seed = *seed.value;
    }
    nlohmann::json truth_json = nlohmann::json::array();

    auto record_truth = [&](const std::vector<Circle>& truth) {
        nlohmann::json frame = nlohmann::json::array();
        for (const Circle& c : truth) {
            frame.push_back({{"cx", c.cx}, {"cy", c.cy}, {"r", c.r}});
        }
        truth_json.push_back(frame);
    };

    if (frame_count <= 1) {
        const RenderResult result = render(spec);
        save_ppm(result.image, out_path);
        record_truth(result.truth);
    } else {
        fs::create_directories(out_path);
        const double vx = velocity.size() > 0 ? velocity[0] : 0.0;
        const double vy = velocity.size() > 1 ? velocity[1] : 0.0;
        SceneSpec frame_spec = spec;
        for (int i = 0; i < frame_count; ++i) {
            frame_spec.seed = spec.seed + static_cast<std::uint64_t>(i);
            const RenderResult result = render(frame_spec);
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.ppm", i);
            save_ppm(result.image, fs::path(out_path) / name);
            record_truth(result.truth);
            for (ObjectSpec& object : frame_spec.objects) {
                if (auto* disk = std::get_if<DiskSpec>(&object)) {
                    disk->center.x += vx;
                    disk->center.y += vy;
                }
            }
        }
    }
    if (!truth_path.empty()) {
        write_text(truth_path, truth_json.dump(2));
    }
    return 0;
}

// --- bench -------------------------------------------------------------------

double percentile(std::vector<std::int64_t> values, double p) {
    std::sort(values.begin(), values.end());
    const std::size_t index = static_cast<std::size_t>(
        std::min<double>(values.size() - 1.0, std::max(0.0, p * (values.size() - 1))));
    return static_cast<double>(values[index]);
}

int run_bench(const std::string& scene_path, int repetitions, const std::string& camera_path,
              const std::string& params_path, const SeedOption& seed, bool strict) {
    if (repetitions < 1) {
        throw CLI::ValidationError("bench: --reps must be at least 1");
    }
    SceneSpec spec;
    if (!scene_path.empty()) {
        spec = load_scene(scene_path);
    } else {
        spec.objects.push_back(DiskSpec{{320.0, 240.0}, 40.0, RgbPixel{200, 30, 30}, {}});
    }
    const RenderResult scene = render(spec);

    CameraConfig camera;
    if (!camera_path.empty()) {
        camera = load_camera_config(camera_path);
    } else {
        camera.intrinsics = {500.0, 500.0, spec.width / 2.0, spec.height / 2.0, 0.0, 0.0,
                             spec.width, spec.height};
        camera.ball_radius_m = 0.035;
    }

    // Bench classifies with a chroma ball around each disk color in the scene.
    std::vector<std::array<std::uint8_t, 3>> colors;
    for (const ObjectSpec& object : spec.objects) {
        if (const auto* disk = std::get_if<DiskSpec>(&object)) {
            colors.push_back({disk->color.r, disk->color.g, disk->color.b});
        }
    }
    if (colors.empty()) {
        colors.push_back({200, 30, 30});
    }
    const Config config = load_optional_config(params_path);
    const PipelineParams params = pipeline_params_from(config);
    const FrameProcessor processor(make_chroma_lut(colors), camera, params);

    const std::uint64_t base_seed = seed.require(strict, "bench", config);
    std::vector<std::int64_t> classify_us, components_us, vote_us, refine_us, total_us;
    int detected = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
        const FrameResult result = processor.process(scene.image, detail::mix_seed(base_seed, rep));
        classify_us.push_back(result.timings.classify_us);
        components_us.push_back(result.timings.components_us);
        vote_us.push_back(result.timings.vote_us);
        refine_us.push_back(result.timings.refine_us);
        total_us.push_back(result.timings.total_us);
        detected += result.detections.empty() ? 0 : 1;
    }

    std::printf("scene %dx%d, %d repetition(s), detections in %d/%d runs\n", spec.width,
                spec.height, repetitions, detected, repetitions);
    const auto report = [&](const char* stage, std::vector<std::int64_t>& values) {
        std::printf("%-14s median %8.0f us   p95 %8.0f us\n", stage, percentile(values, 0.5),
                    percentile(values, 0.95));
    };
    report("classify", classify_us);
    report("components", components_us);
    report("vote", vote_us);
    report("refine", refine_us);
    report("total", total_us);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-colored ball detection and tracking"};
    app.require_subcommand(1);

    bool strict = false;
    app.add_flag("--strict", strict, "fail when a randomized stage has no explicit --seed");

    SeedOption seed;
    app.add_option("--seed", seed.value, "seed for every randomized stage");

    std::string image_path, lut_path, camera_path, params_path, out_path, overlay_path;
    std::string frames_dir, scene_path, truth_path;
    int frame_count = 1;
    int repetitions = 100;
    std::vector<double> velocity;

    auto* cmd_calibrate = app.add_subcommand("calibrate", "learn a color LUT from a sample image");
    cmd_calibrate->add_option("--image", image_path, "training image (PPM)")->required();
    cmd_calibrate->add_option("--params", params_path, "key = value parameter file");
    cmd_calibrate->add_option("--out", out_path, "output LUT path")->required();

    auto* cmd_detect = app.add_subcommand("detect", "detect balls in one frame");
    cmd_detect->add_option("--image", image_path, "input frame (PPM)")->required();
    cmd_detect->add_option("--lut", lut_path, "color LUT")->required();
    cmd_detect->add_option("--camera", camera_path, "camera config")->required();
    cmd_detect->add_option("--params", params_path, "key = value parameter file");
    cmd_detect->add_option("--out", out_path, "detections CSV (stdout when omitted)");
    cmd_detect->add_option("--overlay", overlay_path, "annotated PPM output");

    auto* cmd_track = app.add_subcommand("track", "track a ball across a frame directory");
    cmd_track->add_option("--frames", frames_dir, "directory of numbered PPM frames")->required();
    cmd_track->add_option("--lut", lut_path, "color LUT")->required();
    cmd_track->add_option("--camera", camera_path, "camera config")->required();
    cmd_track->add_option("--params", params_path, "key = value parameter file");
    cmd_track->add_option("--out", out_path, "report CSV (stdout when omitted)");
    cmd_track->add_option("--overlay", overlay_path, "directory for annotated frames");

    auto* cmd_synth = app.add_subcommand("synth", "render a synthetic scene");
    cmd_synth->add_option("--scene", scene_path, "scene JSON")->required();
    cmd_synth->add_option("--out", out_path, "output PPM (directory with --frames > 1)")
        ->required();
    cmd_synth->add_option("--truth", truth_path, "ground-truth JSON output");
    cmd_synth->add_option("--frames", frame_count, "number of frames to render");
    cmd_synth->add_option("--velocity", velocity, "per-frame disk motion: vx vy")
        ->expected(2);

    auto* cmd_bench = app.add_subcommand("bench", "per-stage pipeline timings");
    cmd_bench->add_option("--scene", scene_path, "scene JSON (default: one-ball 640x480)");
    cmd_bench->add_option("--reps", repetitions, "repetitions");
    cmd_bench->add_option("--camera", camera_path, "camera config");
    cmd_bench->add_option("--params", params_path, "key = value parameter file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_calibrate->parsed()) {
            return run_calibrate(image_path, params_path, out_path, seed, strict);
        }
        if (cmd_detect->parsed()) {
            return run_detect(image_path, lut_path, camera_path, params_path, out_path,
                              overlay_path, seed, strict);
        }
        if (cmd_track->parsed()) {
            return run_track(frames_dir, lut_path, camera_path, params_path, out_path,
                             overlay_path, seed, strict);
        }
        if (cmd_synth->parsed()) {
            return run_synth(scene_path, out_path, truth_path, frame_count, velocity, seed);
        }
        if (cmd_bench->parsed()) {
            return run_bench(scene_path, repetitions, camera_path, params_path, seed, strict);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
