#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "balltrack/color_lut.hpp"
#include "balltrack/image.hpp"
#include "balltrack/synth.hpp"
#include "support/fixtures.hpp"

using namespace balltrack;
using namespace testsupport;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunResult run_cli(const TempDir& dir, const std::string& args) {
    const auto out_path = dir.path() / "stdout.txt";
    const auto err_path = dir.path() / "stderr.txt";
    const std::string command = std::string(BALLTRACK_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

void write_camera_config(const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "fx = 500\nfy = 500\ncx = 320\ncy = 240\nk1 = 0\nk2 = 0\n"
        << "width = 640\nheight = 480\nball_radius_m = 0.035\n";
}

// A moving red ball, optionally fully hidden during [hide_from, hide_to).
void write_sequence(const std::filesystem::path& dir, int frames, int hide_from = -1,
                    int hide_to = -1) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < frames; ++i) {
        SceneSpec spec = one_disk_scene(120.0 + 12.0 * i, 240.0, 40.0);
        if (i >= hide_from && i < hide_to) {
            spec.objects.push_back(
                RectSpec{0.0, 0.0, static_cast<double>(spec.width),
                         static_cast<double>(spec.height), kGray});
        }
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.ppm", i);
        save_ppm(render(spec).image, dir / name);
    }
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

// Timing columns change run to run; strip the last five fields.
std::string mask_timings(const std::string& csv) {
    std::string masked;
    for (const std::string& line : csv_lines(csv)) {
        int commas = 0;
        std::size_t cut = line.size();
        for (std::size_t i = line.size(); i-- > 0;) {
            if (line[i] == ',') {
                ++commas;
                if (commas == 5) {
                    cut = i;
                    break;
                }
            }
        }
        masked += line.substr(0, cut) + "\n";
    }
    return masked;
}

}  // namespace

TEST_CASE("cli: calibrate learns one class from a red disk") {
    TempDir dir("cli_calibrate");
    const auto image_path = dir.path() / "train.ppm";
    save_ppm(render(one_disk_scene(160.0, 120.0, 40.0, 320, 240)).image, image_path);
    const auto lut_path = dir.path() / "colors.clut";

    const RunResult result = run_cli(
        dir, "--seed 5 calibrate --image " + image_path.string() + " --out " + lut_path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("fit") != std::string::npos);

    const ColorLut lut = load_lut(lut_path);
    CHECK(lut.classes() == 1);
    CHECK(lut.lookup(kRed.r, kRed.g, kRed.b) == 1);
}

TEST_CASE("cli: calibrate fails on a blank image") {
    TempDir dir("cli_blank");
    const auto image_path = dir.path() / "blank.ppm";
    save_ppm(RgbImage(160, 120, kGray), image_path);
    const RunResult result =
        run_cli(dir, "--seed 5 calibrate --image " + image_path.string() + " --out " +
                         (dir.path() / "x.clut").string());
    CHECK(result.exit_code != 0);
    CHECK(!result.err.empty());
}

TEST_CASE("cli: a missing input is reported with its path") {
    TempDir dir("cli_missing");
    const std::string missing = (dir.path() / "nope.ppm").string();
    const RunResult result =
        run_cli(dir, "--seed 5 calibrate --image " + missing + " --out " +
                         (dir.path() / "x.clut").string());
    CHECK(result.exit_code != 0);
    CHECK(result.err.find("nope.ppm") != std::string::npos);
}

TEST_CASE("cli: synth renders deterministically and writes ground truth") {
    TempDir dir("cli_synth");
    const auto scene_path = dir.path() / "scene.json";
    {
        std::ofstream out(scene_path);
        out << scene_to_json(one_disk_scene(320.0, 240.0, 40.0));
    }
    const auto frame_a = dir.path() / "a.ppm";
    const auto frame_b = dir.path() / "b.ppm";
    const auto truth_path = dir.path() / "truth.json";
    CHECK(run_cli(dir, "synth --scene " + scene_path.string() + " --out " + frame_a.string() +
                           " --truth " + truth_path.string())
              .exit_code == 0);
    CHECK(run_cli(dir, "synth --scene " + scene_path.string() + " --out " + frame_b.string())
              .exit_code == 0);
    CHECK(slurp(frame_a) == slurp(frame_b));
    CHECK(slurp(truth_path).find("\"r\"") != std::string::npos);
    CHECK(load_ppm(frame_a).width() == 640);
}

TEST_CASE("cli: detect reports one ball on a clean frame") {
    TempDir dir("cli_detect");
    const auto image_path = dir.path() / "frame.ppm";
    save_ppm(render(one_disk_scene(300.0, 220.0, 40.0)).image, image_path);
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);

    const RunResult result =
        run_cli(dir, "--seed 5 detect --image " + image_path.string() + " --lut " +
                         lut_path.string() + " --camera " + camera_path.string() + " --overlay " +
                         (dir.path() / "overlay.ppm").string());
    CHECK(result.exit_code == 0);
    const auto lines = csv_lines(result.out);
    REQUIRE(lines.size() == 2);  // header + one detection
    CHECK(lines[0] == "cx,cy,cr,qc,x_m,y_m,z_m");
    CHECK(std::abs(std::stod(lines[1]) - 300.0) < 1.0);
    CHECK(std::filesystem::exists(dir.path() / "overlay.ppm"));
}

TEST_CASE("cli: track follows a moving ball across a sequence") {
    TempDir dir("cli_track");
    const auto frames = dir.path() / "frames";
    write_sequence(frames, 30);
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);
    const auto report_path = dir.path() / "report.csv";

    const RunResult result =
        run_cli(dir, "--seed 9 track --frames " + frames.string() + " --lut " +
                         lut_path.string() + " --camera " + camera_path.string() + " --out " +
                         report_path.string());
    REQUIRE(result.exit_code == 0);
    const auto lines = csv_lines(slurp(report_path));
    REQUIRE(lines.size() == 31);  // header + 30 records
    int tracking = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        tracking += lines[i].find("TRACKING") != std::string::npos ? 1 : 0;
    }
    CHECK(tracking >= 28);
}

TEST_CASE("cli: a full occlusion gap coasts and then re-locks") {
    TempDir dir("cli_coast");
    const auto frames = dir.path() / "frames";
    write_sequence(frames, 16, 6, 9);
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);
    const auto report_path = dir.path() / "report.csv";

    const RunResult result =
        run_cli(dir, "--seed 9 track --frames " + frames.string() + " --lut " +
                         lut_path.string() + " --camera " + camera_path.string() + " --out " +
                         report_path.string());
    REQUIRE(result.exit_code == 0);
    const auto lines = csv_lines(slurp(report_path));
    REQUIRE(lines.size() == 17);
    for (int frame : {7, 8, 9}) {
        CHECK(lines[static_cast<std::size_t>(frame)].find("COASTING") != std::string::npos);
    }
    CHECK(lines[6].find("TRACKING") != std::string::npos);
    CHECK(lines[12].find("TRACKING") != std::string::npos);
    CHECK(lines[16].find("TRACKING") != std::string::npos);
}

TEST_CASE("cli: an empty frame directory produces a header-only report") {
    TempDir dir("cli_empty");
    const auto frames = dir.path() / "frames";
    std::filesystem::create_directories(frames);
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);
    const auto report_path = dir.path() / "report.csv";

    const RunResult result =
        run_cli(dir, "--seed 9 track --frames " + frames.string() + " --lut " +
                         lut_path.string() + " --camera " + camera_path.string() + " --out " +
                         report_path.string());
    CHECK(result.exit_code == 0);
    const auto lines = csv_lines(slurp(report_path));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].find("frame,cx,cy,cr,qc") == 0);
}

TEST_CASE("cli: an unreadable frame becomes an ERROR record and the run continues") {
    TempDir dir("cli_error");
    const auto frames = dir.path() / "frames";
    write_sequence(frames, 3);
    {
        std::ofstream bad(frames / "frame_0001.ppm", std::ios::binary | std::ios::trunc);
        bad << "P6\n9 9\n255\n";  // truncated payload
    }
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);
    const auto report_path = dir.path() / "report.csv";

    const RunResult result =
        run_cli(dir, "--seed 9 track --frames " + frames.string() + " --lut " +
                         lut_path.string() + " --camera " + camera_path.string() + " --out " +
                         report_path.string());
    CHECK(result.exit_code == 0);
    const auto lines = csv_lines(slurp(report_path));
    REQUIRE(lines.size() == 4);
    CHECK(lines[2].find("ERROR") != std::string::npos);
    CHECK(lines[3].find("frame_0002") == 0);
}

TEST_CASE("cli: track reports are byte-identical apart from timings") {
    TempDir dir("cli_determinism");
    const auto frames = dir.path() / "frames";
    write_sequence(frames, 10);
    const auto camera_path = dir.path() / "camera.cfg";
    write_camera_config(camera_path);
    const auto lut_path = dir.path() / "colors.clut";
    save_lut(red_lut(), lut_path);

    const auto report_a = dir.path() / "a.csv";
    const auto report_b = dir.path() / "b.csv";
    const std::string base = "--seed 7 track --frames " + frames.string() + " --lut " +
                             lut_path.string() + " --camera " + camera_path.string() + " --out ";
    REQUIRE(run_cli(dir, base + report_a.string()).exit_code == 0);
    REQUIRE(run_cli(dir, base + report_b.string()).exit_code == 0);
    CHECK(mask_timings(slurp(report_a)) == mask_timings(slurp(report_b)));
}

TEST_CASE("cli: bench prints every pipeline stage") {
    TempDir dir("cli_bench");
    const RunResult result = run_cli(dir, "--seed 3 bench --reps 5");
    CHECK(result.exit_code == 0);
    for (const char* stage : {"classify", "components", "vote", "refine", "total"}) {
        CHECK(result.out.find(stage) != std::string::npos);
    }
    CHECK(result.out.find("median") != std::string::npos);
    CHECK(result.out.find("p95") != std::string::npos);
}

TEST_CASE("cli: bench with a single repetition still reports") {
    TempDir dir("cli_bench1");
    const RunResult result = run_cli(dir, "--seed 3 bench --reps 1");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("total") != std::string::npos);
}

TEST_CASE("cli: synth renders a moving sequence with per-frame truth") {
    TempDir dir("cli_synth_seq");
    const auto scene_path = dir.path() / "scene.json";
    {
        std::ofstream out(scene_path);
        out << scene_to_json(one_disk_scene(100.0, 240.0, 40.0));
    }
    const auto frames = dir.path() / "frames";
    const auto truth_path = dir.path() / "truth.json";
    const RunResult result =
        run_cli(dir, "synth --scene " + scene_path.string() + " --out " + frames.string() +
                         " --frames 5 --velocity 10 0 --truth " + truth_path.string());
    CHECK(result.exit_code == 0);
    for (int i = 0; i < 5; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.ppm", i);
        CHECK(std::filesystem::exists(frames / name));
    }
    // Last frame: the ball moved 4 * 10 px to the right.
    const RgbImage last = load_ppm(frames / "frame_0004.ppm");
    CHECK(last.at(140, 240) == kRed);
    CHECK(last.at(80, 240) == kGray);
    CHECK(slurp(truth_path).find("140") != std::string::npos);
}

TEST_CASE("cli: a seed from the parameter file satisfies strict mode") {
    TempDir dir("cli_config_seed");
    const auto image_path = dir.path() / "train.ppm";
    save_ppm(render(one_disk_scene(80.0, 60.0, 25.0, 160, 120)).image, image_path);
    const auto params_path = dir.path() / "params.cfg";
    {
        std::ofstream out(params_path);
        out << "seed = 11\n";
    }
    const RunResult result =
        run_cli(dir, "--strict calibrate --image " + image_path.string() + " --params " +
                         params_path.string() + " --out " + (dir.path() / "x.clut").string());
    CHECK(result.exit_code == 0);
}

TEST_CASE("cli: strict mode demands an explicit seed") {
    TempDir dir("cli_strict");
    const auto image_path = dir.path() / "train.ppm";
    save_ppm(render(one_disk_scene(80.0, 60.0, 25.0, 160, 120)).image, image_path);
    const RunResult result =
        run_cli(dir, "--strict calibrate --image " + image_path.string() + " --out " +
                         (dir.path() / "x.clut").string());
    CHECK(result.exit_code != 0);
    CHECK(result.err.find("seed") != std::string::npos);

    const RunResult seeded =
        run_cli(dir, "--strict --seed 4 calibrate --image " + image_path.string() + " --out " +
                         (dir.path() / "x.clut").string());
    CHECK(seeded.exit_code == 0);
}
