#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cutsim/episode.hpp"
#include "cutsim/errors.hpp"
#include "cutsim/experiments.hpp"
#include "cutsim/instructions.hpp"
#include "cutsim/textio.hpp"

namespace fs = std::filesystem;
using namespace cutsim;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string templates_path;
    std::string out_dir = "out";
    uint64_t seed = 1;
    bool seed_set = false;
    bool deterministic = true;
    double fmax = 100.0;
};

EpisodeSetup load_setup(const GlobalOpts& g) {
    EpisodeSetup setup;
    if (!g.templates_path.empty()) {
        load_instruction_templates(g.templates_path);
    }
    if (!g.config_path.empty()) {
        setup = setup_from_key_values(read_key_values(g.config_path));
    }
    if (g.seed_set) {
        setup.sim.seed = g.seed;
        setup.scene.seed = g.seed;
    }
    setup.sim.reduction =
        g.deterministic ? ReductionMode::Deterministic : ReductionMode::Fast;
    return setup;
}

int cmd_simulate(const GlobalOpts& g) {
    EpisodeSetup setup = load_setup(g);
    if (setup.instruction.empty()) {
        CutSpec spec;
        spec.object = setup.task.object_kind;
        spec.style = setup.task.style;
        spec.state = setup.task.state;
        Rng rng(setup.scene.seed ^ 0x1a46ULL);
        setup.instruction = generate_instruction(resolve_defaults(spec), rng);
    }
    const EpisodeRecord rec = run_episode(setup);
    write_episode(rec, g.out_dir);
    std::printf("episode: %s  segments=%d  peak_force=%s N  verdict=%s\n",
                rec.diverged ? "DIVERGED" : "ok", rec.final_segment_count,
                format_double(rec.peak_force).c_str(),
                rec.verdict.success ? "success" : "failure");
    if (rec.diverged) {
        std::fprintf(stderr, "failure: %s\n", rec.failure.c_str());
        return 1;
    }
    return 0;
}

int cmd_sweep(const GlobalOpts& g, double e_min, double e_max, int steps) {
    EpisodeSetup setup = load_setup(g);
    std::vector<double> Es;
    for (int i = 0; i < steps; ++i) {
        Es.push_back(e_min + (steps > 1 ? (e_max - e_min) * i / (steps - 1) : 0.0));
    }
    const auto rows = sweep_youngs(Es, setup);
    fs::create_directories(g.out_dir);
    write_sweep_csv(rows, fs::path(g.out_dir) / "sweep_youngs.csv");
    std::printf("%-12s %-12s %-12s %-6s %-6s\n", "E", "F_peak", "v_post", "t_pk", "t_vmin");
    for (const auto& r : rows) {
        std::printf("%-12s %-12s %-12s %-6d %-6d%s\n", format_double(r.E).c_str(),
                    format_double(r.F_peak).c_str(), format_double(r.v_post).c_str(),
                    r.t_peak_index, r.t_vmin_index, r.diverged ? "  [diverged]" : "");
    }
    return 0;
}

int cmd_ablation(const GlobalOpts& g) {
    EpisodeSetup setup = load_setup(g);
    const std::vector<double> sample_v = {0.3, 0.6, 0.9, 1.2, 1.6, 2.0, 2.5, 3.0};
    const std::vector<double> aggressive = {2.5, 3.0};
    const AblationResult r = safety_ablation(setup, g.fmax, sample_v, aggressive);
    fs::create_directories(g.out_dir);
    write_ablation_csv(r, fs::path(g.out_dir) / "safety_ablation.csv");
    write_model_csv(r.model, fs::path(g.out_dir) / "force_model.csv");
    std::printf("safety off: avg max speed %s m/s, peak force %s N\n",
                format_double(r.off_avg_max_speed).c_str(),
                format_double(r.off_peak_force).c_str());
    std::printf("safety on : avg max speed %s m/s, peak force %s N (v_safe %s m/s)\n",
                format_double(r.on_avg_max_speed).c_str(),
                format_double(r.on_peak_force).c_str(), format_double(r.v_safe).c_str());
    return r.on_peak_force <= g.fmax ? 0 : 1;
}

int cmd_fit_safety(const GlobalOpts& g) {
    EpisodeSetup setup = load_setup(g);
    const std::vector<double> sample_v = {0.3, 0.6, 0.9, 1.2, 1.6, 2.0, 2.5, 3.0};
    Material mat = setup.materials[setup.scene.material];
    Material stiffer = mat, softer = mat;
    stiffer.E *= 1.5;
    stiffer.sigma_y *= 1.2;
    softer.E *= 0.75;
    softer.sigma_y *= 1.6;
    const auto samples = collect_samples(sample_v, {mat, stiffer, softer}, setup);
    const ForceModel model = fit_model(samples);
    fs::create_directories(g.out_dir);
    write_samples_csv(samples, fs::path(g.out_dir) / "safety_samples.csv");
    write_model_csv(model, fs::path(g.out_dir) / "force_model.csv");
    const double v_safe =
        safe_velocity(model, mat.E, mat.sigma_y, g.fmax, 0.05, 3.0);
    std::printf("fit over %d samples, residual_max %s N; v_safe(F_max=%s) = %s m/s\n",
                model.sample_count, format_double(model.residual_max).c_str(),
                format_double(g.fmax).c_str(), format_double(v_safe).c_str());
    return 0;
}

int cmd_gen_dataset(const GlobalOpts& g, int count, const std::string& styles_arg,
                    const std::string& states_arg) {
    EpisodeSetup setup = load_setup(g);

    std::vector<CutStyle> styles;
    {
        std::stringstream ss(styles_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (auto s = style_from_string(tok)) styles.push_back(*s);
        }
    }
    std::vector<CutState> states;
    if (states_arg == "all") {
        for (int i = 1; i <= 9; ++i) {
            states.push_back(RatioState{i / 10.0, CutSide::Right});
        }
        states.push_back(MiddleState{});
        for (int k : {3, 4, 5}) states.push_back(SplitState{k});
    } else if (states_arg == "middle") {
        states.push_back(MiddleState{});
    } else {
        states.push_back(MiddleState{});
    }

    std::vector<CutTask> tasks;
    for (CutStyle st : styles) {
        for (const CutState& state : states) {
            CutTask t = setup.task;
            t.style = st;
            t.state = state;
            tasks.push_back(t);
        }
    }
    // Randomization ranges centered on the configured scene.
    AugmentRanges ranges;
    const Vec3 base_pos = setup.scene.object_position;
    ranges.position_min = base_pos - Vec3(0.03, 0.0, 0.03);
    ranges.position_max = base_pos + Vec3(0.03, 0.0, 0.03);
    ranges.scale_min = 0.9 * setup.scene.object_scale;
    ranges.scale_max = 1.1 * setup.scene.object_scale;
    ranges.speed_min = 0.8 * setup.task.approach_speed;
    ranges.speed_max = 1.2 * setup.task.approach_speed;
    ranges.height_min = 0.015;
    ranges.height_max = 0.03;
    const auto manifest = gen_dataset(tasks, count, g.out_dir, setup, ranges);
    int ok = 0;
    for (const auto& e : manifest) ok += e.success ? 1 : 0;
    std::printf("dataset: %zu episodes (%d successes) -> %s/manifest.csv\n", manifest.size(),
                ok, g.out_dir.c_str());
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& record_dir) {
    const CsvTable force = read_csv(fs::path(record_dir) / "force.csv");
    const CsvTable board = read_csv(fs::path(record_dir) / "board_force.csv");
    const KeyValueMap meta = read_key_values(fs::path(record_dir) / "meta.cfg");
    const double dt_acc = std::strtod(meta.at("sim.dt_acc").c_str(), nullptr);

    // Momentum-change audit: sum of window impulses vs sum of F_avg * dt_acc.
    Vec3 imp = Vec3::Zero(), favg = Vec3::Zero();
    double peak = 0.0;
    const auto accumulate = [&](const CsvTable& t) {
        for (const auto& row : t.rows) {
            const Vec3 F(std::strtod(row[1].c_str(), nullptr),
                         std::strtod(row[2].c_str(), nullptr),
                         std::strtod(row[3].c_str(), nullptr));
            const Vec3 J(std::strtod(row[5].c_str(), nullptr),
                         std::strtod(row[6].c_str(), nullptr),
                         std::strtod(row[7].c_str(), nullptr));
            imp += J;
            favg += F * dt_acc;
            peak = std::max(peak, std::strtod(row[4].c_str(), nullptr));
        }
    };
    accumulate(force);
    accumulate(board);
    const double audit = (imp - favg).cwiseAbs().maxCoeff();
    std::printf("audit |sum m dv - sum F_avg dt_acc| = %s (exact-zero required)\n",
                format_double(audit).c_str());
    std::printf("peak |F_avg| = %s N over %zu windows\n", format_double(peak).c_str(),
                force.rows.size() + board.rows.size());
    const CsvTable verdict = read_csv(fs::path(record_dir) / "verdict.csv");
    if (!verdict.rows.empty()) {
        std::printf("verdict: %s (%s)\n", verdict.rows[0][0].c_str(),
                    verdict.rows[0][1].c_str());
    }
    return audit == 0.0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MLS-MPM knife-cutting simulation and data-generation harness"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    app.add_option("--templates", g.templates_path,
                   "instruction template file (see `templates` to export)")
        ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", g.seed, "episode seed");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_flag("--deterministic,!--fast", g.deterministic,
                 "deterministic reductions (default) vs atomic fast mode");
    app.add_option("--fmax", g.fmax, "force limit for the safety module (N)");

    auto* sim = app.add_subcommand("simulate", "run one cutting episode");
    sim->fallthrough();
    auto* sweep = app.add_subcommand("sweep-youngs", "stiffness sweep experiment");
    sweep->fallthrough();
    double e_min = 0.1e6, e_max = 0.9e6;
    int sweep_steps = 9;
    sweep->add_option("--e-min", e_min, "lowest Young's modulus (Pa)");
    sweep->add_option("--e-max", e_max, "highest Young's modulus (Pa)");
    sweep->add_option("--steps", sweep_steps, "number of sweep points");
    auto* ablation = app.add_subcommand("safety-ablation", "limiter off/on comparison");
    ablation->fallthrough();
    auto* fit = app.add_subcommand("fit-safety", "collect samples and fit the force model");
    fit->fallthrough();
    auto* gen = app.add_subcommand("gen-dataset", "generate augmented episodes");
    gen->fallthrough();
    int count = 5;
    std::string styles = "normal";
    std::string states = "middle";
    gen->add_option("--count", count, "episodes per task");
    gen->add_option("--styles", styles, "comma list: normal,bias,guillotine,saw");
    gen->add_option("--states", states, "middle | all");
    auto* eval = app.add_subcommand("eval", "audit a recorded episode directory");
    eval->fallthrough();
    std::string record_dir;
    eval->add_option("--record", record_dir, "episode directory")->required();
    auto* templates = app.add_subcommand("templates", "export the built-in template file");
    templates->fallthrough();
    std::string templates_out = "templates.tpl";
    templates->add_option("--file", templates_out, "output path");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        if (sim->parsed()) return cmd_simulate(g);
        if (sweep->parsed()) return cmd_sweep(g, e_min, e_max, sweep_steps);
        if (ablation->parsed()) return cmd_ablation(g);
        if (fit->parsed()) return cmd_fit_safety(g);
        if (gen->parsed()) return cmd_gen_dataset(g, count, styles, states);
        if (eval->parsed()) return cmd_eval(g, record_dir);
        if (templates->parsed()) {
            write_file(templates_out, default_template_text());
            std::printf("wrote %s\n", templates_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
