// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run, replay, eval and serve-mock.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stagewise/eval.hpp"
#include "stagewise/http_ports.hpp"
#include "stagewise/manifest.hpp"
#include "stagewise/pipeline.hpp"
#include "stagewise/replay.hpp"
#include "stagewise/text.hpp"

using namespace stagewise;

namespace {

constexpr int kExitFailedRun = 2;
constexpr int kExitMismatch = 3;

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::io, "cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// CLI11 reads config files at the top level only; flat keys are the run
// subcommand's options.
class RunConfigFile : public CLI::ConfigTOML {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigTOML::from_config(input);
        for (auto& item : items)
            if (item.parents.empty())
                item.parents = {"run"};
        return items;
    }
};

std::string box_text(const BBox& b) {
    std::ostringstream s;
    s << '(' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << ')';
    return s.str();
}

struct RunArgs {
    RunConfig config;
    std::string blocks = "near-middle";
    std::vector<double> ratios = default_overlap_ratios;
    int max_retries = 2;
};

void add_run(CLI::App& app, RunArgs& a) {
    auto& c = a.config;
    app.add_option("--prompt", c.prompt, "Text prompt")->required();
    app.add_option("--seed", c.seed, "Run seed");
    app.add_option("--steps", c.guidance.steps, "Denoising steps T");
    app.add_option("--guide-until", c.guidance.guide_until, "Guidance runs while t > this");
    app.add_option("--combine-until", c.guidance.combine_until, "Latent combination runs while t > this");
    app.add_option("--lr", c.guidance.eta, "Guidance step size");
    app.add_option("--guidance-iters", c.guidance.guidance_iters, "Gradient steps per guided timestep");
    app.add_option("--threshold-quantile", c.guidance.threshold_quantile, "Precise-mask attention quantile");
    app.add_option("--blocks", a.blocks, "Attention blocks used by the energy")
        ->check(CLI::IsMember({"near-input", "near-middle", "near-output"}));
    app.add_option("--overlap-ratios", a.ratios, "Overlap candidate ratios")->delimiter(',');
    app.add_option("--max-retries", a.max_retries, "Feedback retries per stage");
    app.add_option("--planner-retries", c.planner_retries, "Re-queries per planner question");
    app.add_option("--backend", c.ports.backend, "toy | toy:<k=v,...> | http://...");
    app.add_option("--planner", c.ports.planner, "mock:<fixture> | http://...")->required();
    app.add_option("--checker", c.ports.checker, "always-yes | mock:<fixture> | http://...");
    app.add_option("--scorer", c.ports.scorer, "constant | mock:<fixture> | http://...");
    app.add_option("--out", c.out_dir, "Output directory")->required();
    app.add_flag("--save-intermediates", c.save_intermediates, "Write per-stage latent trajectories");
}

int do_run(RunArgs& a) {
    RunConfig& c = a.config;
    c.guidance.blocks = *block_group_from_string(a.blocks);
    c.overlap_ratios = a.ratios;
    c.retry.max_retries = a.max_retries;
    // Beyond the built-in schedule, further retries reuse its last entry.
    while (c.retry.schedule.size() < static_cast<size_t>(std::max(0, a.max_retries)))
        c.retry.schedule.push_back(c.retry.schedule.back());
    c.retry.schedule.resize(static_cast<size_t>(std::max(0, a.max_retries)));
    c.ports.load_fixtures();

    PortSet ports = make_ports(c.ports);
    const RunResult result = run_pipeline(c, ports);
    const auto& m = result.manifest;
    for (const auto& s : m.stages) {
        std::cout << "stage " << s.n << ": " << s.subprompt.text << "  " << to_string(s.position) << " x" << s.count
                  << "  rough " << box_text(s.rough_mask) << "  precise " << box_text(s.precise_mask) << "  attempts "
                  << s.attempts.size() << (s.passed ? "" : "  [check failed]")
                  << '\n';
    }
    std::cout << "manifest: " << (c.out_dir / "manifest.json").string() << '\n';
    if (m.status != "ok") {
        std::cerr << "run failed: " << m.error << '\n';
        return kExitFailedRun;
    }
    return 0;
}

int do_replay(const std::string& manifest) {
    const ReplayReport report = replay_check(manifest);
    std::cout << report.describe() << '\n';
    return report.identical ? 0 : kExitMismatch;
}

struct EvalArgs {
    std::filesystem::path images;
    std::filesystem::path prompts;
    std::string judge = "always-yes";
    std::filesystem::path report;
};

int do_eval(const EvalArgs& a) {
    const auto entries = parse_prompt_list(read_text(a.prompts));
    std::vector<Image> images;
    std::vector<Questionnaire> questionnaires;
    for (const auto& e : entries) {
        images.push_back(read_ppm(a.images / e.image));
        ObjectPlan plan{e.prompt, e.objects.empty() ? split_objects(e.prompt) : e.objects};
        questionnaires.push_back(build_questionnaire(e.prompt, plan));
    }
    auto judge = make_vlm(a.judge);
    const EvalResult result = evaluate(images, questionnaires, *judge);
    const std::string table = format_report(result.scores, a.prompts.stem().string());

    std::ofstream out(a.report, std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot write " + a.report.string());
    out << table;
    auto sidecar = a.report;
    sidecar += ".json";
    std::ofstream js(sidecar, std::ios::trunc);
    nlohmann::json doc = to_json(result);
    auto items = nlohmann::json::array();
    for (size_t i = 0; i < entries.size(); ++i)
        items.push_back({{"image", entries[i].image}, {"prompt", entries[i].prompt}});
    doc["items"] = items;
    js << doc.dump(2) << '\n';
    std::cout << table;
    return 0;
}

PortServer* g_server = nullptr;

void on_signal(int) {
    if (g_server)
        g_server->stop();
}

struct ServeArgs {
    PortSpecs specs;
    std::string host = "127.0.0.1";
    int port = 0;
};

int do_serve(ServeArgs& a) {
    a.specs.load_fixtures();
    if (a.specs.planner.empty())
        a.specs.planner = "mock:/dev/null";
    PortSet ports = make_ports(a.specs);
    PortServer server({ports.planner.get(), ports.checker.get(), ports.scorer.get(), ports.denoiser.get()});
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int bound = server.start(a.host, a.port);
    std::cout << "listening on http://" << a.host << ':' << bound << std::endl;
    server.wait();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Progressive multi-object image generation with planner, guidance and feedback ports"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Generate an image stage by stage");
    add_run(*run, run_args);
    app.set_config("--config", "", "Flat key = value file mirroring the run flags; flags win");
    app.config_formatter(std::make_shared<RunConfigFile>());
    run->fallthrough();

    std::string manifest;
    auto* rep = app.add_subcommand("replay", "Re-execute a mock run and verify it bit for bit");
    rep->add_option("--manifest", manifest, "manifest.json of the run")->required()->check(CLI::ExistingFile);

    EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "Questionnaire evaluation of generated images");
    ev->add_option("--images", eval_args.images, "Directory holding the images")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--prompts", eval_args.prompts, "image<TAB>prompt[<TAB>obj1|obj2] lines")
        ->required()
        ->check(CLI::ExistingFile);
    ev->add_option("--judge", eval_args.judge, "always-yes | mock:<fixture> | http://...");
    ev->add_option("--report", eval_args.report, "Report path; raw answers go to <report>.json")->required();

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve-mock", "Serve mock ports over the HTTP port protocol");
    serve->add_option("--host", serve_args.host);
    serve->add_option("--port", serve_args.port, "0 picks a free port");
    serve->add_option("--backend", serve_args.specs.backend);
    serve->add_option("--planner", serve_args.specs.planner);
    serve->add_option("--checker", serve_args.specs.checker);
    serve->add_option("--scorer", serve_args.specs.scorer);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return do_run(run_args);
        if (*rep)
            return do_replay(manifest);
        if (*ev)
            return do_eval(eval_args);
        if (*serve)
            return do_serve(serve_args);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
