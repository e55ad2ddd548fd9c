/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: tools/flt.cpp
 *
 * Copyright 2026 The flt authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "flt/flt.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace flt;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_numerical = 2;
constexpr int exit_partial = 3;

/// Fit settings given on the command line; unset ones keep the config file or default values.
struct FitOverrides
{
    std::optional<double> lambda_shape;
    std::optional<double> lambda_expr;
    std::optional<int> max_iterations;
    std::optional<std::string> contour_mode;

    void add_to(CLI::App& app)
    {
        app.add_option("--lambda-shape", lambda_shape, "Shape regularisation weight");
        app.add_option("--lambda-expr", lambda_expr, "Expression regularisation weight");
        app.add_option("--iterations", max_iterations, "Maximum number of fitting iterations");
        app.add_option("--contour", contour_mode, "Jaw correspondence: static or dynamic")
            ->check(CLI::IsMember({"static", "dynamic"}));
    }

    fitting::FitConfig apply(fitting::FitConfig config) const
    {
        if (lambda_shape)
        {
            config.lambda_shape = *lambda_shape;
        }
        if (lambda_expr)
        {
            config.lambda_expr = *lambda_expr;
        }
        if (max_iterations)
        {
            config.max_iterations = *max_iterations;
        }
        if (contour_mode)
        {
            config.contour_mode = fitting::contour_mode_from_string(*contour_mode);
        }
        fitting::validate(config);
        return config;
    }
};

/// A fit config file is either a bare FitConfig object or a job file with a "fit_config" member.
fitting::FitConfig read_fit_config(const fs::path& path)
{
    const auto j = io::read_json_file(path);
    if (j.is_object() && j.contains("fit_config"))
    {
        return fitting::fit_config_from_json(j.at("fit_config"));
    }
    return fitting::fit_config_from_json(j);
}

int run_fit(const fs::path& model_dir, const fs::path& landmarks_path, const std::optional<fs::path>& config_path,
            const FitOverrides& overrides, const fs::path& output)
{
    const auto model = model::load_model(model_dir);
    const auto landmarks = read_landmarks(landmarks_path);
    const auto config = overrides.apply(config_path ? read_fit_config(*config_path) : fitting::FitConfig{});
    const auto result = fitting::fit(model, landmarks, config);
    fitting::write_fit(output, result);
    std::cout << "residual " << result.residual_rmse << " px (" << result.residual_rel << " of interocular), "
              << result.iterations_run << " iterations\n";
    return exit_ok;
}

struct TransformArgs
{
    std::optional<fs::path> model_dir;
    std::optional<fs::path> reference;
    std::optional<fs::path> driving;
    std::optional<fs::path> config;
    std::optional<double> smooth;
    bool render = false;
    std::optional<std::string> size;
    std::optional<fs::path> texture;
    std::optional<unsigned> threads;
    bool no_occlusion = false;
    std::optional<fs::path> output;
    FitOverrides fit;
};

int run_transform(const TransformArgs& args)
{
    pipeline::SequenceJob job;
    if (args.config)
    {
        job = pipeline::job_from_json(io::read_json_file(*args.config), args.config->parent_path());
    }
    if (args.model_dir)
    {
        job.model_path = *args.model_dir;
    }
    if (args.reference)
    {
        job.reference = read_landmarks(*args.reference);
    }
    if (args.driving)
    {
        job.driving = read_landmark_sequence(*args.driving);
    }
    if (args.smooth)
    {
        job.smoothing_alpha = *args.smooth;
    }
    if (args.render)
    {
        job.emit_renders = true;
    }
    if (args.size)
    {
        std::tie(job.render_width, job.render_height) = pipeline::detail::parse_size(*args.size);
    }
    if (args.texture)
    {
        job.texture_path = *args.texture;
    }
    if (args.threads)
    {
        job.threads = *args.threads;
    }
    if (args.no_occlusion)
    {
        job.occlusion_check = false;
    }
    if (args.output)
    {
        job.output_dir = *args.output;
    }
    job.fit_config = args.fit.apply(job.fit_config);
    if (job.model_path.empty() || job.output_dir.empty() || job.reference.points.empty())
    {
        throw InputError("transform needs a model, a reference and an output directory (flags or --config)");
    }

    const auto model = model::load_model(job.model_path);
    const auto result = pipeline::process_sequence(model, job);
    pipeline::write_sequence_outputs(model, job, result);
    std::cout << result.frames.size() << " frames transformed, " << result.gaps.size() << " gaps\n";
    for (const auto& gap : result.gaps)
    {
        std::cerr << "frame " << gap.frame << ": " << gap.error << "\n";
    }
    return result.gaps.empty() ? exit_ok : exit_partial;
}

int run_render(const fs::path& model_dir, const fs::path& fit_path, const std::string& size,
               const std::optional<fs::path>& texture_path, const std::optional<fs::path>& ref_fit_path,
               const std::optional<fs::path>& depth_path, const fs::path& output)
{
    if (texture_path.has_value() != ref_fit_path.has_value())
    {
        throw InputError("--texture and --ref-fit must be given together");
    }
    const auto [width, height] = pipeline::detail::parse_size(size);
    const auto model = model::load_model(model_dir);
    const auto fit = fitting::read_fit(fit_path);
    std::optional<render::Texture> texture;
    if (texture_path)
    {
        texture = render::bake_reference_texture(model, fitting::read_fit(*ref_fit_path),
                                                 render::read_ppm(*texture_path));
    }
    const auto mesh = model::evaluate_mesh(model, fit.shape_coeffs, fit.expr_coeffs);
    const auto rendered = render::rasterize(mesh, fit.pose, width, height, texture ? &*texture : nullptr);
    render::write_ppm(output, rendered.color);
    if (depth_path)
    {
        render::write_depth_dump(*depth_path, rendered);
    }
    return exit_ok;
}

int run_synth_model(std::uint64_t seed, int vertices, int shape, int expr, const fs::path& output)
{
    model::save_model(model::synthesize_test_model(seed, vertices, shape, expr), output);
    return exit_ok;
}

int run_eval_shuffle(const fs::path& ids_path, std::uint64_t seed, const fs::path& output)
{
    eval::write_plan(output, eval::shuffle_pairs(eval::read_video_ids(ids_path), seed));
    return exit_ok;
}

int run_eval(const fs::path& model_dir, const fs::path& plan_path, const fs::path& corpus_dir, bool baseline,
             const std::optional<fs::path>& config_path, const FitOverrides& overrides,
             std::optional<unsigned> threads, const fs::path& output)
{
    const auto model = model::load_model(model_dir);
    const auto plan = eval::read_plan(plan_path);
    std::vector<std::string> missing;
    const auto corpus = eval::load_corpus(corpus_dir, plan.video_ids, &missing);
    for (const auto& m : missing)
    {
        std::cerr << "missing: " << m << "\n";
    }
    eval::EvalOptions options;
    options.baseline = baseline;
    options.fit_config = overrides.apply(config_path ? read_fit_config(*config_path) : fitting::FitConfig{});
    options.threads = threads.value_or(0);
    const auto report = eval::run_shuffle_eval(model, corpus, plan, options);
    eval::write_report(output, report);
    std::cout << eval::similarity_metric_name << " (" << (baseline ? "baseline" : "transformed")
              << "): video-weighted " << report.grand_average_video << ", frame-weighted "
              << report.grand_average_frame << ", " << report.pairs.size() << " pairs\n";
    for (const auto& s : report.skipped)
    {
        std::cerr << "skipped pair " << s.pair_id << " (" << s.video_id << "): " << s.reason << "\n";
    }
    return report.skipped.empty() ? exit_ok : exit_partial;
}

int run_synth_corpus(const fs::path& model_dir, const eval::CorpusOptions& options, const fs::path& output)
{
    const auto model = model::load_model(model_dir);
    eval::save_corpus(eval::synthesize_corpus(model, options), output);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Facial landmark transformation with a 3D morphable model"};
    app.require_subcommand(1);

    // fit
    fs::path fit_model, fit_landmarks, fit_output;
    std::optional<fs::path> fit_config;
    FitOverrides fit_overrides;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the model to one landmark file");
    fit_cmd->add_option("--model", fit_model, "Model directory")->required();
    fit_cmd->add_option("--landmarks", fit_landmarks, "Landmark JSON file")->required();
    fit_cmd->add_option("--config", fit_config, "Fit config JSON");
    fit_cmd->add_option("-o,--output", fit_output, "Output fit JSON")->required();
    fit_overrides.add_to(*fit_cmd);

    // transform
    TransformArgs transform_args;
    auto* transform_cmd = app.add_subcommand("transform", "Transform a driving sequence onto a reference face");
    transform_cmd->add_option("--model", transform_args.model_dir, "Model directory");
    transform_cmd->add_option("--reference", transform_args.reference, "Reference landmark file");
    transform_cmd->add_option("--driving", transform_args.driving, "Driving landmark sequence (file or directory)");
    transform_cmd->add_option("--config", transform_args.config, "Job config JSON; flags override its values");
    transform_cmd->add_option("--smooth", transform_args.smooth, "Temporal smoothing factor in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    transform_cmd->add_flag("--render", transform_args.render, "Write a PPM render per frame");
    transform_cmd->add_option("--size", transform_args.size, "Render size WIDTHxHEIGHT");
    transform_cmd->add_option("--texture", transform_args.texture, "Reference image (PPM) used as texture");
    transform_cmd->add_option("--threads", transform_args.threads, "Worker threads (0 = all cores)");
    transform_cmd->add_flag("--no-occlusion", transform_args.no_occlusion, "Skip the visibility test");
    transform_cmd->add_option("-o,--output", transform_args.output, "Output directory");
    transform_args.fit.add_to(*transform_cmd);

    // render
    fs::path render_model, render_fit, render_output;
    std::string render_size;
    std::optional<fs::path> render_texture, render_ref_fit, render_depth;
    auto* render_cmd = app.add_subcommand("render", "Render a fitted face");
    render_cmd->add_option("--model", render_model, "Model directory")->required();
    render_cmd->add_option("--fit", render_fit, "Fit JSON giving shape, expression and pose")->required();
    render_cmd->add_option("--size", render_size, "Image size WIDTHxHEIGHT")->required();
    render_cmd->add_option("--texture", render_texture, "Reference image (PPM) used as texture");
    render_cmd->add_option("--ref-fit", render_ref_fit, "Fit of the texture's reference image");
    render_cmd->add_option("--depth", render_depth, "Also write the depth buffer to this file");
    render_cmd->add_option("-o,--output", render_output, "Output PPM")->required();

    // synth-model
    std::uint64_t synth_seed = 0;
    int synth_vertices = 0, synth_shape = 0, synth_expr = 0;
    fs::path synth_output;
    auto* synth_cmd = app.add_subcommand("synth-model", "Generate a synthetic test model");
    synth_cmd->add_option("--seed", synth_seed, "Random seed")->required();
    synth_cmd->add_option("--vertices", synth_vertices, "Number of vertices (>= 68)")->required();
    synth_cmd->add_option("--shape", synth_shape, "Number of shape components")->required();
    synth_cmd->add_option("--expr", synth_expr, "Number of expression blendshapes")->required();
    synth_cmd->add_option("-o,--output", synth_output, "Output model directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Shuffle evaluation");
    eval_cmd->require_subcommand(1);

    fs::path shuffle_ids, shuffle_output;
    std::uint64_t shuffle_seed = 0;
    auto* shuffle_cmd = eval_cmd->add_subcommand("shuffle", "Create a seeded pairing plan");
    shuffle_cmd->add_option("--ids", shuffle_ids, "Video ids (JSON array or one per line)")->required();
    shuffle_cmd->add_option("--seed", shuffle_seed, "Random seed")->required();
    shuffle_cmd->add_option("-o,--output", shuffle_output, "Output plan JSON")->required();

    fs::path run_model, run_plan, run_corpus, run_output;
    bool run_baseline = false;
    std::optional<fs::path> run_config;
    std::optional<unsigned> run_threads;
    FitOverrides run_overrides;
    auto* run_cmd = eval_cmd->add_subcommand("run", "Score a plan on a corpus");
    run_cmd->add_option("--model", run_model, "Model directory")->required();
    run_cmd->add_option("--plan", run_plan, "Plan JSON")->required();
    run_cmd->add_option("--corpus", run_corpus, "Corpus directory")->required();
    run_cmd->add_flag("--baseline", run_baseline, "Score raw driving landmarks instead of transformed ones");
    run_cmd->add_option("--config", run_config, "Fit config JSON");
    run_cmd->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
    run_cmd->add_option("-o,--output", run_output, "Report directory")->required();
    run_overrides.add_to(*run_cmd);

    fs::path corpus_model, corpus_output;
    eval::CorpusOptions corpus_options;
    auto* corpus_cmd = eval_cmd->add_subcommand("synth-corpus", "Generate a synthetic evaluation corpus");
    corpus_cmd->add_option("--model", corpus_model, "Model directory")->required();
    corpus_cmd->add_option("--seed", corpus_options.seed, "Random seed");
    corpus_cmd->add_option("--videos", corpus_options.n_videos, "Number of videos");
    corpus_cmd->add_option("--frames", corpus_options.n_frames, "Frames per video");
    corpus_cmd->add_option("--noise", corpus_options.noise_px, "Landmark noise (pixels, std. dev.)");
    corpus_cmd->add_flag("--static", corpus_options.static_choreography,
                         "Only in-plane head motion and no expression change");
    corpus_cmd->add_option("-o,--output", corpus_output, "Output corpus directory")->required();

    try
    {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try
    {
        if (fit_cmd->parsed())
        {
            return run_fit(fit_model, fit_landmarks, fit_config, fit_overrides, fit_output);
        }
        if (transform_cmd->parsed())
        {
            return run_transform(transform_args);
        }
        if (render_cmd->parsed())
        {
            return run_render(render_model, render_fit, render_size, render_texture, render_ref_fit, render_depth,
                              render_output);
        }
        if (synth_cmd->parsed())
        {
            return run_synth_model(synth_seed, synth_vertices, synth_shape, synth_expr, synth_output);
        }
        if (shuffle_cmd->parsed())
        {
            return run_eval_shuffle(shuffle_ids, shuffle_seed, shuffle_output);
        }
        if (run_cmd->parsed())
        {
            return run_eval(run_model, run_plan, run_corpus, run_baseline, run_config, run_overrides, run_threads,
                            run_output);
        }
        if (corpus_cmd->parsed())
        {
            return run_synth_corpus(corpus_model, corpus_options, corpus_output);
        }
    } catch (const NumericalError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::filesystem::filesystem_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
