/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: tests/test_pipeline.cpp
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
#include "support.hpp"

#include "gtest/gtest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

using namespace flt;

namespace {

struct SequenceScene
{
    model::MorphableModel model = test::small_model();
    pipeline::SequenceJob job;
};

/// A reference face plus \p n driving frames whose first blendshape ramps linearly.
SequenceScene ramp_scene(int n, std::uint64_t seed = 1)
{
    SequenceScene s;
    SplitMix64 rng(seed);
    const auto ref_pose = test::face_pose(rng, s.model);
    s.job.reference = test::synthesize_landmarks(s.model, test::random_shape(rng, s.model),
                                                 Eigen::VectorXd::Zero(2), ref_pose);
    const auto drive_shape = test::random_shape(rng, s.model);
    auto pose = test::face_pose(rng, s.model);
    for (int t = 0; t < n; ++t)
    {
        const Eigen::Vector2d beta(0.1 * t, 0.2);
        pose.translation.x() += 1.0;
        s.job.driving.push_back(test::synthesize_landmarks(s.model, drive_shape, beta, pose));
    }
    s.job.fit_config = test::converged_config();
    s.job.threads = 2;
    return s;
}

} // namespace

TEST(Smoothing, ZeroAlphaIsTheIdentity)
{
    const std::vector<Eigen::VectorXd> values = {Eigen::Vector2d(1, 2), Eigen::Vector2d(-3, 0.5)};
    EXPECT_EQ(pipeline::smooth_sequence(values, 0.0), values);
    SplitMix64 rng(1);
    std::vector<camera::Pose> poses(3);
    for (auto& p : poses)
    {
        p.rotation = test::random_rotation(rng);
    }
    const auto same = pipeline::smooth_poses(poses, 0.0);
    for (std::size_t i = 0; i < poses.size(); ++i)
    {
        EXPECT_EQ(same[i].rotation, poses[i].rotation);
    }
}

TEST(Smoothing, ExponentialAverageByHand)
{
    const std::vector<Eigen::VectorXd> values = {Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0),
                                                 Eigen::VectorXd::Constant(1, 1.0)};
    const auto out = pipeline::smooth_sequence(values, 0.5);
    EXPECT_EQ(out[0](0), 0.0);
    EXPECT_EQ(out[1](0), 0.5);
    EXPECT_EQ(out[2](0), 0.75);
    EXPECT_EQ(pipeline::smooth_sequence(values, 1.0)[2](0), 0.0);
    EXPECT_THROW(pipeline::smooth_sequence(values, 1.5), ArgumentError);
    EXPECT_THROW(pipeline::smooth_sequence({Eigen::Vector2d::Zero(), Eigen::Vector3d::Zero()}, 0.5), DimensionError);
}

TEST(Smoothing, PosesStayRigidAndHandleQuaternionSigns)
{
    camera::Pose a;
    camera::Pose b;
    b.rotation = Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    b.scale = 3.0;
    b.translation = Eigen::Vector2d(4, 0);
    const auto out = pipeline::smooth_poses({a, b}, 0.5);
    EXPECT_NEAR(camera::geodesic_distance(out[1].rotation, camera::rotation_from_euler(0, 0, 0.2)), 0.0, 1e-12);
    EXPECT_EQ(out[1].scale, 2.0);
    EXPECT_EQ(out[1].translation, Eigen::Vector2d(2, 0));
    EXPECT_NEAR(out[1].rotation.determinant(), 1.0, 1e-12);

    // Half-way between +179 and -179 degrees about z is 180, not 0.
    camera::Pose c;
    camera::Pose d;
    c.rotation = Eigen::AngleAxisd(std::numbers::pi - 0.01, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    d.rotation = Eigen::AngleAxisd(-std::numbers::pi + 0.01, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const auto wrapped = pipeline::smooth_poses({c, d}, 0.5);
    EXPECT_LT(camera::geodesic_distance(wrapped[1].rotation, c.rotation), 0.011);
}

TEST(ProcessSequence, FitsTheReferenceOnce)
{
    auto s = ramp_scene(10);
    s.job.driving = std::vector<LandmarkSet>(10, s.job.reference);
    const auto result = pipeline::process_sequence(s.model, s.job);
    EXPECT_EQ(result.reference_fits, 1);
    ASSERT_EQ(result.frames.size(), 10u);
    const auto expected = transform::transform_landmarks(s.model, result.reference_fit, result.reference_fit, true);
    for (const auto& frame : result.frames)
    {
        for (std::size_t i = 0; i < num_landmarks; ++i)
        {
            EXPECT_LE((frame.points[i] - expected.points[i]).norm(), 1e-9);
        }
    }
}

TEST(ProcessSequence, RampedExpressionStaysMonotone)
{
    for (double alpha : {0.0, 0.5})
    {
        auto s = ramp_scene(8);
        s.job.smoothing_alpha = alpha;
        const auto result = pipeline::process_sequence(s.model, s.job);
        ASSERT_EQ(result.driving_fits.size(), 8u);
        for (std::size_t t = 1; t < result.driving_fits.size(); ++t)
        {
            EXPECT_GT(result.driving_fits[t].expr_coeffs(0), result.driving_fits[t - 1].expr_coeffs(0))
                << "alpha " << alpha << " frame " << t;
        }
    }
}

TEST(ProcessSequence, BadFramesBecomeGaps)
{
    auto s = ramp_scene(10);
    s.job.driving[3].points[40].y() = std::numeric_limits<double>::quiet_NaN();
    const auto result = pipeline::process_sequence(s.model, s.job);
    ASSERT_EQ(result.frames.size(), 9u);
    ASSERT_EQ(result.gaps.size(), 1u);
    EXPECT_EQ(result.gaps[0].frame, 3);
    EXPECT_FALSE(result.gaps[0].numerical);
    std::vector<int> sources;
    for (const auto& f : result.frames)
    {
        sources.push_back(f.source_frame);
    }
    EXPECT_EQ(sources, (std::vector<int>{0, 1, 2, 4, 5, 6, 7, 8, 9}));
    EXPECT_EQ(result.frames.size() + result.gaps.size(), s.job.driving.size());
}

TEST(ProcessSequence, FramesAreIndependentWithoutSmoothing)
{
    auto s = ramp_scene(6);
    const auto forward = pipeline::process_sequence(s.model, s.job);
    std::vector<std::size_t> order = {4, 1, 5, 0, 3, 2};
    auto shuffled = s.job;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        shuffled.driving[k] = s.job.driving[order[k]];
    }
    const auto permuted = pipeline::process_sequence(s.model, shuffled);
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        EXPECT_EQ(permuted.frames[k].points, forward.frames[order[k]].points);
        EXPECT_EQ(permuted.frames[k].visibility, forward.frames[order[k]].visibility);
    }
}

TEST(ProcessSequence, ThreadCountDoesNotChangeTheResult)
{
    auto s = ramp_scene(6);
    s.job.smoothing_alpha = 0.3;
    s.job.threads = 1;
    const auto serial = pipeline::process_sequence(s.model, s.job);
    s.job.threads = 4;
    const auto parallel = pipeline::process_sequence(s.model, s.job);
    for (std::size_t k = 0; k < serial.frames.size(); ++k)
    {
        EXPECT_EQ(serial.frames[k].points, parallel.frames[k].points);
    }
}

TEST(ProcessSequence, AllFramesFailingIsAnError)
{
    auto s = ramp_scene(3);
    for (auto& frame : s.job.driving)
    {
        frame.points.resize(10);
    }
    EXPECT_THROW(pipeline::process_sequence(s.model, s.job), InputError);
    s.job.driving.clear();
    EXPECT_THROW(pipeline::process_sequence(s.model, s.job), InputError);
}

TEST(ProcessSequence, WritesOutputFiles)
{
    auto s = ramp_scene(3);
    s.job.driving[1].points[0].x() = std::numeric_limits<double>::quiet_NaN();
    test::TempDir dir("sequence_out");
    s.job.output_dir = dir.path();
    s.job.emit_renders = true;
    s.job.render_width = 64;
    s.job.render_height = 48;
    const auto result = pipeline::process_sequence(s.model, s.job);
    pipeline::write_sequence_outputs(s.model, s.job, result);
    const auto lines = io::parse_json_documents(io::read_text_file(dir / "transformed.jsonl"), "transformed");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[1].at("source_frame"), 2);
    const auto gaps = io::parse_json_documents(io::read_text_file(dir / "gaps.jsonl"), "gaps");
    ASSERT_EQ(gaps.size(), 1u);
    EXPECT_EQ(gaps[0].at("frame"), 1);
    EXPECT_NO_THROW(fitting::read_fit(dir / "reference_fit.json"));
    const auto image = render::read_ppm(dir / "frame_0002.ppm");
    EXPECT_EQ(image.width, 64);
    EXPECT_EQ(image.height, 48);
    EXPECT_FALSE(std::filesystem::exists(dir / "frame_0001.ppm"));
}

TEST(JobConfig, ReadsFieldsAndResolvesPaths)
{
    test::TempDir dir("job");
    const auto s = ramp_scene(2);
    write_landmarks(dir / "ref.json", s.job.reference);
    nlohmann::json driving = nlohmann::json::array();
    for (const auto& f : s.job.driving)
    {
        driving.push_back(to_json(f));
    }
    io::write_json_file(dir / "drive.json", driving);
    const nlohmann::json j = {{"reference", "ref.json"},    {"driving", "drive.json"},
                              {"model_path", "model"},      {"smoothing_alpha", 0.25},
                              {"render_size", "320x240"},   {"fit_config", {{"lambda_expr", 0.5}}},
                              {"output_dir", "out"},        {"emit_renders", true}};
    const auto job = pipeline::job_from_json(j, dir.path());
    EXPECT_EQ(job.reference.points, s.job.reference.points);
    EXPECT_EQ(job.driving.size(), 2u);
    EXPECT_EQ(job.model_path, dir / "model");
    EXPECT_EQ(job.smoothing_alpha, 0.25);
    EXPECT_EQ(job.render_width, 320);
    EXPECT_EQ(job.render_height, 240);
    EXPECT_EQ(job.fit_config.lambda_expr, 0.5);
    EXPECT_TRUE(job.emit_renders);
    EXPECT_THROW(pipeline::job_from_json(nlohmann::json{{"render_size", "320by240"}}), ConfigurationError);
    EXPECT_THROW(pipeline::job_from_json(nlohmann::json::array()), ConfigurationError);
}

TEST(ParallelFor, VisitsEveryIndexOnce)
{
    std::vector<std::atomic<int>> hits(1000);
    pipeline::parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    EXPECT_TRUE(std::ranges::all_of(hits, [](const auto& h) { return h.load() == 1; }));
}

TEST(ParallelFor, RethrowsTheLowestFailingIndex)
{
    for (unsigned threads : {1u, 3u})
    {
        try
        {
            pipeline::parallel_for(50, threads, [](std::size_t i) {
                if (i == 17 || i == 31)
                {
                    throw std::runtime_error("task " + std::to_string(i));
                }
            });
            FAIL() << "expected an exception";
        } catch (const std::runtime_error& e)
        {
            EXPECT_STREQ(e.what(), "task 17");
        }
    }
}
