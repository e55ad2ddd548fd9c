/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: tests/test_camera.cpp
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

#include <cmath>
#include <numbers>

using namespace flt;

namespace {

Points2 project_all(const camera::Pose& pose, const Points3& points)
{
    return camera::project(pose, std::span<const Eigen::Vector3d>(points)).points;
}

Points3 random_points(SplitMix64& rng, int n)
{
    Points3 points;
    for (int i = 0; i < n; ++i)
    {
        points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    return points;
}

camera::Pose random_pose(SplitMix64& rng)
{
    camera::Pose pose;
    pose.rotation = test::random_rotation(rng);
    pose.scale = rng.uniform(0.5, 200.0);
    pose.translation = Eigen::Vector2d(rng.uniform(-300, 300), rng.uniform(-300, 300));
    return pose;
}

double mean_residual(const camera::Pose& pose, const Points3& x3, const Points2& x2)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < x3.size(); ++i)
    {
        sum += (camera::project(pose, x3[i]) - x2[i]).norm();
    }
    return sum / static_cast<double>(x3.size());
}

} // namespace

TEST(Project, IdentityPoseDropsDepth)
{
    const camera::Pose pose;
    const Points3 points = {Eigen::Vector3d(1, 2, 3)};
    const auto projection = camera::project(pose, std::span<const Eigen::Vector3d>(points));
    EXPECT_EQ(projection.points[0], Eigen::Vector2d(1, 2));
    EXPECT_EQ(projection.depths[0], 3.0);
}

TEST(Project, AppliesScaleThenTranslation)
{
    camera::Pose pose;
    pose.scale = 2.0;
    pose.translation = Eigen::Vector2d(5, 0);
    EXPECT_EQ(camera::project(pose, Eigen::Vector3d(1, 0, 0)), Eigen::Vector2d(7, 0));
}

TEST(Project, MatrixFormAgreesWithProjection)
{
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto pose = random_pose(rng);
        const Eigen::Vector3d p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Eigen::Vector4d h = pose.to_matrix() * p.homogeneous();
        EXPECT_LE((h.head<2>() - camera::project(pose, p)).norm(), 1e-9);
        EXPECT_NEAR(h(2), camera::depth(pose, p), 1e-12);
        EXPECT_EQ(h(3), 1.0);
    }
}

TEST(EstimatePose, RecoversTheIdentity)
{
    SplitMix64 rng(1);
    const auto points = random_points(rng, 10);
    const auto pose = camera::estimate_pose(points, project_all(camera::Pose{}, points));
    EXPECT_LE((pose.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(pose.scale, 1.0, 1e-9);
    EXPECT_LE(pose.translation.norm(), 1e-9);
}

TEST(EstimatePose, RecoversAKnownPoseFromModelLandmarks)
{
    const auto m = test::small_model();
    const auto landmarks = model::landmark_positions(
        m, model::evaluate_mesh(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2)));
    camera::Pose truth;
    truth.rotation = Eigen::AngleAxisd(30.0 * std::numbers::pi / 180.0, Eigen::Vector3d::UnitY()).toRotationMatrix();
    truth.scale = 2.0;
    truth.translation = Eigen::Vector2d(10, 5);
    const auto pose = camera::estimate_pose(landmarks, project_all(truth, landmarks));
    EXPECT_LE((pose.rotation - truth.rotation).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(pose.scale, 2.0, 1e-6);
    EXPECT_LE((pose.translation - truth.translation).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EstimatePose, RoundTripsRandomPoses)
{
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto truth = random_pose(rng);
        const auto points = random_points(rng, 6 + static_cast<int>(rng.below(20)));
        const auto pose = camera::estimate_pose(points, project_all(truth, points));
        EXPECT_LT(camera::geodesic_distance(pose.rotation, truth.rotation), 1e-6);
        EXPECT_LT(std::abs(pose.scale - truth.scale) / truth.scale, 1e-8);
        EXPECT_LT((pose.translation - truth.translation).norm(), 1e-8);
    }
}

TEST(EstimatePose, RejectsCollinearAndCoplanarPoints)
{
    Points3 line;
    Points3 plane;
    for (int i = 0; i < 10; ++i)
    {
        line.emplace_back(i, 2.0 * i, -i);
        plane.emplace_back(i % 3, i / 3, 0.0);
    }
    const Points2 image(10, Eigen::Vector2d::Zero());
    EXPECT_THROW(camera::estimate_pose(line, project_all(camera::Pose{}, line)), DegenerateConfigurationError);
    EXPECT_THROW(camera::estimate_pose(plane, project_all(camera::Pose{}, plane)), DegenerateConfigurationError);
}

TEST(EstimatePose, NeedsFourCorrespondences)
{
    SplitMix64 rng(4);
    const auto points = random_points(rng, 3);
    EXPECT_THROW(camera::estimate_pose(points, project_all(camera::Pose{}, points)), InsufficientDataError);

    const auto more = random_points(rng, 6);
    const std::vector<double> weights = {1, 1, 1, 0, 0, 0};
    EXPECT_THROW(camera::estimate_pose(more, project_all(camera::Pose{}, more), weights), InsufficientDataError);
    EXPECT_THROW(camera::estimate_pose(more, Points2(5)), DimensionError);
}

TEST(EstimatePose, ZeroWeightsIgnoreOutliers)
{
    SplitMix64 rng(5);
    const auto truth = random_pose(rng);
    const auto points = random_points(rng, 12);
    auto image = project_all(truth, points);
    image[3] += Eigen::Vector2d(500, -300);
    std::vector<double> weights(12, 1.0);
    weights[3] = 0.0;
    const auto pose = camera::estimate_pose(points, image, weights);
    EXPECT_LT(camera::geodesic_distance(pose.rotation, truth.rotation), 1e-6);
}

TEST(EstimatePose, ResidualGrowsWithNoise)
{
    const auto m = test::small_model();
    const auto landmarks = model::landmark_positions(
        m, model::evaluate_mesh(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2)));
    double previous = -1.0;
    for (double sigma : {0.0, 0.5, 2.0})
    {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 25; ++seed)
        {
            SplitMix64 rng(seed);
            const auto truth = test::face_pose(rng, m);
            auto image = project_all(truth, landmarks);
            for (auto& x : image)
            {
                x += sigma * Eigen::Vector2d(rng.normal(), rng.normal());
            }
            total += mean_residual(camera::estimate_pose(landmarks, image), landmarks, image);
        }
        EXPECT_GE(total, previous) << "sigma " << sigma;
        previous = total;
    }
}

TEST(EstimatePose, AlwaysReturnsAProperRotation)
{
    SplitMix64 rng(6);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto truth = random_pose(rng);
        const auto points = random_points(rng, 8);
        auto image = project_all(truth, points);
        for (auto& x : image)
        {
            x += rng.uniform(0.0, 0.3) * truth.scale * Eigen::Vector2d(rng.normal(), rng.normal());
        }
        camera::Pose pose;
        try
        {
            pose = camera::estimate_pose(points, image);
        } catch (const DegenerateConfigurationError&)
        {
            continue;
        }
        EXPECT_LE((pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                  1e-9);
        EXPECT_NEAR(pose.rotation.determinant(), 1.0, 1e-9);
        EXPECT_GT(pose.scale, 0.0);
    }
}

TEST(ProjectionJacobian, IdentityPoseKeepsTheFirstTwoAxes)
{
    camera::Pose pose;
    pose.scale = 3.0;
    Eigen::Matrix<double, 2, 3> expected;
    expected << 3, 0, 0, 0, 3, 0;
    EXPECT_EQ(camera::projection_jacobian(pose, Eigen::Vector3d(4, 5, 6)), expected);
}

TEST(ProjectionJacobian, MatchesCentralDifferences)
{
    SplitMix64 rng(8);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto pose = random_pose(rng);
        const Eigen::Vector3d p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const auto jacobian = camera::projection_jacobian(pose, p);
        Eigen::Matrix<double, 2, 3> numeric;
        for (int c = 0; c < 3; ++c)
        {
            const Eigen::Vector3d step = h * Eigen::Vector3d::Unit(c);
            numeric.col(c) = (camera::project(pose, p + step) - camera::project(pose, p - step)) / (2.0 * h);
        }
        EXPECT_LE((numeric - jacobian).norm() / jacobian.norm(), 1e-5);
    }
}

TEST(ProjectionJacobian, ScalesLinearlyWithTheCameraScale)
{
    SplitMix64 rng(9);
    auto pose = random_pose(rng);
    const Eigen::Vector3d p(0.1, 0.2, 0.3);
    const auto before = camera::projection_jacobian(pose, p);
    pose.scale *= 2.0;
    EXPECT_EQ(camera::projection_jacobian(pose, p), 2.0 * before);
}

TEST(Pose, ValidateRejectsReflectionsAndBadScale)
{
    camera::Pose pose;
    EXPECT_NO_THROW(camera::validate(pose));
    pose.rotation(2, 2) = -1.0;
    EXPECT_THROW(camera::validate(pose), ArgumentError);
    pose = camera::Pose{};
    pose.scale = 0.0;
    EXPECT_THROW(camera::validate(pose), ArgumentError);
}

TEST(Pose, GeodesicDistanceOfAKnownRotation)
{
    const Eigen::Matrix3d a = camera::rotation_from_euler(0.2, -0.1, 0.3);
    const Eigen::Matrix3d b = a * Eigen::AngleAxisd(0.25, Eigen::Vector3d(1, 2, 2).normalized()).toRotationMatrix();
    EXPECT_NEAR(camera::geodesic_distance(a, b), 0.25, 1e-12);
    EXPECT_NEAR(camera::geodesic_distance(a, a), 0.0, 1e-12);
}
