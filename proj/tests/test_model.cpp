/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: tests/test_model.cpp
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
#include <cstring>
#include <numeric>
#include <set>

using namespace flt;
using flt::test::TempDir;

namespace {

/// Vertex i of mean + sum_k alpha_k B_k + sum_j beta_j E_j, computed coordinate by coordinate from the raw arrays.
Eigen::Vector3d summed_vertex(const model::MorphableModel& m, const std::vector<double>& alpha,
                              const std::vector<double>& beta, int i)
{
    Eigen::Vector3d v;
    for (int c = 0; c < 3; ++c)
    {
        const int row = 3 * i + c;
        double value = m.mean_shape.data()[row];
        for (std::size_t k = 0; k < alpha.size(); ++k)
        {
            value += alpha[k] * m.shape_basis.data()[k * m.shape_basis.rows() + row];
        }
        for (std::size_t j = 0; j < beta.size(); ++j)
        {
            value += beta[j] * m.expression_basis.data()[j * m.expression_basis.rows() + row];
        }
        v(c) = value;
    }
    return v;
}

} // namespace

TEST(EvaluateMesh, ZeroCoefficientsReturnTheMeanBitForBit)
{
    const auto m = test::small_model();
    const auto mesh = model::evaluate_mesh(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2));
    ASSERT_EQ(mesh.vertices.size(), m.mean_shape.size());
    EXPECT_EQ(std::memcmp(mesh.vertices.data(), m.mean_shape.data(), sizeof(double) * m.mean_shape.size()), 0);
    EXPECT_EQ(mesh.num_vertices(), m.num_vertices());
}

TEST(EvaluateMesh, UnitShapeCoefficientAddsFirstComponent)
{
    const auto m = test::small_model();
    const auto mesh = model::evaluate_mesh(m, Eigen::VectorXd::Unit(4, 0), Eigen::VectorXd::Zero(2));
    EXPECT_LE(test::max_abs_diff(mesh.vertices, m.mean_shape + m.shape_basis.col(0)), 1e-15);
}

TEST(EvaluateMesh, MatchesDirectSummationOverRawArrays)
{
    const auto m = test::small_model();
    const std::vector<double> alpha = {0.5, -0.3, 0.0, 0.0};
    const std::vector<double> beta = {0.2, 0.0};
    const auto mesh = model::evaluate_mesh(m, Eigen::Map<const Eigen::VectorXd>(alpha.data(), 4),
                                           Eigen::Map<const Eigen::VectorXd>(beta.data(), 2));
    for (int i = 0; i < m.num_vertices(); ++i)
    {
        EXPECT_LE((mesh.vertex(i) - summed_vertex(m, alpha, beta, i)).cwiseAbs().maxCoeff(), 1e-12) << "vertex " << i;
    }
}

TEST(EvaluateMesh, RejectsCoefficientLengthMismatch)
{
    const auto m = test::small_model();
    EXPECT_THROW(model::evaluate_mesh(m, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)), DimensionError);
    EXPECT_THROW(model::evaluate_mesh(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(5)), DimensionError);
}

TEST(EvaluateMesh, IsLinearInTheShapeCoefficients)
{
    const auto m = test::small_model();
    SplitMix64 rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        const Eigen::VectorXd alpha1 = test::random_shape(rng, m);
        const Eigen::VectorXd alpha2 = test::random_shape(rng, m);
        const Eigen::VectorXd beta = test::random_expression(rng, m);
        const Eigen::VectorXd zero_k = Eigen::VectorXd::Zero(2);
        const Eigen::VectorXd zero_m = Eigen::VectorXd::Zero(4);
        const Eigen::VectorXd lhs = model::evaluate_mesh(m, a * alpha1 + b * alpha2, beta).vertices;
        const Eigen::VectorXd rhs = a * model::evaluate_mesh(m, alpha1, zero_k).vertices +
                                    b * model::evaluate_mesh(m, alpha2, zero_k).vertices +
                                    model::evaluate_mesh(m, zero_m, beta).vertices - (a + b) * m.mean_shape;
        EXPECT_LE(test::max_abs_diff(lhs, rhs), 1e-9);
    }
}

TEST(EvaluateMesh, ExpressionDisplacementDoesNotDependOnShape)
{
    const auto m = test::small_model();
    SplitMix64 rng(12);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Eigen::VectorXd beta = test::random_expression(rng, m);
        const Eigen::VectorXd alpha1 = test::random_shape(rng, m);
        const Eigen::VectorXd alpha2 = test::random_shape(rng, m);
        const Eigen::VectorXd zero_k = Eigen::VectorXd::Zero(2);
        const Eigen::VectorXd d1 =
            model::evaluate_mesh(m, alpha1, beta).vertices - model::evaluate_mesh(m, alpha1, zero_k).vertices;
        const Eigen::VectorXd d2 =
            model::evaluate_mesh(m, alpha2, beta).vertices - model::evaluate_mesh(m, alpha2, zero_k).vertices;
        EXPECT_LE(test::max_abs_diff(d1, d2), 1e-9);
    }
}

TEST(SynthesizeTestModel, IsDeterministicForASeed)
{
    EXPECT_TRUE(model::synthesize_test_model(5, 150, 3, 3) == model::synthesize_test_model(5, 150, 3, 3));
    EXPECT_FALSE(model::synthesize_test_model(5, 150, 3, 3) == model::synthesize_test_model(6, 150, 3, 3));
}

TEST(SynthesizeTestModel, ShapeBasisIsOrthonormal)
{
    const auto m = model::synthesize_test_model(1, 300, 8, 3);
    const Eigen::MatrixXd gram = m.shape_basis.transpose() * m.shape_basis;
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SynthesizeTestModel, SatisfiesTheModelInvariants)
{
    for (int n : {68, 100, 200, 500})
    {
        const auto m = model::synthesize_test_model(3, n, 5, 4);
        EXPECT_NO_THROW(model::validate(m));
        EXPECT_EQ(m.num_vertices(), n);
        EXPECT_TRUE((m.shape_sigmas.array() > 0.0).all());
        EXPECT_EQ(std::set<int>(m.landmark_map.begin(), m.landmark_map.end()).size(), num_landmarks);
        EXPECT_FALSE(m.triangles.empty());
        EXPECT_FALSE(m.contour_left.empty());
        EXPECT_FALSE(m.contour_right.empty());
    }
}

TEST(SynthesizeTestModel, TrianglesFaceOutwards)
{
    // The mean face is a half-ellipsoid centred on the origin.
    const auto m = test::small_model();
    for (const auto& tri : m.triangles)
    {
        const Eigen::Vector3d a = m.mean_vertex(tri[0]);
        const Eigen::Vector3d normal = (m.mean_vertex(tri[1]) - a).cross(m.mean_vertex(tri[2]) - a);
        const Eigen::Vector3d middle = (a + m.mean_vertex(tri[1]) + m.mean_vertex(tri[2])) / 3.0;
        EXPECT_GT(normal.dot(middle), 0.0);
    }
}

TEST(SynthesizeTestModel, ExpressionBlendshapesAreLocalised)
{
    const auto m = model::synthesize_test_model(4, 400, 4, 4);
    for (Eigen::Index j = 0; j < m.expression_basis.cols(); ++j)
    {
        const auto displacement = m.expression_basis.col(j).reshaped(3, m.num_vertices()).colwise().norm();
        const double peak = displacement.maxCoeff();
        ASSERT_GT(peak, 0.0);
        const auto moving = (displacement.array() > 0.05 * peak).count();
        EXPECT_LT(moving, m.num_vertices() / 2) << "blendshape " << j << " moves most of the face";
    }
}

TEST(SynthesizeTestModel, RejectsParametersBelowTheMinimum)
{
    EXPECT_THROW(model::synthesize_test_model(1, 10, 4, 2), ArgumentError);
    EXPECT_THROW(model::synthesize_test_model(1, 67, 4, 2), ArgumentError);
    EXPECT_THROW(model::synthesize_test_model(1, 200, 0, 2), ArgumentError);
    EXPECT_THROW(model::synthesize_test_model(1, 200, 4, 0), ArgumentError);
}

TEST(LandmarkPositions, MeanMeshGivesMappedMeanVertices)
{
    const auto m = test::small_model();
    const auto mesh = model::evaluate_mesh(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2));
    const auto points = model::landmark_positions(m, mesh);
    ASSERT_EQ(points.size(), num_landmarks);
    for (std::size_t i = 0; i < num_landmarks; ++i)
    {
        EXPECT_EQ(points[i], m.mean_vertex(m.landmark_map[i]));
    }
}

TEST(LandmarkPositions, PreservesTheOrderOfThePermutedMap)
{
    auto m = test::small_model();
    const auto mesh = model::evaluate_mesh(m, Eigen::VectorXd::Unit(4, 1), Eigen::VectorXd::Unit(2, 0));
    const auto original = model::landmark_positions(m, mesh);
    std::vector<int> order(num_landmarks);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + 5, order.end());
    std::vector<int> permuted_map(num_landmarks);
    for (std::size_t i = 0; i < num_landmarks; ++i)
    {
        permuted_map[i] = m.landmark_map[order[i]];
    }
    m.landmark_map = permuted_map;
    const auto permuted = model::landmark_positions(m, mesh);
    for (std::size_t i = 0; i < num_landmarks; ++i)
    {
        EXPECT_EQ(permuted[i], original[order[i]]);
    }
}

TEST(LandmarkPositions, FirstShapeComponentMovesTheNoseTipByItsBasisEntries)
{
    const auto m = test::small_model();
    const auto mesh = model::evaluate_mesh(m, Eigen::VectorXd::Unit(4, 0), Eigen::VectorXd::Zero(2));
    const int v = m.landmark_map[30];
    const Eigen::Vector3d expected(m.mean_shape[3 * v] + m.shape_basis(3 * v, 0),
                                   m.mean_shape[3 * v + 1] + m.shape_basis(3 * v + 1, 0),
                                   m.mean_shape[3 * v + 2] + m.shape_basis(3 * v + 2, 0));
    EXPECT_LE((model::landmark_positions(m, mesh)[30] - expected).norm(), 1e-15);
}

TEST(LandmarkPositions, RejectsAForeignMesh)
{
    const auto m = test::small_model();
    const auto other = model::synthesize_test_model(42, 150, 4, 2);
    const auto mesh = model::evaluate_mesh(other, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2));
    EXPECT_THROW(model::landmark_positions(m, mesh), DimensionError);
}

TEST(ModelIo, RoundTripPreservesEveryField)
{
    TempDir dir("model_roundtrip");
    const auto m = model::synthesize_test_model(9, 180, 5, 3);
    model::save_model(m, dir.path());
    const auto loaded = model::load_model(dir.path());
    EXPECT_TRUE(loaded == m);
    EXPECT_TRUE(model::load_model(dir / "model.json") == m);
}

TEST(ModelIo, SaveLoadSaveIsByteIdentical)
{
    TempDir dir("model_bytes");
    model::save_model(model::synthesize_test_model(9, 180, 5, 3), dir / "a");
    model::save_model(model::load_model(dir / "a"), dir / "b");
    for (const char* file : {"model.json", "mean.bin", "shape.bin", "sigmas.bin", "expr.bin"})
    {
        EXPECT_EQ(test::read_bytes(dir / "a" / file), test::read_bytes(dir / "b" / file)) << file;
    }
}

namespace {

std::string validation_field(const std::filesystem::path& path)
{
    try
    {
        model::load_model(path);
    } catch (const ValidationError& e)
    {
        return e.field();
    }
    return "<none>";
}

} // namespace

TEST(ModelIo, ZeroSigmaIsRejectedNamingTheField)
{
    TempDir dir("model_sigma");
    model::save_model(test::small_model(), dir.path());
    std::ofstream(dir / "sigmas.bin", std::ios::binary | std::ios::trunc) << std::string(4 * 8, '\0');
    EXPECT_EQ(validation_field(dir.path()), "shape_sigmas");
}

TEST(ModelIo, OutOfRangeTriangleIsRejectedNamingTheField)
{
    TempDir dir("model_triangle");
    model::save_model(test::small_model(), dir.path());
    auto manifest = io::read_json_file(dir / "model.json");
    manifest["triangles"][0][1] = 200;
    io::write_json_file(dir / "model.json", manifest);
    EXPECT_EQ(validation_field(dir.path()), "triangles");
}

TEST(ModelIo, DuplicateLandmarkVertexIsRejected)
{
    TempDir dir("model_landmarks");
    model::save_model(test::small_model(), dir.path());
    auto manifest = io::read_json_file(dir / "model.json");
    manifest["landmark_map"][1] = manifest["landmark_map"][0];
    io::write_json_file(dir / "model.json", manifest);
    EXPECT_EQ(validation_field(dir.path()), "landmark_map");
}

TEST(ModelIo, MissingAndMalformedFilesAreReported)
{
    TempDir dir("model_missing");
    EXPECT_THROW(model::load_model(dir / "nothing"), IoError);
    model::save_model(test::small_model(), dir.path());
    std::filesystem::remove(dir / "expr.bin");
    EXPECT_THROW(model::load_model(dir.path()), IoError);
    model::save_model(test::small_model(), dir.path());
    io::write_text_file(dir / "model.json", "{ not json");
    EXPECT_THROW(model::load_model(dir.path()), ValidationError);
    io::write_text_file(dir / "model.json", "{\"n_vertices\": 200}");
    EXPECT_THROW(model::load_model(dir.path()), ValidationError);
}

TEST(ModelIo, TruncatedArrayIsRejectedNamingTheField)
{
    TempDir dir("model_truncated");
    model::save_model(test::small_model(), dir.path());
    const auto bytes = test::read_bytes(dir / "shape.bin");
    std::ofstream(dir / "shape.bin", std::ios::binary | std::ios::trunc) << bytes.substr(0, bytes.size() - 8);
    EXPECT_EQ(validation_field(dir.path()), "shape_basis");
}
