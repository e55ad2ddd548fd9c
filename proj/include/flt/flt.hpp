/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/flt.hpp
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
#pragma once

#ifndef FLT_FLT_HPP
#define FLT_FLT_HPP

#include "flt/camera/pose.hpp"
#include "flt/camera/pose_estimation.hpp"
#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/core/landmarks_io.hpp"
#include "flt/core/random.hpp"
#include "flt/eval/corpus.hpp"
#include "flt/eval/shuffle.hpp"
#include "flt/eval/shuffle_eval.hpp"
#include "flt/eval/similarity.hpp"
#include "flt/fitting/contour.hpp"
#include "flt/fitting/fit.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/fitting/fit_io.hpp"
#include "flt/fitting/linear_fitting.hpp"
#include "flt/model/model_io.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/model/synthetic.hpp"
#include "flt/pipeline/parallel.hpp"
#include "flt/pipeline/sequence.hpp"
#include "flt/pipeline/smoothing.hpp"
#include "flt/render/image.hpp"
#include "flt/render/rasterizer.hpp"
#include "flt/render/texture.hpp"
#include "flt/transform/transform.hpp"

#endif /* FLT_FLT_HPP */
