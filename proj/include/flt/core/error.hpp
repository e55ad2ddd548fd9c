/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/core/error.hpp
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

#ifndef FLT_CORE_ERROR_HPP
#define FLT_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace flt {

/**
 * Base class of all errors thrown by the library.
 *
 * Input-side errors (bad files, bad arguments, wrong dimensions) derive directly from this class,
 * numerical failures derive from NumericalError. The CLI maps the two families onto distinct exit codes.
 */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Coefficient or vertex counts do not match the model.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// A precondition on a function argument was violated.
class ArgumentError : public Error
{
public:
    using Error::Error;
};

/// Input data is unusable (e.g. non-finite landmark coordinates).
class InputError : public Error
{
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Configuration is inconsistent with the requested operation.
class ConfigurationError : public Error
{
public:
    using Error::Error;
};

/**
 * A loaded or constructed object violates one of its invariants.
 * field() names the offending field, e.g. "shape_sigmas".
 */
class ValidationError : public Error
{
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NumericalError : public Error
{
public:
    using Error::Error;
};

/// Fewer correspondences than the estimator needs.
class InsufficientDataError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

/// Point configuration is rank deficient (collinear or coplanar).
class DegenerateConfigurationError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

/// Normal equations too badly conditioned to solve; raise the regularisation.
class IllConditionedError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

} // namespace flt

#endif /* FLT_CORE_ERROR_HPP */
