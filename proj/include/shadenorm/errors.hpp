// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace shadenorm {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument values (counts, angles, sigmas, indices).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Inputs that do not fit together (dimension or length mismatches).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Values outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Nothing left to evaluate after masking.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// Malformed files, schema violations, unreadable paths.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace shadenorm
