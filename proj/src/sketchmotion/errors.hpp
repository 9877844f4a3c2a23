// Copyright 2026 The SketchMotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchmotion {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed SVG, config or tensor file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

class EmptySketchError : public ParseError {
 public:
  EmptySketchError() : ParseError("document contains no path data") {}
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Non-finite value found in gradients or outputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Critic failures. Subclasses keep the failure kinds distinguishable.
class CriticError : public Error {
 public:
  using Error::Error;
};
class CriticConnectionError : public CriticError {
 public:
  using CriticError::CriticError;
};
class CriticTimeout : public CriticError {
 public:
  using CriticError::CriticError;
};
class CriticShapeMismatch : public CriticError {
 public:
  using CriticError::CriticError;
};
class CriticProtocolError : public CriticError {
 public:
  using CriticError::CriticError;
};

}  // namespace sketchmotion
