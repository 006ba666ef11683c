// Copyright 2026 The chronolex Authors.
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

#ifndef CHRONOLEX_ERROR_HPP_
#define CHRONOLEX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace chronolex {

// Base of every error the library throws. The CLI maps the three subclasses
// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or configuration: malformed tables, invariant violations,
// unknown words.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A numerical or processing failure inside a stage (e.g. a diverging loss).
class StageError : public Error {
 public:
  using Error::Error;
};

}  // namespace chronolex

#endif  // CHRONOLEX_ERROR_HPP_
