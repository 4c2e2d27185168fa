/*
 * Copyright 2026 The epibias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EPIBIAS_ERRORS_H_
#define EPIBIAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace epibias {

// Base of every error the library throws. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration (model spec, run config, spec file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in the wrong lifecycle state (e.g. purge before table).
class StateError : public Error {
 public:
  using Error::Error;
};

// Dataset or archive contents do not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss or gradient).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace epibias

#endif  // EPIBIAS_ERRORS_H_
