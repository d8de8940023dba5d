// Copyright 2026 The TGLG Toolkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TGLG_ERRORS_H_
#define TGLG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tglg {

// Root of every error the toolkit throws. The CLI maps subclasses onto
// process exit codes (see tools/commands.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument outside its documented domain (tau <= 0, token_count < 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Index or shape mismatch between related structures.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Embedding service replied with something that violates the wire contract,
// or a policy broke the decoding protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Embedding service unreachable after retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace tglg

#endif  // TGLG_ERRORS_H_
