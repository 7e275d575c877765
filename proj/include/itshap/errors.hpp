/*
 * Copyright 2026 The itshap Authors.
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

#ifndef ITSHAP_ERRORS_HPP_
#define ITSHAP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace itshap {

// Base for every error the library throws. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: overlapping sets, orders out of range, bad tolerances.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An index or instance value outside its domain.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Incompatible dimensions between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A size guard refused to materialize something exponentially large.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A file or document could not be parsed into the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace itshap

#endif  // ITSHAP_ERRORS_HPP_
