/*****************************************************************************
*  Copyright 2026 the stackprobe authors
*
*  Licensed under the Apache License, Version 2.0 (the "License");
*  you may not use this file except in compliance with the License.
*  You may obtain a copy of the License at
*
* http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* *****************************************************************************/

#ifndef STACKPROBE_ERRORS_HPP
#define STACKPROBE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stackprobe {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fuzz configuration contained no test cases.
class EmptyConfigError : public Error {
 public:
  EmptyConfigError() : Error("fuzz config contains no test cases") {}
};

/// A test case had no FUZZ placeholder.
class NoPlaceholderError : public Error {
 public:
  explicit NoPlaceholderError(int case_index)
      : Error("test case " + std::to_string(case_index) +
              " has no FUZZ placeholder"),
        case_index_(case_index) {}
  int case_index() const { return case_index_; }

 private:
  int case_index_;
};

/// The charset contains the same character twice.
class DuplicateCharsetError : public Error {
 public:
  explicit DuplicateCharsetError(char c)
      : Error(std::string("duplicate charset entry '") + c + "'"), entry_(c) {}
  char entry() const { return entry_; }

 private:
  char entry_;
};

/// Any other structural problem in a fuzz configuration file.
class ConfigParseError : public Error {
 public:
  ConfigParseError(std::size_t line, const std::string& what)
      : Error("config line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Writing generated output to a sink failed.
class SinkWriteError : public Error {
 public:
  using Error::Error;
};

/// The campaign target could not be reached at start.
class TargetUnreachableError : public Error {
 public:
  using Error::Error;
};

/// A capture file could not be opened or has a bad header.
class CaptureOpenError : public Error {
 public:
  using Error::Error;
};

/// A session store line did not parse.
class StoreParseError : public Error {
 public:
  explicit StoreParseError(std::size_t line)
      : Error("session store line " + std::to_string(line) + " is malformed"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// The root directory given to the filesystem scanner does not exist.
class RootMissingError : public Error {
 public:
  using Error::Error;
};

/// The command adapter was not reachable when the sweep started.
class AdapterUnavailableError : public Error {
 public:
  using Error::Error;
};

/// The victim service could not bind its listen address.
class BindFailureError : public Error {
 public:
  using Error::Error;
};

/// A scan host could not be resolved.
class HostUnresolvableError : public Error {
 public:
  using Error::Error;
};

/// A report input file was not parseable.
class MalformedInputError : public Error {
 public:
  explicit MalformedInputError(const std::string& file, const std::string& why)
      : Error("malformed input " + file + ": " + why), file_(file) {}
  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

}  // namespace stackprobe

#endif  // STACKPROBE_ERRORS_HPP
