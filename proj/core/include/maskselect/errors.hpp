//------------------------------------------------------------------------------
//
//   Copyright 2026 The maskselect Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace maskselect {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent configuration: bad hyperparameters, mismatched layer sizes, empty splits.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Tensor shapes do not satisfy an operation's contract.
class ShapeError : public Error
{
public:
  using Error::Error;
};

/// Caller-supplied value outside its domain (class index, report length, ...).
class InputError : public Error
{
public:
  using Error::Error;
};

/// Misuse of the autodiff tape.
class UsageError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

/// Malformed image or CSV content. `offset()` is the byte offset of the problem.
class ParseError : public Error
{
public:
  ParseError(std::string const &what, std::size_t offset)
    : Error(what + " (at byte " + std::to_string(offset) + ")")
    , offset_(offset)
  {}

  std::size_t offset() const noexcept
  {
    return offset_;
  }

private:
  std::size_t offset_;
};

/// Checkpoint could not be decoded; the message names the offending field.
class LoadError : public Error
{
public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingFailure : public Error
{
public:
  TrainingFailure(std::string const &what, int epoch, int batch)
    : Error(what + " at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch))
    , epoch_(epoch)
    , batch_(batch)
  {}

  int epoch() const noexcept
  {
    return epoch_;
  }
  int batch() const noexcept
  {
    return batch_;
  }

private:
  int epoch_;
  int batch_;
};

}  // namespace maskselect
