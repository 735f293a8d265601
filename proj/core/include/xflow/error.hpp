//===- xflow/error.hpp - Error codes and exception type ---------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xflow {

enum class ErrorCode {
  Io,
  FatalSyntax,
  EmptyVocab,
  VocabMismatch,
  NonFiniteLoss,
  HashMismatch,
  TruncatedFile,
  BadMagic,
  UnknownId,
  ConfigMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. The code is what callers branch on; the message
/// is for humans.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace xflow
