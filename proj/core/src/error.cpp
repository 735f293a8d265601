//===- error.cpp - Error code names ---------------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/error.hpp"

namespace xflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::Io:
    return "IoError";
  case ErrorCode::FatalSyntax:
    return "FatalSyntax";
  case ErrorCode::EmptyVocab:
    return "EmptyVocab";
  case ErrorCode::VocabMismatch:
    return "VocabMismatch";
  case ErrorCode::NonFiniteLoss:
    return "NonFiniteLoss";
  case ErrorCode::HashMismatch:
    return "HashMismatch";
  case ErrorCode::TruncatedFile:
    return "TruncatedFile";
  case ErrorCode::BadMagic:
    return "BadMagic";
  case ErrorCode::UnknownId:
    return "UnknownId";
  case ErrorCode::ConfigMismatch:
    return "ConfigMismatch";
  case ErrorCode::InvalidArgument:
    return "InvalidArgument";
  }
  return "Unknown";
}

} // namespace xflow
