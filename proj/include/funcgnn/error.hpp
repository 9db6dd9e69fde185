// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace funcgnn {

/// Failure categories surfaced by the toolkit. Tests match on the kind,
/// messages are for humans.
enum class ErrorKind {
  // circuit structure / AIGER
  MalformedHeader,
  LatchesUnsupported,
  BinaryAigerUnsupported,
  ConstantLiteralUnsupported,
  DanglingLiteral,
  CycleDetected,
  NoNotEdges,
  InvalidParams,
  // simulation / labeling
  ShapeMismatch,
  TooManyInputs,
  LengthMismatch,
  TooFewValues,
  // tensor engine
  IndexOutOfRange,
  SegmentMismatch,
  NotScalar,
  DoubleBackward,
  // training
  TooFewPairs,
  ZeroEmbedding,
  BadFractions,
  EmptySplit,
  // harness
  ConfigMismatch,
  TooFewSeeds,
  UnknownArm,
  BadConfig,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::LatchesUnsupported: return "LatchesUnsupported";
    case ErrorKind::BinaryAigerUnsupported: return "BinaryAigerUnsupported";
    case ErrorKind::ConstantLiteralUnsupported: return "ConstantLiteralUnsupported";
    case ErrorKind::DanglingLiteral: return "DanglingLiteral";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::NoNotEdges: return "NoNotEdges";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooManyInputs: return "TooManyInputs";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooFewValues: return "TooFewValues";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SegmentMismatch: return "SegmentMismatch";
    case ErrorKind::NotScalar: return "NotScalar";
    case ErrorKind::DoubleBackward: return "DoubleBackward";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::ZeroEmbedding: return "ZeroEmbedding";
    case ErrorKind::BadFractions: return "BadFractions";
    case ErrorKind::EmptySplit: return "EmptySplit";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::TooFewSeeds: return "TooFewSeeds";
    case ErrorKind::UnknownArm: return "UnknownArm";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace funcgnn
