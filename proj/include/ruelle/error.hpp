#pragma once
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ruelle {

// Short %g rendering for numbers inside error messages.
inline std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

enum class ErrorKind {
  Config,
  NotAperiodic,
  InadmissibleWord,
  RealizationOverlap,
  NonContracting,
  NoConvergence,
  NotPositive,
  BracketFailure,
  DepthTooLarge,
  NonNormalized,
  ConeViolation,
  PreconditionViolation,
  LatticeDetected,
  FitFailure,
  CapTooSmall,
  NoAdmissiblePair,
  DensenessFailure,
  OverlappingSupports,
  DominationViolation,
  NonLatticeRequired,
  Overflow,
  DivergentRegion,
  LambdaOutOfRange,
  BelowNoiseFloor,
  InsufficientSample,
  DegenerateRoof,
  Domain,
  Io,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::NotAperiodic: return "NotAperiodic";
    case ErrorKind::InadmissibleWord: return "InadmissibleWord";
    case ErrorKind::RealizationOverlap: return "RealizationOverlap";
    case ErrorKind::NonContracting: return "NonContracting";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::DepthTooLarge: return "DepthTooLarge";
    case ErrorKind::NonNormalized: return "NonNormalized";
    case ErrorKind::ConeViolation: return "ConeViolation";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::LatticeDetected: return "LatticeDetected";
    case ErrorKind::FitFailure: return "FitFailure";
    case ErrorKind::CapTooSmall: return "CapTooSmall";
    case ErrorKind::NoAdmissiblePair: return "NoAdmissiblePair";
    case ErrorKind::DensenessFailure: return "DensenessFailure";
    case ErrorKind::OverlappingSupports: return "OverlappingSupports";
    case ErrorKind::DominationViolation: return "DominationViolation";
    case ErrorKind::NonLatticeRequired: return "NonLatticeRequired";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DivergentRegion: return "DivergentRegion";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::BelowNoiseFloor: return "BelowNoiseFloor";
    case ErrorKind::InsufficientSample: return "InsufficientSample";
    case ErrorKind::DegenerateRoof: return "DegenerateRoof";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind_(k) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Config errors carry the offending key and, when known, the line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& msg, int line = 0)
      : Error(ErrorKind::Config,
              (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                  "key '" + key + "': " + msg),
        key_(key),
        line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace ruelle
