#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace regnbhd {

enum class Err {
  UnknownGenerator,
  MalformedWord,
  MixedPresentations,
  BallTooLarge,
  UndecidableForDesc,
  InfiniteValence,
  NotASubgraph,
  EdgeGroupNotElliptic,
  NotMinimal,
  InconsistentDirectTable,
  UnresolvedCorners,
  PositionFailure,
  NoStabilization,
  NoSplittingRealization,
  NonzeroIntersection,
  AxiomsFail,
  UnknownGallery,
  SchemaError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void check(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace regnbhd
