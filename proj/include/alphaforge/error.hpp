#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alphaforge {

enum class Errc {
  DegenerateFace,
  TooFewPoints,
  DegenerateInput,
  DegenerateTetrahedron,
  EmptySelection,
  EmptyMesh,
  NoSurface,
  EmptyCloud,
  IsolatedVertex,
  VertexCountMismatch,
  MissingNormals,
  NoEdges,
  DegenerateConfiguration,
  RewardOutOfRange,
  ConfigError,
  NonFinite,
  ParseError,
  UnsupportedElement,
  IoError,
  InvalidMesh,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Every failure mode carries a machine-readable code
/// so callers (and the CLI's exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace alphaforge
