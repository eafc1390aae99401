#include "alphaforge/error.hpp"

namespace alphaforge {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateFace: return "DegenerateFace";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::DegenerateTetrahedron: return "DegenerateTetrahedron";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::NoSurface: return "NoSurface";
    case Errc::EmptyCloud: return "EmptyCloud";
    case Errc::IsolatedVertex: return "IsolatedVertex";
    case Errc::VertexCountMismatch: return "VertexCountMismatch";
    case Errc::MissingNormals: return "MissingNormals";
    case Errc::NoEdges: return "NoEdges";
    case Errc::DegenerateConfiguration: return "DegenerateConfiguration";
    case Errc::RewardOutOfRange: return "RewardOutOfRange";
    case Errc::ConfigError: return "ConfigError";
    case Errc::NonFinite: return "NonFinite";
    case Errc::ParseError: return "ParseError";
    case Errc::UnsupportedElement: return "UnsupportedElement";
    case Errc::IoError: return "IoError";
    case Errc::InvalidMesh: return "InvalidMesh";
  }
  return "Unknown";
}

}  // namespace alphaforge
