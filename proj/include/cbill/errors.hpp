#pragma once

#include <stdexcept>
#include <string>

namespace cbill {

enum class ErrorKind {
    DegenerateMirror,   // isotropic mirror line or tangent
    DegenerateInput,    // coincident points, zero vectors, bad parameters
    IsotropicEdge,      // complex length of an isotropic segment
    ExtensionFailure,   // orbit folding found no admissible intersection
    PatchRejected,      // more than half of a verification grid degenerate
    ComponentError,     // framed polygon outside the component with concordant lengths
    SingularState,      // rank drop of a constraint system
    CornerHit,          // oriented line through a junction of boundary arcs
    Tangency,           // tangential intersection where a transversal one is required
    NotAReflection,     // a triple that violates the symmetry it claims
    Malformed           // unparsable or inconsistent serialized input
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::DegenerateMirror: return "degenerate-mirror";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::IsotropicEdge: return "isotropic-edge";
    case ErrorKind::ExtensionFailure: return "extension-failure";
    case ErrorKind::PatchRejected: return "patch-rejected";
    case ErrorKind::ComponentError: return "component-error";
    case ErrorKind::SingularState: return "singular-state";
    case ErrorKind::CornerHit: return "corner-hit";
    case ErrorKind::Tangency: return "tangency";
    case ErrorKind::NotAReflection: return "not-a-reflection";
    case ErrorKind::Malformed: return "malformed";
    }
    return "unknown";
}

class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace cbill
