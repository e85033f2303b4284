#pragma once

#include <stdexcept>
#include <string>

namespace homogh {

/// Base of every error the library throws. `kind()` is a stable short tag
/// used in CLI diagnostics (`error=<kind>`).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HOMOGH_ERROR(Name, tag)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(tag, what) {}         \
    }

// complex-kernel
HOMOGH_ERROR(InvalidZeroError, "invalid-zero");
HOMOGH_ERROR(PoleError, "pole");
HOMOGH_ERROR(BranchDomainError, "branch-domain");
HOMOGH_ERROR(InvalidMuError, "invalid-mu");
// tessellation / covering
HOMOGH_ERROR(SizeError, "size");
HOMOGH_ERROR(ConvergenceError, "convergence");
HOMOGH_ERROR(PunctureError, "puncture");
// ansatz
HOMOGH_ERROR(InvalidDataError, "invalid-data");
HOMOGH_ERROR(PathError, "path");
HOMOGH_ERROR(DegenerateMetricError, "degenerate-metric");
HOMOGH_ERROR(DegenerateFrameError, "degenerate-frame");
// verify / path-lab
HOMOGH_ERROR(StencilError, "stencil");
HOMOGH_ERROR(RegionError, "region");
// cli
HOMOGH_ERROR(ConfigError, "config");

#undef HOMOGH_ERROR

}  // namespace homogh
