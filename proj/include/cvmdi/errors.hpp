#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvmdi {

/// Parameter outside the physical or mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The Fock-space cutoff cannot represent the state to the required accuracy.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, std::size_t required_cutoff)
        : std::runtime_error(what), required_cutoff_(required_cutoff) {}

    /// Smallest cutoff known to be adequate, or 0 if none was found below the ceiling.
    std::size_t required_cutoff() const noexcept { return required_cutoff_; }

private:
    std::size_t required_cutoff_;
};

/// Heralding produced a state with vanishing norm.
class ZeroProbabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Heralded output is not of Schmidt form sum_n c_n |nn>.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Floating-point violation of a physical bound beyond the clamping slack.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvmdi
