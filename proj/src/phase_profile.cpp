#include "rissynth/phase_profile.hpp"

#include "rissynth/error.hpp"
#include "rissynth/geometry.hpp"

#include <string>

namespace rissynth {

PhaseProfile::PhaseProfile(LevelMatrix levels, int resolution_bits)
    : levels_(std::move(levels)), bits_(resolution_bits)
{
    if (bits_ < 1 || bits_ > 16)
        throw DomainError("resolution_bits must be in [1, 16], got " + std::to_string(bits_));
    if (levels_.empty())
        throw DomainError("phase profile must have at least one element");
    const int top = 1 << bits_;
    for (std::size_t r = 0; r < levels_.rows(); ++r)
        for (std::size_t c = 0; c < levels_.cols(); ++c) {
            const int v = levels_(r, c);
            if (v < 1 || v > top)
                throw DomainError("profile entry (" + std::to_string(r) + ", " + std::to_string(c) + ") = " +
                                  std::to_string(v) + " outside [1, " + std::to_string(top) + "]");
        }
}

PhaseProfile PhaseProfile::uniform(std::size_t rows, std::size_t cols, int resolution_bits, int level)
{
    return PhaseProfile(LevelMatrix(rows, cols, level), resolution_bits);
}

Matrix<double> PhaseProfile::phases() const
{
    Matrix<double> out(rows(), cols());
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c)
            out(r, c) = level_to_phase(levels_(r, c), bits_);
    return out;
}

} // namespace rissynth
