#pragma once

#include "rissynth/matrix.hpp"

namespace rissynth {

using LevelMatrix = Matrix<int>;

// Integer phase-level assignment of every element, levels in [1, 2^K].
class PhaseProfile {
public:
    // Throws DomainError if any entry falls outside [1, 2^K] or the matrix is empty.
    PhaseProfile(LevelMatrix levels, int resolution_bits);

    // Every element at the same level.
    static PhaseProfile uniform(std::size_t rows, std::size_t cols, int resolution_bits, int level = 1);

    const LevelMatrix &levels() const noexcept { return levels_; }
    int resolution_bits() const noexcept { return bits_; }
    int level_count() const noexcept { return 1 << bits_; }
    std::size_t rows() const noexcept { return levels_.rows(); }
    std::size_t cols() const noexcept { return levels_.cols(); }
    int operator()(std::size_t r, std::size_t c) const noexcept { return levels_(r, c); }

    // Radian phase of every element via level_to_phase.
    Matrix<double> phases() const;

    friend bool operator==(const PhaseProfile &, const PhaseProfile &) = default;

private:
    LevelMatrix levels_;
    int bits_;
};

} // namespace rissynth
