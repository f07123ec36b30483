#pragma once

#include <cstddef>
#include <map>

namespace netdos {

/// Spectrum removed by motif deflation: eigenvalue (original units) to the
/// number of deflated eigenvectors at that value.
struct FilterAdjustment {
    std::map<double, std::size_t> multiplicity;
    std::size_t removed = 0; ///< r = sum of multiplicities
};

} // namespace netdos
