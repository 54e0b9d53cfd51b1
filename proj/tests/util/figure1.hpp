#pragma once

#include "knnd/geometry.hpp"

namespace knnd::testutil {

// The ten-point golden configuration: v1..v10 as ids 0..9.
// At k=1 it has R=3, Q=3, Q_j=(3,4,3); at k=2 R=6, Q=17, Q_j=(1,3,2,3,1).
PointSet figure1_points();

}  // namespace knnd::testutil
