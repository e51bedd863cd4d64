#pragma once

#include <cstdlib>

namespace mono3d {

// Thread cap for OpenMP kernels. MONO3D_THREADS, when set to a positive
// integer, limits the team size; otherwise the OpenMP default applies.
// Results are required to be bit-identical for any thread count.
int max_threads();

}  // namespace mono3d
