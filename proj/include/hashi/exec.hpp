#pragma once

namespace hashi {

// Per-vertex kernels come in a serial reference form and an OpenMP form.
enum class Exec { Serial, Parallel };

}  // namespace hashi
