#pragma once

// Umbrella header: closed-form entanglement of formation for two qubits,
// optimal pure-state decompositions, and the brute-force verification oracle.

#include "decomposition.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "oracle.hpp"
#include "quantum.hpp"
#include "random.hpp"
