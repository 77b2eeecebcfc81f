#pragma once

#include "luinv/tensor_core.hpp"
#include "luinv/link_ops.hpp"
#include "luinv/path_invariants.hpp"
#include "luinv/random_states.hpp"
#include "luinv/state_io.hpp"
#include "luinv/verify.hpp"
