#pragma once

#include "lipdyn/errors.hpp"
#include "lipdyn/scalar.hpp"
#include "lipdyn/tree.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/matrix.hpp"
#include "lipdyn/oracles.hpp"
#include "lipdyn/dynamics.hpp"
#include "lipdyn/serialize.hpp"
#include "lipdyn/verify.hpp"
