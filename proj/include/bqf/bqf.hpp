#pragma once

// Umbrella header: the whole library.

#include "classgroup.hpp"
#include "decide.hpp"
#include "decompose.hpp"
#include "errors.hpp"
#include "forms.hpp"
#include "integers.hpp"
#include "intmath.hpp"
#include "orders.hpp"
