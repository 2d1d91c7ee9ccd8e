#pragma once

#include "rbm/core/bitstring.hpp"
#include "rbm/core/dyadic.hpp"
#include "rbm/core/errors.hpp"
#include "rbm/core/growth.hpp"
#include "rbm/core/limits.hpp"
#include "rbm/core/numeric.hpp"
#include "rbm/core/sexpr.hpp"
