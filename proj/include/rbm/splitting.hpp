#pragma once

#include "rbm/splitting/expr.hpp"
#include "rbm/splitting/operator.hpp"
#include "rbm/splitting/sequence.hpp"
