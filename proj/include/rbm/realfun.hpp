#pragma once

#include "rbm/realfun/real_function.hpp"
#include "rbm/realfun/robin_hood.hpp"
