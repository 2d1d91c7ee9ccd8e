#pragma once

#include "rbm/martingale/martingale.hpp"
#include "rbm/martingale/regularize.hpp"
