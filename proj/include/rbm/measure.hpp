#pragma once

#include "rbm/measure/measure.hpp"
