#pragma once

#include "rbm/diagonal/constructor.hpp"
