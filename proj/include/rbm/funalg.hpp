#pragma once

#include "rbm/funalg/bound.hpp"
#include "rbm/funalg/eval.hpp"
#include "rbm/funalg/prelude.hpp"
#include "rbm/funalg/secpoly.hpp"
#include "rbm/funalg/term.hpp"
