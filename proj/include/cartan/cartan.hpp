#pragma once

// Umbrella header.

#include "cartan/calculus.hpp"
#include "cartan/derquot.hpp"
#include "cartan/expr.hpp"
#include "cartan/forms.hpp"
#include "cartan/json_io.hpp"
#include "cartan/parse.hpp"
#include "cartan/primitives.hpp"
#include "cartan/random.hpp"
#include "cartan/ring.hpp"
#include "cartan/site.hpp"
