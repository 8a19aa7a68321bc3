#pragma once

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/game.hpp"
#include "penny/seed.hpp"
#include "penny/strategy.hpp"
#include "penny/exploiter.hpp"
#include "penny/oracle.hpp"
#include "penny/prng.hpp"
#include "penny/distinguisher.hpp"
#include "penny/discounted.hpp"
#include "penny/descriptor.hpp"
