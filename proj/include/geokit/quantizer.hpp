#pragma once

#include "geokit/quantizer/entropy.hpp"
#include "geokit/quantizer/lfq.hpp"
#include "geokit/quantizer/losses.hpp"
