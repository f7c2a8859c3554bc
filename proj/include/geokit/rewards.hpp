#pragma once

#include "geokit/rewards/blocks.hpp"
#include "geokit/rewards/grpo.hpp"
#include "geokit/rewards/levenshtein.hpp"
#include "geokit/rewards/rewards.hpp"
