#pragma once

#include "geokit/metrics/bleu.hpp"
#include "geokit/metrics/gpms.hpp"
#include "geokit/metrics/gsms.hpp"
