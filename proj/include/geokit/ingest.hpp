#pragma once

#include "geokit/ingest/jsonl.hpp"
#include "geokit/ingest/png_io.hpp"
#include "geokit/ingest/records.hpp"
#include "geokit/ingest/tensor_io.hpp"
